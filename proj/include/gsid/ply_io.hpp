#pragma once

#include "gsid/types.hpp"

#include <filesystem>
#include <optional>

namespace gsid {

/// Loads a binary little-endian PLY scene. Expected vertex properties:
/// x,y,z, scale_0..2, rot_0..3, opacity, f_dc_0..2, optional gt_id (int32),
/// optional id_feat_0..{D-1} (f32). All values are linear-domain.
///
/// Files without id_feat_* properties yield zero features with
/// d_code = expected_d_code (or 0 when unspecified). A file whose feature
/// dimension disagrees with expected_d_code raises a dimension error.
/// Malformed headers raise std::runtime_error naming the offending line.
GaussianScene load_scene_ply(const std::filesystem::path& path,
                             std::optional<int> expected_d_code = std::nullopt);

/// Writes the PLY layout read by load_scene_ply. Scenes with d_code == 0
/// produce no id_feat_* properties; gt_id is written only when some
/// Gaussian carries a label.
void save_scene_ply(const GaussianScene& scene, const std::filesystem::path& path);

} // namespace gsid
