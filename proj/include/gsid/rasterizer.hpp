#pragma once

#include "gsid/metrics.hpp"
#include "gsid/tensor.hpp"
#include "gsid/types.hpp"

#include <optional>
#include <vector>

namespace gsid {

/// Alpha-blending constants. The paper's backbone leaves these unstated;
/// the values follow common splatting practice and are fixed here so
/// renders are reproducible.
constexpr float kAlphaClamp = 0.99f;
constexpr float kAlphaSkip = 1.0f / 255.0f;
constexpr float kTransmittanceStop = 1e-4f;
constexpr float kCovRegularizer = 0.3f; // px^2, added to cov2d diagonal
// Splat support is truncated at the 3-sigma Mahalanobis ellipse, i.e.
// exponent >= -4.5. Tile binning uses the circumscribing 3-sigma circle,
// so every pixel inside a splat's support sees it.
constexpr float kPowerCutoff = -4.5f;
constexpr int kDefaultTileSize = 16;

/// A Gaussian projected to the image plane.
struct Splat2D {
    int gaussian_index = -1;
    Eigen::Vector2f mean2d = Eigen::Vector2f::Zero(); // pixels
    Eigen::Matrix2f cov2d = Eigen::Matrix2f::Zero();  // pixels^2, regularized
    float depth = 0.0f;                               // view-space z
    float radius = 0.0f;                              // 3-sigma bound, pixels
};

/// EWA-style perspective projection of one Gaussian. Returns nothing when
/// the center depth is outside (near, far) or the 3-sigma bound misses the
/// image.
std::optional<Splat2D> project_gaussian(const Gaussian& g, const Camera& cam);
std::optional<Splat2D> project_gaussian(const Eigen::Vector3f& position,
                                        const Eigen::Vector3f& scale,
                                        const Eigen::Vector4f& rotation, int index,
                                        const Camera& cam);

struct RenderOptions {
    bool capture_weights = false;
    bool render_features = true;
    int tile_size = kDefaultTileSize;
};

struct PixelWeight {
    uint32_t index; // gaussian index
    float w;        // alpha_i * prod(1 - alpha_t), t before i
};

struct RenderOutput {
    Tensor color;   // H x W x 3
    Tensor feature; // H x W x D; empty when features are disabled
    Tensor alpha;   // H x W accumulated opacity
    // Per-pixel blend weights in front-to-back order; populated only when
    // capture_weights is set.
    std::vector<std::vector<PixelWeight>> weights;
};

/// Projection, depth sort, and tile binning for one camera. Valid as long
/// as geometry and opacity are unchanged; colors and identity features may
/// change between renders (the training loop relies on this).
struct PreparedView {
    int width = 0, height = 0;
    int tile_size = kDefaultTileSize;
    int tiles_x = 0, tiles_y = 0;

    // One record per visible splat, sorted by (depth, gaussian_index).
    struct Record {
        float mean_x, mean_y;
        float conic_a, conic_b, conic_c; // inverse covariance entries
        float opacity;
        uint32_t index;
    };
    std::vector<Record> records;
    std::vector<uint32_t> tile_offsets; // tiles_x*tiles_y + 1 prefix offsets
    std::vector<uint32_t> tile_entries; // record indices, per-tile depth order
};

PreparedView prepare_view(const GaussianScene& scene, const Camera& cam,
                          int tile_size = kDefaultTileSize);

RenderOutput rasterize_prepared(const PreparedView& view, const GaussianScene& scene,
                                const RenderOptions& opts = {});

/// Front-to-back alpha blend of color, identity features, and opacity.
/// Deterministic for fixed inputs at any worker count.
RenderOutput rasterize(const GaussianScene& scene, const Camera& cam,
                       const RenderOptions& opts = {});

/// Nearest-code ID image for a rendered feature/alpha pair (background
/// where alpha < 0.5).
IdMap render_ids_image(const Tensor& feature, const Tensor& alpha, const Codebook& codebook);

} // namespace gsid
