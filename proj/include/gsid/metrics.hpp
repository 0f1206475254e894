#pragma once

#include "gsid/tensor.hpp"
#include "gsid/types.hpp"

#include <cstdint>
#include <vector>

namespace gsid {

/// Per-pixel code labels. Object codes are 0..C-1; the background label is
/// C (one past the last codebook row).
struct IdMap {
    enum class Source { predicted, ground_truth };

    int width = 0, height = 0;
    std::vector<int32_t> labels;
    int background_label = kDefaultNumCodes;
    Source source = Source::predicted;

    IdMap() = default;
    IdMap(int w, int h, int background)
        : width(w), height(h), labels(static_cast<size_t>(w) * h, background),
          background_label(background) {}

    int32_t& at(int y, int x) { return labels[static_cast<size_t>(y) * width + x]; }
    int32_t at(int y, int x) const { return labels[static_cast<size_t>(y) * width + x]; }
};

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;
    static Aggregate of(const std::vector<double>& xs);
};

/// Object-centric evaluation summary for one scene, aggregated over views.
struct EvalReport {
    Aggregate fg_ari, ari_a, fg_ami, ami_a, miou;
    Aggregate psnr, ssim; // present only when images were compared
    bool has_reconstruction = false;
    bool degenerate_warning = false; // some view hit the single-cluster case
    int view_count = 0;
};

/// Per-pixel nearest-codebook-row assignment by squared L2 distance, ties
/// to the lowest index. Pixels with alpha < 0.5 are forced to the
/// background label C. When include_background_code is set (the default),
/// the zero background code competes in the argmin as index C; otherwise
/// only object rows are considered.
IdMap assign_ids(const Tensor& feature, const Tensor& alpha, const Codebook& codebook,
                 bool include_background_code = true);

/// Adjusted Rand Index between two labelings. With foreground_only, pixels
/// whose gt label equals gt_background are dropped first. The degenerate
/// case (both partitions a single cluster) is defined as 1.0 and reported
/// through *degenerate when provided.
double ari(const std::vector<int32_t>& pred, const std::vector<int32_t>& gt,
           bool foreground_only, int gt_background, bool* degenerate = nullptr);

/// Adjusted Mutual Information (expected-MI correction under the
/// permutation model, max normalization). Same degenerate convention as ari.
double ami(const std::vector<int32_t>& pred, const std::vector<int32_t>& gt,
           bool foreground_only, int gt_background, bool* degenerate = nullptr);

/// Mean IoU over ground-truth foreground objects. Objects are processed in
/// descending gt area; each is greedily matched to the unused predicted
/// label (background excluded) of highest IoU.
double miou(const IdMap& pred, const IdMap& gt);

/// 10*log10(1/MSE) in dB, capped at 100.
double psnr(const Tensor& img, const Tensor& ref);

/// Mean SSIM (11x11 Gaussian window, standard constants); shares the
/// implementation used by the rendering loss.
double ssim(const Tensor& img, const Tensor& ref);

/// One trained scene's predictions for cross-scene identity checking.
struct ScenePrediction {
    std::vector<IdMap> pred;       // rendered ID maps, one per view
    std::vector<IdMap> gt;         // ground-truth label maps, same order
    std::vector<int> object_codes; // global codes present in the scene
};

/// Fraction of objects shared between scenes whose majority-vote predicted
/// code agrees across every scene containing them AND equals the true
/// global code. Throws when no object code is shared.
double cross_scene_consistency(const std::vector<ScenePrediction>& scenes);

} // namespace gsid
