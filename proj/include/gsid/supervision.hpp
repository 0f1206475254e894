#pragma once

#include "gsid/tensor.hpp"
#include "gsid/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace gsid {

/// One view's unsupervised object masks and mask-to-code probabilities, as
/// a pre-trained grouping module would emit them.
struct MaskBundle {
    Tensor masks;      // K x H x W, soft values in [0,1]
    MatrixXfRM gamma;  // K x C, rows nonnegative, each summing to 1
    int view_id = 0;

    int k_slots() const { return static_cast<int>(masks.dim(0)); }
    int height() const { return static_cast<int>(masks.dim(1)); }
    int width() const { return static_cast<int>(masks.dim(2)); }

    /// Checks shape agreement, per-pixel mask sums <= 1, and row-stochastic
    /// gamma. Throws std::invalid_argument on violation.
    void validate() const;
};

/// Slot state mirroring the grouping module's decomposition: intrinsic
/// dimensions come from the codebook, extrinsic ones are scene-dependent
/// and carried opaquely here.
struct SlotState {
    MatrixXfRM s_ext;        // K x D_ext
    MatrixXfRM gamma_logits; // K x C
    Eigen::VectorXf s_bck;   // D_slot
    float temperature = 1.0f;

    int k_slots() const { return static_cast<int>(gamma_logits.rows()); }
    int d_ext() const { return static_cast<int>(s_ext.cols()); }
};

/// Gumbel-Softmax selection of intrinsic slot features:
/// s_int = softmax((logits + g) / tau) * codes, g ~ Gumbel(0,1) drawn
/// deterministically from noise_seed (no noise when the seed is absent).
/// With hard = true the softmax is replaced by one-hot argmax selection,
/// so every output row is an exact codebook row.
MatrixXfRM gumbel_intrinsic(const SlotState& state, const Codebook& codebook, bool hard,
                            std::optional<uint64_t> noise_seed);

/// Rows 1..K are [s_int_k | s_ext_k]; row K+1 is the background slot.
/// Output shape (K+1) x (D_code + D_ext).
MatrixXfRM build_full_slots(const MatrixXfRM& s_int, const SlotState& state);

/// Per-slot argmax code selection; ties break toward the lowest index.
std::vector<int> select_code(const MatrixXfRM& gamma);

struct TargetMap {
    Tensor target;                // H x W x D_code
    std::vector<uint8_t> covered; // H*W flags: mask mass > 0.5
};

/// Dense identity-feature supervision: F*_u = sum_k M_k(u) * f*_{c_k} with
/// f* the selected codebook rows. Pixels whose total mask mass is <= 0.5
/// are uncovered and receive the background code instead.
///
/// Contributions are accumulated in (code, mask-value) order rather than
/// slot order, which makes the output bit-identical under any joint
/// permutation of mask slots and gamma rows.
TargetMap build_target(const MaskBundle& bundle, const Codebook& codebook);

} // namespace gsid
