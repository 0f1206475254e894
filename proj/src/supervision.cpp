#include "gsid/supervision.hpp"

#include "gsid/parallel.hpp"
#include "gsid/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace gsid {

void MaskBundle::validate() const {
    if (masks.rank() != 3) throw std::invalid_argument("masks must be K x H x W");
    if (gamma.rows() != static_cast<Eigen::Index>(masks.dim(0))) {
        throw std::invalid_argument("gamma rows must match mask count");
    }
    const int k = k_slots();
    const size_t hw = static_cast<size_t>(height()) * width();
    for (size_t p = 0; p < hw; ++p) {
        float sum = 0.0f;
        for (int s = 0; s < k; ++s) sum += masks.data[s * hw + p];
        if (sum > 1.0f + 1e-5f) {
            throw std::invalid_argument("mask mass exceeds 1 at pixel " + std::to_string(p));
        }
    }
    for (int s = 0; s < k; ++s) {
        float sum = gamma.row(s).sum();
        if (!std::isfinite(sum) || std::abs(sum - 1.0f) > 1e-5f) {
            throw std::invalid_argument("gamma row " + std::to_string(s) + " does not sum to 1");
        }
        if ((gamma.row(s).array() < 0.0f).any()) {
            throw std::invalid_argument("gamma row " + std::to_string(s) + " has negative entries");
        }
    }
}

MatrixXfRM gumbel_intrinsic(const SlotState& state, const Codebook& codebook, bool hard,
                            std::optional<uint64_t> noise_seed) {
    if (state.temperature <= 0.0f) throw std::invalid_argument("temperature must be positive");
    if (!state.gamma_logits.allFinite()) {
        throw std::invalid_argument("gumbel_intrinsic: non-finite logits");
    }
    if (state.gamma_logits.cols() != codebook.num_codes()) {
        throw std::invalid_argument("logit columns must match codebook size");
    }
    const int k = state.k_slots();
    const int c = codebook.num_codes();

    MatrixXfRM perturbed = state.gamma_logits;
    if (noise_seed) {
        Rng rng(Rng::derive(*noise_seed, 0x67756d62ull)); // stream tag
        for (int s = 0; s < k; ++s) {
            for (int j = 0; j < c; ++j) {
                perturbed(s, j) += static_cast<float>(rng.gumbel());
            }
        }
    }

    MatrixXfRM out(k, codebook.dim());
    for (int s = 0; s < k; ++s) {
        if (hard) {
            int best = 0;
            for (int j = 1; j < c; ++j) {
                if (perturbed(s, j) > perturbed(s, best)) best = j;
            }
            out.row(s) = codebook.codes.row(best);
            continue;
        }
        Eigen::VectorXf z = perturbed.row(s).transpose() / state.temperature;
        float zmax = z.maxCoeff();
        Eigen::VectorXf y = (z.array() - zmax).exp();
        y /= y.sum();
        out.row(s) = y.transpose() * codebook.codes;
    }
    return out;
}

MatrixXfRM build_full_slots(const MatrixXfRM& s_int, const SlotState& state) {
    const int k = state.k_slots();
    if (s_int.rows() != k) throw std::invalid_argument("s_int rows must equal slot count");
    const int d_slot = static_cast<int>(s_int.cols() + state.s_ext.cols());
    if (state.s_bck.size() != d_slot) {
        throw std::invalid_argument("background slot dimension must be D_code + D_ext");
    }
    if (state.s_ext.rows() != k) throw std::invalid_argument("s_ext rows must equal slot count");

    MatrixXfRM full(k + 1, d_slot);
    full.block(0, 0, k, s_int.cols()) = s_int;
    full.block(0, s_int.cols(), k, state.s_ext.cols()) = state.s_ext;
    full.row(k) = state.s_bck.transpose();
    return full;
}

std::vector<int> select_code(const MatrixXfRM& gamma) {
    if (gamma.rows() == 0 || gamma.cols() == 0) {
        throw std::invalid_argument("select_code: empty gamma");
    }
    if (!gamma.allFinite()) throw std::invalid_argument("select_code: non-finite gamma");
    std::vector<int> out(static_cast<size_t>(gamma.rows()));
    for (Eigen::Index s = 0; s < gamma.rows(); ++s) {
        int best = 0;
        for (Eigen::Index j = 1; j < gamma.cols(); ++j) {
            if (gamma(s, j) > gamma(s, best)) best = static_cast<int>(j);
        }
        out[static_cast<size_t>(s)] = best;
    }
    return out;
}

TargetMap build_target(const MaskBundle& bundle, const Codebook& codebook) {
    bundle.validate();
    if (bundle.gamma.cols() != codebook.num_codes()) {
        throw std::invalid_argument("gamma columns must match codebook size");
    }
    const int k = bundle.k_slots();
    const int h = bundle.height();
    const int w = bundle.width();
    const int d = codebook.dim();
    const size_t hw = static_cast<size_t>(h) * w;

    std::vector<int> codes = select_code(bundle.gamma);

    TargetMap out;
    out.target = Tensor({static_cast<uint64_t>(h), static_cast<uint64_t>(w),
                         static_cast<uint64_t>(d)});
    out.covered.assign(hw, 0);

    parallel_blocks(hw, 4096, [&](size_t b, size_t e) {
        // (code, mask-bits) pairs per pixel; sorted so the accumulation
        // order is independent of slot permutation.
        std::array<std::pair<uint64_t, float>, 64> active;
        for (size_t p = b; p < e; ++p) {
            int n_active = 0;
            float total = 0.0f;
            for (int s = 0; s < k; ++s) {
                float m = bundle.masks.data[s * hw + p];
                if (m == 0.0f) continue;
                uint64_t key = (static_cast<uint64_t>(codes[s]) << 32) |
                               std::bit_cast<uint32_t>(m);
                active[n_active++] = {key, m};
                total += m;
            }
            float* t = out.target.data.data() + p * d;
            if (total > 0.5f) {
                out.covered[p] = 1;
                std::sort(active.begin(), active.begin() + n_active);
                for (int i = 0; i < n_active; ++i) {
                    const float m = active[i].second;
                    const float* code_row =
                        codebook.codes.data() +
                        static_cast<size_t>(active[i].first >> 32) * d;
                    for (int j = 0; j < d; ++j) t[j] += m * code_row[j];
                }
            } else {
                for (int j = 0; j < d; ++j) t[j] = codebook.background_code[j];
            }
        }
    });
    return out;
}

} // namespace gsid
