#include "gsid/metrics.hpp"

#include "gsid/losses.hpp"
#include "gsid/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

namespace gsid {

Aggregate Aggregate::of(const std::vector<double>& xs) {
    Aggregate a;
    if (xs.empty()) return a;
    a.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - a.mean) * (x - a.mean);
    a.stddev = std::sqrt(var / static_cast<double>(xs.size()));
    return a;
}

IdMap assign_ids(const Tensor& feature, const Tensor& alpha, const Codebook& codebook,
                 bool include_background_code) {
    if (codebook.num_codes() < 1) throw std::invalid_argument("empty codebook");
    if (feature.rank() != 3 || alpha.rank() != 2 || feature.dim(0) != alpha.dim(0) ||
        feature.dim(1) != alpha.dim(1)) {
        throw std::invalid_argument("assign_ids: feature/alpha shape mismatch");
    }
    if (static_cast<int>(feature.dim(2)) != codebook.dim()) {
        throw std::invalid_argument("assign_ids: feature dimension does not match codebook");
    }
    const int h = static_cast<int>(feature.dim(0));
    const int w = static_cast<int>(feature.dim(1));
    const int c_count = codebook.num_codes();
    const int d = codebook.dim();

    IdMap out(w, h, codebook.background_index());
    out.source = IdMap::Source::predicted;

    parallel_blocks(static_cast<size_t>(h), 16, [&](size_t y0, size_t y1) {
        for (size_t y = y0; y < y1; ++y) {
            for (int x = 0; x < w; ++x) {
                if (alpha.at(y, x) < 0.5f) {
                    out.at(static_cast<int>(y), x) = out.background_label;
                    continue;
                }
                const float* f = feature.row(y, static_cast<size_t>(x));
                int best = 0;
                double best_d2 = std::numeric_limits<double>::infinity();
                for (int c = 0; c < c_count; ++c) {
                    const float* e = codebook.codes.data() + static_cast<size_t>(c) * d;
                    double d2 = 0.0;
                    for (int k = 0; k < d; ++k) {
                        double diff = static_cast<double>(f[k]) - e[k];
                        d2 += diff * diff;
                    }
                    if (d2 < best_d2) {
                        best_d2 = d2;
                        best = c;
                    }
                }
                if (include_background_code) {
                    double d2 = 0.0;
                    for (int k = 0; k < d; ++k) {
                        double diff = static_cast<double>(f[k]) - codebook.background_code[k];
                        d2 += diff * diff;
                    }
                    if (d2 < best_d2) best = out.background_label;
                }
                out.at(static_cast<int>(y), x) = best;
            }
        }
    });
    return out;
}

namespace {

/// Contingency table between two labelings over the same index set.
struct Contingency {
    std::vector<int64_t> counts; // ra x cb row-major
    std::vector<int64_t> row_sums, col_sums;
    int64_t n = 0;
    size_t rows() const { return row_sums.size(); }
    size_t cols() const { return col_sums.size(); }
};

Contingency build_contingency(const std::vector<int32_t>& a, const std::vector<int32_t>& b) {
    std::map<int32_t, int> amap, bmap;
    for (int32_t v : a) amap.emplace(v, 0);
    for (int32_t v : b) bmap.emplace(v, 0);
    int idx = 0;
    for (auto& [k, v] : amap) v = idx++;
    idx = 0;
    for (auto& [k, v] : bmap) v = idx++;

    Contingency c;
    c.row_sums.assign(amap.size(), 0);
    c.col_sums.assign(bmap.size(), 0);
    c.counts.assign(amap.size() * bmap.size(), 0);
    c.n = static_cast<int64_t>(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        int ra = amap[a[i]];
        int cb = bmap[b[i]];
        c.counts[static_cast<size_t>(ra) * bmap.size() + cb]++;
        c.row_sums[ra]++;
        c.col_sums[cb]++;
    }
    return c;
}

void filter_foreground(const std::vector<int32_t>& pred, const std::vector<int32_t>& gt,
                       int gt_background, std::vector<int32_t>& pred_out,
                       std::vector<int32_t>& gt_out) {
    if (pred.size() != gt.size()) throw std::invalid_argument("label vectors differ in length");
    for (size_t i = 0; i < gt.size(); ++i) {
        if (gt[i] == gt_background) continue;
        pred_out.push_back(pred[i]);
        gt_out.push_back(gt[i]);
    }
}

double comb2(int64_t n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

double entropy(const std::vector<int64_t>& sums, int64_t n) {
    double h = 0.0;
    for (int64_t s : sums) {
        if (s == 0) continue;
        double p = static_cast<double>(s) / static_cast<double>(n);
        h -= p * std::log(p);
    }
    return h;
}

double mutual_information(const Contingency& c) {
    double mi = 0.0;
    double n = static_cast<double>(c.n);
    for (size_t i = 0; i < c.rows(); ++i) {
        for (size_t j = 0; j < c.cols(); ++j) {
            int64_t nij = c.counts[i * c.cols() + j];
            if (nij == 0) continue;
            double pij = static_cast<double>(nij) / n;
            mi += pij * std::log(n * static_cast<double>(nij) /
                                 (static_cast<double>(c.row_sums[i]) *
                                  static_cast<double>(c.col_sums[j])));
        }
    }
    return std::max(0.0, mi);
}

/// E[MI] under the permutation (hypergeometric) model, in log-factorial space.
double expected_mutual_information(const Contingency& c) {
    const double n = static_cast<double>(c.n);
    const double lg_n1 = std::lgamma(n + 1.0);
    double emi = 0.0;
    for (size_t i = 0; i < c.rows(); ++i) {
        const double a = static_cast<double>(c.row_sums[i]);
        for (size_t j = 0; j < c.cols(); ++j) {
            const double b = static_cast<double>(c.col_sums[j]);
            const int64_t lo = std::max<int64_t>(1, c.row_sums[i] + c.col_sums[j] - c.n);
            const int64_t hi = std::min(c.row_sums[i], c.col_sums[j]);
            for (int64_t nij = lo; nij <= hi; ++nij) {
                const double x = static_cast<double>(nij);
                double term = (x / n) * std::log(n * x / (a * b));
                double logp = std::lgamma(a + 1.0) + std::lgamma(b + 1.0) +
                              std::lgamma(n - a + 1.0) + std::lgamma(n - b + 1.0) - lg_n1 -
                              std::lgamma(x + 1.0) - std::lgamma(a - x + 1.0) -
                              std::lgamma(b - x + 1.0) - std::lgamma(n - a - b + x + 1.0);
                emi += term * std::exp(logp);
            }
        }
    }
    return emi;
}

} // namespace

double ari(const std::vector<int32_t>& pred, const std::vector<int32_t>& gt,
           bool foreground_only, int gt_background, bool* degenerate) {
    if (degenerate) *degenerate = false;
    std::vector<int32_t> p, g;
    const std::vector<int32_t>*pp = &pred, *gg = &gt;
    if (foreground_only) {
        filter_foreground(pred, gt, gt_background, p, g);
        if (p.empty()) throw std::invalid_argument("ari: no foreground pixels");
        pp = &p;
        gg = &g;
    }
    if (pp->size() < 2) throw std::invalid_argument("ari: need at least 2 samples");
    Contingency c = build_contingency(*pp, *gg);

    if (c.rows() == 1 && c.cols() == 1) {
        if (degenerate) *degenerate = true;
        return 1.0;
    }

    double sum_ij = 0.0;
    for (int64_t nij : c.counts) sum_ij += comb2(nij);
    double sum_a = 0.0, sum_b = 0.0;
    for (int64_t s : c.row_sums) sum_a += comb2(s);
    for (int64_t s : c.col_sums) sum_b += comb2(s);
    double total = comb2(c.n);
    double expected = sum_a * sum_b / total;
    double max_index = 0.5 * (sum_a + sum_b);
    double denom = max_index - expected;
    if (denom == 0.0) {
        // All-singleton partitions on both sides agree trivially.
        if (degenerate) *degenerate = true;
        return 1.0;
    }
    return (sum_ij - expected) / denom;
}

double ami(const std::vector<int32_t>& pred, const std::vector<int32_t>& gt,
           bool foreground_only, int gt_background, bool* degenerate) {
    if (degenerate) *degenerate = false;
    std::vector<int32_t> p, g;
    const std::vector<int32_t>*pp = &pred, *gg = &gt;
    if (foreground_only) {
        filter_foreground(pred, gt, gt_background, p, g);
        if (p.empty()) throw std::invalid_argument("ami: no foreground pixels");
        pp = &p;
        gg = &g;
    }
    if (pp->size() < 2) throw std::invalid_argument("ami: need at least 2 samples");
    Contingency c = build_contingency(*pp, *gg);

    if (c.rows() == 1 && c.cols() == 1) {
        if (degenerate) *degenerate = true;
        return 1.0;
    }

    double hu = entropy(c.row_sums, c.n);
    double hv = entropy(c.col_sums, c.n);
    double mi = mutual_information(c);
    double emi = expected_mutual_information(c);
    double denom = std::max(hu, hv) - emi;
    if (std::abs(denom) < 1e-15) {
        if (degenerate) *degenerate = true;
        return 1.0;
    }
    return (mi - emi) / denom;
}

double miou(const IdMap& pred, const IdMap& gt) {
    if (pred.width != gt.width || pred.height != gt.height) {
        throw std::invalid_argument("miou: shape mismatch");
    }
    // Intersection counts keyed by (gt label, pred label).
    std::map<int32_t, int64_t> gt_area, pred_area;
    std::map<std::pair<int32_t, int32_t>, int64_t> inter;
    for (size_t i = 0; i < gt.labels.size(); ++i) {
        int32_t gl = gt.labels[i];
        int32_t pl = pred.labels[i];
        if (gl != gt.background_label) gt_area[gl]++;
        if (pl != pred.background_label) pred_area[pl]++;
        if (gl != gt.background_label && pl != pred.background_label) {
            inter[{gl, pl}]++;
        }
    }
    if (gt_area.empty()) throw std::invalid_argument("miou: no foreground objects in gt");

    // Descending area, ties by label for determinism.
    std::vector<std::pair<int32_t, int64_t>> objects(gt_area.begin(), gt_area.end());
    std::sort(objects.begin(), objects.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    std::map<int32_t, bool> used;
    double sum_iou = 0.0;
    for (const auto& [gl, area] : objects) {
        double best_iou = 0.0;
        int32_t best_label = -1;
        for (const auto& [pl, parea] : pred_area) {
            if (used.count(pl)) continue;
            auto it = inter.find({gl, pl});
            int64_t ov = it == inter.end() ? 0 : it->second;
            if (ov == 0) continue;
            double iou = static_cast<double>(ov) / static_cast<double>(area + parea - ov);
            if (iou > best_iou || (iou == best_iou && best_label >= 0 && pl < best_label)) {
                best_iou = iou;
                best_label = pl;
            }
        }
        if (best_label >= 0) used[best_label] = true;
        sum_iou += best_iou;
    }
    return sum_iou / static_cast<double>(objects.size());
}

double psnr(const Tensor& img, const Tensor& ref) {
    if (!img.same_shape(ref)) throw std::invalid_argument("psnr: shape mismatch");
    double mse = 0.0;
    for (size_t i = 0; i < img.data.size(); ++i) {
        double d = static_cast<double>(img.data[i]) - ref.data[i];
        mse += d * d;
    }
    mse /= static_cast<double>(img.data.size());
    if (mse <= 0.0) return 100.0;
    return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

double cross_scene_consistency(const std::vector<ScenePrediction>& scenes) {
    if (scenes.size() < 2) throw std::invalid_argument("cross-scene check needs >= 2 scenes");

    // Majority-vote predicted code per (scene, object code).
    std::vector<std::map<int, int>> predicted(scenes.size()); // code -> majority label
    for (size_t s = 0; s < scenes.size(); ++s) {
        const auto& sc = scenes[s];
        if (sc.pred.size() != sc.gt.size()) {
            throw std::invalid_argument("cross-scene: pred/gt view count mismatch");
        }
        std::map<int, std::unordered_map<int32_t, int64_t>> votes;
        for (size_t v = 0; v < sc.pred.size(); ++v) {
            const IdMap& pm = sc.pred[v];
            const IdMap& gm = sc.gt[v];
            if (pm.labels.size() != gm.labels.size()) {
                throw std::invalid_argument("cross-scene: view shape mismatch");
            }
            for (size_t i = 0; i < gm.labels.size(); ++i) {
                if (gm.labels[i] == gm.background_label) continue;
                votes[gm.labels[i]][pm.labels[i]]++;
            }
        }
        for (int code : sc.object_codes) {
            auto it = votes.find(code);
            if (it == votes.end()) continue; // object never visible
            int32_t best_label = -1;
            int64_t best_count = -1;
            for (const auto& [label, count] : it->second) {
                if (count > best_count || (count == best_count && label < best_label)) {
                    best_count = count;
                    best_label = label;
                }
            }
            predicted[s][code] = best_label;
        }
    }

    // Shared objects: codes claimed by at least two scenes.
    std::map<int, int> claims;
    for (const auto& sc : scenes) {
        for (int code : sc.object_codes) claims[code]++;
    }
    int shared = 0, consistent = 0;
    for (const auto& [code, cnt] : claims) {
        if (cnt < 2) continue;
        ++shared;
        bool ok = true;
        for (size_t s = 0; s < scenes.size(); ++s) {
            const auto& codes = scenes[s].object_codes;
            if (std::find(codes.begin(), codes.end(), code) == codes.end()) continue;
            auto it = predicted[s].find(code);
            if (it == predicted[s].end() || it->second != code) {
                ok = false;
                break;
            }
        }
        if (ok) ++consistent;
    }
    if (shared == 0) throw std::invalid_argument("cross-scene: scenes share no objects");
    return static_cast<double>(consistent) / static_cast<double>(shared);
}

} // namespace gsid
