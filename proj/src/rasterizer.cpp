#include "gsid/rasterizer.hpp"

#include "gsid/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace gsid {

std::optional<Splat2D> project_gaussian(const Eigen::Vector3f& position,
                                        const Eigen::Vector3f& scale,
                                        const Eigen::Vector4f& rotation, int index,
                                        const Camera& cam) {
    const Eigen::Vector3f t = cam.to_view(position);
    if (!(t.z() > cam.near && t.z() < cam.far)) return std::nullopt;

    const float inv_z = 1.0f / t.z();
    Eigen::Vector2f mean2d(cam.fx * t.x() * inv_z + cam.cx, cam.fy * t.y() * inv_z + cam.cy);

    // Jacobian of the pinhole map at the center, times the world-to-view
    // rotation: first-order (EWA) propagation of the 3D covariance.
    Eigen::Matrix<float, 2, 3> jac;
    jac << cam.fx * inv_z, 0.0f, -cam.fx * t.x() * inv_z * inv_z,
           0.0f, cam.fy * inv_z, -cam.fy * t.y() * inv_z * inv_z;
    Eigen::Matrix<float, 2, 3> m = jac * cam.rotation();
    Eigen::Matrix2f cov2d = m * gaussian_covariance(scale, rotation) * m.transpose();
    cov2d(0, 0) += kCovRegularizer;
    cov2d(1, 1) += kCovRegularizer;
    // Symmetrize against rounding drift.
    float off = 0.5f * (cov2d(0, 1) + cov2d(1, 0));
    cov2d(0, 1) = cov2d(1, 0) = off;

    const float mid = 0.5f * (cov2d(0, 0) + cov2d(1, 1));
    const float det = cov2d(0, 0) * cov2d(1, 1) - off * off;
    const float lambda_max = mid + std::sqrt(std::max(0.0f, mid * mid - det));
    const float radius = std::ceil(3.0f * std::sqrt(lambda_max));

    if (mean2d.x() + radius < 0.0f || mean2d.x() - radius > static_cast<float>(cam.width) ||
        mean2d.y() + radius < 0.0f || mean2d.y() - radius > static_cast<float>(cam.height)) {
        return std::nullopt;
    }

    Splat2D s;
    s.gaussian_index = index;
    s.mean2d = mean2d;
    s.cov2d = cov2d;
    s.depth = t.z();
    s.radius = radius;
    return s;
}

std::optional<Splat2D> project_gaussian(const Gaussian& g, const Camera& cam) {
    return project_gaussian(g.position, g.scale, g.rotation, 0, cam);
}

PreparedView prepare_view(const GaussianScene& scene, const Camera& cam, int tile_size) {
    cam.validate();
    PreparedView view;
    view.width = cam.width;
    view.height = cam.height;
    view.tile_size = tile_size;
    view.tiles_x = (cam.width + tile_size - 1) / tile_size;
    view.tiles_y = (cam.height + tile_size - 1) / tile_size;

    const size_t n = scene.size();
    struct Projected {
        Splat2D splat;
        float opacity;
    };
    std::vector<std::vector<Projected>> chunk_hits;
    constexpr size_t kChunk = 4096;
    const int num_chunks = static_cast<int>((n + kChunk - 1) / kChunk);
    chunk_hits.resize(static_cast<size_t>(std::max(num_chunks, 1)));
    parallel_chunks(num_chunks, [&](int c) {
        size_t b = static_cast<size_t>(c) * kChunk;
        size_t e = std::min(n, b + kChunk);
        auto& out = chunk_hits[static_cast<size_t>(c)];
        for (size_t i = b; i < e; ++i) {
            auto s = project_gaussian(scene.positions[i], scene.scales[i], scene.rotations[i],
                                      static_cast<int>(i), cam);
            if (s) out.push_back({*s, scene.opacities[i]});
        }
    });

    std::vector<Projected> hits;
    for (auto& ch : chunk_hits) {
        hits.insert(hits.end(), ch.begin(), ch.end());
    }
    std::sort(hits.begin(), hits.end(), [](const Projected& a, const Projected& b) {
        if (a.splat.depth != b.splat.depth) return a.splat.depth < b.splat.depth;
        return a.splat.gaussian_index < b.splat.gaussian_index;
    });

    view.records.reserve(hits.size());
    std::vector<std::array<int, 4>> tile_ranges(hits.size());
    std::vector<uint32_t> tile_counts(static_cast<size_t>(view.tiles_x) * view.tiles_y, 0);
    for (size_t r = 0; r < hits.size(); ++r) {
        const Splat2D& s = hits[r].splat;
        const float det = s.cov2d(0, 0) * s.cov2d(1, 1) - s.cov2d(0, 1) * s.cov2d(0, 1);
        const float inv_det = 1.0f / det;
        PreparedView::Record rec;
        rec.mean_x = s.mean2d.x();
        rec.mean_y = s.mean2d.y();
        rec.conic_a = s.cov2d(1, 1) * inv_det;
        rec.conic_b = -s.cov2d(0, 1) * inv_det;
        rec.conic_c = s.cov2d(0, 0) * inv_det;
        rec.opacity = hits[r].opacity;
        rec.index = static_cast<uint32_t>(s.gaussian_index);
        view.records.push_back(rec);

        int tx0 = std::clamp(static_cast<int>((s.mean2d.x() - s.radius) / tile_size), 0,
                             view.tiles_x - 1);
        int tx1 = std::clamp(static_cast<int>((s.mean2d.x() + s.radius) / tile_size), 0,
                             view.tiles_x - 1);
        int ty0 = std::clamp(static_cast<int>((s.mean2d.y() - s.radius) / tile_size), 0,
                             view.tiles_y - 1);
        int ty1 = std::clamp(static_cast<int>((s.mean2d.y() + s.radius) / tile_size), 0,
                             view.tiles_y - 1);
        tile_ranges[r] = {tx0, tx1, ty0, ty1};
        for (int ty = ty0; ty <= ty1; ++ty) {
            for (int tx = tx0; tx <= tx1; ++tx) {
                tile_counts[static_cast<size_t>(ty) * view.tiles_x + tx]++;
            }
        }
    }

    view.tile_offsets.assign(tile_counts.size() + 1, 0);
    for (size_t t = 0; t < tile_counts.size(); ++t) {
        view.tile_offsets[t + 1] = view.tile_offsets[t] + tile_counts[t];
    }
    view.tile_entries.resize(view.tile_offsets.back());
    std::vector<uint32_t> cursor(view.tile_offsets.begin(), view.tile_offsets.end() - 1);
    // Records are visited in depth order, so per-tile lists stay sorted.
    for (size_t r = 0; r < view.records.size(); ++r) {
        auto [tx0, tx1, ty0, ty1] = tile_ranges[r];
        for (int ty = ty0; ty <= ty1; ++ty) {
            for (int tx = tx0; tx <= tx1; ++tx) {
                size_t t = static_cast<size_t>(ty) * view.tiles_x + tx;
                view.tile_entries[cursor[t]++] = static_cast<uint32_t>(r);
            }
        }
    }
    return view;
}

RenderOutput rasterize_prepared(const PreparedView& view, const GaussianScene& scene,
                                const RenderOptions& opts) {
    const int h = view.height;
    const int w = view.width;
    const int d = scene.d_code;
    const bool features = opts.render_features && d > 0;
    if (opts.render_features && d == 0) {
        throw std::invalid_argument("rasterize: feature output requested but scene d_code is 0");
    }
    if (scene.features.size() != scene.size() * static_cast<size_t>(d)) {
        throw std::invalid_argument("rasterize: feature array size does not match d_code");
    }

    RenderOutput out;
    out.color = Tensor({static_cast<uint64_t>(h), static_cast<uint64_t>(w), 3});
    out.alpha = Tensor({static_cast<uint64_t>(h), static_cast<uint64_t>(w)});
    if (features) {
        out.feature =
            Tensor({static_cast<uint64_t>(h), static_cast<uint64_t>(w), static_cast<uint64_t>(d)});
    }
    if (opts.capture_weights) {
        out.weights.resize(static_cast<size_t>(h) * w);
    }

    const int num_tiles = view.tiles_x * view.tiles_y;
    parallel_chunks(num_tiles, [&](int tile) {
        const int tx = tile % view.tiles_x;
        const int ty = tile / view.tiles_x;
        const int x0 = tx * view.tile_size;
        const int y0 = ty * view.tile_size;
        const int x1 = std::min(w, x0 + view.tile_size);
        const int y1 = std::min(h, y0 + view.tile_size);
        const uint32_t* entries = view.tile_entries.data() + view.tile_offsets[tile];
        const uint32_t count = view.tile_offsets[tile + 1] - view.tile_offsets[tile];

        for (int y = y0; y < y1; ++y) {
            const float py = static_cast<float>(y) + 0.5f;
            for (int x = x0; x < x1; ++x) {
                const float px = static_cast<float>(x) + 0.5f;
                float transmittance = 1.0f;
                float cr = 0.0f, cg = 0.0f, cb = 0.0f;
                float* feat = features ? out.feature.row(static_cast<size_t>(y),
                                                         static_cast<size_t>(x))
                                       : nullptr;
                std::vector<PixelWeight>* wlist =
                    opts.capture_weights ? &out.weights[static_cast<size_t>(y) * w + x] : nullptr;

                for (uint32_t e = 0; e < count; ++e) {
                    const PreparedView::Record& rec = view.records[entries[e]];
                    const float dx = px - rec.mean_x;
                    const float dy = py - rec.mean_y;
                    const float power = -0.5f * (rec.conic_a * dx * dx + rec.conic_c * dy * dy) -
                                        rec.conic_b * dx * dy;
                    if (power > 0.0f || power < kPowerCutoff) continue;
                    float a = std::min(kAlphaClamp, rec.opacity * std::exp(power));
                    if (a < kAlphaSkip) continue;
                    const float weight = a * transmittance;

                    const Eigen::Vector3f& col = scene.colors[rec.index];
                    cr += weight * col.x();
                    cg += weight * col.y();
                    cb += weight * col.z();
                    if (feat) {
                        const float* f = scene.feature_row(rec.index);
                        for (int k = 0; k < d; ++k) feat[k] += weight * f[k];
                    }
                    if (wlist) wlist->push_back({rec.index, weight});

                    transmittance *= 1.0f - a;
                    if (transmittance < kTransmittanceStop) break;
                }
                out.color.at(static_cast<size_t>(y), static_cast<size_t>(x), 0) = cr;
                out.color.at(static_cast<size_t>(y), static_cast<size_t>(x), 1) = cg;
                out.color.at(static_cast<size_t>(y), static_cast<size_t>(x), 2) = cb;
                out.alpha.at(static_cast<size_t>(y), static_cast<size_t>(x)) =
                    1.0f - transmittance;
            }
        }
    });
    return out;
}

RenderOutput rasterize(const GaussianScene& scene, const Camera& cam,
                       const RenderOptions& opts) {
    return rasterize_prepared(prepare_view(scene, cam, opts.tile_size), scene, opts);
}

IdMap render_ids_image(const Tensor& feature, const Tensor& alpha, const Codebook& codebook) {
    return assign_ids(feature, alpha, codebook);
}

} // namespace gsid
