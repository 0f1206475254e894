#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace gsid {

using MatrixXfRM =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr int kDefaultCodeDim = 122;
constexpr int kDefaultNumCodes = 11;
constexpr int kDefaultSlots = 7;

/// One 3D Gaussian. Record view of the scene's SoA storage; convenient for
/// construction and tests, not the hot path.
struct Gaussian {
    Eigen::Vector3f position = Eigen::Vector3f::Zero();
    Eigen::Vector3f scale = Eigen::Vector3f::Ones();  // world units, > 0
    Eigen::Vector4f rotation{1.f, 0.f, 0.f, 0.f};     // unit quaternion (w,x,y,z)
    float opacity = 1.0f;                             // [0, 1]
    Eigen::Vector3f color = Eigen::Vector3f::Zero();  // RGB, SH degree 0
    std::vector<float> identity_feature;              // d_code entries
    int32_t gt_object_id = -1;                        // -1 = unlabeled
};

/// Ordered set of Gaussians, struct-of-arrays. Scale and opacity are kept
/// in the linear domain (no log/logit encoding). d_code == 0 means the
/// scene carries no identity features.
struct GaussianScene {
    std::vector<Eigen::Vector3f> positions;
    std::vector<Eigen::Vector3f> scales;
    std::vector<Eigen::Vector4f> rotations; // (w,x,y,z)
    std::vector<float> opacities;
    std::vector<Eigen::Vector3f> colors;
    std::vector<float> features; // N x d_code, row-major
    std::vector<int32_t> gt_object_ids;
    int d_code = kDefaultCodeDim;

    size_t size() const { return positions.size(); }

    void reserve(size_t n) {
        positions.reserve(n);
        scales.reserve(n);
        rotations.reserve(n);
        opacities.reserve(n);
        colors.reserve(n);
        features.reserve(n * static_cast<size_t>(d_code));
        gt_object_ids.reserve(n);
    }

    void push_back(const Gaussian& g) {
        if (static_cast<int>(g.identity_feature.size()) != d_code) {
            throw std::invalid_argument("identity feature size does not match scene d_code");
        }
        positions.push_back(g.position);
        scales.push_back(g.scale);
        rotations.push_back(g.rotation);
        opacities.push_back(g.opacity);
        colors.push_back(g.color);
        features.insert(features.end(), g.identity_feature.begin(),
                        g.identity_feature.end());
        gt_object_ids.push_back(g.gt_object_id);
    }

    Gaussian at(size_t i) const {
        Gaussian g;
        g.position = positions[i];
        g.scale = scales[i];
        g.rotation = rotations[i];
        g.opacity = opacities[i];
        g.color = colors[i];
        g.identity_feature.assign(feature_row(i), feature_row(i) + d_code);
        g.gt_object_id = gt_object_ids[i];
        return g;
    }

    float* feature_row(size_t i) { return features.data() + i * static_cast<size_t>(d_code); }
    const float* feature_row(size_t i) const {
        return features.data() + i * static_cast<size_t>(d_code);
    }

    /// Throws std::invalid_argument on any violated invariant (unit
    /// quaternions, positive scales, opacity range, feature sizes).
    void validate() const;
};

/// Pinhole camera. View space is x-right, y-down, z-forward; a world point
/// p lands at pixel (fx * x/z + cx, fy * y/z + cy) after world_to_camera.
struct Camera {
    int width = 0, height = 0;
    float fx = 0, fy = 0, cx = 0, cy = 0;
    Eigen::Matrix4f world_to_camera = Eigen::Matrix4f::Identity();
    float near = 0.01f, far = 100.0f;

    Eigen::Vector3f to_view(const Eigen::Vector3f& p) const {
        return world_to_camera.topLeftCorner<3, 3>() * p +
               world_to_camera.topRightCorner<3, 1>();
    }

    Eigen::Matrix3f rotation() const { return world_to_camera.topLeftCorner<3, 3>(); }

    void validate() const;

    /// Camera at `eye` looking at `target`, world +z up mapping to image up.
    static Camera look_at(const Eigen::Vector3f& eye, const Eigen::Vector3f& target,
                          int width, int height, float focal_px,
                          float near = 0.01f, float far = 100.0f);
};

/// Global object codebook: C object codes plus a reserved background code
/// at index C. The background code is the zero vector unless configured
/// otherwise and is never returned by mask-to-code selection.
struct Codebook {
    MatrixXfRM codes;              // C x D
    Eigen::VectorXf background_code; // D, zeros by default

    Codebook() = default;
    Codebook(int num_codes, int dim)
        : codes(MatrixXfRM::Zero(num_codes, dim)),
          background_code(Eigen::VectorXf::Zero(dim)) {}

    int num_codes() const { return static_cast<int>(codes.rows()); }
    int dim() const { return static_cast<int>(codes.cols()); }
    int background_index() const { return num_codes(); }

    void validate() const;
};

/// Rotation matrix of a unit quaternion given as (w,x,y,z).
Eigen::Matrix3f quaternion_to_rotation(const Eigen::Vector4f& q);

/// 3D covariance R(q) diag(s)^2 R(q)^T.
Eigen::Matrix3f gaussian_covariance(const Eigen::Vector3f& scale,
                                    const Eigen::Vector4f& rotation);

/// Codebook I/O as a GSTN C x D tensor (the background row is implicit).
Codebook load_codebook(const std::filesystem::path& path);
void save_codebook(const Codebook& cb, const std::filesystem::path& path);

} // namespace gsid
