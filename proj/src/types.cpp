#include "gsid/types.hpp"

#include "gsid/tensor.hpp"

#include <cmath>
#include <string>

namespace gsid {

namespace {

bool finite3(const Eigen::Vector3f& v) {
    return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

} // namespace

void GaussianScene::validate() const {
    size_t n = size();
    if (n == 0) throw std::invalid_argument("scene must contain at least one Gaussian");
    if (d_code < 0) throw std::invalid_argument("d_code must be non-negative");
    if (scales.size() != n || rotations.size() != n || opacities.size() != n ||
        colors.size() != n || gt_object_ids.size() != n ||
        features.size() != n * static_cast<size_t>(d_code)) {
        throw std::invalid_argument("scene arrays disagree in length");
    }
    for (size_t i = 0; i < n; ++i) {
        if (!finite3(positions[i])) {
            throw std::invalid_argument("non-finite position at index " + std::to_string(i));
        }
        if (!(scales[i].array() > 0.0f).all()) {
            throw std::invalid_argument("non-positive scale at index " + std::to_string(i));
        }
        float qn = rotations[i].norm();
        if (std::abs(qn - 1.0f) > 1e-6f) {
            throw std::invalid_argument("quaternion not unit length at index " +
                                        std::to_string(i));
        }
        if (!(opacities[i] >= 0.0f && opacities[i] <= 1.0f)) {
            throw std::invalid_argument("opacity out of [0,1] at index " + std::to_string(i));
        }
    }
}

void Camera::validate() const {
    if (width < 1 || height < 1) throw std::invalid_argument("camera image size must be >= 1");
    if (!(near > 0.0f && near < far)) {
        throw std::invalid_argument("camera requires 0 < near < far");
    }
    Eigen::Matrix3f r = rotation();
    Eigen::Matrix3f err = r * r.transpose() - Eigen::Matrix3f::Identity();
    if (err.cwiseAbs().maxCoeff() > 1e-5f) {
        throw std::invalid_argument("camera rotation block is not orthonormal");
    }
}

Camera Camera::look_at(const Eigen::Vector3f& eye, const Eigen::Vector3f& target,
                       int width, int height, float focal_px, float near, float far) {
    Eigen::Vector3f forward = (target - eye).normalized(); // view +z
    Eigen::Vector3f world_up(0.f, 0.f, 1.f);
    Eigen::Vector3f right = forward.cross(world_up).normalized();
    if (!finite3(right) || right.norm() < 0.5f) {
        // Looking straight up/down; pick an arbitrary horizontal right.
        right = Eigen::Vector3f(1.f, 0.f, 0.f);
    }
    Eigen::Vector3f down = forward.cross(right).normalized(); // view +y
    Camera cam;
    cam.width = width;
    cam.height = height;
    cam.fx = cam.fy = focal_px;
    cam.cx = 0.5f * static_cast<float>(width);
    cam.cy = 0.5f * static_cast<float>(height);
    cam.near = near;
    cam.far = far;
    Eigen::Matrix3f r;
    r.row(0) = right;
    r.row(1) = down;
    r.row(2) = forward;
    cam.world_to_camera.setIdentity();
    cam.world_to_camera.topLeftCorner<3, 3>() = r;
    cam.world_to_camera.topRightCorner<3, 1>() = -r * eye;
    return cam;
}

void Codebook::validate() const {
    if (codes.rows() < 1 || codes.cols() < 1) {
        throw std::invalid_argument("codebook must have at least one code");
    }
    if (background_code.size() != codes.cols()) {
        throw std::invalid_argument("background code dimension mismatch");
    }
    if (!codes.allFinite() || !background_code.allFinite()) {
        throw std::invalid_argument("codebook contains non-finite entries");
    }
}

Eigen::Matrix3f quaternion_to_rotation(const Eigen::Vector4f& q) {
    // Input order (w,x,y,z); Eigen's constructor takes the same order.
    Eigen::Quaternionf quat(q[0], q[1], q[2], q[3]);
    return quat.normalized().toRotationMatrix();
}

Eigen::Matrix3f gaussian_covariance(const Eigen::Vector3f& scale,
                                    const Eigen::Vector4f& rotation) {
    Eigen::Matrix3f r = quaternion_to_rotation(rotation);
    Eigen::Matrix3f m = r * scale.asDiagonal();
    return m * m.transpose();
}

Codebook load_codebook(const std::filesystem::path& path) {
    Tensor t = load_tensor(path);
    if (t.rank() != 2) {
        throw std::runtime_error("codebook tensor must have rank 2, got rank " +
                                 std::to_string(t.rank()));
    }
    Codebook cb(static_cast<int>(t.dim(0)), static_cast<int>(t.dim(1)));
    std::copy(t.data.begin(), t.data.end(), cb.codes.data());
    return cb;
}

void save_codebook(const Codebook& cb, const std::filesystem::path& path) {
    Tensor t({static_cast<uint64_t>(cb.num_codes()), static_cast<uint64_t>(cb.dim())});
    std::copy(cb.codes.data(), cb.codes.data() + cb.codes.size(), t.data.begin());
    save_tensor(t, path);
}

} // namespace gsid
