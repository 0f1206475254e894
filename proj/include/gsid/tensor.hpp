#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsid {

/// Dense row-major f32 array with up to a handful of dimensions.
/// Backs images (H x W x 3), feature maps (H x W x D), mask stacks
/// (K x H x W) and the GSTN on-disk container.
struct Tensor {
    std::vector<uint64_t> dims;
    std::vector<float> data;

    Tensor() = default;
    explicit Tensor(std::vector<uint64_t> d) : dims(std::move(d)) {
        data.assign(element_count(), 0.0f);
    }
    Tensor(std::initializer_list<uint64_t> d)
        : Tensor(std::vector<uint64_t>(d)) {}

    static Tensor zeros(std::initializer_list<uint64_t> d) { return Tensor(d); }

    size_t rank() const { return dims.size(); }

    size_t element_count() const {
        size_t n = 1;
        for (uint64_t d : dims) n *= static_cast<size_t>(d);
        return dims.empty() ? 0 : n;
    }

    bool empty() const { return data.empty(); }

    uint64_t dim(size_t i) const { return dims.at(i); }

    float& at(size_t i) { return data[i]; }
    float at(size_t i) const { return data[i]; }

    float& at(size_t i, size_t j) { return data[i * dims[1] + j]; }
    float at(size_t i, size_t j) const { return data[i * dims[1] + j]; }

    float& at(size_t i, size_t j, size_t k) {
        return data[(i * dims[1] + j) * dims[2] + k];
    }
    float at(size_t i, size_t j, size_t k) const {
        return data[(i * dims[1] + j) * dims[2] + k];
    }

    float* row(size_t i, size_t j) { return data.data() + (i * dims[1] + j) * dims[2]; }
    const float* row(size_t i, size_t j) const {
        return data.data() + (i * dims[1] + j) * dims[2];
    }

    bool same_shape(const Tensor& o) const { return dims == o.dims; }
};

/// Reads a GSTN container: magic "GSTN", dtype u8 (0 = f32), rank u8,
/// dims as u64 little-endian, then the row-major f32 payload.
/// Throws std::runtime_error on bad magic, unknown dtype, or a payload
/// whose size disagrees with the header.
Tensor load_tensor(const std::filesystem::path& path);

/// Writes the GSTN container for `t`. Throws std::runtime_error on I/O
/// failure.
void save_tensor(const Tensor& t, const std::filesystem::path& path);

} // namespace gsid
