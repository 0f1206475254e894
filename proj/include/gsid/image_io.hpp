#pragma once

#include "gsid/tensor.hpp"

#include <array>
#include <filesystem>

namespace gsid {

/// Writes an H x W x 3 (RGB) or H x W (grayscale) tensor as an 8-bit PNG.
/// Values are clamped to [0,1] and quantized with round-to-nearest. Output
/// bytes are deterministic for identical inputs.
void write_png(const Tensor& img, const std::filesystem::path& path);

/// Reads an 8-bit PNG into an H x W x 3 float tensor in [0,1]. Gray and
/// paletted inputs are expanded to RGB; an alpha channel is dropped.
Tensor read_png(const std::filesystem::path& path);

/// Same quantization as write_png, to a binary PPM (P6) / PGM (P5).
void write_ppm(const Tensor& img, const std::filesystem::path& path);

/// Color assigned to code index `c` for ID visualizations:
/// hue = fract(c * 0.61803), saturation 0.75, value 0.95. The background
/// label maps to dark gray (32,32,32).
std::array<uint8_t, 3> id_color(int code, int background_label);

/// HSV (h,s,v in [0,1]) to RGB in [0,1].
std::array<float, 3> hsv_to_rgb(float h, float s, float v);

} // namespace gsid
