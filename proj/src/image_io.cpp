#include "gsid/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace gsid {

namespace {

uint8_t quantize(float v) {
    float c = std::clamp(v, 0.0f, 1.0f);
    return static_cast<uint8_t>(std::lround(c * 255.0f));
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void check_image_shape(const Tensor& img) {
    bool rgb = img.rank() == 3 && img.dim(2) == 3;
    bool gray = img.rank() == 2;
    if (!rgb && !gray) {
        throw std::invalid_argument("image tensor must be H x W x 3 or H x W");
    }
}

} // namespace

void write_png(const Tensor& img, const std::filesystem::path& path) {
    check_image_shape(img);
    const int h = static_cast<int>(img.dim(0));
    const int w = static_cast<int>(img.dim(1));
    const int channels = img.rank() == 3 ? 3 : 1;

    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot write PNG: " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("libpng failure writing " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<uint8_t> row(static_cast<size_t>(w) * channels);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (channels == 3) {
                for (int c = 0; c < 3; ++c) {
                    row[static_cast<size_t>(x) * 3 + c] = quantize(img.at(y, x, c));
                }
            } else {
                row[static_cast<size_t>(x)] = quantize(img.at(y, x));
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Tensor read_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw std::runtime_error("cannot open PNG: " + path.string());

    png_byte sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw std::runtime_error("not a PNG file: " + path.string());
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("libpng failure reading " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    png_set_expand(png);          // palette/gray<8 to full depth
    png_set_strip_16(png);        // 16-bit to 8-bit
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    if (png_get_channels(png, info) != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("unexpected channel count reading " + path.string());
    }

    std::vector<uint8_t> row(static_cast<size_t>(w) * 3);
    Tensor img({static_cast<uint64_t>(h), static_cast<uint64_t>(w), 3});
    for (int y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                img.at(y, x, c) = static_cast<float>(row[static_cast<size_t>(x) * 3 + c]) / 255.0f;
            }
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_ppm(const Tensor& img, const std::filesystem::path& path) {
    check_image_shape(img);
    const int h = static_cast<int>(img.dim(0));
    const int w = static_cast<int>(img.dim(1));
    const bool rgb = img.rank() == 3;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write PPM: " + path.string());
    out << (rgb ? "P6" : "P5") << "\n" << w << " " << h << "\n255\n";
    std::vector<uint8_t> row(static_cast<size_t>(w) * (rgb ? 3 : 1));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (rgb) {
                for (int c = 0; c < 3; ++c) {
                    row[static_cast<size_t>(x) * 3 + c] = quantize(img.at(y, x, c));
                }
            } else {
                row[static_cast<size_t>(x)] = quantize(img.at(y, x));
            }
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw std::runtime_error("I/O failure writing " + path.string());
}

std::array<float, 3> hsv_to_rgb(float h, float s, float v) {
    h = h - std::floor(h);
    float i = std::floor(h * 6.0f);
    float f = h * 6.0f - i;
    float p = v * (1.0f - s);
    float q = v * (1.0f - s * f);
    float t = v * (1.0f - s * (1.0f - f));
    switch (static_cast<int>(i) % 6) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, q};
    }
}

std::array<uint8_t, 3> id_color(int code, int background_label) {
    if (code == background_label || code < 0) return {32, 32, 32};
    float hue = static_cast<float>(code) * 0.61803f;
    hue = hue - std::floor(hue);
    auto rgb = hsv_to_rgb(hue, 0.75f, 0.95f);
    return {quantize(rgb[0]), quantize(rgb[1]), quantize(rgb[2])};
}

} // namespace gsid
