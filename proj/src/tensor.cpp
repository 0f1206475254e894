#include "gsid/tensor.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace gsid {

namespace {

constexpr char kMagic[4] = {'G', 'S', 'T', 'N'};
constexpr uint8_t kDtypeF32 = 0;

// All multi-byte fields are little-endian. The build targets LE hosts;
// memcpy round-trips are exact there.
static_assert(std::endian::native == std::endian::little,
              "GSTN I/O assumes a little-endian host");

} // namespace

Tensor load_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open tensor file: " + path.string());
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("bad GSTN magic in " + path.string());
    }
    uint8_t dtype = 0, rank = 0;
    in.read(reinterpret_cast<char*>(&dtype), 1);
    in.read(reinterpret_cast<char*>(&rank), 1);
    if (!in) throw std::runtime_error("truncated GSTN header in " + path.string());
    if (dtype != kDtypeF32) {
        throw std::runtime_error("unsupported GSTN dtype code " +
                                 std::to_string(dtype) + " in " + path.string());
    }
    Tensor t;
    t.dims.resize(rank);
    in.read(reinterpret_cast<char*>(t.dims.data()),
            static_cast<std::streamsize>(rank * sizeof(uint64_t)));
    if (!in) throw std::runtime_error("truncated GSTN dims in " + path.string());

    size_t n = t.element_count();
    t.data.resize(n);
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(n * sizeof(float)));
    if (static_cast<size_t>(in.gcount()) != n * sizeof(float)) {
        throw std::runtime_error("GSTN payload size mismatch in " + path.string() +
                                 ": expected " + std::to_string(n) + " f32 values");
    }
    // Trailing bytes mean the header lied about the shape.
    in.peek();
    if (!in.eof()) {
        throw std::runtime_error("GSTN payload size mismatch in " + path.string() +
                                 ": trailing bytes after payload");
    }
    return t;
}

void save_tensor(const Tensor& t, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write tensor file: " + path.string());
    }
    out.write(kMagic, 4);
    uint8_t dtype = kDtypeF32;
    uint8_t rank = static_cast<uint8_t>(t.dims.size());
    out.write(reinterpret_cast<const char*>(&dtype), 1);
    out.write(reinterpret_cast<const char*>(&rank), 1);
    out.write(reinterpret_cast<const char*>(t.dims.data()),
              static_cast<std::streamsize>(t.dims.size() * sizeof(uint64_t)));
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    if (!out) throw std::runtime_error("I/O failure writing " + path.string());
}

} // namespace gsid
