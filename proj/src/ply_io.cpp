#include "gsid/ply_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace gsid {

namespace {

static_assert(std::endian::native == std::endian::little,
              "PLY I/O assumes a little-endian host");

struct Property {
    std::string name;
    std::string type;
    size_t size = 0;
    size_t offset = 0; // byte offset within a vertex record
};

size_t type_size(const std::string& t) {
    if (t == "float" || t == "float32" || t == "int" || t == "int32" ||
        t == "uint" || t == "uint32") return 4;
    if (t == "double" || t == "float64") return 8;
    if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    return 0;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, const std::string& line,
                             const std::string& why) {
    throw std::runtime_error("PLY parse error in " + path.string() + ": " + why +
                             " (line: \"" + line + "\")");
}

struct Header {
    size_t vertex_count = 0;
    std::vector<Property> props;
    size_t stride = 0;

    const Property* find(const std::string& name) const {
        for (const auto& p : props) {
            if (p.name == name) return &p;
        }
        return nullptr;
    }

    const Property& require(const std::filesystem::path& path, const std::string& name,
                            const std::string& type) const {
        const Property* p = find(name);
        if (!p) {
            throw std::runtime_error("PLY parse error in " + path.string() +
                                     ": missing property " + name);
        }
        if (p->type != type) {
            throw std::runtime_error("PLY parse error in " + path.string() + ": property " +
                                     name + " has type " + p->type + ", expected " + type);
        }
        return *p;
    }
};

Header read_header(std::ifstream& in, const std::filesystem::path& path) {
    Header h;
    std::string line;
    if (!std::getline(in, line) || line != "ply") parse_fail(path, line, "expected 'ply'");
    if (!std::getline(in, line) || line != "format binary_little_endian 1.0") {
        parse_fail(path, line, "expected 'format binary_little_endian 1.0'");
    }
    bool in_vertex = false;
    bool seen_vertex = false;
    while (std::getline(in, line)) {
        if (line == "end_header") {
            if (!seen_vertex) parse_fail(path, line, "no vertex element declared");
            return h;
        }
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok == "comment" || tok == "obj_info") continue;
        if (tok == "element") {
            std::string name;
            long long count = -1;
            ss >> name >> count;
            if (name.empty() || count < 0) parse_fail(path, line, "malformed element");
            in_vertex = (name == "vertex");
            if (in_vertex) {
                seen_vertex = true;
                h.vertex_count = static_cast<size_t>(count);
            } else if (count != 0) {
                parse_fail(path, line, "unsupported non-empty element '" + name + "'");
            }
            continue;
        }
        if (tok == "property") {
            if (!in_vertex) continue;
            Property p;
            ss >> p.type;
            if (p.type == "list") parse_fail(path, line, "list properties unsupported");
            ss >> p.name;
            p.size = type_size(p.type);
            if (p.size == 0 || p.name.empty()) parse_fail(path, line, "malformed property");
            p.offset = h.stride;
            h.stride += p.size;
            h.props.push_back(p);
            continue;
        }
        parse_fail(path, line, "unrecognized header keyword '" + tok + "'");
    }
    parse_fail(path, "<eof>", "missing end_header");
}

float read_f32(const char* rec, const Property& p) {
    float v;
    std::memcpy(&v, rec + p.offset, sizeof(float));
    return v;
}

int32_t read_i32(const char* rec, const Property& p) {
    int32_t v;
    std::memcpy(&v, rec + p.offset, sizeof(int32_t));
    return v;
}

} // namespace

GaussianScene load_scene_ply(const std::filesystem::path& path,
                             std::optional<int> expected_d_code) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open PLY file: " + path.string());
    Header h = read_header(in, path);

    const Property* px = &h.require(path, "x", "float");
    const Property* py = &h.require(path, "y", "float");
    const Property* pz = &h.require(path, "z", "float");
    const Property* ps[3] = {&h.require(path, "scale_0", "float"),
                             &h.require(path, "scale_1", "float"),
                             &h.require(path, "scale_2", "float")};
    const Property* pr[4] = {&h.require(path, "rot_0", "float"),
                             &h.require(path, "rot_1", "float"),
                             &h.require(path, "rot_2", "float"),
                             &h.require(path, "rot_3", "float")};
    const Property* po = &h.require(path, "opacity", "float");
    const Property* pc[3] = {&h.require(path, "f_dc_0", "float"),
                             &h.require(path, "f_dc_1", "float"),
                             &h.require(path, "f_dc_2", "float")};
    const Property* pgt = h.find("gt_id");
    if (pgt && pgt->type != "int") {
        throw std::runtime_error("PLY parse error in " + path.string() +
                                 ": property gt_id has type " + pgt->type + ", expected int");
    }

    // id_feat_0..D-1 must be contiguous from zero.
    int d_file = 0;
    while (h.find("id_feat_" + std::to_string(d_file))) ++d_file;
    for (const auto& p : h.props) {
        if (p.name.rfind("id_feat_", 0) == 0) {
            int k = std::stoi(p.name.substr(8));
            if (k >= d_file) {
                throw std::runtime_error("PLY parse error in " + path.string() +
                                         ": id_feat_* indices not contiguous (missing id_feat_" +
                                         std::to_string(d_file) + ")");
            }
            if (p.type != "float") {
                throw std::runtime_error("PLY parse error in " + path.string() + ": property " +
                                         p.name + " has type " + p.type + ", expected float");
            }
        }
    }
    std::vector<const Property*> pf(d_file);
    for (int k = 0; k < d_file; ++k) pf[k] = h.find("id_feat_" + std::to_string(k));

    int d_code = d_file;
    if (expected_d_code) {
        if (d_file != 0 && d_file != *expected_d_code) {
            throw std::runtime_error("feature dimension mismatch in " + path.string() +
                                     ": file has d_code=" + std::to_string(d_file) +
                                     ", expected " + std::to_string(*expected_d_code));
        }
        d_code = *expected_d_code;
    }

    GaussianScene scene;
    scene.d_code = d_code;
    scene.reserve(h.vertex_count);

    std::vector<char> rec(h.stride);
    for (size_t i = 0; i < h.vertex_count; ++i) {
        in.read(rec.data(), static_cast<std::streamsize>(h.stride));
        if (static_cast<size_t>(in.gcount()) != h.stride) {
            throw std::runtime_error("truncated PLY payload in " + path.string() + " at vertex " +
                                     std::to_string(i));
        }
        scene.positions.emplace_back(read_f32(rec.data(), *px), read_f32(rec.data(), *py),
                                     read_f32(rec.data(), *pz));
        scene.scales.emplace_back(read_f32(rec.data(), *ps[0]), read_f32(rec.data(), *ps[1]),
                                  read_f32(rec.data(), *ps[2]));
        scene.rotations.emplace_back(read_f32(rec.data(), *pr[0]), read_f32(rec.data(), *pr[1]),
                                     read_f32(rec.data(), *pr[2]), read_f32(rec.data(), *pr[3]));
        scene.opacities.push_back(read_f32(rec.data(), *po));
        scene.colors.emplace_back(read_f32(rec.data(), *pc[0]), read_f32(rec.data(), *pc[1]),
                                  read_f32(rec.data(), *pc[2]));
        scene.gt_object_ids.push_back(pgt ? read_i32(rec.data(), *pgt) : -1);
        size_t base = scene.features.size();
        scene.features.resize(base + static_cast<size_t>(d_code), 0.0f);
        for (int k = 0; k < d_file; ++k) {
            scene.features[base + static_cast<size_t>(k)] = read_f32(rec.data(), *pf[k]);
        }
    }
    return scene;
}

void save_scene_ply(const GaussianScene& scene, const std::filesystem::path& path) {
    bool with_gt = false;
    for (int32_t id : scene.gt_object_ids) {
        if (id != -1) { with_gt = true; break; }
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write PLY file: " + path.string());

    out << "ply\nformat binary_little_endian 1.0\n";
    out << "element vertex " << scene.size() << "\n";
    const char* base_props[] = {"x",      "y",      "z",      "scale_0", "scale_1",
                                "scale_2", "rot_0",  "rot_1",  "rot_2",   "rot_3",
                                "opacity", "f_dc_0", "f_dc_1", "f_dc_2"};
    for (const char* name : base_props) out << "property float " << name << "\n";
    if (with_gt) out << "property int gt_id\n";
    for (int k = 0; k < scene.d_code; ++k) out << "property float id_feat_" << k << "\n";
    out << "end_header\n";

    auto put_f32 = [&out](float v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    for (size_t i = 0; i < scene.size(); ++i) {
        for (int a = 0; a < 3; ++a) put_f32(scene.positions[i][a]);
        for (int a = 0; a < 3; ++a) put_f32(scene.scales[i][a]);
        for (int a = 0; a < 4; ++a) put_f32(scene.rotations[i][a]);
        put_f32(scene.opacities[i]);
        for (int a = 0; a < 3; ++a) put_f32(scene.colors[i][a]);
        if (with_gt) {
            int32_t id = scene.gt_object_ids[i];
            out.write(reinterpret_cast<const char*>(&id), 4);
        }
        const float* f = scene.feature_row(i);
        out.write(reinterpret_cast<const char*>(f),
                  static_cast<std::streamsize>(scene.d_code * sizeof(float)));
    }
    if (!out) throw std::runtime_error("I/O failure writing " + path.string());
}

} // namespace gsid
