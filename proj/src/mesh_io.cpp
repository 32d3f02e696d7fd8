#include "splintcad/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace splintcad {

namespace {

using Triangle = TriangleMesh::Triangle;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw std::runtime_error(path + ": " + why);
}

std::string lower_ext(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext;
}

float read_f32(const char*& p) {
    float v;
    std::memcpy(&v, p, 4);
    p += 4;
    return v;
}

uint32_t read_u32(const char*& p) {
    uint32_t v;
    std::memcpy(&v, p, 4);
    p += 4;
    return v;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(path, "file not found or unreadable");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------- STL

void parse_stl_binary(const std::string& path, const std::string& data,
                      std::vector<Vec3>& verts, std::vector<Triangle>& tris) {
    if (data.size() < 84) fail(path, "malformed file: truncated STL header");
    const char* p = data.data() + 80;
    uint32_t n = read_u32(p);
    if (data.size() != 84 + size_t(n) * 50) fail(path, "malformed file: STL size mismatch");
    verts.reserve(size_t(n) * 3);
    tris.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        p += 12;  // facet normal, re-derived on load
        uint32_t base = static_cast<uint32_t>(verts.size());
        for (int k = 0; k < 3; ++k) {
            double x = read_f32(p), y = read_f32(p), z = read_f32(p);
            verts.emplace_back(x, y, z);
        }
        p += 2;  // attribute byte count
        tris.push_back({base, base + 1, base + 2});
    }
}

void parse_stl_ascii(const std::string& path, const std::string& data,
                     std::vector<Vec3>& verts, std::vector<Triangle>& tris) {
    std::istringstream in(data);
    std::string tok;
    std::vector<Vec3> facet;
    while (in >> tok) {
        if (tok == "vertex") {
            double x, y, z;
            if (!(in >> x >> y >> z)) fail(path, "malformed file: bad vertex record");
            facet.emplace_back(x, y, z);
        } else if (tok == "endfacet") {
            if (facet.size() != 3) fail(path, "malformed file: facet without 3 vertices");
            uint32_t base = static_cast<uint32_t>(verts.size());
            verts.insert(verts.end(), facet.begin(), facet.end());
            tris.push_back({base, base + 1, base + 2});
            facet.clear();
        }
    }
    if (!facet.empty()) fail(path, "malformed file: unterminated facet");
}

bool stl_is_binary(const std::string& data) {
    if (data.size() >= 84) {
        const char* p = data.data() + 80;
        uint32_t n = read_u32(p);
        if (data.size() == 84 + size_t(n) * 50) return true;
    }
    std::string head = data.substr(0, std::min<size_t>(data.size(), 6));
    std::transform(head.begin(), head.end(), head.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return head.rfind("solid", 0) != 0;
}

void write_stl_binary(const TriangleMesh& mesh, std::ostream& out) {
    char header[80] = {0};
    std::snprintf(header, sizeof(header), "splintcad binary STL");
    out.write(header, 80);
    uint32_t n = static_cast<uint32_t>(mesh.triangle_count());
    out.write(reinterpret_cast<const char*>(&n), 4);
    for (size_t i = 0; i < mesh.triangle_count(); ++i) {
        Vec3 fn = mesh.face_normal(i);
        float buf[12];
        for (int k = 0; k < 3; ++k) buf[k] = static_cast<float>(fn[k]);
        for (int k = 0; k < 3; ++k) {
            Vec3 v = mesh.triangle_vertex(i, k);
            buf[3 + k * 3 + 0] = static_cast<float>(v.x());
            buf[3 + k * 3 + 1] = static_cast<float>(v.y());
            buf[3 + k * 3 + 2] = static_cast<float>(v.z());
        }
        out.write(reinterpret_cast<const char*>(buf), 48);
        uint16_t attr = 0;
        out.write(reinterpret_cast<const char*>(&attr), 2);
    }
}

void write_stl_ascii(const TriangleMesh& mesh, std::ostream& out) {
    out << "solid splintcad\n";
    out.precision(9);
    for (size_t i = 0; i < mesh.triangle_count(); ++i) {
        Vec3 fn = mesh.face_normal(i);
        out << "  facet normal " << fn.x() << ' ' << fn.y() << ' ' << fn.z() << "\n"
            << "    outer loop\n";
        for (int k = 0; k < 3; ++k) {
            Vec3 v = mesh.triangle_vertex(i, k);
            out << "      vertex " << v.x() << ' ' << v.y() << ' ' << v.z() << "\n";
        }
        out << "    endloop\n  endfacet\n";
    }
    out << "endsolid splintcad\n";
}

// ---------------------------------------------------------------- PLY

struct PlyProperty {
    std::string type;
    std::string name;
    bool is_list = false;
    std::string count_type;
};

size_t scalar_size(const std::string& type) {
    if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
    if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") return 2;
    if (type == "int" || type == "uint" || type == "int32" || type == "uint32" || type == "float" ||
        type == "float32")
        return 4;
    if (type == "double" || type == "float64") return 8;
    return 0;
}

double read_scalar(const char*& p, const std::string& type) {
    auto get = [&]<typename T>() {
        T v;
        std::memcpy(&v, p, sizeof(T));
        p += sizeof(T);
        return static_cast<double>(v);
    };
    if (type == "char" || type == "int8") return get.operator()<int8_t>();
    if (type == "uchar" || type == "uint8") return get.operator()<uint8_t>();
    if (type == "short" || type == "int16") return get.operator()<int16_t>();
    if (type == "ushort" || type == "uint16") return get.operator()<uint16_t>();
    if (type == "int" || type == "int32") return get.operator()<int32_t>();
    if (type == "uint" || type == "uint32") return get.operator()<uint32_t>();
    if (type == "float" || type == "float32") return get.operator()<float>();
    if (type == "double" || type == "float64") return get.operator()<double>();
    return 0.0;
}

void parse_ply(const std::string& path, const std::string& data,
               std::vector<Vec3>& verts, std::vector<Triangle>& tris) {
    std::istringstream in(data);
    std::string line;
    if (!std::getline(in, line) || line.rfind("ply", 0) != 0) fail(path, "malformed file: not a PLY");

    bool binary = false;
    struct Element {
        std::string name;
        size_t count = 0;
        std::vector<PlyProperty> props;
    };
    std::vector<Element> elements;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "format") {
            std::string f;
            ls >> f;
            if (f == "binary_little_endian") binary = true;
            else if (f == "ascii") binary = false;
            else fail(path, "unsupported PLY format: " + f);
        } else if (kw == "element") {
            Element e;
            ls >> e.name >> e.count;
            elements.push_back(e);
        } else if (kw == "property") {
            if (elements.empty()) fail(path, "malformed file: property before element");
            PlyProperty p;
            ls >> p.type;
            if (p.type == "list") {
                p.is_list = true;
                ls >> p.count_type >> p.type >> p.name;
            } else {
                ls >> p.name;
            }
            elements.back().props.push_back(p);
        } else if (kw == "end_header") {
            break;
        }
    }

    size_t body_off = static_cast<size_t>(in.tellg());
    const char* bp = data.data() + body_off;
    const char* bend = data.data() + data.size();

    auto next_ascii = [&](double& v) {
        if (!(in >> v)) fail(path, "malformed file: truncated PLY body");
    };

    for (const auto& e : elements) {
        if (e.name == "vertex") {
            int ix = -1, iy = -1, iz = -1;
            for (size_t k = 0; k < e.props.size(); ++k) {
                if (e.props[k].name == "x") ix = static_cast<int>(k);
                if (e.props[k].name == "y") iy = static_cast<int>(k);
                if (e.props[k].name == "z") iz = static_cast<int>(k);
            }
            if (ix < 0 || iy < 0 || iz < 0) fail(path, "malformed file: PLY vertex lacks x/y/z");
            verts.reserve(e.count);
            for (size_t i = 0; i < e.count; ++i) {
                Vec3 v = Vec3::Zero();
                for (size_t k = 0; k < e.props.size(); ++k) {
                    double val;
                    if (binary) {
                        if (bp + scalar_size(e.props[k].type) > bend)
                            fail(path, "malformed file: truncated PLY body");
                        val = read_scalar(bp, e.props[k].type);
                    } else {
                        next_ascii(val);
                    }
                    if (static_cast<int>(k) == ix) v.x() = val;
                    if (static_cast<int>(k) == iy) v.y() = val;
                    if (static_cast<int>(k) == iz) v.z() = val;
                }
                verts.push_back(v);
            }
        } else if (e.name == "face") {
            tris.reserve(e.count);
            for (size_t i = 0; i < e.count; ++i) {
                for (const auto& prop : e.props) {
                    if (!prop.is_list) {
                        if (binary) {
                            read_scalar(bp, prop.type);
                        } else {
                            double ignored;
                            next_ascii(ignored);
                        }
                        continue;
                    }
                    size_t cnt;
                    if (binary) {
                        if (bp + scalar_size(prop.count_type) > bend)
                            fail(path, "malformed file: truncated PLY body");
                        cnt = static_cast<size_t>(read_scalar(bp, prop.count_type));
                    } else {
                        double d;
                        next_ascii(d);
                        cnt = static_cast<size_t>(d);
                    }
                    std::vector<uint32_t> poly(cnt);
                    for (size_t k = 0; k < cnt; ++k) {
                        double idx;
                        if (binary) {
                            if (bp + scalar_size(prop.type) > bend)
                                fail(path, "malformed file: truncated PLY body");
                            idx = read_scalar(bp, prop.type);
                        } else {
                            next_ascii(idx);
                        }
                        poly[k] = static_cast<uint32_t>(idx);
                    }
                    for (size_t k = 2; k < cnt; ++k) {  // fan triangulation
                        tris.push_back({poly[0], poly[k - 1], poly[k]});
                    }
                }
            }
        } else {
            // Skip unknown elements (ascii: consume tokens; binary: sized skip).
            for (size_t i = 0; i < e.count; ++i) {
                for (const auto& prop : e.props) {
                    if (prop.is_list) {
                        size_t cnt;
                        if (binary) {
                            cnt = static_cast<size_t>(read_scalar(bp, prop.count_type));
                            bp += cnt * scalar_size(prop.type);
                        } else {
                            double d;
                            next_ascii(d);
                            cnt = static_cast<size_t>(d);
                            for (size_t k = 0; k < cnt; ++k) next_ascii(d);
                        }
                    } else if (binary) {
                        bp += scalar_size(prop.type);
                    } else {
                        double ignored;
                        next_ascii(ignored);
                    }
                }
            }
        }
    }
}

void write_ply(const TriangleMesh& mesh, std::ostream& out, bool binary,
               const std::vector<double>* scalar, const std::string& scalar_name) {
    out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n";
    out << "element vertex " << mesh.vertex_count() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    if (scalar) out << "property float " << scalar_name << "\n";
    out << "element face " << mesh.triangle_count() << "\n";
    out << "property list uchar int vertex_indices\nend_header\n";
    if (binary) {
        for (size_t i = 0; i < mesh.vertex_count(); ++i) {
            float v[4] = {static_cast<float>(mesh.vertices()[i].x()),
                          static_cast<float>(mesh.vertices()[i].y()),
                          static_cast<float>(mesh.vertices()[i].z()),
                          scalar ? static_cast<float>((*scalar)[i]) : 0.f};
            out.write(reinterpret_cast<const char*>(v), scalar ? 16 : 12);
        }
        for (const auto& t : mesh.triangles()) {
            uint8_t n = 3;
            int32_t idx[3] = {static_cast<int32_t>(t[0]), static_cast<int32_t>(t[1]),
                              static_cast<int32_t>(t[2])};
            out.write(reinterpret_cast<const char*>(&n), 1);
            out.write(reinterpret_cast<const char*>(idx), 12);
        }
    } else {
        out.precision(9);
        for (size_t i = 0; i < mesh.vertex_count(); ++i) {
            const Vec3& v = mesh.vertices()[i];
            out << v.x() << ' ' << v.y() << ' ' << v.z();
            if (scalar) out << ' ' << (*scalar)[i];
            out << '\n';
        }
        for (const auto& t : mesh.triangles()) {
            out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
        }
    }
}

// ---------------------------------------------------------------- OBJ

void parse_obj(const std::string& path, const std::string& data,
               std::vector<Vec3>& verts, std::vector<Triangle>& tris) {
    std::istringstream in(data);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("v ", 0) == 0) {
            std::istringstream ls(line.substr(2));
            double x, y, z;
            if (!(ls >> x >> y >> z)) fail(path, "malformed file: bad v record");
            verts.emplace_back(x, y, z);
        } else if (line.rfind("f ", 0) == 0) {
            std::istringstream ls(line.substr(2));
            std::vector<uint32_t> poly;
            std::string vert;
            while (ls >> vert) {
                // "i", "i/t", "i//n", "i/t/n"; negative = relative.
                long idx = std::strtol(vert.c_str(), nullptr, 10);
                if (idx == 0) fail(path, "malformed file: bad f record");
                if (idx < 0) idx = static_cast<long>(verts.size()) + idx + 1;
                poly.push_back(static_cast<uint32_t>(idx - 1));
            }
            if (poly.size() < 3) fail(path, "malformed file: face with <3 vertices");
            for (size_t k = 2; k < poly.size(); ++k) {
                tris.push_back({poly[0], poly[k - 1], poly[k]});
            }
        }
    }
}

void write_obj(const TriangleMesh& mesh, std::ostream& out) {
    out.precision(9);
    for (const auto& v : mesh.vertices()) {
        out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    }
    for (const auto& t : mesh.triangles()) {
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
}

MeshFormat detect_format(const std::string& path, const std::string& data) {
    std::string ext = lower_ext(path);
    if (ext == "stl") return stl_is_binary(data) ? MeshFormat::StlBinary : MeshFormat::StlAscii;
    if (ext == "ply") return MeshFormat::PlyBinary;  // parser reads both
    if (ext == "obj") return MeshFormat::Obj;
    // No known extension: sniff content.
    if (data.rfind("ply", 0) == 0) return MeshFormat::PlyBinary;
    if (data.rfind("solid", 0) == 0 && !stl_is_binary(data)) return MeshFormat::StlAscii;
    return MeshFormat::StlBinary;
}

}  // namespace

TriangleMesh load_mesh(const std::string& path, MeshFormat format, LoadStats* stats) {
    std::string data = slurp(path);
    if (format == MeshFormat::Auto) format = detect_format(path, data);

    std::vector<Vec3> verts;
    std::vector<Triangle> tris;
    switch (format) {
        case MeshFormat::StlBinary:
        case MeshFormat::StlAscii:
            if (stl_is_binary(data)) parse_stl_binary(path, data, verts, tris);
            else parse_stl_ascii(path, data, verts, tris);
            break;
        case MeshFormat::PlyBinary:
        case MeshFormat::PlyAscii:
            parse_ply(path, data, verts, tris);
            break;
        case MeshFormat::Obj:
            parse_obj(path, data, verts, tris);
            break;
        default:
            fail(path, "unknown format");
    }
    if (tris.empty()) fail(path, "empty mesh");
    for (const auto& t : tris) {
        for (uint32_t i : t) {
            if (i >= verts.size()) fail(path, "malformed file: index out of range");
        }
    }

    TriangleMesh mesh(std::move(verts), std::move(tris));
    if (stats) {
        stats->raw_vertices = mesh.vertex_count();
        stats->raw_triangles = mesh.triangle_count();
    }
    size_t dropped = mesh.cleanup();
    if (stats) {
        stats->merged_vertices = stats->raw_vertices - mesh.vertex_count();
        stats->dropped_triangles = dropped;
    }
    if (mesh.empty()) fail(path, "empty mesh after cleanup");
    return mesh;
}

void save_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format) {
    if (mesh.empty()) throw std::runtime_error(path + ": refusing to save empty mesh");
    if (format == MeshFormat::Auto) {
        std::string ext = lower_ext(path);
        if (ext == "ply") format = MeshFormat::PlyBinary;
        else if (ext == "obj") format = MeshFormat::Obj;
        else format = MeshFormat::StlBinary;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    switch (format) {
        case MeshFormat::StlBinary: write_stl_binary(mesh, out); break;
        case MeshFormat::StlAscii: write_stl_ascii(mesh, out); break;
        case MeshFormat::PlyBinary: write_ply(mesh, out, true, nullptr, ""); break;
        case MeshFormat::PlyAscii: write_ply(mesh, out, false, nullptr, ""); break;
        case MeshFormat::Obj: write_obj(mesh, out); break;
        default: fail(path, "unknown format");
    }
    if (!out) fail(path, "write failed");
}

void save_ply_with_scalar(const TriangleMesh& mesh, const std::vector<double>& scalar,
                          const std::string& property_name, const std::string& path) {
    if (mesh.empty()) throw std::runtime_error(path + ": refusing to save empty mesh");
    if (scalar.size() != mesh.vertex_count()) {
        throw std::runtime_error(path + ": scalar count does not match vertex count");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    write_ply(mesh, out, false, &scalar, property_name);
    if (!out) fail(path, "write failed");
}

}  // namespace splintcad
