// Mesh file I/O. OBJ is ASCII, triangles only on output; polygons are
// fan-triangulated on load. STL is the 80+4 byte binary layout with vertices
// welded by exact coordinate match. Units are meters throughout.
#pragma once

#include "graspgen/trimesh.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace graspgen {

inline TriMesh load_obj_stream(std::istream& in, const std::string& name = "<stream>") {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z))
                throw std::runtime_error(name + ":" + std::to_string(line_no) + ": bad vertex");
            if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
                throw std::runtime_error(name + ":" + std::to_string(line_no) +
                                         ": non-finite vertex coordinate");
            vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string item;
            while (ls >> item) {
                // accept v, v/vt, v//vn, v/vt/vn
                const std::size_t slash = item.find('/');
                const std::string head = slash == std::string::npos ? item : item.substr(0, slash);
                int idx = 0;
                try {
                    idx = std::stoi(head);
                } catch (...) {
                    throw std::runtime_error(name + ":" + std::to_string(line_no) +
                                             ": bad face index '" + item + "'");
                }
                if (idx < 0) idx = int(vertices.size()) + idx;  // negative = relative
                else idx -= 1;                                   // OBJ is 1-based
                poly.push_back(idx);
            }
            if (poly.size() < 3)
                throw std::runtime_error(name + ":" + std::to_string(line_no) +
                                         ": face with fewer than 3 vertices");
            for (std::size_t i = 1; i + 1 < poly.size(); ++i)
                faces.push_back({poly[0], poly[i], poly[i + 1]});
        }
        // everything else (vn, vt, o, g, s, usemtl, mtllib, #) is ignored
    }
    if (vertices.empty() || faces.empty())
        throw std::runtime_error(name + ": no geometry found");
    return TriMesh::build(std::move(vertices), std::move(faces));
}

inline TriMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mesh file: " + path);
    return load_obj_stream(in, path);
}

inline void save_obj_stream(const TriMesh& mesh, std::ostream& out) {
    out << "# graspgen mesh: " << mesh.vertex_count() << " vertices, " << mesh.face_count()
        << " faces\n";
    char buf[128];
    for (const auto& v : mesh.vertices()) {
        std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const auto& f : mesh.faces())
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

inline void save_obj(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write mesh file: " + path);
    save_obj_stream(mesh, out);
}

inline TriMesh load_stl_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open mesh file: " + path);
    char header[80];
    in.read(header, 80);
    std::uint32_t n = 0;
    in.read(reinterpret_cast<char*>(&n), 4);
    if (!in) throw std::runtime_error(path + ": truncated STL header");
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::map<std::array<float, 3>, int> weld;
    auto add_vertex = [&](const float* p) {
        for (int i = 0; i < 3; ++i)
            if (!std::isfinite(p[i]))
                throw std::runtime_error(path + ": non-finite vertex coordinate");
        const std::array<float, 3> key = {p[0], p[1], p[2]};
        auto it = weld.find(key);
        if (it != weld.end()) return it->second;
        vertices.emplace_back(p[0], p[1], p[2]);
        const int id = int(vertices.size()) - 1;
        weld.emplace(key, id);
        return id;
    };
    for (std::uint32_t t = 0; t < n; ++t) {
        float data[12];
        std::uint16_t attr;
        in.read(reinterpret_cast<char*>(data), sizeof(data));
        in.read(reinterpret_cast<char*>(&attr), 2);
        if (!in) throw std::runtime_error(path + ": truncated STL triangle data");
        faces.push_back({add_vertex(data + 3), add_vertex(data + 6), add_vertex(data + 9)});
    }
    if (faces.empty()) throw std::runtime_error(path + ": empty STL");
    return TriMesh::build(std::move(vertices), std::move(faces));
}

inline void save_stl_binary(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write mesh file: " + path);
    char header[80] = {};
    std::strncpy(header, "graspgen binary STL", sizeof(header) - 1);
    out.write(header, 80);
    const std::uint32_t n = std::uint32_t(mesh.face_count());
    out.write(reinterpret_cast<const char*>(&n), 4);
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const auto t = mesh.triangle(f);
        const Vec3 normal = mesh.face_normal(f);
        float data[12] = {float(normal.x()), float(normal.y()), float(normal.z()),
                          float(t[0].x()),   float(t[0].y()),   float(t[0].z()),
                          float(t[1].x()),   float(t[1].y()),   float(t[1].z()),
                          float(t[2].x()),   float(t[2].y()),   float(t[2].z())};
        const std::uint16_t attr = 0;
        out.write(reinterpret_cast<const char*>(data), sizeof(data));
        out.write(reinterpret_cast<const char*>(&attr), 2);
    }
}

/// Dispatch on extension (.obj / .stl).
inline TriMesh load_mesh(const std::string& path) {
    const auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    for (auto& c : ext) c = char(std::tolower(c));
    if (ext == "obj") return load_obj(path);
    if (ext == "stl") return load_stl_binary(path);
    throw std::runtime_error("unsupported mesh format: " + path);
}

}  // namespace graspgen
