#include "volmap/mesh_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

namespace volmap::io
{

namespace fs = std::filesystem;

namespace
{

std::ifstream open_in(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MeshError("cannot write " + path.string());
    return out;
}

[[noreturn]] void parse_fail(const fs::path& path, const std::string& what)
{
    throw MeshError(path.string() + ": " + what);
}

std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_point(std::ostream& out, const VertexMap& v, int r)
{
    out << fmt17(v(r, 0)) << ' ' << fmt17(v(r, 1)) << ' ' << fmt17(v(r, 2));
}

// Skip blank lines and '#' comments (TetGen convention).
bool next_data_line(std::istream& in, std::string& line)
{
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

}  // namespace

RawMesh read_msh(const fs::path& path)
{
    auto in = open_in(path);
    std::string line;
    std::unordered_map<long, int> node_index;
    std::vector<Vec3> points;
    RawMesh raw;
    bool saw_format = false;
    std::vector<std::array<long, 4>> tets_by_id;

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line == "$MeshFormat") {
            std::getline(in, line);
            std::istringstream ss(line);
            double version = 0;
            int file_type = -1;
            ss >> version >> file_type;
            if (version < 2.0 || version >= 3.0) {
                parse_fail(path, "unsupported MSH version " + line);
            }
            if (file_type != 0) parse_fail(path, "binary MSH is not supported");
            saw_format = true;
        } else if (line == "$Nodes") {
            long count = 0;
            if (!(in >> count) || count < 0) parse_fail(path, "bad node count");
            points.reserve(count);
            for (long i = 0; i < count; ++i) {
                long id;
                double x, y, z;
                if (!(in >> id >> x >> y >> z)) parse_fail(path, "truncated $Nodes section");
                node_index[id] = static_cast<int>(points.size());
                points.emplace_back(x, y, z);
            }
        } else if (line == "$Elements") {
            long count = 0;
            if (!(in >> count) || count < 0) parse_fail(path, "bad element count");
            std::getline(in, line);
            for (long e = 0; e < count; ++e) {
                if (!std::getline(in, line)) parse_fail(path, "truncated $Elements section");
                std::istringstream ss(line);
                long id, type, ntags;
                if (!(ss >> id >> type >> ntags)) parse_fail(path, "bad element line: " + line);
                for (long t = 0; t < ntags; ++t) {
                    long tag;
                    ss >> tag;
                }
                if (type != 4) continue;
                std::array<long, 4> nodes{};
                for (auto& v : nodes) {
                    if (!(ss >> v)) parse_fail(path, "bad tetrahedron line: " + line);
                }
                tets_by_id.push_back(nodes);
            }
        }
    }
    if (!saw_format) parse_fail(path, "missing $MeshFormat section");

    raw.vertices.resize(static_cast<Eigen::Index>(points.size()), 3);
    for (std::size_t i = 0; i < points.size(); ++i) raw.vertices.row(i) = points[i].transpose();
    raw.tets.reserve(tets_by_id.size());
    for (const auto& nodes : tets_by_id) {
        Tet tet;
        for (int a = 0; a < 4; ++a) {
            const auto it = node_index.find(nodes[a]);
            if (it == node_index.end()) {
                parse_fail(path, "element references unknown node " + std::to_string(nodes[a]));
            }
            tet[a] = it->second;
        }
        raw.tets.push_back(tet);
    }
    return raw;
}

void write_msh(const fs::path& path, const VertexMap& vertices, const std::vector<Tet>& tets)
{
    auto out = open_out(path);
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
    out << "$Nodes\n" << vertices.rows() << '\n';
    for (Eigen::Index r = 0; r < vertices.rows(); ++r) {
        out << r + 1 << ' ';
        write_point(out, vertices, static_cast<int>(r));
        out << '\n';
    }
    out << "$EndNodes\n$Elements\n" << tets.size() << '\n';
    for (std::size_t t = 0; t < tets.size(); ++t) {
        const auto& tet = tets[t];
        out << t + 1 << " 4 2 0 1 " << tet[0] + 1 << ' ' << tet[1] + 1 << ' ' << tet[2] + 1 << ' '
            << tet[3] + 1 << '\n';
    }
    out << "$EndElements\n";
    if (!out) throw MeshError("write failed for " + path.string());
}

RawMesh read_tetgen(const fs::path& path)
{
    fs::path stem = path;
    if (stem.extension() == ".node" || stem.extension() == ".ele") stem.replace_extension();
    const fs::path node_path = fs::path(stem).concat(".node");
    const fs::path ele_path = fs::path(stem).concat(".ele");

    RawMesh raw;
    std::string line;
    int base = 0;
    {
        auto in = open_in(node_path);
        if (!next_data_line(in, line)) parse_fail(node_path, "empty file");
        std::istringstream head(line);
        long count = 0, dim = 0, nattr = 0, nmark = 0;
        head >> count >> dim >> nattr >> nmark;
        if (dim != 3) parse_fail(node_path, "expected dimension 3");
        raw.vertices.resize(count, 3);
        for (long i = 0; i < count; ++i) {
            if (!next_data_line(in, line)) parse_fail(node_path, "truncated node list");
            std::istringstream ss(line);
            long id;
            double x, y, z;
            if (!(ss >> id >> x >> y >> z)) parse_fail(node_path, "bad node line: " + line);
            if (i == 0) base = static_cast<int>(id);
            if (id - base != i) parse_fail(node_path, "node ids are not consecutive");
            raw.vertices.row(i) << x, y, z;
        }
    }
    if (base != 0 && base != 1) parse_fail(node_path, "node numbering must start at 0 or 1");
    {
        auto in = open_in(ele_path);
        if (!next_data_line(in, line)) parse_fail(ele_path, "empty file");
        std::istringstream head(line);
        long count = 0, per = 0;
        head >> count >> per;
        if (per != 4) parse_fail(ele_path, "only 4-node tetrahedra are supported");
        raw.tets.reserve(count);
        for (long e = 0; e < count; ++e) {
            if (!next_data_line(in, line)) parse_fail(ele_path, "truncated element list");
            std::istringstream ss(line);
            long id;
            Tet tet;
            if (!(ss >> id >> tet[0] >> tet[1] >> tet[2] >> tet[3])) {
                parse_fail(ele_path, "bad element line: " + line);
            }
            for (auto& v : tet) v -= base;
            raw.tets.push_back(tet);
        }
    }
    return raw;
}

RawMesh read_vtk(const fs::path& path)
{
    auto in = open_in(path);
    std::string token;
    RawMesh raw;
    std::vector<std::vector<int>> cells;
    std::vector<int> types;
    bool grid = false;
    while (in >> token) {
        if (token == "DATASET") {
            in >> token;
            if (token != "UNSTRUCTURED_GRID") parse_fail(path, "only UNSTRUCTURED_GRID is supported");
            grid = true;
        } else if (token == "BINARY") {
            parse_fail(path, "binary VTK is not supported");
        } else if (token == "POINTS") {
            long count;
            in >> count >> token;
            raw.vertices.resize(count, 3);
            for (long i = 0; i < count; ++i) {
                if (!(in >> raw.vertices(i, 0) >> raw.vertices(i, 1) >> raw.vertices(i, 2))) {
                    parse_fail(path, "truncated POINTS");
                }
            }
        } else if (token == "CELLS") {
            long count, total;
            in >> count >> total;
            cells.resize(count);
            for (long c = 0; c < count; ++c) {
                int k;
                if (!(in >> k)) parse_fail(path, "truncated CELLS");
                cells[c].resize(k);
                for (int a = 0; a < k; ++a) in >> cells[c][a];
            }
        } else if (token == "CELL_TYPES") {
            long count;
            in >> count;
            types.resize(count);
            for (long c = 0; c < count; ++c) in >> types[c];
        }
    }
    if (!grid) parse_fail(path, "missing DATASET UNSTRUCTURED_GRID");
    if (types.size() != cells.size()) parse_fail(path, "CELLS and CELL_TYPES disagree");
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (types[c] != 10) continue;
        if (cells[c].size() != 4) parse_fail(path, "tetra cell without 4 points");
        raw.tets.push_back({cells[c][0], cells[c][1], cells[c][2], cells[c][3]});
    }
    return raw;
}

void write_vtk(const fs::path& path, const VertexMap& vertices, const std::vector<Tet>& tets)
{
    auto out = open_out(path);
    out << "# vtk DataFile Version 3.0\nvolmap\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << vertices.rows() << " double\n";
    for (Eigen::Index r = 0; r < vertices.rows(); ++r) {
        write_point(out, vertices, static_cast<int>(r));
        out << '\n';
    }
    out << "CELLS " << tets.size() << ' ' << 5 * tets.size() << '\n';
    for (const auto& tet : tets) {
        out << "4 " << tet[0] << ' ' << tet[1] << ' ' << tet[2] << ' ' << tet[3] << '\n';
    }
    out << "CELL_TYPES " << tets.size() << '\n';
    for (std::size_t t = 0; t < tets.size(); ++t) out << "10\n";
    if (!out) throw MeshError("write failed for " + path.string());
}

RawMesh read_mesh(const fs::path& path)
{
    const auto ext = path.extension();
    if (ext == ".msh") return read_msh(path);
    if (ext == ".vtk") return read_vtk(path);
    if (ext == ".node" || ext == ".ele" || ext.empty()) return read_tetgen(path);
    throw MeshError("unknown mesh format: " + path.string());
}

void write_mesh(const fs::path& path, const VertexMap& vertices, const std::vector<Tet>& tets)
{
    const auto ext = path.extension();
    if (ext == ".msh") return write_msh(path, vertices, tets);
    if (ext == ".vtk") return write_vtk(path, vertices, tets);
    throw MeshError("output must end in .msh or .vtk: " + path.string());
}

std::vector<double> read_density(const fs::path& path)
{
    auto in = open_in(path);
    std::vector<double> out;
    std::string line;
    while (next_data_line(in, line)) {
        std::istringstream ss(line);
        double rho;
        if (!(ss >> rho)) parse_fail(path, "bad density line: " + line);
        out.push_back(rho);
    }
    return out;
}

TetMesh load_mesh(const fs::path& path, const std::optional<fs::path>& density)
{
    RawMesh raw = read_mesh(path);
    std::optional<std::vector<double>> rho;
    if (density) rho = read_density(*density);
    return TetMesh::build(std::move(raw.vertices), std::move(raw.tets), rho);
}

VertexMap read_boundary_map(const fs::path& path, const TetMesh& mesh, double norm_tol)
{
    auto in = open_in(path);
    VertexMap f = VertexMap::Zero(mesh.num_vertices(), 3);
    std::vector<char> seen(mesh.num_vertices(), 0);
    std::string line;
    while (next_data_line(in, line)) {
        std::istringstream ss(line);
        long idx;
        double x, y, z;
        if (!(ss >> idx >> x >> y >> z)) parse_fail(path, "bad boundary line: " + line);
        const long v = idx - 1;
        if (v < 0 || v >= mesh.num_vertices() || !mesh.is_boundary(static_cast<int>(v))) {
            parse_fail(path, "vertex " + std::to_string(idx) + " is not a boundary vertex");
        }
        if (seen[v]) parse_fail(path, "vertex " + std::to_string(idx) + " listed twice");
        const Vec3 p(x, y, z);
        if (std::abs(p.norm() - 1.0) > norm_tol) {
            parse_fail(path, "vertex " + std::to_string(idx) + " is not on the unit sphere");
        }
        seen[v] = 1;
        f.row(v) = p.normalized().transpose();
    }
    for (int b : mesh.boundary_indices()) {
        if (!seen[b]) parse_fail(path, "boundary vertex " + std::to_string(b + 1) + " missing");
    }
    return f;
}

void write_boundary_map(const fs::path& path, const TetMesh& mesh, const VertexMap& f)
{
    auto out = open_out(path);
    for (int b : mesh.boundary_indices()) {
        out << b + 1 << ' ';
        write_point(out, f, b);
        out << '\n';
    }
    if (!out) throw MeshError("write failed for " + path.string());
}

}  // namespace volmap::io
