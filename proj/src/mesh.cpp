#include "volmap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace volmap
{

double signed_volume(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4)
{
    return (p2 - p1).cross(p3 - p1).dot(p4 - p1) / 6.0;
}

namespace
{

// Outward faces of a positively oriented tet (a, b, c, d).
constexpr std::array<std::array<int, 3>, 4> kOutwardFaces{{
    {1, 2, 3},
    {0, 3, 2},
    {0, 1, 3},
    {0, 2, 1},
}};

struct DisjointSets {
    explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
    std::vector<int> parent;
};

}  // namespace

TetMesh TetMesh::build(
    VertexMap vertices,
    std::vector<Tet> tets,
    const std::optional<std::vector<double>>& density)
{
    const int n = static_cast<int>(vertices.rows());
    const int q = static_cast<int>(tets.size());
    if (n == 0 || q == 0) {
        throw MeshError("mesh has no vertices or no tetrahedra");
    }
    if (!vertices.allFinite()) {
        throw MeshError("mesh has non-finite vertex coordinates");
    }

    TetMesh mesh;
    mesh.volumes_.resize(q);
    std::vector<char> used(n, 0);
    for (int t = 0; t < q; ++t) {
        auto& tet = tets[t];
        for (int v : tet) {
            if (v < 0 || v >= n) {
                std::ostringstream msg;
                msg << "tet " << t << " references vertex " << v << " outside [0, " << n << ")";
                throw MeshError(msg.str());
            }
            used[v] = 1;
        }
        std::array<int, 4> sorted = tet;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw MeshError("tet " + std::to_string(t) + " repeats a vertex");
        }
        double vol = signed_volume(
            vertices.row(tet[0]), vertices.row(tet[1]), vertices.row(tet[2]),
            vertices.row(tet[3]));
        if (vol < 0) {
            std::swap(tet[0], tet[1]);
            vol = -vol;
            ++mesh.flipped_;
        }
        mesh.volumes_[t] = vol;
    }
    for (int v = 0; v < n; ++v) {
        if (!used[v]) {
            throw MeshError("vertex " + std::to_string(v) + " belongs to no tetrahedron");
        }
    }

    const double mean_volume = mesh.volumes_.mean();
    for (int t = 0; t < q; ++t) {
        if (!(mesh.volumes_[t] > kDegenerateRelVolume * mean_volume)) {
            std::ostringstream msg;
            msg << "degenerate tet " << t << " (volume " << mesh.volumes_[t]
                << ", mean " << mean_volume << ")";
            throw MeshError(msg.str());
        }
    }

    // Faces owned by exactly one tet form the boundary.
    struct FaceUse {
        int count;
        Tri face;
        int tet;
    };
    std::map<std::array<int, 3>, FaceUse> faces;
    for (int t = 0; t < q; ++t) {
        const auto& tet = tets[t];
        for (const auto& lf : kOutwardFaces) {
            Tri face{tet[lf[0]], tet[lf[1]], tet[lf[2]]};
            std::array<int, 3> key = face;
            std::sort(key.begin(), key.end());
            auto [it, inserted] = faces.try_emplace(key, FaceUse{1, face, t});
            if (!inserted) {
                if (++it->second.count > 2) {
                    throw MeshError("nonmanifold mesh: a face is shared by more than two tets");
                }
            }
        }
    }
    for (const auto& [key, entry] : faces) {
        if (entry.count == 1) {
            mesh.boundary_faces_.push_back(entry.face);
            mesh.boundary_face_tets_.push_back(entry.tet);
        }
    }
    if (mesh.boundary_faces_.empty()) {
        throw MeshError("mesh has no boundary");
    }

    // Boundary must be a closed 2-manifold: every boundary edge in two faces.
    std::map<std::array<int, 2>, int> edge_count;
    std::set<int> bverts;
    for (const auto& f : mesh.boundary_faces_) {
        for (int e = 0; e < 3; ++e) {
            std::array<int, 2> key{f[e], f[(e + 1) % 3]};
            if (key[0] > key[1]) std::swap(key[0], key[1]);
            ++edge_count[key];
            bverts.insert(f[e]);
        }
    }
    for (const auto& [key, count] : edge_count) {
        if (count != 2) {
            std::ostringstream msg;
            msg << "nonmanifold boundary: edge (" << key[0] << ", " << key[1] << ") lies on "
                << count << " boundary faces";
            throw MeshError(msg.str());
        }
    }

    DisjointSets sets(n);
    for (const auto& f : mesh.boundary_faces_) {
        sets.unite(f[0], f[1]);
        sets.unite(f[1], f[2]);
    }
    std::set<int> roots;
    for (int v : bverts) roots.insert(sets.find(v));
    if (roots.size() != 1) {
        throw MeshError(
            "boundary has " + std::to_string(roots.size()) +
            " components; exactly one is required");
    }

    const long euler = static_cast<long>(bverts.size()) - static_cast<long>(edge_count.size()) +
                       static_cast<long>(mesh.boundary_faces_.size());
    if (euler != 2) {
        throw MeshError(
            "boundary Euler characteristic is " + std::to_string(euler) +
            " (genus-zero surface required)");
    }

    mesh.boundary_slot_.assign(n, -1);
    mesh.interior_slot_.assign(n, -1);
    for (int v = 0; v < n; ++v) {
        if (bverts.count(v)) {
            mesh.boundary_slot_[v] = static_cast<int>(mesh.boundary_.size());
            mesh.boundary_.push_back(v);
        } else {
            mesh.interior_slot_[v] = static_cast<int>(mesh.interior_.size());
            mesh.interior_.push_back(v);
        }
    }

    if (density) {
        if (static_cast<int>(density->size()) != q) {
            throw MeshError(
                "density has " + std::to_string(density->size()) + " entries for " +
                std::to_string(q) + " tets");
        }
        mesh.measure_.resize(q);
        for (int t = 0; t < q; ++t) {
            const double rho = (*density)[t];
            if (!(rho > 0) || !std::isfinite(rho)) {
                throw MeshError("density of tet " + std::to_string(t) + " is not positive");
            }
            mesh.measure_[t] = rho * mesh.volumes_[t];
        }
    } else {
        mesh.measure_ = mesh.volumes_;
    }

    mesh.vertices_ = std::move(vertices);
    mesh.tets_ = std::move(tets);
    mesh.index_incidence();
    return mesh;
}

void TetMesh::index_incidence()
{
    const int n = num_vertices();
    vtet_offsets_.assign(n + 1, 0);
    for (const auto& tet : tets_) {
        for (int v : tet) ++vtet_offsets_[v + 1];
    }
    std::partial_sum(vtet_offsets_.begin(), vtet_offsets_.end(), vtet_offsets_.begin());
    vtet_.resize(vtet_offsets_.back());
    std::vector<int> cursor(vtet_offsets_.begin(), vtet_offsets_.end() - 1);
    for (int t = 0; t < num_tets(); ++t) {
        for (int v : tets_[t]) vtet_[cursor[v]++] = t;
    }
}

TetMesh TetMesh::with_measure(Eigen::VectorXd measure) const
{
    if (measure.size() != num_tets()) {
        throw MeshError("measure size does not match tet count");
    }
    for (int t = 0; t < num_tets(); ++t) {
        if (!(measure[t] > 0) || !std::isfinite(measure[t])) {
            throw MeshError("measure of tet " + std::to_string(t) + " is not positive");
        }
    }
    TetMesh copy = *this;
    copy.measure_ = std::move(measure);
    return copy;
}

std::span<const int> TetMesh::tets_of_vertex(int v) const
{
    return {vtet_.data() + vtet_offsets_[v],
            static_cast<std::size_t>(vtet_offsets_[v + 1] - vtet_offsets_[v])};
}

std::vector<int> TetMesh::tets_of_edge(int i, int j) const
{
    std::vector<int> out;
    if (i == j) return out;
    for (int t : tets_of_vertex(i)) {
        const auto& tet = tets_[t];
        if (std::find(tet.begin(), tet.end(), j) != tet.end()) out.push_back(t);
    }
    return out;
}

std::vector<std::array<int, 2>> TetMesh::edges() const
{
    std::vector<std::array<int, 2>> out;
    out.reserve(tets_.size() * 6);
    for (const auto& tet : tets_) {
        for (int a = 0; a < 4; ++a) {
            for (int b = a + 1; b < 4; ++b) {
                out.push_back({std::min(tet[a], tet[b]), std::max(tet[a], tet[b])});
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::array<Vec3, 4> TetMesh::tet_images(const VertexMap& f, int t) const
{
    const auto& tet = tets_[t];
    return {f.row(tet[0]).transpose(), f.row(tet[1]).transpose(), f.row(tet[2]).transpose(),
            f.row(tet[3]).transpose()};
}

TetMesh normalize_total_measure(const TetMesh& mesh)
{
    const double scale = kBallVolume / mesh.total_measure();
    if (scale == 1.0) return mesh;
    return mesh.with_measure(mesh.measure() * scale);
}

Eigen::VectorXd image_volumes(const TetMesh& mesh, const VertexMap& f)
{
    Eigen::VectorXd vol(mesh.num_tets());
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const auto p = mesh.tet_images(f, t);
        vol[t] = signed_volume(p[0], p[1], p[2], p[3]);
    }
    return vol;
}

int folding_count(const TetMesh& mesh, const VertexMap& f)
{
    const Eigen::VectorXd vol = image_volumes(mesh, f);
    return static_cast<int>((vol.array() <= 0.0).count());
}

}  // namespace volmap
