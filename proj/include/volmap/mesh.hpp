#pragma once

#include <optional>
#include <span>
#include <vector>

#include "volmap/types.hpp"

namespace volmap
{

/// Signed volume of the tetrahedron (p1, p2, p3, p4):
/// ((p2 - p1) x (p3 - p1)) . (p4 - p1) / 6. Degenerate input gives 0.
double signed_volume(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4);

/**
 * @brief Simply connected tetrahedral mesh with a single genus-zero boundary.
 *
 * Immutable once built. Construction reorients tets to positive volume,
 * extracts the boundary (faces owned by exactly one tet, stored with
 * outward orientation) and checks that the boundary is one closed
 * two-manifold with Euler characteristic 2.
 *
 * Every tet carries a positive measure mu. By default mu is the tet volume;
 * a per-tet density turns it into mass, mu = density * volume.
 */
class TetMesh
{
public:
    /// Relative threshold below which a tet volume counts as degenerate.
    static constexpr double kDegenerateRelVolume = 1e-12;

    static TetMesh build(
        VertexMap vertices,
        std::vector<Tet> tets,
        const std::optional<std::vector<double>>& density = std::nullopt);

    /// Same mesh with a replaced measure. Throws if any entry is <= 0.
    [[nodiscard]] TetMesh with_measure(Eigen::VectorXd measure) const;

    [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices_.rows()); }
    [[nodiscard]] int num_tets() const { return static_cast<int>(tets_.size()); }

    [[nodiscard]] const VertexMap& vertices() const { return vertices_; }
    [[nodiscard]] const std::vector<Tet>& tets() const { return tets_; }
    [[nodiscard]] const Eigen::VectorXd& measure() const { return measure_; }
    [[nodiscard]] const Eigen::VectorXd& volumes() const { return volumes_; }
    [[nodiscard]] double total_measure() const { return measure_.sum(); }

    /// Outward-oriented boundary triangles.
    [[nodiscard]] const std::vector<Tri>& boundary_faces() const { return boundary_faces_; }
    /// Tet owning each boundary face.
    [[nodiscard]] const std::vector<int>& boundary_face_tets() const { return boundary_face_tets_; }
    /// Sorted boundary vertex indices (the set B).
    [[nodiscard]] const std::vector<int>& boundary_indices() const { return boundary_; }
    /// Sorted interior vertex indices (the set I).
    [[nodiscard]] const std::vector<int>& interior_indices() const { return interior_; }
    [[nodiscard]] bool is_boundary(int v) const { return boundary_slot_[v] >= 0; }
    /// Position of a boundary vertex inside boundary_indices(), or -1.
    [[nodiscard]] int boundary_slot(int v) const { return boundary_slot_[v]; }
    /// Position of an interior vertex inside interior_indices(), or -1.
    [[nodiscard]] int interior_slot(int v) const { return interior_slot_[v]; }

    [[nodiscard]] std::span<const int> tets_of_vertex(int v) const;
    /// Tets containing the edge {i, j}; empty when {i, j} is not a mesh edge.
    [[nodiscard]] std::vector<int> tets_of_edge(int i, int j) const;
    /// All mesh edges as (i < j) pairs, sorted.
    [[nodiscard]] std::vector<std::array<int, 2>> edges() const;

    /// Number of tets whose stored orientation was flipped during build.
    [[nodiscard]] int flipped_tets() const { return flipped_; }

    /// Images of the four vertices of tet t under map f.
    [[nodiscard]] std::array<Vec3, 4> tet_images(const VertexMap& f, int t) const;

private:
    TetMesh() = default;
    void index_incidence();

    VertexMap vertices_;
    std::vector<Tet> tets_;
    Eigen::VectorXd volumes_;
    Eigen::VectorXd measure_;
    std::vector<Tri> boundary_faces_;
    std::vector<int> boundary_face_tets_;
    std::vector<int> boundary_;
    std::vector<int> interior_;
    std::vector<int> boundary_slot_;
    std::vector<int> interior_slot_;
    std::vector<int> vtet_offsets_;
    std::vector<int> vtet_;
    int flipped_ = 0;
};

/// Rescale measures so that their sum is the unit ball volume 4*pi/3.
TetMesh normalize_total_measure(const TetMesh& mesh);

/// Count of tets whose image signed volume under f is <= 0.
int folding_count(const TetMesh& mesh, const VertexMap& f);

/// Per-tet image signed volumes |f(tau)|.
Eigen::VectorXd image_volumes(const TetMesh& mesh, const VertexMap& f);

inline constexpr double kBallVolume = 4.0 * 3.14159265358979323846 / 3.0;

}  // namespace volmap
