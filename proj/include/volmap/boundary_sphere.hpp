#pragma once

#include <string>
#include <vector>

#include "volmap/mesh.hpp"

namespace volmap
{

/// Boundary of a TetMesh in local indexing.
struct BoundarySurface {
    std::vector<int> vertices;  ///< global index of each local vertex (the set B)
    std::vector<Tri> faces;     ///< outward triangles in local indices
    VertexMap points;           ///< source positions, one row per local vertex
    Eigen::VectorXd measure;    ///< per-triangle source measure
};

/// Extract the boundary. Triangle measure is the area scaled by the density
/// mu/|tau| of the owning tet, so it is plain area for volume measures.
BoundarySurface make_boundary_surface(const TetMesh& mesh);

/// Signed spherical triangle areas of a local map on the unit sphere.
Eigen::VectorXd spherical_areas(const BoundarySurface& surface, const VertexMap& s);

/// Count of spherical triangles with non-positive signed area.
int spherical_fold_count(const BoundarySurface& surface, const VertexMap& s);

/// Population std of (measure_i / sum measure) / (area_i / sum area).
double area_ratio_std(const BoundarySurface& surface, const VertexMap& s);

/**
 * Harmonic initializer. The largest source triangle is punctured and pinned
 * to an equilateral triangle; the rest is solved with cotangent weights,
 * scaled so that half the vertex area falls in the unit disk, lifted by
 * inverse stereographic projection and re-centered by area-weighted
 * centroid shifts with renormalization.
 */
VertexMap initial_sphere_map(const BoundarySurface& surface);

struct RefineInfo {
    int iterations_run = 0;
    int best_iteration = 0;  ///< 0 means the initializer was kept
    double initial_std = 0;
    double best_std = 0;
    bool aborted = false;  ///< stopped because folds exceeded kMaxFoldFraction
    std::string note;
};

inline constexpr double kMaxFoldFraction = 1e-3;

/**
 * Stretch-reweighted refinement. Each step assembles cotangent weights
 * divided by the triangle area stretch, frees the hemisphere opposite the
 * current chart pole, solves in its stereographic chart, and projects back
 * to the sphere. Charts alternate between poles. Returns the fold-free
 * iterate with the smallest area_ratio_std (possibly `init`).
 */
VertexMap area_preserving_refine(const BoundarySurface& surface, const VertexMap& init, int iters,
                                 RefineInfo* info = nullptr);

/// Full n x 3 table holding the local boundary map on boundary rows and
/// zeros elsewhere.
VertexMap scatter_boundary(const TetMesh& mesh, const BoundarySurface& surface,
                           const VertexMap& local);

/// initial_sphere_map followed by area_preserving_refine, scattered.
VertexMap auto_boundary_map(const TetMesh& mesh, int iters, RefineInfo* info = nullptr);

}  // namespace volmap
