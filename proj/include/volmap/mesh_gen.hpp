#pragma once

#include <cstdint>

#include "volmap/mesh_io.hpp"

namespace volmap::gen
{

/// Reference tet (0,0,0), (1,0,0), (0,1,0), (0,0,1).
io::RawMesh single_tet();

/// Solid octahedron: the six unit axis points around a center vertex, 8 tets.
io::RawMesh octahedron();

/**
 * @brief Unit ball from a warped cube grid.
 *
 * [-1,1]^3 is cut into (2*refine)^3 cubes of 6 tets each (48 * refine^3
 * tets in total). The split is mirrored per octant so that every cube's
 * long diagonal points away from the center; this keeps boundary tets
 * from having all four corners on the sphere. Vertices are then moved
 * by p -> p * |p|_inf / |p|_2, which sends the cube surface onto the
 * unit sphere.
 *
 * A nonzero `jitter` displaces interior vertices by up to jitter * h
 * per axis (h the grid spacing), drawn from `seed`.
 */
io::RawMesh ball(int refine, std::uint64_t seed = 0, double jitter = 0.0);

/// Random convex body: a jittered ball stretched by a random ellipsoid
/// (semi-axes in [0.6, 1.4]) and rotated, all drawn from `seed`.
io::RawMesh random_convex(int refine, std::uint64_t seed);

}  // namespace volmap::gen
