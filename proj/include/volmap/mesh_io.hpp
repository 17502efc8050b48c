#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "volmap/mesh.hpp"

namespace volmap::io
{

/// Raw vertex/tet tables as read from disk, before validation.
struct RawMesh {
    VertexMap vertices;
    std::vector<Tet> tets;
};

/// Gmsh MSH 2.2 ASCII. Only element type 4 (4-node tetrahedron) is kept.
RawMesh read_msh(const std::filesystem::path& path);
void write_msh(const std::filesystem::path& path, const VertexMap& vertices,
               const std::vector<Tet>& tets);

/// TetGen pair. `path` may name either file or the common stem.
RawMesh read_tetgen(const std::filesystem::path& path);

/// Legacy VTK ASCII, UNSTRUCTURED_GRID with cell type 10.
RawMesh read_vtk(const std::filesystem::path& path);
void write_vtk(const std::filesystem::path& path, const VertexMap& vertices,
               const std::vector<Tet>& tets);

/// Dispatch on extension: .msh, .vtk, .node/.ele.
RawMesh read_mesh(const std::filesystem::path& path);
/// Dispatch on extension: .msh or .vtk.
void write_mesh(const std::filesystem::path& path, const VertexMap& vertices,
                const std::vector<Tet>& tets);

/// Read and validate, optionally applying a per-tet density file.
TetMesh load_mesh(const std::filesystem::path& path,
                  const std::optional<std::filesystem::path>& density = std::nullopt);

/// One positive real per tet, in element order.
std::vector<double> read_density(const std::filesystem::path& path);

/// Boundary map lines "vertex_index x y z"; indices are 1-based in the file.
/// Returns a full n x 3 table (rows of interior vertices are zero) after
/// checking that exactly the boundary vertices are listed with unit norm.
VertexMap read_boundary_map(const std::filesystem::path& path, const TetMesh& mesh,
                            double norm_tol = 1e-8);
void write_boundary_map(const std::filesystem::path& path, const TetMesh& mesh,
                        const VertexMap& f);

}  // namespace volmap::io
