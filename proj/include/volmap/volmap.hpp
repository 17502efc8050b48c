#pragma once

#include "volmap/boundary_sphere.hpp"
#include "volmap/diagnostics.hpp"
#include "volmap/linear_solve.hpp"
#include "volmap/mesh.hpp"
#include "volmap/mesh_gen.hpp"
#include "volmap/mesh_io.hpp"
#include "volmap/report.hpp"
#include "volmap/stretch_laplacian.hpp"
#include "volmap/types.hpp"
#include "volmap/vomt.hpp"
#include "volmap/vsem.hpp"
