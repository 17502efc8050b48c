"""Volume-preserving maps of tetrahedral meshes onto the unit ball."""

import json

from ._volmap import (
    MeshError,
    SolverError,
    TetMesh,
    auto_boundary_map,
    energy,
    energy_gradient,
    energy_per_tet,
    folding_count,
    gen_ball,
    gen_convex,
    gen_octahedron,
    gen_single_tet,
    laplacian,
    load_mesh,
    normalize,
    stretch_factors,
    transport_cost,
    vertex_measure,
    write_mesh,
)
from . import _volmap

__all__ = [
    "MeshError",
    "SolverError",
    "TetMesh",
    "auto_boundary_map",
    "check",
    "energy",
    "energy_gradient",
    "energy_per_tet",
    "folding_count",
    "gen_ball",
    "gen_convex",
    "gen_octahedron",
    "gen_single_tet",
    "laplacian",
    "load_mesh",
    "normalize",
    "omt",
    "param",
    "stretch_factors",
    "transport_cost",
    "vertex_measure",
    "write_mesh",
]


def param(mesh, boundary=None, *, max_iters=5, tol=1e-8, solver="direct",
          fixed_horizon=False, boundary_iters=20):
    """Volume-stretch minimization. Returns (map, report dict).

    The mesh must already be normalized. When no boundary map is given the
    automatic sphere map is used.
    """
    if boundary is None:
        boundary = auto_boundary_map(mesh, boundary_iters)
    f, report = _volmap._vsem(mesh, boundary, max_iters, tol, solver, fixed_horizon)
    return f, json.loads(report)


def omt(mesh, boundary=None, *, max_iters=2, inner_max_iters=5, accel="fista",
        solver="direct", boundary_iters=20):
    """Projected-gradient transport map. Returns (map, report dict)."""
    if boundary is None:
        boundary = auto_boundary_map(mesh, boundary_iters)
    f, report = _volmap._vomt(mesh, boundary, max_iters, inner_max_iters, accel, solver)
    return f, json.loads(report)


def check(mesh, f, seed=0):
    """Property checks on a map. Returns the check report dict."""
    return json.loads(_volmap._check(mesh, f, seed))
