"""Dirichlet energies, graph Laplacians, and harmonic extension.

The level-m energy is the weighted half-sum of squared edge differences,
with the weight (5/3)**m chosen so that the minimal-energy extension of a
field to the next level keeps the energy constant.  That extension is the
1/5-2/5 rule: midpoint values of a cell are a fixed affine combination of
the corner values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as spla

from .graphs import FractalGraph, build_graph, canonical_itinerary

# Rows give the midpoint values (x, y, z) from corner values (a, b, c):
# x between a and b, y between b and c, z between c and a.
EXTENSION_MATRIX = np.array([
    [2.0, 2.0, 1.0],
    [1.0, 2.0, 2.0],
    [2.0, 1.0, 2.0],
]) / 5.0

DIRECT_SOLVE_LIMIT = 8  # levels above this use conjugate gradients


@dataclass
class EnergyReport:
    """Energy of a field with its per-cell breakdown."""

    level: int
    energy: float
    per_cell: dict = field(repr=False)

    def to_json_dict(self):
        return {
            "level": self.level,
            "energy": self.energy,
            "per_cell": {
                "".join(str(s) for s in w): v
                for w, v in sorted(self.per_cell.items())
            },
        }


@dataclass
class BoundaryData:
    """Prescribed values on the boundary vertex set V0."""

    values: dict


def as_boundary_data(g: FractalGraph, phi) -> BoundaryData:
    """Normalise boundary input (sequence or mapping) against ``g``."""
    if isinstance(phi, BoundaryData):
        values = dict(phi.values)
    elif isinstance(phi, dict):
        values = {int(k): float(v) for k, v in phi.items()}
    else:
        seq = [float(v) for v in phi]
        if len(seq) != len(g.boundary_ids):
            raise ValueError(
                f"expected {len(g.boundary_ids)} boundary values, got {len(seq)}")
        values = dict(zip(g.boundary_ids, seq))
    if set(values) != set(g.boundary_ids):
        raise ValueError(
            f"boundary keys {sorted(values)} != V0 {sorted(g.boundary_ids)}")
    return BoundaryData(values)


def _check_field(g, f):
    f = np.asarray(f, dtype=float)
    if f.shape != (g.n_vertices,):
        raise ValueError(
            f"field shape {f.shape} does not match graph with "
            f"{g.n_vertices} vertices at level {g.level}")
    return f


def dirichlet_energy(g: FractalGraph, f) -> EnergyReport:
    """Weighted half-sum of squared edge differences, broken down by cell.

    Each cell contributes its own edges, so the total automatically counts
    the level-1 ring edge with multiplicity 2.
    """
    f = _check_field(g, f)
    per_cell = {}
    c = g.conductance
    for word, corners in g.cells.items():
        vals = [f[i] for i in corners]
        if len(corners) == 3:
            a, b, cc = vals
            e = c * ((b - a) ** 2 + (cc - b) ** 2 + (a - cc) ** 2) / 2.0
        else:
            a, b = vals
            e = c * (b - a) ** 2 / 2.0
        per_cell[word] = e
    energy = math.fsum(per_cell.values())
    return EnergyReport(level=g.level, energy=energy, per_cell=per_cell)


def laplacian(g: FractalGraph, f) -> np.ndarray:
    """Graph Laplacian (5/3)**m * sum_j (f_j - f_i), at every vertex."""
    f = _check_field(g, f)
    i, j = g.edges[:, 0], g.edges[:, 1]
    d = (f[j] - f[i]) * g.edge_weights
    n = g.n_vertices
    return np.bincount(i, d, n) - np.bincount(j, d, n)


def harmonic_extend_once(a, b, c):
    """Midpoint values (x, y, z) of a cell from corner values (a, b, c)."""
    x = 0.4 * a + 0.4 * b + 0.2 * c
    y = 0.2 * a + 0.4 * b + 0.4 * c
    z = 0.4 * a + 0.2 * b + 0.4 * c
    return (x, y, z)


def _extension_table(g_m: FractalGraph, g_next: FractalGraph):
    """Per-cell (corner ids, midpoint ids) at level m+1 for each m-cell."""
    corners = np.empty((len(g_m.cell_words), 3), dtype=np.int64)
    mids = np.empty_like(corners)
    for k, word in enumerate(sorted(g_m.cells)):
        w = tuple(word)
        corners[k] = [g_next.id_of(canonical_itinerary(w, i)) for i in (1, 2, 3)]
        mids[k] = [
            g_next.id_of(canonical_itinerary(w + (1,), 2)),
            g_next.id_of(canonical_itinerary(w + (2,), 3)),
            g_next.id_of(canonical_itinerary(w + (3,), 1)),
        ]
    return corners, mids


def extend_harmonic_once(g_m: FractalGraph, f):
    """Extend a field one level by the 1/5-2/5 rule.

    Returns ``(g_next, f_next)``; existing vertices keep their values, new
    midpoints get the energy-minimising combination of their cell corners.
    """
    f = _check_field(g_m, f)
    if g_m.kind != "sg":
        raise ValueError("harmonic extension tables are gasket-specific")
    g_next = build_graph(g_m.kind, g_m.level + 1)
    corners, mids = _extension_table(g_m, g_next)
    out = np.empty(g_next.n_vertices)
    out[g_next.restriction_to(g_m.level)] = f
    vals = out[corners]
    out[mids[:, 0]] = 0.4 * vals[:, 0] + 0.4 * vals[:, 1] + 0.2 * vals[:, 2]
    out[mids[:, 1]] = 0.2 * vals[:, 0] + 0.4 * vals[:, 1] + 0.4 * vals[:, 2]
    out[mids[:, 2]] = 0.4 * vals[:, 0] + 0.2 * vals[:, 1] + 0.4 * vals[:, 2]
    return g_next, out


def laplacian_matrix(g: FractalGraph) -> sparse.csr_matrix:
    """Weighted Laplacian c*(D - A) as a sparse matrix (positive form)."""
    i, j = g.edges[:, 0], g.edges[:, 1]
    w = g.edge_weights
    n = g.n_vertices
    rows = np.concatenate([i, j, i, j])
    cols = np.concatenate([i, j, j, i])
    data = np.concatenate([w, w, -w, -w])
    return sparse.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()


def solve_dirichlet(g: FractalGraph, phi, method="extension") -> np.ndarray:
    """Solve the discrete Dirichlet problem: harmonic with f|V0 = phi.

    ``method="extension"`` builds the solution level by level with the
    1/5-2/5 rule; ``method="linear-solve"`` pins the boundary and solves
    the interior Laplace system (direct factorisation up to level 8, then
    conjugate gradients).  Both agree to 1e-10 in the sup norm.
    """
    bd = as_boundary_data(g, phi)
    if method == "extension":
        if g.kind == "ring":
            # single boundary vertex: the only harmonic fields are constants
            return np.full(g.n_vertices, bd.values[g.boundary_ids[0]])
        cur_g = build_graph(g.kind, 0)
        # boundary ids are identified across levels by itinerary, and the
        # corner order (v1, v2, v3) is the level-0 vertex order
        cur = np.array([bd.values[b] for b in g.boundary_ids])
        for _ in range(g.level):
            cur_g, cur = extend_harmonic_once(cur_g, cur)
        return cur
    if method != "linear-solve":
        raise ValueError(f"unknown method {method!r}")

    n = g.n_vertices
    L = laplacian_matrix(g)
    boundary = np.array(sorted(bd.values), dtype=np.int64)
    interior = np.setdiff1d(np.arange(n), boundary)
    f = np.zeros(n)
    f[boundary] = [bd.values[int(b)] for b in boundary]
    if interior.size == 0:
        return f
    A = L[interior][:, interior].tocsc()
    rhs = -L[interior][:, boundary] @ f[boundary]
    if g.level <= DIRECT_SOLVE_LIMIT:
        sol = spla.spsolve(A, rhs)
    else:
        sol, info = spla.cg(A, rhs, rtol=1e-12, atol=0.0, maxiter=20 * n)
        if info != 0:
            raise RuntimeError(f"conjugate gradient did not converge (info={info})")
    f[interior] = sol
    return f


def normal_derivative(g: FractalGraph, f, v) -> float:
    """Renormalised boundary flux (5/3)**m * sum_{y ~ v} (f(y) - f(v))."""
    f = _check_field(g, f)
    v = int(v)
    if v not in g.boundary_ids:
        raise ValueError(f"vertex {v} is not a boundary vertex")
    i, j = g.edges[:, 0], g.edges[:, 1]
    w = g.edge_weights
    mask_i = i == v
    mask_j = j == v
    total = math.fsum(((f[j[mask_i]] - f[v]) * w[mask_i]).tolist()
                      + ((f[i[mask_j]] - f[v]) * w[mask_j]).tolist())
    return total


def holder_ratio(g: FractalGraph, f, beta=None, block=512) -> float:
    """Max over vertex pairs of |f(x)-f(y)| / |x-y|**beta.

    Used as an empirical check that harmonic fields obey a uniform Holder
    bound with beta = log(5/3) / (2 log 2).
    """
    f = _check_field(g, f)
    if beta is None:
        beta = math.log(5.0 / 3.0) / (2.0 * math.log(2.0))
    pts = g.coords
    n = g.n_vertices
    best = 0.0
    for s in range(0, n, block):
        sl = slice(s, min(s + block, n))
        dx = pts[sl, None, 0] - pts[None, :, 0]
        dy = pts[sl, None, 1] - pts[None, :, 1]
        d2 = dx * dx + dy * dy
        df = np.abs(f[sl, None] - f[None, :])
        mask = d2 > 0.0
        ratio = np.zeros_like(d2)
        np.divide(df, d2 ** (beta / 2.0), out=ratio, where=mask)
        best = max(best, float(ratio.max()))
    return best
