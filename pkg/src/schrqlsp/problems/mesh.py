"""Nested uniform triangulations of the unit square by midpoint refinement.

Level 0 has n0 x n0 cells, each split into two right triangles along the
(0,0)-(1,1) diagonal. Refinement appends edge midpoints after the coarse
vertices, so the full prolongation is [I; midpoint averages].
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

MAX_LEVELS = 7


@dataclass(frozen=True)
class MeshLevel:
    vertices: np.ndarray  # (nv, 2)
    triangles: np.ndarray  # (nt, 3), counter-clockwise
    boundary: np.ndarray  # bool mask over vertices
    h: float

    @property
    def interior(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary)

    @property
    def n_interior(self) -> int:
        return int(np.count_nonzero(~self.boundary))


@dataclass
class MeshHierarchy:
    levels: list
    prolongations: list  # full vertex prolongation, level i -> i+1
    n0: int = 2
    _interior_cache: dict = field(default_factory=dict, repr=False)

    @property
    def J(self) -> int:
        return len(self.levels) - 1

    def interior_prolongation(self, i: int) -> sparse.csr_matrix:
        """I_i^{i+1} restricted to interior nodes."""
        if i not in self._interior_cache:
            P = self.prolongations[i]
            fine = self.levels[i + 1].interior
            coarse = self.levels[i].interior
            self._interior_cache[i] = P[fine][:, coarse].tocsr()
        return self._interior_cache[i]

    def chain(self, j: int, target: int | None = None) -> sparse.csr_matrix:
        """I_j = I_{t-1}^t ... I_j^{j+1} from level j to ``target`` (default J)."""
        target = self.J if target is None else target
        if not 0 <= j <= target <= self.J:
            raise ValueError("invalid level range")
        out = sparse.identity(self.levels[j].n_interior, format="csr")
        for i in range(j, target):
            out = self.interior_prolongation(i) @ out
        return out.tocsr()


def _initial(n0: int) -> MeshLevel:
    s = np.linspace(0.0, 1.0, n0 + 1)
    X, Y = np.meshgrid(s, s, indexing="xy")
    verts = np.column_stack([X.ravel(), Y.ravel()])
    idx = lambda i, j: j * (n0 + 1) + i
    tris = []
    for j in range(n0):
        for i in range(n0):
            v00, v10, v11, v01 = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))
    return MeshLevel(verts, np.array(tris), _boundary(verts), 1.0 / n0)


def _boundary(verts):
    x, y = verts[:, 0], verts[:, 1]
    return (x == 0.0) | (x == 1.0) | (y == 0.0) | (y == 1.0)


def refine(level: MeshLevel) -> tuple[MeshLevel, sparse.csr_matrix]:
    """Midpoint refinement; returns the fine level and the full prolongation."""
    tris = level.triangles
    nv = level.vertices.shape[0]
    edges = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    edges = np.sort(edges, axis=1)
    uniq, inv = np.unique(edges, axis=0, return_inverse=True)
    inv = inv.ravel()
    nt = tris.shape[0]
    m01, m12, m20 = (nv + inv[k * nt:(k + 1) * nt] for k in range(3))
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    fine_tris = np.concatenate([
        np.column_stack([a, m01, m20]),
        np.column_stack([m01, b, m12]),
        np.column_stack([m20, m12, c]),
        np.column_stack([m01, m12, m20]),
    ])
    mids = 0.5 * (level.vertices[uniq[:, 0]] + level.vertices[uniq[:, 1]])
    verts = np.vstack([level.vertices, mids])
    ne = uniq.shape[0]
    rows = np.concatenate([np.arange(nv), nv + np.arange(ne), nv + np.arange(ne)])
    cols = np.concatenate([np.arange(nv), uniq[:, 0], uniq[:, 1]])
    vals = np.concatenate([np.ones(nv), np.full(2 * ne, 0.5)])
    P = sparse.csr_matrix((vals, (rows, cols)), shape=(nv + ne, nv))
    return MeshLevel(verts, fine_tris, _boundary(verts), 0.5 * level.h), P


def build_hierarchy(J: int, n0: int = 2) -> MeshHierarchy:
    """Levels 0..J; level j has n0 2^j cells per side and (n0 2^j - 1)^2 interior nodes."""
    if int(J) != J or not 0 <= J <= MAX_LEVELS:
        raise ValueError(f"J must be an integer in [0, {MAX_LEVELS}]")
    if n0 < 1:
        raise ValueError("n0 must be >= 1")
    levels = [_initial(n0)]
    prolong = []
    for _ in range(int(J)):
        fine, P = refine(levels[-1])
        levels.append(fine)
        prolong.append(P)
    return MeshHierarchy(levels, prolong, n0)
