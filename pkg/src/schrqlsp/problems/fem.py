"""P1 Lagrange finite elements for -Laplace(u) = f on the unit square."""
from __future__ import annotations

import numpy as np
from scipy import sparse

from .mesh import MeshHierarchy, MeshLevel
from .system import DiscreteSystem, ExactSolution


def _geometry(level: MeshLevel):
    P = level.vertices[level.triangles]  # (nt, 3, 2)
    e1 = P[:, 1] - P[:, 0]
    e2 = P[:, 2] - P[:, 0]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    area = 0.5 * np.abs(det)
    # gradients of barycentric coordinates: rows of inv([e1 e2])^T, plus the constraint
    inv = np.empty((P.shape[0], 2, 2))
    inv[:, 0, 0] = e2[:, 1] / det
    inv[:, 0, 1] = -e2[:, 0] / det
    inv[:, 1, 0] = -e1[:, 1] / det
    inv[:, 1, 1] = e1[:, 0] / det
    g1, g2 = inv[:, 0], inv[:, 1]
    grads = np.stack([-(g1 + g2), g1, g2], axis=1)  # (nt, 3, 2)
    return P, area, grads


def _midpoints(P):
    return np.stack([0.5 * (P[:, 0] + P[:, 1]), 0.5 * (P[:, 1] + P[:, 2]), 0.5 * (P[:, 2] + P[:, 0])], axis=1)


# barycentric values at the midpoints of edges 01, 12, 20 (rows: midpoint, cols: vertex)
_LAMBDA_AT_MID = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])


def assemble(level: MeshLevel, f=None):
    """Full stiffness matrix (sparse) and load vector over all vertices."""
    P, area, grads = _geometry(level)
    tris = level.triangles
    nv = level.vertices.shape[0]
    Ke = area[:, None, None] * np.einsum("tik,tjk->tij", grads, grads)
    rows = np.repeat(tris, 3, axis=1).ravel()
    cols = np.tile(tris, (1, 3)).ravel()
    K = sparse.csr_matrix((Ke.ravel(), (rows, cols)), shape=(nv, nv))
    F = np.zeros(nv)
    if f is not None:
        mids = _midpoints(P)
        fm = f(mids[..., 0], mids[..., 1])  # (nt, 3)
        Fe = (area / 3.0)[:, None] * (fm @ _LAMBDA_AT_MID)
        np.add.at(F, tris, Fe)
    return K, F


def poisson2d_p1(hier: MeshHierarchy, level: int, f=None, dirichlet=None,
                 exact: ExactSolution | None = None) -> DiscreteSystem:
    """Interior-node P1 system; Dirichlet data enters through the nodal lift."""
    if int(level) != level or not 0 <= level <= hier.J:
        raise ValueError(f"level must lie in [0, {hier.J}]")
    mesh = hier.levels[int(level)]
    K, F = assemble(mesh, f)
    interior = mesh.interior
    bnd = np.flatnonzero(mesh.boundary)
    g = np.zeros(mesh.vertices.shape[0])
    if dirichlet is not None:
        g[bnd] = dirichlet(mesh.vertices[bnd, 0], mesh.vertices[bnd, 1])
    Kii = K[interior][:, interior]
    rhs = F[interior] - K[interior][:, bnd] @ g[bnd]
    meta = {"kind": "p1", "level": int(level), "mesh": mesh, "lift": g, "hierarchy": hier}
    return DiscreteSystem(Kii.toarray(), rhs, exact, meta)


def _manufactured() -> ExactSolution:
    pi = np.pi
    return ExactSolution(
        u=lambda x, y: y ** 2 * np.sin(pi * x),
        grad=lambda x, y: (pi * y ** 2 * np.cos(pi * x), 2.0 * y * np.sin(pi * x)),
        f=lambda x, y: pi ** 2 * y ** 2 * np.sin(pi * x) - 2.0 * np.sin(pi * x),
    )


MANUFACTURED = _manufactured()


def poisson2d_manufactured(hier: MeshHierarchy, level: int) -> DiscreteSystem:
    """Data chosen so that u = y^2 sin(pi x)."""
    ex = MANUFACTURED
    return poisson2d_p1(hier, level, ex.f, ex.u, exact=ex)


def nodal_field(sys: DiscreteSystem, x) -> np.ndarray:
    """Interior solution plus boundary lift, over all vertices."""
    u = np.array(sys.meta["lift"], dtype=float)
    u[sys.meta["mesh"].interior] = np.real(np.asarray(x))
    return u


def fem_error_norms(sys: DiscreteSystem, x, exact: ExactSolution | None = None) -> tuple[float, float]:
    """(||u_h - u||_L2, |u_h - u|_H1) by the edge-midpoint rule on each triangle."""
    exact = exact or sys.exact
    if exact is None or exact.grad is None:
        raise ValueError("an exact solution with gradient is required")
    mesh = sys.meta["mesh"]
    uh = nodal_field(sys, x)
    P, area, grads = _geometry(mesh)
    mids = _midpoints(P)
    ue = uh[mesh.triangles]  # (nt, 3)
    uh_mid = ue @ _LAMBDA_AT_MID.T
    u_mid = exact.u(mids[..., 0], mids[..., 1])
    l2 = np.sum(area / 3.0 * np.sum((uh_mid - u_mid) ** 2, axis=1))
    guh = np.einsum("ti,tik->tk", ue, grads)  # constant per triangle
    gx, gy = exact.grad(mids[..., 0], mids[..., 1])
    h1 = np.sum(area / 3.0 * np.sum((guh[:, None, 0] - gx) ** 2 + (guh[:, None, 1] - gy) ** 2, axis=1))
    return float(np.sqrt(l2)), float(np.sqrt(h1))
