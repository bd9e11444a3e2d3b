"""Linear elastic rigid-body-spring solver in 2D.

Every body carries three degrees of freedom (two translations and one
rotation about its governing node). Contacts are linear springs acting on
the displacement jump at the face centroid: stiffness ``E0 / l`` in the
normal direction and ``alpha E0 / l`` in the tangential one, both scaled by
the face area.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse import linalg as spla

from .geometry.contacts import Contacts
from .geometry.tessellation import Tessellation
from .theory.predictors import MaterialParams

log = logging.getLogger(__name__)

DOFS = 3


class SolverError(RuntimeError):
    pass


class NotPositiveDefiniteError(SolverError):
    def __init__(self, dof: int, pivot: float):
        super().__init__(f"stiffness matrix not positive definite: pivot {pivot:.3e} at dof {dof} "
                         f"(node {dof // DOFS}, component {dof % DOFS})")
        self.dof = dof
        self.pivot = pivot


def perp(r: np.ndarray) -> np.ndarray:
    """Rotate by +90 degrees: ``(-r_y, r_x)``; ``phi * perp(r)`` is the rotational velocity field."""
    r = np.asarray(r, dtype=float)
    return np.stack([-r[..., 1], r[..., 0]], -1)


def _cross(r: np.ndarray, f: np.ndarray) -> np.ndarray:
    return r[..., 0] * f[..., 1] - r[..., 1] * f[..., 0]


def jump_operator(c: np.ndarray, xa: np.ndarray, xb: np.ndarray) -> np.ndarray:
    """Matrix ``B`` (2 x 6) with ``Delta = B @ [u_a, phi_a, u_b, phi_b]`` at face point ``c``."""
    c, xa, xb = (np.asarray(v, dtype=float) for v in (c, xa, xb))
    shape = np.broadcast_shapes(c.shape, xa.shape, xb.shape)[:-1]
    B = np.zeros(shape + (2, 6))
    B[..., 0, 0] = B[..., 1, 1] = -1.0
    B[..., 0, 3] = B[..., 1, 4] = 1.0
    B[..., :, 2] = -perp(c - xa)
    B[..., :, 5] = perp(c - xb)
    return B


def _spring_matrix(n: np.ndarray, alpha: float) -> np.ndarray:
    nn = np.einsum("...i,...j->...ij", n, n)
    return nn + alpha * (np.eye(2) - nn)


def element_stiffness(e, params: MaterialParams, nodes: np.ndarray) -> np.ndarray:
    """6 x 6 stiffness of one contact element (or a stack, given :class:`Contacts`)."""
    a, b = np.asarray(e.a), np.asarray(e.b)
    l = np.asarray(e.l, dtype=float)
    if np.any(l <= 0):
        raise ValueError("contact length must be positive")
    B = jump_operator(e.c, nodes[a], nodes[b])
    M = _spring_matrix(np.asarray(e.n, dtype=float), params.alpha)
    k = params.E0 * np.asarray(e.A, dtype=float) / l
    return k[..., None, None] * np.einsum("...ki,...kl,...lj->...ij", B, M, B)


def element_dofs(a, b) -> np.ndarray:
    a, b = np.asarray(a), np.asarray(b)
    base = np.stack([a * DOFS, b * DOFS], -1)
    return (base[..., :, None] + np.arange(DOFS)).reshape(base.shape[:-1] + (2 * DOFS,))


@dataclass
class SparseSystem:
    """Global stiffness plus (optionally) prescribed boundary values.

    After :func:`apply_strain_bc`, ``K_ff`` and ``rhs`` form the reduced
    system over the free dofs.
    """

    K: sp.csr_matrix
    n_nodes: int
    fixed: np.ndarray | None = None
    values: np.ndarray | None = None
    K_ff: sp.csc_matrix | None = None
    rhs: np.ndarray | None = None

    @property
    def free(self) -> np.ndarray:
        mask = np.ones(self.K.shape[0], dtype=bool)
        if self.fixed is not None:
            mask[self.fixed] = False
        return np.flatnonzero(mask)


def assemble(t: Tessellation, contacts: Contacts, params: MaterialParams) -> SparseSystem:
    """Sum element stiffnesses into a symmetric sparse matrix (3 dofs per node)."""
    n = t.n_nodes
    touched = np.zeros(n, dtype=bool)
    touched[contacts.a] = True
    touched[contacts.b] = True
    if not touched.all():
        orphans = np.flatnonzero(~touched)
        raise SolverError(f"detached bodies without contacts: nodes {orphans.tolist()[:20]}")
    ke = element_stiffness(contacts, params, t.nodes)
    dofs = element_dofs(contacts.a, contacts.b)
    rows = np.repeat(dofs, 2 * DOFS, axis=1).ravel()
    cols = np.tile(dofs, (1, 2 * DOFS)).ravel()
    K = sp.coo_matrix((ke.ravel(), (rows, cols)), shape=(n * DOFS, n * DOFS)).tocsr()
    K.sum_duplicates()
    K = 0.5 * (K + K.T)  # remove roundoff asymmetry
    return SparseSystem(K.tocsr(), n)


def voigt_field(nodes: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """Dof vector of the homogeneous field ``u = eps . x``, ``phi = 0``."""
    d = np.zeros((len(nodes), DOFS))
    d[:, :2] = nodes @ np.asarray(eps, dtype=float).T
    return d.ravel()


def apply_dirichlet(sys: SparseSystem, fixed: np.ndarray, values: np.ndarray) -> SparseSystem:
    """Prescribe ``values`` on the dofs ``fixed`` and reduce to the free dofs (rhs ``-K_fc u_c``)."""
    fixed = np.asarray(fixed, dtype=np.int64)
    values = np.asarray(values, dtype=float)
    if fixed.shape != values.shape or len(np.unique(fixed)) != len(fixed):
        raise ValueError("prescribed dofs must be unique and match the values")
    out = SparseSystem(sys.K, sys.n_nodes, fixed, values)
    free = out.free
    if free.size == 0:
        log.warning("all dofs are prescribed; nothing to solve")
    K = sys.K.tocsc()
    out.K_ff = K[free][:, free].tocsc()
    out.rhs = -(K[free][:, fixed] @ values)
    return out


def apply_strain_bc(sys: SparseSystem, eps: np.ndarray, boundary_nodes: np.ndarray,
                    nodes: np.ndarray) -> SparseSystem:
    """Prescribe ``u = eps . x`` and ``phi = 0`` on ``boundary_nodes`` and reduce the system."""
    eps = np.asarray(eps, dtype=float)
    if not np.allclose(eps, eps.T, rtol=0, atol=1e-15):
        raise ValueError("macroscopic strain must be symmetric")
    boundary_nodes = np.unique(np.asarray(boundary_nodes, dtype=np.int64))
    if boundary_nodes.size == 0:
        raise ValueError("no boundary nodes to constrain")
    fixed = (boundary_nodes[:, None] * DOFS + np.arange(DOFS)).ravel()
    return apply_dirichlet(sys, fixed, voigt_field(nodes[boundary_nodes], eps))


def _solve_cholesky(A: sp.csc_matrix, b: np.ndarray) -> np.ndarray:
    # symmetric-mode LU without pivoting on a minimum-degree ordering of A + A^T:
    # U's diagonal holds the LDL^T pivots, so a non-positive entry means A is not SPD
    lu = spla.splu(A, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                   options=dict(SymmetricMode=True))
    piv = lu.U.diagonal()
    bad = np.flatnonzero(~(piv > 0))
    if bad.size:
        k = bad[np.argmin(piv[bad])]
        raise NotPositiveDefiniteError(int(np.flatnonzero(lu.perm_c == k)[0]), float(piv[k]))
    return lu.solve(b)


def _solve_cg(A: sp.csc_matrix, b: np.ndarray, rtol: float) -> np.ndarray:
    diag = A.diagonal()
    if np.any(diag <= 0):
        raise NotPositiveDefiniteError(int(np.argmin(diag)), float(diag.min()))
    M = sp.diags(1.0 / diag)
    x, info = spla.cg(A, b, rtol=rtol, atol=0.0, M=M, maxiter=20 * A.shape[0])
    if info != 0:
        raise SolverError(f"conjugate gradient did not converge (info={info})")
    return x


def solve(sys: SparseSystem, method: str = "cholesky", rtol: float = 1e-10) -> np.ndarray:
    """Solve the reduced system and return the full dof vector."""
    if sys.K_ff is None:
        raise SolverError("apply boundary conditions before solving")
    d = np.zeros(sys.K.shape[0])
    d[sys.fixed] = sys.values
    free = sys.free
    if free.size:
        if not np.any(sys.rhs):
            x = np.zeros(free.size)
        elif method == "cholesky":
            x = _solve_cholesky(sys.K_ff, sys.rhs)
        elif method == "cg":
            x = _solve_cg(sys.K_ff, sys.rhs, rtol)
        else:
            raise ValueError(f"unknown method {method!r}")
        d[free] = x
    return d


@dataclass(frozen=True)
class ContactState:
    delta: np.ndarray
    e_N: np.ndarray
    e_T: np.ndarray
    s_N: np.ndarray
    s_T: np.ndarray
    f: np.ndarray


def contact_state(contacts: Contacts, d: np.ndarray, params: MaterialParams, nodes: np.ndarray) -> ContactState:
    """Kinematics, stresses and forces of all contacts for a dof vector ``d``.

    ``f`` is the force the contact exerts on body ``a``; body ``b`` receives ``-f``.
    """
    d = np.asarray(d, dtype=float).reshape(-1, DOFS)
    B = jump_operator(contacts.c, nodes[contacts.a], nodes[contacts.b])
    local = np.concatenate([d[contacts.a], d[contacts.b]], axis=1)
    delta = np.einsum("eij,ej->ei", B, local)
    l = contacts.l
    n = contacts.n
    e_N = np.einsum("ei,ei->e", n, delta) / l
    e_T = delta / l[:, None] - e_N[:, None] * n
    s_N = params.E0 * e_N
    s_T = params.E0 * params.alpha * e_T
    f = contacts.A[:, None] * (s_N[:, None] * n + s_T)
    return ContactState(delta, e_N, e_T, s_N, s_T, f)


def nodal_imbalance(contacts: Contacts, state: ContactState, nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Net contact force and moment (about the governing node) on every body."""
    n = len(nodes)
    force = np.zeros((n, 2))
    moment = np.zeros(n)
    f = state.f
    np.add.at(force, contacts.a, f)
    np.add.at(force, contacts.b, -f)
    np.add.at(moment, contacts.a, _cross(contacts.c - nodes[contacts.a], f))
    np.add.at(moment, contacts.b, _cross(contacts.c - nodes[contacts.b], -f))
    return force, moment


def residual(t: Tessellation, contacts: Contacts, d: np.ndarray, params: MaterialParams,
             interior: np.ndarray | None = None) -> tuple[float, float]:
    """Largest force and moment imbalance over interior bodies.

    Forces are scaled by ``E0 * l_min`` and moments by ``E0 * l_min**2``.
    """
    state = contact_state(contacts, d, params, t.nodes)
    force, moment = nodal_imbalance(contacts, state, t.nodes)
    if interior is None:
        interior = np.setdiff1d(np.arange(t.n_nodes), t.boundary_nodes())
    if len(interior) == 0:
        return 0.0, 0.0
    scale = params.E0 * t.l_min
    return (float(np.hypot(*force[interior].T).max() / scale),
            float(np.abs(moment[interior]).max() / (scale * t.l_min)))
