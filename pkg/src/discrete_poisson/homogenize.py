"""Macroscopic stress, strain and elastic constants of solved discrete structures."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import solver
from .geometry.contacts import Contacts, chi_statistics, extract_contacts
from .geometry.domain import DomainBox
from .geometry.tessellation import Tessellation
from .theory.expectations import contact_tensors_reduced, general_expectations
from .theory.predictors import ElasticConstants, MaterialParams, Mode, elastic_tensor_meso, predict_general
from .theory.tensors import sym2, symmetrize_minor

log = logging.getLogger(__name__)

DEFAULT_LOAD = (1e-3, 0.0)
DEFAULT_MARGIN = 3.0  # in units of l_min


class HomogenizationError(ValueError):
    pass


@dataclass(frozen=True)
class MacroState:
    sigma: np.ndarray
    eps: np.ndarray
    window: DomainBox
    margin: float
    v_inner: float
    n_inner: int


@dataclass(frozen=True)
class SweepRow:
    kind: str
    seed: int | None
    alpha: float
    nu_num: float
    E_num: float
    nu_pred: float
    E_pred: float
    I1: float
    I2: float
    error: str | None = None

    def as_csv_row(self) -> list:
        return [self.kind, "" if self.seed is None else self.seed, self.alpha, self.nu_num, self.E_num,
                self.nu_pred, self.E_pred, self.I1, self.I2]


SWEEP_COLUMNS = ["kind", "seed", "alpha", "nu_num", "E_num", "nu_pred", "E_pred", "I1", "I2"]


def _mode_2d(mode) -> Mode:
    mode = Mode(mode)
    if mode is Mode.THREE_D:
        raise ValueError("numerical homogenization is two-dimensional; use mode 'ps' or 'pe'")
    return mode


def inner_window(t: Tessellation, margin: float) -> DomainBox:
    if margin < 0:
        raise ValueError("margin must be non-negative")
    window = t.domain.shrink(margin)
    if window.area <= 0.0:
        raise HomogenizationError(f"margin {margin} leaves no inner region")
    return window


def bagi_stress(contacts: Contacts, states: solver.ContactState, t: Tessellation,
                margin: float | None = None) -> tuple[np.ndarray, float]:
    """Average stress of the contacts lying deeper than ``margin`` inside the domain.

    ``sigma = sym(sum_e f_e (x) (x_b - x_a)) / V_inner`` where ``f_e`` acts on
    body ``a``, so tension is positive. The branch vector ``x_b - x_a`` makes
    the sum independent of the coordinate origin. ``V_inner`` is the area of
    the domain shrunk by ``margin`` on every side.
    """
    margin = DEFAULT_MARGIN * t.l_min if margin is None else margin
    window = inner_window(t, margin)
    inner = t.domain.distance_to_boundary(contacts.c) > margin
    if not inner.any():
        raise HomogenizationError("no contacts inside the stress window")
    branch = t.nodes[contacts.b[inner]] - t.nodes[contacts.a[inner]]
    total = np.einsum("ei,ej->ij", states.f[inner], branch)
    return sym2(total) / window.area, window.area


def macro_strain(p: float, q: float) -> np.ndarray:
    return np.array([[p, 0.0], [0.0, q]])


def strain_from_regression(d: np.ndarray, t: Tessellation, nodes: np.ndarray | None = None) -> np.ndarray:
    """Least-squares fit of ``u = eps . x + u0`` over ``nodes`` (default: interior ones)."""
    if nodes is None:
        nodes = np.setdiff1d(np.arange(t.n_nodes), t.boundary_nodes())
    x = t.nodes[nodes]
    u = np.asarray(d, dtype=float).reshape(-1, solver.DOFS)[nodes, :2]
    design = np.column_stack([x, np.ones(len(x))])
    if len(x) < 3 or np.linalg.matrix_rank(design) < 3:
        raise HomogenizationError("rank-deficient strain regression (need 3 non-collinear nodes)")
    coef, *_ = np.linalg.lstsq(design, u, rcond=None)
    return sym2(coef[:2].T)


def extract_constants(sigma: np.ndarray, eps: np.ndarray, mode) -> ElasticConstants:
    """``(E, nu)`` of an isotropic 2D material from one stress-strain pair with ``eps_12 = 0``."""
    mode = _mode_2d(mode)
    if abs(eps[0, 1]) > 1e-14 * max(1.0, np.abs(eps).max()):
        raise HomogenizationError("shear strain must vanish")
    s11, s22 = float(sigma[0, 0]), float(sigma[1, 1])
    e11, e22 = float(eps[0, 0]), float(eps[1, 1])
    scale = max(abs(s11), abs(s22)) * max(abs(e11), abs(e22))
    tol = 1e-12 * scale if scale > 0 else 0.0
    if mode is Mode.PLANE_STRESS:
        den = s11 * e11 - s22 * e22
        if abs(den) <= tol:
            raise HomogenizationError("vanishing denominator; choose a load with eps_11 != +-eps_22")
        return ElasticConstants((s11 * s11 - s22 * s22) / den, (s22 * e11 - s11 * e22) / den, mode)
    den = (s11 + s22) * (e11 - e22)
    if abs(den) <= tol:
        raise HomogenizationError("vanishing denominator; choose a load with eps_11 != eps_22")
    nu = (s22 * e11 - s11 * e22) / den
    E = (s11 - s22) * (e11 * (s11 + 2 * s22) - e22 * (2 * s11 + s22)) / ((e11 - e22) ** 2 * (s11 + s22))
    return ElasticConstants(E, nu, mode)


@dataclass(frozen=True)
class SimulationResult:
    params: MaterialParams
    eps: np.ndarray
    dofs: np.ndarray
    states: solver.ContactState
    residual_force: float
    residual_moment: float
    macro: MacroState
    constants: ElasticConstants


def simulate(t: Tessellation, params: MaterialParams, p: float = DEFAULT_LOAD[0], q: float = DEFAULT_LOAD[1],
             mode="ps", contacts: Contacts | None = None, margin: float | None = None,
             method: str = "cholesky") -> SimulationResult:
    """Impose ``u = diag(p, q) . x`` and ``phi = 0`` on the boundary, solve and homogenize."""
    mode = _mode_2d(mode)
    contacts = extract_contacts(t) if contacts is None else contacts
    eps = macro_strain(p, q)
    bnd = t.boundary_nodes()
    system = solver.apply_strain_bc(solver.assemble(t, contacts, params), eps, bnd, t.nodes)
    d = solver.solve(system, method=method)
    states = solver.contact_state(contacts, d, params, t.nodes)
    interior = np.setdiff1d(np.arange(t.n_nodes), bnd)
    rf, rm = solver.residual(t, contacts, d, params, interior)
    margin = DEFAULT_MARGIN * t.l_min if margin is None else margin
    sigma, v_inner = bagi_stress(contacts, states, t, margin)
    n_inner = int((t.domain.distance_to_boundary(contacts.c) > margin).sum())
    macro = MacroState(sigma, eps, inner_window(t, margin), margin, v_inner, n_inner)
    return SimulationResult(params, eps, d, states, rf, rm, macro, extract_constants(sigma, eps, mode))


def alpha_sweep(t: Tessellation, alphas, E0: float = 1.0, mode="ps", p: float = DEFAULT_LOAD[0],
                q: float = DEFAULT_LOAD[1], contacts: Contacts | None = None, margin: float | None = None,
                threads: int = 1) -> list[SweepRow]:
    """Numerical and predicted ``(nu, E)`` for each ``alpha``, ordered by ``alpha``.

    Predictions use ``I1``, ``I2`` measured on this structure. A failing row
    is reported with NaN values and its error message.
    """
    alphas = sorted(float(a) for a in alphas)
    if not alphas:
        raise ValueError("empty alpha list")
    mode = _mode_2d(mode)
    contacts = extract_contacts(t) if contacts is None else contacts
    stats = chi_statistics(contacts)
    kind = t.kind.value

    def row(alpha: float) -> SweepRow:
        try:
            pred = predict_general(alpha, stats.I1, stats.I2, mode, E0)
            nu_pred, e_pred = pred.nu, pred.E
        except ValueError:
            nu_pred = e_pred = math.nan
        try:
            res = simulate(t, MaterialParams(E0, alpha), p, q, mode, contacts, margin)
        except (solver.SolverError, HomogenizationError) as exc:
            log.error("alpha=%g failed: %s", alpha, exc)
            return SweepRow(kind, t.seed, alpha, math.nan, math.nan, nu_pred, e_pred, stats.I1, stats.I2, str(exc))
        return SweepRow(kind, t.seed, alpha, res.constants.nu, res.constants.E, nu_pred, e_pred,
                        stats.I1, stats.I2)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(row, alphas))
    return [row(a) for a in alphas]


def structure_tensor(contacts: Contacts, params: MaterialParams, volume: float | None = None) -> np.ndarray:
    """``sym(sum_e A_e l_e E0 (N_e + alpha T_e)) / V`` over the elements of one structure.

    ``V`` defaults to the summed element volumes ``cos(chi) A l / 2``.
    """
    if len(contacts) == 0:
        raise ValueError("no contact elements")
    volume = float(contacts.volumes.sum()) if volume is None else volume
    big_n, big_t = contact_tensors_reduced(contacts.n, contacts.t)
    w = contacts.A * contacts.l * params.E0
    total = np.einsum("e,eijkl->ijkl", w, big_n + params.alpha * big_t)
    return symmetrize_minor(total) / volume


def structure_tensor_check(contacts: Contacts, params: MaterialParams,
                           domain_area: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Per-structure elastic tensor next to the analytic one built from the measured ``(I1, I2)``."""
    stats = chi_statistics(contacts)
    exp = general_expectations(stats.I1, stats.I2, 2)
    analytic = elastic_tensor_meso(params, exp.m_vol, exp.n_sym, exp.t_sym, 2)
    return structure_tensor(contacts, params, domain_area), analytic
