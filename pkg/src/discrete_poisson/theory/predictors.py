"""Macroscopic elastic constants predicted from contact geometry statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import optimize

from .expectations import Expectations, OrientationDistribution, closed_expectations, general_expectations
from .tensors import identity_sym, identity_vol, isotropic_coefficients


class Mode(str, Enum):
    PLANE_STRESS = "ps"
    PLANE_STRAIN = "pe"
    THREE_D = "3d"

    @property
    def dim(self) -> int:
        return 3 if self is Mode.THREE_D else 2

    @property
    def admissible_nu(self) -> tuple[float, float]:
        return {Mode.PLANE_STRESS: (-1.0, 1.0 / 3.0),
                Mode.PLANE_STRAIN: (-math.inf, 0.25),
                Mode.THREE_D: (-1.0, 0.25)}[self]


@dataclass(frozen=True)
class MaterialParams:
    E0: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if not self.E0 > 0:
            raise ValueError(f"E0 must be positive, got {self.E0}")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")


@dataclass(frozen=True)
class ElasticConstants:
    E: float
    nu: float
    mode: Mode


# Multiplier of nu in the denominator of nu = b / (3a + k*b), where D = a*I + b*Ivol.
_NU_DENOM = {Mode.PLANE_STRESS: 1.0, Mode.PLANE_STRAIN: 2.0, Mode.THREE_D: 2.0}


def macro_tensor(ec: ElasticConstants) -> np.ndarray:
    """Isotropic elastic tensor ``E/(1+nu) I + c(nu) Ivol`` for the given analysis mode."""
    E, nu, mode = ec.E, ec.nu, ec.mode
    if mode is Mode.PLANE_STRESS:
        if abs(1.0 - nu * nu) < 1e-14:
            raise ValueError(f"nu = {nu} is singular for plane stress")
        vol = 3.0 * E * nu / (1.0 - nu * nu)
    else:
        if abs(1.0 + nu) < 1e-14 or abs(1.0 - 2.0 * nu) < 1e-14:
            raise ValueError(f"nu = {nu} is singular for {mode.value}")
        vol = 3.0 * E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
    dim = mode.dim
    return E / (1.0 + nu) * identity_sym(dim) + vol * identity_vol(dim)


def constants_from_coefficients(a: float, b: float, mode: Mode) -> ElasticConstants:
    """Solve ``a = E/(1+nu)`` and the volumetric coefficient ``b`` for ``(E, nu)``."""
    denom = 3.0 * a + _NU_DENOM[mode] * b
    if denom == 0.0:
        raise ZeroDivisionError("vanishing denominator when matching elastic coefficients")
    nu = b / denom
    return ElasticConstants(E=a * (1.0 + nu), nu=nu, mode=mode)


def constants_from_tensor(d: np.ndarray, mode: Mode) -> ElasticConstants:
    return constants_from_coefficients(*isotropic_coefficients(d), mode)


def elastic_tensor_meso(params: MaterialParams, m_vol: float, n_sym: np.ndarray, t_sym: np.ndarray,
                        dim: int | None = None) -> np.ndarray:
    """``D = dim * E0 / E[rho:nu] * (<E[N]>^SYM + alpha <E[T]>^SYM)``."""
    dim = n_sym.shape[0] if dim is None else dim
    if abs(m_vol) < 1e-12:
        raise ValueError("degenerate volume expectation (E[rho:nu] = 0)")
    return dim * params.E0 / m_vol * (np.asarray(n_sym) + params.alpha * np.asarray(t_sym))


def _check_alpha(alpha: float):
    if not alpha >= 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")


def predict_cone(alpha: float, gamma: float, mode: Mode | str, E0: float = 1.0) -> ElasticConstants:
    """Closed-form ``(E, nu)`` for contact vectors uniformly spread within ``|chi| <= gamma``."""
    mode = Mode(mode)
    _check_alpha(alpha)
    if not 0.0 <= gamma <= math.pi:
        raise ValueError(f"gamma must lie in [0, pi], got {gamma}")
    if gamma == 0.0:
        return predict_limit(alpha, mode, E0)
    p, m = 1.0 + alpha, 1.0 - alpha
    if mode is Mode.THREE_D:
        c = math.cos(gamma)
        cc = c + c * c
        den = m * (7.0 * cc - 20.0) + 30.0
        if abs(1.0 + c) < 1e-12 or den == 0.0:
            raise ValueError(f"gamma = {gamma} makes the 3D predictor singular")
        nu = 3.0 * m * cc / den
        E = 2.0 * E0 * (m * (cc - 20.0) + 30.0) * (m * (cc - 2.0) + 3.0) / (3.0 * (1.0 + c) * den)
        return ElasticConstants(E, nu, mode)
    s2, s = math.sin(2.0 * gamma), math.sin(gamma)
    k = 1.0 if mode is Mode.PLANE_STRESS else 2.0
    den = 4.0 * p * gamma + k * m * s2
    if den == 0.0 or s == 0.0:
        raise ValueError(f"gamma = {gamma} makes the {mode.value} predictor singular")
    nu = m * s2 / den
    if mode is Mode.PLANE_STRESS:
        E = E0 * (2.0 * p * p * gamma ** 2 + (1.0 - alpha ** 2) * gamma * s2) / (s * den)
    else:
        E = E0 * (4.0 * p * p * gamma ** 2 + 3.0 * (1.0 - alpha ** 2) * gamma * s2) / (2.0 * s * den)
    return ElasticConstants(E, nu, mode)


def predict_limit(alpha: float, mode: Mode | str, E0: float = 1.0) -> ElasticConstants:
    """Predictor for parallel normal and contact vectors (``gamma -> 0``)."""
    mode = Mode(mode)
    _check_alpha(alpha)
    if mode is Mode.PLANE_STRESS:
        return ElasticConstants(E0 * (2.0 + 2.0 * alpha) / (3.0 + alpha), (1.0 - alpha) / (3.0 + alpha), mode)
    if mode is Mode.PLANE_STRAIN:
        return ElasticConstants(E0 * (1.0 + alpha) * (5.0 - alpha) / 8.0, (1.0 - alpha) / 4.0, mode)
    return ElasticConstants(E0 * (2.0 + 3.0 * alpha) / (4.0 + alpha), (1.0 - alpha) / (4.0 + alpha), mode)


def predict_general(alpha: float, i1: float, i2: float, mode: Mode | str, E0: float = 1.0) -> ElasticConstants:
    """Predictor for an arbitrary symmetric ``chi`` distribution summarised by ``I1``, ``I2``."""
    mode = Mode(mode)
    _check_alpha(alpha)
    if not -1.0 - 1e-12 <= i2 <= 1.0 + 1e-12:
        raise ValueError(f"I2 must lie in [-1, 1], got {i2}")
    if not i1 > 0:
        raise ValueError(f"I1 must be positive, got {i1}")
    p, m = 1.0 + alpha, 1.0 - alpha
    if mode is Mode.PLANE_STRESS:
        den = 2.0 * p + m * i2
        e_num, e_den = p * p + (1.0 - alpha ** 2) * i2, den * i1
    elif mode is Mode.PLANE_STRAIN:
        den = 2.0 * p + 2.0 * m * i2
        e_num, e_den = 2.0 * p * p + 3.0 * (1.0 - alpha ** 2) * i2, 4.0 * (p + m * i2) * i1
    else:
        den = m * (7.0 * i2 - 11.0) + 20.0
        e_num = (m * (i2 - 13.0) + 20.0) * (i2 * m + p)
        e_den = 2.0 * den * i1
    if den == 0.0 or e_den == 0.0:
        raise ValueError("vanishing denominator in the general predictor")
    num = m * (3.0 * i2 + 1.0) if mode is Mode.THREE_D else m * i2
    return ElasticConstants(E0 * e_num / e_den, num / den, mode)


def stationary_gammas(dim: int) -> list[float]:
    """Cone half-angles at which Poisson's ratio is stationary in ``gamma``."""
    if dim == 3:
        return [0.0, math.acos(-0.5), math.pi]
    if dim != 2:
        raise ValueError("dim must be 2 or 3")
    # 2g - tan(2g) changes sign once on (pi/2, 3pi/4); tan(2g) has its pole at 3pi/4
    f = lambda g: 2.0 * g - math.tan(2.0 * g)
    root = optimize.bisect(f, 0.5 * math.pi + 1e-6, 0.75 * math.pi - 1e-6, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return [0.0, root]


def _linear_coefficients(exp: Expectations) -> tuple[tuple[float, float], tuple[float, float]]:
    """Isotropic coefficients (I, Ivol) of the normal and tangential parts."""
    return isotropic_coefficients(exp.n_sym), isotropic_coefficients(exp.t_sym)


def nu_limits(exp: Expectations, mode: Mode | str) -> tuple[float, float]:
    """Poisson's ratio at ``alpha = 0`` and in the limit ``alpha -> inf``.

    The ``D`` coefficients are linear in ``alpha``; the limit keeps only the
    leading (tangential) terms, so no large-number evaluation is involved.
    """
    mode = Mode(mode)
    k = _NU_DENOM[mode]
    (na, nb), (ta, tb) = _linear_coefficients(exp)
    den0 = 3.0 * na + k * nb
    den_inf = 3.0 * ta + k * tb
    # nu(alpha) = (nb + tb*alpha) / (den0 + den_inf*alpha); a cancelled denominator means divergence
    tol = 1e-12 * max(abs(na), abs(nb), abs(ta), abs(tb))
    nu0 = nb / den0 if abs(den0) > tol else math.copysign(math.inf, nb * den_inf)
    nu_inf = tb / den_inf if abs(den_inf) > tol else math.copysign(math.inf, tb * den0)
    return nu0, nu_inf


def nu_interval(mode: Mode | str, gamma: float | None = None, i2: float | None = None) -> tuple[float, float]:
    """Range of Poisson's ratio reachable over ``alpha in [0, inf)``.

    Exactly one of ``gamma`` (cone distribution) or ``i2`` must be given.
    """
    mode = Mode(mode)
    if (gamma is None) == (i2 is None):
        raise ValueError("give exactly one of gamma or i2")
    if gamma is not None:
        exp = closed_expectations(OrientationDistribution.cone(gamma, mode.dim))
    else:
        exp = general_expectations(1.0, i2, mode.dim)
    lo, hi = sorted(nu_limits(exp, mode))
    return lo, hi
