"""Orientation distributions and expectations of the contact tensors.

Closed forms for the uniform cone distribution and for arbitrary angle
distributions (through the auxiliary integrals ``I1 = E[cos chi]`` and
``I2 = E[cos 2chi]``), plus a Monte-Carlo oracle that integrates the tensor
definitions directly.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .tensors import (
    identity_sym,
    identity_vol,
    normal_2d,
    normal_3d,
    rotation_2d,
    rotation_3d,
    symmetrize_minor,
)

class Variant(str, Enum):
    CONE = "cone"
    TABULATED = "tabulated"
    DIRAC_PARALLEL = "dirac_parallel"
    DIRAC_PERPENDICULAR = "dirac_perpendicular"


@dataclass(frozen=True)
class OrientationDistribution:
    """Distribution of the angle ``chi`` between contact normal and contact vector.

    In 2D ``chi`` lives on ``[-pi, pi]`` and the density must be symmetric;
    in 3D it lives on ``[0, pi]`` (polar angle of ``t`` around ``n``).
    """

    variant: Variant
    dim: int = 2
    gamma: float = 0.0
    chi_grid: np.ndarray | None = field(default=None, repr=False)
    density: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if self.variant is Variant.CONE and not 0.0 <= self.gamma <= np.pi:
            raise ValueError(f"cone half-angle must lie in [0, pi], got {self.gamma}")
        if self.variant is Variant.TABULATED:
            grid = np.asarray(self.chi_grid, dtype=float)
            dens = np.asarray(self.density, dtype=float)
            if grid.ndim != 1 or grid.shape != dens.shape or grid.size < 3:
                raise ValueError("tabulated density needs matching 1D grid and values (>= 3 points)")
            if np.any(np.diff(grid) <= 0):
                raise ValueError("chi grid must be strictly increasing")
            if np.any(dens < 0):
                raise ValueError("density must be non-negative")
            total = integrate.simpson(dens, x=grid)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"density integrates to {total!r}, expected 1")
            object.__setattr__(self, "chi_grid", grid)
            object.__setattr__(self, "density", dens)

    @classmethod
    def cone(cls, gamma: float, dim: int = 2) -> "OrientationDistribution":
        return cls(Variant.CONE, dim=dim, gamma=float(gamma))

    @classmethod
    def parallel(cls, dim: int = 2) -> "OrientationDistribution":
        return cls(Variant.DIRAC_PARALLEL, dim=dim)

    @classmethod
    def perpendicular(cls, dim: int = 2) -> "OrientationDistribution":
        return cls(Variant.DIRAC_PERPENDICULAR, dim=dim)

    @classmethod
    def tabulated(cls, chi_grid, density, dim: int = 2, normalize: bool = True) -> "OrientationDistribution":
        grid = np.asarray(chi_grid, dtype=float)
        dens = np.asarray(density, dtype=float)
        if normalize:
            dens = dens / integrate.simpson(dens, x=grid)
        return cls(Variant.TABULATED, dim=dim, chi_grid=grid, density=dens)

    # sampling ---------------------------------------------------------------

    def sample_chi(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.variant is Variant.DIRAC_PARALLEL or (self.variant is Variant.CONE and self.gamma == 0.0):
            return np.zeros(size)
        if self.variant is Variant.DIRAC_PERPENDICULAR:
            if self.dim == 3:
                return np.full(size, 0.5 * np.pi)
            return np.where(rng.random(size) < 0.5, -0.5, 0.5) * np.pi
        u = rng.random(size)
        if self.variant is Variant.CONE:
            if self.dim == 2:
                return self.gamma * (2.0 * u - 1.0)
            # inverse CDF of sin(chi) / (1 - cos gamma) on [0, gamma]
            return np.arccos(1.0 - u * (1.0 - np.cos(self.gamma)))
        grid, dens = self.chi_grid, self.density
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(grid))])
        cdf /= cdf[-1]
        return np.interp(u, cdf, grid)


def aux_integrals(dist: OrientationDistribution) -> tuple[float, float]:
    """``(I1, I2)``: expectations of ``cos chi`` and ``cos 2chi`` by quadrature."""
    if dist.variant is Variant.DIRAC_PARALLEL:
        return 1.0, 1.0
    if dist.variant is Variant.DIRAC_PERPENDICULAR:
        return 0.0, -1.0
    if dist.variant is Variant.TABULATED:
        g, f = dist.chi_grid, dist.density
        return (float(integrate.simpson(np.cos(g) * f, x=g)),
                float(integrate.simpson(np.cos(2 * g) * f, x=g)))
    gamma = dist.gamma
    if gamma == 0.0:
        return 1.0, 1.0
    if dist.dim == 2:
        pdf = lambda x: 1.0 / (2.0 * gamma)
        lo = -gamma
    else:
        pdf = lambda x: np.sin(x) / (1.0 - np.cos(gamma))
        lo = 0.0
    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=200)
    i1 = integrate.quad(lambda x: np.cos(x) * pdf(x), lo, gamma, **opts)[0]
    i2 = integrate.quad(lambda x: np.cos(2 * x) * pdf(x), lo, gamma, **opts)[0]
    return float(i1), float(i2)


def cone_aux_closed(gamma: float, dim: int) -> tuple[float, float]:
    """Closed-form ``(I1, I2)`` for the uniform cone distribution."""
    if dim == 2:
        return float(np.sinc(gamma / np.pi)), float(np.sinc(2 * gamma / np.pi))
    c = np.cos(gamma)
    return float(np.cos(gamma / 2) ** 2), float((2 * c + 2 * c * c - 1) / 3)


class Expectations(NamedTuple):
    m_vol: float
    n_sym: np.ndarray
    t_sym: np.ndarray


class OracleResult(NamedTuple):
    m_vol: float
    n_sym: np.ndarray
    t_sym: np.ndarray
    m_vol_se: float
    n_sym_se: np.ndarray
    t_sym_se: np.ndarray
    samples: int


def closed_expectations(dist: OrientationDistribution, dim: int | None = None) -> Expectations:
    """Exact symmetric expectations for the cone distribution."""
    if dist.variant is not Variant.CONE:
        raise ValueError("closed_expectations requires the cone distribution")
    dim = dist.dim if dim is None else dim
    gamma = dist.gamma
    eye4, vol = identity_sym(dim), identity_vol(dim)
    if dim == 2:
        m_vol = np.sinc(gamma / np.pi)
        k = 3.0 / 8.0 * np.sinc(2.0 * gamma / np.pi)  # 3 sin(2g) / (16 g)
        return Expectations(float(m_vol), 0.25 * eye4 + k * vol, 0.25 * eye4 - k * vol)
    c, c2 = np.cos(gamma), np.cos(2.0 * gamma)
    m_vol = np.cos(gamma / 2.0) ** 2
    k = (2.0 * c + c2 + 1.0) / 20.0
    n_sym = (2.0 * c + c2 + 21.0) / 180.0 * eye4 + k * vol
    t_sym = (39.0 - 2.0 * c - c2) / 180.0 * eye4 - k * vol
    return Expectations(float(m_vol), n_sym, t_sym)


def general_expectations(i1: float, i2: float, dim: int) -> Expectations:
    """Symmetric expectations for an arbitrary ``chi`` distribution given ``(I1, I2)``."""
    eye4, vol = identity_sym(dim), identity_vol(dim)
    if dim == 2:
        k = 3.0 * i2 / 8.0
        return Expectations(float(i1), 0.25 * eye4 + k * vol, 0.25 * eye4 - k * vol)
    k = (3.0 * i2 + 1.0) / 20.0
    return Expectations(float(i1), (7.0 + i2) / 60.0 * eye4 + k * vol, (13.0 - i2) / 60.0 * eye4 - k * vol)


def contact_tensors_reduced(n: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed index form of :func:`script_tensors` given ``t = rho . n``.

    ``N_ijkl = n_i t_j n_k t_l`` and ``T_ijkl = t_i (d_jk - n_j n_k) t_l``.
    """
    big_n = np.einsum("...i,...j,...k,...l->...ijkl", n, t, n, t)
    proj = np.eye(n.shape[-1]) - np.einsum("...j,...k->...jk", n, n)
    big_t = np.einsum("...i,...jk,...l->...ijkl", t, proj, t)
    return big_n, big_t


def _batch_sums(dist: OrientationDistribution, seed_seq: np.random.SeedSequence, size: int):
    """Sums over one batch of ``rho:nu``, ``<N>^SYM`` and ``<T>^SYM``.

    The tensor sums are evaluated as matrix products over the sample axis,
    using the index form of :func:`contact_tensors_reduced`.
    """
    dim = dist.dim
    rng = np.random.default_rng(seed_seq)
    chi = dist.sample_chi(rng, size)
    xi = rng.uniform(0.0, 2.0 * np.pi, size)
    if dim == 2:
        n = normal_2d(xi)
        rho = rotation_2d(chi)
    else:
        zeta = np.arccos(1.0 - 2.0 * rng.random(size))
        theta = rng.uniform(0.0, 2.0 * np.pi, size)
        n = normal_3d(xi, zeta)
        rho = rotation_3d(xi, zeta, theta, chi)
    t = np.einsum("sij,sj->si", rho, n)
    vol = np.einsum("si,si->s", n, t).sum()
    nt = np.einsum("si,sj->sij", n, t).reshape(size, -1)
    tn = np.einsum("si,sj->sij", t, n).reshape(size, -1)
    shape = (dim,) * 4
    big_n = (nt.T @ nt).reshape(shape)
    tt = t.T @ t
    big_t = np.einsum("il,jk->ijkl", tt, np.eye(dim)) - (tn.T @ nt).reshape(shape)
    return vol, symmetrize_minor(big_n), symmetrize_minor(big_t)


def expectation_oracle(dist: OrientationDistribution, samples: int, seed: int = 0,
                       threads: int = 1, batches: int = 100) -> OracleResult:
    """Monte-Carlo means of ``rho:nu``, ``<N>^SYM`` and ``<T>^SYM`` with standard errors.

    The sample is split into a fixed number of batches, each drawn from its
    own spawned seed stream, so results depend on ``seed`` only and not on
    ``threads``. Standard errors come from the spread of the batch means.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    batches = max(1, min(batches, samples))
    sizes = np.full(batches, samples // batches)
    sizes[: samples % batches] += 1
    streams = np.random.SeedSequence(seed).spawn(batches)
    jobs = list(zip(streams, sizes.tolist()))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda j: _batch_sums(dist, *j), jobs))
    else:
        parts = [_batch_sums(dist, *j) for j in jobs]

    def mean_se(sums):
        sums = np.asarray(sums, dtype=float)
        mean = sums.sum(0) / samples
        if batches < 2:
            return mean, np.zeros_like(mean)
        w = sizes.reshape((-1,) + (1,) * (sums.ndim - 1))
        dev = sums - w * mean
        se = np.sqrt((dev * dev).sum(0) * batches / (batches - 1)) / samples
        return mean, se

    vm, vse = mean_se([p[0] for p in parts])
    nm, nse = mean_se([p[1] for p in parts])
    tm, tse = mean_se([p[2] for p in parts])
    return OracleResult(float(vm), nm, tm, float(vse), nse, tse, samples)
