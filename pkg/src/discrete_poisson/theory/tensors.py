"""Small dense tensor algebra used by the theory module.

All routines accept arbitrary leading batch axes: a tensor of order ``k`` in
``d`` dimensions is any array whose trailing ``k`` axes all have length ``d``.
Index positions in :func:`transpose` are 1-based over those trailing axes.
"""
from __future__ import annotations

import numpy as np


def transpose(a: np.ndarray, i: int, j: int, order: int | None = None) -> np.ndarray:
    """Swap tensor indices ``i`` and ``j`` (1-based) of an order-``order`` tensor.

    ``order`` defaults to ``a.ndim`` (no batch axes).
    """
    a = np.asarray(a)
    if order is None:
        order = a.ndim
    if not 1 <= i < j <= order or order > a.ndim:
        raise IndexError(f"invalid transposition T{i}{j} for tensor of order {order}")
    offset = a.ndim - order
    return np.swapaxes(a, offset + i - 1, offset + j - 1)


def symmetrize_minor(d: np.ndarray) -> np.ndarray:
    """Return ``(D + D^T34) / 2`` for (batched) fourth-order tensors."""
    d = np.asarray(d)
    return 0.5 * (d + transpose(d, 3, 4, order=4))


def sym2(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    return 0.5 * (x + np.swapaxes(x, -1, -2))


def identity2(dim: int) -> np.ndarray:
    return np.eye(dim)


def identity_sym(dim: int) -> np.ndarray:
    """Symmetric fourth-order identity ``(d_ik d_jl + d_il d_jk) / 2``."""
    eye = np.eye(dim)
    return 0.5 * (np.einsum("ik,jl->ijkl", eye, eye) + np.einsum("il,jk->ijkl", eye, eye))


def identity_vol(dim: int) -> np.ndarray:
    """Volumetric projector ``1 (x) 1 / 3``.

    The divisor is 3 in two dimensions as well; with this convention the
    isotropic elastic tensors keep the same coefficients in 2D and 3D.
    """
    eye = np.eye(dim)
    return np.einsum("ij,kl->ijkl", eye, eye) / 3.0


def ddot42(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Double contraction ``A : X`` of a fourth- and second-order tensor."""
    return np.einsum("...ijkl,...kl->...ij", a, x)


def ddot44(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...ijmn,...mnkl->...ijkl", a, b)


def quad_form(eps: np.ndarray, d: np.ndarray, deps: np.ndarray) -> np.ndarray:
    """``eps : D : deps``."""
    return np.einsum("...ij,...ijkl,...kl->...", eps, d, deps)


def isotropic_coefficients(d: np.ndarray) -> tuple[float, float]:
    """Least-squares coefficients ``(a, b)`` of ``D ~ a*I + b*Ivol``."""
    d = np.asarray(d, dtype=float)
    dim = d.shape[0]
    basis = np.stack([identity_sym(dim).ravel(), identity_vol(dim).ravel()], axis=1)
    coef, *_ = np.linalg.lstsq(basis, d.ravel(), rcond=None)
    return float(coef[0]), float(coef[1])


# -- rotations ---------------------------------------------------------------

def rotation_2d(chi) -> np.ndarray:
    chi = np.asarray(chi, dtype=float)
    c, s = np.cos(chi), np.sin(chi)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


def _rot_y(a: np.ndarray) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    z, o = np.zeros_like(a), np.ones_like(a)
    return np.stack([np.stack([c, z, s], -1), np.stack([z, o, z], -1), np.stack([-s, z, c], -1)], -2)


def _rot_z(a: np.ndarray) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    z, o = np.zeros_like(a), np.ones_like(a)
    return np.stack([np.stack([c, -s, z], -1), np.stack([s, c, z], -1), np.stack([z, z, o], -1)], -2)


def rotation_3d(xi, zeta, theta, chi) -> np.ndarray:
    """Rotation taking the normal to the contact vector.

    ``rho = Rz(xi) Ry(zeta) Rz(theta) Ry(chi) Ry(zeta)^T Rz(xi)^T``
    """
    xi, zeta, theta, chi = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (xi, zeta, theta, chi)))
    frame = _rot_z(xi) @ _rot_y(zeta)
    inner = _rot_z(theta) @ _rot_y(chi)
    return frame @ inner @ np.swapaxes(frame, -1, -2)


def normal_2d(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    return np.stack([np.cos(xi), np.sin(xi)], -1)


def normal_3d(xi, zeta) -> np.ndarray:
    xi, zeta = np.broadcast_arrays(np.asarray(xi, dtype=float), np.asarray(zeta, dtype=float))
    return np.stack([np.cos(xi) * np.sin(zeta), np.sin(xi) * np.sin(zeta), np.cos(zeta)], -1)


# -- virtual-work tensors ------------------------------------------------------

def third_order_t(n: np.ndarray) -> np.ndarray:
    """``T = 3 n . (Ivol)^T13 - n (x) n (x) n``."""
    n = np.asarray(n, dtype=float)
    dim = n.shape[-1]
    ivol_t13 = transpose(identity_vol(dim), 1, 3)
    return 3.0 * np.einsum("...i,ijkl->...jkl", n, ivol_t13) - np.einsum("...i,...j,...k->...ijk", n, n, n)


def script_tensors(n: np.ndarray, rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-contact tensors ``(N, T)`` with ``eps:(N + alpha*T):deps`` the element work density.

    ``N = (rho . nu (x) nu . rho^T)^T12`` and ``T = rho . T3^T13 . T3 . rho^T``
    where ``nu = n (x) n`` and ``T3`` is :func:`third_order_t`.
    """
    n = np.asarray(n, dtype=float)
    rho = np.asarray(rho, dtype=float)
    nu = np.einsum("...i,...j->...ij", n, n)
    nunu = np.einsum("...ij,...kl->...ijkl", nu, nu)
    big_n = transpose(np.einsum("...im,...mjkn,...ln->...ijkl", rho, nunu, rho), 1, 2, order=4)
    t3 = third_order_t(n)
    t3t = transpose(t3, 1, 3, order=3)
    tt = np.einsum("...ijm,...mkl->...ijkl", t3t, t3)
    big_t = np.einsum("...im,...mjkn,...ln->...ijkl", rho, tt, rho)
    return big_n, big_t
