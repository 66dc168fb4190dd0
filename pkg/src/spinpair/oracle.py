"""Brute-force linear algebra for small dense matrices.

This module is the independent reference the closed forms are checked
against. The default backend is hand-written (scaling-and-squaring Taylor
exponential, cyclic Jacobi eigensolver) so it shares no code path with the
analytic propagators. A LAPACK-backed implementation from scipy can be
selected with ``backend="scipy"`` or the ``SPINPAIR_ORACLE`` environment
variable; tests cross-check the two.
"""
from __future__ import annotations

import math
import os
from typing import NamedTuple

import numpy as np

MAX_ORDER = 8
_TAYLOR_DEGREE = 18
_SCALE_TARGET = 0.5


class NotSymmetric(ValueError):
    pass


class Eigh(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def _check_square(m: np.ndarray) -> None:
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {m.shape}")
    n = m.shape[-1]
    if not 1 <= n <= MAX_ORDER:
        raise ValueError(f"matrix order must be in 1..{MAX_ORDER}, got {n}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")


def _backend(backend: str | None) -> str:
    name = backend or os.environ.get("SPINPAIR_ORACLE", "native")
    if name not in ("native", "scipy"):
        raise ValueError(f"unknown oracle backend {name!r}")
    return name


# ---------------------------------------------------------------- exponential

def _expm_native(a: np.ndarray) -> np.ndarray:
    norm = np.max(np.sum(np.abs(a), axis=-2))  # 1-norm, worst over the batch
    s = 0
    if norm > _SCALE_TARGET:
        s = int(math.ceil(math.log2(norm / _SCALE_TARGET)))
    a = a / (2.0**s)
    eye = np.broadcast_to(np.eye(a.shape[-1], dtype=a.dtype), a.shape)
    # Horner form of the truncated Taylor series
    out = eye.copy()
    for k in range(_TAYLOR_DEGREE, 0, -1):
        out = eye + (a @ out) / k
    for _ in range(s):
        out = out @ out
    return out


def expm(m, t=1.0, backend: str | None = None) -> np.ndarray:
    """exp(m * t) for an (..., n, n) array with n <= 8.

    Raises OverflowError if the result is not representable.
    """
    m = np.asarray(m)
    _check_square(m)
    a = m * t
    if not np.all(np.isfinite(a)):
        raise OverflowError("m * t is not finite")
    if _backend(backend) == "scipy":
        from scipy.linalg import expm as sp_expm

        out = sp_expm(a)
    else:
        with np.errstate(over="ignore", invalid="ignore"):
            out = _expm_native(a)
    if not np.all(np.isfinite(out)):
        raise OverflowError("matrix exponential overflowed")
    return out


# ------------------------------------------------------------ eigensolver

def _jacobi(m: np.ndarray, tol: float = 1e-15, max_sweeps: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi on a batch of real symmetric matrices."""
    a = np.array(m, dtype=float, copy=True)
    n = a.shape[-1]
    v = np.broadcast_to(np.eye(n), a.shape).copy()
    scale = np.sqrt(np.sum(a * a, axis=(-2, -1)))
    scale = np.where(scale == 0, 1.0, scale)
    offmask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum((a * a)[..., offmask], axis=-1))
        if np.all(off <= tol * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[..., p, q]
                app = a[..., p, p]
                aqq = a[..., q, q]
                active = np.abs(apq) > 1e-300
                safe_apq = np.where(active, apq, 1.0)
                theta = (aqq - app) / (2.0 * safe_apq)
                t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(theta == 0, 1.0, t)
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                c_, s_ = c[..., None], s[..., None]
                # rotate columns p, q
                ap = a[..., :, p].copy()
                aq = a[..., :, q].copy()
                a[..., :, p] = c_ * ap - s_ * aq
                a[..., :, q] = s_ * ap + c_ * aq
                # rotate rows p, q
                ap = a[..., p, :].copy()
                aq = a[..., q, :].copy()
                a[..., p, :] = c_ * ap - s_ * aq
                a[..., q, :] = s_ * ap + c_ * aq
                vp = v[..., :, p].copy()
                vq = v[..., :, q].copy()
                v[..., :, p] = c_ * vp - s_ * vq
                v[..., :, q] = s_ * vp + c_ * vq
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return np.diagonal(a, axis1=-2, axis2=-1).copy(), v


def eig_symmetric(m, backend: str | None = None, sym_tol: float = 1e-12) -> Eigh:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns).

    Accepts a single matrix or a stack of shape (..., n, n).
    """
    m = np.asarray(m)
    _check_square(m)
    if np.iscomplexobj(m):
        if np.max(np.abs(m.imag), initial=0.0) > 0:
            raise NotSymmetric("matrix is not real")
        m = m.real
    m = m.astype(float)
    scale = np.max(np.abs(m), axis=(-2, -1), keepdims=True)
    asym = np.abs(m - np.swapaxes(m, -1, -2))
    if np.any(asym > sym_tol * np.maximum(scale, 1e-300)):
        raise NotSymmetric("matrix is not symmetric within tolerance")
    if _backend(backend) == "scipy":
        w, v = np.linalg.eigh(m)
        return Eigh(w, v)
    w, v = _jacobi(m)
    order = np.argsort(w, axis=-1)
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[..., None, :], axis=-1)
    return Eigh(w, v)


def spectral_projectors(m, clusters, backend: str | None = None) -> list[np.ndarray]:
    """Orthogonal projectors onto groups of eigenvectors of a symmetric matrix.

    Each eigenvector is assigned to the nearest value in ``clusters``; ties go
    to the earliest entry, so coincident targets collect the whole eigenspace.
    """
    w, v = eig_symmetric(m, backend=backend)
    targets = np.asarray(clusters, dtype=float)
    projectors = [np.zeros((w.size, w.size)) for _ in targets]
    for k in range(w.size):
        j = int(np.argmin(np.abs(targets - w[k])))
        projectors[j] += np.outer(v[:, k], v[:, k])
    return projectors


def propagate(generator, vector, t, backend: str | None = None) -> np.ndarray:
    """exp(generator * t) @ vector."""
    return expm(generator, t, backend=backend) @ np.asarray(vector)
