"""Pauli tensor-product embedding of JSpin_d into real symmetric matrices.

For ``d >= 2`` the basis vectors map to

    S(1)   = 1 (x) 1 (x) ... (x) 1
    S(v_k) = s3 (x) ... (x) s3 (x) s1 (x) 1 (x) ... (x) 1     (k-1 copies of s3)
    S(v_d) = s3 (x) ... (x) s3

acting on ``R^(2^(d-1))``; ``d = 1`` uses ``diag(s + v, s - v)``.  The
matrix trace of ``S(1)`` is ``2^(d-1)`` while the algebra trace of the unit is
2, so traces differ by :func:`trace_scale`.  Everything here is a brute-force
check on :mod:`spinfactor.algebra`, not used by it.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np

from .algebra import SpinElement
from .errors import DimensionMismatchError, ResourceError

D_MAX = 12

_S1 = np.array([[0.0, 1.0], [1.0, 0.0]])
_S3 = np.array([[1.0, 0.0], [0.0, -1.0]])
_I2 = np.eye(2)


def _kron_all(factors):
    out = np.ones((1, 1))
    for f in factors:
        out = np.kron(out, f)
    return out


@lru_cache(maxsize=None)
def pauli_basis(d: int) -> np.ndarray:
    """Stack of ``S(v_1), ..., S(v_d)``; shape ``(d, n, n)``.  Read-only."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if d > D_MAX:
        raise ResourceError(f"d={d} exceeds d_max={D_MAX} (matrices of size 2^{d - 1})")
    if d == 1:
        mats = [np.diag([1.0, -1.0])]
    else:
        m = d - 1
        mats = []
        for k in range(1, d):
            mats.append(_kron_all([_S3] * (k - 1) + [_S1] + [_I2] * (m - k)))
        mats.append(_kron_all([_S3] * m))
    out = np.stack(mats)
    out.flags.writeable = False
    return out


def matrix_size(d: int) -> int:
    return 2 if d == 1 else 2 ** (d - 1)


def trace_scale(d: int) -> float:
    """``matrix_trace(S(x)) / trace(x)``: ``2^(d-2)`` for ``d >= 2``, 1 for ``d = 1``."""
    return 1.0 if d == 1 else 2.0 ** (d - 2)


def embed(x: SpinElement, d_max: int = D_MAX) -> np.ndarray:
    if x.d > d_max:
        raise ResourceError(f"d={x.d} exceeds d_max={d_max}")
    basis = pauli_basis(x.d)
    n = basis.shape[1]
    return x.s * np.eye(n) + np.tensordot(x.v, basis, axes=1)


def retract(m: np.ndarray, d: int) -> SpinElement:
    """Orthogonal projection (trace inner product) onto ``S(JSpin_d)`` followed by ``S^-1``.

    The basis matrices are mutually orthogonal with squared norm ``n``, so the
    coordinates are plain trace pairings divided by ``n``.
    """
    m = np.asarray(m, dtype=float)
    n = matrix_size(d)
    if m.shape != (n, n):
        raise DimensionMismatchError(f"expected a {n}x{n} matrix for d={d}, got {m.shape}")
    basis = pauli_basis(d)
    v = np.tensordot(basis, m, axes=([1, 2], [0, 1])) / n
    return SpinElement(v, np.trace(m) / n)


def jordan(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return 0.5 * (a @ b + b @ a)


def oracle_function(f: Callable, x: SpinElement) -> SpinElement:
    """Matrix functional calculus ``U f(w) U^T`` on ``embed(x)``, pulled back by :func:`retract`."""
    w, u = np.linalg.eigh(embed(x))
    fw = np.array([f(t) for t in w], dtype=float)
    return retract((u * fw) @ u.T, x.d)


def oracle_bullet(x: SpinElement, y: SpinElement) -> SpinElement:
    return retract(jordan(embed(x), embed(y)), x.d)


def oracle_quadratic_rep(a: SpinElement, x: SpinElement) -> SpinElement:
    sa = embed(a)
    return retract(sa @ embed(x) @ sa, x.d)


def oracle_trace(x: SpinElement) -> float:
    """Algebra trace recovered from the matrix trace."""
    return float(np.trace(embed(x))) / trace_scale(x.d)


def oracle_trace_inner(x: SpinElement, y: SpinElement) -> float:
    return float(np.sum(embed(x) * embed(y))) / trace_scale(x.d)
