"""Complex/real coordinates, the invariants (r, t, s) and their derivatives.

Conventions: ``<z, v> = sum z^a conj(v^a)`` (linear in the first slot);
``z^a = x^a + i x^(a+n)`` so a complex n-vector maps to the real 2n-vector
``[Re z, Im z]``; ``J`` acts by ``(Jx)^a = x^(a+n)``, ``(Jx)^(a+n) = -x^a``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroDirection

__all__ = [
    "PointDirection", "SDerivatives", "scalar_invariants", "realify", "complexify",
    "apply_J", "j_matrix", "s_derivative_suite", "s_alpha", "random_unitary",
    "realify_matrix", "point_from_ts", "cinner",
]

ZERO_DIRECTION_THRESHOLD = 1e-300


def cinner(z, v) -> complex:
    """<z, v> = sum z^a conj(v^a)."""
    return complex(np.vdot(v, z))


def scalar_invariants(z, v) -> tuple[float, float, float]:
    """(r, t, s) = (|v|^2, |z|^2, |<z,v>|^2 / |v|^2)."""
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    r = float(np.vdot(v, v).real)
    if not r >= ZERO_DIRECTION_THRESHOLD:
        raise ZeroDirection("the direction v is zero")
    t = float(np.vdot(z, z).real)
    zv = cinner(z, v)
    s = (zv.real * zv.real + zv.imag * zv.imag) / r
    return r, t, min(s, t)


def realify(z, v=None):
    """Map complex vectors to their real images ``[Re, Im]``; returns x or (x, u)."""
    x = np.concatenate([np.real(z), np.imag(z)]).astype(float)
    if v is None:
        return x
    return x, np.concatenate([np.real(v), np.imag(v)]).astype(float)


def complexify(x, u=None):
    """Inverse of :func:`realify`."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0] // 2
    z = x[:n] + 1j * x[n:]
    if u is None:
        return z
    u = np.asarray(u, dtype=float)
    return z, u[:n] + 1j * u[n:]


def apply_J(w):
    w = np.asarray(w)
    n = w.shape[-1] // 2
    return np.concatenate([w[..., n:], -w[..., :n]], axis=-1)


def j_matrix(n: int) -> np.ndarray:
    """Matrix of J on R^(2n): ``j_matrix(n) @ w == apply_J(w)``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def realify_matrix(A) -> np.ndarray:
    """Real 2n x 2n matrix acting on ``realify(z)`` as ``A`` acts on z."""
    A = np.asarray(A, dtype=complex)
    return np.block([[A.real, -A.imag], [A.imag, A.real]])


@dataclass(frozen=True)
class PointDirection:
    """A base point z and a non-zero direction v, with their derived data."""

    z: np.ndarray
    v: np.ndarray
    x: np.ndarray
    u: np.ndarray
    r: float
    t: float
    s: float

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @classmethod
    def from_complex(cls, z, v) -> "PointDirection":
        z = np.array(z, dtype=complex).reshape(-1)
        v = np.array(v, dtype=complex).reshape(-1)
        if z.shape != v.shape:
            raise ValueError(f"z and v must have the same length, got {z.shape[0]} and {v.shape[0]}")
        r, t, s = scalar_invariants(z, v)
        x, u = realify(z, v)
        return cls(z, v, x, u, r, t, s)

    @classmethod
    def from_real(cls, x, u) -> "PointDirection":
        z, v = complexify(x, u)
        return cls.from_complex(z, v)

    @property
    def zv(self) -> complex:
        return cinner(self.z, self.v)


def point_from_ts(t: float, s: float, n: int = 2) -> PointDirection:
    """A canonical (z, v) with prescribed invariants and |v| = 1.

    ``z = (sqrt t, 0, ...)`` and ``v = (sqrt(s/t), sqrt(1 - s/t), 0, ...)``; by
    U(n)-invariance every other representative gives the same results.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if t < 0 or s < 0 or s > t * (1 + 1e-15):
        raise ValueError(f"need 0 <= s <= t, got t={t!r}, s={s!r}")
    z = np.zeros(n, dtype=complex)
    v = np.zeros(n, dtype=complex)
    z[0] = np.sqrt(t)
    ratio = min(s / t, 1.0) if t > 0 else 0.0
    if n == 1:
        if t > 0 and ratio < 1.0:
            raise ValueError("with n = 1 every direction is parallel to z, so s must equal t")
        v[0] = 1.0
        return PointDirection.from_complex(z, v)
    v[0] = np.sqrt(ratio)
    v[1] = np.sqrt(1.0 - ratio)
    return PointDirection.from_complex(z, v)


@dataclass(frozen=True)
class SDerivatives:
    """Closed-form real derivatives of s (and t) at a point.

    ``s_i = ds/du^i``, ``s_semicolon_i = ds/dx^i``, ``t_semicolon_i = dt/dx^i``,
    ``s_ij = d2s/du^i du^j`` and ``s_i_semicolon_j = d2s/du^i dx^j``.
    """

    s_i: np.ndarray
    s_semicolon_i: np.ndarray
    t_semicolon_i: np.ndarray
    s_ij: np.ndarray
    s_i_semicolon_j: np.ndarray


def _real_pairings(p: PointDirection):
    Jx = apply_J(p.x)
    Ju = apply_J(p.u)
    return Jx, Ju, float(p.u @ p.x), float(p.u @ Jx)


def s_derivative_suite(p: PointDirection) -> SDerivatives:
    x, u, r, s = p.x, p.u, p.r, p.s
    Jx, Ju, ux, uJx = _real_pairings(p)
    m = x.shape[0]
    s_i = (2.0 / r) * (ux * x + uJx * Jx - s * u)
    s_semi = (2.0 / r) * (ux * u - uJx * Ju)
    t_semi = 2.0 * x
    s_ij = (2.0 / r) * (np.outer(x, x) + np.outer(Jx, Jx) - np.outer(s_i, u) - np.outer(u, s_i) - s * np.eye(m))
    # d(Ju)^j / du^i = J[j, i]
    Jm = j_matrix(m // 2)
    s_i_semi_j = (
        -(4.0 / r**2) * np.outer(u, ux * u - uJx * Ju)
        + (2.0 / r) * (np.outer(x, u) + ux * np.eye(m) - np.outer(Jx, Ju) - uJx * Jm.T)
    )
    return SDerivatives(s_i, s_semi, t_semi, s_ij, s_i_semi_j)


def s_alpha(p: PointDirection) -> np.ndarray:
    """Wirtinger derivative ds/dv^a = (<z,v> conj(z^a) - s conj(v^a)) / r."""
    return (p.zv * np.conj(p.z) - p.s * np.conj(p.v)) / p.r


def random_unitary(n: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a complex Gaussian matrix."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, rr = np.linalg.qr(g)
    d = np.diag(rr)
    return q * (d / np.abs(d))
