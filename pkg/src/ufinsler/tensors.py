"""Fundamental tensors, their spectra and the convexity verdicts.

Shorthand used throughout::

    c0      = phi - s phi_s
    c0t     = c0 + t phi_s            (= phi + (t - s) phi_s)
    k1      = c0 c0t +   s (t - s) phi phi_ss
    k_tilde = c0 c0t + 2 s (t - s) phi phi_ss

F is strongly pseudoconvex iff k1 > 0 (n = 2) or c0 > 0 and k1 > 0 (n >= 3),
and strongly convex iff c0 > 0, c0t > 0 and k_tilde > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._accel import njit, pick
from .errors import FinslerError, InternalInconsistency, SingularTensor
from .geometry import PointDirection, apply_J, s_alpha, s_derivative_suite
from .jets import Jet2
from .metrics import MetricDefn, eval_phi

STRICT_EPS = 1e-12
SINGULAR_TOL = 1e-12

__all__ = [
    "Coefficients", "ConvexityReport", "TensorPair", "SweepTable",
    "coefficients", "phi_at", "levi_matrix", "real_fundamental_tensor",
    "inverse_fundamental_tensor", "tensor_pair", "eigen_spectra",
    "pseudoconvexity_check", "convexity_check", "region_sweep", "classify",
]


@dataclass(frozen=True)
class Coefficients:
    """phi, its partials and the scalar combinations built from them at one (t, s)."""

    t: float
    s: float
    phi: float
    phi_t: float
    phi_s: float
    phi_tt: float
    phi_ts: float
    phi_ss: float
    c0: float
    c0t: float
    k1: float
    k_tilde: float

    @property
    def L(self):
        return self.c0t * self.k_tilde


def coefficients(j: Jet2, t, s) -> Coefficients:
    phi, ps, pss = j.value, j.ds, j.dss
    c0 = phi - s * ps
    c0t = c0 + t * ps
    w = s * (t - s) * phi * pss
    return Coefficients(t, s, phi, j.dt, ps, j.dtt, j.dts, pss, c0, c0t, c0 * c0t + w, c0 * c0t + 2.0 * w)


def phi_at(metric: MetricDefn, p: PointDirection) -> Coefficients:
    return coefficients(eval_phi(metric, p.t, p.s), p.t, p.s)


def classify(value, scale, eps=STRICT_EPS):
    """Tri-state test of ``value > 0``: True, False, or None when inside the marginal band."""
    band = eps * scale
    if value > band:
        return True
    if value <= -band:
        return False
    return None


def _stable_quadratic_roots(trace, det):
    """Roots of lambda^2 - trace*lambda + det for a real-rooted quadratic."""
    disc = trace * trace - 4.0 * det
    if disc < 0.0:
        if disc < -1e-10 * max(1.0, trace * trace, abs(det)):
            raise InternalInconsistency(
                f"characteristic quadratic has complex roots (discriminant {disc:.3e}); "
                "a symmetric matrix cannot have them"
            )
        disc = 0.0
    b = -trace
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    if q == 0.0:
        return (0.0, 0.0)
    return (q, det / q)


# -- matrices ----------------------------------------------------------------
def levi_matrix(metric: MetricDefn, p: PointDirection, co: Coefficients | None = None) -> np.ndarray:
    """Complex Hessian G_{a bbar} = c0 I + r phi_ss s_a conj(s_b) + phi_s conj(z^a) z^b."""
    co = co or phi_at(metric, p)
    sa = s_alpha(p)
    zb = np.conj(p.z)
    return (
        co.c0 * np.eye(p.n, dtype=complex)
        + p.r * co.phi_ss * np.outer(sa, np.conj(sa))
        + co.phi_s * np.outer(zb, p.z)
    )


def real_fundamental_tensor(metric: MetricDefn, p: PointDirection, co: Coefficients | None = None) -> np.ndarray:
    """g_ij = c0 delta_ij + r phi_ss s_i s_j / 2 + phi_s (x^i x^j + Jx^i Jx^j)."""
    co = co or phi_at(metric, p)
    sd = s_derivative_suite(p)
    Jx = apply_J(p.x)
    m = p.x.shape[0]
    return (
        co.c0 * np.eye(m)
        + 0.5 * p.r * co.phi_ss * np.outer(sd.s_i, sd.s_i)
        + co.phi_s * (np.outer(p.x, p.x) + np.outer(Jx, Jx))
    )


def _x_vector(p: PointDirection, co: Coefficients, s_i) -> np.ndarray:
    return co.phi * s_i - 2.0 * co.s * (co.t - co.s) * co.phi_s * p.u / p.r


def inverse_fundamental_tensor(metric: MetricDefn, p: PointDirection, co: Coefficients | None = None) -> np.ndarray:
    """Closed-form g^{jk} (a rank-3 update of c0^{-1} I)."""
    co = co or phi_at(metric, p)
    return _inverse_closed(p, co)[0]


def _inverse_closed(p: PointDirection, co: Coefficients):
    L = co.L
    for label, val in (("c0", co.c0), ("c0 + t phi_s", co.c0t), ("L", L)):
        if abs(val) < SINGULAR_TOL:
            raise SingularTensor(f"{label} = {val:.3e} vanishes; the real fundamental tensor is not invertible")
    sd = s_derivative_suite(p)
    X = _x_vector(p, co, sd.s_i)
    Jx = apply_J(p.x)
    m = p.x.shape[0]
    ginv = (
        np.eye(m)
        - (p.r * co.phi_ss / (2.0 * L)) * np.outer(X, X)
        - (co.phi_s / co.c0t) * (np.outer(p.x, p.x) + np.outer(Jx, Jx))
    ) / co.c0
    return ginv, L, X


@dataclass(frozen=True)
class TensorPair:
    levi: np.ndarray
    real_metric: np.ndarray
    real_inverse: np.ndarray
    L: float
    X_vec: np.ndarray


def tensor_pair(metric: MetricDefn, p: PointDirection) -> TensorPair:
    co = phi_at(metric, p)
    ginv, L, X = _inverse_closed(p, co)
    return TensorPair(levi_matrix(metric, p, co), real_fundamental_tensor(metric, p, co), ginv, L, X)


# -- spectra and verdicts ----------------------------------------------------
def _spectra(co: Coefficients, n: int):
    if n < 2:
        raise ValueError("closed-form spectra need n >= 2")
    w = co.s * (co.t - co.s)
    cplx = [co.c0] * (n - 2) + list(
        _stable_quadratic_roots(2.0 * co.c0 + co.t * co.phi_s + w * co.phi_ss, co.k1)
    )
    real = [co.c0] * (2 * n - 3) + [co.c0t] + list(
        _stable_quadratic_roots(2.0 * co.c0 + co.t * co.phi_s + 2.0 * w * co.phi_ss, co.k_tilde)
    )
    return np.sort(np.array(cplx, dtype=float)), np.sort(np.array(real, dtype=float))


def eigen_spectra(metric: MetricDefn, p: PointDirection, n: int | None = None):
    """(complex Levi spectrum, real tensor spectrum) from the characteristic-polynomial factorization."""
    n = _resolve_n(p, n)
    return _spectra(phi_at(metric, p), n)


def _resolve_n(p: PointDirection, n):
    if n is None:
        return p.n
    if n != p.n:
        raise ValueError(f"n = {n} does not match the point's dimension {p.n}")
    return n


@dataclass(frozen=True)
class ConvexityReport:
    n: int
    t: float
    s: float
    phi: float
    c0: float
    k1: float
    k_tilde: float
    c0_plus_t_phis: float
    complex_eigen: np.ndarray
    real_eigen: np.ndarray
    pseudoconvex: bool
    convex: bool
    marginal: bool


def _verdicts(c0, c0t, k1, kt, phi, n, eps=STRICT_EPS):
    scale = max(1.0, phi * phi)
    c_c0, c_c0t, c_k1, c_kt = (classify(v, scale, eps) for v in (c0, c0t, k1, kt))
    pseudo_terms = [c_k1] if n == 2 else [c_c0, c_k1]
    convex_terms = [c_c0, c_c0t, c_kt]
    pseudo = all(c is True for c in pseudo_terms)
    convex = all(c is True for c in convex_terms)
    marginal = any(c is None for c in pseudo_terms + convex_terms)
    return pseudo, convex, marginal


def report_from_coefficients(co: Coefficients, n: int, eps=STRICT_EPS) -> ConvexityReport:
    cplx, real = _spectra(co, n)
    pseudo, convex, marginal = _verdicts(co.c0, co.c0t, co.k1, co.k_tilde, co.phi, n, eps)
    return ConvexityReport(
        n=n, t=co.t, s=co.s, phi=co.phi, c0=co.c0, k1=co.k1, k_tilde=co.k_tilde,
        c0_plus_t_phis=co.c0t, complex_eigen=cplx, real_eigen=real,
        pseudoconvex=pseudo, convex=convex, marginal=marginal,
    )


def pseudoconvexity_check(metric: MetricDefn, p: PointDirection, n: int | None = None, eps=STRICT_EPS) -> ConvexityReport:
    """Report whose ``pseudoconvex`` field is the Levi-matrix positivity verdict."""
    return report_from_coefficients(phi_at(metric, p), _resolve_n(p, n), eps)


def convexity_check(metric: MetricDefn, p: PointDirection, n: int | None = None, eps=STRICT_EPS) -> ConvexityReport:
    """Report whose ``convex`` field is the real-tensor positivity verdict."""
    return report_from_coefficients(phi_at(metric, p), _resolve_n(p, n), eps)


# -- grid sweep --------------------------------------------------------------
def _combos_loops(phi, phis, phiss, t, s, c0, c0t, k1, kt):
    for i in range(phi.shape[0]):
        a = phi[i] - s[i] * phis[i]
        b = a + t[i] * phis[i]
        w = s[i] * (t[i] - s[i]) * phi[i] * phiss[i]
        c0[i] = a
        c0t[i] = b
        k1[i] = a * b + w
        kt[i] = a * b + 2.0 * w


_combos_numba = njit(_combos_loops)


def convexity_combos_numba(phi, phis, phiss, t, s):
    out = [np.empty_like(phi) for _ in range(4)]
    _combos_numba(phi, phis, phiss, t, s, *out)
    return tuple(out)


def convexity_combos_numpy(phi, phis, phiss, t, s):
    c0 = phi - s * phis
    c0t = c0 + t * phis
    w = s * (t - s) * phi * phiss
    return c0, c0t, c0 * c0t + w, c0 * c0t + 2.0 * w


convexity_combos = pick(convexity_combos_numba, convexity_combos_numpy)


@dataclass
class SweepTable:
    """Row-major (t outer, s inner) grid restricted to s <= t."""

    t: np.ndarray
    s: np.ndarray
    c0: np.ndarray
    k1: np.ndarray
    ktilde: np.ndarray
    pseudoconvex: np.ndarray
    convex: np.ndarray
    excluded: np.ndarray

    HEADER = "t,s,c0,k1,ktilde,pseudoconvex,convex,excluded"

    def __len__(self):
        return self.t.shape[0]

    def to_csv(self) -> str:
        lines = [self.HEADER]
        for i in range(len(self)):
            lines.append(",".join([
                _g17(self.t[i]), _g17(self.s[i]), _g17(self.c0[i]), _g17(self.k1[i]), _g17(self.ktilde[i]),
                str(int(self.pseudoconvex[i])), str(int(self.convex[i])), str(int(self.excluded[i])),
            ]))
        return "\n".join(lines) + "\n"


def _g17(x) -> str:
    return format(float(x), ".17g")


def _eval_cells(metric: MetricDefn, t, s):
    """Vectorized phi jets; falls back to per-cell evaluation if some cells raise."""
    try:
        j = eval_phi(metric, t, s)
        return np.asarray(j.value, float), np.asarray(j.ds, float), np.asarray(j.dss, float), np.ones(t.shape, bool)
    except FinslerError:
        pass
    vals = np.full((3, t.shape[0]), np.nan)
    ok = np.zeros(t.shape[0], bool)
    for i in range(t.shape[0]):
        try:
            jj = eval_phi(metric, float(t[i]), float(s[i]))
        except FinslerError:
            continue
        vals[:, i] = (jj.value, jj.ds, jj.dss)
        ok[i] = True
    return vals[0], vals[1], vals[2], ok


def region_sweep(metric: MetricDefn, t_range, s_range, grid_n: int, n: int = 3, eps=STRICT_EPS) -> SweepTable:
    """Verdicts on a ``grid_n x grid_n`` grid (endpoints included), keeping cells with s <= t.

    Cells outside the metric's guard stay in the table with ``excluded`` set
    and NaN coefficients.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    ts = np.linspace(float(t_range[0]), float(t_range[1]), grid_n)
    ss = np.linspace(float(s_range[0]), float(s_range[1]), grid_n)
    T, S = np.meshgrid(ts, ss, indexing="ij")
    keep = S <= T
    t, s = T[keep], S[keep]
    inside = np.asarray(metric.guard.admits(t, s), dtype=bool) & (t >= 0) & (s >= 0)
    size = t.shape[0]
    c0 = np.full(size, np.nan)
    c0t = np.full(size, np.nan)
    k1 = np.full(size, np.nan)
    kt = np.full(size, np.nan)
    excluded = ~inside
    if inside.any():
        ti, si = t[inside], s[inside]
        phi, phis, phiss, ok = _eval_cells(metric, ti, si)
        sub = convexity_combos(
            np.ascontiguousarray(np.where(ok, phi, 1.0)), np.ascontiguousarray(np.where(ok, phis, 0.0)),
            np.ascontiguousarray(np.where(ok, phiss, 0.0)), ti, si,
        )
        idx = np.flatnonzero(inside)
        for dst, src in zip((c0, c0t, k1, kt), sub):
            dst[idx] = np.where(ok, src, np.nan)
        excluded[idx[~ok]] = True
        phi_full = np.full(size, np.nan)
        phi_full[idx] = phi
    else:
        phi_full = np.full(size, np.nan)
    with np.errstate(invalid="ignore"):
        band = eps * np.maximum(1.0, phi_full * phi_full)
        c0_pos, c0t_pos, k1_pos, kt_pos = (v > band for v in (c0, c0t, k1, kt))
    pseudo = k1_pos if n == 2 else (c0_pos & k1_pos)
    convex = c0_pos & c0t_pos & kt_pos
    return SweepTable(t, s, c0, k1, kt, pseudo & ~excluded, convex & ~excluded, excluded)
