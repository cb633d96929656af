"""Real geodesic sprays, geodesic integration, Berwald residuals and the sphere-length experiment."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg
from ._accel import njit, pick
from .errors import (
    DomainError, FinslerError, IntegrationAbort, InternalInconsistency, SingularTensor, UnboundedAtPole,
)
from .geometry import PointDirection, apply_J
from .metrics import MetricDefn, eval_phi
from .tensors import SINGULAR_TOL, Coefficients, _inverse_closed, _verdicts, coefficients, phi_at, real_fundamental_tensor

__all__ = [
    "SprayCoefficients", "GeodesicTrace", "SphereLengthExperiment", "BerwaldResidual",
    "c_coefficients", "spray_coefficients", "spray_direct", "spray_finite_difference",
    "integrate_geodesic", "berwald_residual", "polygonal_length", "normalize_metric",
]


def c_coefficients(co: Coefficients):
    """The four scalar spray coefficients (c1, c2, c3, c4) at one (t, s).

    Works on complex inputs too, which :func:`berwald_residual` uses for
    complex-step differentiation in s.
    """
    t, s = co.t, co.s
    phi, pt, ps, pts, pss = co.phi, co.phi_t, co.phi_s, co.phi_ts, co.phi_ss
    c0, c0t, kt = co.c0, co.c0t, co.k_tilde
    for label, val in (("c0", c0), ("c0 + t phi_s", c0t), ("k_tilde", kt)):
        if abs(val) < SINGULAR_TOL:
            raise SingularTensor(f"{label} = {abs(val):.3e} vanishes; spray coefficients are singular")
    L = c0t * kt
    a = s * ps * (pt + ps) - phi * (pt - ps)
    c1 = (c0 * c0t * (phi * (pts + pss) - ps * (pt + ps)) - (t - s) * phi * pss * a) / (L * c0)
    c2 = a / (2.0 * c0 * c0t)
    c3 = (c0t * (pt - s * pts) + s * pss * ((t - s) * pt - phi)) / kt
    c4 = ps / c0
    return c1, c2, c3, c4


@dataclass(frozen=True)
class SprayCoefficients:
    c1: float
    c2: float
    c3: float
    c4: float
    G: np.ndarray


def _assemble(p: PointDirection, c1, c2, c3, c4) -> np.ndarray:
    x, u = p.x, p.u
    Jx, Ju = apply_J(x), apply_J(u)
    xu = float(x @ u)
    uJx = float(u @ Jx)
    return (c1 * xu * xu + p.r * c2) * x + c1 * xu * uJx * Jx + c3 * xu * u + c4 * uJx * Ju


def spray_coefficients(metric: MetricDefn, p: PointDirection) -> SprayCoefficients:
    """Closed-form real spray G^i assembled from c1..c4."""
    cs = c_coefficients(phi_at(metric, p))
    return SprayCoefficients(*cs, G=_assemble(p, *cs))


def _euler_lagrange_vector(p: PointDirection, co: Coefficients) -> np.ndarray:
    """G_{l;k} u^k - G_{;l} in the expanded form where s-derivatives are eliminated."""
    x, u = p.x, p.u
    Jx, Ju = apply_J(x), apply_J(u)
    xu = float(x @ u)
    uJx = float(u @ Jx)
    mix = co.phi_ts + co.phi_ss
    return (
        4.0 * (co.phi_t - co.s * mix) * xu * u
        + 4.0 * co.phi_s * uJx * Ju
        + 2.0 * (co.phi_s - co.phi_t) * p.r * x
        + 4.0 * mix * (xu * xu * x + xu * uJx * Jx)
    )


def spray_direct(metric: MetricDefn, p: PointDirection) -> np.ndarray:
    """G^i = g^{il} (G_{l;k} u^k - G_{;l}) / 4 with the closed-form inverse tensor."""
    co = phi_at(metric, p)
    ginv = _inverse_closed(p, co)[0]
    return 0.25 * ginv @ _euler_lagrange_vector(p, co)


def _energy_batch(metric: MetricDefn, X: np.ndarray, U: np.ndarray) -> np.ndarray:
    """G = F^2 = r phi(t, s) at each row of the real arrays X, U."""
    n = X.shape[1] // 2
    z = X[:, :n] + 1j * X[:, n:]
    v = U[:, :n] + 1j * U[:, n:]
    r = np.sum(np.abs(v) ** 2, axis=1)
    t = np.sum(np.abs(z) ** 2, axis=1)
    s = np.minimum(np.abs(np.sum(z * np.conj(v), axis=1)) ** 2 / r, t)
    return r * np.asarray(eval_phi(metric, t, s, check_range=False).value, dtype=float)


_STENCIL_W = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
_STENCIL_K = np.array([-2.0, -1.0, 1.0, 2.0])


def spray_finite_difference(metric: MetricDefn, p: PointDirection, h: float = 1e-4) -> np.ndarray:
    """Spray from finite differences of G = r phi alone, inverted by Gauss-Jordan.

    G_{l;k} u^k is a fourth-order central difference along x + e u of the
    fourth-order u-gradient, and G_{;l} a fourth-order x-gradient; no analytic
    derivative of G enters.
    """
    x, u = p.x, p.u
    m = x.shape[0]
    eye = np.eye(m) * h
    # rows: (outer shift a along u in x) x (inner shift b along e_l in u)
    a = _STENCIL_K[:, None, None, None] * h * u
    b = _STENCIL_K[None, None, :, None] * eye[None, :, None, :]
    X = np.broadcast_to(x + a, (4, m, 4, m)).reshape(-1, m)
    U = np.broadcast_to(u + b, (4, m, 4, m)).reshape(-1, m)
    vals = _energy_batch(metric, X, U).reshape(4, m, 4)
    grad_u = vals @ _STENCIL_W / h  # (4, m)
    mixed = _STENCIL_W @ grad_u / h
    Xg = (x + _STENCIL_K[None, :, None] * eye[:, None, :]).reshape(-1, m)
    Ug = np.broadcast_to(u, Xg.shape)
    grad_x = _energy_batch(metric, Xg, Ug).reshape(m, 4) @ _STENCIL_W / h
    g = real_fundamental_tensor(metric, p)
    return 0.25 * linalg.gauss_jordan_inverse(g) @ (mixed - grad_x)


# -- geodesics ---------------------------------------------------------------
@dataclass
class GeodesicTrace:
    h: float
    tau: list = field(default_factory=list)
    x: list = field(default_factory=list)
    u: list = field(default_factory=list)
    F: list = field(default_factory=list)

    def append(self, tau, x, u, F):
        self.tau.append(float(tau))
        self.x.append(np.array(x, dtype=float))
        self.u.append(np.array(u, dtype=float))
        self.F.append(float(F))

    def __len__(self):
        return len(self.tau)

    def to_csv(self) -> str:
        m = self.x[0].shape[0] if self.x else 0
        head = ["tau"] + [f"x_{i + 1}" for i in range(m)] + [f"u_{i + 1}" for i in range(m)] + ["F"]
        lines = [",".join(head)]
        for k in range(len(self)):
            vals = [self.tau[k], *self.x[k], *self.u[k], self.F[k]]
            lines.append(",".join(format(float(v), ".17g") for v in vals))
        return "\n".join(lines) + "\n"


def _spray_checked(metric: MetricDefn, x, u, n: int):
    """Spray at (x, u) and F(x, u); raises DomainError unless the metric is convex there."""
    p = PointDirection.from_real(x, u)
    co = phi_at(metric, p)
    _, convex, _ = _verdicts(co.c0, co.c0t, co.k1, co.k_tilde, co.phi, n)
    if not convex:
        raise DomainError(f"metric {metric.name!r} is not strongly convex at t={p.t:.6g}, s={p.s:.6g}")
    return _assemble(p, *c_coefficients(co)), math.sqrt(p.r * co.phi)


def integrate_geodesic(metric: MetricDefn, x0, u0, h: float, steps: int) -> GeodesicTrace:
    """Fixed-step RK4 for x' = u, u' = -2 G(x, u).

    Raises :class:`IntegrationAbort` (carrying the partial trace) as soon as a
    stage leaves the guard or the convex region.
    """
    if not h > 0:
        raise ValueError("step h must be positive")
    x = np.array(x0, dtype=float)
    u = np.array(u0, dtype=float)
    if x.shape != u.shape or x.ndim != 1 or x.shape[0] % 2:
        raise ValueError("x0 and u0 must be real vectors of the same even length")
    n = x.shape[0] // 2
    trace = GeodesicTrace(h=h)

    def accel(xx, uu):
        G, _ = _spray_checked(metric, xx, uu, n)
        return -2.0 * G

    try:
        _, F0 = _spray_checked(metric, x, u, n)
    except FinslerError as exc:
        raise IntegrationAbort(f"cannot start geodesic: {exc}", trace) from exc
    trace.append(0.0, x, u, F0)
    for k in range(steps):
        try:
            a1 = accel(x, u)
            x2, u2 = x + 0.5 * h * u, u + 0.5 * h * a1
            a2 = accel(x2, u2)
            x3, u3 = x + 0.5 * h * u2, u + 0.5 * h * a2
            a3 = accel(x3, u3)
            x4, u4 = x + h * u3, u + h * a3
            a4 = accel(x4, u4)
            x = x + (h / 6.0) * (u + 2.0 * u2 + 2.0 * u3 + u4)
            u = u + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            _, F = _spray_checked(metric, x, u, n)
        except FinslerError as exc:
            raise IntegrationAbort(f"geodesic aborted at step {k + 1}: {exc}", trace) from exc
        trace.append((k + 1) * h, x, u, F)
    return trace


# -- Berwald residuals -------------------------------------------------------
FD_STEP = 1e-3
COMPLEX_STEP = 1e-20


@dataclass(frozen=True)
class BerwaldResidual:
    dc1_ds: float
    dc3_ds: float
    dc4_ds: float
    d2c2_ds2: float
    dc4_ds_analytic: float

    def max_abs(self) -> float:
        return max(abs(self.dc1_ds), abs(self.dc3_ds), abs(self.dc4_ds), abs(self.d2c2_ds2))


def _c_at(metric: MetricDefn, t, s):
    return c_coefficients(coefficients(eval_phi(metric, t, s, check_range=False), t, s))


def _ds_complex_step(metric, t, s):
    cs = _c_at(metric, t, s + 1j * COMPLEX_STEP)
    return np.array([c.imag / COMPLEX_STEP for c in cs])


def berwald_residual(metric: MetricDefn, p: PointDirection) -> BerwaldResidual:
    """s-derivatives of the spray coefficients at fixed t; all vanish for a real Berwald metric.

    First derivatives are complex-step derivatives (no subtractive cancellation);
    the second derivative of c2 is a five-point central difference, step
    ``FD_STEP``, of complex-step first derivatives. The stencil is exact when
    dc2/ds is cubic or lower in s, so Hermitian metrics give roundoff only.
    """
    co = phi_at(metric, p)
    if not _verdicts(co.c0, co.c0t, co.k1, co.k_tilde, co.phi, p.n)[1]:
        raise SingularTensor(f"metric {metric.name!r} is not strongly convex at t={p.t:.6g}, s={p.s:.6g}")
    t, s = p.t, p.s
    d1 = _ds_complex_step(metric, t, s)
    h = FD_STEP
    d = [_ds_complex_step(metric, t, s + k * h)[1] for k in (-2, -1, 1, 2)]
    d2c2 = (d[0] - 8.0 * d[1] + 8.0 * d[2] - d[3]) / (12.0 * h)
    return BerwaldResidual(
        dc1_ds=float(d1[0]), dc3_ds=float(d1[2]), dc4_ds=float(d1[3]), d2c2_ds2=float(d2c2),
        dc4_ds_analytic=float(co.phi * co.phi_ss / co.c0**2),
    )


# -- sphere experiment -------------------------------------------------------
@dataclass(frozen=True)
class SphereLengthExperiment:
    alpha: float
    m: int
    L_m_sum: float
    L_m_closed: float
    z: np.ndarray
    w: np.ndarray

    @property
    def L_m(self) -> float:
        return self.L_m_sum

    @property
    def abs_err_vs_alpha(self) -> float:
        return abs(self.L_m_sum - self.alpha)

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.alpha, "m": self.m, "L_m_sum": self.L_m_sum,
            "L_m_closed": self.L_m_closed, "abs_err_vs_alpha": self.abs_err_vs_alpha,
        }


def _on_closed_ball(metric: MetricDefn) -> MetricDefn:
    """Metric whose guard admits the unit sphere when its domain is the open unit ball.

    The sphere t = 1 is the boundary of a ``t < 1`` domain; phi is used there
    by continuity, and genuine poles still surface as evaluation errors.
    """
    g = metric.guard
    if g.t_below != 1.0:
        return metric
    return replace(metric, guard=replace(g, t_below=None))


def _phi_at_pole(metric: MetricDefn) -> float:
    try:
        val = float(eval_phi(_on_closed_ball(metric), 1.0, 0.0).value)
    except FinslerError as exc:
        raise UnboundedAtPole(f"phi(1,0) is not available for {metric.name!r}: {exc}") from exc
    if not math.isfinite(val) or val <= 0:
        raise UnboundedAtPole(f"phi(1,0) = {val!r} for {metric.name!r}")
    return val


def normalize_metric(metric: MetricDefn) -> MetricDefn:
    """Rescale phi so that phi(1, 0) = 1; convexity verdicts are unchanged by the scaling.

    For metrics on the open unit ball the value at the boundary point (1, 0)
    is taken by continuity; the guard of the result is unchanged.
    """
    val = _phi_at_pole(metric)
    if val == 1.0:
        return metric
    return metric.scaled(1.0 / val, name=f"{metric.name}/normalized",
                         note=f"normalized: phi scaled by 1/{val:.17g}")


def _chord_terms_loops(zr, zi, wr, wi, alpha, m, r_out, t_out, s_out):
    n = zr.shape[0]
    for i in range(m):
        a = alpha * i / m
        b = alpha * (i + 1) / m
        ca, sa, cb, sb = math.cos(a), math.sin(a), math.cos(b), math.sin(b)
        r = 0.0
        t = 0.0
        ipr = 0.0
        ipi = 0.0
        for k in range(n):
            gr = zr[k] * ca + wr[k] * sa
            gi = zi[k] * ca + wi[k] * sa
            dr = zr[k] * cb + wr[k] * sb - gr
            di = zi[k] * cb + wi[k] * sb - gi
            r += dr * dr + di * di
            t += gr * gr + gi * gi
            # <gamma, delta> = gamma * conj(delta)
            ipr += gr * dr + gi * di
            ipi += gi * dr - gr * di
        r_out[i] = r
        t_out[i] = t
        s_out[i] = (ipr * ipr + ipi * ipi) / r


_chord_terms_numba = njit(_chord_terms_loops)


def chord_invariants_numba(z, w, alpha, m):
    out = [np.empty(m) for _ in range(3)]
    _chord_terms_numba(z.real.copy(), z.imag.copy(), w.real.copy(), w.imag.copy(), float(alpha), int(m), *out)
    return tuple(out)


def chord_invariants_numpy(z, w, alpha, m):
    tau = alpha * np.arange(m + 1) / m
    gamma = np.outer(np.cos(tau), z) + np.outer(np.sin(tau), w)
    delta = gamma[1:] - gamma[:-1]
    g = gamma[:-1]
    r = np.sum(np.abs(delta) ** 2, axis=1)
    t = np.sum(np.abs(g) ** 2, axis=1)
    ip = np.sum(g * np.conj(delta), axis=1)
    return r, t, np.abs(ip) ** 2 / r


chord_invariants = pick(chord_invariants_numba, chord_invariants_numpy)


def polygonal_length(metric: MetricDefn, alpha: float, m: int, n: int = 2, unitary=None) -> SphereLengthExperiment:
    """Polygonal length of the great circle z cos(tau) + w sin(tau), 0 <= tau <= alpha.

    ``z = e1`` and ``w = e2`` (optionally rotated by ``unitary``). The sum of
    F over the ``m`` chords is computed literally and compared with the
    trigonometric closed form ``2 m sin(alpha/2m) sqrt(phi(1, sin^2(alpha/2m)))``.
    """
    if not 0 < alpha < math.pi / 2:
        raise ValueError("alpha must lie in (0, pi/2)")
    if m < 1 or n < 2:
        raise ValueError("need m >= 1 and n >= 2")
    _phi_at_pole(metric)
    metric = _on_closed_ball(metric)
    z = np.zeros(n, dtype=complex)
    w = np.zeros(n, dtype=complex)
    z[0] = 1.0
    w[1] = 1.0
    if unitary is not None:
        z, w = unitary @ z, unitary @ w
    r, t, s = chord_invariants(z, w, alpha, m)
    phi = np.asarray(eval_phi(metric, t, s, check_range=False).value, dtype=float)
    terms = np.sqrt(r * phi)
    total = math.fsum(terms)
    half = math.sin(alpha / (2 * m))
    closed = 2.0 * m * half * math.sqrt(float(eval_phi(metric, 1.0, half * half).value))
    if abs(total - closed) > 1e-10 * max(1.0, abs(closed)):
        raise InternalInconsistency(f"polygonal sum {total!r} disagrees with closed form {closed!r}")
    return SphereLengthExperiment(float(alpha), int(m), total, closed, z, w)
