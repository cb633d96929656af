"""Complex geodesic spray, holomorphic sectional curvature and weakly-Berwald residuals.

Extra shorthand on top of :mod:`ufinsler.tensors`::

    k4 = [c0t + s (t - s) phi_ss] (phi_t + phi_s) - s c0t (phi_st + phi_ss)
    k5 = phi (phi_st + phi_ss) - phi_s (phi_t + phi_s)
    k2 = k4 / k1,  k3 = k5 / k1

and the complex spray is ``2 G^a = k2 conj<z,v> v^a + k3 conj<z,v>^2 z^a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, SingularTensor
from .geometry import PointDirection, cinner, point_from_ts, s_alpha
from .metrics import MetricDefn, eval_phi
from .tensors import Coefficients, _verdicts, coefficients, phi_at

__all__ = [
    "CurvatureReport", "complex_spray", "holomorphic_curvature", "curvature_oracle",
    "origin_curvature", "weakly_berwald_residual", "WeaklyBerwaldResidual", "k_coefficients",
    "curvature_table",
]

WIRTINGER_STEP = 1e-5
ORIGIN_TOL = 1e-300


@dataclass(frozen=True)
class CurvatureReport:
    K_F: float
    k1: float
    k2: float
    k3: float
    k4: float
    k5: float
    at_origin: bool


def k_coefficients(co: Coefficients):
    """(k1, k2, k3, k4, k5); raises SingularTensor when k1 is negligible against phi^2."""
    t, s = co.t, co.s
    mix = co.phi_ts + co.phi_ss
    tot = co.phi_t + co.phi_s
    k1 = co.k1
    k4 = (co.c0t + s * (t - s) * co.phi_ss) * tot - s * co.c0t * mix
    k5 = co.phi * mix - co.phi_s * tot
    if abs(k1) < 1e-12 * co.phi**2:
        raise SingularTensor(f"k1 = {k1:.3e} vanishes; the complex spray is singular")
    return k1, k4 / k1, k5 / k1, k4, k5


def _require_pseudoconvex(metric: MetricDefn, co: Coefficients, n: int):
    pc, _, _ = _verdicts(co.c0, co.c0t, co.k1, co.k_tilde, co.phi, n)
    if not pc:
        raise DomainError(
            f"metric {metric.name!r} is not strongly pseudoconvex at t={co.t:.6g}, s={co.s:.6g}"
        )


def _spray_from(co: Coefficients, z, v, zv):
    _, k2, k3, _, _ = k_coefficients(co)
    czv = np.conj(zv)
    return k2 * czv * v + k3 * czv * czv * z


def complex_spray(metric: MetricDefn, p: PointDirection) -> np.ndarray:
    """The complex vector 2G^a at (z, v)."""
    co = phi_at(metric, p)
    _require_pseudoconvex(metric, co, p.n)
    return _spray_from(co, p.z, p.v, p.zv)


def _kf(co: Coefficients) -> float:
    t, s = co.t, co.s
    phi, pt, ps = co.phi, co.phi_t, co.phi_s
    mix = co.phi_ts + co.phi_ss
    tot = pt + ps
    k1 = co.k1
    brace = (
        k1 * (s * (co.phi_tt + 2.0 * co.phi_ts + co.phi_ss) + tot)
        - s * s * (t - s) * phi * mix * mix
        + 2.0 * s * s * (t - s) * ps * mix * tot
        - s * (co.c0 + (t - s) * ps + s * (t - s) * co.phi_ss) * tot * tot
    )
    return -2.0 * brace / (phi * phi * k1) + 0.0


def holomorphic_curvature(metric: MetricDefn, p: PointDirection) -> CurvatureReport:
    """Holomorphic sectional curvature from the explicit (t, s) formula."""
    co = phi_at(metric, p)
    _require_pseudoconvex(metric, co, p.n)
    k1, k2, k3, k4, k5 = k_coefficients(co)
    return CurvatureReport(
        K_F=float(_kf(co)), k1=float(k1), k2=float(k2), k3=float(k3), k4=float(k4), k5=float(k5),
        at_origin=bool(p.t <= ORIGIN_TOL),
    )


def _spray_at(metric: MetricDefn, z, v):
    r = float(np.vdot(v, v).real)
    t = float(np.vdot(z, z).real)
    zv = cinner(z, v)
    s = min(abs(zv) ** 2 / r, t)
    co = coefficients(eval_phi(metric, t, s, check_range=False), t, s)
    return _spray_from(co, z, v, zv)


def curvature_oracle(metric: MetricDefn, p: PointDirection, h: float = WIRTINGER_STEP) -> float:
    """K_F from its definition: -2/G^2 * G_a * conj(v^b) d(2G^a)/d conj(z^b).

    The antiholomorphic base derivative is a Wirtinger central difference,
    (d/dRe + i d/dIm)/2, applied to the closed-form complex spray. The step
    is ``h`` times max(1, |z|).
    """
    co = phi_at(metric, p)
    _require_pseudoconvex(metric, co, p.n)
    z, v = p.z, p.v
    n = p.n
    step = h * max(1.0, float(np.linalg.norm(z)))
    contracted = np.zeros(n, dtype=complex)
    for b in range(n):
        e = np.zeros(n, dtype=complex)
        e[b] = step
        d_re = (_spray_at(metric, z + e, v) - _spray_at(metric, z - e, v)) / (2.0 * step)
        d_im = (_spray_at(metric, z + 1j * e, v) - _spray_at(metric, z - 1j * e, v)) / (2.0 * step)
        contracted += np.conj(v[b]) * 0.5 * (d_re + 1j * d_im)
    G = p.r * co.phi
    G_a = np.conj(v) * co.phi + p.r * co.phi_s * s_alpha(p)
    val = -2.0 / (G * G) * np.sum(G_a * contracted)
    return float(val.real)


def origin_curvature(metric: MetricDefn) -> float:
    """The constant -2 (phi_t + phi_s) / phi^2 at t = s = 0."""
    j = eval_phi(metric, 0.0, 0.0)
    return float(-2.0 * (j.dt + j.ds) / j.value**2) + 0.0


@dataclass(frozen=True)
class WeaklyBerwaldResidual:
    residual: float
    g: float
    fitted: bool


def weakly_berwald_residual(
    metric: MetricDefn, p: PointDirection, g_of_t: Callable[[float], float] | None = None
) -> WeaklyBerwaldResidual:
    """Residual of phi(phi_st + phi_ss) - phi_s(phi_t + phi_s) = g(t) k1 at one point.

    Without ``g_of_t`` the scalar g is fitted at the point, so the residual is
    zero there by construction; the operational test is to reuse that g at
    other s with the same t.
    """
    co = phi_at(metric, p)
    _require_pseudoconvex(metric, co, p.n)
    k1, _, _, _, k5 = k_coefficients(co)
    if g_of_t is None:
        g = k5 / k1
        return WeaklyBerwaldResidual(residual=float(k5 - g * k1), g=float(g), fitted=True)
    g = float(g_of_t(p.t))
    return WeaklyBerwaldResidual(residual=float(k5 - g * k1), g=g, fitted=False)


CURVATURE_HEADER = "t,s,K_F,k1,k4,k5"


def curvature_table(metric: MetricDefn, points, n: int = 2) -> str:
    """CSV rows ``t,s,K_F,k1,k4,k5`` for a sequence of (t, s) pairs."""
    lines = [CURVATURE_HEADER]
    for t, s in points:
        rep = holomorphic_curvature(metric, point_from_ts(t, s, n))
        lines.append(",".join(format(float(x), ".17g") for x in (t, s, rep.K_F, rep.k1, rep.k4, rep.k5)))
    return "\n".join(lines) + "\n"
