"""Metric definitions: phi(t, s) bodies, domain guards and the built-in catalog."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import dsl
from .errors import DomainError, FinslerError
from .jets import Jet2, jet_seed

__all__ = ["DomainGuard", "MetricDefn", "catalog", "lookup", "resolve_metric", "eval_phi", "from_expression"]

WRONA_DELTA = 1e-9


@dataclass(frozen=True)
class DomainGuard:
    """Open region of the (t, s) quadrant where phi may be evaluated.

    ``t_below`` encodes ``t < t_below`` and ``gap_above`` encodes ``t - s > gap_above``.
    """

    t_below: float | None = None
    gap_above: float | None = None

    def admits(self, t, s):
        ok = np.ones(np.shape(np.real(t)), dtype=bool)
        if self.t_below is not None:
            ok &= np.real(t) < self.t_below
        if self.gap_above is not None:
            ok &= np.real(t) - np.real(s) > self.gap_above
        return ok if ok.shape else bool(ok)

    def describe(self) -> str:
        parts = []
        if self.t_below is not None:
            parts.append(f"t < {self.t_below:.17g}")
        if self.gap_above is not None:
            parts.append(f"t - s > delta (delta = {self.gap_above:g})")
        return " and ".join(parts) if parts else "none"

    @property
    def unrestricted(self) -> bool:
        return self.t_below is None and self.gap_above is None


@dataclass(frozen=True)
class MetricDefn:
    """A U(n)-invariant metric F = sqrt(r phi(t, s)).

    ``sample_t_max`` bounds t when drawing random test points; it is a testing
    convenience, not part of the domain.
    """

    name: str
    body: dsl.Expr
    guard: DomainGuard = field(default_factory=DomainGuard)
    normalization_note: str | None = None
    sample_t_max: float = 1.0
    text: str = ""

    def __post_init__(self):
        if not self.text:
            object.__setattr__(self, "text", dsl.to_text(self.body))

    def jet(self, t, s) -> Jet2:
        """phi and its partials at (t, s); checks the guard but not the Cauchy-Schwarz range."""
        if not np.all(self.guard.admits(t, s)):
            raise DomainError(
                f"metric {self.name!r}: point (t={_fmt(t)}, s={_fmt(s)}) violates the guard {self.guard.describe()}"
            )
        return dsl.evaluate(self.body, jet_seed("t", t, s), jet_seed("s", t, s))

    def value(self, t, s):
        return self.jet(t, s).value

    def scaled(self, factor: float, name: str | None = None, note: str | None = None) -> "MetricDefn":
        body = dsl.Binary("mul", dsl.Num(float(factor)), self.body)
        return MetricDefn(
            name=name or self.name,
            body=body,
            guard=self.guard,
            normalization_note=note,
            sample_t_max=self.sample_t_max,
        )


def _fmt(x):
    x = np.asarray(x)
    return f"{x.item():.6g}" if x.size == 1 else f"<array {x.shape}>"


def eval_phi(metric: MetricDefn, t, s, *, check_range: bool = True) -> Jet2:
    """Full second-order jet of phi at (t, s).

    With ``check_range`` the point must satisfy 0 <= s <= t (up to rounding).
    Raises :class:`DomainError` outside the guard and when phi is not positive.
    """
    if check_range:
        tr, sr = np.real(t), np.real(s)
        slack = 1e-12 * np.maximum(1.0, np.abs(tr))
        if np.any(sr < -slack) or np.any(sr > tr + slack):
            raise DomainError(f"(t={_fmt(t)}, s={_fmt(s)}) is outside 0 <= s <= t")
    j = metric.jet(t, s)
    if not np.all(np.real(j.value) > 0):
        raise DomainError(f"metric {metric.name!r}: phi is not positive at (t={_fmt(t)}, s={_fmt(s)})")
    return j


def from_expression(text: str, name: str | None = None, guard: DomainGuard | None = None, **kw) -> MetricDefn:
    body = dsl.parse_metric(text)
    return MetricDefn(name=name or text, body=body, guard=guard or DomainGuard(), text=text, **kw)


_BALL = DomainGuard(t_below=1.0)

# name, phi text, guard, sampling bound on t
_ENTRIES = [
    ("euclidean", "1", DomainGuard(), 2.0),
    ("hermitian", "1 + s", DomainGuard(), 2.0),
    ("convex_ball", "(1+s)^2", _BALL, 0.95),
    ("nonconvex_ball", "4 - s^2", DomainGuard(t_below=math.sqrt(3.0)), math.sqrt(3.0) * 0.999),
    ("berwald_neg", "(1-t+s)^2/(1-t)^3", _BALL, 0.95),
    ("berwald_pos", "(1+t-s)^2/(1+t)^3", DomainGuard(), 0.95),
    ("flat_exp", "exp(s-t)", DomainGuard(), 2.0),
    ("flat_quad", "1 + (s-t) + (s-t)^2", DomainGuard(), 2.0),
    ("wrona", "1/(t-s)", DomainGuard(gap_above=WRONA_DELTA), 2.0),
    ("bergman", "1/(1-t) + s/(1-t)^2", _BALL, 0.95),
]


def _note(metric: MetricDefn) -> str:
    # the formula itself, so ball metrics report their boundary value at (1, 0)
    try:
        v = float(dsl.evaluate(metric.body, jet_seed("t", 1.0, 0.0), jet_seed("s", 1.0, 0.0)).value)
    except FinslerError:
        return "phi(1,0) unbounded (pole on the unit sphere); the sphere-length experiment does not apply"
    if not math.isfinite(v) or v <= 0:
        return f"phi(1,0) = {v!r}; the sphere-length experiment does not apply"
    return "normalized: phi(1,0) = 1" if v == 1.0 else f"phi(1,0) = {v:.17g}; divide by it to normalize"


def _build_catalog():
    out = {}
    for name, text, guard, t_max in _ENTRIES:
        m = MetricDefn(name=name, body=dsl.parse_metric(text), guard=guard, sample_t_max=t_max, text=text)
        note = _note(m)
        out[name] = MetricDefn(
            name=name, body=m.body, guard=guard, normalization_note=note, sample_t_max=t_max, text=text
        )
    return out


_CATALOG = _build_catalog()


def catalog() -> list[MetricDefn]:
    return list(_CATALOG.values())


def lookup(name: str) -> MetricDefn:
    try:
        return _CATALOG[name]
    except KeyError:
        raise KeyError(f"no catalog metric named {name!r}; known: {', '.join(_CATALOG)}") from None


def resolve_metric(spec: str) -> MetricDefn:
    """Catalog name if it matches one, else parse ``spec`` as a phi expression.

    An expression whose syntax tree equals a catalog body resolves to that
    catalog entry, so it inherits the entry's guard.
    """
    key = spec.strip()
    if key in _CATALOG:
        return _CATALOG[key]
    parsed = from_expression(key)
    for entry in _CATALOG.values():
        if entry.body == parsed.body:
            return entry
    return parsed
