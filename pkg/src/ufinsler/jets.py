"""Second-order forward-mode jets in the two invariants (t, s).

A :class:`Jet2` carries a value together with every partial derivative up to
order two. Fields may be python scalars (real or complex) or numpy arrays of a
common shape, so a whole grid of points can be pushed through the arithmetic at
once. Complex fields are allowed so that callers can take complex-step
derivatives of quantities built from jets.
"""

from __future__ import annotations

import numbers

import numpy as np

from .errors import EvalError

__all__ = ["Jet2", "jet_seed", "jet_const", "jet_arith", "exp", "log", "sqrt", "power"]

_FIELDS = ("value", "dt", "ds", "dtt", "dts", "dss")


def _re(x):
    return np.real(x)


class Jet2:
    """Value and partials ``(f, f_t, f_s, f_tt, f_ts, f_ss)`` of a function of (t, s)."""

    __slots__ = _FIELDS
    __array_priority__ = 1000  # make ndarray <op> Jet2 defer to our reflected ops

    def __init__(self, value, dt=0.0, ds=0.0, dtt=0.0, dts=0.0, dss=0.0):
        self.value = value
        self.dt = dt
        self.ds = ds
        self.dtt = dtt
        self.dts = dts
        self.dss = dss

    @classmethod
    def lift(cls, other) -> "Jet2":
        if isinstance(other, Jet2):
            return other
        if isinstance(other, (numbers.Number, np.ndarray, np.generic)):
            zero = 0.0 * other
            return cls(other, zero, zero, zero, zero, zero)
        return NotImplemented

    def as_tuple(self):
        return tuple(getattr(self, f) for f in _FIELDS)

    def __repr__(self):
        body = ", ".join(f"{f}={getattr(self, f)!r}" for f in _FIELDS)
        return f"Jet2({body})"

    # -- composition with a scalar function f, given f(a), f'(a), f''(a) -------
    def _compose(self, f0, f1, f2) -> "Jet2":
        a = self
        return Jet2(
            f0,
            f1 * a.dt,
            f1 * a.ds,
            f2 * a.dt * a.dt + f1 * a.dtt,
            f2 * a.dt * a.ds + f1 * a.dts,
            f2 * a.ds * a.ds + f1 * a.dss,
        )

    # -- arithmetic ----------------------------------------------------------
    def __neg__(self):
        return Jet2(-self.value, -self.dt, -self.ds, -self.dtt, -self.dts, -self.dss)

    def __pos__(self):
        return self

    def __add__(self, other):
        b = Jet2.lift(other)
        if b is NotImplemented:
            return NotImplemented
        return Jet2(*(x + y for x, y in zip(self.as_tuple(), b.as_tuple())))

    __radd__ = __add__

    def __sub__(self, other):
        b = Jet2.lift(other)
        if b is NotImplemented:
            return NotImplemented
        return Jet2(*(x - y for x, y in zip(self.as_tuple(), b.as_tuple())))

    def __rsub__(self, other):
        b = Jet2.lift(other)
        if b is NotImplemented:
            return NotImplemented
        return b - self

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            if isinstance(other, (numbers.Number, np.ndarray, np.generic)):
                return Jet2(*(x * other for x in self.as_tuple()))
            return NotImplemented
        a, b = self, other
        return Jet2(
            a.value * b.value,
            a.dt * b.value + a.value * b.dt,
            a.ds * b.value + a.value * b.ds,
            a.dtt * b.value + 2.0 * a.dt * b.dt + a.value * b.dtt,
            a.dts * b.value + a.dt * b.ds + a.ds * b.dt + a.value * b.dts,
            a.dss * b.value + 2.0 * a.ds * b.ds + a.value * b.dss,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        v = self.value
        if np.any(v == 0):
            raise EvalError("division by zero in jet arithmetic")
        inv = 1.0 / v
        return self._compose(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            if isinstance(other, (numbers.Number, np.ndarray, np.generic)):
                if np.any(other == 0):
                    raise EvalError("division by zero in jet arithmetic")
                return Jet2(*(x / other for x in self.as_tuple()))
            return NotImplemented
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        b = Jet2.lift(other)
        if b is NotImplemented:
            return NotImplemented
        return b * self.reciprocal()

    def __pow__(self, exponent):
        return power(self, exponent)

    def __rpow__(self, base):
        b = Jet2.lift(base)
        if b is NotImplemented:
            return NotImplemented
        return power(b, self)


def jet_seed(which, t0, s0) -> Jet2:
    """Jet of the coordinate function ``t`` or ``s`` at the point (t0, s0)."""
    one = 1.0 + 0.0 * t0 + 0.0 * s0
    zero = 0.0 * one
    if which == "t":
        return Jet2(t0 + zero, one, zero, zero, zero, zero)
    if which == "s":
        return Jet2(s0 + zero, zero, one, zero, zero, zero)
    raise ValueError(f"unknown jet variable {which!r}; expected 't' or 's'")


def jet_const(c, like=None) -> Jet2:
    if like is not None:
        c = c + 0.0 * like
    return Jet2.lift(c)


def exp(a) -> Jet2:
    a = Jet2.lift(a)
    e = np.exp(a.value)
    return a._compose(e, e, e)


def log(a) -> Jet2:
    a = Jet2.lift(a)
    if np.any(_re(a.value) <= 0):
        raise EvalError("log of a non-positive value")
    inv = 1.0 / a.value
    return a._compose(np.log(a.value), inv, -inv * inv)


def sqrt(a) -> Jet2:
    a = Jet2.lift(a)
    if np.any(_re(a.value) <= 0):
        raise EvalError("sqrt of a non-positive value")
    r = np.sqrt(a.value)
    return a._compose(r, 0.5 / r, -0.25 / (r * a.value))


def _is_integral(p) -> bool:
    return isinstance(p, numbers.Integral) and not isinstance(p, bool)


def _int_power(a: Jet2, k: int) -> Jet2:
    if k == 0:
        return jet_const(1.0, like=a.value)
    if k < 0:
        return _int_power(a, -k).reciprocal()
    result = None
    base = a
    while k:
        if k & 1:
            result = base if result is None else result * base
        k >>= 1
        if k:
            base = base * base
    return result


def power(a, b) -> Jet2:
    """``a ** b``.

    Python ints are exponentiated by repeated multiplication, which is exact for
    negative bases. Any other exponent (float or jet) goes through exp(b log a)
    and therefore needs a positive base.
    """
    a = Jet2.lift(a)
    if _is_integral(b):
        return _int_power(a, int(b))
    if isinstance(b, Jet2):
        return exp(b * log(a))
    if np.any(_re(a.value) <= 0):
        raise EvalError("fractional power of a non-positive base")
    p = b
    v = a.value
    return a._compose(v ** p, p * v ** (p - 1), p * (p - 1) * v ** (p - 2))


_UNARY = {"neg": lambda a: -a, "exp": exp, "log": log, "sqrt": sqrt}
_BINARY = {
    "add": lambda a, b: Jet2.lift(a) + b,
    "sub": lambda a, b: Jet2.lift(a) - b,
    "mul": lambda a, b: Jet2.lift(a) * b,
    "div": lambda a, b: Jet2.lift(a) / b,
    "pow": power,
}


def jet_arith(op, a, b=None) -> Jet2:
    """Apply a named operation to jets; unary ops ignore ``b``."""
    if op in _UNARY:
        return _UNARY[op](Jet2.lift(a))
    if op in _BINARY:
        if b is None:
            raise ValueError(f"operation {op!r} needs a second operand")
        return _BINARY[op](a, b)
    raise ValueError(f"unknown jet operation {op!r}")
