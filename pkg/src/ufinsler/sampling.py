"""Seeded random (z, v) pairs inside a metric's domain, for experiments and tests."""

from __future__ import annotations

import numpy as np

from .errors import FinslerError
from .geometry import PointDirection
from .metrics import MetricDefn
from .tensors import phi_at, _verdicts

__all__ = ["random_pair", "random_points"]

REQUIRE = (None, "pseudoconvex", "convex")


def random_pair(rng: np.random.Generator, n: int, t_max: float):
    """Gaussian directions with |z|^2 uniform on [0, t_max) and |v| = 1."""
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    z *= np.sqrt(rng.uniform(0.0, t_max)) / np.linalg.norm(z)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z, v / np.linalg.norm(v)


def random_points(
    metric: MetricDefn,
    count: int,
    n: int,
    seed=None,
    *,
    require: str | None = None,
    t_max: float | None = None,
    max_tries: int = 200,
) -> list[PointDirection]:
    """``count`` points in the guard (and, if asked, in the pseudoconvex/convex region).

    Candidates are drawn with :func:`random_pair` and rejected until accepted;
    raises RuntimeError if acceptance is hopeless (more than ``max_tries``
    rejections per requested point).
    """
    if require not in REQUIRE:
        raise ValueError(f"require must be one of {REQUIRE}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    t_max = metric.sample_t_max if t_max is None else t_max
    out: list[PointDirection] = []
    budget = max_tries * max(count, 1)
    while len(out) < count:
        if budget == 0:
            raise RuntimeError(f"could not sample {count} {require or 'valid'} points for {metric.name!r}")
        budget -= 1
        p = PointDirection.from_complex(*random_pair(rng, n, t_max))
        try:
            co = phi_at(metric, p)
        except FinslerError:
            continue
        if require is not None:
            pseudo, convex, _ = _verdicts(co.c0, co.c0t, co.k1, co.k_tilde, co.phi, n)
            if not (pseudo if require == "pseudoconvex" else convex):
                continue
        out.append(p)
    return out
