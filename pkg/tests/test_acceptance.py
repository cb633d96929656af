"""The thirteen acceptance criteria, one test each, at their stated tolerances."""

import math

import numpy as np
import pytest

from ufinsler import linalg
from ufinsler.curvature import curvature_oracle, holomorphic_curvature, origin_curvature
from ufinsler.dynamics import (
    berwald_residual, integrate_geodesic, normalize_metric, polygonal_length, spray_coefficients,
    spray_direct, spray_finite_difference,
)
from ufinsler.errors import UnboundedAtPole
from ufinsler.geometry import PointDirection, apply_J, point_from_ts, random_unitary, s_derivative_suite
from ufinsler.metrics import catalog, eval_phi, lookup
from ufinsler.sampling import random_pair, random_points
from ufinsler.tensors import (
    convexity_check, eigen_spectra, inverse_fundamental_tensor, levi_matrix,
    real_fundamental_tensor, region_sweep,
)

CATALOG = catalog()
HERMITIAN = ("euclidean", "hermitian", "bergman")  # phi_ss vanishes identically
FLAT = ("flat_exp", "flat_quad")


def _spread(values):
    return max(values) - min(values)


def test_c01_inverse_tensor_exact(criterion):
    worst = 0.0
    for k, metric in enumerate(CATALOG):
        for n in (2, 3, 4):
            for p in random_points(metric, 34 if n < 4 else 32, n, seed=100 + 10 * k + n, require="convex"):
                g = real_fundamental_tensor(metric, p)
                ginv = inverse_fundamental_tensor(metric, p)
                worst = max(worst, float(np.max(np.abs(g @ ginv - np.eye(2 * n)))))
    criterion(1, worst < 1e-9, f"max |g g^-1 - I| = {worst:.2e} over 100 convex points per metric (< 1e-9)")


def test_c02_spectra_match_jacobi(criterion):
    worst = 0.0
    for k, metric in enumerate(CATALOG):
        rng = np.random.default_rng(200 + k)
        for i in range(100):
            n = (2, 3, 4)[i % 3]
            p = random_points(metric, 1, n, seed=rng)[0]
            cplx, real = eigen_spectra(metric, p)
            oc = linalg.jacobi_eigvalsh_hermitian(levi_matrix(metric, p))
            orl = linalg.jacobi_eigvalsh(real_fundamental_tensor(metric, p))
            worst = max(worst, linalg.multiset_distance(cplx, oc), linalg.multiset_distance(real, orl))
    criterion(2, worst < 1e-8, f"max multiset distance = {worst:.2e} over 100 points per metric (< 1e-8)")


def test_c03_verdict_equals_positive_definiteness(criterion):
    compared = disagreements = 0
    rng = np.random.default_rng(300)
    for metric in CATALOG:
        for i in range(110):
            n = (2, 3, 4)[i % 3]
            p = random_points(metric, 1, n, seed=rng)[0]
            rep = convexity_check(metric, p)
            if rep.marginal:
                continue
            eig = linalg.jacobi_eigvalsh(real_fundamental_tensor(metric, p))
            scale = max(1.0, float(np.max(np.abs(eig))))
            if abs(eig[0]) < 1e-10 * scale:
                continue
            compared += 1
            disagreements += rep.convex != bool(eig[0] > 0)
    ok = compared >= 1000 and disagreements == 0
    criterion(3, ok, f"{disagreements} disagreements over {compared} samples (need 0 over >= 1000)")


def test_c04_nonconvex_ball_example(criterion):
    metric = lookup("nonconvex_ball")
    top = math.sqrt(3.0) * (1 - 1e-9)
    table = region_sweep(metric, (0.0, top), (0.0, top), 400, n=3)
    inside = ~table.excluded
    all_pseudo = bool(np.all(table.pseudoconvex[inside])) and int(inside.sum()) == len(table)
    t = math.sqrt(2.99)
    kt = convexity_check(metric, point_from_ts(t, t / 2, 3)).k_tilde
    expected = 16 + 2.99**2 / 16 - 6 * 2.99
    ok = all_pseudo and abs(kt - expected) < 1e-9 and expected == pytest.approx(-1.38124375, abs=1e-12)
    criterion(4, ok, f"{int(inside.sum())} grid cells all pseudoconvex={all_pseudo}; k~ = {kt:.12f} vs {expected:.8f}")


def test_c05_spray_three_way(criterion):
    w_direct = w_fd = 0.0
    for k, metric in enumerate(CATALOG):
        rng = np.random.default_rng(500 + k)
        for i in range(100):
            p = random_points(metric, 1, (2, 3)[i % 2], seed=rng, require="convex")[0]
            a = spray_coefficients(metric, p).G
            b = spray_direct(metric, p)
            c = spray_finite_difference(metric, p)
            scale = max(1.0, float(np.max(np.abs(b))))
            w_direct = max(w_direct, float(np.max(np.abs(a - b))) / scale)
            w_fd = max(w_fd, float(np.max(np.abs(c - b))) / scale)
    ok = w_direct < 1e-8 and w_fd < 1e-5
    criterion(5, ok, f"closed vs direct {w_direct:.2e} (< 1e-8); finite-difference vs direct {w_fd:.2e} (< 1e-5)")


def test_c06_berwald_rigidity(criterion):
    herm_worst = 0.0
    for k, name in enumerate(HERMITIAN):
        metric = lookup(name)
        for p in random_points(metric, 50, 2, seed=600 + k, require="convex"):
            herm_worst = max(herm_worst, berwald_residual(metric, p).max_abs())
    non_herm = {}
    for k, metric in enumerate(CATALOG):
        if metric.name in HERMITIAN:
            continue
        best = 0.0
        for p in random_points(metric, 50, 2, seed=650 + k, require="convex"):
            res = berwald_residual(metric, p)
            assert res.dc4_ds == pytest.approx(res.dc4_ds_analytic, rel=1e-8, abs=1e-10)
            best = max(best, abs(res.dc4_ds_analytic))
        non_herm[metric.name] = best
    hand = berwald_residual(lookup("convex_ball"), point_from_ts(0.5, 0.2)).dc4_ds
    ok = herm_worst < 1e-9 and all(v > 1e-2 for v in non_herm.values()) and abs(hand - 3.125) < 5e-4
    weakest = min(non_herm, key=non_herm.get)
    criterion(6, ok, f"Hermitian max residual {herm_worst:.2e} (< 1e-9); weakest non-Hermitian "
                     f"max|dc4/ds| {non_herm[weakest]:.3g} ({weakest}); (1+s)^2 at (0.5,0.2): {hand:.4f}")


def test_c07_curvature_dual_path(criterion):
    worst = 0.0
    for k, metric in enumerate(CATALOG):
        rng = np.random.default_rng(700 + k)
        for i in range(100):
            p = random_points(metric, 1, (2, 3)[i % 2], seed=rng, require="pseudoconvex")[0]
            a = holomorphic_curvature(metric, p).K_F
            b = curvature_oracle(metric, p)
            worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    criterion(7, worst < 1e-6, f"max relative error formula vs definitional oracle = {worst:.2e} (< 1e-6)")


def test_c08_curvature_constants(criterion):
    rng = np.random.default_rng(800)
    details = []
    ok = True
    for name, target in (("berwald_neg", -6.0), ("berwald_pos", 6.0)):
        metric = lookup(name)
        vals = []
        for _ in range(20):
            n = int(rng.integers(2, 5))
            v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            vals.append(holomorphic_curvature(metric, PointDirection.from_complex(np.zeros(n), v)).K_F)
        err = max(abs(x - target) for x in vals)
        ok &= err < 1e-12 and _spread(vals) < 1e-12 and abs(origin_curvature(metric) - target) < 1e-12
        details.append(f"{name} |K-({target:+.0f})| {err:.1e}")
    for k, name in enumerate(FLAT):
        metric = lookup(name)
        worst = max(abs(holomorphic_curvature(metric, p).K_F)
                    for p in random_points(metric, 100, 2, seed=850 + k, require="pseudoconvex"))
        ok &= worst < 1e-10
        details.append(f"{name} max|K| {worst:.1e}")
    criterion(8, ok, "; ".join(details))


def test_c09_interior_closed_form(criterion):
    metric = lookup("berwald_neg")
    worst = 0.0
    for p in random_points(metric, 100, 2, seed=900, require="pseudoconvex"):
        expected = -6 * (1 - p.t) / (1 - p.t + p.s)
        worst = max(worst, abs(holomorphic_curvature(metric, p).K_F - expected) / abs(expected))
    criterion(9, worst < 1e-10, f"max relative error vs -6(1-t)/(1-t+s) = {worst:.2e} (< 1e-10)")


def test_c10_sphere_length(criterion):
    covered, worst_alpha, worst_closed = [], 0.0, 0.0
    pole = []
    for metric in CATALOG:
        try:
            normalized = normalize_metric(metric)
        except UnboundedAtPole:
            pole.append(metric.name)
            continue
        covered.append(metric.name)
        for alpha in (math.pi / 6, math.pi / 4, math.pi / 3):
            exp = polygonal_length(normalized, alpha, 4096)
            worst_alpha = max(worst_alpha, exp.abs_err_vs_alpha)
            worst_closed = max(worst_closed, abs(exp.L_m_sum - exp.L_m_closed))
    with pytest.raises(UnboundedAtPole):
        normalize_metric(lookup("bergman"))
    ok = worst_alpha < 1e-5 and worst_closed < 1e-12 and sorted(pole) == ["bergman", "berwald_neg"]
    criterion(10, ok, f"{len(covered)} metrics: max|L_m - alpha| {worst_alpha:.2e} (< 1e-5), "
                      f"sum vs closed {worst_closed:.1e} (< 1e-12); pole: {', '.join(pole)}")


def test_c11_geodesic_energy(criterion):
    starts = {
        "hermitian": ([0.3, -0.2, 0.1, 0.4], [0.5, 0.2, -0.3, 0.1]),
        "convex_ball": ([0.2, 0.1, -0.1, 0.15], [0.3, -0.2, 0.25, 0.1]),
        "berwald_pos": ([0.4, 0.1, 0.2, -0.3], [0.2, 0.6, -0.1, 0.3]),
    }
    drifts = {}
    for name, (x0, u0) in starts.items():
        F = np.array(integrate_geodesic(lookup(name), x0, u0, 1e-3, 1000).F)
        drifts[name] = float(np.max(np.abs(F - F[0])) / F[0])
    x0, u0 = np.array([0.5, -1.0, 2.0, 0.25]), np.array([1.5, 0.5, -0.75, 2.0])
    tr = integrate_geodesic(lookup("euclidean"), x0, u0, 1e-3, 1000)
    line = max(float(np.max(np.abs(x - (x0 + tau * u0)))) for tau, x in zip(tr.tau, tr.x))
    ok = all(d < 1e-6 for d in drifts.values()) and line < 1e-12
    criterion(11, ok, f"max F drift {max(drifts.values()):.1e} (< 1e-6); euclidean line deviation {line:.1e} (< 1e-12)")


def test_c12_identity_suite(criterion):
    rng = np.random.default_rng(1200)
    worst = 0.0
    for i in range(200):
        n = (2, 3, 4)[i % 3]
        z, v = random_pair(rng, n, 2.0)
        v = v * rng.uniform(0.5, 2.0)
        p = PointDirection.from_complex(z, v)
        d = s_derivative_suite(p)
        x, u, r, t, s = p.x, p.u, p.r, p.t, p.s
        Jx = apply_J(x)
        checks = [
            d.s_i @ u,
            d.s_i @ x - (2 / r) * (t - s) * (u @ x),
            d.s_i @ Jx - (2 / r) * (t - s) * (u @ Jx),
            d.s_semicolon_i @ x - 2 * s,
            d.s_semicolon_i @ Jx,
            d.s_semicolon_i @ u - 2 * (x @ u),
            d.t_semicolon_i @ x - 2 * t,
            d.s_i @ d.s_semicolon_i,
            d.s_i @ d.s_i - 4 * s * (t - s) / r,
            np.max(np.abs(d.s_i_semicolon_j @ u - (2 * x - d.s_semicolon_i))),
        ]
        worst = max(worst, max(abs(float(c)) for c in checks))
    criterion(12, worst < 1e-10, f"ten contraction identities, max abs error {worst:.2e} over 200 points (< 1e-10)")


def test_c13_unitary_invariance(criterion):
    worst_F = worst_K = 0.0
    verdict_flips = 0
    for k, metric in enumerate(CATALOG):
        for j, p in enumerate(random_points(metric, 3, 3, seed=1300 + k, require="pseudoconvex")):
            F0 = math.sqrt(p.r * float(eval_phi(metric, p.t, p.s).value))
            rep0 = convexity_check(metric, p)
            K0 = holomorphic_curvature(metric, p).K_F
            for seed in range(20):
                A = random_unitary(3, seed=10_000 * k + 100 * j + seed)
                q = PointDirection.from_complex(A @ p.z, A @ p.v)
                F = math.sqrt(q.r * float(eval_phi(metric, q.t, q.s).value))
                rep = convexity_check(metric, q)
                K = holomorphic_curvature(metric, q).K_F
                worst_F = max(worst_F, abs(F - F0) / F0)
                worst_K = max(worst_K, abs(K - K0) / max(1.0, abs(K0)))
                verdict_flips += (rep.convex, rep.pseudoconvex) != (rep0.convex, rep0.pseudoconvex)
    ok = worst_F < 1e-10 and worst_K < 1e-10 and verdict_flips == 0
    criterion(13, ok, f"F {worst_F:.1e}, K_F {worst_K:.1e} (< 1e-10), {verdict_flips} verdict changes under 20 unitaries")
