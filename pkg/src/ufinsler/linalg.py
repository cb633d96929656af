"""In-repo dense linear algebra used as independent oracles.

Two kernels, each in a numba version (scalar loops) and a numpy version
(row/column slicing):

* cyclic Jacobi eigenvalues of real symmetric matrices;
* Gauss-Jordan inversion with partial pivoting.

The module-level names ``jacobi_eigvalsh`` / ``gauss_jordan_inverse`` dispatch
according to ``UFINSLER_DISABLE_NUMBA``; both implementations stay importable
for cross-checks and benchmarking.
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import njit, pick
from .errors import SingularTensor

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


# -- Jacobi ------------------------------------------------------------------
def _jacobi_loops(a, tol, max_sweeps):
    a = a.copy()
    m = a.shape[0]
    frob = 0.0
    for i in range(m):
        for j in range(m):
            frob += a[i, j] * a[i, j]
    frob = math.sqrt(frob)
    sweeps = 0
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(m):
            for j in range(i + 1, m):
                off += a[i, j] * a[i, j]
        if math.sqrt(2.0 * off) <= tol * frob:
            break
        sweeps += 1
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / abs(theta)  # theta^2 would overflow
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(m):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(m):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
    out = np.empty(m)
    for i in range(m):
        out[i] = a[i, i]
    return out, sweeps


_jacobi_numba = njit(_jacobi_loops)


@njit
def _jacobi_batch_numba(stack, tol, max_sweeps):
    k, m, _ = stack.shape
    out = np.empty((k, m))
    for b in range(k):
        vals, _ = _jacobi_numba(stack[b], tol, max_sweeps)
        out[b] = vals
    return out


def _jacobi_numpy(a, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    a = np.array(a, dtype=float)
    m = a.shape[0]
    frob = np.linalg.norm(a)
    iu = np.triu_indices(m, 1)
    sweeps = 0
    for _ in range(max_sweeps):
        if math.sqrt(2.0 * np.sum(a[iu] ** 2)) <= tol * frob:
            break
        sweeps += 1
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta  # theta^2 would overflow
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s], [-s, c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
    return np.diag(a).copy(), sweeps


def jacobi_eigvalsh_numba(a):
    return _jacobi_numba(np.ascontiguousarray(a, dtype=float), JACOBI_TOL, JACOBI_MAX_SWEEPS)[0]


def jacobi_eigvalsh_numpy(a):
    return _jacobi_numpy(a)[0]


def jacobi_eigvalsh_batch_numba(stack):
    return _jacobi_batch_numba(np.ascontiguousarray(stack, dtype=float), JACOBI_TOL, JACOBI_MAX_SWEEPS)


def jacobi_eigvalsh_batch_numpy(stack):
    return np.array([_jacobi_numpy(a)[0] for a in np.asarray(stack, dtype=float)])


def _check_symmetric(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-10 * scale:
        raise ValueError("matrix is not symmetric")
    return 0.5 * (a + a.T)


_jacobi_impl = pick(jacobi_eigvalsh_numba, jacobi_eigvalsh_numpy)
_jacobi_batch_impl = pick(jacobi_eigvalsh_batch_numba, jacobi_eigvalsh_batch_numpy)


def jacobi_eigvalsh(a) -> np.ndarray:
    """Eigenvalues (ascending) of a real symmetric matrix by cyclic Jacobi rotations."""
    return np.sort(_jacobi_impl(_check_symmetric(a)))


def jacobi_eigvalsh_batch(stack) -> np.ndarray:
    stack = np.asarray(stack, dtype=float)
    stack = 0.5 * (stack + np.swapaxes(stack, -1, -2))
    return np.sort(_jacobi_batch_impl(stack), axis=-1)


def hermitian_embedding(h) -> np.ndarray:
    """Real symmetric 2n x 2n matrix whose spectrum is that of ``h`` with every eigenvalue doubled."""
    h = np.asarray(h, dtype=complex)
    return np.block([[h.real, -h.imag], [h.imag, h.real]])


def jacobi_eigvalsh_hermitian(h) -> np.ndarray:
    """Eigenvalues (ascending) of a Hermitian matrix via the real embedding."""
    h = np.asarray(h, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    if np.max(np.abs(h - h.conj().T), initial=0.0) > 1e-10 * scale:
        raise ValueError("matrix is not Hermitian")
    h = 0.5 * (h + h.conj().T)
    return jacobi_eigvalsh(hermitian_embedding(h))[::2]


# -- Gauss-Jordan ------------------------------------------------------------
def _gauss_jordan_loops(a, tiny):
    m = a.shape[0]
    w = np.zeros((m, 2 * m))
    for i in range(m):
        for j in range(m):
            w[i, j] = a[i, j]
        w[i, m + i] = 1.0
    for col in range(m):
        piv = col
        best = abs(w[col, col])
        for r in range(col + 1, m):
            if abs(w[r, col]) > best:
                best = abs(w[r, col])
                piv = r
        if best <= tiny:
            return w[:, m:], False
        if piv != col:
            for j in range(2 * m):
                tmp = w[col, j]
                w[col, j] = w[piv, j]
                w[piv, j] = tmp
        d = w[col, col]
        for j in range(2 * m):
            w[col, j] /= d
        for r in range(m):
            if r != col:
                f = w[r, col]
                if f != 0.0:
                    for j in range(2 * m):
                        w[r, j] -= f * w[col, j]
    return w[:, m:].copy(), True


_gauss_jordan_numba = njit(_gauss_jordan_loops)


def _gauss_jordan_numpy(a, tiny):
    a = np.asarray(a, dtype=float)
    m = a.shape[0]
    w = np.hstack([a, np.eye(m)])
    for col in range(m):
        piv = col + int(np.argmax(np.abs(w[col:, col])))
        if abs(w[piv, col]) <= tiny:
            return w[:, m:], False
        if piv != col:
            w[[col, piv]] = w[[piv, col]]
        w[col] /= w[col, col]
        f = w[:, col].copy()
        f[col] = 0.0
        w -= np.outer(f, w[col])
    return w[:, m:].copy(), True


def gauss_jordan_inverse_numba(a):
    a = np.ascontiguousarray(a, dtype=float)
    return _finish_inverse(*_gauss_jordan_numba(a, _tiny(a)))


def gauss_jordan_inverse_numpy(a):
    a = np.asarray(a, dtype=float)
    return _finish_inverse(*_gauss_jordan_numpy(a, _tiny(a)))


def _tiny(a):
    return 1e-14 * max(1.0, float(np.max(np.abs(a)))) if a.size else 0.0


def _finish_inverse(inv, ok):
    if not ok:
        raise SingularTensor("matrix is numerically singular (Gauss-Jordan pivot below tolerance)")
    return inv


_gauss_jordan_impl = pick(gauss_jordan_inverse_numba, gauss_jordan_inverse_numpy)


def gauss_jordan_inverse(a) -> np.ndarray:
    """Dense inverse by Gauss-Jordan elimination with partial pivoting."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return _gauss_jordan_impl(a)


def multiset_distance(a, b) -> float:
    """Max deviation between two spectra after sorting (merged eigenvalues compare fine)."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        raise ValueError(f"spectra have different sizes: {a.shape[0]} vs {b.shape[0]}")
    return float(np.max(np.abs(a - b), initial=0.0))
