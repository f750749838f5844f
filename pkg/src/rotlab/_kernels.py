"""Numeric kernels, numba-compiled when available.

Two hot paths live here: the cyclic Jacobi eigensolver for small Hermitian
matrices and the grid scan of the qutrit cheating objective.  With numba
installed the kernels are @njit-compiled (cached on disk); setting
``ROTLAB_DISABLE_NUMBA=1`` forces the pure-numpy path, where the eigensolver
runs the same rotation loops in plain Python and the grid scan switches to a
vectorised batch evaluation of the identical objective.
"""

from __future__ import annotations

import math
import os

import numpy as np

# Convergence contract of the eigensolver: cyclic sweeps until the
# off-diagonal Frobenius norm drops below OFF_DIAGONAL_TOL, at most
# MAX_SWEEPS sweeps.
OFF_DIAGONAL_TOL = 1e-13
MAX_SWEEPS = 100


def _numba_disabled() -> bool:
    flag = os.environ.get("ROTLAB_DISABLE_NUMBA", "")
    return flag.strip().lower() in {"1", "true", "yes", "on"}


try:
    if _numba_disabled():
        raise ImportError("numba disabled via ROTLAB_DISABLE_NUMBA")
    from numba import njit as _njit

    USE_NUMBA = True
except ImportError:
    USE_NUMBA = False

BACKEND = "numba" if USE_NUMBA else "numpy"

if USE_NUMBA:

    def _jit(fn):
        return _njit(cache=True)(fn)

else:

    def _jit(fn):
        return fn


@_jit
def _off_norm(a):
    # Frobenius norm of the off-diagonal part of a Hermitian matrix.
    n = a.shape[0]
    acc = 0.0
    for p in range(n - 1):
        for q in range(p + 1, n):
            acc += 2.0 * (a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag)
    return math.sqrt(acc)


@_jit
def _rotate(a, v, p, q, track_vectors):
    # One complex Jacobi rotation zeroing a[p, q]; updates a in place and,
    # when track_vectors is set, accumulates the rotation into v.
    n = a.shape[0]
    apq = a[p, q]
    r = abs(apq)
    if r == 0.0:
        return
    phase = apq / r
    tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
    if tau >= 0.0:
        t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c
    conj_phase = np.conj(phase)
    for k in range(n):
        akp = a[k, p]
        akq = a[k, q]
        a[k, p] = c * akp - s * conj_phase * akq
        a[k, q] = s * akp + c * conj_phase * akq
    for k in range(n):
        apk = a[p, k]
        aqk = a[q, k]
        a[p, k] = c * apk - s * phase * aqk
        a[q, k] = s * apk + c * phase * aqk
    a[p, q] = 0.0
    a[q, p] = 0.0
    if track_vectors:
        for k in range(n):
            vkp = v[k, p]
            vkq = v[k, q]
            v[k, p] = c * vkp - s * conj_phase * vkq
            v[k, q] = s * vkp + c * conj_phase * vkq


@_jit
def jacobi_eigh(h, off_tol, max_sweeps, want_vectors):
    """Cyclic Jacobi diagonalisation of a Hermitian matrix.

    Returns (eigenvalues ascending, unitary column eigenvectors, final
    off-diagonal norm).  Convergence is the caller's responsibility to check
    via the returned norm.
    """
    n = h.shape[0]
    a = h.copy()
    v = np.eye(n, dtype=np.complex128)
    off = _off_norm(a)
    sweeps = 0
    while off >= off_tol and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(a, v, p, q, want_vectors)
        sweeps += 1
        off = _off_norm(a)
    w = np.empty(n, dtype=np.float64)
    for i in range(n):
        w[i] = a[i, i].real
    order = np.argsort(w)
    w_sorted = np.empty(n, dtype=np.float64)
    v_sorted = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        w_sorted[i] = w[order[i]]
        for k in range(n):
            v_sorted[k, i] = v[k, order[i]]
    return w_sorted, v_sorted, off


@_jit
def _abs_eig_sum(h, off_tol, max_sweeps):
    w, _, off = jacobi_eigh(h, off_tol, max_sweeps, False)
    total = 0.0
    for i in range(w.shape[0]):
        total += abs(w[i])
    return total, off


@_jit
def qutrit_cheat_objective(alpha, beta, gamma_amp, off_tol, max_sweeps):
    """Success probability of reading the permutation-selected bit out of the
    phase-encoded qutrit, averaged over the two permutation values.

    Built the long way round: the four encoded states, the two mixtures per
    permutation value, and the trace norm of their difference.
    """
    psi = np.empty((2, 2, 3), dtype=np.complex128)
    for x0 in range(2):
        for x1 in range(2):
            psi[x0, x1, 0] = alpha * (1.0 - 2.0 * x0)
            psi[x0, x1, 1] = beta * (1.0 - 2.0 * x1)
            psi[x0, x1, 2] = gamma_amp
    total = 0.0
    for perm in range(2):
        delta = np.zeros((3, 3), dtype=np.complex128)
        for x0 in range(2):
            for x1 in range(2):
                bit = x0 if perm == 0 else x1
                weight = 0.5 if bit == 0 else -0.5
                for i in range(3):
                    for j in range(3):
                        delta[i, j] += weight * psi[x0, x1, i] * np.conj(psi[x0, x1, j])
        norm1, _ = _abs_eig_sum(delta, off_tol, max_sweeps)
        total += 0.5 + 0.25 * norm1
    return 0.5 * total


@_jit
def _qutrit_cheat_grid_loop(thetas, phis, off_tol, max_sweeps):
    out = np.empty((thetas.shape[0], phis.shape[0]), dtype=np.float64)
    for i in range(thetas.shape[0]):
        st = math.sin(thetas[i])
        ct = math.cos(thetas[i])
        for j in range(phis.shape[0]):
            alpha = st * math.cos(phis[j])
            beta = st * math.sin(phis[j])
            out[i, j] = qutrit_cheat_objective(alpha, beta, ct, off_tol, max_sweeps)
    return out


def qutrit_cheat_grid_numpy(thetas, phis):
    """Vectorised batch evaluation of the grid objective (fallback path).

    Same objective as the loop kernel; the trace norms of the stacked
    difference operators come from numpy's batched Hermitian eigensolver.
    """
    tt, ff = np.meshgrid(thetas, phis, indexing="ij")
    alpha = (np.sin(tt) * np.cos(ff)).ravel()
    beta = (np.sin(tt) * np.sin(ff)).ravel()
    gamma_amp = np.cos(tt).ravel()
    vecs = np.empty((alpha.size, 2, 2, 3))
    for x0 in range(2):
        for x1 in range(2):
            vecs[:, x0, x1, 0] = alpha * (1.0 - 2.0 * x0)
            vecs[:, x0, x1, 1] = beta * (1.0 - 2.0 * x1)
            vecs[:, x0, x1, 2] = gamma_amp
    outers = np.einsum("mxyi,mxyj->mxyij", vecs, vecs)
    delta0 = 0.5 * (outers[:, 0, 0] + outers[:, 0, 1] - outers[:, 1, 0] - outers[:, 1, 1])
    delta1 = 0.5 * (outers[:, 0, 0] + outers[:, 1, 0] - outers[:, 0, 1] - outers[:, 1, 1])
    norms0 = np.abs(np.linalg.eigvalsh(delta0)).sum(axis=1)
    norms1 = np.abs(np.linalg.eigvalsh(delta1)).sum(axis=1)
    values = 0.5 * ((0.5 + 0.25 * norms0) + (0.5 + 0.25 * norms1))
    return values.reshape(thetas.size, phis.size)


def qutrit_cheat_grid(thetas, phis):
    """Objective values on a theta x phi grid, via the active backend."""
    thetas = np.ascontiguousarray(thetas, dtype=np.float64)
    phis = np.ascontiguousarray(phis, dtype=np.float64)
    if USE_NUMBA:
        return _qutrit_cheat_grid_loop(thetas, phis, OFF_DIAGONAL_TOL, MAX_SWEEPS)
    return qutrit_cheat_grid_numpy(thetas, phis)


def eigh(matrix):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.

    Returns (w, v, off) with off the final off-diagonal norm; callers decide
    whether the run converged.
    """
    a = np.ascontiguousarray(matrix, dtype=np.complex128)
    return jacobi_eigh(a, OFF_DIAGONAL_TOL, MAX_SWEEPS, True)


def eigvalsh(matrix):
    """Eigenvalues only; same contract as :func:`eigh`."""
    a = np.ascontiguousarray(matrix, dtype=np.complex128)
    w, _, off = jacobi_eigh(a, OFF_DIAGONAL_TOL, MAX_SWEEPS, False)
    return w, off
