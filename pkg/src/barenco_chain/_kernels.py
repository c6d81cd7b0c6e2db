"""Compiled inner loops: complex Jacobi eigensolver and the exponential-midpoint stepper.

Everything here works on plain numpy arrays so it can be jitted with numba.
The public, validated entry points live in :mod:`barenco_chain.linalg` and
:mod:`barenco_chain.evolve`.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

OK = 0
NO_CONVERGENCE = -1


@njit(cache=True, nogil=True)
def jacobi_inplace(a, v, tol, max_sweeps):
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    ``a`` is overwritten by ``R^H a R`` until its off-diagonal Frobenius norm
    drops below ``tol * ||a||_F``; every rotation is accumulated as ``v <- v R``.
    Pass ``v = I`` for a cold start, or ``a = W^H H W, v = W`` to warm-start
    from a nearby eigenbasis ``W``.

    Returns the number of sweeps performed, or -1 if the budget ran out.
    """
    n = a.shape[0]
    norm = 0.0
    for i in range(n):
        for j in range(n):
            norm += a[i, j].real ** 2 + a[i, j].imag ** 2
    norm = math.sqrt(norm)
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j].real ** 2 + a[i, j].imag ** 2
        if math.sqrt(off) <= tol * norm:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g == 0.0:
                    continue
                # a phase on column q makes the pivot real, then a real Givens rotation kills it
                e_conj = (apq / g).conjugate()
                theta = (a[q, q].real - a[p, p].real) / (2.0 * g)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rpp = c
                rqp = -s * e_conj
                rpq = s
                rqq = c * e_conj
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * rpp + akq * rqp
                    a[k, q] = akp * rpq + akq * rqq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = rpp * apk + rqp.conjugate() * aqk
                    a[q, k] = rpq * apk + rqq.conjugate() * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * rpp + vkq * rqp
                    v[k, q] = vkp * rpq + vkq * rqq
    return NO_CONVERGENCE


@njit(cache=True, nogil=True)
def orthonormalize_columns(w):
    """Modified Gram-Schmidt on the columns of ``w``, in place."""
    d = w.shape[0]
    for k in range(d):
        for j in range(k):
            proj = 0j
            for i in range(d):
                proj += w[i, j].conjugate() * w[i, k]
            for i in range(d):
                w[i, k] -= proj * w[i, j]
        nrm = 0.0
        for i in range(d):
            nrm += w[i, k].real ** 2 + w[i, k].imag ** 2
        nrm = math.sqrt(nrm)
        for i in range(d):
            w[i, k] /= nrm


@njit(cache=True, nogil=True)
def evolve_batch(h_static, drive, amp, freq, phase, t0, dt, record, out, tol, max_sweeps):
    """Exponential-midpoint propagation of ``H_b(t) = h_static[b] + amp[b] cos(freq[b] t - phase[b]) drive``.

    ``record`` holds sorted step counts; after ``record[s]`` steps the
    propagator of batch element ``b`` is stored in ``out[b, s]``.
    Each step multiplies ``exp(-i H(t_mid) dt)`` on the left. The eigenbasis of
    the previous step warm-starts the Jacobi solve of the next one and is
    re-orthonormalized after every step.
    """
    nb = h_static.shape[0]
    d = h_static.shape[1]
    n_steps = record[record.shape[0] - 1]
    a = np.empty((d, d), np.complex128)
    v = np.empty((d, d), np.complex128)
    w = np.empty((d, d), np.complex128)
    h = np.empty((d, d), np.complex128)
    tmp = np.empty((d, d), np.complex128)
    u = np.empty((d, d), np.complex128)
    phases = np.empty(d, np.complex128)
    for b in range(nb):
        for i in range(d):
            for k in range(d):
                u[i, k] = 1.0 if i == k else 0.0
                w[i, k] = u[i, k]
        s = 0
        while s < record.shape[0] and record[s] == 0:
            out[b, s] = u
            s += 1
        for j in range(n_steps):
            t_mid = t0 + (j + 0.5) * dt
            omega_t = amp[b] * math.cos(freq[b] * t_mid - phase[b])
            for i in range(d):
                for k in range(d):
                    h[i, k] = h_static[b, i, k] + omega_t * drive[i, k]
            # a = w^H h w
            for i in range(d):
                for k in range(d):
                    acc = 0j
                    for m in range(d):
                        acc += h[i, m] * w[m, k]
                    tmp[i, k] = acc
            for i in range(d):
                for k in range(d):
                    acc = 0j
                    for m in range(d):
                        acc += w[m, i].conjugate() * tmp[m, k]
                    a[i, k] = acc
            for i in range(d):
                for k in range(d):
                    v[i, k] = w[i, k]
            if jacobi_inplace(a, v, tol, max_sweeps) < 0:
                return NO_CONVERGENCE
            for i in range(d):
                for k in range(d):
                    w[i, k] = v[i, k]
            # rounding in the accumulated rotations would otherwise drift the basis off unitarity
            orthonormalize_columns(w)
            for m in range(d):
                x = -a[m, m].real * dt
                phases[m] = complex(math.cos(x), math.sin(x))
            # step = w diag(phases) w^H, then u <- step u
            for i in range(d):
                for k in range(d):
                    acc = 0j
                    for m in range(d):
                        acc += w[i, m] * phases[m] * w[k, m].conjugate()
                    a[i, k] = acc
            for i in range(d):
                for k in range(d):
                    acc = 0j
                    for m in range(d):
                        acc += a[i, m] * u[m, k]
                    tmp[i, k] = acc
            for i in range(d):
                for k in range(d):
                    u[i, k] = tmp[i, k]
            while s < record.shape[0] and record[s] == j + 1:
                out[b, s] = u
                s += 1
    return OK
