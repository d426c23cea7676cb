# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Reference semantics live in ``_fallback.py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp
from libc.stdint cimport int64_t, int8_t, uint8_t, uint64_t

cnp.import_array()


cdef inline int _ctz(uint64_t v) nogil:
    cdef int k = 0
    while (v & 1) == 0:
        v >>= 1
        k += 1
    return k


def enumerate_qubo(const int64_t[::1] core_lin, const int64_t[:, ::1] core_sym,
                   const int64_t[::1] free_lin, const int64_t[:, ::1] free_coup,
                   const int64_t[::1] core_pos, const int64_t[::1] free_pos, int n):
    cdef Py_ssize_t c = core_lin.shape[0]
    cdef Py_ssize_t nf = free_lin.shape[0]
    cdef uint64_t total = (<uint64_t>1) << c
    cdef uint64_t t
    cdef Py_ssize_t j, v, k
    cdef int64_t energy = 0, e, best
    cdef int64_t fv
    cdef int zeros
    cdef uint64_t count = 0
    cdef int cmp

    x_arr = np.zeros(c, dtype=np.int64)
    loc_arr = np.array(core_lin, dtype=np.int64)
    fld_arr = np.array(free_lin, dtype=np.int64)
    best_arr = np.zeros(n, dtype=np.uint8)
    cand_arr = np.zeros(n, dtype=np.uint8)
    cdef int64_t[::1] x = x_arr
    cdef int64_t[::1] loc = loc_arr
    cdef int64_t[::1] fld = fld_arr
    cdef uint8_t[::1] bestv = best_arr
    cdef uint8_t[::1] cand = cand_arr
    cdef int64_t sign

    with nogil:
        t = 0
        while True:
            if t > 0:
                k = _ctz(t)
                if x[k] == 0:
                    energy += loc[k]
                    x[k] = 1
                    sign = 1
                else:
                    energy -= loc[k]
                    x[k] = 0
                    sign = -1
                for j in range(c):
                    loc[j] += sign * core_sym[j, k]
                for v in range(nf):
                    fld[v] += sign * free_coup[v, k]
            e = energy
            zeros = 0
            for v in range(nf):
                fv = fld[v]
                if fv < 0:
                    e += fv
                elif fv == 0:
                    zeros += 1
            if t == 0 or e <= best:
                for j in range(c):
                    cand[core_pos[j]] = <uint8_t>x[j]
                for v in range(nf):
                    cand[free_pos[v]] = 1 if fld[v] < 0 else 0
                if t == 0 or e < best:
                    best = e
                    count = (<uint64_t>1) << zeros
                    for j in range(n):
                        bestv[j] = cand[j]
                else:
                    count += (<uint64_t>1) << zeros
                    cmp = 0
                    for j in range(n):
                        if cand[j] != bestv[j]:
                            cmp = -1 if cand[j] < bestv[j] else 1
                            break
                    if cmp < 0:
                        for j in range(n):
                            bestv[j] = cand[j]
            t += 1
            if t >= total:
                break
    return int(best), int(count), best_arr


def sa_block(const int64_t[::1] h, const int64_t[:, ::1] jsym, double scale,
             const double[::1] betas, int8_t[:, ::1] spins, const double[:, :, ::1] uniforms):
    cdef Py_ssize_t shots = spins.shape[0]
    cdef Py_ssize_t n = spins.shape[1]
    cdef Py_ssize_t sweeps = betas.shape[0]
    cdef Py_ssize_t r, t, i, j
    cdef int64_t delta, si
    cdef double beta
    fld_arr = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] fld = fld_arr

    with nogil:
        for r in range(shots):
            for i in range(n):
                fld[i] = h[i]
                for j in range(n):
                    fld[i] += jsym[i, j] * spins[r, j]
            for t in range(sweeps):
                beta = betas[t]
                for i in range(n):
                    si = spins[r, i]
                    delta = 2 * si * fld[i]
                    if delta <= 0 or uniforms[r, t, i] < exp(-beta * <double>delta / scale):
                        spins[r, i] = <int8_t>(-si)
                        for j in range(n):
                            fld[j] -= 2 * si * jsym[j, i]


def apply_x_rotations(double complex[::1] psi, int n, double c, double s):
    cdef Py_ssize_t size = psi.shape[0]
    cdef Py_ssize_t stride, base, i
    cdef int q
    cdef double ar, ai, br, bi
    with nogil:
        for q in range(n):
            stride = (<Py_ssize_t>1) << q
            base = 0
            while base < size:
                for i in range(base, base + stride):
                    ar = psi[i].real
                    ai = psi[i].imag
                    br = psi[i + stride].real
                    bi = psi[i + stride].imag
                    psi[i] = (c * ar - s * bi) + 1j * (c * ai + s * br)
                    psi[i + stride] = (c * br - s * ai) + 1j * (c * bi + s * ar)
                base += 2 * stride
