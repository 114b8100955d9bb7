# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-position kernels; mirrors ``_pykernels`` exactly."""
import numpy as np

from libc.math cimport sqrt

cdef unsigned char SCRAMBLED = 4
cdef unsigned char UNIFORM = 2
cdef double INV_SQRT2 = 1.0 / sqrt(2.0)


def encode(const unsigned char[:] payload, const unsigned char[:] controls):
    cdef Py_ssize_t i, n = payload.shape[0]
    out = np.empty(n, dtype=np.uint8)
    cdef unsigned char[:] o = out
    for i in range(n):
        o[i] = payload[i] + 2 * controls[i]
    return out


def measure_symbolic(const unsigned char[:] states, const unsigned char[:] bases):
    cdef Py_ssize_t i, n = states.shape[0]
    cdef unsigned char s
    outcomes = np.empty(n, dtype=np.uint8)
    post = np.empty(n, dtype=np.uint8)
    cdef unsigned char[:] oc = outcomes
    cdef unsigned char[:] ps = post
    for i in range(n):
        s = states[i]
        if s != SCRAMBLED and (s >> 1) == bases[i]:
            oc[i] = s & 1
            ps[i] = s
        else:
            oc[i] = UNIFORM
            ps[i] = SCRAMBLED
    return outcomes, post


def prepare_amps(const unsigned char[:] states):
    cdef Py_ssize_t i, n = states.shape[0]
    cdef unsigned char s
    amps = np.zeros((n, 2), dtype=np.complex128)
    cdef double complex[:, :] a = amps
    for i in range(n):
        s = states[i]
        if s == 0:
            a[i, 0] = 1.0
        elif s == 1:
            a[i, 1] = 1.0
        elif s == 2:
            a[i, 0] = INV_SQRT2
            a[i, 1] = INV_SQRT2
        elif s == 3:
            a[i, 0] = INV_SQRT2
            a[i, 1] = -INV_SQRT2
        else:
            raise ValueError(f"state code {s} has no vector form")
    return amps


def measure_physical(const double complex[:, :] amps, const unsigned char[:] bases,
                     const double[:] uniforms):
    cdef Py_ssize_t i, n = amps.shape[0]
    cdef double complex a0, a1, t
    cdef double p0, p1
    cdef unsigned char b
    bits = np.empty(n, dtype=np.uint8)
    post = np.zeros((n, 2), dtype=np.complex128)
    cdef unsigned char[:] bv = bits
    cdef double complex[:, :] pv = post
    for i in range(n):
        a0 = amps[i, 0]
        a1 = amps[i, 1]
        if bases[i]:
            t = (a0 + a1) * INV_SQRT2
            a1 = (a0 - a1) * INV_SQRT2
            a0 = t
        p0 = a0.real * a0.real + a0.imag * a0.imag
        p1 = a1.real * a1.real + a1.imag * a1.imag
        b = 0 if uniforms[i] * (p0 + p1) < p0 else 1
        bv[i] = b
        if bases[i]:
            pv[i, 0] = INV_SQRT2
            pv[i, 1] = -INV_SQRT2 if b else INV_SQRT2
        else:
            pv[i, b] = 1.0
    return bits, post


def forge(const unsigned char[:] outcomes, const unsigned char[:] bases,
          const unsigned char[:] guesses):
    cdef Py_ssize_t i, n = outcomes.shape[0]
    cdef unsigned char o
    out = np.empty(n, dtype=np.uint8)
    cdef unsigned char[:] ov = out
    for i in range(n):
        o = outcomes[i]
        if o == UNIFORM:
            ov[i] = guesses[i] + 2 * (1 - bases[i])
        else:
            ov[i] = o + 2 * bases[i]
    return out


def reconstruct(const unsigned char[:] record_i, const unsigned char[:] record_h):
    cdef Py_ssize_t i, n = record_i.shape[0]
    cdef unsigned char ri, rh
    payload = np.zeros(n, dtype=np.uint8)
    controls = np.zeros(n, dtype=np.uint8)
    status = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[:] pv = payload
    cdef unsigned char[:] cv = controls
    cdef unsigned char[:] sv = status
    for i in range(n):
        ri = record_i[i]
        rh = record_h[i]
        if ri != UNIFORM and rh != UNIFORM:
            sv[i] = 2
        elif ri != UNIFORM:
            pv[i] = ri
        elif rh != UNIFORM:
            pv[i] = rh
            cv[i] = 1
        else:
            sv[i] = 1
    return payload, controls, status


cdef bint _column_agrees(const unsigned char[:, :] reads, Py_ssize_t col) nogil:
    cdef Py_ssize_t j, k = reads.shape[0]
    cdef unsigned char first = reads[0, col]
    for j in range(1, k):
        if reads[j, col] != first:
            return False
    return True


def classify_copies(const unsigned char[:, :] reads_i, const unsigned char[:, :] reads_h):
    cdef Py_ssize_t i, n = reads_i.shape[1]
    payload = np.zeros(n, dtype=np.uint8)
    controls = np.zeros(n, dtype=np.uint8)
    status = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[:] pv = payload
    cdef unsigned char[:] cv = controls
    cdef unsigned char[:] sv = status
    for i in range(n):
        if _column_agrees(reads_i, i):
            pv[i] = reads_i[0, i]
        elif _column_agrees(reads_h, i):
            pv[i] = reads_h[0, i]
            cv[i] = 1
        else:
            sv[i] = 1
    return payload, controls, status


def hamming(const unsigned char[:] a, const unsigned char[:] b):
    cdef Py_ssize_t i, n = a.shape[0]
    cdef Py_ssize_t d = 0
    for i in range(n):
        if a[i] != b[i]:
            d += 1
    return d
