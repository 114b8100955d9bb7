"""Pure-Python per-position kernels.

Reference twin of ``_ckernels.pyx``; both must agree bit for bit on the same
inputs. Integer codes:

* state: 0 = |0>, 1 = |1>, 2 = |U+>, 3 = |U->, 4 = scrambled marker
* basis: 0 = I (computational), 1 = H (Hadamard)
* outcome: 0, 1, or 2 = uniform
"""
import math

import numpy as np

SCRAMBLED = 4
UNIFORM = 2
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def encode(payload, controls):
    n = len(payload)
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        out[i] = payload[i] + 2 * controls[i]
    return out


def measure_symbolic(states, bases):
    n = len(states)
    outcomes = np.empty(n, dtype=np.uint8)
    post = np.empty(n, dtype=np.uint8)
    for i in range(n):
        s = states[i]
        if s != SCRAMBLED and (s >> 1) == bases[i]:
            outcomes[i] = s & 1
            post[i] = s
        else:
            outcomes[i] = UNIFORM
            post[i] = SCRAMBLED
    return outcomes, post


def prepare_amps(states):
    n = len(states)
    amps = np.zeros((n, 2), dtype=np.complex128)
    for i in range(n):
        s = states[i]
        if s == 0:
            amps[i, 0] = 1.0
        elif s == 1:
            amps[i, 1] = 1.0
        elif s == 2:
            amps[i, 0] = _INV_SQRT2
            amps[i, 1] = _INV_SQRT2
        elif s == 3:
            amps[i, 0] = _INV_SQRT2
            amps[i, 1] = -_INV_SQRT2
        else:
            raise ValueError(f"state code {s} has no vector form")
    return amps


def measure_physical(amps, bases, uniforms):
    n = amps.shape[0]
    bits = np.empty(n, dtype=np.uint8)
    post = np.zeros((n, 2), dtype=np.complex128)
    for i in range(n):
        a0 = complex(amps[i, 0])
        a1 = complex(amps[i, 1])
        if bases[i]:
            a0, a1 = (a0 + a1) * _INV_SQRT2, (a0 - a1) * _INV_SQRT2
        p0 = a0.real * a0.real + a0.imag * a0.imag
        p1 = a1.real * a1.real + a1.imag * a1.imag
        b = 0 if uniforms[i] * (p0 + p1) < p0 else 1
        bits[i] = b
        if bases[i]:
            post[i, 0] = _INV_SQRT2
            post[i, 1] = -_INV_SQRT2 if b else _INV_SQRT2
        else:
            post[i, b] = 1.0
    return bits, post


def forge(outcomes, bases, guesses):
    n = len(outcomes)
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        o = outcomes[i]
        if o == UNIFORM:
            out[i] = guesses[i] + 2 * (1 - bases[i])
        else:
            out[i] = o + 2 * bases[i]
    return out


def reconstruct(record_i, record_h):
    # status: 0 ok, 1 both uniform, 2 both definite
    n = len(record_i)
    payload = np.zeros(n, dtype=np.uint8)
    controls = np.zeros(n, dtype=np.uint8)
    status = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        ri = record_i[i]
        rh = record_h[i]
        if ri != UNIFORM and rh != UNIFORM:
            status[i] = 2
        elif ri != UNIFORM:
            payload[i] = ri
        elif rh != UNIFORM:
            payload[i] = rh
            controls[i] = 1
        else:
            status[i] = 1
    return payload, controls, status


def classify_copies(reads_i, reads_h):
    # reads_*: (k, n) bit readouts; a pass "agrees" when all k copies match
    k, n = reads_i.shape
    payload = np.zeros(n, dtype=np.uint8)
    controls = np.zeros(n, dtype=np.uint8)
    status = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        first = reads_i[0, i]
        agree = True
        for j in range(1, k):
            if reads_i[j, i] != first:
                agree = False
                break
        if agree:
            payload[i] = first
            continue
        first = reads_h[0, i]
        agree = True
        for j in range(1, k):
            if reads_h[j, i] != first:
                agree = False
                break
        if agree:
            payload[i] = first
            controls[i] = 1
        else:
            status[i] = 1
    return payload, controls, status


def hamming(a, b):
    d = 0
    for i in range(len(a)):
        if a[i] != b[i]:
            d += 1
    return d
