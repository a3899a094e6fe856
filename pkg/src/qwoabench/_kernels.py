"""Compiled inner loops for the statevector simulator.

All kernels work in place on contiguous complex128 buffers of length 2**n.
Phase kernels take a quality table in level form: ``levels`` holds the
distinct quality values and ``index[x]`` points into it, so one cos/sin pair
per level replaces a complex exponential per amplitude.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def mix(amps, n, angle):
    # exp(-i*angle*X) on every qubit; the X_j commute so order is irrelevant
    c = np.cos(angle)
    s = np.sin(angle)
    size = amps.shape[0]
    for j in range(n):
        bit = 1 << j
        for base in range(0, size, 2 * bit):
            for i in range(base, base + bit):
                a = amps[i]
                b = amps[i + bit]
                amps[i] = complex(c * a.real + s * b.imag, c * a.imag - s * b.real)
                amps[i + bit] = complex(c * b.real + s * a.imag, c * b.imag - s * a.real)


@numba.njit(cache=True)
def mix2(amps, other, n, angle):
    mix(amps, n, angle)
    mix(other, n, angle)


@numba.njit(cache=True)
def _phase_lut(levels, angle):
    lut = np.empty(levels.shape[0], dtype=np.complex128)
    for k in range(levels.shape[0]):
        lut[k] = complex(np.cos(angle * levels[k]), -np.sin(angle * levels[k]))
    return lut


@numba.njit(cache=True)
def phase(amps, levels, index, angle):
    lut = _phase_lut(levels, angle)
    for i in range(amps.shape[0]):
        amps[i] *= lut[index[i]]


@numba.njit(cache=True)
def phase2(amps, other, levels, index, angle):
    lut = _phase_lut(levels, angle)
    for i in range(amps.shape[0]):
        f = lut[index[i]]
        amps[i] *= f
        other[i] *= f


@numba.njit(cache=True)
def mixer_braket_imag(bra, ket, n):
    # Im <bra| sum_j X_j |ket>
    acc = 0.0
    size = ket.shape[0]
    for i in range(size):
        sr = 0.0
        si = 0.0
        for j in range(n):
            k = ket[i ^ (1 << j)]
            sr += k.real
            si += k.imag
        b = bra[i]
        acc += b.real * si - b.imag * sr
    return acc


@numba.njit(cache=True)
def diag_braket_imag(bra, ket, values):
    # Im <bra| diag(values) |ket>
    acc = 0.0
    for i in range(ket.shape[0]):
        b = bra[i]
        k = ket[i]
        acc += values[i] * (b.real * k.imag - b.imag * k.real)
    return acc


@numba.njit(cache=True)
def diag_expect(amps, values):
    acc = 0.0
    for i in range(amps.shape[0]):
        a = amps[i]
        acc += values[i] * (a.real * a.real + a.imag * a.imag)
    return acc


@numba.njit(cache=True)
def diag_apply(amps, values):
    out = np.empty_like(amps)
    for i in range(amps.shape[0]):
        out[i] = amps[i] * values[i]
    return out
