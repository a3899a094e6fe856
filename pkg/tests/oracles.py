"""Dense-matrix reference implementations, only usable for a handful of qubits.

Bit convention matches the library: vertex/qubit j is bit j of the basis
index, so the Kronecker product runs from the highest qubit down.
"""

from functools import reduce

import numpy as np
from scipy.linalg import expm

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
LETTERS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def pauli_matrix(label):
    """label[j] acts on qubit j."""
    return reduce(np.kron, [LETTERS[c] for c in reversed(label)])


def element_matrix(h):
    dim = 2**h.n
    out = np.zeros((dim, dim), dtype=complex)
    for p, c in h.terms.items():
        out += c * pauli_matrix(p.label)
    return out


def single(n, j, op):
    mats = [I2] * n
    mats[j] = op
    return reduce(np.kron, list(reversed(mats)))


def mixer_matrix(n):
    return sum(single(n, j, X) for j in range(n))


def cut_diagonal(g):
    vals = np.zeros(2**g.n)
    for x in range(2**g.n):
        for (u, v), w in zip(g.edges, g.weights):
            if (x >> u & 1) != (x >> v & 1):
                vals[x] += w
    return vals


def dense_circuit_state(circuit, params, tables):
    """Apply each gate as a dense matrix exponential; ``tables`` maps gate label -> QualityTable."""
    n = circuit.n
    psi = np.full(2**n, 2 ** (-n / 2), dtype=complex)
    M = mixer_matrix(n)
    for gate in circuit.gates:
        theta = params[gate.param]
        if gate.kind == "mixer":
            psi = expm(-1j * theta * M) @ psi
        else:
            table = gate.table if gate.table is not None else tables[gate.label]
            psi = np.exp(-1j * theta * table.values) * psi
    return psi


def dense_expectation(psi, values):
    return float(np.real(np.vdot(psi, values * psi)))


def central_difference(fun, x, h=1e-5):
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fun(x + e) - fun(x - e)) / (2 * h)
    return g
