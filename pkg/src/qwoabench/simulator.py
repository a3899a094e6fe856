"""Statevector simulation of QWOA circuits with the binary (hypercube) mixer.

A circuit is a flat, execution-ordered list of gates.  Each gate is either a
phase separator ``exp(-i*theta*Q)`` with Q diagonal (a :class:`QualityTable`)
or the mixer ``exp(-i*theta*sum_j X_j)``, and names the index of the
parameter that drives it.  Gradients use the adjoint method: one forward
sweep, one application of the observable, then a backward sweep that undoes
each gate on the state and the costate together.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from qwoabench import _kernels
from qwoabench.graphs import MAX_QUBITS, QualityTable, SizeLimitError

PHASE = "phase"
MIXER = "mixer"


@dataclass
class Statevector:
    """2**n complex amplitudes, little-endian basis ordering.

    Gate functions below mutate ``amps`` in place and hand the same object
    back so calls can be chained.
    """

    n: int
    amps: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def copy(self) -> "Statevector":
        return Statevector(self.n, self.amps.copy())


@dataclass(frozen=True)
class Gate:
    kind: str
    param: int
    # fixed table for this gate; None means "the table passed to run_pqc"
    table: QualityTable | None = None
    label: str = ""

    def __post_init__(self) -> None:
        if self.kind not in (PHASE, MIXER):
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == MIXER and self.table is not None:
            raise ValueError("mixer gates take no table")


@dataclass(frozen=True)
class CircuitSpec:
    """Execution-ordered gates over ``n`` qubits arranged in ``depth`` layers."""

    n: int
    depth: int
    gates: tuple[Gate, ...]

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError("depth must be positive")
        used = {g.param for g in self.gates}
        if used != set(range(len(used))):
            raise ValueError("gate parameter indices must cover 0..P-1 contiguously")
        for g in self.gates:
            if g.table is not None and g.table.n != self.n:
                raise ValueError("gate table size does not match circuit")

    @property
    def num_params(self) -> int:
        return 1 + max(g.param for g in self.gates) if self.gates else 0


def qwoa_circuit(n: int, p: int) -> CircuitSpec:
    """Standard QWOA: per layer the phase gate, then the mixer.

    Parameters are laid out as ``[phase_1..phase_p, mixer_1..mixer_p]``.
    """
    gates = []
    for k in range(p):
        gates.append(Gate(PHASE, k, label="phase"))
        gates.append(Gate(MIXER, p + k, label="mixer"))
    return CircuitSpec(n, p, tuple(gates))


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise SizeLimitError(f"qubit count {n} outside [1, {MAX_QUBITS}]")


def uniform_state(n: int) -> Statevector:
    _check_n(n)
    size = 1 << n
    return Statevector(n, np.full(size, 1.0 / np.sqrt(size), dtype=np.complex128))


def basis_state(n: int, x: int) -> Statevector:
    _check_n(n)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[x] = 1.0
    return Statevector(n, amps)


def apply_phase(state: Statevector, table: QualityTable, angle: float) -> Statevector:
    if table.n != state.n:
        raise ValueError(f"table is for {table.n} qubits, state has {state.n}")
    _kernels.phase(state.amps, table.levels, table.index, float(angle))
    return state


def apply_mixer(state: Statevector, angle: float) -> Statevector:
    _kernels.mix(state.amps, state.n, float(angle))
    return state


def expectation(state: Statevector, table: QualityTable) -> float:
    if table.n != state.n:
        raise ValueError(f"table is for {table.n} qubits, state has {state.n}")
    return float(_kernels.diag_expect(state.amps, table.values))


def _params(circuit: CircuitSpec, params: Sequence[float]) -> np.ndarray:
    theta = np.asarray(params, dtype=np.float64)
    if theta.shape != (circuit.num_params,):
        raise ValueError(f"circuit takes {circuit.num_params} parameters, got {theta.shape}")
    return theta


def _table_for(gate: Gate, table: QualityTable) -> QualityTable:
    return gate.table if gate.table is not None else table


def run_pqc(circuit: CircuitSpec, params: Sequence[float], table: QualityTable) -> Statevector:
    if table.n != circuit.n:
        raise ValueError("table size does not match circuit")
    theta = _params(circuit, params)
    state = uniform_state(circuit.n)
    amps = state.amps
    for g in circuit.gates:
        if g.kind == PHASE:
            t = _table_for(g, table)
            _kernels.phase(amps, t.levels, t.index, theta[g.param])
        else:
            _kernels.mix(amps, circuit.n, theta[g.param])
    return state


def cost(circuit: CircuitSpec, params: Sequence[float], table: QualityTable) -> float:
    """Minimisation objective: minus the expected quality."""
    return -expectation(run_pqc(circuit, params, table), table)


def gradient_adjoint(
    circuit: CircuitSpec,
    params: Sequence[float],
    table: QualityTable,
    return_value: bool = False,
):
    """d<Q>/d(theta) for every circuit parameter by the adjoint method.

    Memory is two statevectors.  With ``return_value`` the pair
    ``(<Q>, grad)`` is returned, sharing the forward sweep.
    """
    theta = _params(circuit, params)
    n = circuit.n
    ket = run_pqc(circuit, theta, table).amps
    value = float(_kernels.diag_expect(ket, table.values))
    costate = _kernels.diag_apply(ket, table.values)
    grad = np.zeros(theta.size)
    for g in reversed(circuit.gates):
        angle = theta[g.param]
        if g.kind == PHASE:
            t = _table_for(g, table)
            grad[g.param] += 2.0 * _kernels.diag_braket_imag(costate, ket, t.values)
            _kernels.phase2(ket, costate, t.levels, t.index, -angle)
        else:
            grad[g.param] += 2.0 * _kernels.mixer_braket_imag(costate, ket, n)
            _kernels.mix2(ket, costate, n, -angle)
    if return_value:
        return value, grad
    return grad


def value_and_grad(circuit: CircuitSpec, table: QualityTable):
    """Objective closure for :func:`qwoabench.optimize.minimize` (cost = -<Q>)."""

    def fun(x: np.ndarray) -> tuple[float, np.ndarray]:
        value, grad = gradient_adjoint(circuit, x, table, return_value=True)
        return -value, -grad

    return fun
