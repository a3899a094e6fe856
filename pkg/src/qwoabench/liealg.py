"""Sparse Pauli algebra, dynamical Lie algebras and adjoint-space simulation.

Everything here works on real coefficient maps over Pauli strings; no
2**n x 2**n matrix is ever formed.  An :class:`AlgebraElement` ``h`` stands
for the Hermitian operator ``sum_P h[P] P`` and, implicitly, for the
skew-Hermitian algebra element ``i*h``.

Basis elements are normalised so that ``Tr(B_a B_b) = delta_ab``.  The
structure constants are ``f[c, a, b] = Tr(iB_c [iB_a, iB_b])`` and the
adjoint matrix of ``h`` is ``sum_c h_c f[c]``.  For ``U = exp(-i*theta*h)``
the Heisenberg map ``U^dag (sum_a v_a iB_a) U = sum_c (R v)_c iB_c`` has
``R = expm(theta * ad(h))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.linalg import expm

from qwoabench.graphs import Graph

CLOSURE_TOL = 1e-10
IN_ALGEBRA_TOL = 1e-8
DEFAULT_MAX_DIM = 4096
_DROP = 1e-14

# phase of a Pauli product as a power of i
_I_POW = (1.0, 1j, -1.0, -1j)


class NotInAlgebra(ValueError):
    pass


class DimensionCapExceeded(RuntimeError):
    def __init__(self, msg: str, partial_dim: int):
        super().__init__(msg)
        self.partial_dim = partial_dim


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True, order=True)
class PauliString:
    """Tensor product of single-qubit Paulis encoded as X and Z bit masks.

    Qubit j carries I (x=0,z=0), X (1,0), Y (1,1) or Z (0,1); labels are
    written with qubit 0 first.
    """

    n: int
    x: int
    z: int

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        x = z = 0
        for j, ch in enumerate(label.upper()):
            if ch in "XY":
                x |= 1 << j
            if ch in "ZY":
                z |= 1 << j
            if ch not in "IXYZ":
                raise ValueError(f"bad Pauli letter {ch!r}")
        return cls(len(label), x, z)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliString":
        label = ["I"] * n
        label[qubit] = letter
        return cls.from_label("".join(label))

    @property
    def label(self) -> str:
        return "".join("IXZY"[((self.x >> j) & 1) | (((self.z >> j) & 1) << 1)] for j in range(self.n))

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def commutes(self, other: "PauliString") -> bool:
        return (_popcount(self.x & other.z) + _popcount(self.z & other.x)) % 2 == 0

    def multiply(self, other: "PauliString") -> tuple[int, "PauliString"]:
        """Return ``(k, R)`` with ``self @ other = i**k R``."""
        if other.n != self.n:
            raise ValueError("Pauli strings act on different qubit counts")
        # P = i^{|x&z|} X^x Z^z ; Z^z1 X^x2 = (-1)^{|z1&x2|} X^x2 Z^z1
        x, z = self.x ^ other.x, self.z ^ other.z
        k = (_popcount(self.x & self.z) + _popcount(other.x & other.z) - _popcount(x & z)
             + 2 * _popcount(self.z & other.x)) % 4
        return k, PauliString(self.n, x, z)


class AlgebraElement:
    """Real combination of Pauli strings (a Hermitian operator)."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[PauliString, float] | None = None):
        self.n = n
        self.terms: dict[PauliString, float] = {}
        for p, c in (terms or {}).items():
            if p.n != n:
                raise ValueError("term acts on the wrong number of qubits")
            if c != 0.0:
                self.terms[p] = float(c)

    @classmethod
    def from_labels(cls, pairs: Iterable[tuple[str, float]]) -> "AlgebraElement":
        pairs = list(pairs)
        n = len(pairs[0][0])
        out: dict[PauliString, float] = {}
        for lab, c in pairs:
            p = PauliString.from_label(lab)
            out[p] = out.get(p, 0.0) + c
        return cls(n, out)

    def __repr__(self) -> str:
        body = " + ".join(f"{c:.6g}*{p.label}" for p, c in sorted(self.terms.items()))
        return f"AlgebraElement({body or '0'})"

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self.axpy(1.0, other)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self.axpy(-1.0, other)

    def __mul__(self, s: float) -> "AlgebraElement":
        return AlgebraElement(self.n, {p: s * c for p, c in self.terms.items()})

    __rmul__ = __mul__

    def axpy(self, a: float, other: "AlgebraElement") -> "AlgebraElement":
        """``self + a * other``."""
        if other.n != self.n:
            raise ValueError("elements act on different qubit counts")
        out = dict(self.terms)
        for p, c in other.terms.items():
            v = out.get(p, 0.0) + a * c
            if abs(v) > _DROP:
                out[p] = v
            else:
                out.pop(p, None)
        return AlgebraElement(self.n, out)

    def dot(self, other: "AlgebraElement") -> float:
        """Euclidean product of Pauli coefficients, i.e. ``Tr(AB) / 2**n``."""
        small, big = sorted((self.terms, other.terms), key=len)
        return math.fsum(c * big[p] for p, c in small.items() if p in big)

    def trace_inner(self, other: "AlgebraElement") -> float:
        """``Tr(AB)``."""
        return self.dot(other) * float(2**self.n)

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def identity_part(self) -> float:
        return self.terms.get(PauliString(self.n, 0, 0), 0.0)

    def traceless(self) -> "AlgebraElement":
        return AlgebraElement(self.n, {p: c for p, c in self.terms.items() if not p.is_identity})

    def uniform_expectation(self) -> float:
        """<s|h|s> for the uniform superposition: only I/X strings survive."""
        return math.fsum(c for p, c in self.terms.items() if p.z == 0)


def commutator(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """The element ``c`` with ``i c = [i a, i b]``, i.e. ``c = i [a, b]``."""
    if a.n != b.n:
        raise ValueError("elements act on different qubit counts")
    out: dict[PauliString, float] = {}
    for p, cp in a.terms.items():
        for q, cq in b.terms.items():
            if p.commutes(q):
                continue
            k, r = p.multiply(q)
            # [P, Q] = 2 i^k R for anticommuting P, Q (k odd); times i -> 2 i^(k+1) R, real
            val = 2.0 * cp * cq * _I_POW[(k + 1) % 4].real
            out[r] = out.get(r, 0.0) + val
    return AlgebraElement(a.n, {r: v for r, v in out.items() if abs(v) > _DROP})


# -- QWOA generators -----------------------------------------------------------


def quality_operator(g: Graph) -> AlgebraElement:
    """Pauli form of the MaxCut observable: sum_e w_e (I - Z_u Z_v) / 2."""
    terms: dict[PauliString, float] = {}
    ident = PauliString(g.n, 0, 0)
    for (u, v), w in zip(g.edges, g.weights):
        zz = PauliString(g.n, 0, (1 << u) | (1 << v))
        terms[ident] = terms.get(ident, 0.0) + 0.5 * w
        terms[zz] = terms.get(zz, 0.0) - 0.5 * w
    return AlgebraElement(g.n, terms)


def mixer_operator(n: int) -> AlgebraElement:
    return AlgebraElement(n, {PauliString(n, 1 << j, 0): 1.0 for j in range(n)})


# -- closure and structure constants ----------------------------------------------


@dataclass(frozen=True)
class DlaBasis:
    """Orthonormal basis with ``Tr(B_a B_b) = delta_ab`` plus closure history."""

    n: int
    elements: tuple[AlgebraElement, ...] = field(repr=False)
    round_sizes: tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.elements)

    def coefficients(self, h: AlgebraElement, tol: float = IN_ALGEBRA_TOL) -> np.ndarray:
        """Coordinates ``w_a = Tr(B_a h)`` of a traceless ``h`` in this basis."""
        w = np.array([b.trace_inner(h) for b in self.elements])
        resid = h.traceless()
        scale = 2.0 ** (-self.n)
        for wa, b in zip(w, self.elements):
            resid = resid.axpy(-wa, b)
        rel = resid.norm() / max(h.traceless().norm(), scale)
        if rel > tol:
            raise NotInAlgebra(f"element lies outside the algebra (relative residual {rel:.3g})")
        return w


class _DenseSpan:
    """Orthonormal rows over a growing index of Pauli strings."""

    def __init__(self) -> None:
        self.index: dict[PauliString, int] = {}
        self.strings: list[PauliString] = []
        self.rows = np.zeros((16, 64))
        self.k = 0

    def vector(self, h: AlgebraElement) -> np.ndarray:
        for p in h.terms:
            if p not in self.index:
                self.index[p] = len(self.strings)
                self.strings.append(p)
        ncol = len(self.strings)
        if ncol > self.rows.shape[1]:
            grown = np.zeros((self.rows.shape[0], max(ncol, 2 * self.rows.shape[1])))
            grown[:, : self.rows.shape[1]] = self.rows
            self.rows = grown
        v = np.zeros(ncol)
        for p, c in h.terms.items():
            v[self.index[p]] = c
        return v

    def project_out(self, v: np.ndarray) -> np.ndarray:
        # two classical Gram-Schmidt passes
        b = self.rows[: self.k, : v.size]
        for _ in range(2):
            v = v - (b @ v) @ b
        return v

    def append(self, v: np.ndarray) -> None:
        if self.k == self.rows.shape[0]:
            grown = np.zeros((2 * self.k, self.rows.shape[1]))
            grown[: self.k] = self.rows[: self.k]
            self.rows = grown
        self.rows[self.k, : v.size] = v
        self.rows[self.k, v.size :] = 0.0
        self.k += 1

    def element(self, n: int, i: int, scale: float = 1.0) -> AlgebraElement:
        row = self.rows[i, : len(self.strings)]
        return AlgebraElement(n, {self.strings[j]: scale * row[j] for j in np.flatnonzero(np.abs(row) > _DROP)})


def lie_closure(generators: Sequence[AlgebraElement], max_dim: int = DEFAULT_MAX_DIM,
                tol: float = CLOSURE_TOL) -> DlaBasis:
    """Span of all nested commutators of the generators.

    Breadth-first: each round commutes the previous round's new elements
    with the generators (right-nested commutators span the whole algebra).
    Identity components are dropped since they only contribute a global
    phase.  Raises :class:`DimensionCapExceeded` past ``max_dim``.
    """
    if not generators:
        raise ValueError("need at least one generator")
    n = generators[0].n
    span = _DenseSpan()

    def admit(c: AlgebraElement) -> AlgebraElement | None:
        v = span.vector(c)
        nrm = np.linalg.norm(v)
        if nrm <= _DROP:
            return None
        r = span.project_out(v / nrm)
        rn = np.linalg.norm(r)
        if rn <= tol:
            return None
        span.append(r / rn)
        if span.k > max_dim:
            raise DimensionCapExceeded(f"Lie closure exceeded max_dim={max_dim}", span.k)
        return span.element(n, span.k - 1)

    gens = [g.traceless() for g in generators]
    frontier = [e for e in (admit(g) for g in gens) if e is not None]
    rounds = [span.k]
    while frontier:
        new = []
        for e in frontier:
            for g in gens:
                r = admit(commutator(g, e))
                if r is not None:
                    new.append(r)
        frontier = new
        if new:
            rounds.append(span.k)
    scale = 2.0 ** (-n / 2)
    return DlaBasis(n, tuple(span.element(n, i, scale) for i in range(span.k)), tuple(rounds))


def structure_constants(basis: DlaBasis) -> np.ndarray:
    """``f[c, a, b] = Tr(iB_c [iB_a, iB_b]) = -Tr(B_c C_ab)`` with ``iC_ab = [iB_a, iB_b]``.

    Only a < b pairs are computed; antisymmetry in (a, b) is imposed exactly.
    """
    d = basis.dim
    f = np.zeros((d, d, d))
    els = basis.elements
    span = _DenseSpan()
    for e in els:
        span.append(span.vector(e))
    dense = span.rows[:d, : len(span.strings)] * float(2**basis.n)
    for a in range(d):
        for b in range(a + 1, d):
            comm = commutator(els[a], els[b])
            if not comm.terms:
                continue
            cols = [span.index.get(p) for p in comm.terms]
            if None in cols:  # component outside every basis support: not closed
                raise NotInAlgebra(f"[B_{a}, B_{b}] leaves the span of the basis")
            col = -(dense[:, cols] @ np.fromiter(comm.terms.values(), float, len(cols)))
            f[:, a, b] = col
            f[:, b, a] = -col
    return f


def jacobi_residual(f: np.ndarray) -> float:
    """max |sum_e f[e,a,b] f[d,e,c] + cyclic(a,b,c)| over all indices."""
    t = np.einsum("eab,dec->dabc", f, f)
    jac = t + np.transpose(t, (0, 2, 3, 1)) + np.transpose(t, (0, 3, 1, 2))
    return float(np.max(np.abs(jac))) if jac.size else 0.0


def adjoint_of_hamiltonian(h: AlgebraElement, basis: DlaBasis, f: np.ndarray) -> np.ndarray:
    w = basis.coefficients(h)
    return np.tensordot(w, f, axes=1)


def adjoint_of_unitary(h: AlgebraElement, angle: float, basis: DlaBasis, f: np.ndarray) -> np.ndarray:
    """Orthogonal matrix of ``U = exp(-i*angle*h)`` acting on coefficient vectors."""
    return expm(angle * adjoint_of_hamiltonian(h, basis, f))


def initial_expectations(basis: DlaBasis) -> np.ndarray:
    """``Tr(B_c rho0)`` for rho0 the uniform superposition."""
    return np.array([b.uniform_expectation() for b in basis.elements])


def qwoa_generators(g: Graph) -> list[AlgebraElement]:
    return [quality_operator(g), mixer_operator(g.n)]


def gsim_expectation(
    circuit,
    params: Sequence[float],
    observable: AlgebraElement,
    basis: DlaBasis,
    f: np.ndarray,
    initial_e: np.ndarray,
    generators: Mapping[str, AlgebraElement],
) -> float:
    """Expectation of ``observable`` after ``circuit`` computed in adjoint space.

    ``generators`` maps each gate label of the circuit to its Hamiltonian.
    The observable's identity component is added back as a constant.  Cost
    is one dim x dim matrix exponential and mat-vec per gate.
    """
    theta = np.asarray(params, dtype=np.float64)
    if theta.shape != (circuit.num_params,):
        raise ValueError(f"circuit takes {circuit.num_params} parameters, got {theta.shape}")
    if initial_e.shape != (basis.dim,) or f.shape != (basis.dim,) * 3:
        raise ValueError("basis, structure constants and initial vector disagree in dimension")
    ads = {lab: adjoint_of_hamiltonian(h, basis, f) for lab, h in generators.items()}
    v = basis.coefficients(observable)
    # Heisenberg picture: the last gate acts on the observable first
    for gate in reversed(circuit.gates):
        try:
            ad = ads[gate.label]
        except KeyError:
            raise ValueError(f"no generator supplied for gate label {gate.label!r}") from None
        v = expm(theta[gate.param] * ad) @ v
    return observable.identity_part() + float(v @ initial_e)


def gsim_setup(g: Graph, max_dim: int = DEFAULT_MAX_DIM):
    """Closure, structure constants and initial vector for QWOA on ``g``."""
    gens = qwoa_generators(g)
    basis = lie_closure(gens, max_dim=max_dim)
    f = structure_constants(basis)
    return basis, f, initial_expectations(basis), {"phase": gens[0], "mixer": gens[1]}
