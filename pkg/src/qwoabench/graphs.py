"""MaxCut instances: graph generation, cut quality, exact solutions.

Bitstrings are little-endian: vertex ``i`` is bit ``i`` of the basis index,
so ``x = 0b0101`` puts vertices 0 and 2 on side 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from qwoabench.rng import stream

MAX_QUBITS = 24
GW_THRESHOLD = 0.8786
GW_THRESHOLD_3REGULAR = 0.9326

# brute force chunk: 2**20 candidate cuts per vectorised pass
_CHUNK_BITS = 20


class SizeLimitError(ValueError):
    """Instance too large for exhaustive treatment."""


class InfeasibleDegreeError(ValueError):
    """No simple d-regular graph exists on n vertices."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1`` with edge weights."""

    n: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"graph needs at least one vertex, got n={self.n}")
        canon = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            canon.append((min(u, v), max(u, v)))
        if len(set(canon)) != len(canon):
            raise ValueError("duplicate edge")
        weights = tuple(float(w) for w in self.weights) or (1.0,) * len(canon)
        if len(weights) != len(canon):
            raise ValueError("one weight per edge required")
        object.__setattr__(self, "edges", tuple(canon))
        object.__setattr__(self, "weights", weights)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def total_weight(self) -> float:
        return float(sum(self.weights))

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def is_connected(self) -> bool:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = {0}
        todo = [0]
        while todo:
            for w in adj[todo.pop()]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == self.n


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def gen_er(n: int, p_edge: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p): each of the n(n-1)/2 pairs kept independently."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p_edge <= 1.0:
        raise ValueError(f"p_edge must lie in [0, 1], got {p_edge}")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    draws = stream(seed, "gen_er", n).random(len(pairs))
    return Graph(n, tuple(pr for pr, r in zip(pairs, draws) if r < p_edge))


def gen_regular(n: int, d: int, seed: int, max_tries: int = 100_000) -> Graph:
    """Random simple d-regular graph from the pairing (configuration) model.

    Stubs are shuffled and paired consecutively; any pairing that produces a
    loop or a repeated edge is thrown away whole and redrawn.
    """
    if d < 0 or d >= n or (n * d) % 2:
        raise InfeasibleDegreeError(f"no simple {d}-regular graph on {n} vertices")
    rng = stream(seed, "gen_regular", n, d)
    stubs = np.repeat(np.arange(n), d)
    for _ in range(max_tries):
        perm = rng.permutation(stubs).reshape(-1, 2)
        u = perm.min(axis=1)
        v = perm.max(axis=1)
        if np.any(u == v):
            continue
        keys = u * n + v
        if np.unique(keys).size != keys.size:
            continue
        order = np.argsort(keys)
        return Graph(n, tuple(zip(u[order].tolist(), v[order].tolist())))
    raise RuntimeError(f"pairing model failed {max_tries} times for n={n}, d={d}")


def _as_bits(x: Sequence[int] | str | int, n: int) -> np.ndarray:
    if isinstance(x, (int, np.integer)):
        if not 0 <= int(x) < (1 << n):
            raise ValueError(f"basis index {x} out of range for n={n}")
        return np.array([(int(x) >> i) & 1 for i in range(n)], dtype=np.int64)
    bits = np.array([int(c) for c in x], dtype=np.int64)
    if bits.size != n:
        raise ValueError(f"bitstring has length {bits.size}, graph has {n} vertices")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("bitstring entries must be 0 or 1")
    return bits


def quality(g: Graph, x: Sequence[int] | str | int) -> float:
    """Cut weight of ``x``: sum of w_ij over edges with x_i != x_j.

    ``x`` is a 0/1 sequence (or string) indexed by vertex, or a basis index.
    """
    bits = _as_bits(x, g.n)
    return float(sum(w for (u, v), w in zip(g.edges, g.weights) if bits[u] != bits[v]))


def _cut_values(g: Graph, idx: np.ndarray) -> np.ndarray:
    out = np.zeros(idx.shape, dtype=np.float64)
    for (u, v), w in zip(g.edges, g.weights):
        out += w * (((idx >> u) ^ (idx >> v)) & 1)
    return out


@dataclass(frozen=True)
class QualityTable:
    """Diagonal of the MaxCut observable: q(x) for every basis index x.

    ``levels``/``index`` is the same data factored as distinct values plus a
    per-index pointer (``values == levels[index]``), which the phase kernels
    use.  ``sigma`` is the population standard deviation over all 2**n cuts.
    """

    n: int
    values: np.ndarray = field(repr=False)
    q_max: float
    mu: float
    sigma: float
    levels: np.ndarray = field(repr=False)
    index: np.ndarray = field(repr=False)

    @classmethod
    def from_values(cls, values: np.ndarray) -> "QualityTable":
        values = np.ascontiguousarray(values, dtype=np.float64)
        n = int(values.size).bit_length() - 1
        if values.ndim != 1 or values.size != 1 << n:
            raise ValueError("quality table length must be a power of two")
        levels, index = np.unique(values, return_inverse=True)
        index = np.ascontiguousarray(index.reshape(-1), dtype=np.int32)
        for arr in (values, levels, index):
            arr.setflags(write=False)
        mu = float(values.mean())
        sigma = float(np.sqrt(np.mean((values - mu) ** 2)))
        return cls(n, values, float(levels[-1]), mu, sigma, levels, index)


def build_quality_table(g: Graph, max_n: int = MAX_QUBITS) -> QualityTable:
    if g.n > max_n:
        raise SizeLimitError(f"n={g.n} exceeds the table limit {max_n}")
    idx = np.arange(1 << g.n, dtype=np.int64)
    return QualityTable.from_values(_cut_values(g, idx))


def estimate_sigma(g: Graph, seed: int, samples: int = 100_000) -> float:
    """Monte Carlo standard deviation of q over uniformly random cuts."""
    rng = stream(seed, "sigma", g.n)
    idx = rng.integers(0, 1 << g.n, size=samples, dtype=np.int64)
    return float(np.std(_cut_values(g, idx)))


@dataclass(frozen=True)
class MaxcutSolution:
    q_max: float
    witness: tuple[int, ...]

    @property
    def index(self) -> int:
        return sum(b << i for i, b in enumerate(self.witness))


def brute_force_maxcut(g: Graph, max_n: int = MAX_QUBITS) -> MaxcutSolution:
    """Exact MaxCut by scanning the 2**(n-1) cuts with vertex 0 on side 0.

    Ties resolve to the smallest basis index, so the witness is deterministic.
    """
    if g.n > max_n:
        raise SizeLimitError(f"n={g.n} exceeds the brute-force limit {max_n}")
    total = 1 << (g.n - 1)
    chunk = 1 << _CHUNK_BITS
    best, best_idx = -math.inf, 0
    for start in range(0, total, chunk):
        half = np.arange(start, min(start + chunk, total), dtype=np.int64)
        vals = _cut_values(g, half << 1)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, best_idx = float(vals[k]), int(half[k]) << 1
    witness = tuple((best_idx >> i) & 1 for i in range(g.n))
    return MaxcutSolution(best, witness)


def approx_ratio(q_found: float, q_max: float) -> float:
    if q_max == 0:
        raise ZeroDivisionError("approximation ratio undefined for q_max = 0 (edgeless graph)")
    return q_found / q_max


# -- text format: "n m" header, then "u v [w]" per edge, '#' comments --------


def format_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    for (u, v), w in zip(g.edges, g.weights):
        lines.append(f"{u} {v}" if w == 1.0 else f"{u} {v} {w!r}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise ValueError("graph file must start with an 'n m' header line")
    n, m = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != m:
        raise ValueError(f"header declares {m} edges, found {len(body)}")
    edges, weights = [], []
    for row in body:
        if len(row) not in (2, 3):
            raise ValueError(f"bad edge line: {' '.join(row)!r}")
        edges.append((int(row[0]), int(row[1])))
        weights.append(float(row[2]) if len(row) == 3 else 1.0)
    return Graph(n, tuple(edges), tuple(weights))


def read_graph(path: str | Path) -> Graph:
    return parse_graph(Path(path).read_text())


def write_graph(g: Graph, path: str | Path, comments: Iterable[str] = ()) -> None:
    header = "".join(f"# {c}\n" for c in comments)
    Path(path).write_text(header + format_graph(g))
