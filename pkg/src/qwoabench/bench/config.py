"""Benchmark configuration, stored as a JSON document."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from qwoabench.graphs import Graph, gen_er, gen_regular
from qwoabench.optimize import OptimizerConfig

STRATEGIES = ("random", "pretrained", "nv")


@dataclass(frozen=True)
class GraphClass:
    name: str
    kind: str  # "er" or "regular"
    p_edge: float = 0.3
    degree: int = 3

    def __post_init__(self) -> None:
        if self.kind not in ("er", "regular"):
            raise ValueError(f"unknown graph kind {self.kind!r}")

    def generate(self, n: int, seed: int) -> Graph:
        if self.kind == "er":
            return gen_er(n, self.p_edge, seed)
        return gen_regular(n, self.degree, seed)


@dataclass(frozen=True)
class PretrainSettings:
    max_iters: int = 2000
    threshold: float = 0.999
    max_restarts: int = 8


@dataclass(frozen=True)
class BenchConfig:
    classes: tuple[GraphClass, ...]
    n: int
    instances: int
    depth: int
    strategies: tuple[str, ...] = STRATEGIES
    max_iters: int = 500
    memory: int = 10
    grad_tol: float = 1e-6
    f_tol: float = 1e-9
    master_seed: int = 0
    out_dir: str = "bench-out"
    workers: int = 1
    nv_binding: str = "named"
    pretrain: PretrainSettings = field(default_factory=PretrainSettings)
    bundle: str | None = None

    def __post_init__(self) -> None:
        if self.instances < 1:
            raise ValueError("instance count must be >= 1")
        if not self.strategies:
            raise ValueError("at least one strategy required")
        bad = set(self.strategies) - set(STRATEGIES)
        if bad:
            raise ValueError(f"unknown strategies {sorted(bad)}")
        if not self.classes:
            raise ValueError("at least one graph class required")
        if self.nv_binding not in ("named", "literal"):
            raise ValueError(f"unknown nv_binding {self.nv_binding!r}")

    @property
    def optimizer(self) -> OptimizerConfig:
        return OptimizerConfig(self.max_iters, self.memory, self.grad_tol, self.f_tol)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["classes"] = [asdict(c) for c in self.classes]
        d["strategies"] = list(self.strategies)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BenchConfig":
        d = dict(d)
        d["classes"] = tuple(GraphClass(**c) for c in d["classes"])
        d["strategies"] = tuple(d.get("strategies", STRATEGIES))
        d["pretrain"] = PretrainSettings(**d.get("pretrain", {}))
        return cls(**d)

    @classmethod
    def load(cls, path: str | Path) -> "BenchConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


BENCH_CLASSES = (GraphClass("regular3", "regular", degree=3), GraphClass("er0.3", "er", p_edge=0.3))


def desk_preset(out_dir: str = "bench-desk", **overrides) -> BenchConfig:
    """n=10, p=64, 20 graphs per class: the CI-sized reproduction."""
    base = dict(classes=BENCH_CLASSES, n=10, instances=20, depth=64, max_iters=500,
                master_seed=2025, out_dir=out_dir)
    base.update(overrides)
    return BenchConfig(**base)


def full_scale_preset(out_dir: str = "bench-full", **overrides) -> BenchConfig:
    """n=16, p=256, 200 graphs per class, 500 iterations."""
    base = dict(classes=BENCH_CLASSES, n=16, instances=200, depth=256, max_iters=500,
                master_seed=2025, out_dir=out_dir)
    base.update(overrides)
    return BenchConfig(**base)
