"""Built-in relation generators and family descriptors."""
from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ..structures import RelationTable, SimpleModel, StructureError, load_structure

GENERATORS = ("successor", "balanced-equivalence", "random-graph(p)", "linear-order", "matching", "grid")


def ceil_sqrt(n: int) -> int:
    return 0 if n <= 0 else math.isqrt(n - 1) + 1


def ceil_log2(n: int) -> int:
    return 0 if n <= 1 else (n - 1).bit_length()


def eval_lambda(expr, n: int) -> int:
    """Size-dependent bound: an integer, "N", "sqrt" (ceil sqrt N) or "log" (ceil log2 N)."""
    if isinstance(expr, int) and not isinstance(expr, bool):
        if expr < 0:
            raise ValueError("lambda must be non-negative")
        return expr
    table = {"N": n, "sqrt": ceil_sqrt(n), "log": ceil_log2(n)}
    if isinstance(expr, str) and expr.strip() in table:
        return table[expr.strip()]
    if isinstance(expr, str) and expr.strip().isdigit():
        return int(expr)
    raise ValueError(f"unknown lambda expression {expr!r}; use an integer, 'N', 'sqrt' or 'log'")


_RANDOM = re.compile(r"random-graph\((?P<p>[0-9]+(?:/[0-9]+|\.[0-9]+)?)\)$")


def parse_probability(text: str) -> Fraction:
    p = Fraction(text)
    if not 0 <= p <= 1:
        raise ValueError("probability must lie in [0, 1]")
    return p


def generate(name: str, n: int, seed: int = 0) -> RelationTable:
    if n < 1:
        raise ValueError("size must be positive")
    if name == "successor":
        return RelationTable.of(2, [(i, (i + 1) % n) for i in range(n)])
    if name == "balanced-equivalence":
        q = max(1, math.isqrt(n))
        cls = [min(i // q, q - 1) for i in range(n)]
        return RelationTable.of(2, [(i, j) for i in range(n) for j in range(n) if cls[i] == cls[j]])
    if name == "linear-order":
        return RelationTable.of(2, [(i, j) for i in range(n) for j in range(n) if i < j])
    if name == "matching":
        h = n // 2
        return RelationTable.of(2, [(i, i + h) for i in range(h)])
    if name == "grid":
        q = max(1, math.isqrt(n))
        pts = {i: divmod(i, q) for i in range(q * q)}
        return RelationTable.of(2, [(a, b) for a in pts for b in pts
                                    if abs(pts[a][0] - pts[b][0]) + abs(pts[a][1] - pts[b][1]) == 1])
    m = _RANDOM.match(name)
    if m:
        p = parse_probability(m.group("p"))
        rng = random.Random(seed * 1_000_003 + n)
        den = p.denominator
        return RelationTable.of(2, [(i, j) for i in range(n) for j in range(n)
                                    if rng.randrange(den) < p.numerator])
    raise ValueError(f"unknown generator {name!r}; known: {', '.join(GENERATORS)}")


@dataclass(frozen=True)
class Instance:
    label: str
    model: SimpleModel
    lambda0: int
    lambda1: int

    @property
    def size(self) -> int:
        return self.model.size


@dataclass
class FamilyDescriptor:
    """Either a generator with sizes, or an explicit instance list.

    JSON: {"generator": "successor", "sizes": [4, 5], "lambda0": 2, "lambda1": "sqrt", "seed": 0}
    or {"instances": [{"file": "a.json"} | {"generator": ..., "size": N}, ...], ...}.
    """

    entries: list = field(default_factory=list)  # dicts with generator/size or file
    lambda0: object = "sqrt"
    lambda1: object = "sqrt"
    seed: int = 0
    base_dir: Path = Path(".")

    @classmethod
    def generated(cls, generator: str, sizes, lambda0="sqrt", lambda1="sqrt", seed: int = 0):
        sizes = list(sizes)
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sizes must be strictly increasing")
        return cls([{"generator": generator, "size": s} for s in sizes], lambda0, lambda1, seed)

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path = Path(".")) -> "FamilyDescriptor":
        known = {"generator", "sizes", "instances", "lambda0", "lambda1", "seed"}
        extra = set(data) - known
        if extra:
            raise StructureError(f"unknown family keys: {sorted(extra)}")
        l0, l1, seed = data.get("lambda0", "sqrt"), data.get("lambda1", "sqrt"), data.get("seed", 0)
        if "generator" in data:
            fam = cls.generated(data["generator"], data.get("sizes", []), l0, l1, seed)
            fam.base_dir = base_dir
            return fam
        if "instances" not in data:
            raise StructureError("family needs 'generator' and 'sizes', or 'instances'")
        return cls(list(data["instances"]), l0, l1, seed, base_dir)

    @classmethod
    def load(cls, path) -> "FamilyDescriptor":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise StructureError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
        return cls.from_dict(data, path.parent)

    def instances(self) -> list[Instance]:
        out = []
        for e in self.entries:
            if "file" in e:
                sf = load_structure(self.base_dir / e["file"])
                n = sf.model.size
                l0 = sf.lambda0 if sf.lambda0 is not None else eval_lambda(e.get("lambda0", self.lambda0), n)
                l1 = sf.lambda1 if sf.lambda1 is not None else eval_lambda(e.get("lambda1", self.lambda1), n)
                out.append(Instance(str(e["file"]), sf.model, l0, l1))
            else:
                n = int(e["size"])
                r = generate(e["generator"], n, self.seed)
                out.append(Instance(f"{e['generator']}:{n}", SimpleModel.from_relation(n, r),
                                    eval_lambda(e.get("lambda0", self.lambda0), n),
                                    eval_lambda(e.get("lambda1", self.lambda1), n)))
        return out
