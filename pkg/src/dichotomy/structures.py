"""Finite universes, relations, partial injections and simple models.

Elements of a universe of size N are the integers 0..N-1.  Everything here is
immutable; models are extended by building a new value (see ``SimpleModel.with_``).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Iterable, Mapping, Sequence

DEFAULT_ISO_LIMIT = 10


class StructureError(ValueError):
    """Malformed structure data (bad JSON, out-of-range element, ...)."""


@dataclass(frozen=True)
class Universe:
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise StructureError(f"universe size must be >= 1, got {self.size}")

    def __iter__(self):
        return iter(range(self.size))

    def __len__(self):
        return self.size

    def __contains__(self, e):
        return isinstance(e, int) and 0 <= e < self.size


@dataclass(frozen=True)
class RelationTable:
    arity: int
    tuples: frozenset = frozenset()

    def __post_init__(self):
        ts = frozenset(tuple(t) for t in self.tuples)
        for t in ts:
            if len(t) != self.arity:
                raise StructureError(f"tuple {t} does not have arity {self.arity}")
        object.__setattr__(self, "tuples", ts)

    @classmethod
    def of(cls, arity: int, tuples: Iterable[Sequence[int]]) -> "RelationTable":
        return cls(arity, frozenset(tuple(t) for t in tuples))

    def __contains__(self, t):
        return tuple(t) in self.tuples

    def __len__(self):
        return len(self.tuples)

    def __iter__(self):
        return iter(self.sorted())

    def sorted(self) -> list[tuple[int, ...]]:
        return sorted(self.tuples)

    def check_universe(self, u: Universe) -> None:
        for t in self.tuples:
            for e in t:
                if e not in u:
                    raise StructureError(f"element {e} of {t} outside universe of size {u.size}")


@dataclass(frozen=True)
class PartialInjection:
    """A finite map stored as sorted (source, target) pairs.

    Construction does not enforce injectivity; ``violations()`` reports it, so
    that bad inputs can be diagnosed instead of rejected outright.
    """

    pairs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(sorted((int(a), int(b)) for a, b in self.pairs)))

    @classmethod
    def of(cls, mapping: Mapping[int, int] | Iterable[tuple[int, int]]) -> "PartialInjection":
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        return cls(tuple(items))

    @property
    def domain(self) -> frozenset:
        return frozenset(a for a, _ in self.pairs)

    @property
    def image(self) -> frozenset:
        return frozenset(b for _, b in self.pairs)

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def violations(self) -> list[str]:
        out = []
        if len({a for a, _ in self.pairs}) != len(self.pairs):
            out.append("not functional")
        if len({b for _, b in self.pairs}) != len(self.pairs):
            out.append("not injective")
        return out

    def is_injective(self) -> bool:
        return not self.violations()


@dataclass(frozen=True)
class SimpleVocabulary:
    constants: tuple = ()
    unary_predicates: tuple = ()
    unary_functions: tuple = ()
    relation_symbols: tuple = ()  # (name, arity) pairs

    def __post_init__(self):
        for f in ("constants", "unary_predicates", "unary_functions"):
            object.__setattr__(self, f, tuple(getattr(self, f)))
        object.__setattr__(self, "relation_symbols", tuple((n, int(a)) for n, a in self.relation_symbols))
        names = self.names()
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise StructureError(f"vocabulary names not distinct: {dup}")

    def names(self) -> list[str]:
        return (list(self.constants) + list(self.unary_predicates)
                + list(self.unary_functions) + [n for n, _ in self.relation_symbols])


@dataclass(frozen=True)
class AnalysisParams:
    lambda0: int
    lambda1: int
    k_threshold: int = 1
    k2_threshold: int = 1

    @classmethod
    def default_for(cls, size: int, k: int = 1, k2: int = 1) -> "AnalysisParams":
        lam = math.isqrt(size - 1) + 1 if size > 1 else 1  # ceil(sqrt(size))
        return cls(lam, lam, k, k2)


@dataclass(frozen=True)
class SimpleModel:
    universe: Universe
    vocabulary: SimpleVocabulary = field(default_factory=SimpleVocabulary)
    constant_values: Mapping[str, int] = field(default_factory=dict)
    predicate_values: Mapping[str, frozenset] = field(default_factory=dict)
    function_values: Mapping[str, PartialInjection] = field(default_factory=dict)
    relation_values: Mapping[str, RelationTable] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "predicate_values",
                           {k: frozenset(v) for k, v in self.predicate_values.items()})
        object.__setattr__(self, "function_values", dict(self.function_values))
        object.__setattr__(self, "constant_values", dict(self.constant_values))
        object.__setattr__(self, "relation_values", dict(self.relation_values))
        voc = self.vocabulary
        missing = ([c for c in voc.constants if c not in self.constant_values]
                   + [p for p in voc.unary_predicates if p not in self.predicate_values]
                   + [f for f in voc.unary_functions if f not in self.function_values]
                   + [r for r, _ in voc.relation_symbols if r not in self.relation_values])
        if missing:
            raise StructureError(f"uninterpreted symbols: {missing}")
        extra = set(self.constant_values) - set(voc.constants)
        extra |= set(self.predicate_values) - set(voc.unary_predicates)
        extra |= set(self.function_values) - set(voc.unary_functions)
        extra |= set(self.relation_values) - {r for r, _ in voc.relation_symbols}
        if extra:
            raise StructureError(f"values for symbols outside the vocabulary: {sorted(extra)}")
        for name, arity in voc.relation_symbols:
            if self.relation_values[name].arity != arity:
                raise StructureError(f"relation {name} declared arity {arity}")

    def __hash__(self):
        return hash((self.universe, self.vocabulary))

    @property
    def size(self) -> int:
        return self.universe.size

    @classmethod
    def from_relation(cls, size: int, r: RelationTable, name: str = "r") -> "SimpleModel":
        return cls(Universe(size), SimpleVocabulary(relation_symbols=((name, r.arity),)),
                   relation_values={name: r})

    def with_(self, *, constants: Mapping[str, int] | None = None,
              predicates: Mapping[str, Iterable[int]] | None = None,
              functions: Mapping[str, PartialInjection] | None = None,
              relations: Mapping[str, RelationTable] | None = None) -> "SimpleModel":
        """Return an expansion (or override) of this model by the given symbols."""
        voc = self.vocabulary
        cv, pv = dict(self.constant_values), dict(self.predicate_values)
        fv, rv = dict(self.function_values), dict(self.relation_values)
        cv.update(constants or {})
        pv.update({k: frozenset(v) for k, v in (predicates or {}).items()})
        fv.update(functions or {})
        rv.update(relations or {})

        def merged(old, new):
            return tuple(old) + tuple(n for n in new if n not in old)

        rel_syms = merged([n for n, _ in voc.relation_symbols], list(relations or {}))
        new_voc = SimpleVocabulary(
            merged(voc.constants, list(constants or {})),
            merged(voc.unary_predicates, list(predicates or {})),
            merged(voc.unary_functions, list(functions or {})),
            tuple((n, rv[n].arity) for n in rel_syms),
        )
        return replace(self, vocabulary=new_voc, constant_values=cv, predicate_values=pv,
                       function_values=fv, relation_values=rv)


@dataclass(frozen=True)
class Violation:
    symbol: str
    kind: str
    detail: str

    def as_dict(self):
        return {"symbol": self.symbol, "kind": self.kind, "detail": self.detail}


def validate_simple_model(m: SimpleModel, p: AnalysisParams) -> list[Violation]:
    """Check the simple-model bounds; returns one violation per failed condition."""
    out: list[Violation] = []
    u = m.universe
    for name in m.vocabulary.constants:
        v = m.constant_values[name]
        if v not in u:
            out.append(Violation(name, "out of range", f"value {v}"))
    for name in m.vocabulary.unary_predicates:
        s = m.predicate_values[name]
        bad = sorted(e for e in s if e not in u)
        if bad:
            out.append(Violation(name, "out of range", f"elements {bad}"))
        if len(s) > p.lambda0:
            out.append(Violation(name, "predicate too large", f"|{name}|={len(s)} > lambda0={p.lambda0}"))
    for name in m.vocabulary.unary_functions:
        f = m.function_values[name]
        bad = sorted({e for pair in f.pairs for e in pair if e not in u})
        if bad:
            out.append(Violation(name, "out of range", f"elements {bad}"))
        for v in f.violations():
            out.append(Violation(name, v, f"pairs {list(f.pairs)}"))
        if len(f.domain) > p.lambda1:
            out.append(Violation(name, "domain too large",
                                 f"|Dom({name})|={len(f.domain)} > lambda1={p.lambda1}"))
    for name, _ in m.vocabulary.relation_symbols:
        for t in m.relation_values[name].tuples:
            if any(e not in u for e in t):
                out.append(Violation(name, "out of range", f"tuple {t}"))
                break
    return out


def _check_perm(perm: Sequence[int], size: int | None = None) -> tuple[int, ...]:
    perm = tuple(perm)
    if size is not None and len(perm) != size:
        raise StructureError(f"permutation has length {len(perm)}, universe size {size}")
    if sorted(perm) != list(range(len(perm))):
        raise StructureError(f"not a bijection: {perm}")
    return perm


def apply_permutation(r: RelationTable, perm: Sequence[int]) -> RelationTable:
    """Image of ``r`` under the element map ``i -> perm[i]``."""
    perm = _check_perm(perm)
    try:
        return RelationTable(r.arity, frozenset(tuple(perm[e] for e in t) for t in r.tuples))
    except IndexError:
        raise StructureError("permutation shorter than the universe") from None


def compose(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """``compose(p, q)[i] == p[q[i]]`` (apply q first)."""
    return tuple(p[q[i]] for i in range(len(q)))


class SearchLimitExceeded(RuntimeError):
    pass


def is_isomorphic_copy(r1: RelationTable, r2: RelationTable, u: Universe,
                       limit: int = DEFAULT_ISO_LIMIT) -> tuple[int, ...] | None:
    """Lexicographically least permutation mapping r1 onto r2, or None.

    Backtracking assigns images to 0, 1, ... in increasing order, pruning as
    soon as a fully assigned tuple of r1 lands outside r2.
    """
    if r1.arity != r2.arity:
        raise StructureError("arity mismatch")
    if u.size > limit:
        raise SearchLimitExceeded(f"search limit exceeded: universe {u.size} > {limit}")
    if len(r1) != len(r2):
        return None
    n = u.size
    # cheap invariant: per-position occurrence profile of each element
    def profile(r):
        prof = [[0] * r.arity for _ in range(n)]
        for t in r.tuples:
            for i, e in enumerate(t):
                prof[e][i] += 1
        return [tuple(p) for p in prof]
    p1, p2 = profile(r1), profile(r2)
    if sorted(p1) != sorted(p2):
        return None
    # tuples of r1 indexed by their largest element: checked once that element is mapped
    by_max: list[list[tuple]] = [[] for _ in range(n)]
    for t in r1.tuples:
        if t:
            by_max[max(t)].append(t)
    target = r2.tuples
    perm = [-1] * n
    used = [False] * n

    def extend(i: int) -> bool:
        if i == n:
            return True
        for v in range(n):
            if used[v] or p1[i] != p2[v]:
                continue
            perm[i] = v
            if all(tuple(perm[e] for e in t) in target for t in by_max[i]):
                used[v] = True
                if extend(i + 1):
                    return True
                used[v] = False
        perm[i] = -1
        return False

    if r1.arity == 0:
        return tuple(range(n))
    return tuple(perm) if extend(0) else None


# ---------------------------------------------------------------------------
# JSON structure files

_STRUCTURE_KEYS = {"universe", "relations", "predicates", "functions", "constants", "lambda0", "lambda1"}


@dataclass(frozen=True)
class StructureFile:
    model: SimpleModel
    lambda0: int | None = None
    lambda1: int | None = None

    def params(self, k: int = 1, k2: int = 1) -> AnalysisParams:
        d = AnalysisParams.default_for(self.model.size, k, k2)
        return AnalysisParams(self.lambda0 if self.lambda0 is not None else d.lambda0,
                              self.lambda1 if self.lambda1 is not None else d.lambda1, k, k2)


def structure_from_dict(data: Mapping) -> StructureFile:
    if not isinstance(data, Mapping):
        raise StructureError("structure must be a JSON object")
    unknown = set(data) - _STRUCTURE_KEYS
    if unknown:
        raise StructureError(f"unknown keys: {sorted(unknown)}")
    if "universe" not in data:
        raise StructureError("missing key 'universe'")
    size = data["universe"]
    if not isinstance(size, int) or isinstance(size, bool):
        raise StructureError("'universe' must be an integer")
    u = Universe(size)

    def elem(v, where):
        if not isinstance(v, int) or isinstance(v, bool) or v not in u:
            raise StructureError(f"{where}: {v!r} is not an element of a universe of size {size}")
        return v

    def entries(key, required):
        items = data.get(key, [])
        if not isinstance(items, list):
            raise StructureError(f"'{key}' must be a list")
        for i, it in enumerate(items):
            if not isinstance(it, Mapping):
                raise StructureError(f"{key}[{i}] must be an object")
            bad = set(it) - required
            if bad or set(required) - set(it) - {"arity"}:
                raise StructureError(f"{key}[{i}]: expected keys {sorted(required)}")
            yield i, it

    rels = {}
    for i, it in entries("relations", {"name", "arity", "tuples"}):
        tuples = [tuple(elem(e, f"relations[{i}]") for e in t) for t in it["tuples"]]
        arity = it.get("arity", len(tuples[0]) if tuples else 0)
        rels[it["name"]] = RelationTable.of(arity, tuples)
    preds = {it["name"]: frozenset(elem(e, f"predicates[{i}]") for e in it["elements"])
             for i, it in entries("predicates", {"name", "elements"})}
    funcs = {}
    for i, it in entries("functions", {"name", "pairs"}):
        pairs = []
        for pr in it["pairs"]:
            if not isinstance(pr, list) or len(pr) != 2:
                raise StructureError(f"functions[{i}]: pairs must be [source, target]")
            pairs.append((elem(pr[0], f"functions[{i}]"), elem(pr[1], f"functions[{i}]")))
        funcs[it["name"]] = PartialInjection(tuple(pairs))
    consts = data.get("constants", {})
    if not isinstance(consts, Mapping):
        raise StructureError("'constants' must be an object")
    consts = {k: elem(v, f"constants.{k}") for k, v in consts.items()}
    voc = SimpleVocabulary(tuple(consts), tuple(preds), tuple(funcs),
                           tuple((n, r.arity) for n, r in rels.items()))
    model = SimpleModel(u, voc, consts, preds, funcs, rels)
    lam = {}
    for key in ("lambda0", "lambda1"):
        if key in data:
            v = data[key]
            if not isinstance(v, int) or v < 0:
                raise StructureError(f"'{key}' must be a non-negative integer")
            lam[key] = v
    return StructureFile(model, lam.get("lambda0"), lam.get("lambda1"))


def structure_to_dict(m: SimpleModel, lambda0: int | None = None,
                      lambda1: int | None = None) -> dict:
    voc = m.vocabulary
    out: dict = {"universe": m.size}
    out["relations"] = [{"name": n, "arity": a, "tuples": [list(t) for t in m.relation_values[n].sorted()]}
                        for n, a in voc.relation_symbols]
    out["predicates"] = [{"name": n, "elements": sorted(m.predicate_values[n])}
                         for n in voc.unary_predicates]
    out["functions"] = [{"name": n, "pairs": [list(p) for p in m.function_values[n].pairs]}
                        for n in voc.unary_functions]
    out["constants"] = {n: m.constant_values[n] for n in voc.constants}
    if lambda0 is not None:
        out["lambda0"] = lambda0
    if lambda1 is not None:
        out["lambda1"] = lambda1
    return out


def load_structure(path) -> StructureFile:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise StructureError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None
    return structure_from_dict(data)


def all_tuples(size: int, arity: int):
    return product(range(size), repeat=arity)
