"""Delta systems of n-tuples: extraction and coding by singletons.

A sequence of n-tuples is a delta system when every coordinate is either
constant along the sequence or pairwise distinct along it.  Which
coordinates are constant is an arbitrary set (the pattern), not a prefix.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .logic import Formula, compile_formula, conj, implies
from .logic.ast import App, Eq, Name, Rel
from .structures import PartialInjection, SimpleModel, SimpleVocabulary, Universe


def g(m: int) -> int:
    return (m - 1) ** 2 + 1


def delta_bound(n: int, m: int) -> int:
    """g iterated n times at m: a certified upper bound, not the exact minimum."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    for _ in range(n):
        m = g(m)
    return m


@dataclass(frozen=True)
class DeltaPattern:
    n: int
    constant_positions: tuple  # sorted (position, value) pairs
    injective_positions: tuple

    def __post_init__(self):
        pos = sorted([t for t, _ in self.constant_positions] + list(self.injective_positions))
        if pos != list(range(self.n)):
            raise ValueError("positions must partition 0..n-1")

    @property
    def constants(self) -> dict[int, int]:
        return dict(self.constant_positions)

    @property
    def mask(self) -> int:
        return sum(1 << t for t, _ in self.constant_positions)

    @property
    def pivot(self) -> int | None:
        return min(self.injective_positions, default=None)

    def holds(self, tuples: Sequence[tuple]) -> bool:
        consts = self.constants
        for t in range(self.n):
            col = [tp[t] for tp in tuples]
            if t in consts:
                if any(v != consts[t] for v in col):
                    return False
            elif len(set(col)) != len(col):
                return False
        return True

    def as_dict(self):
        return {"n": self.n, "constant_positions": {str(t): v for t, v in self.constant_positions},
                "injective_positions": list(self.injective_positions)}

    @classmethod
    def of(cls, tuples: Sequence[tuple], n: int) -> "DeltaPattern | None":
        """The pattern a sequence realizes (non-empty input), or None."""
        consts, inj = [], []
        for t in range(n):
            col = [tp[t] for tp in tuples]
            if len(set(col)) == 1 and len(col) > 1:
                consts.append((t, col[0]))
            elif len(set(col)) == len(col):
                inj.append(t)
            else:
                return None
        return cls(n, tuple(consts), tuple(inj))


@dataclass(frozen=True)
class Extraction:
    indices: tuple
    pattern: DeltaPattern
    multiplicity: int  # largest number of repeats of one tuple in the subsequence

    def as_dict(self):
        return {"indices": list(self.indices), "pattern": self.pattern.as_dict(),
                "multiplicity": self.multiplicity}


def extract_delta_system(seq: Sequence[Sequence[int]], m: int, n: int | None = None) -> Extraction | None:
    """Depth-first refinement over coordinates.

    At each coordinate the injective branch (first occurrence of each value)
    is tried first, then one constant branch per value, most frequent first.
    Branches with fewer than ``m`` indices are pruned.  Completeness holds
    at length ``delta_bound(n, m)`` by the pigeonhole argument, since the
    pigeonhole branch is one of those explored.  A branch longer than the
    bound for the remaining coordinates is cut to that bound, which keeps
    success guaranteed; so results can be shorter than the longest system.
    """
    seq = list(map(tuple, seq))
    if n is None:
        n = len(seq[0]) if seq else 0
    if seq and set(map(len, seq)) != {n}:
        raise ValueError("tuples of mixed length")
    if m < 1 or len(seq) < m:
        return None

    caps = [delta_bound(n - t, m) if t < n else m for t in range(n + 1)]

    def go(t: int, idx: list[int], consts: list):
        if t == n:
            return idx, consts
        groups: dict[int, list[int]] = {}
        for i, v in zip(idx[:caps[t]], map(seq.__getitem__, idx[:caps[t]])):
            groups.setdefault(v[t], []).append(i)
        if len(groups) >= m:
            firsts = sorted(g[0] for g in groups.values())
            res = go(t + 1, firsts[:caps[t + 1]], consts)
            if res:
                return res
        for v, g_ in sorted(groups.items(), key=lambda kv: (-len(kv[1]), kv[0])):
            if len(g_) < m:
                break
            res = go(t + 1, g_[:caps[t + 1]], consts + [(t, v)])
            if res:
                return res
        return None

    res = go(0, list(range(len(seq))), [])
    if res is None:
        return None
    idx, consts = res
    ctpos = {t for t, _ in consts}
    pat = DeltaPattern(n, tuple(consts), tuple(t for t in range(n) if t not in ctpos))
    chosen = [seq[i] for i in idx]
    assert pat.holds(chosen), (idx, pat)
    mult = max((chosen.count(tp) for tp in set(chosen)), default=0)
    return Extraction(tuple(idx), pat, mult)


def minimal_delta_length(m: int, alphabet: int, n: int = 1, cap: int = 12) -> int | None:
    """Least L such that every length-L sequence over the alphabet has a delta
    subsequence of length m (exhaustive; tiny cases only)."""
    for length in range(m, cap + 1):
        values = list(product(range(alphabet), repeat=n))
        if all(extract_delta_system(s, m, n) for s in product(values, repeat=length)):
            return length
    return None


# -- coding -------------------------------------------------------------------

@dataclass(frozen=True)
class CodingBundle:
    model: SimpleModel
    theta: Formula  # free variables x, y0..y_{n-1}
    codes: tuple
    pattern: DeltaPattern

    @property
    def variables(self) -> tuple:
        return ("x",) + tuple(f"y{t}" for t in range(self.pattern.n))


def _anchor(mask: int) -> str:
    return f"cs_{mask}"


def theta_formula(n: int) -> Formula:
    """s1(x) and, for every pattern P, s0(cs_P) -> theta_P(x, y)."""
    x = Name("x")
    parts = [Rel("s1", (x,))]
    for mask in range(1 << n):
        lits = []
        for t in range(n):
            y = Name(f"y{t}")
            lits.append(Eq(y, Name(f"c_{t}")) if mask >> t & 1 else Eq(App(f"f_{t}", x), y))
        parts.append(implies(Rel("s0", (Name(_anchor(mask)),)), conj(lits, empty=Eq(x, x))))
    return conj(parts)


def code_delta_system(u: Universe, seq: Sequence[Sequence[int]], pat: DeltaPattern | None = None) -> CodingBundle:
    """One anchor constant per pattern; s0 marks the anchor of the realized pattern.

    Codes are the pivot coordinates (least injective position); f_t sends a
    code to coordinate t.  An all-constant pattern gets the single code 0.
    """
    seq = [tuple(t) for t in seq]
    n = pat.n if pat is not None else (len(seq[0]) if seq else 1)
    if pat is None:
        pat = DeltaPattern.of(seq, n) if seq else DeltaPattern(n, (), tuple(range(n)))
        if pat is None:
            raise ValueError("sequence is not a delta system")
    if seq and not pat.holds(seq):
        raise ValueError("sequence does not satisfy the pattern")
    if u.size < (1 << n) or u.size <= n:
        raise ValueError(f"universe too small: need at least {max(1 << n, n + 1)} elements for n={n}")
    if any(not 0 <= v < u.size for t in seq for v in t):
        raise ValueError("tuple value outside the universe")
    consts = {_anchor(mask): mask for mask in range(1 << n)}
    cvals = pat.constants
    for t in range(n):
        consts[f"c_{t}"] = cvals.get(t, 0)
    p = pat.pivot
    if p is None:
        codes = (0,) * len(seq)
    else:
        codes = tuple(tp[p] for tp in seq)
    funcs = {}
    for t in range(n):
        if t in cvals or p is None:
            funcs[f"f_{t}"] = PartialInjection.of([])
        else:
            funcs[f"f_{t}"] = PartialInjection.of(sorted({(tp[p], tp[t]) for tp in seq}))
        assert funcs[f"f_{t}"].is_injective
    preds = {"s0": frozenset({pat.mask}), "s1": frozenset(codes)}
    vocab = SimpleVocabulary(tuple(consts), ("s0", "s1"), tuple(funcs))
    model = SimpleModel(u, vocab, consts, preds, funcs, {})
    return CodingBundle(model, theta_formula(n), codes, pat)


@dataclass(frozen=True)
class CodingCheck:
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def verify_coding(b: CodingBundle, seq: Sequence[Sequence[int]]) -> CodingCheck:
    """Exhaustive check: theta(c, a) iff c = code_i and a = seq_i for some i."""
    expected = {(c,) + tuple(t) for c, t in zip(b.codes, seq)}
    f = compile_formula(b.model, b.theta, b.variables)
    env = {}
    for tup in product(range(b.model.size), repeat=len(b.variables)):
        env.update(zip(b.variables, tup))
        if f(env) != (tup in expected):
            return CodingCheck(False, tup)
    return CodingCheck(True)
