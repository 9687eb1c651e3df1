"""Bounded arithmetic from isomorphic copies of an n-big equivalence relation.

Demo shape: a base partition of n*n elements into n classes of n.  Element
coordinates (i, j) come from the base (class index, rank inside the class).
The copy pool holds four partitions with n classes of n each:

    rows i,  columns j,  diagonals (j - i) mod n,  anti-diagonals (i + j) mod n

Numbers are the elements of one diagonal class.  A fixed template family,
parameterized by which pool copy plays each role, three element parameters
and an unrolling depth, defines zero, successor, addition and
multiplication; the search returns the first candidate the verifier accepts.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import permutations, product
from typing import Sequence

from ..logic import Formula, definable_relation, parse_formula, to_text
from ..logic.ast import Eq, Name, Not, Rel, conj, disj, exists
from ..structures import RelationTable, SimpleModel, SimpleVocabulary, Universe, apply_permutation

ROLES = ("e0", "e1", "e2", "e3")
PARAMS = ("p0", "p1", "p2")


@dataclass(frozen=True)
class EquivalencePartition:
    size: int
    classes: tuple  # frozensets ordered by least element

    @classmethod
    def from_labels(cls, labels: Sequence) -> "EquivalencePartition":
        groups: dict = {}
        for x, lab in enumerate(labels):
            groups.setdefault(lab, set()).add(x)
        return cls(len(labels), tuple(sorted((frozenset(g) for g in groups.values()), key=min)))

    @classmethod
    def from_lists(cls, size: int, classes) -> "EquivalencePartition":
        cl = tuple(sorted((frozenset(c) for c in classes), key=min))
        if sorted(x for c in cl for x in c) != list(range(size)):
            raise ValueError("classes must partition the universe")
        return cls(size, cl)

    def pairs(self) -> RelationTable:
        return RelationTable.of(2, [(x, y) for c in self.classes for x in c for y in c])

    def size_profile(self) -> list[int]:
        return sorted(len(c) for c in self.classes)

    def bigness(self) -> int:
        sizes = sorted((len(c) for c in self.classes), reverse=True)
        return max((min(j, s) for j, s in enumerate(sizes, start=1)), default=0)

    def as_lists(self):
        return [sorted(c) for c in self.classes]


def grid_base(n: int) -> EquivalencePartition:
    return EquivalencePartition.from_labels([e // n for e in range(n * n)])


def coordinates(base: EquivalencePartition) -> dict[int, tuple[int, int]]:
    return {x: (i, j) for i, c in enumerate(base.classes) for j, x in enumerate(sorted(c))}


def copy_pool(base: EquivalencePartition, n: int) -> list[EquivalencePartition]:
    co = coordinates(base)
    keys = [lambda i, j: i, lambda i, j: j, lambda i, j: (j - i) % n, lambda i, j: (i + j) % n]
    return [EquivalencePartition.from_labels([key(*co[x]) for x in range(base.size)]) for key in keys]


def isomorphism_witness(base: EquivalencePartition, other: EquivalencePartition) -> tuple | None:
    """A permutation sending base's classes onto other's, when the size profiles agree."""
    if base.size != other.size or base.size_profile() != other.size_profile():
        return None
    src = sorted(base.classes, key=lambda c: (len(c), min(c)))
    dst = sorted(other.classes, key=lambda c: (len(c), min(c)))
    perm = [0] * base.size
    for a, b in zip(src, dst):
        for x, y in zip(sorted(a), sorted(b)):
            perm[x] = y
    perm = tuple(perm)
    if apply_permutation(base.pairs(), perm) != other.pairs():
        return None
    return perm


# -- templates ----------------------------------------------------------------

def _r(name, *args):
    return Rel(name, tuple(Name(a) for a in args))


def _eq(a, b):
    return Eq(Name(a), Name(b))


def dom(v: str) -> Formula:
    return _r("e2", v, "p0")


def zero_formula() -> Formula:
    return _eq("x", "p0")


def succ_body(x: str, y: str, w: str) -> Formula:
    return conj([dom(x), dom(y), Not(_eq(x, "p2")),
                 exists(w, conj([_r("e2", w, "p1"), _r("e0", w, x), _r("e1", w, y)]))])


def plusmod_body(x: str, y: str, z: str, w: str, v: str) -> Formula:
    return conj([dom(x), dom(y), dom(z),
                 exists(w, exists(v, conj([_r("e0", w, x), _r("e1", w, y), _r("e3", w, v),
                                           _r("e1", v, "p0"), _r("e0", v, z)])))])


def le_body(x: str, z: str, depth: int, tag: str) -> Formula:
    """x <= z in the successor order, by chains of at most ``depth`` steps."""
    names = [x] + [f"u{tag}{t}" for t in range(1, depth + 1)]
    f = _eq(names[-1], z)
    for t in range(depth, 0, -1):
        a, b = names[t - 1], names[t]
        f = disj([_eq(a, z), exists(b, conj([succ_body(a, b, f"w{tag}{t}"), f]))])
    return f


def plus_body(x: str, y: str, z: str, depth: int, tag: str = "") -> Formula:
    return conj([plusmod_body(x, y, z, f"wp{tag}", f"vp{tag}"), le_body(x, z, depth, f"l{tag}")])


def times_body(x: str, y: str, z: str, depth: int) -> Formula:
    ys, zs = [y], [z]
    for t in range(1, depth + 1):
        ys.append(f"ty{t}")
        zs.append(f"tz{t}")
    # times_t(x, ys[d-t], zs[d-t]) built from the innermost level outwards
    f = conj([_eq(ys[depth], "p0"), _eq(zs[depth], "p0")])
    for t in range(depth, 0, -1):
        yo, zo, yi, zi = ys[t - 1], zs[t - 1], ys[t], zs[t]
        step = exists(yi, exists(zi, conj([dom(yi), dom(zi), succ_body(yi, yo, f"ws{t}"),
                                           plus_body(zi, x, zo, depth, f"t{t}"), f])))
        f = disj([conj([_eq(yo, "p0"), _eq(zo, "p0")]), step])
    return conj([dom(x), dom(y), dom(z), f])


def template_formulas(depth: int) -> dict[str, Formula]:
    return {"zero": zero_formula(), "succ": succ_body("x", "y", "w"),
            "plus": plus_body("x", "y", "z", depth), "times": times_body("x", "y", "z", depth)}


FREE = {"zero": ("x",), "succ": ("x", "y"), "plus": ("x", "y", "z"), "times": ("x", "y", "z")}


# -- witness and verification -------------------------------------------------

@dataclass(frozen=True)
class ArithWitness:
    n: int
    base: EquivalencePartition
    copies: tuple  # EquivalencePartition per role e0..e3
    formulas: dict  # zero/succ/plus/times -> Formula
    parameters: tuple  # elements for p0, p1, p2
    depth: int = 0
    pool_roles: tuple = ()  # index into the copy pool for each role

    def model(self) -> SimpleModel:
        u = Universe(self.base.size)
        rels = {r: c.pairs() for r, c in zip(ROLES, self.copies)}
        consts = dict(zip(PARAMS, self.parameters))
        voc = SimpleVocabulary(PARAMS, (), (), tuple((r, 2) for r in ROLES))
        return SimpleModel(u, voc, consts, {}, {}, rels)

    def as_dict(self) -> dict:
        return {"n": self.n, "base": self.base.as_lists(), "copies": [c.as_lists() for c in self.copies],
                "parameters": list(self.parameters), "depth": self.depth, "pool_roles": list(self.pool_roles),
                "formulas": {k: to_text(v) for k, v in sorted(self.formulas.items())}}

    @classmethod
    def from_dict(cls, d: dict) -> "ArithWitness":
        size = sum(len(c) for c in d["base"])
        return cls(d["n"], EquivalencePartition.from_lists(size, d["base"]),
                   tuple(EquivalencePartition.from_lists(size, c) for c in d["copies"]),
                   {k: parse_formula(v) for k, v in d["formulas"].items()}, tuple(d["parameters"]),
                   d.get("depth", 0), tuple(d.get("pool_roles", ())))


def arithmetic_tables(n: int) -> dict[str, set]:
    """True partial arithmetic on 0..n-1 (results >= n are undefined)."""
    return {"succ": {(i, i + 1) for i in range(n - 1)},
            "plus": {(a, b, a + b) for a in range(n) for b in range(n) if a + b < n},
            "times": {(a, b, a * b) for a in range(n) for b in range(n) if a * b < n}}


@dataclass(frozen=True)
class ArithCheck:
    ok: bool
    reasons: tuple = ()
    decoded: tuple = ()  # element representing each number

    def __bool__(self):
        return self.ok


def _decode(model: SimpleModel, formulas: dict, n: int):
    zeros = definable_relation(model, formulas["zero"], FREE["zero"]).tuples
    if len(zeros) != 1:
        return None, f"zero defines {len(zeros)} elements"
    succ = definable_relation(model, formulas["succ"], FREE["succ"]).tuples
    nums = [next(iter(zeros))[0]]
    for i in range(n - 1):
        nxt = [y for x, y in succ if x == nums[-1]]
        if len(nxt) != 1 or nxt[0] in nums:
            return None, f"number {i} has successors {sorted(nxt)}"
        nums.append(nxt[0])
    want = {(nums[i], nums[i + 1]) for i in range(n - 1)}
    if set(succ) != want:
        return None, f"successor graph has extra pairs {sorted(set(succ) - want)[:4]}"
    return nums, ""


def verify_arithmetic_interpretation(w: ArithWitness) -> ArithCheck:
    reasons = []
    n = w.n
    if len(w.copies) != len(ROLES) or len(w.parameters) != len(PARAMS):
        return ArithCheck(False, ("witness needs four copies and three parameters",))
    for r, c in zip(ROLES, w.copies):
        if isomorphism_witness(w.base, c) is None:
            reasons.append(f"copy {r} is not isomorphic to the base")
    if reasons:
        return ArithCheck(False, tuple(reasons))
    model = w.model()
    nums, why = _decode(model, w.formulas, n)
    if nums is None:
        return ArithCheck(False, (why,))
    index = {e: i for i, e in enumerate(nums)}
    truth = arithmetic_tables(n)
    for op in ("plus", "times"):
        got = definable_relation(model, w.formulas[op], FREE[op]).tuples
        if any(e not in index for t in got for e in t):
            reasons.append(f"{op} relates non-numbers")
            continue
        dec = {tuple(index[e] for e in t) for t in got}
        if dec != truth[op]:
            miss, extra = sorted(truth[op] - dec), sorted(dec - truth[op])
            reasons.append(f"{op} table wrong: missing {miss[:3]}, extra {extra[:3]}")
    return ArithCheck(not reasons, tuple(reasons), tuple(nums))


# -- search -------------------------------------------------------------------

class SearchExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class ArithSearchResult:
    witness: ArithWitness | None
    candidates: int
    exhausted: bool  # True when the whole template family was tried without success

    def as_dict(self):
        return {"found": self.witness is not None, "candidates": self.candidates,
                "exhausted": self.exhausted,
                "witness": self.witness.as_dict() if self.witness else None,
                "note": "bounded template search with three element parameters, verified exactly"}


def search_arithmetic_interpretation(base: EquivalencePartition, n: int,
                                     budget: int = 1_000_000) -> ArithSearchResult:
    """Roles (pool permutations), then parameter triples, then depth, all in lexicographic order."""
    if base.size != n * n or base.size_profile() != [n] * n:
        raise ValueError(f"base must have {n} classes of {n} elements")
    if base.bigness() < n:
        raise ValueError(f"base is not {n}-big")
    pool = copy_pool(base, n)
    tried = 0
    u = range(base.size)
    for roles in permutations(range(len(pool)), len(ROLES)):
        copies = tuple(pool[i] for i in roles)
        for params in product(u, repeat=len(PARAMS)):
            tried += 1
            if tried > budget:
                return ArithSearchResult(None, tried - 1, False)
            draft = ArithWitness(n, base, copies, template_formulas(0), params, 0, roles)
            if _decode(draft.model(), draft.formulas, n)[0] is None:
                continue
            for depth in range(1, n + 1):
                w = replace(draft, formulas=template_formulas(depth), depth=depth)
                if verify_arithmetic_interpretation(w):
                    return ArithSearchResult(w, tried, False)
    return ArithSearchResult(None, tried, True)


# -- mutations ----------------------------------------------------------------

def _wrong_sizes(p: EquivalencePartition) -> EquivalencePartition:
    cl = list(p.classes)
    merged = [cl[0] | cl[1]] + cl[2:] if len(cl) > 1 else [frozenset([0]), cl[0] - {0}]
    return EquivalencePartition.from_lists(p.size, [c for c in merged if c])


def mutate_witness(w: ArithWitness) -> list[tuple[str, ArithWitness]]:
    """Twenty perturbations each of which must be rejected (n >= 2)."""
    f = w.formulas
    params = w.parameters
    out = []

    def with_f(label, **changes):
        out.append((label, replace(w, formulas={**f, **changes})))

    with_f("swap plus and times", plus=f["times"], times=f["plus"])
    with_f("times defined as plus", times=f["plus"])
    with_f("plus defined as times", plus=f["times"])
    with_f("zero at p2", zero=_eq("x", "p2"))
    with_f("zero is the whole number domain", zero=dom("x"))
    with_f("successor without its end guard",
           succ=conj([dom("x"), dom("y"), exists("w", conj([_r("e2", "w", "p1"), _r("e0", "w", "x"),
                                                              _r("e1", "w", "y")]))]))
    with_f("successor reversed", succ=succ_body("y", "x", "w"))
    with_f("plus without the overflow check", plus=plusmod_body("x", "y", "z", "w", "v"))
    with_f("plus with depth 0", plus=plus_body("x", "y", "z", 0))
    with_f("times with depth 0", times=times_body("x", "y", "z", 0))
    with_f("times negated", times=conj([dom("x"), dom("y"), dom("z"), Not(f["times"])]))
    for i, r in enumerate(ROLES):
        copies = list(w.copies)
        copies[i] = _wrong_sizes(copies[i])
        out.append((f"copy {r} with wrong class sizes", replace(w, copies=tuple(copies))))
    out.append(("base with wrong class sizes", replace(w, base=_wrong_sizes(w.base))))
    copies = list(w.copies)
    copies[2] = w.copies[0]
    out.append(("diagonal copy replaced by the row copy", replace(w, copies=tuple(copies))))
    out.append(("p1 moved onto p0", replace(w, parameters=(params[0], params[0], params[2]))))
    out.append(("p2 moved onto p0", replace(w, parameters=(params[0], params[1], params[0]))))
    out.append(("claims n+1 numbers", replace(w, n=w.n + 1)))
    assert len(out) == 20, len(out)
    return out
