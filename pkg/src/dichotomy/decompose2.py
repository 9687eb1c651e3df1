"""Decompose a binary relation into constants, unary sets and partial injections.

Pipeline: parameter set A (greedy unless given), the classes of E_A, the S
relation, the enlarged set A*, class predicates for E over A*, an edge
coloring of S off A* into partial injections, majority tables with their
parts, and finally a quantifier-free defining formula over the atom basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .logic import (Formula, SplitFormula, compile_formula, conj, definable_relation, disj,
                    implies, neg, parse_formula, to_text)
from .logic.ast import App, Eq, Name, Rel, falsity, truth
from .splitting import (SRelation, greedy_splitting_set, heavy_source_bound, heavy_threshold,
                        l_star, per_target_bound, s_relation)
from .structures import (AnalysisParams, PartialInjection, RelationTable, SimpleModel,
                         SimpleVocabulary, Universe, validate_simple_model)
from .typelab import TypePartition, type_partition

DELTA = (SplitFormula(parse_formula("r(x,y)"), ("x",), ("y",)),)
# both directions, so a class over A* fixes r(a, -) and r(-, a) for every a in A*
DELTA_SYM = DELTA + (SplitFormula(parse_formula("r(y,x)"), ("x",), ("y",)),)


class MajorityTie(ValueError):
    """A strict majority does not exist: k is too small for this instance."""


class MajorityIdentityError(ValueError):
    """Some x in a big class disagrees with the majority without being an S-minority."""


class DeterminismError(ValueError):
    def __init__(self, msg, witness):
        super().__init__(msg)
        self.witness = witness


@dataclass(frozen=True)
class DecompositionParams:
    k: int = 1
    k2: int | None = None  # defaults to k
    a: frozenset | None = None

    def __post_init__(self):
        if self.k < 1 or (self.k2 is not None and self.k2 < 1):
            raise ValueError("k and k2 must be at least 1")

    @property
    def k2_value(self) -> int:
        return self.k if self.k2 is None else self.k2


def relation_model(size: int, r: RelationTable) -> SimpleModel:
    if r.arity != 2:
        raise ValueError("binary relation expected")
    return SimpleModel.from_relation(size, r)


# -- A* -----------------------------------------------------------------------

def build_a_star(m: SimpleModel, a: Iterable[int], p: DecompositionParams,
                 part: TypePartition | None = None, s: SRelation | None = None) -> frozenset:
    k, k2 = p.k, p.k2_value
    a = frozenset(a)
    part = part or type_partition(m, DELTA, a)
    s = s or s_relation(m, DELTA, a, k, 1, part)
    thr = heavy_threshold(1, k, k2, l_star(1, k))
    small = {x for c in part.classes if len(c) <= 2 * k for x in c}
    heavy = {x for x, d in s.out_degrees().items() if d > thr}
    return frozenset(a | small | heavy)


# -- coloring -----------------------------------------------------------------

def color_pairs(pairs: Iterable[tuple[int, int]]) -> list[PartialInjection]:
    """Greedy edge coloring: each edge in lexicographic order takes the least
    color free at its source and at its target."""
    out_used: dict[int, set] = {}
    in_used: dict[int, set] = {}
    colors: list[list] = []
    for x, y in sorted(pairs):
        used = out_used.setdefault(x, set()) | in_used.setdefault(y, set())
        c = 0
        while c in used:
            c += 1
        if c == len(colors):
            colors.append([])
        colors[c].append((x, y))
        out_used[x].add(c)
        in_used[y].add(c)
    pieces = [PartialInjection.of(c) for c in colors]
    for pc in pieces:
        assert not pc.violations(), pc
    return pieces


def color_s_relation(s: SRelation, excluded: Iterable[int] = ()) -> list[PartialInjection]:
    ex = frozenset(excluded)
    return color_pairs((x, y) for x, y in s.binary_pairs() if x not in ex and y not in ex)


# -- majority -----------------------------------------------------------------

@dataclass(frozen=True)
class MajorityTable:
    big_classes: tuple  # B_i
    t_values: dict  # (y, i) -> bool
    parts: tuple  # per i: dict vector index j -> frozenset of y in B_i

    def vector(self, y: int) -> tuple:
        return tuple(self.t_values[(y, i)] for i in range(len(self.big_classes)))

    def as_dict(self):
        n = len(self.big_classes)
        return {"big_classes": [sorted(b) for b in self.big_classes],
                "t_values": {str(y): [self.t_values[(y, i)] for i in range(n)]
                             for y in sorted({y for y, _ in self.t_values})},
                "parts": [{str(j): sorted(ys) for j, ys in sorted(pr.items())} for pr in self.parts]}


def vector_index(v: Sequence[bool]) -> int:
    return sum(1 << i for i, t in enumerate(v) if t)


def majority_table(m: SimpleModel, big_classes: Sequence[Iterable[int]],
                   vote_classes: Sequence[Iterable[int]] | None = None,
                   s_pairs: frozenset | None = None, relation: str = "r") -> MajorityTable:
    """Majority value of r(-, y) over each class, for every y.

    Votes are taken over ``vote_classes`` (default: the big classes).  When
    ``s_pairs`` is given the identity R(x,y) = t(y,i) iff not xSy is checked
    for every x in B_i.
    """
    big = tuple(frozenset(b) for b in big_classes)
    votes = big if vote_classes is None else tuple(frozenset(c) for c in vote_classes)
    r = m.relation_values[relation].tuples
    t = {}
    for i, c in enumerate(votes):
        for y in range(m.size):
            yes = sum(1 for x in c if (x, y) in r)
            if 2 * yes == len(c):
                raise MajorityTie(f"class not big enough for strict majority: class {sorted(c)}, y={y}")
            t[(y, i)] = 2 * yes > len(c)
    if s_pairs is not None:
        for i, b in enumerate(big):
            for x in b:
                for y in range(m.size):
                    if (((x, y) in r) == t[(y, i)]) == ((x, y) in s_pairs):
                        raise MajorityIdentityError(
                            f"majority identity fails at x={x}, y={y} (class {i})")
    parts = []
    for i, b in enumerate(big):
        groups: dict[int, set] = {}
        for y in sorted(b):
            groups.setdefault(vector_index([t[(y, i2)] for i2 in range(len(big))]), set()).add(y)
        parts.append({j: frozenset(ys) for j, ys in groups.items()})
    return MajorityTable(big, t, tuple(parts))


# -- the decomposition --------------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    model: SimpleModel
    atom_basis: tuple  # of Formula over x, y
    a: frozenset
    a_star: frozenset
    majority: MajorityTable | None
    params: DecompositionParams
    stats: dict = field(default_factory=dict)
    checks: tuple = ()  # (name, passed, detail)
    defining_formula: Formula | None = None

    def as_dict(self, with_formula: bool = True) -> dict:
        out = {"k": self.params.k, "k2": self.params.k2_value, "a": sorted(self.a),
               "a_star": sorted(self.a_star), "stats": dict(self.stats),
               "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in self.checks],
               "atom_basis": [to_text(f) for f in self.atom_basis]}
        if with_formula and self.defining_formula is not None:
            out["defining_formula"] = to_text(self.defining_formula)
        return out


def atom_basis(vocab: SimpleVocabulary, constants: Sequence[str]) -> list[Formula]:
    """x=c, y=c, s(x), s(y), f(x)=y, f(y)=x, f(x)=c, f(c)=y (no composition)."""
    x, y = Name("x"), Name("y")
    out: list[Formula] = []
    for c in constants:
        out += [Eq(x, Name(c)), Eq(y, Name(c))]
    for s in vocab.unary_predicates:
        out += [Rel(s, (x,)), Rel(s, (y,))]
    for f in vocab.unary_functions:
        out += [Eq(App(f, x), y), Eq(App(f, y), x)]
        for c in constants:
            out += [Eq(App(f, x), Name(c)), Eq(App(f, Name(c)), y)]
    return out


def phi_types(model: SimpleModel, basis: Sequence[Formula]) -> dict[tuple, tuple]:
    """Pair (x, y) -> truth vector over the basis."""
    fns = [compile_formula(model, f, ("x", "y")) for f in basis]
    out = {}
    for x, y in product(range(model.size), repeat=2):
        env = {"x": x, "y": y}
        out[(x, y)] = tuple(f(env) for f in fns)
    return out


def determinism_witness(types: dict, r: RelationTable):
    seen: dict = {}
    for pair in sorted(types):
        v = types[pair]
        val = pair in r.tuples
        if v in seen and seen[v][1] != val:
            return seen[v][0], pair
        seen.setdefault(v, (pair, val))
    return None


def _decompose_once(u: Universe, r: RelationTable, p: DecompositionParams) -> Decomposition:
    m = relation_model(u.size, r)
    k, k2 = p.k, p.k2_value
    if p.a is not None:
        a = frozenset(p.a)
    else:
        a = greedy_splitting_set(m, DELTA, k, 1).a
    part = type_partition(m, DELTA, a)
    s = s_relation(m, DELTA, a, k, 1, part)
    a_star = build_a_star(m, a, p, part, s)
    star_part = type_partition(m, DELTA_SYM, a_star)
    pieces = color_s_relation(s, a_star)

    big_full = [c for c in part.classes if len(c) > 2 * k and c - a_star]
    big = [c - a_star for c in big_full]
    table = majority_table(m, big, big_full, s.binary_pairs())

    const_names = [f"c_{x}" for x in sorted(a_star)]
    consts = {f"c_{x}": x for x in a_star}
    preds = {f"e_{i}": c for i, c in enumerate(star_part.classes)}
    for i, pr in enumerate(table.parts):
        for j, ys in sorted(pr.items()):
            preds[f"b_{i}_{j}"] = ys
    funcs = {f"f_{i}": pc for i, pc in enumerate(pieces)}
    consts_all = dict(consts, c_true=0, c_d=0)
    vocab = SimpleVocabulary(tuple(const_names) + ("c_true", "c_d"), tuple(preds), tuple(funcs))
    model = SimpleModel(u, vocab, consts_all, preds, funcs, {})
    basis = tuple(atom_basis(vocab, const_names))

    sizes_pred = max((len(v) for v in preds.values()), default=0)
    sizes_fn = max((len(v) for v in funcs.values()), default=0)
    sb = s.binary_pairs()
    off = [(x, y) for x, y in sb if x not in a_star and y not in a_star]
    max_out = max((sum(1 for e in off if e[0] == x) for x, _ in off), default=0)
    max_in = max((sum(1 for e in off if e[1] == y) for _, y in off), default=0)

    ka = max(k, len(a))
    ls = l_star(1, ka)
    bound_star = len(a) + ls + heavy_source_bound(1, ka, k2, ls)
    bound_pieces = heavy_threshold(1, k, k2, l_star(1, k)) + per_target_bound(1, k, l_star(1, k))
    checks = [
        ("coloring_union", set().union(*(set(pc.pairs) for pc in pieces)) == set(off), "pieces cover S off A*"),
        ("coloring_greedy_bound", len(pieces) <= max(0, max_out + max_in - 1),
         f"{len(pieces)} pieces, max out {max_out}, max in {max_in}"),
        ("pieces_bound", len(pieces) <= bound_pieces, f"{len(pieces)} <= {bound_pieces}"),
        ("a_star_bound", len(a_star) <= bound_star, f"|A*|={len(a_star)} <= {bound_star}"),
        ("simple_model", not validate_simple_model(model, AnalysisParams(sizes_pred, sizes_fn, k, k2)),
         f"lambda0={sizes_pred}, lambda1={sizes_fn}"),
    ]
    stats = {"universe": u.size, "a_size": len(a), "a_star_size": len(a_star),
             "e_a_classes": len(part.classes), "e_a_star_classes": len(star_part.classes),
             "big_classes": len(big), "pieces": len(pieces), "part_predicates": len(preds) - len(star_part.classes),
             "atom_basis_size": len(basis), "s_pairs": len(sb), "s_pairs_off_a_star": len(off),
             "m_star": bound_pieces}
    return Decomposition(model, basis, a, a_star, table, p, stats, tuple(checks))


@dataclass(frozen=True)
class AutoResult:
    decomposition: Decomposition
    attempts: tuple  # (k, reason) for each rejected k

    @property
    def k(self) -> int:
        return self.decomposition.params.k


def build_simple_decomposition(u: Universe, r: RelationTable, p: DecompositionParams | None = None,
                               auto: bool = False) -> Decomposition:
    """Run the pipeline; the Phi-type of (x, y) is checked to determine r(x, y).

    With ``auto`` the parameters start at k = k2 = 1 (or ``p.k``) and k rises
    after every majority tie or identity failure.  The final model records
    the rejected attempts in ``stats['attempts']``.
    """
    p = p or DecompositionParams()
    if not auto:
        dec = _decompose_once(u, r, p)
        return _with_determinism(dec, r)
    attempts = []
    k = p.k
    while True:
        q = DecompositionParams(k, k if p.k2 is None else max(p.k2, k), p.a)
        try:
            dec = _with_determinism(_decompose_once(u, r, q), r)
        except (MajorityTie, MajorityIdentityError, DeterminismError) as e:
            attempts.append([k, type(e).__name__])
            if 2 * k >= u.size and p.a is None:
                raise  # A* is already the whole universe; nothing left to escalate
            k += 1
            continue
        dec.stats["attempts"] = attempts
        return dec


def _with_determinism(dec: Decomposition, r: RelationTable) -> Decomposition:
    types = phi_types(dec.model, dec.atom_basis)
    w = determinism_witness(types, r)
    if w is not None:
        raise DeterminismError(f"pairs {w[0]} and {w[1]} share a Phi-type but differ on r", w)
    dec.stats["realized_types"] = len(set(types.values()))
    return dec


def _literal(f: Formula, v: bool) -> Formula:
    return f if v else neg(f)


def synthesize_defining_formula(dec: Decomposition, r: RelationTable) -> Formula:
    """(c_d = c_true) -> chi, where chi lists the realized positive Phi-types."""
    if dec.model.size == 1:
        phi = truth("x") if (0, 0) in r.tuples else falsity("x")
        object.__setattr__(dec, "defining_formula", phi)
        return phi
    types = phi_types(dec.model, dec.atom_basis)
    w = determinism_witness(types, r)
    if w is not None:
        raise DeterminismError(f"pairs {w[0]} and {w[1]} share a Phi-type but differ on r", w)
    positive = sorted({types[pr] for pr in r.tuples}, reverse=True)
    chi = disj([conj([_literal(f, v) for f, v in zip(dec.atom_basis, vec)], empty=truth("x"))
                for vec in positive], empty=falsity("x"))
    phi = implies(Eq(Name("c_d"), Name("c_true")), chi)
    object.__setattr__(dec, "defining_formula", phi)
    return phi


UNIFORM_MAX_BASIS = 3


def uniform_defining_formula(dec: Decomposition, r: RelationTable) -> tuple[Formula, SimpleModel]:
    """The conjunction over every set D of Phi-type vectors, with one constant per D.

    c_D names element 0 (as c_true does) exactly when D is the realized set,
    and element 1 otherwise; needs |U| >= 2 and a small basis.
    """
    basis = dec.atom_basis
    if len(basis) > UNIFORM_MAX_BASIS:
        raise ValueError(f"uniform formula only for |Phi| <= {UNIFORM_MAX_BASIS}, got {len(basis)}")
    if dec.model.size < 2:
        raise ValueError("uniform formula needs at least two elements")
    types = phi_types(dec.model, basis)
    d_u = frozenset(types[pr] for pr in r.tuples)
    cells = sorted(product((False, True), repeat=len(basis)), reverse=True)
    parts, consts = [], {}
    for mask in range(1 << len(cells)):
        d = frozenset(c for i, c in enumerate(cells) if mask >> i & 1)
        name = f"c_u{mask}"
        consts[name] = 0 if d == d_u else 1
        chi = disj([conj([_literal(f, v) for f, v in zip(basis, vec)], empty=truth("x"))
                    for vec in sorted(d, reverse=True)], empty=falsity("x"))
        parts.append(implies(Eq(Name(name), Name("c_true")), chi))
    model = dec.model.with_(constants=consts)
    return conj(parts), model


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    counterexamples: tuple = ()

    def __bool__(self):
        return self.ok


def verify_decomposition(dec: Decomposition | SimpleModel, phi: Formula, r: RelationTable,
                         limit: int = 10) -> VerifyResult:
    model = dec.model if isinstance(dec, Decomposition) else dec
    got = definable_relation(model, phi, ["x", "y"]).tuples
    diff = sorted(got ^ r.tuples)
    return VerifyResult(not diff, tuple(diff[:limit]))


def decompose_and_verify(u: Universe, r: RelationTable, p: DecompositionParams | None = None,
                         auto: bool = True):
    dec = build_simple_decomposition(u, r, p, auto=auto)
    phi = synthesize_defining_formula(dec, r)
    return dec, phi, verify_decomposition(dec, phi, r)
