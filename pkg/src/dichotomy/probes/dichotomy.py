"""Trend probe: k_delta and decomposition statistics across a family of instances."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..decompose2 import decompose_and_verify
from ..logic import to_text
from ..typelab import BudgetExceeded, DEFAULT_K_BUDGET, DeltaSet, delta_text, k_delta
from .families import FamilyDescriptor, Instance

VERDICT_POLICY = ("verdict thresholds are tool policy: 'growing' needs k_delta strictly increasing "
                  "on the three largest sizes; 'bounded' needs the maximum attained at least twice "
                  "(so never only at the largest size); anything else is 'inconclusive'")
LOWER_BOUND_NOTE = ("k_delta is computed on the bare model only, so it is a lower bound on the "
                    "maximum over all simple expansions")


def verdict(sizes: list[int], ks: list[int | None]) -> tuple[str, str]:
    """Pure function of the per-instance k_delta vector (in family order)."""
    vals = [(s, k) for s, k in zip(sizes, ks) if k is not None]
    if not vals:
        return "inconclusive", "no instance produced k_delta"
    vals.sort(key=lambda sk: sk[0])
    top = [k for _, k in vals[-3:]]
    if len(top) == 3 and top[0] < top[1] < top[2]:
        return "growing", f"k_delta strictly increases on the top sizes: {top}"
    hi = max(k for _, k in vals)
    at = [s for s, k in vals if k == hi]
    if len(at) >= 2:
        return "bounded", f"maximum {hi} attained at sizes {at}"
    return "inconclusive", f"maximum {hi} attained only at size {at[0]}"


@dataclass
class InstanceRecord:
    label: str
    size: int
    lambda0: int
    lambda1: int
    k_delta: int | None = None
    witness: list = field(default_factory=list)
    evaluated: int = 0
    exact: bool = True
    decomposition: dict | None = None
    failure: str | None = None

    def as_dict(self):
        return {"label": self.label, "size": self.size, "lambda0": self.lambda0, "lambda1": self.lambda1,
                "k_delta": self.k_delta, "k_delta_is_lower_bound": True, "witness": self.witness,
                "parameter_sets_evaluated": self.evaluated, "exact": self.exact,
                "decomposition": self.decomposition, "failure": self.failure}


@dataclass
class ProbeReport:
    delta: str
    records: list
    verdict: str
    evidence: str

    @property
    def k_vector(self) -> list:
        return [r.k_delta for r in self.records]

    def as_dict(self):
        return {"delta": self.delta, "instances": [r.as_dict() for r in self.records],
                "k_delta_vector": self.k_vector, "verdict": self.verdict, "evidence": self.evidence,
                "policy": VERDICT_POLICY, "note": LOWER_BOUND_NOTE}


def _decomposition_stats(inst: Instance) -> dict | None:
    m = inst.model
    rels = dict(m.relation_values)
    if set(rels) != {"r"} or rels["r"].arity != 2 or m.vocabulary.constants or \
            m.vocabulary.unary_predicates or m.vocabulary.unary_functions:
        return None  # only bare binary-relation instances are decomposed
    dec, phi, ver = decompose_and_verify(m.universe, rels["r"])
    return {"k": dec.params.k, "verified": ver.ok, "a": sorted(dec.a), "a_star_size": len(dec.a_star),
            "attempts": dec.stats.get("attempts", []),
            "failed_checks": [n for n, ok, _ in dec.checks if not ok],
            "formula_size": len(to_text(phi))}


def probe_instance(inst: Instance, d: DeltaSet, budget: int = DEFAULT_K_BUDGET,
                   decompose: bool = True) -> InstanceRecord:
    rec = InstanceRecord(inst.label, inst.size, inst.lambda0, inst.lambda1)
    try:
        res = k_delta(inst.model, d, inst.lambda0, budget)
        rec.k_delta, rec.witness, rec.evaluated = res.k, sorted(res.witness), res.evaluated
    except BudgetExceeded as e:
        rec.k_delta, rec.witness, rec.exact = e.lower_bound, sorted(e.witness), False
        rec.failure = str(e)
    except Exception as e:  # recorded; the probe continues with the next instance
        rec.failure = f"{type(e).__name__}: {e}"
        return rec
    if decompose:
        try:
            rec.decomposition = _decomposition_stats(inst)
        except Exception as e:
            rec.failure = f"decomposition failed: {type(e).__name__}: {e}"
    return rec


def dichotomy_probe(fam: FamilyDescriptor, d: DeltaSet, budget: int = DEFAULT_K_BUDGET,
                    decompose: bool = True) -> ProbeReport:
    records = [probe_instance(inst, d, budget, decompose) for inst in fam.instances()]
    v, why = verdict([r.size for r in records], [r.k_delta for r in records])
    return ProbeReport(delta_text(d), records, v, why)
