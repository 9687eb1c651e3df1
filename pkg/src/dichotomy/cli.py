"""Command-line entry point.  Every subcommand writes one JSON report.

Exit status: 0 when every verification passed, 1 on a verification failure
(the report carries the witnesses), 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .logic import FormulaSyntaxError, definable_relation, free_variables, parse_formula, to_text
from .structures import StructureError, load_structure, structure_to_dict

SCHEMA = 1


class InputError(Exception):
    """Bad input files or arguments (exit 2)."""


@dataclass
class RunConfig:
    subcommand: str
    args: dict = field(default_factory=dict)
    seed: int = 0
    out: str | None = None

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        skip = {"subcommand", "seed", "out", "func"}
        return cls(ns.subcommand, {k: v for k, v in sorted(vars(ns).items()) if k not in skip}, ns.seed, ns.out)

    def echo(self) -> dict:
        return {"subcommand": self.subcommand, "seed": self.seed, **self.args}


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _read_json(path):
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None


def _load(path):
    if not Path(path).exists():
        raise InputError(f"cannot read {path}: no such file")
    return load_structure(path)


def _delta(path):
    from .typelab import parse_delta
    if path is None:
        from .decompose2 import DELTA
        return DELTA
    return parse_delta(_read_text(path))


def _ints(text):
    if text is None:
        return None
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def _vars(text):
    return [v.strip() for v in text.split(",") if v.strip()] if text else None


# -- subcommands: each returns (ok, result dict) ------------------------------

def cmd_eval(cfg: RunConfig):
    sf = _load(cfg.args["input"])
    m = sf.model
    phi = parse_formula(cfg.args["formula"])
    vs = _vars(cfg.args["vars"]) or sorted(free_variables(phi, m.vocabulary.names()))
    rel = definable_relation(m, phi, vs)
    if not vs:
        return True, {"formula": to_text(phi), "variables": [], "result": bool(rel.tuples)}
    return True, {"formula": to_text(phi), "variables": vs, "count": len(rel.tuples),
                  "result": [list(t) for t in rel.sorted()]}


def cmd_analyze(cfg: RunConfig):
    from .logic import definable_relation as dr
    from .splitting import greedy_splitting_set, verify_split_bounds
    from .typelab import (delta_text, dump_partition, interpret_equivalence_formula, k_delta,
                          max_param_arity, type_partition)
    sf = _load(cfg.args["input"])
    m = sf.model
    d = _delta(cfg.args["delta"])
    lam0 = cfg.args["lambda0"] if cfg.args["lambda0"] is not None else sf.params().lambda0
    kd = k_delta(m, d, lam0, cfg.args["budget"])
    a = _ints(cfg.args["a"])
    a = sorted(kd.witness) if a is None else a
    part = type_partition(m, d, a)
    psi = interpret_equivalence_formula(d)
    marker_free = "s" not in m.vocabulary.names()
    psi_ok = None
    if marker_free:
        psi_ok = dr(m.with_(predicates={"s": a}), psi, ["x1", "x2"]).tuples == part.pairs()
    out = {"delta": delta_text(d), "lambda0": lam0,
           "k_delta": {**kd.as_dict(), "is_lower_bound": True},
           "a": a, "partition": dump_partition(part), "psi": to_text(psi), "psi_agrees": psi_ok}
    ok = psi_ok is not False
    if cfg.args["k"] is not None:
        cert = greedy_splitting_set(m, d, cfg.args["k"])
        out["certificate"] = cert.as_dict()
        ok = ok and all(cert.check(n).passed for n in ("size", "split", "few_heavy_types"))
        if max(1, max_param_arity(d)) == 1:
            rep = verify_split_bounds(m, d, cert.a)
            out["bounds"] = rep.as_dict()
            ok = ok and rep.passed
    return ok, out


def cmd_decompose(cfg: RunConfig):
    from .decompose2 import DecompositionParams, DeterminismError, MajorityIdentityError, MajorityTie, \
        decompose_and_verify, uniform_defining_formula, verify_decomposition
    sf = _load(cfg.args["input"])
    name = cfg.args["relation"]
    r = sf.model.relation_values.get(name)
    if r is None or r.arity != 2:
        raise InputError(f"structure has no binary relation {name!r}")
    p = DecompositionParams(cfg.args["k"], cfg.args["k2"], _ints(cfg.args["a"]))
    try:
        dec, phi, ver = decompose_and_verify(sf.model.universe, r, p, auto=cfg.args["auto"])
    except (MajorityTie, MajorityIdentityError, DeterminismError) as e:
        # the construction itself failed at these parameters: a verification failure, not bad input
        return False, {"verified": False, "failure": type(e).__name__, "detail": str(e),
                       "params": {"k": p.k, "k2": p.k2, "a": sorted(p.a) if p.a is not None else None}}
    res = dec.as_dict(with_formula=False)
    res["stats"]["k"] = dec.params.k
    res["defining_formula"] = to_text(phi)
    res["model_constants"] = dict(sorted(dec.model.constant_values.items()))
    res["model_predicates"] = {k: sorted(v) for k, v in sorted(dec.model.predicate_values.items())}
    res["model_functions"] = {k: [list(p) for p in v.pairs] for k, v in sorted(dec.model.function_values.items())}
    if cfg.args["emit_model"]:
        Path(cfg.args["emit_model"]).write_text(json.dumps(structure_to_dict(dec.model), indent=2, sort_keys=True)
                                                + "\n", encoding="utf-8")
    if cfg.args["emit_formula"]:
        Path(cfg.args["emit_formula"]).write_text(to_text(phi) + "\n", encoding="utf-8")
    res["verified"] = ver.ok
    res["counterexamples"] = [list(c) for c in ver.counterexamples]
    ok = ver.ok
    if cfg.args["uniform"]:
        try:
            uphi, umodel = uniform_defining_formula(dec, r)
            uver = verify_decomposition(umodel, uphi, r)
            res["uniform"] = {"formula": to_text(uphi), "verified": uver.ok}
            ok = ok and uver.ok
        except ValueError as e:
            res["uniform"] = {"skipped": str(e)}
    return ok, res


def cmd_sunflower(cfg: RunConfig):
    from .structures import Universe
    from .sunflower import code_delta_system, delta_bound, extract_delta_system, verify_coding
    data = _read_json(cfg.args["input"])
    # a bare list, or {"n": 2, "tuples": [...]} ("sequence" is accepted for "tuples")
    seq = (data.get("tuples", data.get("sequence")) if isinstance(data, dict) else data)
    if not isinstance(seq, list) or not all(isinstance(t, list) and all(isinstance(v, int) for v in t)
                                            for t in seq):
        raise InputError("tuples must be a JSON list of integer lists")
    n = data.get("n") if isinstance(data, dict) and "n" in data else (len(seq[0]) if seq else 1)
    if not isinstance(n, int) or n < 1:
        raise InputError("n must be a positive integer")
    if any(len(t) != n for t in seq):
        raise InputError("tuples of mixed length")
    m = cfg.args["m"]
    e = extract_delta_system(seq, m, n)
    guaranteed = len(seq) >= delta_bound(n, m)
    out = {"n": n, "m": m, "length": len(seq), "delta_bound": delta_bound(n, m),
           "guaranteed": guaranteed, "found": e is not None}
    if e is None:
        return not guaranteed, out
    out["extraction"] = e.as_dict()
    ok = True
    if not cfg.args["no_code"]:
        sub = [tuple(seq[i]) for i in e.indices]
        size = cfg.args["universe"] or max([1 << n, n + 1] + [v + 1 for t in seq for v in t])
        b = code_delta_system(Universe(size), sub, e.pattern)
        chk = verify_coding(b, sub)
        out["coding"] = {"universe": size, "theta": to_text(b.theta), "codes": list(b.codes),
                         "constants": dict(sorted(b.model.constant_values.items())),
                         "verified": chk.ok, "counterexample": list(chk.witness) if chk.witness else None}
        ok = chk.ok
    return ok, out


def cmd_probe(cfg: RunConfig):
    from .probes.dichotomy import dichotomy_probe
    from .probes.families import FamilyDescriptor
    path = cfg.args["family"]
    if not Path(path).exists():
        raise InputError(f"cannot read {path}: no such file")
    fam = FamilyDescriptor.load(path)
    try:
        fam.instances()
    except (ValueError, OSError) as e:
        raise InputError(f"family instances do not load: {e}") from None
    rep = dichotomy_probe(fam, _delta(cfg.args["delta"]), cfg.args["budget"], not cfg.args["no_decompose"])
    ok = all(r.decomposition is None or r.decomposition["verified"] for r in rep.records)
    return ok, rep.as_dict()


def cmd_census(cfg: RunConfig):
    from .probes.census import count_census
    n, m = cfg.args["n"], cfg.args["m"]
    if n < 1 or m < 1:
        raise InputError("n and m must be positive")
    rep = count_census(n, m, cfg.args["cap"])
    d = rep.as_dict()
    d["values"] = {k: str(v) for k, v in d["values"].items()}  # exact digits, no precision loss in readers
    return rep.root_sufficient, d


def cmd_arith_search(cfg: RunConfig):
    from .probes.arith import (grid_base, mutate_witness, search_arithmetic_interpretation,
                               verify_arithmetic_interpretation)
    n = cfg.args["n"]
    if n < 1:
        raise InputError("n must be positive")
    res = search_arithmetic_interpretation(grid_base(n), n, cfg.args["budget"])
    out = res.as_dict()
    ok = True
    if res.witness is not None:
        chk = verify_arithmetic_interpretation(res.witness)
        out["verified"] = chk.ok
        out["decoded_numbers"] = list(chk.decoded)
        ok = chk.ok
        if cfg.args["mutations"]:
            accepted = [lab for lab, w in mutate_witness(res.witness) if verify_arithmetic_interpretation(w).ok]
            out["mutations"] = {"count": 20, "false_accepts": accepted}
            ok = ok and not accepted
    return ok, out


def cmd_config_search(cfg: RunConfig):
    from .probes.configs import find_matching_configuration, find_order_configuration, formula_variables
    sf = _load(cfg.args["input"])
    phi = parse_formula(cfg.args["formula"])
    vs = _vars(cfg.args["vars"]) or formula_variables(sf.model, phi)
    max_len = cfg.args["max_len"] or sf.model.size
    if cfg.args["kind"] == "order":
        xlen = cfg.args["xlen"]
        ylen = cfg.args["ylen"] if cfg.args["ylen"] is not None else len(vs) - xlen
        res = find_order_configuration(sf.model, phi, xlen, ylen, max_len, vs, cfg.args["budget"])
    else:
        res = find_matching_configuration(sf.model, phi, max_len, vs, cfg.args["levels"], cfg.args["budget"])
    out = {"kind": cfg.args["kind"], "formula": to_text(phi), "variables": vs, **res.as_dict(),
           "lower_bound_only": not res.exact}
    return True, out


def cmd_selftest(cfg: RunConfig):
    from .acceptance import run_acceptance
    results = run_acceptance(cfg.seed, lambda line: print(line, file=sys.stderr),
                             determinism=not cfg.args["no_determinism"])
    timing = cfg.args["timing"]
    return all(r.passed for r in results), {"criteria": [r.as_dict(timing) for r in results],
                                            "passed": sum(r.passed for r in results), "total": len(results)}


COMMANDS = {"eval": cmd_eval, "analyze": cmd_analyze, "decompose": cmd_decompose, "sunflower": cmd_sunflower,
            "probe": cmd_probe, "census": cmd_census, "arith-search": cmd_arith_search,
            "config-search": cmd_config_search, "selftest": cmd_selftest}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dichotomy", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for generated instances (default 0)")
    common.add_argument("--out", help="write the report here instead of stdout")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a formula on a structure")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--vars", help="comma-separated output variables (default: free variables, sorted)")

    p = sub.add_parser("analyze", parents=[common], help="types, k_delta, greedy certificate and bounds")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--delta", help="Delta file, one 'formula :: x ; params' per line (default r(x;y))")
    p.add_argument("--a", help="parameter set, comma-separated (default: the k_delta witness)")
    p.add_argument("--lambda0", type=int)
    p.add_argument("--k", type=int, help="run the greedy splitting construction with this k")
    p.add_argument("--budget", type=int, default=2_000_000, help="parameter sets examined by k_delta")

    p = sub.add_parser("decompose", parents=[common], help="simple decomposition of a binary relation")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--relation", default="r")
    p.add_argument("--auto", action="store_true", help="raise k until the decomposition determines r")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--k2", type=int)
    p.add_argument("--a", help="fixed parameter set A instead of the greedy one")
    p.add_argument("--uniform", action="store_true", help="also emit the uniform formula (small bases only)")
    p.add_argument("--emit-model", dest="emit_model", help="write the simple model as a structure file")
    p.add_argument("--emit-formula", dest="emit_formula", help="write the defining formula as text")

    p = sub.add_parser("sunflower", parents=[common], help="extract and code a delta system")
    p.add_argument("--in", dest="input", required=True, help="tuple file: a JSON list, or {\"n\": N, \"tuples\": [...]}")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--universe", type=int, help="universe size for the coding bundle")
    p.add_argument("--no-code", dest="no_code", action="store_true")

    p = sub.add_parser("probe", parents=[common], help="k_delta trend across a family")
    p.add_argument("--family", required=True)
    p.add_argument("--delta")
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--no-decompose", dest="no_decompose", action="store_true")

    p = sub.add_parser("census", parents=[common], help="exact counting thresholds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--cap", type=int, default=64)

    p = sub.add_parser("arith-search", parents=[common], help="bounded arithmetic from grid copies")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--budget", type=int, default=1_000_000)
    p.add_argument("--mutations", action="store_true", help="also check that 20 mutants are rejected")

    p = sub.add_parser("config-search", parents=[common], help="order or matching configurations")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--kind", choices=("order", "matching"), default="order")
    p.add_argument("--vars")
    p.add_argument("--xlen", type=int, default=1)
    p.add_argument("--ylen", type=int)
    p.add_argument("--max-len", dest="max_len", type=int)
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--budget", type=int, default=10_000_000)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    p.add_argument("--timing", action="store_true", help="include elapsed milliseconds (breaks byte identity)")
    p.add_argument("--no-determinism", dest="no_determinism", action="store_true",
                   help="skip the second run that checks byte-identical reports")
    return ap


def run(cfg: RunConfig) -> tuple[int, dict | None]:
    try:
        ok, result = COMMANDS[cfg.subcommand](cfg)
    except (InputError, StructureError, FormulaSyntaxError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2, None
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2, None
    report = {"tool": "dichotomy", "version": __version__, "schema": SCHEMA, "config": cfg.echo(),
              "result": result, "verified": ok}
    return (0 if ok else 1), report


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig.from_namespace(ns)
    code, report = run(cfg)
    if report is not None:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
        if cfg.out:
            Path(cfg.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
