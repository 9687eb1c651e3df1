from dataclasses import dataclass

from .ast import (App, BinOp, Eq, Formula, Name, Not, Quant, Rel, Term, app, at_most, conj,
                  disj, eq, exists, falsity, forall, forall_many, free_variables, iff, implies,
                  more_than, names, neg, rel, rename_bound, substitute, truth)
from .evaluator import EvaluationError, compile_formula, definable_relation, evaluate
from .syntax import FormulaSyntaxError, parse_formula, to_text


@dataclass(frozen=True)
class SplitFormula:
    """A formula with its free variables split into object and parameter variables."""

    formula: Formula
    object_vars: tuple = ()
    param_vars: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "object_vars", tuple(self.object_vars))
        object.__setattr__(self, "param_vars", tuple(self.param_vars))
        if set(self.object_vars) & set(self.param_vars):
            raise ValueError("object and parameter variables overlap")
        if len(set(self.object_vars)) != len(self.object_vars) or \
                len(set(self.param_vars)) != len(self.param_vars):
            raise ValueError("repeated variable")

    @property
    def object_arity(self) -> int:
        return len(self.object_vars)

    @property
    def param_arity(self) -> int:
        return len(self.param_vars)

    def text(self) -> str:
        return f"{to_text(self.formula)} :: {','.join(self.object_vars)} ; {','.join(self.param_vars)}"

    def instantiate(self, objects, params) -> Formula:
        """Substitute terms (or names) for the object and parameter variables."""
        mapping = dict(zip(self.object_vars, objects))
        mapping.update(zip(self.param_vars, params))
        return substitute(self.formula, mapping)

    @classmethod
    def parse(cls, line: str) -> "SplitFormula":
        if "::" not in line:
            raise FormulaSyntaxError("expected 'formula :: objvars ; paramvars'", len(line), line)
        ftext, varspec = line.rsplit("::", 1)
        objs, _, pars = varspec.partition(";")

        def names_of(s):
            return tuple(v for v in (p.strip() for p in s.split(",")) if v)
        return cls(parse_formula(ftext.strip()), names_of(objs), names_of(pars))


__all__ = [n for n in dir() if not n.startswith("_")]
