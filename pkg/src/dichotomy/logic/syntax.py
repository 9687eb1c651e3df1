"""Text syntax for formulas.

    phi  ::= rel "(" term {"," term} ")" | term "=" term | "~" phi
           | "(" phi op phi ")"          op in & | -> <->
           | "A" var "." phi | "E" var "." phi
           | "E[<=" int "]" var "." phi | "E[>" int "]" var "." phi
    term ::= name | numeral | fname "(" term ")"

Numerals denote universe elements directly.

``to_text`` prints the canonical form; ``parse_formula(to_text(f)) == f``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import App, BinOp, Eq, Formula, Name, Not, Quant, Rel, Term


class FormulaSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int, text: str):
        super().__init__(f"{msg} at position {pos}: {text[:pos]}<HERE>{text[pos:]}")
        self.pos = pos


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<count>E\[(?:<=|>)\s*\d+\s*\])
  | (?P<quant>[AE](?![a-z0-9_]))
  | (?P<ident>[a-z][a-z0-9_]*)
  | (?P<num>\d+)
  | (?P<op><->|->|[&|~().,=])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg):
        raise FormulaSyntaxError(msg, self.tok.pos, self.text)

    def expect(self, text):
        if self.tok.text != text:
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        self.i += 1

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.error(f"expected identifier, found {self.tok.text or 'end of input'!r}")
        t = self.tok.text
        self.i += 1
        return t

    def formula(self) -> Formula:
        t = self.tok
        if t.kind == "quant":
            self.i += 1
            v = self.ident()
            self.expect(".")
            return Quant(t.text, v, self.formula())
        if t.kind == "count":
            self.i += 1
            inner = t.text[2:-1].replace(" ", "")
            kind = "<=" if inner.startswith("<=") else ">"
            k = int(inner[len(kind):])
            v = self.ident()
            self.expect(".")
            return Quant(kind, v, self.formula(), k)
        if t.text == "~":
            self.i += 1
            return Not(self.formula())
        if t.text == "(":
            self.i += 1
            left = self.formula()
            op = self.tok.text
            if op not in ("&", "|", "->", "<->"):
                self.error("expected a binary connective")
            self.i += 1
            right = self.formula()
            self.expect(")")
            return BinOp(op, left, right)
        if t.kind == "ident":
            name = self.ident()
            if self.tok.text == "(":
                self.i += 1
                args = [self.term()]
                while self.tok.text == ",":
                    self.i += 1
                    args.append(self.term())
                self.expect(")")
                if self.tok.text == "=":
                    if len(args) != 1:
                        self.error("function terms take exactly one argument")
                    self.i += 1
                    return Eq(App(name, args[0]), self.term())
                return Rel(name, tuple(args))
            if self.tok.text == "=":
                self.i += 1
                return Eq(Name(name), self.term())
            self.error("expected '(' or '=' after identifier")
        if t.kind == "num":
            left = self.term()
            self.expect("=")
            return Eq(left, self.term())
        self.error(f"unexpected token {t.text or 'end of input'!r}")

    def term(self) -> Term:
        if self.tok.kind == "num":
            self.i += 1
            return Name(self.toks[self.i - 1].text)
        name = self.ident()
        if self.tok.text == "(":
            self.i += 1
            arg = self.term()
            self.expect(")")
            return App(name, arg)
        return Name(name)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.tok.kind != "eof":
        p.error("trailing input")
    return f


def term_text(t: Term) -> str:
    if isinstance(t, App):
        return f"{t.fn}({term_text(t.arg)})"
    return t.name


def to_text(phi: Formula) -> str:
    if isinstance(phi, Rel):
        return f"{phi.name}({','.join(term_text(t) for t in phi.args)})"
    if isinstance(phi, Eq):
        return f"{term_text(phi.left)}={term_text(phi.right)}"
    if isinstance(phi, Not):
        return "~" + to_text(phi.body)
    if isinstance(phi, BinOp):
        return f"({to_text(phi.left)} {phi.op} {to_text(phi.right)})"
    if isinstance(phi, Quant):
        head = {"A": "A", "E": "E"}.get(phi.kind) or f"E[{phi.kind}{phi.count}]"
        return f"{head} {phi.var}. {to_text(phi.body)}"
    raise TypeError(phi)
