"""Infix evaluator for relation expressions.

Grammar, precedence high to low:

  atom   := NAME | "empty" | "id" | "dom" "(" expr ")" | "sat" "(" expr ")"
          | "(" expr ")"
  seq    := atom ((";" | "*") atom)*          left-associative
  joinl  := seq ("|_|" seq)*                  left-associative
  meetl  := joinl ("|-|" joinl)*              left-associative
  expr   := meetl ("<<=" meetl)?              non-associative, boolean

";" is composition, "*" demonic composition, "|_|" demonic join, "|-|"
demonic meet, "<<=" the refinement predicate.  dom() yields the coreflexive
(partial identity) relation on the domain, which keeps the grammar closed
over relations; sat() appends the sink point, growing the base by one.
empty and id are instantiated at the environment's base size.
"""

from __future__ import annotations

import re

from .errors import DimensionError, ExprError
from .relcore import (
    Relation,
    compose,
    demonic_compose,
    demonic_join,
    demonic_meet,
    demonic_refines,
    dom,
    saturate_infinity,
)

__all__ = ["eval_relexpr"]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<op><<=|\|_\||\|-\||[;*()])|(?P<name>[A-Za-z_][A-Za-z0-9_]*))"
)

_KEYWORDS = ("empty", "id", "dom", "sat")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ExprError(f"unexpected character {stripped[0]!r}", len(text) - len(stripped))
        if m.group("op"):
            tokens.append(("op", m.group("op"), m.start("op")))
        else:
            tokens.append(("name", m.group("name"), m.start("name")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, env: dict, text: str, base: int | None):
        self.env = env
        self.tokens = _tokenize(text)
        self.i = 0
        bases = {r.base_size for r in env.values()}
        if len(bases) > 1:
            raise ExprError(f"environment mixes base sizes {sorted(bases)}", 0)
        if bases:
            base = bases.pop()
        self.base = base

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ExprError(f"expected {op!r}", pos)

    def apply(self, fn, pos, *args):
        try:
            return fn(*args)
        except DimensionError as exc:
            raise ExprError(str(exc), pos) from None

    def atom(self) -> Relation:
        kind, val, pos = self.take()
        if kind == "op" and val == "(":
            value = self.meetl()
            self.expect_op(")")
            return value
        if kind != "name":
            raise ExprError("expected a relation atom", pos)
        if val in ("dom", "sat"):
            self.expect_op("(")
            inner = self.meetl()
            self.expect_op(")")
            if val == "dom":
                points = dom(inner)
                return Relation.from_pairs(inner.base_size, [(x, x) for x in points.members()])
            return saturate_infinity(inner)
        if val in ("empty", "id"):
            if self.base is None:
                raise ExprError(f"cannot infer base size for {val!r}: empty environment", pos)
            return Relation.empty(self.base) if val == "empty" else Relation.identity(self.base)
        if val not in self.env:
            raise ExprError(f"unbound name {val!r}", pos)
        return self.env[val]

    def seq(self) -> Relation:
        value = self.atom()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in (";", "*"):
                self.take()
                rhs = self.atom()
                fn = compose if val == ";" else demonic_compose
                value = self.apply(fn, pos, value, rhs)
            else:
                return value

    def joinl(self) -> Relation:
        value = self.seq()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "|_|":
                self.take()
                value = self.apply(demonic_join, pos, value, self.seq())
            else:
                return value

    def meetl(self) -> Relation:
        value = self.joinl()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "|-|":
                self.take()
                value = self.apply(demonic_meet, pos, value, self.joinl())
            else:
                return value

    def expr(self):
        value = self.meetl()
        kind, val, pos = self.peek()
        if kind == "op" and val == "<<=":
            self.take()
            rhs = self.meetl()
            result = self.apply(demonic_refines, pos, value, rhs)
            kind, val, pos = self.peek()
            if kind == "op" and val == "<<=":
                raise ExprError("<<= is non-associative", pos)
            return result
        return value

    def parse(self):
        result = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ExprError("trailing input", pos)
        return result


def eval_relexpr(env: dict, expr: str, base: int | None = None):
    """Evaluate an expression over named relations.

    Returns a Relation, or a bool for refinement comparisons.  All names in
    env must share one base size; base is only consulted when env is empty
    (it anchors "empty" and "id").
    """
    return _Parser(env, expr, base).parse()
