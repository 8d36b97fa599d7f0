"""Termination certificates: interpretation X plus derivation ∂, grid-checked.

A certificate interprets each generator ``g : m => k`` by ``k`` monotone
expressions ``X_g`` in ``m`` variables (values flow through the diagram) and
one expression ``D_g`` (the local weight).  The derivation of a diagram is
computed slice-wise from the two laws

    ∂(f ⋆₀ g) = ∂f + ∂g        ∂(f ⋆₁ g) = ∂f + ∂g ∘ X(f)

i.e. each slice contributes its weight evaluated at the values reaching its
inputs.  A rule certifies decrease when ``X(lhs) ≥ X(rhs)`` componentwise and
``∂(lhs) > ∂(rhs)`` for all inputs; the checker verifies this on the finite
grid ``{1..B}^m`` and labels the outcome *evidence*, not proof — adequate for
the linear interpretations in scope, which decrease on all of ℕ∖{0} iff they
decrease on a small grid.

Expressions are built from variables, natural constants, ``+`` and
``max(…,…)`` only, so everything in the DSL is monotone by construction.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .diagram import Diagram, Signature
from .rewrite import Polygraph


class TerminationError(Exception):
    """Raised for malformed interpretations or evaluation errors."""


# -- monotone expressions -------------------------------------------------


class MonotoneExpr:
    """Base class; subclasses are Var, Const, Add, Max."""

    def eval(self, args: tuple[int, ...]) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class Var(MonotoneExpr):
    index: int  # 0-based position in the generator's variable list

    def eval(self, args):
        return args[self.index]

    def __str__(self):
        return f"x{self.index + 1}"


@dataclass(frozen=True)
class Const(MonotoneExpr):
    value: int

    def eval(self, args):
        return self.value

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Add(MonotoneExpr):
    left: MonotoneExpr
    right: MonotoneExpr

    def eval(self, args):
        return self.left.eval(args) + self.right.eval(args)

    def __str__(self):
        return f"{self.left} + {self.right}"


@dataclass(frozen=True)
class Max(MonotoneExpr):
    left: MonotoneExpr
    right: MonotoneExpr

    def eval(self, args):
        return max(self.left.eval(args), self.right.eval(args))

    def __str__(self):
        return f"max({self.left}, {self.right})"


class _ExprParser:
    """expr := atom ('+' atom)* ; atom := nat | var | 'max' '(' e ',' e ')' |
    '(' expr ')'."""

    def __init__(self, text: str, variables: tuple[str, ...]):
        self.tokens = re.findall(r"\d+|\w+|[+(),]", text)
        self.pos = 0
        self.variables = variables

    def next(self) -> str:
        if self.pos >= len(self.tokens):
            raise TerminationError("unexpected end of expression")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise TerminationError(f"expected {tok!r}, found {got!r}")

    def parse(self) -> MonotoneExpr:
        e = self.expr()
        if self.peek() is not None:
            raise TerminationError(f"trailing token {self.peek()!r} in expression")
        return e

    def expr(self) -> MonotoneExpr:
        e = self.atom()
        while self.peek() == "+":
            self.next()
            e = Add(e, self.atom())
        return e

    def atom(self) -> MonotoneExpr:
        tok = self.next()
        if tok == "(":
            e = self.expr()
            self.expect(")")
            return e
        if tok == "max":
            self.expect("(")
            left = self.expr()
            self.expect(",")
            right = self.expr()
            self.expect(")")
            return Max(left, right)
        if tok.isdigit():
            return Const(int(tok))
        if tok in self.variables:
            return Var(self.variables.index(tok))
        raise TerminationError(f"unknown token {tok!r} in expression")


def parse_expr(text: str, variables: tuple[str, ...]) -> MonotoneExpr:
    return _ExprParser(text, variables).parse()


# -- interpretations ------------------------------------------------------


#: Default interpretation of the prop symmetry: swap values, zero weight.
TAU_X = (Var(1), Var(0))
TAU_D = Const(0)


@dataclass(frozen=True)
class Interpretation:
    """Per-generator X (value flow) and D (derivation weight) entries."""

    x_entries: dict  # name -> tuple[MonotoneExpr, ...], length = coarity
    d_entries: dict  # name -> MonotoneExpr
    grid_bound: int = 4

    def __post_init__(self) -> None:
        if self.grid_bound < 2:
            raise TerminationError("grid bound must be at least 2")

    def x_of(self, name: str) -> tuple[MonotoneExpr, ...]:
        if name in self.x_entries:
            return tuple(self.x_entries[name])
        if name == "tau":
            return TAU_X
        raise TerminationError(f"no X entry for generator {name!r}")

    def d_of(self, name: str) -> MonotoneExpr:
        if name in self.d_entries:
            return self.d_entries[name]
        if name == "tau":
            return TAU_D
        raise TerminationError(f"no d entry for generator {name!r}")

    def check_covers(self, sig: Signature) -> None:
        for g in sig.all_generators():
            xs = self.x_of(g.name)
            if len(xs) != g.coarity:
                raise TerminationError(
                    f"X entry for {g.name} has {len(xs)} components, "
                    f"expected {g.coarity}"
                )
            self.d_of(g.name)


def eval_X(d: Diagram, inputs: list[int], interp: Interpretation) -> list[int]:
    """Propagate input values through ``d`` slice by slice."""
    if len(inputs) != d.input_width:
        raise TerminationError(
            f"expected {d.input_width} input values, got {len(inputs)}"
        )
    values = list(inputs)
    for s in d.slices:
        args = tuple(values[s.offset: s.offset + s.gen.arity])
        outs = [e.eval(args) for e in interp.x_of(s.gen.name)]
        values[s.offset: s.offset + s.gen.arity] = outs
    return values


def eval_deriv(d: Diagram, inputs: list[int], interp: Interpretation) -> int:
    """The derivation ∂ of ``d`` at the given input values."""
    if len(inputs) != d.input_width:
        raise TerminationError(
            f"expected {d.input_width} input values, got {len(inputs)}"
        )
    values = list(inputs)
    total = 0
    for s in d.slices:
        args = tuple(values[s.offset: s.offset + s.gen.arity])
        total += interp.d_of(s.gen.name).eval(args)
        outs = [e.eval(args) for e in interp.x_of(s.gen.name)]
        values[s.offset: s.offset + s.gen.arity] = outs
    return total


# -- the grid certificate -------------------------------------------------


@dataclass(frozen=True)
class RuleCheck:
    rule: str
    passed: bool
    failing_tuple: tuple[int, ...] | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "passed": self.passed,
            "failing_tuple": list(self.failing_tuple) if self.failing_tuple else None,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class CertificateReport:
    rule_checks: tuple[RuleCheck, ...]
    grid_bound: int

    @property
    def passed(self) -> bool:
        return all(rc.passed for rc in self.rule_checks)

    @property
    def verdict(self) -> str:
        status = "passed" if self.passed else "FAILED"
        return (
            f"grid certificate {status} (evidence, not proof; "
            f"B={self.grid_bound})"
        )

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "verdict": self.verdict,
            "grid_bound": self.grid_bound,
            "rules": [rc.to_dict() for rc in self.rule_checks],
        }


def check_decrease(p: Polygraph, interp: Interpretation) -> CertificateReport:
    """Check ``X(lhs) ≥ X(rhs)`` and ``∂(lhs) > ∂(rhs)`` on ``{1..B}^m``."""
    interp.check_covers(p.signature)
    bound = interp.grid_bound
    checks = []
    for rule in p.rules:
        m = rule.lhs.input_width
        failing = None
        detail = ""
        for tup in itertools.product(range(1, bound + 1), repeat=m):
            inputs = list(tup)
            xl = eval_X(rule.lhs, inputs, interp)
            xr = eval_X(rule.rhs, inputs, interp)
            if any(a < b for a, b in zip(xl, xr)):
                failing = tup
                detail = f"X values {xl} vs {xr}"
                break
            dl = eval_deriv(rule.lhs, inputs, interp)
            dr = eval_deriv(rule.rhs, inputs, interp)
            if not dl > dr:
                failing = tup
                detail = f"∂ values {dl} vs {dr}"
                break
        checks.append(RuleCheck(rule.name, failing is None, failing, detail))
    return CertificateReport(tuple(checks), bound)


# -- the interpretation file format ---------------------------------------


def parse_interpretation(text: str) -> tuple[str, Interpretation]:
    """Parse the interpretation format; returns (polygraph name, interp).

    Lines: ``interp for <name>``; ``X <gen> (<vars>) = <expr>[, <expr>…]``;
    ``d <gen> (<vars>) = <expr>``; ``bound <B>``; ``#`` comments.
    """
    name = ""
    x_entries: dict[str, tuple[MonotoneExpr, ...]] = {}
    d_entries: dict[str, MonotoneExpr] = {}
    bound = 4
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"interp\s+for\s+(\w+)", line)
        if m:
            name = m.group(1)
            continue
        m = re.fullmatch(r"bound\s+(\d+)", line)
        if m:
            bound = int(m.group(1))
            continue
        m = re.fullmatch(r"([Xd])\s+(\w+)\s*\(([^)]*)\)\s*=\s*(.*)", line)
        if m:
            kind, gen, vars_text, body = m.groups()
            variables = tuple(v.strip() for v in vars_text.split(",") if v.strip())
            if kind == "X":
                parts = _split_top_level_commas(body)
                x_entries[gen] = tuple(parse_expr(pt, variables) for pt in parts)
            else:
                d_entries[gen] = parse_expr(body, variables)
            continue
        raise TerminationError(f"cannot parse interpretation line {lineno}: {raw!r}")
    return name, Interpretation(x_entries, d_entries, bound)


def _split_top_level_commas(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for c in text:
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        if c == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(c)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


#: The interpretation that proves Mon₃ terminates: X(μ)(i,j)=i+j, X(η)=1,
#: ∂(μ)(i,j)=i, ∂(η)=0 over ℕ∖{0}.
MON_INTERP_TEXT = """\
interp for Mon
X mu (i, j) = i + j
d mu (i, j) = i
X eta () = 1
d eta () = 0
bound 4
"""


def mon_interpretation() -> Interpretation:
    return parse_interpretation(MON_INTERP_TEXT)[1]
