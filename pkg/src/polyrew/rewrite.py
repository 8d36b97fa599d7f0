"""Rules, matching, rewriting steps, normalization, and traces.

A :class:`Rule` is a generating 3-cell ``lhs => rhs`` between parallel
diagrams; a :class:`Polygraph` bundles a signature with an ordered rule list.
A :class:`Step` is a whiskered application of a rule (or of its inverse) in a
one-hole :class:`Context`, and a :class:`Trace` — a source diagram plus a
sequence of steps — represents a 3-cell of the free track 3-category.

Matching works modulo exchange: the closure of the subject diagram is
enumerated and the pattern's canonical slice sequence is looked up as a
consecutive window under a uniform offset shift.  This is exponential in the
number of commuting slices but complete, which is what the critical-pair
machinery needs; diagrams in scope stay small.

Normalization applies the first match of the first applicable rule in
declaration order.  Matches are ordered by their occurrence sets in canonical
slice numbering, so "first" means the leftmost-uppermost redex; this strategy
choice makes completions and homotopy bases reproducible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .diagram import (
    Diagram,
    GeneratorSym,
    Signature,
    canonical_form,
    diagram_equal,
    exchange_closure_with_ids,
    hcomp,
    identity,
    parse_diagram,
    print_diagram,
)


class RewriteError(Exception):
    """Base for rewriting errors."""


class ApplicationError(RewriteError):
    """A step's context does not match the diagram it is applied to."""


class BudgetExceededError(RewriteError):
    """Normalization ran out of budget; carries the partial trace."""

    def __init__(self, message: str, partial: "Trace"):
        super().__init__(message)
        self.partial = partial


FAMILIES = ("algebraic", "symmetry", "yang_baxter", "naturality")


@dataclass(frozen=True)
class Rule:
    """A 3-cell ``name : lhs => rhs`` between parallel 2-cells."""

    name: str
    lhs: Diagram
    rhs: Diagram
    family: str = "algebraic"

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise RewriteError(f"unknown rule family {self.family!r}")
        if self.lhs.input_width != self.rhs.input_width:
            raise RewriteError(f"rule {self.name}: input widths differ")
        if self.lhs.output_width != self.rhs.output_width:
            raise RewriteError(f"rule {self.name}: output widths differ")
        if len(self.lhs) < 1:
            raise RewriteError(f"rule {self.name}: lhs must contain a generator")

    def side(self, direction: str) -> Diagram:
        return self.lhs if direction == "forward" else self.rhs

    def other_side(self, direction: str) -> Diagram:
        return self.rhs if direction == "forward" else self.lhs


@dataclass(frozen=True)
class Polygraph:
    """A 3-polygraph: signature plus ordered rewriting rules."""

    signature: Signature
    rules: tuple[Rule, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(self.rules))
        names = [r.name for r in self.rules]
        if len(set(names)) != len(names):
            raise RewriteError("duplicate rule names")
        for r in self.rules:
            for d in (r.lhs, r.rhs):
                for s in d.slices:
                    if not self.signature.has(s.gen.name):
                        raise RewriteError(
                            f"rule {r.name} uses generator {s.gen.name!r} "
                            f"outside signature {self.signature.name!r}"
                        )

    def rule(self, name: str) -> Rule:
        for r in self.rules:
            if r.name == name:
                return r
        raise RewriteError(f"unknown rule {name!r}")

    def rules_of_family(self, *families: str) -> tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.family in families)


@dataclass(frozen=True)
class Context:
    """A one-hole context: top diagram, left/right whiskers, bottom diagram."""

    top: Diagram
    left: int
    right: int
    bottom: Diagram

    def __post_init__(self) -> None:
        if self.left < 0 or self.right < 0:
            raise RewriteError("context whiskers must be naturals")

    def plug(self, pattern: Diagram) -> Diagram:
        """Reconstitute the whole diagram with ``pattern`` in the hole."""
        if self.top.output_width != self.left + pattern.input_width + self.right:
            raise RewriteError(
                f"context top width {self.top.output_width} does not frame "
                f"pattern width {pattern.input_width} with whiskers "
                f"({self.left}, {self.right})"
            )
        middle = hcomp(identity(self.left), pattern, identity(self.right))
        return self.top.vcomp(middle).vcomp(self.bottom)


def identity_context(pattern: Diagram) -> Context:
    return Context(
        identity(pattern.input_width), 0, 0, identity(pattern.output_width)
    )


@dataclass(frozen=True)
class Match:
    """A found occurrence of a pattern: its context plus the matched slots.

    ``occurrences`` are indices into the canonical form of the subject
    diagram, identifying which generator occurrences the pattern covers; they
    are what branching enumeration overlaps on.
    """

    context: Context
    occurrences: frozenset[int]

    def key(self) -> tuple[int, ...]:
        return tuple(sorted(self.occurrences))


def find_matches(d: Diagram, pattern: Diagram) -> list[Match]:
    """Every occurrence of ``pattern`` in ``d`` modulo exchange.

    Deduplicated by matched-occurrence set, ordered by occurrence positions
    in the canonical slice numbering of ``d`` (leftmost-uppermost first).
    """
    if len(pattern) < 1:
        raise RewriteError("pattern must contain at least one generator")
    subject = canonical_form(d)
    pat = canonical_form(pattern)
    k = len(pat)
    found: dict[frozenset[int], Context] = {}
    for slices, ids in exchange_closure_with_ids(subject):
        widths = [subject.input_width]
        for s in slices:
            widths.append(widths[-1] - s.gen.arity + s.gen.coarity)
        for i in range(len(slices) - k + 1):
            shift = slices[i].offset - pat.slices[0].offset
            if shift < 0:
                continue
            if any(
                slices[i + j].gen != pat.slices[j].gen
                or slices[i + j].offset != pat.slices[j].offset + shift
                for j in range(k)
            ):
                continue
            right = widths[i] - shift - pat.input_width
            if right < 0:
                continue
            occ = frozenset(ids[i: i + k])
            if occ in found:
                continue
            top = Diagram(subject.input_width, slices[:i])
            bottom = Diagram(
                widths[i] - pat.input_width + pat.output_width, slices[i + k:]
            )
            found[occ] = Context(top, shift, right, bottom)
    matches = [Match(ctx, occ) for occ, ctx in found.items()]
    matches.sort(key=Match.key)
    return matches


@dataclass(frozen=True)
class Step:
    """One directed, whiskered rule application."""

    rule: Rule
    direction: str  # "forward" | "backward"
    context: Context

    def __post_init__(self) -> None:
        if self.direction not in ("forward", "backward"):
            raise RewriteError(f"bad step direction {self.direction!r}")

    def source(self) -> Diagram:
        return self.context.plug(self.rule.side(self.direction))

    def target(self) -> Diagram:
        return self.context.plug(self.rule.other_side(self.direction))

    def inverse(self) -> "Step":
        flipped = "backward" if self.direction == "forward" else "forward"
        return Step(self.rule, flipped, self.context)


def apply_step(d: Diagram, s: Step) -> Diagram:
    """Apply ``s`` to ``d``; the context must match ``d`` exactly (modulo
    exchange)."""
    if not diagram_equal(s.source(), d):
        raise ApplicationError(
            f"stale context: step {s.rule.name} {s.direction} does not match "
            f"'{print_diagram(d)}'"
        )
    return s.target()


@dataclass(frozen=True)
class Trace:
    """A 3-cell of the free track 3-category: a source plus directed steps.

    ``congruence`` declares how consecutive boundaries are compared:
    ``exchange_only`` for pros (plain ``diagram_equal``) or ``prop`` when
    2-cells are identified modulo the structural S-rules as well.
    """

    source: Diagram
    steps: tuple[Step, ...] = ()
    congruence: str = "exchange_only"

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        if self.congruence not in ("exchange_only", "prop"):
            raise RewriteError(f"bad congruence {self.congruence!r}")

    def target(self) -> Diagram:
        return self.steps[-1].target() if self.steps else self.source


def trace_target(t: Trace) -> Diagram:
    return t.target()


def validate_trace(t: Trace, equiv=diagram_equal) -> None:
    """Check the boundary chain of ``t`` under the 2-cell congruence ``equiv``."""
    current = t.source
    for i, s in enumerate(t.steps):
        if not equiv(s.source(), current):
            raise RewriteError(
                f"invalid trace: step {i} ({s.rule.name} {s.direction}) expects "
                f"'{print_diagram(s.source())}' but the current 2-cell is "
                f"'{print_diagram(current)}'"
            )
        current = s.target()


def compose_traces(t1: Trace, t2: Trace, equiv=diagram_equal) -> Trace:
    """The ⋆₂ composite; targets and sources must agree under ``equiv``."""
    if t1.congruence != t2.congruence:
        raise RewriteError("cannot compose traces with different congruences")
    if not equiv(t1.target(), t2.source):
        raise RewriteError(
            f"trace composition mismatch: '{print_diagram(t1.target())}' vs "
            f"'{print_diagram(t2.source)}'"
        )
    return Trace(t1.source, t1.steps + t2.steps, t1.congruence)


def invert_trace(t: Trace) -> Trace:
    """The inverse 3-cell: reversed step order, flipped directions."""
    return Trace(
        t.target(),
        tuple(s.inverse() for s in reversed(t.steps)),
        t.congruence,
    )


def parallel(t1: Trace, t2: Trace, equiv=diagram_equal) -> bool:
    """Whether the two traces form a 3-sphere (equal sources and targets)."""
    if t1.congruence != t2.congruence:
        raise RewriteError("traces declare different congruence levels")
    return equiv(t1.source, t2.source) and equiv(t1.target(), t2.target())


DEFAULT_BUDGET = 10_000


def normalize(
    d: Diagram, p: Polygraph, budget: int = DEFAULT_BUDGET, rules: tuple[Rule, ...] | None = None
) -> tuple[Diagram, Trace]:
    """Rewrite ``d`` to a normal form under ``p``'s rules.

    Strategy: rules in declaration order, leftmost-uppermost match first.
    Returns the normal form and the witnessing forward trace.  Raises
    :class:`BudgetExceededError` (carrying the partial trace) if more than
    ``budget`` steps are needed — the diagnosable stand-in for
    nontermination.
    """
    if rules is None:
        rules = p.rules
    current = d
    steps: list[Step] = []
    while True:
        chosen: Step | None = None
        for rule in rules:
            ms = find_matches(current, rule.lhs)
            if ms:
                chosen = Step(rule, "forward", ms[0].context)
                break
        if chosen is None:
            return current, Trace(d, tuple(steps))
        if len(steps) >= budget:
            raise BudgetExceededError(
                f"normalization exceeded budget of {budget} steps "
                f"(nontermination suspected)",
                Trace(d, tuple(steps)),
            )
        steps.append(chosen)
        current = chosen.target()


# -- file formats ---------------------------------------------------------


def parse_polygraph(text: str, name: str = "polygraph") -> Polygraph:
    """Parse the line-oriented polygraph format.

    ``prop`` (optional), ``gen <name> : <arity> -> <coarity>``,
    ``rule <name> : <expr> => <expr>``, ``#`` comments.
    """
    is_prop = False
    gens: list[GeneratorSym] = []
    rule_lines: list[tuple[str, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "prop":
            is_prop = True
            continue
        m = re.fullmatch(r"gen\s+(\w+)\s*:\s*(\d+)\s*->\s*(\d+)", line)
        if m:
            gens.append(GeneratorSym(m.group(1), int(m.group(2)), int(m.group(3))))
            continue
        m = re.fullmatch(r"rule\s+(\w+)\s*:\s*(.*?)\s*=>\s*(.*)", line)
        if m:
            rule_lines.append((m.group(1), m.group(2), m.group(3)))
            continue
        raise RewriteError(f"cannot parse polygraph line {lineno}: {raw!r}")
    sig = Signature(name, tuple(g for g in gens if g.name != "tau"), is_prop=is_prop)
    rules = tuple(
        Rule(rname, parse_diagram(lhs, sig), parse_diagram(rhs, sig))
        for rname, lhs, rhs in rule_lines
    )
    return Polygraph(sig, rules)


def print_polygraph(p: Polygraph) -> str:
    lines = []
    if p.signature.is_prop:
        lines.append("prop")
    for g in p.signature.generators:
        lines.append(f"gen {g.name} : {g.arity} -> {g.coarity}")
    for r in p.rules:
        lines.append(f"rule {r.name} : {print_diagram(r.lhs)} => {print_diagram(r.rhs)}")
    return "\n".join(lines) + "\n"


_STEP_RE = re.compile(
    r"step\s+(\w+)\s+([+-])\s+top=(.*?)\s+left=(\d+)\s+right=(\d+)\s+bot=(.*)"
)


def parse_trace(text: str, p: Polygraph, congruence: str | None = None) -> Trace:
    """Parse the trace file format over polygraph ``p``.

    Header ``trace <name> on <expr>``; body lines
    ``step <rule> <+|-> top=<expr> left=<nat> right=<nat> bot=<expr>``.
    """
    if congruence is None:
        congruence = "prop" if p.signature.is_prop else "exchange_only"
    source: Diagram | None = None
    steps: list[Step] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"trace\s+(\w+)\s+on\s+(.*)", line)
        if m:
            if source is not None:
                raise RewriteError(f"line {lineno}: duplicate trace header")
            source = parse_diagram(m.group(2), p.signature)
            continue
        m = _STEP_RE.fullmatch(line)
        if m:
            if source is None:
                raise RewriteError(f"line {lineno}: step before trace header")
            rule = p.rule(m.group(1))
            direction = "forward" if m.group(2) == "+" else "backward"
            ctx = Context(
                parse_diagram(m.group(3), p.signature),
                int(m.group(4)),
                int(m.group(5)),
                parse_diagram(m.group(6), p.signature),
            )
            steps.append(Step(rule, direction, ctx))
            continue
        raise RewriteError(f"cannot parse trace line {lineno}: {raw!r}")
    if source is None:
        raise RewriteError("trace file has no 'trace ... on ...' header")
    return Trace(source, tuple(steps), congruence)


def print_trace(t: Trace, name: str = "t") -> str:
    lines = [f"trace {name} on {print_diagram(t.source)}"]
    for s in t.steps:
        sign = "+" if s.direction == "forward" else "-"
        lines.append(
            f"step {s.rule.name} {sign} top={print_diagram(s.context.top)} "
            f"left={s.context.left} right={s.context.right} "
            f"bot={print_diagram(s.context.bottom)}"
        )
    return "\n".join(lines) + "\n"
