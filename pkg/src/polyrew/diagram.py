"""String diagrams for free 2-pros: slices, composition, exchange and equality.

A 2-cell of the free 2-category over a one-wire signature is stored as an
``input_width`` together with an ordered list of *slices*.  Each slice is a
single generator whiskered by identity wires: ``id_offset *0 g *0 id_rest``.
Reading the slice list top to bottom gives a sliced (generic) form of the
string diagram.

Two slice lists represent the same 2-cell precisely when they are related by
the exchange relations: adjacent slices with disjoint supports may be swapped.
``canonical_form`` picks a unique representative of each exchange class: the
left-greedy (lexicographically least) slice sequence, computed by repeatedly
exchanging the least available slice to the front.  ``diagram_equal``
compares canonical forms.
``exchange_closure`` computes the full class by brute force; it serves as the
correctness oracle for the canonical form and as the completeness backbone of
pattern matching.

Conventions: offsets are 0-based internally, wires are numbered from the left,
and ``;`` in the textual grammar is vertical composition read top to bottom.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator


class DiagramError(Exception):
    """Raised for ill-formed diagrams or failed compositions."""


class ParseError(DiagramError):
    """Raised on syntax errors in the diagram expression grammar."""


@dataclass(frozen=True)
class GeneratorSym:
    """A generating 2-cell ``name : arity => coarity`` of the signature."""

    name: str
    arity: int
    coarity: int

    def __post_init__(self) -> None:
        if not self.name:
            raise DiagramError("generator name must be nonempty")
        if self.arity < 0 or self.coarity < 0:
            raise DiagramError("arity and coarity must be naturals")
        if self.name == "tau" and (self.arity, self.coarity) != (2, 2):
            raise DiagramError("'tau' is reserved for the symmetry (2 => 2)")

    def __str__(self) -> str:
        return f"{self.name} : {self.arity} -> {self.coarity}"


#: The prop symmetry generator.  The name "tau" is reserved for it.
TAU = GeneratorSym("tau", 2, 2)


@dataclass(frozen=True)
class Signature:
    """A 2-polygraph with one 0-cell and one 1-cell: a list of generators.

    When ``is_prop`` is set the symmetry ``tau`` is an implicit member and
    need not be listed in ``generators``.
    """

    name: str
    generators: tuple[GeneratorSym, ...]
    is_prop: bool = False

    def __post_init__(self) -> None:
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise DiagramError(f"duplicate generator names in signature {self.name!r}")
        if "tau" in names and not self.is_prop:
            raise DiagramError("tau present but signature is not a prop")

    def all_generators(self) -> tuple[GeneratorSym, ...]:
        gens = self.generators
        if self.is_prop and all(g.name != "tau" for g in gens):
            gens = gens + (TAU,)
        return gens

    def lookup(self, name: str) -> GeneratorSym:
        for g in self.all_generators():
            if g.name == name:
                return g
        raise DiagramError(f"unknown generator {name!r} in signature {self.name!r}")

    def has(self, name: str) -> bool:
        return any(g.name == name for g in self.all_generators())


@dataclass(frozen=True)
class Slice:
    """One whiskered generator: ``offset`` identity wires, then ``gen``."""

    offset: int
    gen: GeneratorSym

    def __post_init__(self) -> None:
        if self.offset < 0:
            raise DiagramError("slice offset must be a natural")

    def shifted(self, delta: int) -> "Slice":
        return Slice(self.offset + delta, self.gen)


@dataclass(frozen=True)
class Diagram:
    """A 2-cell of the free 2-pro: an input width plus a list of slices.

    The width chain ``w_0 = input_width``,
    ``w_{i+1} = w_i - arity(g_i) + coarity(g_i)`` must be well defined, with
    each slice fitting its width: ``offset_i + arity(g_i) <= w_i``.
    """

    input_width: int
    slices: tuple[Slice, ...] = ()

    def __post_init__(self) -> None:
        if self.input_width < 0:
            raise DiagramError("input width must be a natural")
        object.__setattr__(self, "slices", tuple(self.slices))
        w = self.input_width
        for i, s in enumerate(self.slices):
            if s.offset + s.gen.arity > w:
                raise DiagramError(
                    f"slice {i} ({s.gen.name} at offset {s.offset}) does not fit "
                    f"width {w}"
                )
            w += s.gen.coarity - s.gen.arity

    # -- width bookkeeping ------------------------------------------------

    def widths(self) -> list[int]:
        """The width chain, with ``len(slices) + 1`` entries."""
        ws = [self.input_width]
        for s in self.slices:
            ws.append(ws[-1] - s.gen.arity + s.gen.coarity)
        return ws

    @property
    def output_width(self) -> int:
        w = self.input_width
        for s in self.slices:
            w += s.gen.coarity - s.gen.arity
        return w

    def __len__(self) -> int:
        return len(self.slices)

    # -- composition ------------------------------------------------------

    def vcomp(self, other: "Diagram") -> "Diagram":
        """Vertical composite ``self ⋆₁ other`` (self on top)."""
        if self.output_width != other.input_width:
            raise DiagramError(
                f"vertical composition mismatch: output width "
                f"{self.output_width} vs input width {other.input_width}"
            )
        return Diagram(self.input_width, self.slices + other.slices)

    def hcomp(self, other: "Diagram") -> "Diagram":
        """Horizontal composite ``self ⋆₀ other`` (self on the left)."""
        shifted = tuple(s.shifted(self.output_width) for s in other.slices)
        return Diagram(self.input_width + other.input_width, self.slices + shifted)


def identity(n: int) -> Diagram:
    """The identity 2-cell on ``n`` wires."""
    return Diagram(n)


def generator_diagram(gen: GeneratorSym) -> Diagram:
    """The one-slice diagram of a single generator."""
    return Diagram(gen.arity, (Slice(0, gen),))


def vcomp(*ds: Diagram) -> Diagram:
    """Vertical composite of any number of diagrams, top to bottom."""
    if not ds:
        raise DiagramError("vcomp needs at least one diagram")
    out = ds[0]
    for d in ds[1:]:
        out = out.vcomp(d)
    return out


def hcomp(*ds: Diagram) -> Diagram:
    """Horizontal composite of any number of diagrams, left to right."""
    if not ds:
        return identity(0)
    out = ds[0]
    for d in ds[1:]:
        out = out.hcomp(d)
    return out


# -- exchange -------------------------------------------------------------


def _commute(a: Slice, b: Slice) -> bool:
    """Whether adjacent slices ``a`` then ``b`` have disjoint supports.

    ``b``'s input interval (in the wire coordinates between the two slices)
    must lie entirely left of ``a``'s output interval, or entirely right of
    it.  A zero-arity slice has a zero-width input interval; sitting at
    either edge of ``a``'s outputs counts as disjoint, strictly inside does
    not.
    """
    return b.offset + b.gen.arity <= a.offset or b.offset >= a.offset + a.gen.coarity


def _swap(a: Slice, b: Slice) -> tuple[Slice, Slice]:
    """Exchange commuting adjacent slices ``a`` then ``b`` into ``b'`` then ``a'``."""
    if b.offset + b.gen.arity <= a.offset:
        # b acts left of a: its wires keep their positions above a.
        return b, Slice(a.offset - b.gen.arity + b.gen.coarity, a.gen)
    # b acts right of a's outputs: shift back through a's width change.
    return Slice(b.offset - a.gen.coarity + a.gen.arity, b.gen), a


def _front_candidates(
    entries: list[tuple[Slice, int]],
) -> list[tuple[Slice, int, list[tuple[Slice, int]]]]:
    """All slices that can be exchanged to the front of ``entries``.

    Returns triples ``(front_slice, original_index, remaining_entries)``
    where the remaining entries are given in their adjusted coordinates.
    """
    out = []
    for j in range(len(entries)):
        cur, cur_id = entries[j]
        above: list[tuple[Slice, int]] = list(entries[:j])
        ok = True
        for k in range(j - 1, -1, -1):
            a, a_id = above[k]
            if not _commute(a, cur):
                ok = False
                break
            cur, a2 = _swap(a, cur)
            above[k] = (a2, a_id)
        if ok:
            out.append((cur, cur_id, above + entries[j + 1:]))
    return out


def _lex_min(entries: list[tuple[Slice, int]]) -> list[tuple[Slice, int]]:
    """The lexicographically least representative of the exchange class.

    Greedy head selection: among the slices that can be exchanged to the
    front, pick the one with the smallest ``(offset, name)``; ties between
    equal heads are broken by recursively comparing the tails.  This computes
    the exact minimum of the closure without enumerating it.
    """
    if not entries:
        return []
    candidates = _front_candidates(entries)
    best_key = min((c[0].offset, c[0].gen.name) for c in candidates)
    tied = [c for c in candidates if (c[0].offset, c[0].gen.name) == best_key]
    if len(tied) == 1:
        front, front_id, rest = tied[0]
        return [(front, front_id)] + _lex_min(rest)
    best_tail: list[tuple[Slice, int]] | None = None
    best_front = None
    for front, front_id, rest in tied:
        tail = _lex_min(rest)
        tail_key = [(s.offset, s.gen.name) for s, _ in tail]
        if best_tail is None or tail_key < [(s.offset, s.gen.name) for s, _ in best_tail]:
            best_tail = tail
            best_front = (front, front_id)
    assert best_front is not None and best_tail is not None
    return [best_front] + best_tail


@lru_cache(maxsize=1 << 17)
def canonical_form_with_ids(d: Diagram) -> tuple[Diagram, tuple[int, ...]]:
    """Canonical form plus the permutation of original slice indices.

    Returns ``(canon, ids)`` where ``ids[k]`` is the index in ``d.slices`` of
    the generator occurrence that ends up as slice ``k`` of the canonical
    form.
    """
    entries = _lex_min([(s, i) for i, s in enumerate(d.slices)])
    canon = Diagram(d.input_width, tuple(s for s, _ in entries))
    return canon, tuple(i for _, i in entries)


def canonical_form(d: Diagram) -> Diagram:
    """The unique left-greedy representative of ``d``'s exchange class."""
    return canonical_form_with_ids(d)[0]


def diagram_equal(d1: Diagram, d2: Diagram) -> bool:
    """Equality of 2-cells modulo exchange (canonical forms coincide)."""
    if d1.input_width != d2.input_width or len(d1) != len(d2):
        return False
    return canonical_form(d1).slices == canonical_form(d2).slices


def exchange_closure_with_ids(d: Diagram) -> list[tuple[tuple[Slice, ...], tuple[int, ...]]]:
    """All exchange representatives of ``d``, each with its slice-index permutation.

    Brute-force breadth-first closure under single adjacent swaps.  Used as
    the oracle for ``canonical_form`` and as the search space for pattern
    matching; intended for diagrams of modest size (≲ 10 slices).
    """
    start = (tuple(d.slices), tuple(range(len(d.slices))))
    seen: dict[tuple[Slice, ...], tuple[int, ...]] = {start[0]: start[1]}
    frontier = [start]
    while frontier:
        nxt = []
        for slices, ids in frontier:
            for i in range(len(slices) - 1):
                a, b = slices[i], slices[i + 1]
                if not _commute(a, b):
                    continue
                b2, a2 = _swap(a, b)
                new_slices = slices[:i] + (b2, a2) + slices[i + 2:]
                if new_slices not in seen:
                    new_ids = ids[:i] + (ids[i + 1], ids[i]) + ids[i + 2:]
                    seen[new_slices] = new_ids
                    nxt.append((new_slices, new_ids))
        frontier = nxt
    return sorted(
        seen.items(),
        key=lambda item: tuple((s.offset, s.gen.name) for s in item[0]),
    )


def exchange_closure(d: Diagram) -> list[tuple[Slice, ...]]:
    """The set of slice sequences exchange-equivalent to ``d``."""
    return [slices for slices, _ in exchange_closure_with_ids(d)]


# -- parsing and printing -------------------------------------------------


def _tokenize(text: str) -> Iterator[tuple[str, str, int, int]]:
    line, col = 1, 1
    i = 0
    while i < len(text):
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c.isspace():
            col += 1
            i += 1
        elif c in ";*()":
            yield ("punct", c, line, col)
            col += 1
            i += 1
        elif c.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            yield ("nat", text[i:j], line, col)
            col += j - i
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            yield ("ident", text[i:j], line, col)
            col += j - i
            i = j
        else:
            raise ParseError(f"unexpected character {c!r} at line {line}, column {col}")


class _Parser:
    """Recursive descent for: expr := term (';' term)* ;
    term := atom ('*' atom)* ; atom := 'id' nat | ident | '(' expr ')'."""

    def __init__(self, text: str, sig: Signature):
        self.tokens = list(_tokenize(text))
        self.pos = 0
        self.sig = sig

    def peek(self) -> tuple[str, str, int, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> tuple[str, str, int, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, value: str) -> None:
        tok = self.next()
        if tok[1] != value:
            raise ParseError(
                f"expected {value!r} but found {tok[1]!r} at line {tok[2]}, column {tok[3]}"
            )

    def parse(self) -> Diagram:
        d = self.expr()
        tok = self.peek()
        if tok is not None:
            raise ParseError(
                f"trailing input {tok[1]!r} at line {tok[2]}, column {tok[3]}"
            )
        return d

    def expr(self) -> Diagram:
        d = self.term()
        while self.peek() is not None and self.peek()[1] == ";":
            self.next()
            t = self.term()
            if d.output_width != t.input_width:
                raise ParseError(
                    f"width mismatch in ';': {d.output_width} vs {t.input_width}"
                )
            d = d.vcomp(t)
        return d

    def term(self) -> Diagram:
        d = self.atom()
        while self.peek() is not None and self.peek()[1] == "*":
            self.next()
            d = d.hcomp(self.atom())
        return d

    def atom(self) -> Diagram:
        kind, value, line, col = self.next()
        if value == "(":
            d = self.expr()
            self.expect(")")
            return d
        if value == "id":
            tok = self.next()
            if tok[0] != "nat":
                raise ParseError(
                    f"expected a natural after 'id' at line {tok[2]}, column {tok[3]}"
                )
            return identity(int(tok[1]))
        if kind == "ident":
            if not self.sig.has(value):
                raise ParseError(
                    f"unknown generator {value!r} at line {line}, column {col}"
                )
            return generator_diagram(self.sig.lookup(value))
        raise ParseError(f"unexpected token {value!r} at line {line}, column {col}")


def parse_diagram(text: str, sig: Signature) -> Diagram:
    """Parse a diagram expression over ``sig``.

    Grammar: ``expr := term (';' term)*``, ``term := atom ('*' atom)*``,
    ``atom := 'id' nat | ident | '(' expr ')'``.  ``;`` is vertical
    composition read top to bottom, ``*`` horizontal read left to right.
    """
    return _Parser(text, sig).parse()


def print_diagram(d: Diagram) -> str:
    """Render ``d`` in the expression grammar; one term per slice."""
    if not d.slices:
        return f"id {d.input_width}"
    parts = []
    w = d.input_width
    for s in d.slices:
        right = w - s.offset - s.gen.arity
        factors = []
        if s.offset:
            factors.append(f"id {s.offset}")
        factors.append(s.gen.name)
        if right:
            factors.append(f"id {right}")
        term = " * ".join(factors)
        parts.append(f"({term})" if len(factors) > 1 else term)
        w += s.gen.coarity - s.gen.arity
    return " ; ".join(parts)
