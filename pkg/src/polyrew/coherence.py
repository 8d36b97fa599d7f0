"""Coherence deciders and the preset catalogue.

Two decision modes.  In *aspherical* mode every parallel pair of traces is
equal — the content is the parallelism check, performed modulo the structural
congruence.  In *braided* mode a trace ``t`` gets a braid invariant
``braid_of_trace(t)``: each commutativity step contributes a block crossing
of the leaf bundles it swaps, every other step contributes nothing, and two
parallel traces are equal exactly when their braids are.

The bridge between diagrams and braids is the unique decomposition of an
algebraic 2-cell into a permutation of its inputs followed by a crossing-free
part (``decompose_algebraic``): the strands of the braid are the input wires,
and a ``beta`` step at some context crosses the bundle of leaves feeding the
left wire of its redex over the bundle feeding the right wire.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .braid import BraidWord, block_crossing, braid_concat, braid_equal, garside_nf
from .critical import s_construction, structural_rules, tau_diagram
from .diagram import (
    Diagram,
    GeneratorSym,
    Signature,
    Slice,
    TAU,
    canonical_form,
    diagram_equal,
    generator_diagram,
    hcomp,
    identity,
    parse_diagram,
    print_diagram,
    vcomp,
)
from .rewrite import (
    DEFAULT_BUDGET,
    Polygraph,
    Rule,
    RewriteError,
    Step,
    Trace,
    compose_traces,
    normalize,
    validate_trace,
)
from .termination import Interpretation, mon_interpretation


class CoherenceError(Exception):
    """Raised for invalid inputs to the coherence machinery."""


# -- presets ---------------------------------------------------------------


@dataclass(frozen=True)
class Preset:
    """A named presentation together with its decision policy.

    ``aspherical_subrules`` are the rules whose steps are invisible to the
    braid invariant (everything except the commutativity cell);
    ``expected_proper`` pins the proper-branching count the pipeline should
    flag deviations from.
    """

    name: str
    polygraph: Polygraph
    decision_mode: str  # "aspherical" | "braided"
    aspherical_subrules: frozenset[str]
    interp: Interpretation | None = None
    expected_proper: int | None = None

    def __post_init__(self) -> None:
        if self.decision_mode not in ("aspherical", "braided"):
            raise CoherenceError(f"bad decision mode {self.decision_mode!r}")


MU = GeneratorSym("mu", 2, 1)
ETA = GeneratorSym("eta", 0, 1)


def _mon_polygraph(name: str = "Mon") -> Polygraph:
    sig = Signature(name, (MU, ETA))
    q = lambda text: parse_diagram(text, sig)
    return Polygraph(
        sig,
        (
            Rule("alpha", q("(mu * id 1) ; mu"), q("(id 1 * mu) ; mu")),
            Rule("lambda", q("(eta * id 1) ; mu"), q("id 1")),
            Rule("rho", q("(id 1 * eta) ; mu"), q("id 1")),
        ),
    )


def _with_commutativity(base: Polygraph, name: str, with_gamma: bool) -> Polygraph:
    sig = Signature(name, base.signature.generators, is_prop=True)
    q = lambda text: parse_diagram(text, sig)
    extra = [Rule("beta", q("tau ; mu"), q("mu"), family="algebraic")]
    if with_gamma:
        extra.append(
            Rule(
                "gamma",
                q("(tau * id 1) ; (id 1 * mu) ; mu"),
                q("(id 1 * mu) ; mu"),
                family="algebraic",
            )
        )
    return Polygraph(sig, s_construction(base).rules + tuple(extra))


def _build_preset(name: str) -> Preset:
    if name == "as":
        sig = Signature("As", (MU,))
        q = lambda text: parse_diagram(text, sig)
        p = Polygraph(
            sig,
            (Rule("alpha", q("(mu * id 1) ; mu"), q("(id 1 * mu) ; mu")),),
        )
        return Preset("as", p, "aspherical", frozenset(r.name for r in p.rules),
                      interp=mon_interpretation())
    if name == "mon":
        p = _mon_polygraph()
        return Preset("mon", p, "aspherical", frozenset(r.name for r in p.rules),
                      interp=mon_interpretation())
    if name == "perm":
        p = s_construction(Polygraph(Signature("Perm", ()), ()))
        return Preset("perm", p, "aspherical", frozenset(r.name for r in p.rules))
    if name in ("sym", "br"):
        p = _with_commutativity(
            _mon_polygraph("Sym" if name == "sym" else "Br"),
            "Sym" if name == "sym" else "Br",
            with_gamma=False,
        )
        subrules = frozenset(r.name for r in p.rules) - {"beta"}
        mode = "aspherical" if name == "sym" else "braided"
        return Preset(name, p, mode, subrules)
    if name == "sym_prime":
        p = _with_commutativity(_mon_polygraph("SymPrime"), "SymPrime",
                                with_gamma=True)
        subrules = frozenset(r.name for r in p.rules) - {"beta", "gamma"}
        return Preset("sym_prime", p, "aspherical", subrules,
                      expected_proper=10)
    raise CoherenceError(f"unknown preset {name!r}")


PRESET_NAMES = ("as", "mon", "sym", "sym_prime", "br", "perm")


@lru_cache(maxsize=None)
def get_preset(name: str) -> Preset:
    if name not in PRESET_NAMES:
        raise CoherenceError(
            f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
        )
    return _build_preset(name)


# -- the structural congruence ---------------------------------------------


def structural_normal_form(d: Diagram, p: Polygraph,
                           budget: int = DEFAULT_BUDGET) -> Diagram:
    rules = structural_rules(p)
    if not rules:
        return canonical_form(d)
    nf, _ = normalize(d, p, budget, rules=rules)
    return canonical_form(nf)


def congruence_equiv(p: Polygraph):
    """2-cell equality for ``p``: modulo exchange for pros, modulo the
    structural S-rules as well for props."""
    if not structural_rules(p):
        return diagram_equal

    def equiv(d1: Diagram, d2: Diagram) -> bool:
        return diagram_equal(
            structural_normal_form(d1, p), structural_normal_form(d2, p)
        )

    return equiv


# -- leaf bundles and the algebraic decomposition --------------------------


def _evaluate_trees(d: Diagram):
    """Per output wire of ``d``: the expression tree it carries.

    A tree is ``("leaf", i)`` for input wire ``i`` or ``("node", gen,
    children)``.  The crossing permutes trees; every other generator must
    have coarity 1 and combines its argument trees into a node.
    """
    values = [("leaf", i) for i in range(d.input_width)]
    for s in d.slices:
        args = values[s.offset: s.offset + s.gen.arity]
        if s.gen.name == "tau":
            out = [args[1], args[0]]
        elif s.gen.coarity == 1:
            out = [("node", s.gen, tuple(args))]
        else:
            raise CoherenceError(
                f"not an algebraic 2-cell: generator {s.gen.name} has "
                f"coarity {s.gen.coarity}"
            )
        values[s.offset: s.offset + s.gen.arity] = out
    return values


def _leaves(tree) -> tuple[int, ...]:
    if tree[0] == "leaf":
        return (tree[1],)
    return tuple(x for child in tree[2] for x in _leaves(child))


@dataclass(frozen=True)
class BundleState:
    """Per output wire: the ordered input strands feeding it."""

    bundles: tuple[tuple[int, ...], ...]

    def size(self, wire: int) -> int:
        return len(self.bundles[wire])

    def strands_before(self, wire: int) -> int:
        return sum(len(b) for b in self.bundles[:wire])


def leaf_bundles(d: Diagram) -> BundleState:
    """The input strands feeding each output wire, in left-to-right order.

    Seeded with singleton bundles; a coarity-1 generator concatenates its
    argument bundles (so ``eta`` emits an empty one) and ``tau`` swaps two.
    The result is invariant under exchange and under all structural S-rules,
    which is what makes the braid of a step well defined.
    """
    return BundleState(tuple(_leaves(t) for t in _evaluate_trees(d)))


def _tree_diagram(tree) -> Diagram:
    if tree[0] == "leaf":
        return identity(1)
    children = tree[2]
    top = hcomp(*(map(_tree_diagram, children))) if children else identity(0)
    return vcomp(top, generator_diagram(tree[1]))


def perm_diagram(perm: tuple[int, ...]) -> Diagram:
    """The crossing-only 2-cell placing input ``perm[j]`` at position ``j``."""
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise CoherenceError(f"not a permutation: {perm}")
    arr = list(range(n))
    slices = []
    for j in range(n):
        k = arr.index(perm[j])
        for m in range(k - 1, j - 1, -1):
            arr[m], arr[m + 1] = arr[m + 1], arr[m]
            slices.append(Slice(m, TAU))
    return Diagram(n, tuple(slices))


def decompose_algebraic(d: Diagram) -> tuple[tuple[int, ...], Diagram]:
    """The unique factorization of an algebraic 2-cell into a permutation of
    its inputs followed by a crossing-free part.

    Returns ``(sigma, pure)`` where ``sigma[j]`` is the input wire arriving
    at position ``j`` of ``pure``; ``pure`` is tau-free and
    ``perm_diagram(sigma) ⋆₁ pure`` equals ``d`` modulo the structural
    congruence.
    """
    trees = _evaluate_trees(d)
    sigma = tuple(x for t in trees for x in _leaves(t))
    pure = (
        hcomp(*(map(_tree_diagram, trees))) if trees else identity(0)
    )
    return sigma, canonical_form(pure)


# -- the braid invariant ---------------------------------------------------


BRAIDING_RULE = "beta"


def braid_of_step(s: Step, source: Diagram) -> BraidWord:
    """The braid word of one step on the strands of ``source``'s inputs.

    Steps of any rule other than the commutativity cell contribute the empty
    word.  A commutativity step crosses the leaf bundle feeding the left
    wire of its redex over the bundle feeding the right wire, with the sign
    of the step's direction.
    """
    n = source.input_width
    if not diagram_equal(s.source(), source):
        raise CoherenceError(
            f"step {s.rule.name} {s.direction} does not apply to "
            f"'{print_diagram(source)}'"
        )
    if s.rule.name != BRAIDING_RULE:
        return BraidWord(n)
    bundles = leaf_bundles(s.context.top).bundles
    wire = s.context.left
    left, right = bundles[wire], bundles[wire + 1]
    a, b = len(left), len(right)
    if a == 0 or b == 0:
        return BraidWord(n)
    # Positions are leaf positions of the step's source: the bottom context
    # may move the merged bundle around, but never splits or reorders it, so
    # the two swapped blocks sit consecutively in the source's leaf order.
    # A forward step removes the redex crossing, so its source reads the
    # right bundle first.
    sigma, _ = decompose_algebraic(source)
    if s.direction == "forward":
        combined = right + left
        sign, first, second = 1, b, a
    else:
        combined = left + right
        sign, first, second = -1, a, b
    p = sigma.index(combined[0])
    if sigma[p: p + a + b] != combined:
        raise CoherenceError(
            f"redex bundles not contiguous in leaf order of "
            f"'{print_diagram(source)}'"
        )
    return block_crossing(p, first, second, sign, n)


def braid_of_trace(t: Trace, p: Polygraph | None = None) -> BraidWord:
    """The concatenated braid of a trace, in step order.

    ``p`` supplies the congruence for validating the boundary chain; it
    defaults to the ``br`` preset's polygraph.
    """
    if p is None:
        p = get_preset("br").polygraph
    validate_trace(t, congruence_equiv(p))
    n = t.source.input_width
    word = BraidWord(n)
    for s in t.steps:
        word = braid_concat(word, braid_of_step(s, s.source()))
    return word


# -- the deciders ----------------------------------------------------------


@dataclass(frozen=True)
class Decision:
    """A coherence decision plus its machine-readable evidence."""

    outcome: str  # "Equal" | "NotEqual" | "NotParallel"
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"outcome": self.outcome, "evidence": dict(self.evidence)}


def decide_coherence(preset: Preset, t1: Trace, t2: Trace) -> Decision:
    """Decide whether two traces of the preset are equal 3-cells.

    ``NotParallel`` when sources or targets differ under the preset's 2-cell
    congruence.  Otherwise: aspherical mode answers ``Equal``; braided mode
    compares the braid invariants.
    """
    p = preset.polygraph
    equiv = congruence_equiv(p)
    validate_trace(t1, equiv)
    validate_trace(t2, equiv)
    evidence = {
        "preset": preset.name,
        "source1": print_diagram(t1.source),
        "source2": print_diagram(t2.source),
        "target1": print_diagram(t1.target()),
        "target2": print_diagram(t2.target()),
    }
    if not (equiv(t1.source, t2.source) and equiv(t1.target(), t2.target())):
        return Decision("NotParallel", evidence)
    if preset.decision_mode == "aspherical":
        return Decision("Equal", evidence)
    b1 = braid_of_trace(t1, p)
    b2 = braid_of_trace(t2, p)
    evidence.update(
        braid1=str(b1),
        braid2=str(b2),
        garside1=str(garside_nf(b1)),
        garside2=str(garside_nf(b2)),
    )
    return Decision("Equal" if braid_equal(b1, b2) else "NotEqual", evidence)


def initial_algebra_compose(a1: Trace, a2: Trace,
                            preset: Preset | None = None) -> Trace:
    """The aligned ⋆₂ composite: boundaries matched under the structural
    congruence, braids concatenated."""
    if preset is None:
        preset = get_preset("br")
    try:
        return compose_traces(a1, a2, congruence_equiv(preset.polygraph))
    except RewriteError as exc:
        raise CoherenceError(f"misaligned composite: {exc}") from exc


def whisker_top(t: Trace, top: Diagram) -> Trace:
    """The trace ``top ⋆₁ t``: every step pushed under the extra 2-cell."""
    from .rewrite import Context

    if top.output_width != t.source.input_width:
        raise CoherenceError(
            f"whisker width mismatch: {top.output_width} vs "
            f"{t.source.input_width}"
        )
    steps = []
    for s in t.steps:
        c = s.context
        steps.append(
            Step(s.rule, s.direction,
                 Context(vcomp(top, c.top), c.left, c.right, c.bottom))
        )
    return Trace(vcomp(top, t.source), tuple(steps), t.congruence)
