"""Critical branchings, local confluence, homotopy bases, the S-construction.

``enumerate_critical_branchings`` finds every minimal overlapping pair of
rule applications.  Sources are built by superposing the two rule sources:
for each pair of exchange representatives, each way of identifying a
consecutive block of one with a window of the other (same generators, a
uniform horizontal shift) produces a candidate overlap, which is then
trimmed, verified by the matcher, and deduplicated by canonical form.  The
candidates are validated against an independent exhaustive search on the
small presets in the test suite.

``s_construction`` extends an algebraic presentation (all generators of
coarity 1) to a prop presentation: it adjoins the symmetry ``tau`` together
with the symmetry and Yang–Baxter rules and two naturality rules per
generator, built from the inductive crossings ``tau_{n,1}`` and
``tau_{1,n}``.  ``classify_branching`` sorts the critical branchings of an
S-constructed prop into the five families; everything not accounted for by
the structural bookkeeping is *proper* and contributes a generator to the
homotopy basis of the quotient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import (
    Diagram,
    DiagramError,
    Signature,
    Slice,
    TAU,
    canonical_form,
    diagram_equal,
    exchange_closure,
    exchange_closure_with_ids,
    generator_diagram,
    hcomp,
    identity,
    print_diagram,
    vcomp,
)
from .rewrite import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    Match,
    Polygraph,
    Rule,
    Step,
    Trace,
    compose_traces,
    find_matches,
    invert_trace,
    normalize,
)
from .termination import CertificateReport, Interpretation, check_decrease


class CriticalError(Exception):
    """Raised for invalid inputs to the critical-branching machinery."""


# -- the S-construction ---------------------------------------------------


def tau_diagram() -> Diagram:
    return generator_diagram(TAU)


def tau_block_left(n: int) -> Diagram:
    """The crossing ``tau_{n,1}``: a block of ``n`` wires over one wire.

    Inductively ``tau_{0,1} = id`` and
    ``tau_{n+1,1} = (id_n ⋆₀ tau) ⋆₁ (tau_{n,1} ⋆₀ id_1)``.
    """
    if n == 0:
        return identity(1)
    inner = hcomp(identity(n - 1), tau_diagram())
    return vcomp(inner, hcomp(tau_block_left(n - 1), identity(1)))


def tau_block_right(n: int) -> Diagram:
    """The crossing ``tau_{1,n}``: one wire over a block of ``n`` wires."""
    if n == 0:
        return identity(1)
    inner = hcomp(tau_diagram(), identity(n - 1))
    return vcomp(inner, hcomp(identity(1), tau_block_right(n - 1)))


def s_construction(p: Polygraph) -> Polygraph:
    """The prop presentation of the free symmetric theory over ``p``.

    Adds ``tau`` with the symmetry and Yang–Baxter rules, plus left/right
    naturality rules for every generator.  The input must be algebraic:
    every generator of coarity 1 and not already a prop.
    """
    if p.signature.is_prop:
        raise CriticalError("polygraph is already a prop")
    for g in p.signature.generators:
        if g.coarity != 1:
            raise CriticalError(
                f"S-construction needs an algebraic presentation; "
                f"generator {g.name} has coarity {g.coarity}"
            )
    sig = Signature(p.signature.name, p.signature.generators, is_prop=True)
    tau = tau_diagram()
    structural: list[Rule] = [
        Rule("sym", vcomp(tau, tau), identity(2), family="symmetry"),
        Rule(
            "yb",
            vcomp(
                hcomp(tau, identity(1)),
                hcomp(identity(1), tau),
                hcomp(tau, identity(1)),
            ),
            vcomp(
                hcomp(identity(1), tau),
                hcomp(tau, identity(1)),
                hcomp(identity(1), tau),
            ),
            family="yang_baxter",
        ),
    ]
    for g in p.signature.generators:
        gd = generator_diagram(g)
        m = g.arity
        # Naturality rewrites the single-crossing side (g above one tau) to
        # the tau-block side (the block of m crossings above 1 * g): the
        # generator slides down-through the crossing.  This orientation is
        # forced by the branching classification: the left/right overlap on
        # a shared tau exists only when both single-crossing sides are rule
        # sources.
        left_single = vcomp(hcomp(gd, identity(1)), tau)
        left_block = vcomp(tau_block_left(m), hcomp(identity(1), gd))
        right_single = vcomp(hcomp(identity(1), gd), tau)
        right_block = vcomp(tau_block_right(m), hcomp(gd, identity(1)))
        nat_l = Rule(f"nat_{g.name}_l", left_single, left_block,
                     family="naturality")
        nat_r = Rule(f"nat_{g.name}_r", right_single, right_block,
                     family="naturality")
        structural.append(nat_l)
        structural.append(nat_r)
    algebraic = tuple(
        Rule(r.name, r.lhs, r.rhs, family="algebraic") for r in p.rules
    )
    return Polygraph(sig, tuple(structural) + algebraic)


def structural_rules(p: Polygraph) -> tuple[Rule, ...]:
    return p.rules_of_family("symmetry", "yang_baxter", "naturality")


def is_s_constructed(p: Polygraph) -> bool:
    return p.signature.is_prop and len(structural_rules(p)) >= 2


# -- branchings -----------------------------------------------------------


@dataclass(frozen=True)
class Branching:
    """A minimal overlapping pair of forward rule applications."""

    source: Diagram
    step1: Step
    step2: Step
    occ1: frozenset[int] = frozenset()
    occ2: frozenset[int] = frozenset()

    @property
    def rules(self) -> tuple[str, str]:
        return (self.step1.rule.name, self.step2.rule.name)

    def shared_occurrences(self) -> frozenset[int]:
        return self.occ1 & self.occ2

    def to_dict(self) -> dict:
        return {
            "source": print_diagram(self.source),
            "rules": list(self.rules),
        }


def _is_minimal(u: Diagram, union: frozenset[int]) -> bool:
    """Whether no nontrivial context factors out of the branching source.

    ``u`` must be canonical and ``union`` the combined occurrence set of the
    two matches (canonical slice indices).  The source is non-minimal when
    some exchange representative starts or ends with a slice outside the
    union (a peelable top/bottom context) or when an outer identity wire
    passes untouched (a peelable whisker).  Slices outside the union that
    are stuck *between* the redexes are allowed: they make the branching
    entangled, not reducible.
    """
    for slices, ids in exchange_closure_with_ids(u):
        if ids and (ids[0] not in union or ids[-1] not in union):
            return False
        if u.input_width >= 1 and slices:
            if all(s.offset >= 1 for s in slices):
                return False
            w = u.input_width
            right_whisker = True
            for s in slices:
                if s.offset + s.gen.arity > w - 1:
                    right_whisker = False
                    break
                w += s.gen.coarity - s.gen.arity
            if right_whisker:
                return False
    return True


def _trim_outer_whiskers(d: Diagram) -> Diagram:
    """Remove identity wires passing untouched along either edge."""
    changed = True
    while changed:
        changed = False
        for member in exchange_closure(d):
            if d.input_width >= 1 and all(s.offset >= 1 for s in member):
                d = Diagram(
                    d.input_width - 1, tuple(s.shifted(-1) for s in member)
                )
                changed = True
                break
            md = Diagram(d.input_width, member)
            widths = md.widths()
            if d.input_width >= 1 and all(
                s.offset + s.gen.arity <= widths[i] - 1
                for i, s in enumerate(member)
            ):
                d = Diagram(d.input_width - 1, member)
                changed = True
                break
    return d


def _min_input_width(slices) -> int:
    """The least input width for which the slice sequence chains."""
    w0 = 0
    delta = 0
    for s in slices:
        w0 = max(w0, s.offset + s.gen.arity - delta)
        delta += s.gen.coarity - s.gen.arity
    return max(w0, 0)


def _superpose(rep1, rep2) -> list[tuple]:
    """Candidate overlaps of two rule-source representatives.

    Identifies each consecutive block ``rep2[j:j+m]`` with each window
    ``rep1[i:i+m]`` under a uniform horizontal shift; yields the fused slice
    sequences (prefix of rep2, all of rep1, suffix of rep2).
    """
    n1, n2 = len(rep1), len(rep2)
    out = []
    for m in range(1, min(n1, n2) + 1):
        for i in range(n1 - m + 1):
            for j in range(n2 - m + 1):
                if any(rep1[i + t].gen != rep2[j + t].gen for t in range(m)):
                    continue
                d0 = rep2[j].offset - rep1[i].offset
                if any(
                    rep2[j + t].offset - rep1[i + t].offset != d0
                    for t in range(m)
                ):
                    continue
                l1, l2 = (d0, 0) if d0 >= 0 else (0, -d0)
                fused = (
                    tuple(s.shifted(l2) for s in rep2[:j])
                    + tuple(s.shifted(l1) for s in rep1)
                    + tuple(s.shifted(l2) for s in rep2[j + m:])
                )
                out.append(fused)
    return out


def critical_pairs_on(
    p: Polygraph, u: Diagram, rule_pairs=None
) -> list[Branching]:
    """The critical branchings of ``p`` whose source is (the canonical form
    of) ``u``.

    A pair of matches is a critical branching when the matches share at
    least one generator occurrence (disjoint-support branchings are always
    confluent) and the source admits no nontrivial context factorization
    around both redexes (see :func:`_is_minimal`).
    """
    u = canonical_form(u)
    out = []
    if rule_pairs is None:
        rule_pairs = [
            (p.rules[a], p.rules[b])
            for a in range(len(p.rules))
            for b in range(a, len(p.rules))
        ]
    matches = {r.name: find_matches(u, r.lhs) for r in {x for pr in rule_pairs for x in pr}}
    for r1, r2 in rule_pairs:
        for m1 in matches[r1.name]:
            for m2 in matches[r2.name]:
                if r1 is r2 and m1.key() >= m2.key():
                    continue
                if not (m1.occurrences & m2.occurrences):
                    continue
                if not _is_minimal(u, m1.occurrences | m2.occurrences):
                    continue
                first, second = sorted(
                    ((r1, m1), (r2, m2)),
                    key=lambda rm: (rm[0].name, rm[1].key()),
                )
                out.append(
                    Branching(
                        u,
                        Step(first[0], "forward", first[1].context),
                        Step(second[0], "forward", second[1].context),
                        first[1].occurrences,
                        second[1].occurrences,
                    )
                )
    return out


def _branching_key(b: Branching) -> tuple:
    return (
        (b.source.input_width, b.source.slices),
        frozenset(
            {(b.step1.rule.name, b.occ1), (b.step2.rule.name, b.occ2)}
        ),
    )


def _insertion_variants(u: Diagram, p: Polygraph, width_bound: int):
    """Candidate entangled sources: ``u`` widened by outer wires with one
    extra generator slice spliced in at any depth and offset."""
    gens = p.signature.all_generators()
    for extra_l in range(0, 2):
        for extra_r in range(0, 2):
            base = hcomp(identity(extra_l), u, identity(extra_r))
            if max(base.widths()) > width_bound:
                continue
            for slices in exchange_closure(base):
                widths = [base.input_width]
                for s in slices:
                    widths.append(widths[-1] - s.gen.arity + s.gen.coarity)
                for pos in range(len(slices) + 1):
                    w = widths[pos]
                    for g in gens:
                        if w - g.arity + g.coarity > width_bound:
                            continue
                        for off in range(0, w - g.arity + 1):
                            new = slices[:pos] + (Slice(off, g),) + slices[pos:]
                            try:
                                yield Diagram(base.input_width, new)
                            except DiagramError:
                                continue


def enumerate_critical_branchings(
    p: Polygraph, max_extra_width: int = 2
) -> list[Branching]:
    """All critical branchings of ``p``, deduplicated and in canonical order.

    Candidate sources are generated in two phases and every candidate is
    re-verified against the matcher and the minimality test, so generation
    is heuristic but acceptance is not.  Phase 1 superposes pairs of rule
    sources over their exchange closures (all overlap-type branchings, where
    the source is the union of the two redexes).  Phase 2 splices one extra
    generator slice into each phase-1 source, possibly widened by outer
    wires, to catch entangled branchings whose source strictly contains the
    union — e.g. the wide Yang–Baxter self-overlap of the symmetry rules.
    Completeness is bounded: branchings needing two or more extra stuck
    slices would be missed; none arise for the presentations in scope,
    which the exhaustive-search cross-checks in the test suite confirm.
    """
    closures = {r.name: exchange_closure(r.lhs) for r in p.rules}
    found: dict[tuple, Branching] = {}
    rules = p.rules
    seen_sources: set = set()
    for a in range(len(rules)):
        for b in range(a, len(rules)):
            r1, r2 = rules[a], rules[b]
            width_bound = (
                max(r1.lhs.input_width, r1.lhs.output_width)
                + max(r2.lhs.input_width, r2.lhs.output_width)
                + max_extra_width
            )
            seen_candidates: set = set()
            for rep1 in closures[r1.name]:
                for rep2 in closures[r2.name]:
                    # Try both role orders so the above-the-overlap part of
                    # either rule source can end up on top of the fusion.
                    fusions = _superpose(rep1, rep2) + _superpose(rep2, rep1)
                    for fused in fusions:
                        w0 = _min_input_width(fused)
                        try:
                            candidate = Diagram(w0, fused)
                        except DiagramError:
                            continue
                        if max(candidate.widths()) > width_bound:
                            continue
                        candidate = _trim_outer_whiskers(candidate)
                        candidate = canonical_form(candidate)
                        ckey = (candidate.input_width, candidate.slices)
                        if ckey in seen_candidates or ckey in seen_sources:
                            continue
                        seen_candidates.add(ckey)
                        seen_sources.add(ckey)
                        for br in critical_pairs_on(p, candidate):
                            found.setdefault(_branching_key(br), br)
    # Phase 2: entangled sources, one stuck slice beyond the union.
    max_width = max(
        (max(br.source.widths()) for br in found.values()), default=0
    )
    width_bound = max_width + max_extra_width
    seen_variants: set = set()
    for br in list(found.values()):
        for variant in _insertion_variants(br.source, p, width_bound):
            v = canonical_form(variant)
            vkey = (v.input_width, v.slices)
            if vkey in seen_variants or vkey in seen_sources:
                continue
            seen_variants.add(vkey)
            for nb in critical_pairs_on(p, v):
                found.setdefault(_branching_key(nb), nb)
    out = list(found.values())
    out.sort(
        key=lambda br: (
            len(br.source.slices),
            br.source.input_width,
            print_diagram(br.source),
            br.rules,
            tuple(sorted(br.occ1)),
            tuple(sorted(br.occ2)),
        )
    )
    return out


# -- local confluence and homotopy bases ----------------------------------


@dataclass(frozen=True)
class ConfluenceDiagram:
    """A branching closed by two completions with a common target.

    ``completion1`` starts at the target of ``step1`` (and likewise for
    ``completion2``); the composites ``step_i`` then ``completion_i`` form
    the boundary of a generating-confluence 4-cell.
    """

    branching: Branching
    completion1: Trace
    completion2: Trace

    def leg(self, which: int) -> Trace:
        step = self.branching.step1 if which == 1 else self.branching.step2
        completion = self.completion1 if which == 1 else self.completion2
        return Trace(self.branching.source, (step,) + completion.steps)

    def to_dict(self) -> dict:
        from .rewrite import print_trace

        return {
            "branching": self.branching.to_dict(),
            "completion1": print_trace(self.completion1, "completion1"),
            "completion2": print_trace(self.completion2, "completion2"),
        }


@dataclass(frozen=True)
class FailureReport:
    """Local confluence failed: the two reducts have distinct normal forms."""

    branching: Branching
    normal_form1: Diagram
    normal_form2: Diagram

    def to_dict(self) -> dict:
        return {
            "branching": self.branching.to_dict(),
            "normal_form1": print_diagram(self.normal_form1),
            "normal_form2": print_diagram(self.normal_form2),
        }


def check_local_confluence(
    p: Polygraph, b: Branching, budget: int = DEFAULT_BUDGET
):
    """Close the branching by normalizing both reducts.

    Returns a :class:`ConfluenceDiagram` on success, a
    :class:`FailureReport` when the normal forms differ.
    """
    reduct1 = b.step1.target()
    reduct2 = b.step2.target()
    nf1, t1 = normalize(reduct1, p, budget)
    nf2, t2 = normalize(reduct2, p, budget)
    if diagram_equal(nf1, nf2):
        return ConfluenceDiagram(b, t1, t2)
    return FailureReport(b, nf1, nf2)


class ConfluenceError(CriticalError):
    """Raised when a homotopy basis is requested for a non-confluent system."""

    def __init__(self, message: str, failures: list[FailureReport]):
        super().__init__(message)
        self.failures = failures


def homotopy_basis(
    p: Polygraph,
    interp: Interpretation | None = None,
    assume_terminating: bool = False,
    max_extra_width: int = 2,
    budget: int = DEFAULT_BUDGET,
) -> list[ConfluenceDiagram]:
    """One confluence diagram per critical branching — a homotopy basis for
    a convergent presentation.

    Termination evidence is a precondition: pass an interpretation for a
    grid certificate, or set ``assume_terminating`` explicitly.
    """
    if interp is not None:
        report = check_decrease(p, interp)
        if not report.passed:
            raise CriticalError(
                f"termination evidence failed: {report.verdict}"
            )
    elif not assume_terminating:
        raise CriticalError(
            "homotopy_basis needs termination evidence: provide an "
            "interpretation or set assume_terminating=True"
        )
    basis = []
    failures = []
    for b in enumerate_critical_branchings(p, max_extra_width):
        result = check_local_confluence(p, b, budget)
        if isinstance(result, FailureReport):
            failures.append(result)
        else:
            basis.append(result)
    if failures:
        raise ConfluenceError(
            f"{len(failures)} critical branching(s) are not locally confluent",
            failures,
        )
    return basis


def export_identity_generators(basis: list[ConfluenceDiagram]) -> list[Trace]:
    """The closed traces ``s(γ) ⋆₂ t(γ)⁻`` of the basis 4-cells."""
    out = []
    for cd in basis:
        out.append(compose_traces(cd.leg(1), invert_trace(cd.leg(2))))
    return out


# -- the five-family classifier -------------------------------------------


FAMILY_TAGS = (
    "sym_yb",
    "naturality_vs_sym",
    "left_vs_right_naturality",
    "algebraic_vs_naturality",
    "proper",
)


def classify_branching(p: Polygraph, b: Branching) -> str:
    """The family tag of a critical branching of an S-constructed prop.

    Both rules structural (symmetry/Yang–Baxter) → ``sym_yb``; a naturality
    rule against either structural rule → ``naturality_vs_sym``; two
    naturality rules → ``left_vs_right_naturality``; an algebraic rule
    against a naturality rule overlapping only on the generator (the
    crossing stays outside the algebraic match) → ``algebraic_vs_naturality``;
    everything else is ``proper``.
    """
    if not is_s_constructed(p):
        raise CriticalError("classification needs an S-constructed prop")
    fams = {b.step1.rule.family, b.step2.rule.family}
    structural = {"symmetry", "yang_baxter"}
    if fams <= structural:
        return "sym_yb"
    if "naturality" in fams and (fams & structural):
        return "naturality_vs_sym"
    if fams == {"naturality"}:
        return "left_vs_right_naturality"
    if fams == {"algebraic", "naturality"}:
        canon = canonical_form(b.source)
        shared = b.shared_occurrences()
        if all(canon.slices[i].gen.name != "tau" for i in shared):
            return "algebraic_vs_naturality"
    return "proper"


# -- the pipeline ---------------------------------------------------------


@dataclass
class PipelineReport:
    """The aggregated output of the asphericity pipeline."""

    polygraph: str
    is_prop: bool
    termination: CertificateReport | None
    termination_smoke: bool | None
    branchings: list[Branching]
    confluent: bool
    failures: list[FailureReport]
    family_counts: dict = field(default_factory=dict)
    proper_count: int | None = None
    expected_proper_count: int | None = None
    verdict: str = ""
    discrepancy: bool = False

    def to_dict(self) -> dict:
        return {
            "polygraph": self.polygraph,
            "is_prop": self.is_prop,
            "termination": self.termination.to_dict() if self.termination else None,
            "termination_smoke": self.termination_smoke,
            "branchings": [b.to_dict() for b in self.branchings],
            "branching_count": len(self.branchings),
            "confluent": self.confluent,
            "failures": [f.to_dict() for f in self.failures],
            "family_counts": dict(self.family_counts),
            "proper_count": self.proper_count,
            "expected_proper_count": self.expected_proper_count,
            "discrepancy": self.discrepancy,
            "verdict": self.verdict,
            "status": "ok" if self.ok else "failed",
        }

    @property
    def ok(self) -> bool:
        return self.confluent and not self.discrepancy


def _smoke_terminates(p: Polygraph, budget: int) -> bool:
    """Budgeted-normalization smoke test: every rule side normalizes."""
    try:
        for r in p.rules:
            normalize(r.lhs, p, budget)
            normalize(r.rhs, p, budget)
    except BudgetExceededError:
        return False
    return True


def asphericity_pipeline(
    p: Polygraph,
    interp: Interpretation | None = None,
    expected_proper: int | None = None,
    max_extra_width: int = 2,
    budget: int = DEFAULT_BUDGET,
) -> PipelineReport:
    """Termination evidence, enumeration, local confluence, classification.

    For a pro, a passing run yields the verdict "aspherical (by convergent
    presentation)".  For a prop, the report lists the proper-branching basis
    and the verdict is "aspherical modulo Tietze step": Tietze equivalence
    of a declared 4-cell basis with the computed one is an obligation, not a
    machine-checked fact.  When ``expected_proper`` is given and the count
    differs, the report flags the discrepancy instead of absorbing it.
    """
    termination = check_decrease(p, interp) if interp is not None else None
    smoke = None if interp is not None else _smoke_terminates(p, budget)
    branchings = enumerate_critical_branchings(p, max_extra_width)
    failures = []
    for b in branchings:
        result = check_local_confluence(p, b, budget)
        if isinstance(result, FailureReport):
            failures.append(result)
    confluent = not failures
    report = PipelineReport(
        polygraph=p.signature.name,
        is_prop=p.signature.is_prop,
        termination=termination,
        termination_smoke=smoke,
        branchings=branchings,
        confluent=confluent,
        failures=failures,
    )
    terminating = termination.passed if termination else bool(smoke)
    if is_s_constructed(p):
        counts = {tag: 0 for tag in FAMILY_TAGS}
        for b in branchings:
            counts[classify_branching(p, b)] += 1
        report.family_counts = counts
        report.proper_count = counts["proper"]
        report.expected_proper_count = expected_proper
        if expected_proper is not None and counts["proper"] != expected_proper:
            report.discrepancy = True
        if confluent and terminating:
            report.verdict = "aspherical modulo Tietze step"
            if report.discrepancy:
                report.verdict += (
                    f" [DISCREPANCY: {counts['proper']} proper branchings, "
                    f"expected {expected_proper}]"
                )
        else:
            report.verdict = _not_established(failures, terminating)
    else:
        if confluent and terminating:
            report.verdict = "aspherical (by convergent presentation)"
        else:
            report.verdict = _not_established(failures, terminating)
    return report


def _not_established(failures: list[FailureReport], terminating: bool) -> str:
    reasons = []
    if failures:
        reasons.append(f"{len(failures)} branching(s) fail local confluence")
    if not terminating:
        reasons.append("no termination evidence")
    return "not established (" + "; ".join(reasons) + ")"
