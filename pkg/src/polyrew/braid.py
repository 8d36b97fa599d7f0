"""Braid words, Garside normal form, and Dehornoy handle reduction.

This is the decision engine behind the braided coherence theorem: the braid
invariant of a trace is a word in the Artin generators, and two traces are
equated precisely when their braids are equal.  Equality is decided through
the left-greedy Garside normal form ``Δ^k · f₁ ⋯ f_r`` (simple factors
represented as permutation tables), with Dehornoy handle reduction kept as an
independent triviality oracle for cross-checks.

Conventions, fixed project-wide:

* ``σ_i`` crosses the strands at positions ``i`` and ``i+1``; positive sign
  means strand ``i`` passes over strand ``i+1``.
* Words read left to right, matching trace steps read top to bottom.
* Permutations map positions top to bottom; ``perm_of_braid`` satisfies
  ``perm(w1·w2) = perm(w2) ∘ perm(w1)`` (ordinary function composition).
"""

from __future__ import annotations

from dataclasses import dataclass


class BraidError(Exception):
    """Raised for malformed braid words or mismatched strand counts."""


Letter = tuple[int, int]  # (index i with 1 <= i <= n-1, sign +1 or -1)


@dataclass(frozen=True)
class BraidWord:
    """A word in the Artin generators of the braid group on ``n`` strands."""

    n: int
    letters: tuple[Letter, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise BraidError("strand count must be at least 1")
        object.__setattr__(self, "letters", tuple(self.letters))
        for i, sign in self.letters:
            if not 1 <= i <= self.n - 1:
                raise BraidError(f"letter index {i} out of range for {self.n} strands")
            if sign not in (1, -1):
                raise BraidError(f"letter sign must be +1 or -1, got {sign}")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        return " ".join(
            f"s{i}" if sign > 0 else f"s{i}^-1" for i, sign in self.letters
        )


def braid_concat(w1: BraidWord, w2: BraidWord) -> BraidWord:
    if w1.n != w2.n:
        raise BraidError(f"strand mismatch: {w1.n} vs {w2.n}")
    return BraidWord(w1.n, w1.letters + w2.letters)


def braid_inverse(w: BraidWord) -> BraidWord:
    return BraidWord(w.n, tuple((i, -sign) for i, sign in reversed(w.letters)))


def sigma(n: int, i: int, sign: int = 1) -> BraidWord:
    """The single-letter word ``σ_i^sign`` on ``n`` strands."""
    return BraidWord(n, ((i, sign),))


# -- permutations (0-based tuples; p[x] is the image of position x) -------


def _identity_perm(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """Apply ``p`` first, then ``q``."""
    return tuple(q[p[x]] for x in range(len(p)))


def _invert(p: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(p)
    for x, y in enumerate(p):
        out[y] = x
    return tuple(out)


def _transposition(n: int, i: int) -> tuple[int, ...]:
    """Adjacent transposition for the letter σ_i (1-based index)."""
    p = list(range(n))
    p[i - 1], p[i] = p[i], p[i - 1]
    return tuple(p)


def _half_twist(n: int) -> tuple[int, ...]:
    return tuple(range(n - 1, -1, -1))


def perm_of_braid(w: BraidWord) -> tuple[int, ...]:
    """The underlying permutation, signs ignored (0-based position map)."""
    p = _identity_perm(w.n)
    for i, _sign in w.letters:
        p = _compose(p, _transposition(w.n, i))
    return p


# -- Garside left-greedy normal form --------------------------------------


def _descents(p: tuple[int, ...]) -> set[int]:
    """Starting set of the permutation braid of ``p``: {i : p(i) > p(i+1)}."""
    return {i + 1 for i in range(len(p) - 1) if p[i] > p[i + 1]}


@dataclass(frozen=True)
class GarsideNormalForm:
    """The left-greedy form ``Δ^delta_power · factors`` of a braid.

    Factors are simple elements stored as permutation tables; consecutive
    factors are left-weighted and none is the identity or the half twist.
    """

    n: int
    delta_power: int
    factors: tuple[tuple[int, ...], ...]

    def __str__(self) -> str:
        parts = [f"D^{self.delta_power}"]
        for f in self.factors:
            parts.append(" ".join(str(x + 1) for x in f))
        return " | ".join(parts)


def garside_nf(w: BraidWord) -> GarsideNormalForm:
    """The unique left-greedy normal form; equal iff equal as braids."""
    n = w.n
    w0 = _half_twist(n)
    power = 0
    factors: list[tuple[int, ...]] = []
    for i, sign in w.letters:
        s = _transposition(n, i)
        if sign > 0:
            factors.append(s)
        else:
            # σ_i⁻¹ = Δ⁻¹ · (Δ σ_i⁻¹); pushing the Δ⁻¹ to the front
            # conjugates the accumulated factors by the half twist.
            factors = [_compose(_compose(w0, f), w0) for f in factors]
            power -= 1
            factors.append(_compose(w0, s))
    factors = _left_weight(n, factors)
    while factors and factors[0] == w0:
        power += 1
        factors.pop(0)
    return GarsideNormalForm(n, power, tuple(factors))


def _left_weight(n: int, factors: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Sweep adjacent pairs until every pair (A, B) satisfies S(B) ⊆ F(A)."""
    ident = _identity_perm(n)
    factors = [f for f in factors if f != ident]
    changed = True
    while changed:
        changed = False
        for k in range(len(factors) - 1):
            a, b = factors[k], factors[k + 1]
            moved = False
            while True:
                pending = _descents(b) - _descents(_invert(a))
                if not pending:
                    break
                i = min(pending)
                s = _transposition(n, i)
                a = _compose(a, s)
                b = _compose(s, b)
                moved = True
            if moved:
                factors[k], factors[k + 1] = a, b
                changed = True
        if changed:
            factors = [f for f in factors if f != ident]
    return factors


def braid_equal(w1: BraidWord, w2: BraidWord) -> bool:
    """Whether the two words represent the same braid (Garside normal form)."""
    if w1.n != w2.n:
        raise BraidError(f"strand mismatch: {w1.n} vs {w2.n}")
    return garside_nf(w1) == garside_nf(w2)


def is_trivial(w: BraidWord) -> bool:
    nf = garside_nf(w)
    return nf.delta_power == 0 and not nf.factors


# -- Dehornoy handle reduction --------------------------------------------


def _free_reduce(letters: tuple[Letter, ...]) -> list[Letter]:
    stack: list[Letter] = []
    for letter in letters:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
    return stack


def handle_reduce(w: BraidWord, max_steps: int = 100_000) -> BraidWord:
    """Dehornoy handle reduction; the result is empty iff ``w`` is trivial.

    A ``σ_i``-handle is a factor ``σ_i^e v σ_i^{-e}`` whose interior ``v``
    contains no ``σ_i`` and no ``σ_{i-1}``.  Reducing it deletes the flanking
    letters and conjugates the interior's ``σ_{i+1}`` letters:
    ``σ_{i+1}^{±1} ↦ σ_{i+1}^{-e} σ_i^{±1} σ_{i+1}^{e}``.  We always reduce
    the handle with the leftmost end, which contains no nested handle; this
    strategy terminates (Dehornoy's theorem — the bound is a safety net).
    """
    letters = _free_reduce(w.letters)
    for _ in range(max_steps):
        handle = _first_handle(letters)
        if handle is None:
            return BraidWord(w.n, tuple(letters))
        p, q = handle
        i, e = letters[p]
        new_interior: list[Letter] = []
        for j, d in letters[p + 1: q]:
            if j == i + 1:
                new_interior.extend([(i + 1, -e), (i, d), (i + 1, e)])
            else:
                new_interior.append((j, d))
        letters = _free_reduce(
            tuple(letters[:p]) + tuple(new_interior) + tuple(letters[q + 1:])
        )
    raise BraidError("handle reduction exceeded its step budget")


def _first_handle(letters: list[Letter]) -> tuple[int, int] | None:
    """The handle with the leftmost end position, as an index pair (p, q)."""
    last_seen: dict[int, int] = {}
    for q, (i, sign) in enumerate(letters):
        p = last_seen.get(i)
        if p is not None and letters[p][1] == -sign:
            interior = letters[p + 1: q]
            if all(j != i - 1 for j, _ in interior):
                return p, q
        last_seen[i] = q
    return None


# -- block crossings ------------------------------------------------------


def block_crossing(p: int, a: int, b: int, sign: int, n: int) -> BraidWord:
    """The rigid crossing of the strand block ``p+1..p+a`` with the next
    ``b`` strands.

    With positive sign the left block of ``a`` strands passes over the right
    block of ``b`` strands; the word has length ``a·b`` and its permutation
    is the block swap.  The negative crossing is the inverse of the positive
    crossing of the swapped blocks.
    """
    if p < 0 or a < 0 or b < 0 or p + a + b > n:
        raise BraidError(
            f"block crossing out of range: p={p}, a={a}, b={b}, n={n}"
        )
    if a == 0 or b == 0:
        return BraidWord(n)
    if sign < 0:
        return braid_inverse(block_crossing(p, b, a, 1, n))
    letters = tuple(
        (p + a - i + j, 1) for j in range(b) for i in range(a)
    )
    return BraidWord(n, letters)
