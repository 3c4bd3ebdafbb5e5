"""The inverse semigroup of a labelled space.

Elements are triples (alpha, A, beta) with A a nonempty family member
contained in r(alpha) ∩ r(beta), together with an absorbing zero.  The
product concatenates words when one is a beginning of the other and
transports the middle sets through relative ranges.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError
from .lspace import LabelledSpace, Word, word_str


@dataclass(frozen=True)
class Triple:
    """A nonzero element (alpha, A, beta); A is a vertex bit mask."""

    alpha: Word
    mid: int
    beta: Word

    def __str__(self):
        return f"({word_str(self.alpha)},{{{self.mid:b}}},{word_str(self.beta)})"


ZERO = None  # the zero of S is represented by None


def validate_triple(space: LabelledSpace, s: Triple) -> None:
    """Check the defining conditions of S for this space."""
    if s.mid == 0:
        raise InputError("triple with empty middle set")
    if s.mid not in space.family:
        raise InputError("triple middle set is not in the family")
    ra = space.range_of(s.alpha)
    rb = space.range_of(s.beta)
    if s.mid & ~ra or s.mid & ~rb:
        raise InputError("triple middle set not contained in r(alpha) ∩ r(beta)")


def is_beginning(prefix: Word, w: Word) -> bool:
    return len(prefix) <= len(w) and w[:len(prefix)] == prefix


def multiply(space: LabelledSpace, s: Triple | None, t: Triple | None) -> Triple | None:
    """Product in S; returns None (zero) on incomparable words or empty middles."""
    if s is None or t is None:
        return None
    validate_triple(space, s)
    validate_triple(space, t)
    if is_beginning(s.beta, t.alpha):
        ext = t.alpha[len(s.beta):]
        mid = space.relative_range(s.mid, ext) & t.mid
        if mid == 0:
            return None
        return Triple(s.alpha + ext, mid, t.beta)
    if is_beginning(t.alpha, s.beta):
        ext = s.beta[len(t.alpha):]
        mid = s.mid & space.relative_range(t.mid, ext)
        if mid == 0:
            return None
        return Triple(s.alpha, mid, t.beta + ext)
    return None


def star(s: Triple | None) -> Triple | None:
    """Involution: swap the words; fixes zero."""
    if s is None:
        return None
    return Triple(s.beta, s.mid, s.alpha)


def is_idempotent(s: Triple | None) -> bool:
    return s is not None and s.alpha == s.beta


def idempotent_leq(space: LabelledSpace, p: Triple, q: Triple) -> bool:
    """Natural order on E(S): p <= q iff alpha = beta·alpha' and A ⊆ r(B, alpha')."""
    if not (is_idempotent(p) and is_idempotent(q)):
        raise InputError("order is defined on nonzero idempotents")
    if not is_beginning(q.alpha, p.alpha):
        return False
    ext = p.alpha[len(q.alpha):]
    return p.mid & ~space.relative_range(q.mid, ext) == 0


def idempotents_up_to(space: LabelledSpace, max_len: int) -> list[Triple]:
    """All (alpha, A, alpha) with |alpha| <= max_len, in deterministic order."""
    out = []
    for w in space.labelled_paths(max_len):
        bound = space.range_of(w)
        for mid in space.family.elements_below(bound):
            if mid:
                out.append(Triple(w, mid, w))
    out.sort(key=lambda s: (len(s.alpha), s.alpha, s.mid))
    return out
