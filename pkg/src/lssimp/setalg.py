"""Finite Boolean set algebras over {0, ..., n-1}, their atoms and ultrafilters.

Sets are stored as bit masks (int).  A finite family closed under
intersection, union and relative complement is a (generalized) Boolean
algebra; it always has a top (the union of all its members), every member
is a union of atoms, and its ultrafilters are exactly the principal
filters at atoms.  These facts drive all representations below.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import InputError


def mask_of(indices: Iterable[int], n: int) -> int:
    """Bit mask of a set of indices in range(n)."""
    m = 0
    for i in indices:
        if not 0 <= i < n:
            raise InputError(f"index {i} outside universe of size {n}")
        m |= 1 << i
    return m


def mask_members(mask: int) -> tuple[int, ...]:
    """Indices of the bits set in ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def canon_sort(masks: Iterable[int]) -> tuple[int, ...]:
    """Canonical element order: by size, then numeric value."""
    return tuple(sorted(set(masks), key=lambda m: (popcount(m), m)))


class FiniteSetAlgebra:
    """A finite family of subsets of range(n) closed under &, |, and \\.

    ``elements is None`` marks the powerset algebra, which is kept lazy so
    that large universes (vertex sets of truncated shift spaces) never
    materialize 2^n masks.
    """

    __slots__ = ("n", "elements", "generator_list", "_elem_set", "_atoms", "_top")

    def __init__(self, n: int, elements: Iterable[int] | None,
                 generator_list: tuple[int, ...] = ()):
        self.n = n
        self.generator_list = tuple(generator_list)
        if elements is None:
            self.elements = None
            self._elem_set = None
            self._atoms = canon_sort(1 << i for i in range(n))
            self._top = (1 << n) - 1
        else:
            elems = canon_sort(elements)
            if not elems or elems[0] != 0:
                elems = canon_sort(elems + (0,))
            self.elements = elems
            self._elem_set = frozenset(elems)
            top = 0
            for m in elems:
                top |= m
            self._top = top
            self._atoms = self._compute_atoms()

    @property
    def is_powerset(self) -> bool:
        return self.elements is None

    @property
    def top(self) -> int:
        """Union of all members (the largest element)."""
        return self._top

    def __contains__(self, mask: int) -> bool:
        if self.is_powerset:
            return 0 <= mask < (1 << self.n)
        return mask in self._elem_set

    def __len__(self) -> int:
        if self.is_powerset:
            return 1 << self.n
        return len(self.elements)

    def iter_elements(self) -> Iterator[int]:
        """All members in canonical order.  Avoid on large powersets."""
        if self.is_powerset:
            return iter(canon_sort(range(1 << self.n)))
        return iter(self.elements)

    def _compute_atoms(self) -> tuple[int, ...]:
        # atom at vertex v = meet of all members containing v
        atoms = set()
        for v in mask_members(self._top):
            bit = 1 << v
            m = self._top
            for e in self.elements:
                if e & bit:
                    m &= e
            atoms.add(m)
        return canon_sort(atoms)

    @property
    def all_atoms(self) -> tuple[int, ...]:
        return self._atoms

    def atoms_below(self, bound: int) -> tuple[int, ...]:
        """Atoms contained in ``bound`` (which must be a member)."""
        if bound not in self:
            raise InputError(f"bound {bound:#x} is not in the algebra")
        if self.is_powerset:
            return tuple(1 << v for v in mask_members(bound))
        return tuple(a for a in self._atoms if a & bound == a)

    def elements_below(self, bound: int) -> Iterator[int]:
        """Members contained in ``bound``."""
        if self.is_powerset:
            # iterate subsets of bound via the standard submask trick
            sub = bound
            yield 0
            while sub:
                yield sub
                sub = (sub - 1) & bound
        else:
            for e in self.elements:
                if e & bound == e:
                    yield e

    def min_member_above(self, mask: int, bound: int | None = None) -> int | None:
        """Smallest member containing ``mask`` (within ``bound`` if given).

        Returns None when no member qualifies.  Well defined because the
        family is closed under intersections.
        """
        if self.is_powerset:
            m = mask if bound is None else (mask if mask & ~bound == 0 else None)
            return m
        candidates = [e for e in self.elements
                      if e | mask == e and (bound is None or e & bound == e)]
        if not candidates:
            return None
        m = self._top
        for e in candidates:
            m &= e
        return m

    def validate_closed(self) -> list[str]:
        """Check ∅-membership and closure under &, |, and \\ ; report defects."""
        if self.is_powerset:
            return []
        issues = []
        elems = self.elements
        if 0 not in self._elem_set:
            issues.append("missing empty set")
        for a in elems:
            for b in elems:
                for m, op in ((a & b, "&"), (a | b, "|"), (a & ~b, "\\")):
                    if m not in self._elem_set:
                        issues.append(f"not closed under {op}: "
                                      f"{mask_members(a)} {op} {mask_members(b)}")
                        if len(issues) > 20:
                            return issues
        return issues


def powerset_algebra(n: int) -> FiniteSetAlgebra:
    """The (lazy) powerset algebra of range(n)."""
    return FiniteSetAlgebra(n, None)


def close_generators(n: int, generators: Iterable[int]) -> FiniteSetAlgebra:
    """Smallest family containing the generators and ∅, closed under &, |, \\.

    Worklist fixpoint; generator lists are tiny in all intended uses.
    """
    gens = []
    for g in generators:
        if g < 0 or g >= (1 << n):
            raise InputError(f"generator {g:#x} outside universe of size {n}")
        gens.append(g)
    elems = {0}
    elems.update(gens)
    work = list(elems)
    while work:
        a = work.pop()
        snapshot = list(elems)
        for b in snapshot:
            for m in (a & b, a | b, a & ~b, b & ~a):
                if m not in elems:
                    elems.add(m)
                    work.append(m)
    return FiniteSetAlgebra(n, elems, generator_list=tuple(canon_sort(gens)))


@dataclass(frozen=True)
class RestrictedAlgebra:
    """The members of ``parent`` contained in ``top`` (a Boolean algebra)."""

    parent: FiniteSetAlgebra
    top: int

    def __post_init__(self):
        if self.top not in self.parent:
            raise InputError("restriction bound is not a member of the algebra")

    def __contains__(self, mask: int) -> bool:
        return mask & self.top == mask and mask in self.parent

    def atoms(self) -> tuple[int, ...]:
        return self.parent.atoms_below(self.top)

    def elements(self) -> Iterator[int]:
        return self.parent.elements_below(self.top)


@dataclass(frozen=True)
class UltrafilterRep:
    """An ultrafilter of a restricted algebra, named by its atom.

    The represented filter is {B in the restriction : atom ⊆ B}.
    """

    algebra: RestrictedAlgebra = field(repr=False)
    atom: int = 0

    def __contains__(self, mask: int) -> bool:
        return mask in self.algebra and mask & self.atom == self.atom

    def members(self) -> tuple[int, ...]:
        return canon_sort(e for e in self.algebra.elements()
                          if e & self.atom == self.atom)


def atoms(algebra: FiniteSetAlgebra, bound: int) -> tuple[int, ...]:
    """Minimal nonzero members below ``bound``; disjoint, union = bound."""
    return algebra.atoms_below(bound)


def ultrafilters(algebra: FiniteSetAlgebra, bound: int) -> list[UltrafilterRep]:
    """One ultrafilter per atom below ``bound``; ``bound`` must be nonzero.

    Filters never contain 0, so the zero bound admits no filter at all.
    """
    if bound == 0:
        raise InputError("no filters exist below the empty set")
    restriction = RestrictedAlgebra(algebra, bound)
    return [UltrafilterRep(restriction, a) for a in algebra.atoms_below(bound)]
