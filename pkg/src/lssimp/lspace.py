"""Finite labelled graphs with accommodating set families.

A labelled space couples a finite edge-labelled graph with a family of
vertex sets (bit masks over the vertex list) that is closed under the
Boolean operations and under relative ranges.  Weak left-resolving means
relative ranges commute with intersections; together with closure under
relative complements this is normality, the standing hypothesis for
everything downstream.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import InputError
from .setalg import (
    FiniteSetAlgebra,
    close_generators,
    mask_members,
    powerset_algebra,
)

Word = tuple[str, ...]

EMPTY_WORD: Word = ()


def word(letters: Iterable[str]) -> Word:
    return tuple(letters)


def word_str(w: Word) -> str:
    """Concatenated display form; the empty word prints as ``e``."""
    return "".join(w) if w else "e"


@dataclass(frozen=True)
class LabelledGraph:
    """Vertices, labelled edges (src, letter, dst) and the letter alphabet."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[int, str, int], ...]
    alphabet: tuple[str, ...]

    def __post_init__(self):
        n = len(self.vertices)
        used = set()
        for (s, a, t) in self.edges:
            if not (0 <= s < n and 0 <= t < n):
                raise InputError(f"edge ({s},{a},{t}) has an endpoint outside the graph")
            if a not in self.alphabet:
                raise InputError(f"edge label {a!r} is not in the alphabet")
            used.add(a)
        missing = [a for a in self.alphabet if a not in used]
        if missing:
            raise InputError(f"labelling map is not surjective; unused letters {missing}")


class LabelledSpace:
    """A labelled graph plus an accommodating family of vertex sets."""

    def __init__(self, graph: LabelledGraph, family: FiniteSetAlgebra):
        if family.n != len(graph.vertices):
            raise InputError("family universe does not match the vertex set")
        self.graph = graph
        self.family = family
        self.n = len(graph.vertices)
        self.vertex_index = {v: i for i, v in enumerate(graph.vertices)}
        self.full_mask = (1 << self.n) - 1
        # per letter: target mask of each source vertex, and (for the
        # left-resolving fast path) the unique source of each target
        self._targets = {a: [0] * self.n for a in graph.alphabet}
        sources: dict[str, dict[int, int | None]] = {a: {} for a in graph.alphabet}
        for (s, a, t) in graph.edges:
            self._targets[a][s] |= 1 << t
            sources[a][t] = s if sources[a].get(t, s) == s else None
        self._unique_source = sources
        self._left_resolving = all(v is not None
                                   for m in sources.values() for v in m.values())
        self._step_cache: dict[tuple[int, str], int] = {}
        self._range_cache: dict[Word, int] = {EMPTY_WORD: self.full_mask}
        self._down_cache: dict[tuple[int | None, str, int], int | None] = {}
        out_any = 0
        for masks in self._targets.values():
            for v in range(self.n):
                if masks[v]:
                    out_any |= 1 << v
        self._sinks = self.full_mask & ~out_any

    # ------------------------------------------------------------ basic maps

    def mask(self, names: Iterable[str]) -> int:
        m = 0
        for name in names:
            if name not in self.vertex_index:
                raise InputError(f"unknown vertex {name!r}")
            m |= 1 << self.vertex_index[name]
        return m

    def names(self, mask: int) -> tuple[str, ...]:
        return tuple(self.graph.vertices[i] for i in mask_members(mask))

    def step(self, mask: int, letter: str) -> int:
        """Relative range along a single letter (no family check)."""
        key = (mask, letter)
        out = self._step_cache.get(key)
        if out is None:
            tgt = self._targets.get(letter)
            if tgt is None:
                raise InputError(f"unknown letter {letter!r}")
            out = 0
            m = mask
            v = 0
            while m:
                if m & 1:
                    out |= tgt[v]
                m >>= 1
                v += 1
            self._step_cache[key] = out
        return out

    def relative_range(self, mask: int, w: Word) -> int:
        """r(A, w) for a family member A; composes letter by letter."""
        if mask not in self.family:
            raise InputError("relative range of a set outside the family")
        out = mask
        for a in w:
            out = self.step(out, a)
        return out

    def range_of(self, w: Word) -> int:
        """r(w) = r(E^0, w); cached."""
        out = self._range_cache.get(w)
        if out is None:
            out = self.step(self.range_of(w[:-1]), w[-1])
            self._range_cache[w] = out
        return out

    def letters_out(self, mask: int) -> tuple[str, ...]:
        """Letters labelling some edge out of the set."""
        return tuple(a for a in self.graph.alphabet if self.step(mask, a))

    def sinks(self) -> int:
        """Mask of vertices with no outgoing edge."""
        return self._sinks

    def is_labelled_path(self, w: Word) -> bool:
        return self.range_of(w) != 0

    def labelled_paths(self, n: int) -> list[Word]:
        """All labelled paths of length <= n, shortlex order."""
        out: list[Word] = [EMPTY_WORD]
        frontier: list[Word] = [EMPTY_WORD]
        for _ in range(n):
            nxt = []
            for w in frontier:
                for a in self.graph.alphabet:
                    ext = w + (a,)
                    if self.range_of(ext):
                        nxt.append(ext)
            out.extend(nxt)
            frontier = nxt
        return out

    def is_regular(self, mask: int) -> bool:
        """Every nonempty family subset emits a letter; ∅ counts as regular."""
        if mask == 0:
            return True
        if mask not in self.family:
            raise InputError("regularity asked for a set outside the family")
        return all(self.letters_out(atom) for atom in self.family.atoms_below(mask))

    # ------------------------------------------------- ultrafilter transport

    def down(self, bound: int | None, letter: str, target: int) -> int | None:
        """Smallest family member A (below ``bound``) with r(A, letter) ⊇ target.

        ``bound is None`` means the whole family (level-0 algebra).  Returns
        None when no member qualifies; by weak left-resolving the minimum,
        when it exists, is the intersection of all qualifying members.
        """
        key = (bound, letter, target)
        if key in self._down_cache:
            return self._down_cache[key]
        if self.family.is_powerset and self._left_resolving:
            srcs = self._unique_source[letter]
            out: int | None = 0
            for t in mask_members(target):
                s = srcs.get(t)
                if s is None:
                    out = None
                    break
                out |= 1 << s
            if out is not None and bound is not None and out & ~bound:
                out = None
        else:
            out = None
            for e in (self.family.iter_elements() if bound is None
                      else self.family.elements_below(bound)):
                if self.step(e, letter) & target == target:
                    out = e if out is None else out & e
            if out is not None and self.step(out, letter) & target != target:
                # cannot happen on weakly left-resolving data; guard anyway
                out = None
        self._down_cache[key] = out
        return out

    def up_min(self, mask: int, bound: int) -> int | None:
        """Smallest family member above ``mask`` inside ``bound``."""
        return self.family.min_member_above(mask, bound)

    # ------------------------------------------------------------ validation

    def validate_normal(self) -> list[str]:
        """Diagnostics for closure, range-closure and weak left-resolving.

        Empty report iff the space is a normal weakly left-resolving
        labelled space (single letters suffice: relative ranges compose).
        """
        issues = self.family.validate_closed()
        fam = self.family
        # ranges of labelled paths must lie in the family: walk the orbit of
        # E^0 under the letter maps, which stabilizes on finitely many masks
        seen: dict[int, Word] = {}
        frontier = {self.full_mask: EMPTY_WORD}
        while frontier:
            nxt: dict[int, Word] = {}
            for m, w in frontier.items():
                for a in self.graph.alphabet:
                    r = self.step(m, a)
                    if r == 0:
                        continue
                    wa = w + (a,)
                    if r not in fam:
                        issues.append(
                            f"r({word_str(wa)})={set(self.names(r))} not in family")
                        if len(issues) > 40:
                            return issues
                    if r not in seen:
                        seen[r] = wa
                        nxt[r] = wa
            frontier = nxt
        if not fam.is_powerset:
            for e in fam.iter_elements():
                for a in self.graph.alphabet:
                    r = self.step(e, a)
                    if r not in fam:
                        issues.append(
                            f"relative range r({set(self.names(e))},{a})="
                            f"{set(self.names(r))} not in family")
                        if len(issues) > 40:
                            return issues
        # weak left-resolving on single letters
        if fam.is_powerset:
            if not self._left_resolving:
                for a, srcs in self._unique_source.items():
                    for t, s in srcs.items():
                        if s is None:
                            issues.append(
                                f"not weakly left-resolving: two {a}-edges into "
                                f"{self.graph.vertices[t]}")
        else:
            elems = list(fam.iter_elements())
            for i, x in enumerate(elems):
                for y in elems[i + 1:]:
                    for a in self.graph.alphabet:
                        if self.step(x & y, a) != self.step(x, a) & self.step(y, a):
                            issues.append(
                                f"not weakly left-resolving at A={set(self.names(x))}, "
                                f"B={set(self.names(y))}, letter {a}")
                            if len(issues) > 40:
                                return issues
        return issues


# ------------------------------------------------------------------ builders

def build_space(vertices: Sequence[str], edges: Iterable[tuple[str, str, str]],
                family_mode: str = "powerset",
                generators: Iterable[Iterable[str]] = ()) -> LabelledSpace:
    """Assemble a space from vertex names and (src, letter, dst) triples."""
    vlist = tuple(vertices)
    index = {v: i for i, v in enumerate(vlist)}
    try:
        edge_list = tuple((index[s], a, index[t]) for (s, a, t) in edges)
    except KeyError as exc:
        raise InputError(f"edge endpoint {exc.args[0]!r} is not a vertex") from None
    alphabet = tuple(sorted({a for (_, a, _) in edge_list}))
    graph = LabelledGraph(vlist, edge_list, alphabet)
    if family_mode == "powerset":
        family = powerset_algebra(len(vlist))
    elif family_mode == "generated":
        gen_masks = []
        for g in generators:
            m = 0
            for name in g:
                if name not in index:
                    raise InputError(f"generator vertex {name!r} is not a vertex")
                m |= 1 << index[name]
            gen_masks.append(m)
        family = _generated_family(vlist, edge_list, alphabet, gen_masks)
    else:
        raise InputError(f"unknown family mode {family_mode!r}")
    return LabelledSpace(graph, family)


def _generated_family(vlist, edge_list, alphabet, gen_masks) -> FiniteSetAlgebra:
    """Boolean closure of the generators, all ranges, and relative ranges."""
    n = len(vlist)
    targets = {a: [0] * n for a in alphabet}
    for (s, a, t) in edge_list:
        targets[a][s] |= 1 << t

    def step(mask, a):
        out = 0
        for v in range(n):
            if mask >> v & 1:
                out |= targets[a][v]
        return out

    seeds = set(gen_masks)
    frontier = {(1 << n) - 1}
    seen = set(frontier)
    while frontier:
        nxt = set()
        for m in frontier:
            for a in alphabet:
                r = step(m, a)
                if r and r not in seen:
                    seen.add(r)
                    nxt.add(r)
        seeds.update(nxt)
        frontier = nxt
    while True:
        alg = close_generators(n, seeds)
        missing = set()
        for e in alg.elements:
            for a in alphabet:
                r = step(e, a)
                if r not in alg:
                    missing.add(r)
        if not missing:
            return alg
        seeds = set(alg.elements) | missing


def space_from_json(obj: dict) -> LabelledSpace:
    """Parse the documented JSON schema into a space."""
    try:
        vertices = list(obj["vertices"])
        edges = [(e["src"], e["label"], e["dst"]) for e in obj["edges"]]
        fam = obj["family"]
        mode = fam["mode"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed space JSON: {exc}") from None
    gens = fam.get("generators", []) if mode == "generated" else []
    return build_space(vertices, edges, family_mode=mode, generators=gens)


def space_to_json(space: LabelledSpace) -> dict:
    fam = space.family
    if fam.is_powerset:
        fam_obj: dict = {"mode": "powerset"}
    else:
        fam_obj = {"mode": "generated",
                   "generators": [list(space.names(g)) for g in fam.generator_list]}
    return {
        "vertices": list(space.graph.vertices),
        "edges": [{"src": space.graph.vertices[s], "label": a,
                   "dst": space.graph.vertices[t]}
                  for (s, a, t) in space.graph.edges],
        "family": fam_obj,
    }


# ------------------------------------------------------------ random corpora

def random_space(rng: random.Random, max_vertices: int = 6,
                 max_letters: int = 4) -> LabelledSpace:
    """A random validated normal space (regenerates until validation passes)."""
    letters = "abcd"
    while True:
        n = rng.randint(1, max_vertices)
        k = rng.randint(1, max_letters)
        alphabet = letters[:k]
        vertices = tuple(str(i + 1) for i in range(n))
        powerset_mode = rng.random() < 0.5
        edges = []
        if powerset_mode:
            # left-resolving by construction: per (letter, target) one source
            for a in alphabet:
                for t in range(n):
                    s = rng.randrange(-1, n)
                    if s >= 0:
                        edges.append((vertices[s], a, vertices[t]))
        else:
            for _ in range(rng.randint(n, 3 * n)):
                edges.append((rng.choice(vertices), rng.choice(alphabet),
                              rng.choice(vertices)))
        if not edges:
            continue
        gens = []
        if not powerset_mode:
            for _ in range(rng.randint(0, 3)):
                size = rng.randint(1, n)
                gens.append(rng.sample(vertices, size))
        try:
            space = build_space(
                vertices, edges,
                family_mode="powerset" if powerset_mode else "generated",
                generators=gens)
        except InputError:
            continue
        if len(space.family) > 256:
            continue
        if space.validate_normal():
            continue
        return space
