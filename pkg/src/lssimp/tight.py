"""Filters in E(S) and the tight spectrum.

A filter in E(S) is a pair: a word (finite, or eventually periodic
infinite) together with a complete family of filters, one per level.  On
a finite normal space every filter level of a tight filter is principal,
so a tight filter is stored as the word plus one vertex-set atom per
level (the level-0 entry may be absent: the empty bottom filter).

Levels are linked by the downward transport

    atom_n = smallest family member A below r(word_{1,n})
             with r(A, word_{n+1}) ⊇ atom_{n+1}

which is the complete-family law specialized to principal filters.  The
surgery maps (glue, cut, shift) only relabel levels and re-derive the
low ones through this transport, so equality of filters is equality of
canonical forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError, InputError
from .invsemi import Triple, is_beginning
from .lspace import EMPTY_WORD, LabelledSpace, Word, word_str


# --------------------------------------------------------------------- words

def primitive_root(w: Word) -> Word:
    """Shortest u with w = u^k."""
    n = len(w)
    for d in range(1, n + 1):
        if n % d == 0 and w == w[:d] * (n // d):
            return w[:d]
    return w


def canonical_word(prefix: Word, cycle: Word) -> tuple[Word, Word]:
    """Minimal prefix and primitive period of prefix·cycle^∞."""
    cycle = primitive_root(cycle)
    prefix = tuple(prefix)
    while prefix and prefix[-1] == cycle[-1]:
        prefix = prefix[:-1]
        cycle = (cycle[-1],) + cycle[:-1]
    return prefix, cycle


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# ------------------------------------------------------------- tight filters

@dataclass(frozen=True)
class TightFilter:
    """A filter in E(S): word plus per-level atoms, in canonical form.

    ``word_cycle is None`` marks finite type; then ``atoms`` covers levels
    0..len(word_prefix).  Otherwise levels 1..p are in ``atoms[1:]``,
    level 0 in ``atoms[0]`` (None encodes the empty bottom filter) and
    level p+1+i lives at ``atom_cycle[i % q]``.
    """

    word_prefix: Word
    word_cycle: Word | None
    atoms: tuple
    atom_cycle: tuple

    @property
    def is_finite(self) -> bool:
        return self.word_cycle is None

    @property
    def prefix_len(self) -> int:
        return len(self.word_prefix)

    def letter(self, n: int) -> str:
        """The n-th word letter, n >= 1."""
        p = self.prefix_len
        if n <= p:
            return self.word_prefix[n - 1]
        if self.is_finite:
            raise InputError(f"level {n} beyond the finite word")
        return self.word_cycle[(n - p - 1) % len(self.word_cycle)]

    def atom_at(self, n: int):
        """Atom at level n (None possible only at n = 0)."""
        p = self.prefix_len
        if n <= p:
            return self.atoms[n]
        if self.is_finite:
            raise InputError(f"level {n} beyond the finite word")
        return self.atom_cycle[(n - p - 1) % len(self.atom_cycle)]

    def word_beginning(self, n: int) -> Word:
        return tuple(self.letter(i) for i in range(1, n + 1))

    def begins_with(self, w: Word) -> bool:
        if self.is_finite and len(w) > self.prefix_len:
            return False
        return self.word_beginning(len(w)) == w

    def word_display(self) -> str:
        if self.is_finite:
            return word_str(self.word_prefix)
        u, v = canonical_word(self.word_prefix, self.word_cycle)
        return f"{''.join(u)}({''.join(v)})^inf"

    def __str__(self):
        return self.word_display()


def make_finite_filter(space: LabelledSpace, word: Word,
                       top_atom: int) -> TightFilter:
    """Finite-type filter from its word and topmost atom; lower levels derived."""
    n = len(word)
    bound = space.range_of(word)
    if top_atom == 0 or top_atom & ~bound or top_atom not in space.family:
        raise InputError("top atom must be a nonempty family member below r(word)")
    atoms: list = [None] * (n + 1)
    atoms[n] = top_atom
    for i in range(n - 1, -1, -1):
        bound_i = space.range_of(word[:i]) if i > 0 else None
        atoms[i] = space.down(bound_i, word[i], atoms[i + 1])
        if i > 0 and atoms[i] is None:
            raise InputError("level filter vanished above level 0")
    return TightFilter(word, None, tuple(atoms), ())


def make_infinite_filter(space: LabelledSpace, word_prefix: Word, word_cycle: Word,
                         atoms: Sequence, atom_cycle: Sequence) -> TightFilter:
    """Canonicalize an eventually periodic tower (joint word+atom form)."""
    p, q = len(word_prefix), len(word_cycle)
    if q == 0 or len(atom_cycle) != q or len(atoms) != p + 1:
        raise InputError("misaligned prefix/cycle data")

    def letter(n):
        return word_prefix[n - 1] if n <= p else word_cycle[(n - p - 1) % q]

    def atom(n):
        return atoms[n] if n <= p else atom_cycle[(n - p - 1) % q]

    d = q
    for cand in _divisors(q):
        if all((letter(p + 1 + i), atom(p + 1 + i))
               == (letter(p + 1 + i % cand), atom(p + 1 + i % cand))
               for i in range(q)):
            d = cand
            break
    p2 = p
    while p2 >= 1 and (letter(p2), atom(p2)) == (letter(p2 + d), atom(p2 + d)):
        p2 -= 1
    new_prefix = tuple(letter(i) for i in range(1, p2 + 1))
    new_cycle = tuple(letter(i) for i in range(p2 + 1, p2 + d + 1))
    new_atoms = tuple(atom(i) if i > 0 else atoms[0] for i in range(p2 + 1))
    new_acycle = tuple(atom(i) for i in range(p2 + 1, p2 + d + 1))
    return TightFilter(new_prefix, new_cycle, new_atoms, new_acycle)


def level_bound(space: LabelledSpace, tf: TightFilter, n: int) -> int | None:
    """r(word_{1,n}) as a mask; None for n = 0 (the unrestricted algebra)."""
    if n == 0:
        return None
    return space.range_of(tf.word_beginning(n))


def stabilized_horizon(space: LabelledSpace, tf: TightFilter) -> int:
    """A level beyond which the (range, level-in-period) data only repeats."""
    if tf.is_finite:
        return tf.prefix_len
    p, q = tf.prefix_len, len(tf.word_cycle)
    cur = space.range_of(tf.word_prefix)
    seen = {cur: 0}
    count = 1
    while True:
        for a in tf.word_cycle:
            cur = space.step(cur, a)
        if cur in seen:
            return p + (count + 1) * q
        seen[cur] = count
        count += 1


def check_filter(space: LabelledSpace, tf: TightFilter) -> None:
    """Assert the complete-family law over the stabilized window (for tests)."""
    horizon = stabilized_horizon(space, tf)
    for n in range(horizon, 0, -1):
        a = tf.atom_at(n)
        bound = level_bound(space, tf, n)
        if a == 0 or a & ~bound or a not in space.family:
            raise AssertionError(f"level {n} atom invalid")
        below = space.down(level_bound(space, tf, n - 1), tf.letter(n), a)
        if n > 1:
            if below != tf.atom_at(n - 1):
                raise AssertionError(f"complete family law fails at level {n - 1}")
        else:
            if below != tf.atoms[0]:
                raise AssertionError("complete family law fails at level 0")


# ---------------------------------------------------------- ultrafilter maps

def f_map(space: LabelledSpace, alpha: Word, beta: Word, atom: int) -> int | None:
    """Dual of r(·, beta): 𝓑_{alpha·beta} ultrafilters to 𝓑_alpha.

    Returns the image ultrafilter's atom, or None for the empty filter
    (possible only when alpha is the empty word).
    """
    if not space.is_labelled_path(alpha + beta):
        raise InputError("f_map needs alpha·beta to be a labelled path")
    cur: int | None = atom
    for i in range(len(beta), 0, -1):
        w = alpha + beta[:i - 1]
        bound = space.range_of(w) if w else None
        cur = space.down(bound, beta[i - 1], cur)
        if cur is None:
            if w:
                raise AssertionError("f_map vanished above level 0")
            return None
    return cur


def g_map(space: LabelledSpace, alpha: Word, beta: Word, atom: int) -> int:
    """Glue alpha in front of an ultrafilter of 𝓑_beta containing r(alpha·beta).

    On principal ultrafilters this keeps the atom: every member is cut
    down by r(alpha·beta), which already contains the atom.
    """
    r_ab = space.range_of(alpha + beta)
    if atom & ~r_ab:
        raise DomainError("g_map needs r(alpha·beta) in the filter")
    return atom


def h_map(space: LabelledSpace, alpha: Word, beta: Word, atom: int) -> int:
    """Cut alpha from an ultrafilter of 𝓑_{alpha·beta}: upward closure in 𝓑_beta.

    The atom itself is a family member below r(beta), so the upward
    closure is again principal at the same atom.
    """
    if not space.is_labelled_path(alpha + beta):
        raise InputError("h_map needs alpha·beta to be a labelled path")
    if atom & ~space.range_of(alpha + beta):
        raise InputError("atom not below r(alpha·beta)")
    return atom


# ------------------------------------------------------------ filter surgery

def glue(space: LabelledSpace, alpha: Word, tf: TightFilter) -> TightFilter:
    """G: prepend alpha to the word; defined when r(alpha) lies in level 0."""
    if not alpha:
        return tf
    if not space.is_labelled_path(alpha):
        raise DomainError(f"{word_str(alpha)} is not a labelled path")
    a0 = tf.atoms[0]
    if a0 is None or a0 & ~space.range_of(alpha):
        raise DomainError("filter is not in the glue domain T_(alpha)")
    k = len(alpha)
    new_prefix = alpha + tf.word_prefix
    p = len(new_prefix)

    def new_letter(n):
        return new_prefix[n - 1] if n <= p else tf.word_cycle[(n - p - 1) % len(tf.word_cycle)]

    atoms: list = [None] * (p + 1)
    for n in range(k + 1, p + 1):
        atoms[n] = tf.atom_at(n - k)
    if tf.is_finite and len(tf.word_prefix) == 0:
        atoms[k] = a0
        chain_top = k
    else:
        top_val = tf.atom_at(1)
        bound = space.range_of(new_prefix[:k]) if k > 0 else None
        atoms[k] = space.down(bound, new_letter(k + 1), top_val)
        chain_top = k
    for n in range(chain_top - 1, -1, -1):
        bound = space.range_of(new_prefix[:n]) if n > 0 else None
        atoms[n] = space.down(bound, new_letter(n + 1), atoms[n + 1])
        if n > 0 and atoms[n] is None:
            raise AssertionError("glue vanished above level 0")
    if tf.is_finite:
        return TightFilter(new_prefix, None, tuple(atoms), ())
    return make_infinite_filter(space, new_prefix, tf.word_cycle,
                                atoms, tf.atom_cycle)


def cut(space: LabelledSpace, tf: TightFilter, alpha: Word) -> TightFilter:
    """H: remove the beginning alpha from the word (inverse of glue)."""
    if not alpha:
        return tf
    if not tf.begins_with(alpha):
        raise DomainError(f"{word_str(alpha)} is not a beginning of the filter's word")
    k = len(alpha)
    if tf.is_finite:
        word = tf.word_prefix[k:]
        atoms = (tf.atoms[k],) + tf.atoms[k + 1:]
        return TightFilter(word, None, atoms, ())
    p, q = tf.prefix_len, len(tf.word_cycle)
    reps = 0
    while p + reps * q < k + 1:
        reps += 1
    ext_prefix = tf.word_beginning(p + reps * q)
    ext_atoms = [tf.atoms[0]] + [tf.atom_at(n) for n in range(1, p + reps * q + 1)]
    cycle_letters = tuple(tf.letter(n) for n in range(p + reps * q + 1,
                                                      p + (reps + 1) * q + 1))
    cycle_atoms = tuple(tf.atom_at(n) for n in range(p + reps * q + 1,
                                                     p + (reps + 1) * q + 1))
    new_prefix = ext_prefix[k:]
    new_atoms = [ext_atoms[k]] + ext_atoms[k + 1:]
    return make_infinite_filter(space, new_prefix, cycle_letters,
                                new_atoms, cycle_atoms)


def shift(space: LabelledSpace, tf: TightFilter, n: int) -> TightFilter:
    """sigma^n: cut the first n letters."""
    if n == 0:
        return tf
    if tf.is_finite and n > tf.prefix_len:
        raise DomainError("shift beyond the end of a finite-type filter")
    return cut(space, tf, tf.word_beginning(n))


# ------------------------------------------------------------ classification

@dataclass(frozen=True)
class Classification:
    kind: str  # "TightFinite" | "TightInfinite" | "NotTight"
    reason: str


def classify(space: LabelledSpace, word_part, mins: Sequence) -> Classification:
    """Apply the tight-filter classification to a (word, complete family) pair.

    ``word_part`` is a finite word, or a (prefix, cycle) pair for an
    eventually periodic infinite word.  ``mins`` gives the minimum of each
    level filter: a sequence of masks aligned with levels 0..|word| (None
    at index 0 for the empty bottom), and for infinite words a pair
    (prefix mins, cycle mins).
    """
    if isinstance(word_part, tuple) and word_part and isinstance(word_part[0], tuple):
        prefix, cycle = word_part
        pre_mins, cyc_mins = mins
        tf = make_infinite_filter(space, tuple(prefix), tuple(cycle),
                                  list(pre_mins), list(cyc_mins))
        horizon = stabilized_horizon(space, tf)
        for n in range(1, horizon + 1):
            m = tf.atom_at(n)
            bound = level_bound(space, tf, n)
            if m == 0 or m not in space.family or m & ~bound:
                raise InputError(f"malformed family at level {n}")
            if m not in space.family.atoms_below(bound):
                return Classification(
                    "NotTight", f"level-{n} filter is not an ultrafilter")
            want = space.down(level_bound(space, tf, n - 1), tf.letter(n), m)
            have = tf.atoms[0] if n == 1 else tf.atom_at(n - 1)
            if want != have:
                raise InputError(f"family is not complete at level {n - 1}")
        return Classification("TightInfinite",
                              "infinite type with ultrafilter levels")
    word = tuple(word_part)
    mins = list(mins)
    if len(mins) != len(word) + 1:
        raise InputError("family length does not match the word")
    top = mins[-1]
    bound = space.range_of(word) if word else space.family.top
    if top is None or top == 0 or top not in space.family or top & ~bound:
        raise InputError("malformed top filter")
    for n in range(len(word), 0, -1):
        m = mins[n]
        if m is None or m == 0 or m not in space.family:
            raise InputError(f"malformed family at level {n}")
        want = space.down(level_bound_word(space, word, n - 1), word[n - 1], mins[n])
        if want != mins[n - 1]:
            raise InputError(f"family is not complete at level {n - 1}")
    top_atoms = (space.family.all_atoms if not word
                 else space.family.atoms_below(bound))
    if top not in top_atoms:
        return Classification("NotTight", "top filter is not an ultrafilter")
    # finite alphabet: L(A E^1) is never infinite, so only the sink clause counts
    if top & ~space.sinks() == 0:
        return Classification("TightFinite", "top atom consists of sinks")
    return Classification(
        "NotTight", "no sink witness below the top atom (finite alphabet)")


def level_bound_word(space: LabelledSpace, word: Word, n: int) -> int | None:
    return None if n == 0 else space.range_of(word[:n])


# -------------------------------------------------------------- enumeration

def enumerate_tight(space: LabelledSpace, max_prefix: int,
                    max_period: int) -> list[TightFilter]:
    """All tight filters with canonical joint form within the given bounds.

    Finite type: every word of length <= max_prefix whose top atom is made
    of sinks.  Infinite type: periodic atom towers found as fixed points
    of the one-period downward transport, extended through the stabilized
    range orbit, then canonicalized and deduplicated.
    """
    found: dict[TightFilter, None] = {}
    for w in space.labelled_paths(max_prefix):
        # the level algebra at the empty word is the whole family, whose
        # top need not equal E^0
        ats = (space.family.all_atoms if not w
               else space.family.atoms_below(space.range_of(w)))
        for atom in ats:
            if atom & ~space.sinks() == 0:
                found.setdefault(make_finite_filter(space, w, atom))
    sink_free_letters = space.graph.alphabet
    for p in range(max_prefix + 1):
        prefixes = [w for w in space.labelled_paths(p) if len(w) == p]
        for q in range(1, max_period + 1):
            cycles = _all_words(sink_free_letters, q)
            for u in prefixes:
                for v in cycles:
                    for tf in _periodic_towers(space, u, v):
                        if (tf.prefix_len <= max_prefix
                                and len(tf.word_cycle) <= max_period):
                            found.setdefault(tf)
    def key(t: TightFilter):
        a0 = -1 if t.atoms[0] is None else t.atoms[0]
        return (t.is_finite, t.prefix_len, t.word_prefix, t.word_cycle or (),
                a0, t.atoms[1:], t.atom_cycle)

    return sorted(found, key=key)


def _all_words(alphabet: Iterable[str], n: int) -> list[Word]:
    out: list[Word] = [EMPTY_WORD]
    for _ in range(n):
        out = [w + (a,) for w in out for a in alphabet]
    return out


def _periodic_towers(space: LabelledSpace, u: Word, v: Word) -> list[TightFilter]:
    """Valid towers on the word u·v^∞ whose joint form has period |v|."""
    p, q = len(u), len(v)

    def letter(n):
        return u[n - 1] if n <= p else v[(n - p - 1) % q]

    # range orbit: R_n for n = 1..p, then blockwise until the q-step map repeats
    blocks = [space.range_of(u) if p else space.full_mask]
    seen = {blocks[0]: 0}
    while True:
        nxt = blocks[-1]
        for a in v:
            nxt = space.step(nxt, a)
        if nxt in seen:
            c0, c1 = seen[nxt], len(blocks) - seen[nxt]
            break
        seen[nxt] = len(blocks)
        blocks.append(nxt)
    horizon = p + (c0 + c1 + 1) * q
    ranges: list[int | None] = [None] * (horizon + 1)
    cur = space.full_mask
    for n in range(1, horizon + 1):
        cur = space.step(cur, letter(n))
        if cur == 0:
            return []  # u·v^∞ is not an infinite labelled path
        ranges[n] = cur

    out = []
    for cand in space.family.atoms_below(ranges[p + q]):
        tower: list = [None] * (horizon + 1)
        tower[p + q] = cand
        ok = True
        for n in range(p + q, 1, -1):
            below = space.down(ranges[n - 1] if n - 1 > 0 else None,
                               letter(n), tower[n])
            if n - 1 > 0 and below is None:
                ok = False
                break
            tower[n - 1] = below
        if not ok:
            continue
        # extend periodically upward and verify the law across the whole
        # stabilized window (covers every distinct range configuration)
        for n in range(p + 1, horizon + 1):
            tower[n] = tower[p + 1 + (n - p - 1) % q]
        for n in range(horizon, p + 1, -1):
            if tower[n] & ~ranges[n]:
                ok = False
                break
            below = space.down(ranges[n - 1] if n - 1 > 0 else None,
                               letter(n), tower[n])
            want = tower[n - 1] if n - 1 > 0 else tower[0]
            if n - 1 > 0 and below != want:
                ok = False
                break
        if not ok:
            continue
        tower[0] = space.down(None, letter(1), tower[1])
        out.append(make_infinite_filter(
            space, u, v, tower[:p + 1], tower[p + 1:p + q + 1]))
    return out


# ------------------------------------------------------- membership queries

def contains(space: LabelledSpace, tf: TightFilter, e: Triple) -> bool:
    """(beta, A, beta) ∈ ξ iff beta begins the word and atom_{|beta|} ⊆ A."""
    if e.alpha != e.beta:
        raise InputError("membership is defined for idempotents")
    if not tf.begins_with(e.alpha):
        return False
    atom = tf.atom_at(len(e.alpha))
    return atom is not None and atom & ~e.mid == 0


def in_basic_open(space: LabelledSpace, tf: TightFilter, e: Triple,
                  excluded: Iterable[Triple] = ()) -> bool:
    """Membership in the basic open set V_{e : e_1..e_n}."""
    return contains(space, tf, e) and not any(contains(space, tf, x)
                                              for x in excluded)


# ------------------------------------------------------------------ notation

def format_tight(space: LabelledSpace, tf: TightFilter) -> str:
    """Textual form, e.g. ``b(a)^inf : [{2},{1}] ([{1}])^inf``."""

    def atom_str(a):
        return "-" if a is None else "{" + ",".join(space.names(a)) + "}"

    head = "[" + ",".join(atom_str(a) for a in tf.atoms) + "]"
    if tf.is_finite:
        return f"{tf.word_display()} : {head}"
    cyc = "[" + ",".join(atom_str(a) for a in tf.atom_cycle) + "]"
    u = "".join(tf.word_prefix)
    v = "".join(tf.word_cycle)
    return f"{u}({v})^inf : {head} ({cyc})^inf"


def parse_tight(space: LabelledSpace, text: str) -> TightFilter:
    """Inverse of format_tight (single-character letters)."""
    try:
        word_part, atoms_part = [s.strip() for s in text.split(":")]
    except ValueError:
        raise InputError(f"bad filter notation {text!r}") from None

    def parse_atom(s):
        s = s.strip()
        if s == "-":
            return None
        if not (s.startswith("{") and s.endswith("}")):
            raise InputError(f"bad atom {s!r}")
        inner = s[1:-1].strip()
        return space.mask(x.strip() for x in inner.split(",")) if inner else 0

    def parse_atom_list(s):
        s = s.strip()
        if not (s.startswith("[") and s.endswith("]")):
            raise InputError(f"bad atom list {s!r}")
        inner = s[1:-1].strip()
        if not inner:
            return []
        parts = []
        depth = 0
        cur = ""
        for ch in inner:
            if ch == "{":
                depth += 1
            if ch == "}":
                depth -= 1
            if ch == "," and depth == 0:
                parts.append(cur)
                cur = ""
            else:
                cur += ch
        parts.append(cur)
        return [parse_atom(x) for x in parts]

    if "(" in word_part:
        if not word_part.endswith(")^inf"):
            raise InputError(f"bad word {word_part!r}")
        u_str, v_str = word_part[:-5].split("(")
        u = tuple(u_str) if u_str and u_str != "e" else EMPTY_WORD
        v = tuple(v_str)
        if "(" not in atoms_part:
            raise InputError("infinite word needs a periodic atom part")
        head_str, cyc_str = atoms_part.split("(")
        if not cyc_str.endswith(")^inf"):
            raise InputError(f"bad atom cycle {cyc_str!r}")
        head = parse_atom_list(head_str.strip())
        cyc = parse_atom_list(cyc_str[:-5].strip())
        return make_infinite_filter(space, u, v, head, cyc)
    w = EMPTY_WORD if word_part == "e" else tuple(word_part)
    head = parse_atom_list(atoms_part)
    if len(head) != len(w) + 1:
        raise InputError("atom list does not match the word length")
    tf = make_finite_filter(space, w, head[-1])
    if list(tf.atoms) != head:
        raise InputError("atom list is not a complete family")
    return tf
