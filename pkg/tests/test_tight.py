import random
from itertools import product

import pytest

from lssimp.errors import DomainError, InputError
from lssimp.examples import ls1, single_loop, sink_space
from lssimp.invsemi import Triple
from lssimp.lspace import build_space, random_space, word
from lssimp.tight import (
    TightFilter,
    canonical_word,
    check_filter,
    classify,
    contains,
    cut,
    enumerate_tight,
    f_map,
    format_tight,
    g_map,
    glue,
    h_map,
    in_basic_open,
    make_finite_filter,
    make_infinite_filter,
    parse_tight,
    shift,
)


@pytest.fixture
def space():
    return ls1()


def xi_a_inf(space):
    one = space.mask("1")
    return make_infinite_filter(space, (), ("a",), [one], [one])


def xi_ba_inf(space):
    one, two = space.mask("1"), space.mask("2")
    return make_infinite_filter(space, ("b",), ("a",), [two, one], [one])


# ------------------------------------------------------------------ words

def test_canonical_word():
    assert canonical_word(("a", "b"), ("a", "b")) == ((), ("a", "b"))
    assert canonical_word(("b",), ("a", "b")) == ((), ("b", "a"))
    assert canonical_word((), ("a", "b", "a", "b")) == ((), ("a", "b"))
    assert canonical_word(("b", "a"), ("a",)) == (("b",), ("a",))


# ------------------------------------------------------------------- f, g, h

def oracle_f(space, alpha, beta, atom):
    """Direct scan: the minimum of {A in B_alpha : r(A, beta) ⊇ atom}."""
    bound = space.range_of(alpha) if alpha else None
    best = None
    for e in space.family.iter_elements():
        if bound is not None and e & ~bound:
            continue
        if space.relative_range(e, beta) & atom == atom:
            best = e if best is None else best & e
    return best


def test_f_map_examples(space):
    one, two = space.mask("1"), space.mask("2")
    assert f_map(space, word("a"), word("b"), one) == two
    assert f_map(space, word(""), word("a"), one) == one
    assert f_map(space, word("a"), word(""), one) == one


def test_f_map_matches_oracle():
    rng = random.Random(31)
    for _ in range(8):
        sp = random_space(rng, max_vertices=5, max_letters=3)
        for alpha, beta in product(sp.labelled_paths(2), repeat=2):
            if not sp.is_labelled_path(alpha + beta):
                continue
            for atom in sp.family.atoms_below(sp.range_of(alpha + beta)):
                assert f_map(sp, alpha, beta, atom) == oracle_f(sp, alpha, beta, atom)


def test_f_map_composition(space):
    # f_{alpha[beta·gamma]} = f_{alpha[beta]} ∘ f_{alpha·beta[gamma]}
    for alpha, beta, gamma in product(space.labelled_paths(2), repeat=3):
        w = alpha + beta + gamma
        if not space.is_labelled_path(w) or len(w) > 4:
            continue
        for atom in space.family.atoms_below(space.range_of(w)):
            two_step = f_map(space, alpha, beta,
                             f_map(space, alpha + beta, gamma, atom))
            assert f_map(space, alpha, beta + gamma, atom) == two_step


def test_g_map_examples(space):
    one = space.mask("1")
    assert g_map(space, word("a"), word(""), one) == one
    assert g_map(space, word("a"), word("b"), one) == one
    with pytest.raises(DomainError):
        # r(ab) = {1} is not in the filter at atom {2}
        g_map(space, word("a"), word("b"), space.mask("2"))


def test_h_map_examples(space):
    one = space.mask("1")
    assert h_map(space, word("a"), word("b"), one) == one
    assert h_map(space, word(""), word("ab"), one) == one


def test_g_then_h_identity(space):
    for alpha in space.labelled_paths(2):
        for beta in space.labelled_paths(2):
            if not space.is_labelled_path(alpha + beta):
                continue
            r_ab = space.range_of(alpha + beta)
            for atom in space.family.atoms_below(space.range_of(beta)):
                if atom & ~r_ab:
                    continue
                assert h_map(space, alpha, beta, g_map(space, alpha, beta, atom)) == atom


def test_h_composition_law(space):
    # h_{[beta]gamma} ∘ h_{[alpha]beta·gamma} = h_{[alpha·beta]gamma}
    for alpha, beta, gamma in product(space.labelled_paths(1), repeat=3):
        w = alpha + beta + gamma
        if not space.is_labelled_path(w) or len(w) > 3:
            continue
        for atom in space.family.atoms_below(space.range_of(w)):
            assert (h_map(space, beta, gamma, h_map(space, alpha, beta + gamma, atom))
                    == h_map(space, alpha + beta, gamma, atom))


# ----------------------------------------------------------------- towers

def test_xi_a_inf_is_canonical_and_complete(space):
    xi = xi_a_inf(space)
    assert xi.word_prefix == ()
    assert xi.word_cycle == ("a",)
    assert xi.atoms == (space.mask("1"),)
    check_filter(space, xi)


def test_glue_examples(space):
    xi = xi_a_inf(space)
    assert glue(space, word("a"), xi) == xi
    assert glue(space, word("b"), xi) == xi_ba_inf(space)
    assert glue(space, word(""), xi) == xi
    check_filter(space, glue(space, word("b"), xi))


def test_glue_domain_error(space):
    xi = xi_ba_inf(space)  # level 0 atom is {2}
    assert xi.atoms[0] == space.mask("2")
    with pytest.raises(DomainError):
        glue(space, word("b"), xi)  # r(b) = {1} does not contain {2}


def test_cut_examples(space):
    assert cut(space, xi_ba_inf(space), word("b")) == xi_a_inf(space)
    assert shift(space, xi_a_inf(space), 1) == xi_a_inf(space)
    assert shift(space, xi_ba_inf(space), 3) == xi_a_inf(space)
    assert cut(space, xi_a_inf(space), word("")) == xi_a_inf(space)
    with pytest.raises(DomainError):
        cut(space, xi_a_inf(space), word("b"))


def test_glue_cut_inverse_on_enumeration(space):
    filters = enumerate_tight(space, 3, 3)
    assert filters
    for xi in filters:
        check_filter(space, xi)
        for alpha in space.labelled_paths(3):
            if not alpha:
                continue
            a0 = xi.atoms[0]
            if a0 is not None and a0 & ~space.range_of(alpha) == 0:
                glued = glue(space, alpha, xi)
                check_filter(space, glued)
                assert cut(space, glued, alpha) == xi
            if xi.begins_with(alpha):
                piece = cut(space, xi, alpha)
                check_filter(space, piece)
                assert glue(space, alpha, piece) == xi


def test_glue_composition_law():
    # G_{(alpha·beta)gamma} = G_{(alpha)beta·gamma} ∘ G_{(beta)gamma}
    rng = random.Random(37)
    spaces = [ls1()] + [random_space(rng, max_vertices=4, max_letters=3)
                        for _ in range(5)]
    for sp in spaces:
        filters = enumerate_tight(sp, 2, 2)
        for xi in filters:
            for alpha, beta in product(sp.labelled_paths(2), repeat=2):
                if not alpha or not beta:
                    continue
                a0 = xi.atoms[0]
                if a0 is None or a0 & ~sp.range_of(beta):
                    continue
                inner = glue(sp, beta, xi)
                b0 = inner.atoms[0]
                if b0 is None or b0 & ~sp.range_of(alpha + beta):
                    continue
                assert glue(sp, alpha, inner) == glue(sp, alpha + beta, xi)


# ---------------------------------------------------------------- classify

def test_classify_examples(space):
    fam = make_finite_filter(space, word("a"), space.mask("2")).atoms
    got = classify(space, word("a"), list(fam))
    assert got.kind == "NotTight"

    sk = sink_space()
    top = sk.mask("2")
    fin = make_finite_filter(sk, word("a"), top)
    got = classify(sk, word("a"), list(fin.atoms))
    assert got.kind == "TightFinite"

    got = classify(space, ((), ("a",)), ([space.mask("1")], [space.mask("1")]))
    assert got.kind == "TightInfinite"


def test_classify_rejects_incomplete_family(space):
    with pytest.raises(InputError):
        classify(space, word("a"), [space.mask("2"), space.mask("1")])


# ------------------------------------------------------------- enumeration

def oracle_enumerate_periodic(space, max_period, window=8):
    """Brute force: all periodic letter/atom assignments checked levelwise."""
    from oracles import words_up_to

    found = set()
    for v in words_up_to(space.graph.alphabet, max_period):
        if not v:
            continue
        q = len(v)
        atoms = space.family.all_atoms
        for assign in product(atoms, repeat=q):
            ok = True
            ranges = [space.full_mask]
            for n in range(1, window * q + 1):
                ranges.append(space.step(ranges[-1], v[(n - 1) % q]))
            for n in range(1, window * q):
                a_here = assign[(n - 1) % q]
                a_next = assign[n % q]
                if a_here & ~ranges[n] or a_next & ~ranges[n + 1]:
                    ok = False
                    break
                if space.down(ranges[n], v[n % q], a_next) != a_here:
                    ok = False
                    break
            if ok:
                tf = make_infinite_filter(space, (), v, [space.down(None, v[0], assign[0])],
                                          list(assign))
                found.add(tf)
    return found


def test_enumerate_tight_ls1(space):
    filters = enumerate_tight(space, 2, 2)
    names = {format_tight(space, tf) for tf in filters}
    assert "(a)^inf : [{1}] ([{1}])^inf" in names
    assert any(tf == xi_ba_inf(space) for tf in filters)
    two_cycles = {tf for tf in filters if not tf.is_finite and len(tf.word_cycle) == 2}
    assert {"".join(tf.word_cycle) for tf in two_cycles} == {"ab", "ba"}
    assert all(not tf.is_finite for tf in filters)  # no sinks in LS1


def test_enumerate_tight_matches_periodic_oracle():
    rng = random.Random(41)
    spaces = [ls1(), single_loop()] + [random_space(rng, max_vertices=4, max_letters=2)
                                       for _ in range(6)]
    for sp in spaces:
        enumerated = {tf for tf in enumerate_tight(sp, 0, 2) if not tf.is_finite}
        assert enumerated == oracle_enumerate_periodic(sp, 2)


def test_enumerate_tight_single_loop():
    sp = single_loop()
    filters = enumerate_tight(sp, 2, 2)
    assert len(filters) == 1
    (tf,) = filters
    assert not tf.is_finite and tf.word_cycle == ("a",)


def test_enumerate_tight_sink_only_space():
    sp = build_space(("v", "w"), [("v", "a", "w")])
    filters = enumerate_tight(sp, 1, 1)
    kinds = {(tf.is_finite, tf.word_prefix) for tf in filters}
    # only finite-type filters, at words e and a, with sink atoms
    assert kinds == {(True, ()), (True, ("a",))}
    for tf in filters:
        assert tf.atom_at(tf.prefix_len) & ~sp.sinks() == 0


def test_enumeration_counts_monotone(space):
    c22 = len(enumerate_tight(space, 2, 2))
    c33 = len(enumerate_tight(space, 3, 3))
    assert c22 <= c33


# ------------------------------------------------------------- membership

def test_contains_examples(space):
    xi = xi_a_inf(space)
    one, two = space.mask("1"), space.mask("2")
    assert contains(space, xi, Triple(word("a"), one, word("a")))
    assert not contains(space, xi, Triple(word("a"), two, word("a")))
    assert contains(space, xi, Triple(word(""), space.full_mask, word("")))
    assert contains(space, xi_ba_inf(space), Triple(word("b"), one, word("b")))


def test_in_basic_open(space):
    xi = xi_a_inf(space)
    one = space.mask("1")
    e = Triple(word(""), space.full_mask, word(""))
    smaller = Triple(word("a"), one, word("a"))
    assert in_basic_open(space, xi, e)
    assert not in_basic_open(space, xi, e, [smaller])


def test_every_filter_contains_top_idempotent(space):
    full = Triple(word(""), space.full_mask, word(""))
    for tf in enumerate_tight(space, 2, 2):
        if tf.atoms[0] is not None:
            assert contains(space, tf, full)


# --------------------------------------------------------------- notation

def test_notation_round_trip(space):
    for tf in enumerate_tight(space, 3, 3):
        text = format_tight(space, tf)
        assert parse_tight(space, text) == tf


def test_notation_round_trip_finite():
    sp = sink_space()
    for tf in enumerate_tight(sp, 2, 2):
        assert parse_tight(sp, format_tight(sp, tf)) == tf


def test_parse_rejects_garbage(space):
    with pytest.raises(InputError):
        parse_tight(space, "nonsense")
    with pytest.raises(InputError):
        parse_tight(space, "(a)^inf : [{1}]")
