import itertools

import pytest
from hypothesis import given, settings

from conftest import terms
from metabelian import fman, oracle, reference
from metabelian import identities as ids
from metabelian.fman import BLACK as B
from metabelian.fman import WHITE as W
from metabelian.fman import FmanSequence
from metabelian.identities import multilinear_monomials
from metabelian.linalg import rank
from metabelian.terms import LinComb, format_term, parse_lincomb, parse_term


def S(cols, labs):
    return FmanSequence(cols, labs)


# --- encoding -------------------------------------------------------------


@pytest.mark.parametrize("seq,text", [
    (S((B, W), (1, 2, 3)), "(lie x1 (com x2 x3))"),
    (S((), (5,)), "x5"),
    (S((W, B), (2, 1, 3)), "(com x2 (lie x1 x3))"),
])
def test_seq_to_term(seq, text):
    assert format_term(fman.seq_to_term(seq)) == text
    assert fman.term_to_seq(parse_term(text)) == seq


def test_sequence_validation():
    with pytest.raises(ValueError):
        FmanSequence((B,), (1,))
    with pytest.raises(ValueError):
        fman.term_to_seq(parse_term("(lie (lie x1 x2) x3)"))


def test_sequence_text():
    assert str(S((B, W), (1, 2, 3))) == "(•1, ∘2, x3)"
    assert S((B, W), (1, 2, 3)).vertices == ((B, 1), (W, 2))


# --- conditions -----------------------------------------------------------


def test_adjacent_whites_rejected():
    assert fman.check_conditions(S((W, W, B), (1, 2, 3, 4))).failed() == ["c1"]


def test_long_black_run_passes():
    assert fman.check_conditions(S((B, B, B), (3, 2, 1, 4))).ok


def test_suffix_condition_example():
    r = fman.check_conditions(S((W, B, W), (3, 2, 4, 1)))
    assert not r.c7


def test_suffix_condition_alone():
    r = fman.check_conditions(S((W, B, W), (3, 2, 1, 4)))
    assert r.up_to_six and not r.c7
    assert fman.is_basis(S((W, B, W), (2, 3, 1, 4)))


def test_white_black_white_interior_needs_descent():
    # second white is not last: first white label must exceed the black one
    assert not fman.check_conditions(S((W, B, W, B), (1, 2, 3, 4, 5))).c6
    assert fman.check_conditions(S((W, B, W, B), (2, 1, 3, 4, 5))).c6


def test_suffix_rule_matches_local_elimination():
    for values in itertools.combinations_with_replacement(range(1, 5), 4):
        pivots = set(fman.suffix_rewrites(values))
        suffixes = {(a, b) + tuple(sorted((c, d))) for a, b, c, d in itertools.permutations(values)}
        forbidden = {s for s in suffixes if fman.suffix_forbidden(*s)}
        assert pivots == forbidden, values


def test_suffix_rule_on_distinct_labels():
    for a, b, c, d in itertools.permutations(range(1, 5)):
        if c <= d:
            assert fman.suffix_forbidden(a, b, c, d) == (a > b > c)


# --- enumeration ----------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 7))
def test_dimension_table(n):
    assert len(fman.enumerate_fman_basis(n)) == reference.FMAN_DIMS[n]


def test_degree_seven_count():
    assert fman.count_fman_basis(7) == 10870


def test_enumeration_order():
    basis = fman.enumerate_fman_basis(4)
    assert basis == sorted(basis)
    assert all(fman.is_basis(s) for s in basis)


def test_threads_do_not_change_output():
    assert fman.enumerate_fman_basis(5, threads=1) == fman.enumerate_fman_basis(5, threads=3)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_census(n):
    rows = fman.per_tree_census(n)
    assert tuple(r.count for r in rows) == reference.CENSUS[n]
    reductions = {"".join("b" if c == B else "w" for c in r.colours): r.reduced for r in rows if r.reduced}
    assert reductions == reference.CENSUS_REDUCTIONS[n]
    assert sum(r.count - r.reduced for r in rows) == reference.FMAN_DIMS[n]


def test_census_glyphs():
    assert fman.per_tree_census(4)[5].glyphs == "(∘,•,∘)"
    with pytest.raises(ValueError):
        fman.per_tree_census(3)


@pytest.mark.parametrize("md", [{1: 2}, {1: 1, 2: 1}, {1: 3}, {1: 2, 2: 1}, {1: 1, 2: 1, 3: 1}, {1: 4},
                                {1: 1, 2: 3}, {1: 2, 2: 2}, {1: 1, 2: 1, 3: 2}, {1: 5}, {1: 1, 2: 4},
                                {1: 2, 2: 3}, {1: 1, 2: 1, 3: 3}, {1: 1, 2: 2, 3: 2}])
def test_graded_count_matches_oracle(md):
    assert len(fman.basis_on_multidegree(md)) == oracle.graded_dimension("MFM", md)


@pytest.mark.parametrize("md", [{1: 2, 2: 2}, {1: 1, 2: 1, 3: 2}, {1: 2, 2: 3}])
def test_graded_basis_is_independent(md):
    q = oracle.operadic("MFM")
    vecs = [q.coordinates(fman.seq_to_term(s))[1] for s in fman.basis_on_multidegree(md)]
    assert rank(vecs) == len(vecs)


# --- normalization --------------------------------------------------------


def test_product_of_four_vanishes():
    assert fman.normalize_fman(parse_term("(com (com x1 x2) (com x3 x4))")) == LinComb()


def test_reduced_identity_vanishes():
    rel = parse_lincomb(
        "1*(com (lie (com x1 x2) x3) x4) + 1*(com (lie (com x1 x2) x4) x3)"
        " + 1*(com x1 (lie x2 (com x3 x4))) + 1*(com x2 (lie x1 (com x3 x4)))"
    )
    assert fman.normalize_fman(rel) == LinComb()


@pytest.mark.parametrize("n", [2, 3, 4])
def test_normalize_matches_oracle_projection(n):
    basis = [fman.seq_to_term(s) for s in fman.enumerate_fman_basis(n)]
    cert = oracle.canonical_projection("MFM", n, basis)
    assert isinstance(cert, oracle.CertifiedBasis)
    for t in multilinear_monomials(tuple(range(1, n + 1))):
        assert fman.normalize_fman(t) == cert.project(t), format_term(t)


def test_normalize_matches_oracle_projection_sample_five():
    import random

    basis = [fman.seq_to_term(s) for s in fman.enumerate_fman_basis(5)]
    cert = oracle.canonical_projection("MFM", 5, basis)
    monos = multilinear_monomials(tuple(range(1, 6)))
    for t in random.Random(11).sample(monos, 300):
        assert fman.normalize_fman(t) == cert.project(t), format_term(t)


@settings(max_examples=60, deadline=None)
@given(terms(6, 4))
def test_normalize_idempotent(t):
    once = fman.normalize_fman(t)
    assert fman.normalize_fman(once) == once


@settings(max_examples=40, deadline=None)
@given(terms(2, 4), terms(2, 4), terms(2, 4), terms(1, 4), terms(1, 4))
def test_identities_annihilated(a, b, c, d, e):
    pool = {"a": a, "b": b, "c": c, "d": d, "e": e}
    for ident in ids.preset_identities("MFM"):
        sigma = {p: pool["abcde"[-p - 1]] for p in ident.placeholders}
        assert fman.normalize_fman(ids.substitute(ident, sigma)) == LinComb(), ident.name


@settings(max_examples=40, deadline=None)
@given(terms(5, 4))
def test_normalize_is_sound(t):
    assert oracle.in_relation_span("MFM", LinComb.single(t) - fman.normalize_fman(t))


def test_normal_forms_are_basis_sequences():
    out = fman.normalize_sequences(parse_term("(com x3 (lie (com x2 x1) x2))"))
    assert out and all(fman.is_basis(s) for s in out)
