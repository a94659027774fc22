import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metabelian import fman, mtp, oracle
from metabelian import identities as ids
from metabelian.identities import multilinear_monomials
from metabelian.terms import LinComb, format_term, parse_lincomb, parse_term


def fman_basis(n):
    return [fman.seq_to_term(s) for s in fman.enumerate_fman_basis(n)]


def mtp_basis(n):
    return [mtp.to_term(m) for m in mtp.enumerate_mtp_basis(n, n, multilinear=True)]


BASES = {"MFM": fman_basis, "MTP": mtp_basis}


# --- monomial indexing ----------------------------------------------------


@pytest.mark.parametrize("n", range(1, 6))
def test_column_count(n):
    assert len(oracle.MonomialIndex(n)) == oracle.catalan(n - 1) * 2 ** (n - 1) * math.factorial(n)


def test_arity_six_column_count():
    assert len(oracle.MonomialIndex(6)) == 967_680


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_index_round_trip(n):
    idx = oracle.MonomialIndex(n)
    seen = set()
    for i, t in enumerate(idx):
        assert idx.id(t) == i
        seen.add(t)
    assert seen == set(multilinear_monomials(tuple(range(1, n + 1))))


def test_index_rejects_non_multilinear():
    with pytest.raises(ValueError):
        oracle.MonomialIndex(2).id(parse_term("(com x1 x1)"))


def test_first_ids():
    idx = oracle.MonomialIndex(2)
    assert [format_term(idx.term(i)) for i in range(4)] == [
        "(com x1 x2)", "(com x2 x1)", "(lie x1 x2)", "(lie x2 x1)",
    ]


# --- dimensions -----------------------------------------------------------


def test_small_dimensions():
    assert oracle.dimension("MTP", 2) == 2
    assert oracle.dimension("MFM", 3) == 9
    assert oracle.dimension("MFM", 4) == 42


@pytest.mark.parametrize("variety", ["MTP", "MFM"])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_flat_and_layered_routes_agree(variety, n):
    assert oracle.dimension(variety, n, method="flat") == oracle.dimension(variety, n)


@pytest.mark.parametrize("variety,dims", [("MTP", [1, 2, 6, 8, 10]), ("MFM", [1, 2, 9, 42, 224])])
def test_dimension_sequence(variety, dims):
    assert [oracle.dimension(variety, n) for n in range(1, 6)] == dims


def test_flat_matrix_rank():
    m = oracle.build_relation_matrix("MTP", 4)
    r, d = oracle.rank_and_dim(m)
    assert d == len(mtp.enumerate_mtp_basis(4, 4, multilinear=True))
    assert r + d == m.ncols == len(oracle.MonomialIndex(4))
    assert len(m.rows) == len(m.dedupe().rows)


@settings(max_examples=15, deadline=None)
@given(st.randoms(use_true_random=False))
def test_rank_invariant_under_row_shuffle(rnd):
    m = oracle.build_relation_matrix("MFM", 3)
    rows = list(m.rows)
    rnd.shuffle(rows)
    assert oracle.rank_and_dim(oracle.SparseRowMatrix(m.ncols, rows)) == oracle.rank_and_dim(m)


def test_size_caps():
    with pytest.raises(oracle.OracleSizeError):
        oracle.dimension("MFM", 6)
    with pytest.raises(oracle.OracleSizeError):
        oracle.build_relation_matrix("MFM", 6)
    with pytest.raises(oracle.OracleSizeError):
        oracle.graded_dimension("MTP", {1: 6})
    with pytest.raises(oracle.OracleSizeError):
        oracle.graded_dimension("MTP", {1: 1, 2: 1, 3: 1, 4: 1})
    with pytest.raises(ValueError):
        oracle.dimension("MTP", 3, method="dense")


def test_graded_examples():
    assert oracle.graded_dimension("MTP", {1: 2}) == 1
    assert oracle.graded_dimension("MTP", {1: 1, 2: 1}) == 2
    assert oracle.graded_dimension("MTP", {1: 2, 2: 1}) == len(mtp.basis_on_multidegree({1: 2, 2: 1})) == 4


def test_graded_dimension_depends_only_on_multiplicities():
    assert oracle.graded_dimension("MFM", {1: 2, 3: 1}) == oracle.graded_dimension("MFM", {1: 1, 2: 2})


def test_checkpoints_restore(tmp_path):
    d = oracle.dimension("MFM", 4, checkpoint_dir=str(tmp_path))
    files = sorted(p.name for p in tmp_path.iterdir())
    assert d == 42 and "MFM-1-1-1-1.pickle" in files
    again = oracle.OperadicQuotient("MFM", checkpoint_dir=str(tmp_path))
    assert again.dim((1, 1, 1, 1)) == 42
    assert again.is_zero(parse_lincomb("1*(com (com x1 x2) (com x3 x4))"))


# --- span membership ------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 4])
def test_mfm_relations_hold_in_mtp(n):
    for rel in ids.multilinear_consequences("MFM", n):
        assert oracle.in_relation_span("MTP", rel)


def test_mtp_is_strictly_smaller():
    # the transposed Poisson rule itself is not an F-manifold consequence
    tp = ids.canonical_instance(ids.get_identity("TP"))
    assert oracle.in_relation_span("MTP", tp)
    assert not oracle.in_relation_span("MFM", tp)


@pytest.mark.parametrize("variety", ["MTP", "MFM"])
def test_each_identity_in_span(variety):
    for ident in ids.preset_identities(variety):
        assert oracle.in_relation_span(variety, ids.canonical_instance(ident))


def test_flat_membership():
    assert oracle.in_relation_span("MTP", parse_lincomb("1*(lie x1 x2) + 1*(lie x2 x1)"), method="flat")
    assert not oracle.in_relation_span("MTP", parse_lincomb("1*(lie x1 x2)"), method="flat")


# --- certification --------------------------------------------------------


@pytest.mark.parametrize("variety", ["MTP", "MFM"])
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_enumerated_bases_certify(variety, n):
    assert isinstance(oracle.canonical_projection(variety, n, BASES[variety](n)), oracle.CertifiedBasis)


def test_certify_accepts_ids():
    idx = oracle.MonomialIndex(3)
    res = oracle.canonical_projection("MFM", 3, [idx.id(t) for t in fman_basis(3)])
    assert isinstance(res, oracle.CertifiedBasis)


def test_flat_certification():
    assert isinstance(oracle.canonical_projection("MFM", 4, fman_basis(4), method="flat"), oracle.CertifiedBasis)


def test_missing_element_is_deficient():
    res = oracle.canonical_projection("MFM", 4, fman_basis(4)[:-1])
    assert isinstance(res, oracle.Deficient)
    assert (res.found, res.dim) == (41, 42)


def test_suffix_violating_replacement():
    basis = fman_basis(4)
    bad = fman.seq_to_term(fman.FmanSequence((fman.WHITE, fman.BLACK, fman.WHITE), (3, 2, 1, 4)))
    assert bad not in basis
    # replace an element outside the support of the bad sequence's normal form
    support = set(fman.normalize_fman(bad))
    i = next(k for k, t in enumerate(basis) if t not in support)
    tampered = basis[:i] + [bad] + basis[i + 1 :]
    res = oracle.canonical_projection("MFM", 4, tampered)
    assert isinstance(res, oracle.Dependence)
    assert res.verify("MFM")
    assert res.verify("MFM", method="flat")


@pytest.mark.parametrize("variety,n", [("MFM", 4), ("MFM", 5), ("MTP", 4), ("MTP", 5)])
def test_single_monomial_tampering(variety, n):
    basis = BASES[variety](n)
    monos = multilinear_monomials(tuple(range(1, n + 1)))
    rng = random.Random(n)
    cert = oracle.canonical_projection(variety, n, basis)
    for _ in range(25):
        i = rng.randrange(len(basis))
        t = rng.choice(monos)
        tampered = basis[:i] + [t] + basis[i + 1 :]
        res = oracle.canonical_projection(variety, n, tampered)
        if basis[i] in cert.project(t):
            assert isinstance(res, oracle.CertifiedBasis)
        else:
            assert isinstance(res, oracle.Dependence)
            assert res.verify(variety)


@pytest.mark.parametrize("variety", ["MTP", "MFM"])
def test_duplicate_always_dependent(variety):
    basis = BASES[variety](4)
    for i in range(0, len(basis), 5):
        tampered = list(basis)
        tampered[i] = basis[(i + 1) % len(basis)]
        res = oracle.canonical_projection(variety, 4, tampered)
        assert isinstance(res, oracle.Dependence) and res.verify(variety)
        assert len(res.coefficients) == 2


def test_projection_map():
    cert = oracle.canonical_projection("MTP", 3, mtp_basis(3))
    pm = cert.projection_map([parse_term("(com x1 (lie x2 x3))")])
    assert pm[parse_term("(com x1 (lie x2 x3))")] == mtp.normalize_mtp(parse_term("(com x1 (lie x2 x3))"))


def test_representatives_span():
    q = oracle.operadic("MFM")
    reps = [q.representative((1, 1, 1), i) for i in range(q.dim((1, 1, 1)))]
    res = oracle.canonical_projection("MFM", 3, reps)
    assert isinstance(res, oracle.CertifiedBasis)


def test_matrix_market_export():
    text = oracle.relation_matrix_market("MTP", 2)
    lines = text.splitlines()
    assert lines[0].startswith("%%MatrixMarket")
    rows, cols, nnz = map(int, lines[1].split())
    assert cols == 4 and nnz == len(lines) - 2


@pytest.mark.slow
@pytest.mark.parametrize("variety,expected", [("MFM", 1444), ("MTP", 12)])
def test_arity_six_huge(variety, expected):
    assert oracle.dimension(variety, 6, huge=True) == expected
