import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from metabelian.linalg import Echelon, TrackedEchelon, first_dependence, rank, to_matrix_market
from metabelian.oracle import SparseRowMatrix, rank_and_dim

vectors = st.dictionaries(st.integers(0, 7), st.fractions(-5, 5, max_denominator=4).filter(bool), max_size=5)


def test_small_rank_dim_examples():
    assert rank_and_dim(SparseRowMatrix(5)) == (0, 5)
    eye = SparseRowMatrix(3, [{0: Fraction(1)}, {1: Fraction(1)}, {2: Fraction(1)}])
    assert rank_and_dim(eye) == (3, 0)


def test_normal_form_kills_rows():
    ech = Echelon()
    rows = [{0: Fraction(1), 2: Fraction(-1)}, {1: Fraction(2), 2: Fraction(4)}]
    for r in rows:
        ech.add(r)
    ech.finalize()
    for r in rows:
        assert ech.normal_form(r) == {}
    assert ech.normal_form({0: Fraction(1)}) == {2: Fraction(1)}


@given(st.lists(vectors, max_size=8), st.randoms(use_true_random=False))
def test_rank_invariant_under_shuffling(rows, rnd):
    shuffled = list(rows)
    rnd.shuffle(shuffled)
    assert rank(rows) == rank(shuffled)


@given(st.lists(vectors, max_size=8))
def test_rank_matches_dense_elimination(rows):
    # the rank of the rows equals the number of pivots of a dense elimination
    cols = 8
    mat = [[Fraction(r.get(c, 0)) for c in range(cols)] for r in rows]
    piv = 0
    for c in range(cols):
        p = next((i for i in range(piv, len(mat)) if mat[i][c]), None)
        if p is None:
            continue
        mat[piv], mat[p] = mat[p], mat[piv]
        for i in range(len(mat)):
            if i != piv and mat[i][c]:
                f = mat[i][c] / mat[piv][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[piv])]
        piv += 1
    assert rank(rows) == piv


@settings(max_examples=50)
@given(st.lists(vectors, min_size=1, max_size=8))
def test_dependence_is_genuine(rows):
    dep = first_dependence(rows)
    if dep is None:
        assert rank(rows) == len(rows)
        return
    total = {}
    for i, c in dep.items():
        for k, a in rows[i].items():
            total[k] = total.get(k, 0) + c * a
    assert all(v == 0 for v in total.values())
    assert any(dep.values())


def test_coordinates_round_trip():
    rng = random.Random(3)
    te = TrackedEchelon()
    basis = [{0: Fraction(1), 3: Fraction(2)}, {1: Fraction(1)}, {2: Fraction(1, 2), 3: Fraction(1)}]
    for i, b in enumerate(basis):
        assert te.add(i, b) is None
    coeffs = {i: Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for i in range(3)}
    v = {}
    for i, c in coeffs.items():
        for k, a in basis[i].items():
            v[k] = v.get(k, 0) + c * a
    v = {k: a for k, a in v.items() if a}
    got = te.coordinates(v)
    assert {i: c for i, c in got.items() if c} == {i: c for i, c in coeffs.items() if c}
    assert te.coordinates({4: Fraction(1)}) is None


def test_matrix_market_header():
    text = to_matrix_market([{0: Fraction(1, 2)}, {2: Fraction(-3)}], 3)
    lines = text.splitlines()
    assert lines[0].startswith("%%MatrixMarket")
    assert lines[1] == "2 3 2"
    assert lines[2:] == ["1 1 1/2", "2 3 -3"]
