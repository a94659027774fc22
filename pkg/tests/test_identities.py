import pytest
from hypothesis import given, settings

from conftest import terms
from metabelian import identities as ids
from metabelian import oracle
from metabelian.terms import LinComb, format_lincomb, multidegree, parse_lincomb, parse_term


def lc(text):
    return parse_lincomb(text)


def test_tp_substitution():
    got = ids.substitute(ids.get_identity("TP"), {"a": parse_term("x3"), "b": parse_term("x1"), "c": parse_term("x2")})
    assert got == lc("1*(com x3 (lie x1 x2)) + -1/2*(lie (com x3 x1) x2) + -1/2*(lie x1 (com x3 x2))")


def test_antisymmetry_diagonal():
    x1 = parse_term("x1")
    assert ids.substitute(ids.get_identity("lie-antisym"), {"a": x1, "b": x1}) == lc("2*(lie x1 x1)")


def test_product_of_four_parenthesization():
    got = ids.canonical_instance(ids.get_identity("MET-4"))
    assert got == lc("1*(com (com x1 x2) (com x3 x4))")


def test_substitute_accepts_leaves_and_indices():
    ident = ids.get_identity("com-comm")
    x1, x2 = parse_term("x1"), parse_term("x2")
    a = ids.substitute(ident, {"a": x1, "b": x2})
    assert ids.substitute(ident, {-1: x1, -2: x2}) == a
    assert ids.substitute(ident, {parse_term("a"): x1, parse_term("b"): x2}) == a


def test_missing_placeholder():
    with pytest.raises(KeyError):
        ids.substitute(ids.get_identity("TP"), {"a": parse_term("x1")})


def test_unknown_names():
    with pytest.raises(KeyError):
        ids.get_identity("nope")
    with pytest.raises(KeyError):
        ids.preset_identities("lie")


@pytest.mark.parametrize("ident", list(ids.CATALOG.values()) + list(ids.DERIVED.values()), ids=lambda i: i.name)
def test_catalog_entries_are_multilinear(ident):
    assert ident.is_multilinear
    assert ident.relation
    assert ident.name in str(ident)


def test_derived_identities_not_in_presets():
    for names in ids.PRESETS.values():
        assert not set(names) & set(ids.DERIVED)


@settings(max_examples=30, deadline=None)
@given(terms(3, 4), terms(3, 4), terms(3, 4))
def test_substitution_is_linear_in_the_identity(p, q, r):
    # a formal sum of two identities substitutes to the sum of the substitutions
    tp, jac = ids.get_identity("TP"), ids.get_identity("lie-jacobi")
    both = ids.Identity("sum", tp.relation + jac.relation)
    sigma = {"a": p, "b": q, "c": r}
    assert ids.substitute(both, sigma) == ids.substitute(tp, sigma) + ids.substitute(jac, sigma)


def test_arity_two_consequences_are_commutativity_and_antisymmetry():
    cons = ids.multilinear_consequences("MTP", 2)
    expected = {
        lc("1*(com x1 x2) + -1*(com x2 x1)"),
        lc("1*(com x2 x1) + -1*(com x1 x2)"),
        lc("1*(lie x1 x2) + 1*(lie x2 x1)"),
    }
    assert set(cons) == expected
    assert oracle.dimension("MTP", 2) == 2


def test_consequences_are_multilinear():
    for rel in ids.multilinear_consequences("MTP", 4):
        for t in rel:
            assert multidegree(t) == {1: 1, 2: 1, 3: 1, 4: 1}


def test_consequences_are_deterministic():
    assert ids.multilinear_consequences("MFM", 3) == ids.multilinear_consequences("MFM", 3)


def test_consequence_arity_bounds():
    with pytest.raises(ValueError):
        ids.multilinear_consequences("MTP", 1)
    with pytest.raises(ValueError):
        ids.multilinear_consequences("MTP", 8)


def test_mfm_arity_three():
    assert oracle.dimension("MFM", 3) == 9


@pytest.mark.parametrize("variety,name", [
    ("MTP", "lie-tail-commute"),
    ("MTP", "com-tail-commute"),
    ("MTP", "head-tail-cycle"),
    ("MTP", "com3-exchange"),
    ("MTP", "lie-antisym"),
    ("MFM", "FMAN-MET"),
    ("MFM", "lie-com-exchange"),
    ("MFM", "com3-com-exchange"),
])
def test_derived_identities_hold(variety, name):
    assert ids.verify_derived_identity(variety, name)


def test_verification_can_fail():
    # the cyclic identity is special to the transposed Poisson case
    assert not ids.verify_derived_identity("MFM", "head-tail-cycle")
    bogus = ids.Identity("bogus", lc("1*(lie (com a b) c)"))
    assert not ids.verify_derived_identity("MTP", bogus)


@pytest.mark.parametrize("name", ["com-tail-commute", "head-tail-cycle"])
def test_flat_and_operadic_routes_agree(name):
    assert ids.verify_derived_identity("MTP", name, method="flat")
    assert ids.verify_derived_identity("MTP", name, method="operadic")


def test_text_form_mentions_relation():
    assert format_lincomb(ids.get_identity("MET-1").relation) in str(ids.get_identity("MET-1"))
