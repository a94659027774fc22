from fractions import Fraction

from hypothesis import strategies as st

from metabelian.terms import COM, LIE, Leaf, LinComb, Node


def terms(max_degree=6, gens=6):
    """Random binary trees with at most ``max_degree`` leaves."""

    @st.composite
    def build(draw, deg=None):
        if deg is None:
            deg = draw(st.integers(1, max_degree))
        if deg == 1:
            return Leaf(draw(st.integers(1, gens)))
        k = draw(st.integers(1, deg - 1))
        op = draw(st.sampled_from((COM, LIE)))
        return Node(op, draw(build(k)), draw(build(deg - k)))

    return build()


def terms_of_degree(deg, gens=6):
    @st.composite
    def build(draw, d=deg):
        if d == 1:
            return Leaf(draw(st.integers(1, gens)))
        k = draw(st.integers(1, d - 1))
        op = draw(st.sampled_from((COM, LIE)))
        return Node(op, draw(build(k)), draw(build(d - k)))

    return build()


fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def lincombs(max_degree=4, gens=3, max_size=5):
    return st.lists(st.tuples(terms(max_degree, gens), fractions), max_size=max_size).map(LinComb)



ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
