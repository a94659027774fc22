"""The one product rule of the closed-form table that fails as written.

For a pure Lie monomial m and a generator x_t that is not below every index
of m, the written right-hand side of m * x_t never mentions t, so it has the
wrong degree.  Appending t to every tail gives the product computed by
normalization.
"""
from metabelian import mtp
from metabelian.terms import COM, Leaf, LinComb, Node, format_lincomb, format_term

m = mtp.MtpBasisMonomial(mtp.SHAPE_LIE, (3, 1), (2, 4))
t = 2
show = lambda lc: format_lincomb(lc, lambda k: format_term(mtp.to_term(k)))

entry = mtp.table_formula(m, t, COM)
print("monomial     ", format_term(mtp.to_term(m)), "times x%d" % t)
print("case         ", entry.case, "(trusted)" if entry.trusted else "(flagged)")
print("as written   ", show(LinComb(mtp.canonicalize(entry.forms))))
print("x_t restored ", show(LinComb(mtp.canonicalize(mtp.suspect_formula_with_generator(m, t)))))
print("normalized   ", show(mtp.normalize_monomials(Node(COM, mtp.to_term(m), Leaf(t)))))

rep = mtp.check_table(5, range(4, 6))
print(f"\nover x1..x5, degrees 4-5: {rep.checked} products, {len(rep.discrepancies)} discrepancies;")
print(f"flagged case occurs {rep.suspect_cases} times, written form wrong {rep.suspect_verbatim_mismatches} times,"
      f" restored form wrong {rep.suspect_repaired_mismatches} times")
