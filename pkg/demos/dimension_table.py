"""Dimensions of the multilinear components, by enumeration and by the rank oracle.

    python3 demos/dimension_table.py [max_arity]
"""
import sys
import time

from metabelian import fman, mtp, oracle

top = int(sys.argv[1]) if len(sys.argv) > 1 else 5

print(f"{'n':>2} {'MTP basis':>10} {'MTP oracle':>11} {'MFM basis':>10} {'MFM oracle':>11} {'sec':>6}")
for n in range(1, top + 1):
    t0 = time.perf_counter()
    a = len(mtp.enumerate_mtp_basis(n, n, multilinear=True))
    b = oracle.dimension("MTP", n, huge=n > 5)
    c = fman.count_fman_basis(n)
    d = oracle.dimension("MFM", n, huge=n > 5)
    print(f"{n:>2} {a:>10} {b:>11} {c:>10} {d:>11} {time.perf_counter() - t0:>6.1f}")

# the F-manifold side continues without the oracle
print("MFM n = 7 by enumeration:", fman.count_fman_basis(7))
