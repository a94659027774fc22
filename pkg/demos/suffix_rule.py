"""Where the last-suffix condition comes from, including repeated labels.

A suffix (white a, black b, white c, x_d) of a right comb stands for
a [b, c d].  The four-term reduced identity relates these suffixes on a
fixed label multiset.  Eliminating with a fixed column order picks out the
forbidden suffixes; on distinct labels these are exactly a > b > c.
"""
import itertools

from metabelian import fman

for values in [(1, 2, 3, 4), (1, 1, 2, 3), (1, 2, 2, 3), (1, 2, 3, 3), (1, 1, 2, 2)]:
    pivots = sorted(fman.suffix_rewrites(values))
    print(values, "forbidden:", ", ".join("".join(map(str, s)) for s in pivots))

agree = all(
    set(fman.suffix_rewrites(v)) == {s for s in
        {(a, b) + tuple(sorted((c, d))) for a, b, c, d in itertools.permutations(v)}
        if fman.suffix_forbidden(*s)}
    for v in itertools.combinations_with_replacement(range(1, 5), 4)
)
print("closed-form rule agrees with elimination on every multiset over 1..4:", agree)
