"""Left-normed words in the free metabelian Lie algebra.

A word ``(w1, w2, ..., wk)`` stands for ``[[...[w1, w2], ...], wk]``.  In the
metabelian setting the entries from the third on commute, and Jacobi moves
the smallest letter into second place, so the canonical words are

* ``(a, b)`` with ``a < b``;
* ``(i1, i2, i3, ...)`` with ``i1 > i2 <= i3 <= ...`` for ``k >= 3``.

With ``ascending3`` set, degree-3 words are written instead as
``(j1, j2, j3)`` with ``j1 < j2`` and ``j1 <= j3`` (same span, first pair
flipped).
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Tuple

Word = Tuple[int, ...]


def _left_min_form(w: Word) -> Dict[Word, int]:
    a, b = w[0], w[1]
    rest = sorted(w[2:])
    if a == b:
        return {}
    m = min(w)
    if b == m and a > m:
        return {(a, b) + tuple(rest): 1}
    if a == m:
        return {(b, a) + tuple(rest): -1}
    # m sits in the tail and is strictly below a and b:
    # [[a,b],m] = [[a,m],b] - [[b,m],a]
    rest.remove(m)
    out: Dict[Word, int] = {}
    for word, c in (((a, m) + tuple(sorted(rest + [b])), 1), ((b, m) + tuple(sorted(rest + [a])), -1)):
        out[word] = out.get(word, 0) + c
    return {k: v for k, v in out.items() if v}


def reduce_word(word, ascending3: bool = False) -> Dict[Word, Fraction]:
    """Canonical expansion of a left-normed word (coefficients are integers)."""
    w = tuple(word)
    k = len(w)
    if k == 0:
        raise ValueError("empty word")
    if k == 1:
        return {w: Fraction(1)}
    if k == 2:
        a, b = w
        if a == b:
            return {}
        return {w: Fraction(1)} if a < b else {(b, a): Fraction(-1)}
    out = {}
    for u, c in _left_min_form(w).items():
        if ascending3 and k == 3:
            u, c = (u[1], u[0], u[2]), -c
        out[u] = out.get(u, 0) + Fraction(c)
    return {u: c for u, c in out.items() if c}


def is_canonical(word, ascending3: bool = False) -> bool:
    w = tuple(word)
    k = len(w)
    if k == 1:
        return True
    if k == 2:
        return w[0] < w[1]
    if ascending3 and k == 3:
        return w[0] < w[1] and w[0] <= w[2]
    return w[0] > w[1] and all(w[1] <= x for x in w[2:]) and list(w[2:]) == sorted(w[2:])
