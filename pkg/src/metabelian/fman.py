"""The metabelian F-manifold operad via coloured right-comb sequences.

A sequence ``(*_{i1}, *_{i2}, ..., *_{i_{n-1}}, i_n)`` encodes the
right-normed monomial ``x_i1 * (x_i2 * ( ... (x_i_{n-1} * x_in)))`` where a
black vertex is the bracket and a white vertex the commutative product.
Basis sequences are those passing seven conditions (see
:func:`check_conditions`).  Positions below are 0-based: vertices
``0 .. m-1`` and the final leaf at ``labels[m]`` with ``m = n - 1``.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from . import mlie
from .linalg import Echelon
from .terms import COM, LIE, Leaf, LinComb, Node, Term, as_lincomb

BLACK, WHITE = "black", "white"
_OP = {BLACK: LIE, WHITE: COM}
_COLOUR = {LIE: BLACK, COM: WHITE}
_GLYPH = {BLACK: "•", WHITE: "∘"}


class RewriteCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class FmanSequence:
    colours: Tuple[str, ...]
    labels: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "colours", tuple(self.colours))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != len(self.colours) + 1:
            raise ValueError("need exactly one more label than vertices")
        if any(c not in _OP for c in self.colours):
            raise ValueError("vertex colours are 'black' or 'white'")

    @classmethod
    def of(cls, vertices: Sequence[Tuple[str, int]], last: int) -> "FmanSequence":
        return cls(tuple(c for c, _ in vertices), tuple(i for _, i in vertices) + (last,))

    @property
    def degree(self) -> int:
        return len(self.labels)

    @property
    def vertices(self) -> Tuple[Tuple[str, int], ...]:
        return tuple(zip(self.colours, self.labels))

    @property
    def last(self) -> int:
        return self.labels[-1]

    def sort_key(self):
        return (self.degree, pattern_rank(self.colours), self.labels)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        inner = [f"{_GLYPH[c]}{i}" for c, i in self.vertices] + [f"x{self.last}"]
        return "(" + ", ".join(inner) + ")"


def pattern_rank(colours: Sequence[str]) -> int:
    """Position of a colouring in census order: binary with the first vertex lowest, black = 0."""
    return sum(1 << k for k, c in enumerate(colours) if c == WHITE)


def patterns(m: int) -> List[Tuple[str, ...]]:
    return [tuple(WHITE if (r >> k) & 1 else BLACK for k in range(m)) for r in range(1 << m)]


def seq_to_term(s: FmanSequence) -> Term:
    t: Term = Leaf(s.labels[-1])
    for c, i in reversed(s.vertices):
        t = Node(_OP[c], Leaf(i), t)
    return t


def term_to_seq(t: Term) -> FmanSequence:
    cols, labs = [], []
    while isinstance(t, Node):
        if not isinstance(t.left, Leaf):
            raise ValueError("term is not a right comb")
        cols.append(_COLOUR[t.op])
        labs.append(t.left.index)
        t = t.right
    labs.append(t.index)
    return FmanSequence(tuple(cols), tuple(labs))


# --------------------------------------------------------------------------
# conditions


@dataclass(frozen=True)
class ConditionReport:
    c1: bool
    c2: bool
    c3: bool
    c4: bool
    c5: bool
    c6: bool
    c7: bool

    @property
    def flags(self) -> Tuple[bool, ...]:
        return (self.c1, self.c2, self.c3, self.c4, self.c5, self.c6, self.c7)

    @property
    def up_to_six(self) -> bool:
        return all(self.flags[:6])

    @property
    def ok(self) -> bool:
        return all(self.flags)

    def failed(self) -> List[str]:
        return [f"c{k}" for k, f in enumerate(self.flags, 1) if not f]


def _runs(cols) -> List[Tuple[int, int]]:
    """Maximal black runs as half-open position ranges."""
    out = []
    k, m = 0, len(cols)
    while k < m:
        if cols[k] == BLACK:
            l = k
            while l < m and cols[l] == BLACK:
                l += 1
            out.append((k, l))
            k = l
        else:
            k += 1
    return out


def _nonincreasing(xs) -> bool:
    return all(a >= b for a, b in zip(xs, xs[1:]))


def check_conditions(s: FmanSequence) -> ConditionReport:
    """Evaluate each condition on its own.

    c1  no two adjacent white vertices unless they are the last two;
    c2  a black run followed by a white vertex has non-increasing labels;
    c3  a white last vertex has label <= the leaf (two white last vertices:
        all three labels sorted);
    c4  a trailing black run of length >= 3 is non-increasing and ends
        below the leaf;
    c5  a trailing black run of length 1 or 2 is a canonical free-Lie word
        (``[a, x]`` with ``a < x``; ``[a, [b, x]]`` with ``a >= b < x``);
    c6  in ``(white, black, white)`` where the second white is not the last
        vertex, the first white label is strictly above the black label
        (ties vanish by antisymmetry);
    c7  the suffix ``(white a, black b, white c, x_d)`` avoids ``a > b > min(c, d)``
        (see :func:`suffix_forbidden` for repeated labels).

    Degrees 1 to 3 are covered by the same rules (they produce the obvious
    small bases).
    """
    cols, labs = s.colours, s.labels
    m = len(cols)
    c1 = not any(cols[k] == WHITE and cols[k + 1] == WHITE and k + 2 <= m - 1 for k in range(m - 1))
    c3 = True
    if m and cols[m - 1] == WHITE:
        if m >= 2 and cols[m - 2] == WHITE:
            c3 = labs[m - 2] <= labs[m - 1] <= labs[m]
        else:
            c3 = labs[m - 1] <= labs[m]
    c2 = c4 = c5 = True
    for k, l in _runs(cols):
        run = labs[k:l]
        if l < m:
            c2 = c2 and _nonincreasing(run)
        else:
            good = _nonincreasing(run) and run[-1] < labs[m]
            if l - k >= 3:
                c4 = good
            else:
                c5 = good
    c6 = True
    for k in range(1, m - 1):
        if cols[k - 1] == WHITE and cols[k] == BLACK and cols[k + 1] == WHITE and k + 1 != m - 1:
            if not labs[k - 1] > labs[k]:
                c6 = False
    c7 = True
    if m >= 3 and cols[m - 3 :] == (WHITE, BLACK, WHITE):
        a, b = labs[m - 3], labs[m - 2]
        c, d = sorted(labs[m - 1 :])
        c7 = not suffix_forbidden(a, b, c, d)
    return ConditionReport(c1, c2, c3, c4, c5, c6, c7)


def suffix_forbidden(a: int, b: int, c: int, d: int) -> bool:
    """Condition 7 on the suffix ``(white a, black b, white c, x_d)`` with ``c <= d``.

    On distinct labels this is ``a > b > c``.  With repeated labels the
    suffix relations have a different rank, and the rule extends to
    ``a = b > c`` and to ``a > b = c`` with ``d < a``.
    """
    return a > b > c or (a == b > c) or (a > b == c and d < a)


def is_basis(s: FmanSequence) -> bool:
    return check_conditions(s).ok


# --------------------------------------------------------------------------
# enumeration and census


def _label_tuples(n: int, multilinear: bool, gens: int) -> Iterable[Tuple[int, ...]]:
    if multilinear:
        return itertools.permutations(range(1, n + 1))
    return itertools.product(range(1, gens + 1), repeat=n)


def _basis_for_pattern(cols, n, multilinear, gens):
    out = []
    for labs in _label_tuples(n, multilinear, gens):
        s = FmanSequence(cols, labs)
        if is_basis(s):
            out.append(s)
    return out


def enumerate_fman_basis(n: int, multilinear: bool = True, gens: Optional[int] = None,
                         threads: int = 1) -> List[FmanSequence]:
    """Basis sequences of degree ``n``, ordered by colouring pattern then labels.

    ``multilinear`` uses each of ``1 .. n`` once; otherwise all label words
    over ``1 .. gens`` are admitted (the graded basis).
    """
    if n < 1:
        raise ValueError("degree must be positive")
    if not multilinear and not gens:
        raise ValueError("graded enumeration needs a generator bound")
    pats = patterns(n - 1)
    work = lambda cols: _basis_for_pattern(cols, n, multilinear, gens)
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(work, pats))
    else:
        parts = [work(p) for p in pats]
    return [s for part in parts for s in part]


def count_fman_basis(n: int) -> int:
    """Number of multilinear basis sequences (counts only, no objects kept)."""
    total = 0
    for cols in patterns(n - 1):
        for labs in itertools.permutations(range(1, n + 1)):
            if check_conditions(FmanSequence(cols, labs)).ok:
                total += 1
    return total


def basis_on_multidegree(multideg: Dict[int, int]) -> List[FmanSequence]:
    vals = sorted(g for g, k in multideg.items() for _ in range(k))
    n = len(vals)
    out = []
    for cols in patterns(n - 1):
        for labs in sorted(set(itertools.permutations(vals))):
            s = FmanSequence(cols, labs)
            if is_basis(s):
                out.append(s)
    return out


@dataclass
class CensusRow:
    colours: Tuple[str, ...]
    count: int  # sequences satisfying conditions 1-6
    reduced: int  # of those, removed by condition 7

    @property
    def glyphs(self) -> str:
        return "(" + ",".join(_GLYPH[c] for c in self.colours) + ")"


def per_tree_census(n: int) -> List[CensusRow]:
    """Per-pattern counts before condition 7, and the condition-7 removals, in census order."""
    if not 4 <= n <= 6:
        raise ValueError("census is defined for degrees 4 to 6")
    rows = []
    for cols in patterns(n - 1):
        count = reduced = 0
        for labs in itertools.permutations(range(1, n + 1)):
            r = check_conditions(FmanSequence(cols, labs))
            if r.up_to_six:
                count += 1
                if not r.c7:
                    reduced += 1
        rows.append(CensusRow(cols, count, reduced))
    return rows


# --------------------------------------------------------------------------
# rewriting

Key = Tuple[Tuple[str, ...], Tuple[int, ...]]


def _rewrite_step(cols: Tuple[str, ...], labs: Tuple[int, ...]) -> Optional[Dict[Key, Fraction]]:
    """One rewriting step, or None if the sequence already satisfies every condition."""
    m = len(cols)
    one = Fraction(1)
    # c1: x_a (x_b (Y)) with deg Y >= 2 is (x_a x_b) Y = 0
    for k in range(m - 2):
        if cols[k] == WHITE and cols[k + 1] == WHITE:
            return {}
    # c3: commutativity (and associativity) of the last white vertices
    if m and cols[m - 1] == WHITE:
        if m >= 2 and cols[m - 2] == WHITE:
            tail = tuple(sorted(labs[m - 2 :]))
            if tail != labs[m - 2 :]:
                return {(cols, labs[: m - 2] + tail): one}
        elif labs[m - 1] > labs[m]:
            return {(cols, labs[: m - 1] + (labs[m], labs[m - 1])): one}
    for k, l in _runs(cols):
        if l < m:
            # c2: adjacent brackets commute in front of a product of degree >= 2
            run = labs[k:l]
            if not _nonincreasing(run):
                srt = tuple(sorted(run, reverse=True))
                return {(cols, labs[:k] + srt + labs[l:]): one}
        else:
            # c4/c5: the trailing Lie word goes to the metabelian Lie basis
            r = l - k
            word = labs[k:]
            if r == 1:
                a, x = word
                if a < x:
                    continue
                if a == x:
                    return {}
                return {(cols, labs[:k] + (x, a)): -one}
            left_normed = (word[-1],) + tuple(reversed(word[:-1]))
            if mlie.is_canonical(left_normed):
                continue
            out: Dict[Key, Fraction] = {}
            for w, c in mlie.reduce_word(left_normed).items():
                right = tuple(reversed(w[1:])) + (w[0],)
                out[(cols, labs[:k] + right)] = out.get((cols, labs[:k] + right), 0) + c
            return out
    # c6: e [d, c Y] = - d [e, c Y] for deg Y >= 2
    for k in range(1, m - 1):
        if cols[k - 1] == WHITE and cols[k] == BLACK and cols[k + 1] == WHITE and k + 1 != m - 1:
            e, d = labs[k - 1], labs[k]
            if e == d:
                return {}
            if e < d:
                return {(cols, labs[: k - 1] + (d, e) + labs[k + 1 :]): -one}
    # c7: solve the suffix relations a[b,cd] + b[a,cd] - d[c,ab] - c[d,ab] = 0
    if m >= 3 and cols[m - 3 :] == (WHITE, BLACK, WHITE):
        suffix = labs[m - 3 :]
        if suffix_forbidden(*suffix):
            pre = labs[: m - 3]
            return {(cols, pre + g): c for g, c in suffix_rewrites(tuple(sorted(suffix)))[suffix].items()}
    return None


Suffix = Tuple[int, int, int, int]


@lru_cache(maxsize=None)
def suffix_rewrites(values: Tuple[int, ...]) -> Dict[Suffix, Dict[Suffix, Fraction]]:
    """Forbidden suffixes on a label multiset, each expressed through allowed ones.

    A suffix ``(a, b, c, d)`` with ``c <= d`` stands for ``a [b, c d]``.  Rows
    are all instances of the four-term relation; they are eliminated with
    columns ordered by ``(c, -a, b, d)`` so the pivots are exactly the
    suffixes rejected by :func:`suffix_forbidden`.
    """
    def g(x, y, z, w):
        return (x, y) + tuple(sorted((z, w)))

    cols = sorted({g(*p) for p in itertools.permutations(values)}, key=lambda t: (t[2], -t[0], t[1], t[3]))
    index = {t: i for i, t in enumerate(cols)}
    ech = Echelon()
    for a, b, c, d in sorted(set(itertools.permutations(values))):
        row: Dict[int, Fraction] = {}
        for t, s in ((g(a, b, c, d), 1), (g(b, a, c, d), 1), (g(d, c, a, b), -1), (g(c, d, a, b), -1)):
            row[index[t]] = row.get(index[t], 0) + Fraction(s)
        ech.add({k: v for k, v in row.items() if v})
    ech.finalize()
    out = {}
    for p, row in ech.rows.items():
        out[cols[p]] = {cols[k]: -v for k, v in row.items() if k != p}
    return out


@lru_cache(maxsize=1 << 17)
def _canon(key: Key) -> Tuple[Tuple[Key, Fraction], ...]:
    n = len(key[1])
    cap = 10 * n ** 3
    work: Dict[Key, Fraction] = {key: Fraction(1)}
    out: Dict[Key, Fraction] = {}
    steps = 0
    while work:
        steps += 1
        if steps > cap:
            raise RewriteCapExceeded(f"rewriting {key} exceeded {cap} steps")
        k = min(work, key=lambda kk: (pattern_rank(kk[0]), kk[1]))
        c = work.pop(k)
        nxt = _rewrite_step(*k)
        if nxt is None:
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
            continue
        for k2, a in nxt.items():
            v = work.get(k2, 0) + c * a
            if v:
                work[k2] = v
            else:
                work.pop(k2, None)
    return tuple(sorted(out.items(), key=lambda kv: (pattern_rank(kv[0][0]), kv[0][1])))


def canonicalize(s: FmanSequence) -> LinComb:
    """Rewrite a single right-comb sequence onto basis sequences."""
    return LinComb((FmanSequence(*k), c) for k, c in _canon((s.colours, s.labels)))


def _prepend(op: str, g: int, key: Key) -> Key:
    return ((_COLOUR[op],) + key[0], (g,) + key[1])


def _product(a: Dict[Key, Fraction], b: Dict[Key, Fraction], op: str) -> Dict[Key, Fraction]:
    out: Dict[Key, Fraction] = {}
    for p, c in a.items():
        for q, d in b.items():
            if len(p[1]) > 1 and len(q[1]) > 1:
                continue
            if len(p[1]) == 1:
                k, s = _prepend(op, p[1][0], q), 1
            elif op == COM:
                k, s = _prepend(op, q[1][0], p), 1
            else:
                k, s = _prepend(op, q[1][0], p), -1
            for k2, e in _canon(k):
                v = out.get(k2, 0) + s * c * d * e
                if v:
                    out[k2] = v
                else:
                    out.pop(k2, None)
    return out


@lru_cache(maxsize=1 << 16)
def _nf_term(t: Term) -> Tuple[Tuple[Key, Fraction], ...]:
    if isinstance(t, Leaf):
        return ((((), (t.index,)), Fraction(1)),)
    left = dict(_nf_term(t.left))
    right = dict(_nf_term(t.right))
    if not left or not right:
        return ()
    return tuple(sorted(_product(left, right, t.op).items(), key=lambda kv: (pattern_rank(kv[0][0]), kv[0][1])))


def normalize_sequences(t: Union[Term, LinComb]) -> LinComb:
    """Normal form as a combination of basis :class:`FmanSequence` objects."""
    out: Dict[FmanSequence, Fraction] = {}
    for term, c in as_lincomb(t).items():
        for k, a in _nf_term(term):
            s = FmanSequence(*k)
            v = out.get(s, 0) + c * a
            if v:
                out[s] = v
            else:
                out.pop(s, None)
    return LinComb(out)


def normalize_fman(t: Union[Term, LinComb]) -> LinComb:
    """Normal form of ``t`` as a combination of basis right-comb terms."""
    return normalize_sequences(t).map_keys(seq_to_term)
