"""The free metabelian transposed Poisson algebra.

Every element is a combination of left-normed brackets over a commutative
head, ``[[...[C, y1], ...], yk]`` with ``C`` a product of one to three
generators.  Basis monomials come in four shapes:

``GEN``   a single generator ``x_i``;
``LIE``   ``[[...[[x_i1, x_i2], x_i3], ...], x_in]``: degree 2 has ``i1 < i2``,
          degree 3 has ``i1 < i2`` and ``i1 <= i3``, from degree 4 on
          ``i1 > i2 <= i3 <= ... <= in``;
``COM2``  ``[[...[x_i1 x_i2, x_i3], ...], x_in]`` with ``i1 <= i2`` and the tail
          sorted; from degree 4 on the head is pinned down by the head/tail
          cycle relation (see :func:`com2_head_is_basis`);
``COM3``  ``[[...[x_i1 x_i2 x_i3, x_i4], ...], x_in]`` with ``i1 <= ... <= in``.

:func:`normalize_mtp` rewrites arbitrary terms onto this basis.
:func:`multiply_basis` is the closed-form multiplication table by a
generator, checked against :func:`normalize_mtp` by :func:`check_table`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple, Union

from . import mlie
from .terms import COM, LIE, Leaf, LinComb, Node, Term, as_lincomb, com, lie

GEN, SHAPE_LIE, COM2, COM3 = "GEN", "LIE", "COM2", "COM3"
SHAPES = (GEN, SHAPE_LIE, COM2, COM3)
_SHAPE_RANK = {GEN: 0, SHAPE_LIE: 1, COM2: 2, COM3: 3}

half = Fraction(1, 2)


class RewriteCapExceeded(RuntimeError):
    """Raised when a reduction runs past its step budget (a defect, never expected)."""


@dataclass(frozen=True, order=False)
class MtpBasisMonomial:
    shape: str
    head: Tuple[int, ...]
    tail: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(self.head))
        object.__setattr__(self, "tail", tuple(self.tail))
        if self.shape not in SHAPES:
            raise ValueError(f"unknown shape {self.shape!r}")
        want = {GEN: 1, SHAPE_LIE: 2, COM2: 2, COM3: 3}[self.shape]
        if len(self.head) != want:
            raise ValueError(f"{self.shape} monomial needs a head of length {want}")
        if self.shape == GEN and self.tail:
            raise ValueError("a generator has no tail")

    @property
    def degree(self) -> int:
        return len(self.head) + len(self.tail)

    @property
    def indices(self) -> Tuple[int, ...]:
        return self.head + self.tail

    def sort_key(self):
        return (self.degree, _SHAPE_RANK[self.shape], self.head, self.tail)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return f"{self.shape}{self.head}|{self.tail}"


def _com_chain(head: Tuple[int, ...]) -> Term:
    t = Leaf(head[-1])
    for i in reversed(head[:-1]):
        t = com(Leaf(i), t)
    return t


def to_term(m: MtpBasisMonomial) -> Term:
    if m.shape == SHAPE_LIE:
        t: Term = lie(Leaf(m.head[0]), Leaf(m.head[1]))
    else:
        t = _com_chain(m.head)
    for i in m.tail:
        t = lie(t, Leaf(i))
    return t


def from_term(t: Term) -> MtpBasisMonomial:
    """Read a spanning-form term back as a (not necessarily basis) monomial."""
    tail = []
    while isinstance(t, Node) and t.op == LIE and isinstance(t.right, Leaf):
        if isinstance(t.left, Leaf):
            tail.append(t.right.index)
            tail.append(t.left.index)
            tail.reverse()
            return MtpBasisMonomial(SHAPE_LIE, tuple(tail[:2]), tuple(tail[2:]))
        tail.append(t.right.index)
        t = t.left
    head = []
    while isinstance(t, Node) and t.op == COM and isinstance(t.left, Leaf):
        head.append(t.left.index)
        t = t.right
    if not isinstance(t, Leaf):
        raise ValueError("term is not in spanning form")
    head.append(t.index)
    shape = {1: GEN, 2: COM2, 3: COM3}.get(len(head))
    if shape is None:
        raise ValueError("commutative head longer than three")
    return MtpBasisMonomial(shape, tuple(head), tuple(reversed(tail)))


# --------------------------------------------------------------------------
# basis membership and enumeration


def com2_basis_heads(values: Tuple[int, ...]) -> List[Tuple[int, int]]:
    """Admissible heads of a COM2 monomial of degree >= 4 on the sorted multiset ``values``.

    Pairs ``(v1, w)`` with ``v1`` the minimum and ``w > v1``, plus one extra
    pair: the two largest entries if both exceed ``v1``, else ``(v1, v1)``.
    On distinct indices this is exactly "``i1 < i3 <= ... <= in`` or
    ``i3 <= ... <= in < i1 <= i2``".
    """
    v1 = values[0]
    heads = sorted({(v1, w) for w in values[1:] if w > v1})
    top = (values[-2], values[-1])
    heads.append(top if top[0] > v1 else (v1, v1))
    return sorted(set(heads))


def com2_head_is_basis(head, tail) -> bool:
    values = tuple(sorted(tuple(head) + tuple(tail)))
    return tuple(sorted(head)) in com2_basis_heads(values)


def is_basis(m: MtpBasisMonomial) -> bool:
    n = m.degree
    tail_sorted = list(m.tail) == sorted(m.tail)
    if m.shape == GEN:
        return True
    if m.shape == SHAPE_LIE:
        return mlie.is_canonical(m.head + m.tail, ascending3=True)
    if m.shape == COM2:
        if m.head[0] > m.head[1] or not tail_sorted:
            return False
        return n <= 3 or com2_head_is_basis(m.head, m.tail)
    return list(m.head + m.tail) == sorted(m.head + m.tail)


def _basis_on_multiset(values: Tuple[int, ...]) -> List[MtpBasisMonomial]:
    n = len(values)
    out: List[MtpBasisMonomial] = []
    distinct = sorted(set(values))
    if n == 1:
        return [MtpBasisMonomial(GEN, values)]

    def without(vals, *drop):
        rest = list(vals)
        for d in drop:
            rest.remove(d)
        return tuple(rest)

    # LIE
    v1 = values[0]
    for w in distinct:
        if w == v1:
            continue
        rest = without(values, v1, w)
        if n == 2:
            out.append(MtpBasisMonomial(SHAPE_LIE, (v1, w)))
        elif n == 3:
            out.append(MtpBasisMonomial(SHAPE_LIE, (v1, w), rest))
        else:
            out.append(MtpBasisMonomial(SHAPE_LIE, (w, v1), rest))
    # COM2
    if n == 2:
        out.append(MtpBasisMonomial(COM2, values))
    elif n == 3:
        for k in distinct:
            out.append(MtpBasisMonomial(COM2, without(values, k), (k,)))
    else:
        for h in com2_basis_heads(values):
            out.append(MtpBasisMonomial(COM2, h, without(values, *h)))
    # COM3
    if n >= 3:
        out.append(MtpBasisMonomial(COM3, values[:3], values[3:]))
    return out


def enumerate_mtp_basis(k: int, n: int, multilinear: bool = False) -> List[MtpBasisMonomial]:
    """Basis monomials of degree ``n`` on ``x1 .. xk`` in lexicographic order.

    With ``multilinear`` only monomials using each of ``x1 .. xn`` exactly
    once are returned (``k`` must then be at least ``n``).
    """
    if n < 1 or k < 1:
        raise ValueError("need k >= 1 and n >= 1")
    if multilinear:
        if k < n:
            return []
        multisets: Iterable[Tuple[int, ...]] = [tuple(range(1, n + 1))]
    else:
        multisets = itertools.combinations_with_replacement(range(1, k + 1), n)
    out = []
    for vals in multisets:
        out.extend(_basis_on_multiset(tuple(vals)))
    out.sort(key=lambda m: (_SHAPE_RANK[m.shape], m.head, m.tail))
    return out


def basis_on_multidegree(multideg: Dict[int, int]) -> List[MtpBasisMonomial]:
    vals = tuple(sorted(g for g, m in multideg.items() for _ in range(m)))
    return _basis_on_multiset(vals)


# --------------------------------------------------------------------------
# canonicalisation of spanning forms
#
# A spanning form is ``(head, tail)``: ``head`` a sorted tuple of 1..3
# generators, ``tail`` the bracket arguments.  Head length 1 is a Lie word.

SpanForm = Tuple[Tuple[int, ...], Tuple[int, ...]]
Vec = Dict[MtpBasisMonomial, Fraction]


def _add(out: Dict, key, c) -> None:
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _reduce_com2(head: Tuple[int, int], tail: Tuple[int, ...]) -> Vec:
    """Move a COM2 monomial of degree >= 4 onto admissible heads via the head/tail cycle."""
    values = tuple(sorted(head + tail))
    n = len(values)
    admissible = set(com2_basis_heads(values))
    v1 = values[0]
    top = (values[-2], values[-1])

    def rest_of(pair):
        rest = list(values)
        rest.remove(pair[0])
        rest.remove(pair[1])
        return rest

    work: Dict[Tuple[int, int], Fraction] = {tuple(sorted(head)): Fraction(1)}
    out: Vec = {}
    cap = 10 * n * n
    steps = 0
    while work:
        steps += 1
        if steps > cap:
            raise RewriteCapExceeded(f"COM2 reduction on {values} exceeded {cap} steps")
        pair = min(work)
        c = work.pop(pair)
        if pair in admissible:
            _add(out, MtpBasisMonomial(COM2, pair, tuple(rest_of(pair))), c)
            continue
        a, b = pair
        if a > v1:
            # E(ab) + E(v1 d) = E(v1 a) + E(b d), d the largest tail entry
            d = rest_of(pair)[-1]
            for p, s in (((v1, a), 1), (tuple(sorted((b, d))), 1), ((v1, d), -1)):
                _add(work, p, s * c)
        else:
            # pair == (v1, v1) while the two largest entries exceed v1
            m2, m1 = top
            for p, s in (((v1, m2), 1), ((v1, m1), 1), ((m2, m1), -1)):
                _add(work, p, s * c)
    return out


@lru_cache(maxsize=1 << 16)
def _canon(sf: SpanForm) -> Tuple[Tuple[MtpBasisMonomial, Fraction], ...]:
    head, tail = sf
    n = len(head) + len(tail)
    if len(head) > 3:
        return ()
    if len(head) == 1:
        if not tail:
            return ((MtpBasisMonomial(GEN, head), Fraction(1)),)
        res = []
        for w, c in mlie.reduce_word(head + tail, ascending3=True).items():
            res.append((MtpBasisMonomial(SHAPE_LIE, w[:2], w[2:]), c))
        return tuple(res)
    if len(head) == 3:
        s = tuple(sorted(head + tail))
        return ((MtpBasisMonomial(COM3, s[:3], s[3:]), Fraction(1)),)
    head = tuple(sorted(head))
    tail = tuple(sorted(tail))
    if n <= 3:
        return ((MtpBasisMonomial(COM2, head, tail), Fraction(1)),)
    return tuple(_reduce_com2(head, tail).items())


def canonicalize(forms: Dict[SpanForm, Fraction]) -> Vec:
    out: Vec = {}
    for sf, c in forms.items():
        for m, a in _canon(sf):
            _add(out, m, c * a)
    return out


def _form_of(m: MtpBasisMonomial) -> SpanForm:
    if m.shape == SHAPE_LIE:
        return (m.head[:1], m.head[1:] + m.tail)
    return (m.head, m.tail)


# --------------------------------------------------------------------------
# products of spanning forms


def _com_with_generator(t: int, sf: SpanForm) -> Dict[SpanForm, Fraction]:
    """``x_t . S`` for a spanning form ``S``."""
    head, tail = sf
    if not tail:
        if len(head) + 1 > 3:
            return {}
        return {(tuple(sorted(head + (t,))), ()): Fraction(1)}
    scale = half ** (len(tail) - 1)
    y1, rest = tail[0], tail[1:]
    out: Dict[SpanForm, Fraction] = {}
    if len(head) == 1:
        # x_t [c, y] = 1/2 ([x_t c, y] - [x_t y, c])
        c0 = head[0]
        _add(out, (tuple(sorted((t, c0))), (y1,) + rest), scale * half)
        _add(out, (tuple(sorted((t, y1))), (c0,) + rest), -scale * half)
    elif len(head) == 2:
        # x_t [C, y] = 1/2 [x_t C, y]; the other half is [C, x_t y] = 0
        _add(out, (tuple(sorted(head + (t,))), tail), scale * half)
    return out


def _product_forms(p: SpanForm, q: SpanForm, op: str) -> Dict[SpanForm, Fraction]:
    dp = len(p[0]) + len(p[1])
    dq = len(q[0]) + len(q[1])
    if dp > 1 and dq > 1:
        return {}
    if op == LIE:
        if dq == 1:
            return {(p[0], p[1] + q[0]): Fraction(1)}
        return {(q[0], q[1] + p[0]): Fraction(-1)}
    if dq == 1:
        return _com_with_generator(q[0][0], p)
    return _com_with_generator(p[0][0], q)


def _product_vec(a: Vec, b: Vec, op: str) -> Vec:
    forms: Dict[SpanForm, Fraction] = {}
    for m, c in a.items():
        fm = _form_of(m)
        for n_, d in b.items():
            for sf, e in _product_forms(fm, _form_of(n_), op).items():
                _add(forms, sf, c * d * e)
    return canonicalize(forms)


@lru_cache(maxsize=1 << 16)
def _nf_term(t: Term) -> Tuple[Tuple[MtpBasisMonomial, Fraction], ...]:
    if isinstance(t, Leaf):
        return ((MtpBasisMonomial(GEN, (t.index,)), Fraction(1)),)
    left = dict(_nf_term(t.left))
    right = dict(_nf_term(t.right))
    if not left or not right:
        return ()
    return tuple(sorted(_product_vec(left, right, t.op).items(), key=lambda kv: kv[0].sort_key()))


def normalize_monomials(t: Union[Term, LinComb]) -> LinComb:
    """Normal form as a combination of :class:`MtpBasisMonomial`."""
    out: Vec = {}
    for term, c in as_lincomb(t).items():
        for m, a in _nf_term(term):
            _add(out, m, c * a)
    return LinComb(out)


def normalize_mtp(t: Union[Term, LinComb]) -> LinComb:
    """Normal form of ``t`` as a combination of basis-monomial terms."""
    return normalize_monomials(t).map_keys(to_term)


# --------------------------------------------------------------------------
# the multiplication table by a generator


@dataclass(frozen=True)
class TableEntry:
    case: str
    forms: Dict[SpanForm, Fraction]
    trusted: bool = True


SUSPECT_CASE = "lie-com-not-minimal"


def table_formula(m: MtpBasisMonomial, t: int, op: str) -> Optional[TableEntry]:
    """The closed-form product ``m * x_t`` as a combination of spanning forms.

    Defined for basis monomials of degree at least 4; returns None below
    that.  Entries are taken case by case, before canonicalisation.  The
    ``com`` product of a pure Lie monomial with a non-minimal generator is
    returned verbatim (it has the wrong degree: ``x_t`` is missing) and
    marked untrusted.
    """
    n = m.degree
    if n < 4 or m.shape == GEN:
        return None
    minimal = t < min(m.indices)
    i = m.head + m.tail  # i[0] .. i[n-1] are i_1 .. i_n
    if op == LIE:
        if m.shape == SHAPE_LIE:
            return TableEntry("lie-lie", {((i[0],), i[1:] + (t,)): Fraction(1)})
        if m.shape == COM2:
            if minimal:
                mid = i[2 : n - 2]
                forms: Dict[SpanForm, Fraction] = {}
                _add(forms, (tuple(sorted((t, i[1]))), (i[0],) + i[2:]), 1)
                _add(forms, (tuple(sorted((t, i[n - 1]))), i[: n - 1]), -1)
                _add(forms, (tuple(sorted((t, i[0]))), i[1:]), 1)
                _add(forms, (tuple(sorted((t, i[n - 2]))), i[:2] + mid + (i[n - 1],)), -1)
                _add(forms, (tuple(sorted((i[n - 2], i[n - 1]))), (t,) + i[: n - 2]), 1)
                return TableEntry("lie-com2-minimal", forms)
            return TableEntry("lie-com2-insert", {(m.head, tuple(sorted(m.tail + (t,)))): Fraction(1)})
        if t >= i[2]:
            return TableEntry("lie-com3-insert", {(m.head, tuple(sorted(m.tail + (t,)))): Fraction(1)})
        return TableEntry("lie-com3-swap", {(tuple(sorted((i[0], i[1], t))), (i[2],) + i[3:]): Fraction(1)})
    # op == COM
    if m.shape == SHAPE_LIE:
        s = half ** (n - 1)
        if minimal:
            forms = {}
            _add(forms, (tuple(sorted((i[0], t))), (i[1],) + i[2:]), s)
            _add(forms, (tuple(sorted((i[1], t))), (i[0],) + i[2:]), -s)
            return TableEntry("com-lie-minimal", forms)
        forms = {}
        _add(forms, (tuple(sorted((i[1], i[0]))), i[2:]), s)
        _add(forms, (tuple(sorted((i[1], i[n - 1]))), (i[0],) + i[2 : n - 1]), -s)
        _add(forms, (tuple(sorted((i[1], i[n - 2]))), (i[n - 1], i[0]) + i[2 : n - 2]), -s)
        _add(forms, (tuple(sorted((i[n - 2], i[n - 1]))), (i[1], i[0]) + i[2 : n - 2]), s)
        return TableEntry(SUSPECT_CASE, forms, trusted=False)
    if m.shape == COM2:
        s = half ** (n - 2)
        if t >= i[2]:
            return TableEntry("com-com2-insert", {(i[:3], tuple(sorted(i[3:] + (t,)))): s})
        return TableEntry("com-com2-swap", {(tuple(sorted((i[0], i[1], t))), i[2:]): s})
    return TableEntry("com-com3", {})


def suspect_formula_with_generator(m: MtpBasisMonomial, t: int) -> Dict[SpanForm, Fraction]:
    """The untrusted entry with ``x_t`` added to every tail (the likely intended reading)."""
    entry = table_formula(m, t, COM)
    return {(h, tail + (t,)): c for (h, tail), c in entry.forms.items()}


def multiply_basis(m: MtpBasisMonomial, t: int, op: str) -> LinComb:
    """``m * x_t`` in the basis: the closed-form table where it is trusted, else :func:`normalize_mtp`."""
    entry = table_formula(m, t, op)
    if entry is None or not entry.trusted:
        return normalize_monomials(Node(op, to_term(m), Leaf(t)))
    return LinComb(canonicalize(entry.forms))


def product(a: Union[LinComb, MtpBasisMonomial], b: Union[LinComb, MtpBasisMonomial], op: str) -> LinComb:
    """Bilinear product of combinations of basis monomials."""
    if isinstance(a, MtpBasisMonomial):
        a = LinComb.single(a)
    if isinstance(b, MtpBasisMonomial):
        b = LinComb.single(b)
    out: Vec = {}
    for p, c in a.items():
        for q, d in b.items():
            if p.degree > 1 and q.degree > 1:
                continue
            if q.degree == 1 and p.degree > 1:
                r = multiply_basis(p, q.head[0], op)
            elif p.degree == 1 and q.degree > 1:
                r = multiply_basis(q, p.head[0], op)
                if op == LIE:
                    r = -r
            else:
                r = LinComb(canonicalize(_product_forms(_form_of(p), _form_of(q), op)))
            for k, e in r.items():
                _add(out, k, c * d * e)
    return LinComb(out)


@dataclass
class TableReport:
    checked: int
    discrepancies: List[Tuple[MtpBasisMonomial, int, str, LinComb, LinComb]]
    suspect_cases: int
    suspect_verbatim_mismatches: int
    suspect_repaired_mismatches: int

    @property
    def ok(self) -> bool:
        return not self.discrepancies


def check_table(max_gens: int, degrees=range(4, 7)) -> TableReport:
    """Compare :func:`multiply_basis` with :func:`normalize_mtp` on every basis monomial.

    Also evaluates the untrusted entry two ways (verbatim, and with the
    generator restored in every tail) and counts how often each disagrees.
    """
    checked = 0
    bad = []
    suspect = verb_bad = fixed_bad = 0
    for n in degrees:
        for m in enumerate_mtp_basis(max_gens, n):
            for t in range(1, max_gens + 1):
                for op in (LIE, COM):
                    expected = normalize_monomials(Node(op, to_term(m), Leaf(t)))
                    got = multiply_basis(m, t, op)
                    checked += 1
                    if got != expected:
                        bad.append((m, t, op, got, expected))
                    entry = table_formula(m, t, op)
                    if entry is not None and not entry.trusted:
                        suspect += 1
                        if LinComb(canonicalize(entry.forms)) != expected:
                            verb_bad += 1
                        if LinComb(canonicalize(suspect_formula_with_generator(m, t))) != expected:
                            fixed_bad += 1
    return TableReport(checked, bad, suspect, verb_bad, fixed_bad)
