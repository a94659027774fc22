"""Catalog of defining and derived identities, and consequence generation.

Each identity is stored as a single combination ``lhs - rhs`` over the
placeholders ``a`` .. ``e``.  Chains of equalities are split into separate
entries.  The ``derived`` catalog holds identities that are theorems of a
variety rather than axioms; they are verified, never assumed.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Tuple

from .terms import (
    COM,
    LIE,
    LinComb,
    Leaf,
    Node,
    Term,
    com,
    format_lincomb,
    is_placeholder,
    leaves,
    lie,
    placeholder,
    term_key,
)

a, b, c, d, e = (placeholder(s) for s in "abcde")
half = Fraction(1, 2)


@dataclass(frozen=True)
class Identity:
    name: str
    relation: LinComb
    description: str = ""

    @property
    def placeholders(self) -> Tuple[int, ...]:
        found = set()
        for t in self.relation:
            found.update(i for i in leaves(t) if i < 0)
        return tuple(sorted(found, reverse=True))

    @property
    def arity(self) -> int:
        return len(self.placeholders)

    def is_multilinear(self) -> bool:
        ph = sorted(self.placeholders)
        return all(sorted(leaves(t)) == ph for t in self.relation)

    def __str__(self):
        return f"{self.name}: {format_lincomb(self.relation)} = 0"


def _ident(name, entries, description=""):
    return Identity(name, LinComb(entries), description)


CATALOG: Dict[str, Identity] = {
    i.name: i
    for i in [
        _ident("com-assoc", [(com(com(a, b), c), 1), (com(a, com(b, c)), -1)], "(ab)c = a(bc)"),
        _ident("com-comm", [(com(a, b), 1), (com(b, a), -1)], "ab = ba"),
        _ident("lie-antisym", [(lie(a, b), 1), (lie(b, a), 1)], "[a,b] = -[b,a]"),
        _ident(
            "lie-jacobi",
            [(lie(lie(a, b), c), 1), (lie(lie(b, c), a), 1), (lie(lie(c, a), b), 1)],
            "[[a,b],c] + [[b,c],a] + [[c,a],b] = 0",
        ),
        _ident(
            "TP",
            [(com(a, lie(b, c)), 1), (lie(com(a, b), c), -half), (lie(b, com(a, c)), -half)],
            "a[b,c] = 1/2([ab,c] + [b,ac])",
        ),
        _ident("MET-1", [(lie(lie(a, b), lie(c, d)), 1)], "[[a,b],[c,d]] = 0"),
        _ident("MET-2", [(lie(lie(a, b), com(c, d)), 1)], "[[a,b],cd] = 0"),
        _ident("MET-3", [(lie(com(a, b), com(c, d)), 1)], "[ab,cd] = 0"),
        _ident("MET-4", [(com(com(a, b), com(c, d)), 1)], "abcd = 0"),
        _ident("MET-5", [(com(com(a, b), lie(c, d)), 1)], "ab[c,d] = 0"),
        _ident("MET-6", [(com(lie(a, b), lie(c, d)), 1)], "[a,b][c,d] = 0"),
        _ident(
            "FMAN",
            [
                (lie(com(a, b), com(c, d)), 1),
                (com(lie(com(a, b), c), d), -1),
                (com(lie(com(a, b), d), c), -1),
                (com(a, lie(b, com(c, d))), -1),
                (com(b, lie(a, com(c, d))), -1),
                (com(com(a, c), lie(b, d)), 1),
                (com(com(b, c), lie(a, d)), 1),
                (com(com(b, d), lie(a, c)), 1),
                (com(com(a, d), lie(b, c)), 1),
            ],
            "[ab,cd] = [ab,c]d + [ab,d]c + a[b,cd] + b[a,cd] - (ac)[b,d] - (bc)[a,d] - (bd)[a,c] - (ad)[b,c]",
        ),
    ]
}

FMAN_MET = _ident(
    "FMAN-MET",
    [
        (com(lie(com(a, b), c), d), 1),
        (com(lie(com(a, b), d), c), 1),
        (com(a, lie(b, com(c, d))), 1),
        (com(b, lie(a, com(c, d))), 1),
    ],
    "[ab,c]d + [ab,d]c + a[b,cd] + b[a,cd] = 0",
)

DERIVED: Dict[str, Identity] = {
    i.name: i
    for i in [
        _ident(
            "lie-tail-commute",
            [(lie(lie(lie(a, b), c), d), 1), (lie(lie(lie(a, b), d), c), -1)],
            "[[[a,b],c],d] = [[[a,b],d],c]",
        ),
        _ident(
            "com-tail-commute",
            [(lie(lie(com(a, b), c), d), 1), (lie(lie(com(a, b), d), c), -1)],
            "[[ab,c],d] = [[ab,d],c]",
        ),
        _ident(
            "head-tail-cycle",
            [
                (lie(lie(com(a, b), c), d), 1),
                (lie(lie(com(b, c), a), d), -1),
                (lie(lie(com(c, d), a), b), 1),
                (lie(lie(com(a, d), c), b), -1),
            ],
            "[[ab,c],d] - [[bc,a],d] + [[cd,a],b] - [[ad,c],b] = 0",
        ),
        _ident(
            "com3-exchange",
            [(lie(com(com(a, b), c), d), 1), (lie(com(com(a, b), d), c), -1)],
            "[abc,d] = [abd,c]",
        ),
        _ident(
            "lie-com-exchange",
            [(com(lie(com(lie(a, b), c), d), e), 1), (com(lie(com(lie(a, b), c), e), d), 1)],
            "[[a,b]c,d]e = -[[a,b]c,e]d",
        ),
        _ident(
            "com3-com-exchange",
            [(com(lie(com(com(a, b), c), d), e), 1), (com(lie(com(com(a, b), c), e), d), 1)],
            "[abc,d]e = -[abc,e]d",
        ),
        FMAN_MET,
    ]
}

_AXIOMS = ["com-assoc", "com-comm", "lie-antisym", "lie-jacobi"]
_MET = [f"MET-{k}" for k in range(1, 7)]

PRESETS: Dict[str, Tuple[str, ...]] = {
    "MTP": tuple(_AXIOMS + ["TP"] + _MET),
    "MFM": tuple(_AXIOMS + ["FMAN"] + _MET),
}


def get_identity(name: str) -> Identity:
    if name in CATALOG:
        return CATALOG[name]
    if name in DERIVED:
        return DERIVED[name]
    raise KeyError(f"unknown identity {name!r}")


def preset_identities(preset: str) -> List[Identity]:
    try:
        names = PRESETS[preset.upper()]
    except KeyError:
        raise KeyError(f"unknown variety {preset!r}; expected one of {sorted(PRESETS)}") from None
    return [CATALOG[n] for n in names]


# --------------------------------------------------------------------------
# substitution


def _subst_term(t: Term, assignment: Mapping[int, Term]) -> Term:
    if isinstance(t, Leaf):
        if is_placeholder(t):
            return assignment[t.index]
        return t
    return Node(t.op, _subst_term(t.left, assignment), _subst_term(t.right, assignment))


def substitute(identity: Identity, assignment: Mapping) -> LinComb:
    """Replace every placeholder simultaneously.

    ``assignment`` maps placeholder names (``"a"``), placeholder leaves or
    their negative indices to terms.
    """
    amap: Dict[int, Term] = {}
    for k, v in assignment.items():
        if isinstance(k, str):
            k = placeholder(k).index
        elif isinstance(k, Leaf):
            k = k.index
        amap[k] = v
    missing = [p for p in identity.placeholders if p not in amap]
    if missing:
        names = ", ".join("abcde"[-p - 1] for p in missing)
        raise KeyError(f"assignment for {identity.name} is missing placeholder(s) {names}")
    return LinComb((_subst_term(t, amap), cf) for t, cf in identity.relation.items())


# --------------------------------------------------------------------------
# multilinear monomials and consequences

MAX_CONSEQUENCE_ARITY = 7


@lru_cache(maxsize=None)
def shapes(n: int) -> Tuple[Term, ...]:
    """Planar binary tree shapes with ``n`` leaves (leaves carry placeholder index 1)."""
    if n == 1:
        return (Leaf(1),)
    out = []
    for k in range(1, n):
        for left in shapes(k):
            for right in shapes(n - k):
                out.append(Node(COM, left, right))
    return tuple(out)


@lru_cache(maxsize=None)
def _monomials_on(labels: Tuple[int, ...]) -> Tuple[Term, ...]:
    """All multilinear monomials on the given labels (every shape, colouring and order)."""
    n = len(labels)
    if n == 1:
        return (Leaf(labels[0]),)
    out = []
    rest = labels[1:]
    first = labels[0]
    # split the label set into left/right blocks; the first label goes either way
    for k in range(0, n - 1):
        for chosen in itertools.combinations(rest, k):
            left_labels = (first,) + chosen
            right_labels = tuple(l for l in rest if l not in chosen)
            for left in _monomials_on(left_labels):
                for right in _monomials_on(right_labels):
                    for op in (COM, LIE):
                        out.append(Node(op, left, right))
                        out.append(Node(op, right, left))
    out.sort(key=term_key)
    return tuple(out)


def multilinear_monomials(labels) -> Tuple[Term, ...]:
    return _monomials_on(tuple(sorted(labels)))


def ordered_set_partitions(labels: Tuple[int, ...], k: int):
    """Ordered partitions of ``labels`` into ``k`` nonempty blocks."""
    if k == 0:
        if not labels:
            yield ()
        return
    if len(labels) < k:
        return
    n = len(labels)
    for size in range(1, n - k + 2):
        for block in itertools.combinations(labels, size):
            rest = tuple(l for l in labels if l not in block)
            for tail in ordered_set_partitions(rest, k - 1):
                yield (block,) + tail


def _substitution_instances(identity: Identity, labels: Tuple[int, ...]):
    ph = identity.placeholders
    for blocks in ordered_set_partitions(labels, len(ph)):
        choices = [multilinear_monomials(bl) for bl in blocks]
        for mons in itertools.product(*choices):
            yield substitute(identity, dict(zip(ph, mons)))


@lru_cache(maxsize=None)
def _consequences_on(preset: str, labels: Tuple[int, ...]) -> Tuple[LinComb, ...]:
    found = set()
    for ident in preset_identities(preset):
        if ident.arity <= len(labels):
            for lc in _substitution_instances(ident, labels):
                if lc:
                    found.add(lc)
    # close under composition with the remaining labels (ideal, not just substitution)
    n = len(labels)
    for size in range(2, n):
        for inner in itertools.combinations(labels, size):
            outer = tuple(l for l in labels if l not in inner)
            inner_cons = _consequences_on(preset, inner)
            if not inner_cons:
                continue
            for w in multilinear_monomials(outer):
                for u in inner_cons:
                    for op in (COM, LIE):
                        found.add(LinComb((Node(op, t, w), cf) for t, cf in u.items()))
                        found.add(LinComb((Node(op, w, t), cf) for t, cf in u.items()))
    return tuple(sorted(found, key=LinComb.sort_key))


def multilinear_consequences(preset: str, n: int) -> List[LinComb]:
    """Every multilinear consequence of a variety's identities on ``x1 .. xn``.

    A consequence is an identity whose placeholders are replaced by
    multilinear monomials on disjoint label blocks, possibly placed inside
    a larger monomial on the remaining labels.  Structural duplicates are
    removed and the list is sorted, so the output is deterministic.
    """
    if not 2 <= n <= MAX_CONSEQUENCE_ARITY:
        raise ValueError(f"arity {n} outside supported range 2..{MAX_CONSEQUENCE_ARITY}")
    return list(_consequences_on(preset.upper(), tuple(range(1, n + 1))))


def canonical_instance(identity: Identity) -> LinComb:
    """The identity with placeholders ``a, b, c, ...`` replaced by ``x1, x2, x3, ...``."""
    return substitute(identity, {p: Leaf(k) for k, p in enumerate(identity.placeholders, 1)})


def verify_derived_identity(preset: str, derived, method: str = "operadic") -> bool:
    """Whether ``derived`` holds in the variety, by exact rank comparison in the oracle."""
    from . import oracle

    ident = derived if isinstance(derived, Identity) else get_identity(derived)
    return oracle.in_relation_span(preset, canonical_instance(ident), method=method)
