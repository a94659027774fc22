"""Terms over two binary operations and their exact rational linear combinations.

A term is a planar binary tree whose leaves carry generators and whose
internal nodes carry one of two operations: ``com`` (the commutative
associative product) and ``lie`` (the bracket).  Generators ``x1, x2, ...``
have positive indices; the placeholders ``a`` .. ``e`` used when writing
identities are generators with indices ``-1`` .. ``-5``.

Text form::

    term := gen | "(" op term term ")"
    op   := "com" | "lie"
    gen  := "x" [1-9][0-9]* | "a" .. "e"
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Hashable, Iterable, Iterator, Mapping, Tuple, Union

COM = "com"
LIE = "lie"
OPS = (COM, LIE)

PLACEHOLDERS = "abcde"

Scalar = Fraction


class TermSyntaxError(ValueError):
    """Malformed term text; ``offset`` is the 1-based byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownSymbolError(TermSyntaxError):
    pass


@dataclass(frozen=True, slots=True)
class Leaf:
    index: int

    def __post_init__(self):
        if self.index == 0 or self.index < -len(PLACEHOLDERS):
            raise ValueError(f"invalid generator index {self.index}")

    @property
    def degree(self) -> int:
        return 1

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True, slots=True)
class Node:
    op: str
    left: "Term"
    right: "Term"

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown operation {self.op!r}")

    @property
    def degree(self) -> int:
        return self.left.degree + self.right.degree

    def __str__(self):
        return format_term(self)


Term = Union[Leaf, Node]


def x(i: int) -> Leaf:
    return Leaf(i)


def placeholder(name: str) -> Leaf:
    return Leaf(-(PLACEHOLDERS.index(name) + 1))


def com(a: Term, b: Term) -> Node:
    return Node(COM, a, b)


def lie(a: Term, b: Term) -> Node:
    return Node(LIE, a, b)


def is_placeholder(leaf: Leaf) -> bool:
    return leaf.index < 0


def leaves(t: Term) -> Iterator[int]:
    """Generator indices of ``t`` from left to right."""
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Leaf):
            yield s.index
        else:
            stack.append(s.right)
            stack.append(s.left)


def degree(t: Term) -> int:
    return t.degree


def multidegree(t: Term) -> Dict[int, int]:
    out: Dict[int, int] = {}
    for i in leaves(t):
        out[i] = out.get(i, 0) + 1
    return dict(sorted(out.items()))


def term_key(t: Term) -> tuple:
    """Total order on terms: by degree, then leaves before nodes, then structure."""
    if isinstance(t, Leaf):
        return (1, 0, t.index)
    return (t.degree, 1, t.op, term_key(t.left), term_key(t.right))


def relabel(t: Term, mapping: Mapping[int, int]) -> Term:
    if isinstance(t, Leaf):
        return Leaf(mapping.get(t.index, t.index))
    return Node(t.op, relabel(t.left, mapping), relabel(t.right, mapping))


# --------------------------------------------------------------------------
# text form

def _gen_name(i: int) -> str:
    return PLACEHOLDERS[-i - 1] if i < 0 else f"x{i}"


def format_term(t: Term) -> str:
    if isinstance(t, Leaf):
        return _gen_name(t.index)
    return f"({t.op} {format_term(t.left)} {format_term(t.right)})"


def parse_term(text: str) -> Term:
    """Parse the S-expression form.

    Raises :class:`TermSyntaxError` on bad input; its ``offset`` is the
    1-based byte position at which the problem was detected (one past the
    end for truncated input).
    """
    data = text.encode("utf-8")
    n = len(data)
    src = data.decode("utf-8")
    # byte offsets equal character offsets for the ASCII grammar; non-ASCII
    # input is rejected at the first offending byte
    for k, ch in enumerate(data):
        if ch >= 0x80:
            raise TermSyntaxError("non-ASCII byte", k + 1)

    def skip_ws(p):
        while p < n and src[p].isspace():
            p += 1
        return p

    def symbol(p):
        q = p
        while q < n and (src[q].isalnum() or src[q] == "_"):
            q += 1
        return src[p:q], q

    def gen(name, p):
        if len(name) == 1 and name in PLACEHOLDERS:
            return placeholder(name)
        if re.fullmatch(r"x[1-9][0-9]*", name):
            return Leaf(int(name[1:]))
        raise UnknownSymbolError(f"unknown symbol {name!r}", p + 1)

    def term(p):
        p = skip_ws(p)
        if p >= n:
            raise TermSyntaxError("unexpected end of input", p + 1)
        if src[p] == "(":
            p = skip_ws(p + 1)
            if p >= n:
                raise TermSyntaxError("unexpected end of input", p + 1)
            op, q = symbol(p)
            if op not in OPS:
                if not op:
                    raise TermSyntaxError("expected operation", p + 1)
                raise UnknownSymbolError(f"unknown operation {op!r}", p + 1)
            if q < n and not (src[q].isspace() or src[q] == "("):
                raise TermSyntaxError("expected whitespace", q + 1)
            left, q = term(q)
            right, q = term(q)
            q = skip_ws(q)
            if q >= n:
                raise TermSyntaxError("unbalanced input", q + 1)
            if src[q] != ")":
                raise TermSyntaxError("expected ')'", q + 1)
            return Node(op, left, right), q + 1
        if src[p] == ")":
            raise TermSyntaxError("unexpected ')'", p + 1)
        name, q = symbol(p)
        if not name:
            raise TermSyntaxError(f"unexpected character {src[p]!r}", p + 1)
        return gen(name, p), q

    t, pos = term(0)
    pos = skip_ws(pos)
    if pos != n:
        raise TermSyntaxError("trailing input", pos + 1)
    return t


# --------------------------------------------------------------------------
# linear combinations


def _default_key(k):
    if isinstance(k, (Leaf, Node)):
        return term_key(k)
    return k


class LinComb(Mapping):
    """Immutable finite formal sum ``sum c_k * k`` with exact rational coefficients.

    Keys are usually :data:`Term` values but any hashable, orderable object
    works (basis monomials, right-comb sequences).  Zero coefficients are
    never stored; the empty combination is zero.
    """

    __slots__ = ("_d", "_hash")

    def __init__(self, entries: Union[Mapping, Iterable[Tuple[Hashable, object]], None] = None):
        d: Dict = {}
        if entries is not None:
            items = entries.items() if isinstance(entries, Mapping) else entries
            for k, c in items:
                c = Fraction(c)
                if c:
                    v = d.get(k, 0) + c
                    if v:
                        d[k] = v
                    else:
                        del d[k]
        self._d = d
        self._hash = None

    @classmethod
    def _raw(cls, d: Dict) -> "LinComb":
        obj = cls.__new__(cls)
        obj._d = d
        obj._hash = None
        return obj

    @classmethod
    def single(cls, key, coeff=1) -> "LinComb":
        return cls({key: coeff})

    # Mapping protocol
    def __getitem__(self, key):
        return self._d[key]

    def get(self, key, default=Fraction(0)):
        return self._d.get(key, default)

    def __iter__(self):
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def __bool__(self):
        return bool(self._d)

    def __eq__(self, other):
        if isinstance(other, LinComb):
            return self._d == other._d
        if isinstance(other, int) and other == 0:
            return not self._d
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._d.items()))
        return self._hash

    # arithmetic
    def __add__(self, other: "LinComb") -> "LinComb":
        if not isinstance(other, LinComb):
            return NotImplemented
        d = dict(self._d)
        for k, c in other._d.items():
            v = d.get(k, 0) + c
            if v:
                d[k] = v
            else:
                d.pop(k, None)
        return LinComb._raw(d)

    def __neg__(self) -> "LinComb":
        return LinComb._raw({k: -c for k, c in self._d.items()})

    def __sub__(self, other: "LinComb") -> "LinComb":
        if not isinstance(other, LinComb):
            return NotImplemented
        return self + (-other)

    def __mul__(self, s) -> "LinComb":
        s = Fraction(s)
        if not s:
            return LinComb()
        return LinComb._raw({k: c * s for k, c in self._d.items()})

    __rmul__ = __mul__

    def map_keys(self, f: Callable) -> "LinComb":
        """Push the combination forward along ``f`` (merging equal images)."""
        return LinComb((f(k), c) for k, c in self._d.items())

    def sorted_items(self, key: Callable = _default_key):
        return sorted(self._d.items(), key=lambda kv: key(kv[0]))

    def sort_key(self, key: Callable = _default_key) -> tuple:
        """Total order on combinations (used to order output deterministically)."""
        return tuple((key(k), c) for k, c in self.sorted_items(key))

    def __repr__(self):
        return f"LinComb({format_lincomb(self)})"


def lincomb_add(a: LinComb, b: LinComb) -> LinComb:
    return a + b


def lincomb_scale(a: LinComb, s) -> LinComb:
    return a * s


def format_scalar(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def parse_scalar(text: str) -> Fraction:
    return Fraction(text.strip())


def format_lincomb(lc: LinComb, fmt: Callable = None) -> str:
    if not lc:
        return "0"
    if fmt is None:
        fmt = lambda k: format_term(k) if isinstance(k, (Leaf, Node)) else str(k)
    return " + ".join(f"{format_scalar(c)}*{fmt(k)}" for k, c in lc.sorted_items())


def parse_lincomb(text: str) -> LinComb:
    """Inverse of :func:`format_lincomb` for combinations of terms."""
    text = text.strip()
    if text == "0":
        return LinComb()
    parts = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "+" and depth == 0 and text[i - 1] == " " and text[i + 1 : i + 2] == " ":
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    out = []
    for part in parts:
        coeff, star, term = part.strip().partition("*")
        if not star:
            raise TermSyntaxError("expected 'scalar*term'", text.find(part))
        out.append((parse_term(term), parse_scalar(coeff)))
    return LinComb(out)


def as_lincomb(t: Union[Term, LinComb]) -> LinComb:
    if isinstance(t, LinComb):
        return t
    return LinComb._raw({t: Fraction(1)})
