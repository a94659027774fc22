"""Dimension oracle: the free algebra modulo a variety, by exact linear algebra.

Two independent routes compute the same quotient.

``flat``
    All multilinear monomials of arity ``n`` are columns (:class:`MonomialIndex`),
    every consequence from :func:`identities.multilinear_consequences` is a
    row, and the dimension is ``columns - rank``.  Exhaustive, and therefore
    slow beyond arity 4.

``operadic``
    The quotient is built one multidegree at a time.  A monomial of
    multidegree ``k`` is ``op(L, R)`` with ``L``, ``R`` of smaller
    multidegree, so modulo everything already known below, the ambient space
    at ``k`` is the direct sum over ``op`` and splittings ``m + (k - m)`` of
    ``P(m) (x) P(k - m)``.  The only new relations at ``k`` are identity
    instances whose top operation sits at the root, with placeholders running
    over bases of lower levels.  Composition closure is automatic because
    lower subtrees are always reduced first.

Multidegrees are keyed by their multiplicity tuple after discarding unused
generators; relabelling generators monotonically is an isomorphism, so
``{2: 1, 5: 1}`` and ``{1: 1, 2: 1}`` share one level.
"""
from __future__ import annotations

import itertools
import math
import os
import pickle
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from . import identities as ids
from .linalg import Echelon, TrackedEchelon, Vector, axpy, to_matrix_market
from .terms import COM, LIE, OPS, Leaf, LinComb, Node, Term, as_lincomb, leaves, multidegree, relabel

MAX_ARITY = 6
DEFAULT_ARITY_CAP = 5
GRADED_MAX_DEGREE = 5
GRADED_MAX_GENERATORS = 3


class OracleSizeError(ValueError):
    pass


# --------------------------------------------------------------------------
# flat route: explicit monomial index and relation matrix


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


def _perm_rank(p: Sequence[int]) -> int:
    n = len(p)
    rank = 0
    rest = sorted(p)
    for i, v in enumerate(p):
        k = rest.index(v)
        rank += k * math.factorial(n - 1 - i)
        rest.pop(k)
    return rank


def _perm_unrank(r: int, n: int) -> List[int]:
    rest = list(range(1, n + 1))
    out = []
    for i in range(n):
        f = math.factorial(n - 1 - i)
        k, r = divmod(r, f)
        out.append(rest.pop(k))
    return out


def _shape_of(t: Term) -> Term:
    if isinstance(t, Leaf):
        return Leaf(1)
    return Node(COM, _shape_of(t.left), _shape_of(t.right))


def _ops_preorder(t: Term) -> List[str]:
    out = []
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Node):
            out.append(s.op)
            stack.append(s.right)
            stack.append(s.left)
    return out


def _build(shape: Term, ops: Iterator[str], labels: Iterator[int]) -> Term:
    if isinstance(shape, Leaf):
        return Leaf(next(labels))
    op = next(ops)
    left = _build(shape.left, ops, labels)
    right = _build(shape.right, ops, labels)
    return Node(op, left, right)


class MonomialIndex:
    """Dense ids for the multilinear monomials on ``x1 .. xn``.

    ``id = ((shape * 2**(n-1)) + colouring) * n! + permutation_rank`` where
    shapes come from :func:`identities.shapes`, the colouring reads the
    internal nodes in preorder as a binary number (``com`` = 0, ``lie`` = 1,
    root most significant) and the permutation lists leaf labels left to
    right, ranked lexicographically.
    """

    def __init__(self, n: int):
        if not 1 <= n <= MAX_ARITY:
            raise OracleSizeError(f"arity {n} outside 1..{MAX_ARITY}")
        self.n = n
        self.shapes = ids.shapes(n)
        self.shape_id = {s: i for i, s in enumerate(self.shapes)}
        self.ncolourings = 2 ** (n - 1)
        self.nperms = math.factorial(n)

    def __len__(self) -> int:
        return len(self.shapes) * self.ncolourings * self.nperms

    def id(self, t: Term) -> int:
        s = self.shape_id[_shape_of(t)]
        colour = 0
        for op in _ops_preorder(t):
            colour = 2 * colour + (op == LIE)
        perm = list(leaves(t))
        if sorted(perm) != list(range(1, self.n + 1)):
            raise ValueError(f"not a multilinear monomial on x1..x{self.n}")
        return (s * self.ncolourings + colour) * self.nperms + _perm_rank(perm)

    def term(self, i: int) -> Term:
        rest, p = divmod(i, self.nperms)
        s, colour = divmod(rest, self.ncolourings)
        bits = format(colour, f"0{self.n - 1}b") if self.n > 1 else ""
        ops = iter(LIE if b == "1" else COM for b in bits)
        return _build(self.shapes[s], ops, iter(_perm_unrank(p, self.n)))

    def __iter__(self) -> Iterator[Term]:
        return (self.term(i) for i in range(len(self)))

    def vector(self, lc: Union[Term, LinComb]) -> Vector:
        return {self.id(t): c for t, c in as_lincomb(lc).items()}


@dataclass
class SparseRowMatrix:
    ncols: int
    rows: List[Vector] = field(default_factory=list)

    def add_row(self, row: Mapping[int, Fraction]) -> None:
        r = {c: Fraction(a) for c, a in row.items() if a}
        if r:
            self.rows.append(r)

    def dedupe(self) -> "SparseRowMatrix":
        """Drop repeated rows, keeping first occurrences (order preserved)."""
        seen = set()
        out = []
        for r in self.rows:
            key = frozenset(r.items())
            if key not in seen:
                seen.add(key)
                out.append(r)
        return SparseRowMatrix(self.ncols, out)

    def to_matrix_market(self) -> str:
        return to_matrix_market(self.rows, self.ncols)


def build_relation_matrix(preset: str, n: int, huge: bool = False) -> SparseRowMatrix:
    """One row per multilinear consequence at arity ``n``, columns by :class:`MonomialIndex`."""
    cap = MAX_ARITY if huge else DEFAULT_ARITY_CAP
    if not 2 <= n <= cap:
        raise OracleSizeError(f"flat relation matrix supports arity 2..{cap}" + ("" if huge else " (use huge=True for 6)"))
    index = MonomialIndex(n)
    m = SparseRowMatrix(len(index))
    for lc in ids.multilinear_consequences(preset, n):
        m.add_row(index.vector(lc))
    return m.dedupe()


def rank_and_dim(m: SparseRowMatrix, n_cols: Optional[int] = None) -> Tuple[int, int]:
    ncols = m.ncols if n_cols is None else n_cols
    ech = Echelon()
    for r in m.rows:
        ech.add(r)
    return ech.rank, ncols - ech.rank


class FlatQuotient:
    """The flat route packaged with a finalized echelon form for projections."""

    def __init__(self, preset: str, n: int, huge: bool = False):
        self.preset = preset.upper()
        self.n = n
        self.index = MonomialIndex(n)
        self.matrix = build_relation_matrix(self.preset, n, huge=huge)
        self.echelon = Echelon()
        for r in self.matrix.rows:
            self.echelon.add(r)
        self.echelon.finalize()

    @property
    def rank(self) -> int:
        return self.echelon.rank

    @property
    def dim(self) -> int:
        return len(self.index) - self.echelon.rank

    def reduce(self, lc: Union[Term, LinComb]) -> Vector:
        return self.echelon.normal_form(self.index.vector(lc))


# --------------------------------------------------------------------------
# operadic route


Mdeg = Tuple[Tuple[int, int], ...]  # sorted (generator, multiplicity) pairs


def _mdeg_of_term(t: Term) -> Mdeg:
    return tuple(multidegree(t).items())


def _merge(a: Mdeg, b: Mdeg) -> Mdeg:
    d = dict(a)
    for g, m in b:
        d[g] = d.get(g, 0) + m
    return tuple(sorted(d.items()))


def _key(m: Mdeg) -> Tuple[int, ...]:
    return tuple(k for _, k in m)


def _sub_multisets(key: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
    for mu in itertools.product(*(range(k + 1) for k in key)):
        yield mu


def _compositions(key: Tuple[int, ...], k: int) -> Iterator[Tuple[Tuple[int, ...], ...]]:
    """Ordered sequences of ``k`` nonzero sub-multisets summing to ``key``."""
    total = sum(key)
    if k == 1:
        if total:
            yield (key,)
        return
    for mu in _sub_multisets(key):
        s = sum(mu)
        if s == 0 or total - s < k - 1:
            continue
        rest = tuple(a - b for a, b in zip(key, mu))
        for tail in _compositions(rest, k - 1):
            yield (mu,) + tail


def _as_mdeg(mu: Tuple[int, ...]) -> Mdeg:
    return tuple((g, m) for g, m in enumerate(mu, 1) if m)


@dataclass
class Level:
    """The quotient at one multidegree ``key`` on generators ``1 .. len(key)``."""

    key: Tuple[int, ...]
    blocks: List[Tuple[str, Tuple[int, ...]]]
    offsets: Dict[Tuple[str, Tuple[int, ...]], Tuple[int, int, int]]
    ncols: int
    nrows: int = 0
    free: List[int] = field(default_factory=list)
    echelon: Optional[Echelon] = None

    def __post_init__(self):
        self.free_index = {c: i for i, c in enumerate(self.free)}
        self._nf: Dict[int, Dict[int, Fraction]] = {}

    @property
    def dim(self) -> int:
        return len(self.free)

    @property
    def rank(self) -> int:
        return self.ncols - len(self.free)

    def nf_col(self, c: int) -> Dict[int, Fraction]:
        """Coordinates of raw column ``c`` in the level basis."""
        v = self._nf.get(c)
        if v is None:
            if self.echelon is None:  # the generator level
                v = {0: Fraction(1)}
            else:
                fi = self.free_index
                v = {fi[k]: a for k, a in self.echelon.column_normal_form(c).items()}
            self._nf[c] = v
        return v

    def reduce_raw(self, raw: Mapping[int, Fraction]) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for c, a in raw.items():
            axpy(out, a, self.nf_col(c))
        return out

    def locate(self, c: int) -> Tuple[str, Tuple[int, ...], int, int]:
        """Inverse of the column layout: ``(op, mu, left basis index, right basis index)``."""
        for (op, mu), (start, dl, dr) in self.offsets.items():
            if start <= c < start + dl * dr:
                i, j = divmod(c - start, dr)
                return op, mu, i, j
        raise IndexError(c)

    def __getstate__(self):
        d = dict(self.__dict__)
        d.pop("_nf", None)
        d.pop("free_index", None)
        return d

    def __setstate__(self, d):
        self.__dict__.update(d)
        self.__post_init__()


class OperadicQuotient:
    """Lazily built tower of :class:`Level` objects for one variety."""

    def __init__(self, preset: str, checkpoint_dir: Optional[str] = None):
        self.preset = preset.upper()
        self.identities = ids.preset_identities(self.preset)
        self.levels: Dict[Tuple[int, ...], Level] = {}
        self.checkpoint_dir = checkpoint_dir
        self._reps: Dict[Tuple[Tuple[int, ...], int], Term] = {}

    # ----- level construction

    def level(self, key: Tuple[int, ...]) -> Level:
        key = tuple(k for k in key if k)
        lv = self.levels.get(key)
        if lv is None:
            lv = self._load(key) or self._build(key)
            self.levels[key] = lv
        return lv

    def dim(self, key: Tuple[int, ...]) -> int:
        return self.level(key).dim

    def _layout(self, key):
        blocks = []
        offsets = {}
        col = 0
        for op in OPS:
            for mu in _sub_multisets(key):
                if sum(mu) == 0 or mu == key:
                    continue
                rest = tuple(a - b for a, b in zip(key, mu))
                dl = self.dim(mu)
                dr = self.dim(rest)
                if dl and dr:
                    blocks.append((op, mu))
                    offsets[(op, mu)] = (col, dl, dr)
                    col += dl * dr
        return blocks, offsets, col

    def _build(self, key: Tuple[int, ...]) -> Level:
        if sum(key) == 1:
            return Level(key, [], {}, 1, 0, [0], None)
        blocks, offsets, ncols = self._layout(key)
        lv = Level(key, blocks, offsets, ncols)
        self.levels[key] = lv  # allow eval below to resolve the layout
        ech = Echelon()
        nrows = 0
        seen = set()
        for row in self._relation_rows(key):
            fs = frozenset(row.items())
            if fs in seen:
                continue
            seen.add(fs)
            nrows += 1
            ech.add(row)
        ech.finalize()
        pivots = set(ech.rows)
        free = [c for c in range(ncols) if c not in pivots]
        lv = Level(key, blocks, offsets, ncols, nrows, free, ech)
        self.levels[key] = lv
        self._save(lv)
        return lv

    def _relation_rows(self, key) -> Iterator[Dict[int, Fraction]]:
        total = sum(key)
        for ident in self.identities:
            ph = ident.placeholders
            if len(ph) > total:
                continue
            terms = ident.relation.sorted_items()
            for parts in _compositions(key, len(ph)):
                mdegs = [_as_mdeg(mu) for mu in parts]
                ranges = [range(self.dim(mu)) for mu in parts]
                cache: Dict = {}
                for choice in itertools.product(*ranges):
                    env = {p: (m, {i: Fraction(1)}) for p, m, i in zip(ph, mdegs, choice)}
                    envkey = dict(zip(ph, choice))
                    row: Dict[int, Fraction] = {}
                    for t, cf in terms:
                        _, raw = self._eval_top(t, env, envkey, cache)
                        axpy(row, cf, raw)
                    if row:
                        yield row

    # ----- evaluation of terms into level coordinates

    def _combine(self, op, left, right, reduce=True):
        (ml, vl), (mr, vr) = left, right
        m = _merge(ml, mr)
        gens = [g for g, _ in m]
        dl_ = dict(ml)
        mu = tuple(dl_.get(g, 0) for g in gens)
        lv = self.level(_key(m))
        start, dl, dr = lv.offsets[(op, mu)]
        raw: Dict[int, Fraction] = {}
        for i, a in vl.items():
            base = start + i * dr
            for j, b in vr.items():
                raw[base + j] = a * b
        if reduce:
            return m, lv.reduce_raw(raw)
        return m, raw

    def _eval(self, t: Term, env, envkey, cache):
        if isinstance(t, Leaf):
            if t.index < 0:
                return env[t.index]
            return (((t.index, 1),), {0: Fraction(1)})
        ck = None
        if envkey is not None:
            ck = (t, tuple(sorted((p, envkey[p]) for p in set(leaves(t)) if p < 0)))
            hit = cache.get(ck)
            if hit is not None:
                return hit
        out = self._combine(t.op, self._eval(t.left, env, envkey, cache), self._eval(t.right, env, envkey, cache))
        if ck is not None:
            cache[ck] = out
        return out

    def _eval_top(self, t: Term, env=None, envkey=None, cache=None):
        if isinstance(t, Leaf):
            return self._eval(t, env, envkey, cache)
        if cache is None:
            cache = {}
        return self._combine(t.op, self._eval(t.left, env, envkey, cache), self._eval(t.right, env, envkey, cache), reduce=False)

    def coordinates(self, lc: Union[Term, LinComb]) -> Tuple[Optional[Mdeg], Dict[int, Fraction]]:
        """Multidegree and basis coordinates of a multihomogeneous combination."""
        lc = as_lincomb(lc)
        m0 = None
        out: Dict[int, Fraction] = {}
        for t, cf in lc.items():
            m, v = self._eval(t, {}, None, {})
            if m0 is None:
                m0 = m
            elif m != m0:
                raise ValueError("combination is not multihomogeneous")
            axpy(out, cf, v)
        return m0, out

    def is_zero(self, lc: Union[Term, LinComb]) -> bool:
        """Whether ``lc`` vanishes in the free algebra of the variety."""
        lc = as_lincomb(lc)
        groups: Dict[Mdeg, Dict[Term, Fraction]] = {}
        for t, cf in lc.items():
            groups.setdefault(_mdeg_of_term(t), {})[t] = cf
        return all(not self.coordinates(LinComb(g))[1] for g in groups.values())

    def representative(self, key: Tuple[int, ...], i: int) -> Term:
        """A monomial on ``x1 .. x_len(key)`` whose class is basis element ``i``."""
        r = self._reps.get((key, i))
        if r is not None:
            return r
        lv = self.level(key)
        if lv.echelon is None:
            r = Leaf(1)
        else:
            op, mu, a, b = lv.locate(lv.free[i])
            rest = tuple(p - q for p, q in zip(key, mu))
            left = _embed(self.representative(_key(_as_mdeg(mu)), a), mu)
            right = _embed(self.representative(_key(_as_mdeg(rest)), b), rest)
            r = Node(op, left, right)
        self._reps[(key, i)] = r
        return r

    # ----- checkpoints

    def _path(self, key):
        return os.path.join(self.checkpoint_dir, f"{self.preset}-{'-'.join(map(str, key))}.pickle")

    def _load(self, key) -> Optional[Level]:
        if not self.checkpoint_dir:
            return None
        p = self._path(key)
        if not os.path.exists(p):
            return None
        with open(p, "rb") as fh:
            return pickle.load(fh)

    def _save(self, lv: Level) -> None:
        if not self.checkpoint_dir:
            return
        os.makedirs(self.checkpoint_dir, exist_ok=True)
        p = self._path(lv.key)
        tmp = p + ".tmp"
        with open(tmp, "wb") as fh:
            pickle.dump(lv, fh, protocol=pickle.HIGHEST_PROTOCOL)
        os.replace(tmp, p)


def _embed(t: Term, mu: Tuple[int, ...]) -> Term:
    """Relabel a representative on ``1..r`` into the generators used by ``mu``."""
    gens = [g for g, m in enumerate(mu, 1) if m]
    mapping = {k: g for k, g in enumerate(gens, 1)}
    return relabel(t, mapping)


_QUOTIENTS: Dict[str, OperadicQuotient] = {}


def operadic(preset: str) -> OperadicQuotient:
    """Shared quotient tower for a preset (levels are cached for the process)."""
    p = preset.upper()
    q = _QUOTIENTS.get(p)
    if q is None:
        q = _QUOTIENTS[p] = OperadicQuotient(p)
    return q


# --------------------------------------------------------------------------
# public entry points


def _check_arity(n: int, huge: bool) -> None:
    cap = MAX_ARITY if huge else DEFAULT_ARITY_CAP
    if not 1 <= n <= cap:
        raise OracleSizeError(f"arity {n} outside 1..{cap}" + ("" if huge else "; arity 6 needs huge mode"))


def dimension(preset: str, n: int, method: str = "operadic", huge: bool = False,
              checkpoint_dir: Optional[str] = None) -> int:
    """``dim P(n)`` for the variety ``preset`` (``MTP`` or ``MFM``)."""
    _check_arity(n, huge)
    if method == "flat":
        if n == 1:
            return 1
        return FlatQuotient(preset, n, huge=huge).dim
    if method != "operadic":
        raise ValueError(f"unknown method {method!r}")
    q = OperadicQuotient(preset, checkpoint_dir=checkpoint_dir) if checkpoint_dir else operadic(preset)
    return q.dim((1,) * n)


def graded_dimension(preset: str, multideg: Mapping[int, int]) -> int:
    md = {g: m for g, m in multideg.items() if m}
    if any(m < 0 for m in multideg.values()) or not md:
        raise ValueError("multidegree must be a nonzero map to nonnegative multiplicities")
    if sum(md.values()) > GRADED_MAX_DEGREE or len(md) > GRADED_MAX_GENERATORS:
        raise OracleSizeError(
            f"graded slices are limited to total degree {GRADED_MAX_DEGREE} and {GRADED_MAX_GENERATORS} generators"
        )
    key = tuple(m for _, m in sorted(md.items()))
    return operadic(preset).dim(key)


def in_relation_span(preset: str, lc: Union[Term, LinComb], method: str = "operadic") -> bool:
    """Whether ``lc`` lies in the span of the variety's consequences."""
    lc = as_lincomb(lc)
    if not lc:
        return True
    if method == "operadic":
        return operadic(preset).is_zero(lc)
    if method != "flat":
        raise ValueError(f"unknown method {method!r}")
    n = max(t.degree for t in lc)
    return not FlatQuotient(preset, n).reduce(lc)


@dataclass
class Dependence:
    """An explicit combination of candidates that vanishes in the quotient."""

    coefficients: Dict[int, Fraction]
    candidates: List[Term]

    @property
    def combination(self) -> LinComb:
        return LinComb((self.candidates[i], c) for i, c in self.coefficients.items())

    def verify(self, preset: str, method: str = "operadic") -> bool:
        return bool(self.coefficients) and in_relation_span(preset, self.combination, method=method)


@dataclass
class Deficient:
    """Candidates are independent but do not span: ``found < dim``."""

    found: int
    dim: int


@dataclass
class CertifiedBasis:
    """Candidates form a basis; :meth:`project` expresses any term in it."""

    candidates: List[Term]
    _coords: object  # callable: LinComb -> Vector in quotient coordinates
    _tracker: TrackedEchelon

    def project(self, t: Union[Term, LinComb]) -> LinComb:
        v = self._coords(t)
        combo = self._tracker.coordinates(v)
        if combo is None:  # cannot happen for a spanning family
            raise AssertionError("projection outside the certified span")
        return LinComb((self.candidates[i], c) for i, c in combo.items())

    def projection_map(self, monomials: Iterable[Term]) -> Dict[Term, LinComb]:
        return {t: self.project(t) for t in monomials}


ProjectionResult = Union[CertifiedBasis, Dependence, Deficient]


def canonical_projection(preset: str, n: int, candidates: Sequence[Union[Term, int]],
                         method: str = "operadic") -> ProjectionResult:
    """Certify a candidate basis of the arity-``n`` component, or refute it.

    ``candidates`` are multilinear terms on ``x1 .. xn`` or their
    :class:`MonomialIndex` ids.
    """
    index = MonomialIndex(n)
    terms = [index.term(c) if isinstance(c, int) else c for c in candidates]
    if method == "operadic":
        q = operadic(preset)
        coords = lambda t: q.coordinates(t)[1]
        dim = q.dim((1,) * n)
    elif method == "flat":
        fq = FlatQuotient(preset, n)
        coords = fq.reduce
        dim = fq.dim
    else:
        raise ValueError(f"unknown method {method!r}")
    te = TrackedEchelon()
    for i, t in enumerate(terms):
        dep = te.add(i, coords(t))
        if dep is not None:
            return Dependence(dep, terms)
    if len(terms) != dim:
        return Deficient(len(terms), dim)
    return CertifiedBasis(terms, coords, te)


def relation_matrix_market(preset: str, n: int) -> str:
    return build_relation_matrix(preset, n).to_matrix_market()
