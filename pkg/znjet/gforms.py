#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
微分形式とベクトル場。

微分 du^a は次数 deg(u^a) に N 次数 1 を足した生成元として扱う。
拡張した次数ビット (bit n) を付ければ、単項式の並べ替えの符号が
そのまま Deligne の符号規則になる。係数は語の右側に置く。
"""
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from logging import getLogger
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from znjet.errors import (ArgumentError, CapError, DegreeError,
                          NoPotentialError, NotClosedError, RingError,
                          UnsupportedVariableError)
from znjet.glinalg import rational_rank, solve_rational
from znjet.gmorphism import Domain, Morphism
from znjet.grading import CoordinateSystem, Degree, pair_bits
from znjet.gseries import (Exps, JetAlgebra, Series, _compositions, _merge,
                           integrate, partial, set_zero, twist)

logger = getLogger(__name__)


@lru_cache(maxsize=None)
def _generators(algebra: JetAlgebra) -> Tuple[Tuple[int, ...], Tuple[bool, ...]]:
    """du^a の拡張次数と、(du^a)^2 = 0 かどうか (偶座標のとき)"""
    top = 1 << algebra.n
    masks = tuple(m | top for m in algebra.masks)
    nilpotent = tuple(not nil for nil in algebra.nilpotent)
    return masks, nilpotent


def _word_mask(algebra: JetAlgebra, word: Exps) -> int:
    mask = 0
    for e, m in zip(word, algebra.masks):
        if e & 1:
            mask ^= m
    return mask


def _unit_word(size: int, i: int) -> Exps:
    word = [0] * size
    word[i] = 1
    return tuple(word)


def words(algebra: JetAlgebra, k: int) -> Tuple[Exps, ...]:
    """N 次数 k の標準の語"""
    return _compositions(_generators(algebra)[1], k)


class Form:
    """
    微分形式。terms は 語 (du の指数タプル) → 係数の Series 。
    """
    __slots__ = ('algebra', 'form_cap', 'terms')

    def __init__(self, algebra: JetAlgebra, form_cap: int,
                 terms: Optional[Dict[Sequence[int], Series]] = None):
        if form_cap < 0:
            raise ArgumentError(f'form_cap must be non-negative, got {form_cap}')
        self.algebra = algebra
        self.form_cap = form_cap
        _, gnil = _generators(algebra)
        clean: Dict[Exps, Series] = {}
        for word, coef in (terms or {}).items():
            word = tuple(word)
            if len(word) != algebra.size or any(e < 0 for e in word):
                raise ArgumentError(f'bad wedge word {word}')
            if coef.algebra != algebra:
                raise RingError('form coefficient from another jet algebra')
            if any(e > 1 and nil for e, nil in zip(word, gnil)):
                continue
            if coef.is_zero():
                continue
            if sum(word) > form_cap:
                raise CapError(f'wedge word of N-degree {sum(word)} exceeds form_cap {form_cap}')
            total = clean[word] + coef if word in clean else coef
            if total.is_zero():
                clean.pop(word, None)
            else:
                clean[word] = total
        self.terms = clean

    @classmethod
    def _raw(cls, algebra: JetAlgebra, form_cap: int, terms: Dict[Exps, Series]) -> 'Form':
        obj = cls.__new__(cls)
        obj.algebra = algebra
        obj.form_cap = form_cap
        obj.terms = {w: c for w, c in terms.items() if not c.is_zero()}
        return obj

    @classmethod
    def from_series(cls, f: Series, form_cap: Optional[int] = None) -> 'Form':
        cap = f.algebra.cap if form_cap is None else form_cap
        return cls(f.algebra, cap, {(0,) * f.algebra.size: f})

    @classmethod
    def generator(cls, algebra: JetAlgebra, name: Union[str, int],
                  form_cap: Optional[int] = None) -> 'Form':
        i = algebra.coords.index(name)
        cap = algebra.cap if form_cap is None else form_cap
        return cls(algebra, cap, {_unit_word(algebra.size, i): algebra.one()})

    def zero_like(self) -> 'Form':
        return Form._raw(self.algebra, self.form_cap, {})

    def is_zero(self) -> bool:
        return not self.terms

    def n_degrees(self) -> set:
        return {sum(w) for w in self.terms}

    def max_n_degree(self) -> int:
        return max(self.n_degrees(), default=-1)

    def max_coefficient_degree(self) -> int:
        return max((c.max_total() for c in self.terms.values()), default=-1)

    def degree(self) -> Optional[Degree]:
        """Z2^n 次数 (斉次でなければ None)"""
        masks = set()
        for w, c in self.terms.items():
            wm = _word_mask(self.algebra, w)
            masks.update(m ^ wm for m in c.masks())
        if len(masks) != 1:
            return None
        return Degree(self.algebra.n, masks.pop())

    def weight_parts(self) -> Dict[Tuple[int, int], 'Form']:
        """(N 次数, 重み) ごとの成分。重みは係数の次数 + 語の次数"""
        parts: Dict[Tuple[int, int], Dict[Exps, Series]] = defaultdict(dict)
        for w, c in self.terms.items():
            k = sum(w)
            for total in sorted({sum(e) for e in c.terms}):
                parts[(k, k + total)][w] = c.of_total(total)
        return {key: Form._raw(self.algebra, self.form_cap, t) for key, t in sorted(parts.items())}

    def _check(self, other: 'Form'):
        if self.algebra != other.algebra:
            raise RingError('forms over different jet algebras')
        if self.form_cap != other.form_cap:
            raise RingError(f'forms with different form_cap {self.form_cap} and {other.form_cap}')

    def __add__(self, other: 'Form') -> 'Form':
        self._check(other)
        terms = dict(self.terms)
        for w, c in other.terms.items():
            terms[w] = terms[w] + c if w in terms else c
        return Form._raw(self.algebra, self.form_cap, terms)

    def __neg__(self) -> 'Form':
        return Form._raw(self.algebra, self.form_cap, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: 'Form') -> 'Form':
        return self + (-other)

    def scale(self, c) -> 'Form':
        return Form._raw(self.algebra, self.form_cap, {w: v.scale(c) for w, v in self.terms.items()})

    def rmul(self, h: Series) -> 'Form':
        """右から関数をかける: (w·f)·h = w·(fh)"""
        return Form._raw(self.algebra, self.form_cap, {w: c * h for w, c in self.terms.items()})

    def truncate(self, k: int) -> 'Form':
        """係数を総次数 k 以下に切る"""
        return Form._raw(self.algebra, self.form_cap,
                         {w: c.truncate(k) for w, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.algebra == other.algebra and self.terms == other.terms

    __hash__ = None

    def word_text(self, word: Exps) -> str:
        factors = []
        for name, e in zip(self.algebra.coords.names, word):
            if e == 1:
                factors.append(f'd({name})')
            elif e > 1:
                factors.append(f'd({name})^{e}')
        return '*'.join(factors)

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f'Form({to_text(self)!r})'


def to_text(omega: Form) -> str:
    """例: d(x)*d(z)^2*(x^2 - z) + (1)"""
    if not omega.terms:
        return '0'
    parts = []
    for word in sorted(omega.terms, key=lambda w: (sum(w), tuple(-e for e in w))):
        coef = omega.terms[word]
        text = omega.word_text(word)
        if not text:
            parts.append(f'({coef})')
        elif coef == 1:
            parts.append(text)
        else:
            parts.append(f'{text}*({coef})')
    return ' + '.join(parts)


def differential(f: Series, form_cap: Optional[int] = None) -> Form:
    """df = Σ du^i ∂_i f"""
    cap = f.algebra.cap if form_cap is None else form_cap
    if cap < 1:
        raise CapError('differential needs form_cap >= 1')
    size = f.algebra.size
    return Form(f.algebra, cap, {_unit_word(size, i): partial(f, i) for i in range(size)})


def wedge(alpha: Form, beta: Form) -> Form:
    """
    (w1·f)∧(w2·g) = s(deg f, deg w2) (w1 w2)·fg 。語の並べ替えは拡張次数で符号を決める。
    """
    alpha._check(beta)
    if alpha.terms and beta.terms and alpha.max_n_degree() + beta.max_n_degree() > alpha.form_cap:
        raise CapError(f'wedge product exceeds form_cap {alpha.form_cap}')
    algebra = alpha.algebra
    gmasks, gnil = _generators(algebra)
    acc: Dict[Exps, Series] = {}
    for w2, g in beta.terms.items():
        m2 = _word_mask(algebra, w2)
        for w1, f in alpha.terms.items():
            merged = _merge(w1, w2, gmasks, gnil)
            if merged is None:
                continue
            sign, word = merged
            term = twist(f, m2) * g
            if sign < 0:
                term = -term
            acc[word] = acc[word] + term if word in acc else term
    return Form._raw(algebra, alpha.form_cap, acc)


def wedge_power(alpha: Form, k: int) -> Form:
    result = Form.from_series(alpha.algebra.one(), alpha.form_cap)
    for _ in range(k):
        result = wedge(result, alpha)
    return result


def exterior_derivative(omega: Form) -> Form:
    """
    dω = Σ (-1)^{|w|} (w ∧ du^i) ∂_i f 。
    """
    if omega.terms and omega.max_n_degree() + 1 > omega.form_cap:
        raise CapError(
            f'exterior derivative of a {omega.max_n_degree()}-form exceeds form_cap {omega.form_cap}')
    algebra = omega.algebra
    gmasks, gnil = _generators(algebra)
    size = algebra.size
    acc: Dict[Exps, Series] = {}
    for word, f in omega.terms.items():
        outer = -1 if sum(word) % 2 else 1
        for i in range(size):
            df = partial(f, i)
            if df.is_zero():
                continue
            merged = _merge(word, _unit_word(size, i), gmasks, gnil)
            if merged is None:
                continue
            sign, new = merged
            term = df if sign * outer > 0 else -df
            acc[new] = acc[new] + term if new in acc else term
    return Form._raw(algebra, omega.form_cap, acc)


def form_pullback(phi: Morphism, omega: Form) -> Form:
    """
    Φ*(dv^I · f) = d(φ*v)^I · φ*(f)
    """
    if omega.algebra != phi.target.algebra:
        raise RingError('form is not defined on the target of the morphism')
    source = phi.source.algebra
    cap = omega.form_cap
    diffs = [differential(f, cap) if cap >= 1 else None for f in phi.pullbacks]
    result = Form._raw(source, cap, {})
    for word, f in omega.terms.items():
        piece = Form.from_series(source.one(), cap)
        for i, e in enumerate(word):
            for _ in range(e):
                piece = wedge(piece, diffs[i])
        result = result + piece.rmul(phi.pullback(f))
    return result


def restrict_zero(omega: Form, eta: Union[str, int]) -> Form:
    """s*π*ω: η ↦ 0 とし、dη を含む語を捨てる"""
    i = omega.algebra.coords.index(eta)
    return Form._raw(omega.algebra, omega.form_cap,
                     {w: set_zero(c, i) for w, c in omega.terms.items() if not w[i]})


def homotopy_K(omega: Form, eta: Union[str, int]) -> Form:
    """
    偶パリティ・非零次数の座標 η に沿ったホモトピー作用素。
    dη を含まない項は 0 。w'∧dη·f は w'·F (F は η についての原始関数) 。
    """
    algebra = omega.algebra
    i = algebra.coords.index(eta)
    degree = algebra.coords.degrees[i]
    name = algebra.coords.names[i]
    if degree.is_zero() or degree.parity:
        raise UnsupportedVariableError(
            f'homotopy operator needs an even nonzero-degree coordinate, {name} has degree {degree}')
    if omega.max_coefficient_degree() > algebra.cap - 1:
        raise CapError(f'homotopy operator needs coefficients of degree <= cap-1 = {algebra.cap - 1}')
    if omega.terms and omega.max_n_degree() + 1 > omega.form_cap:
        raise CapError(f'homotopy operator needs N-degree <= form_cap-1 = {omega.form_cap - 1}')
    gmasks, _ = _generators(algebra)
    acc: Dict[Exps, Series] = {}
    for word, f in omega.terms.items():
        if not word[i]:
            continue
        # dη を語の末尾へ動かす
        negative = False
        for g in range(i + 1, algebra.size):
            if word[g] & 1 and pair_bits(gmasks[i], gmasks[g]):
                negative = not negative
        rest = word[:i] + (0,) + word[i + 1:]
        term = integrate(f, i)
        if negative:
            term = -term
        acc[rest] = acc[rest] + term if rest in acc else term
    return Form._raw(algebra, omega.form_cap, acc)


# ---- ベクトル場 ----
class VectorField:
    """Σ a^b ∂_b"""
    __slots__ = ('algebra', 'coefficients')

    def __init__(self, algebra: JetAlgebra, coefficients: Sequence[Series]):
        coefficients = tuple(coefficients)
        if len(coefficients) != algebra.size:
            raise ArgumentError(f'vector field needs {algebra.size} coefficients, got {len(coefficients)}')
        for a in coefficients:
            if a.algebra != algebra:
                raise RingError('vector field coefficient from another jet algebra')
        self.algebra = algebra
        self.coefficients = coefficients

    @classmethod
    def coordinate(cls, algebra: JetAlgebra, name: Union[str, int]) -> 'VectorField':
        i = algebra.coords.index(name)
        return cls(algebra, [algebra.one() if j == i else algebra.zero() for j in range(algebra.size)])

    def degree(self) -> Optional[Degree]:
        """斉次ならその次数、零なら次数 0 、非斉次なら None"""
        masks = set()
        for a, m in zip(self.coefficients, self.algebra.masks):
            masks.update(x ^ m for x in a.masks())
        if not masks:
            return Degree.zero(self.algebra.n)
        if len(masks) != 1:
            return None
        return Degree(self.algebra.n, masks.pop())

    def __add__(self, other: 'VectorField') -> 'VectorField':
        return VectorField(self.algebra, [a + b for a, b in zip(self.coefficients, other.coefficients)])

    def __sub__(self, other: 'VectorField') -> 'VectorField':
        return VectorField(self.algebra, [a - b for a, b in zip(self.coefficients, other.coefficients)])

    def scale(self, c) -> 'VectorField':
        return VectorField(self.algebra, [a.scale(c) for a in self.coefficients])

    def lmul(self, h: Series) -> 'VectorField':
        """h·X"""
        return VectorField(self.algebra, [h * a for a in self.coefficients])

    def truncate(self, k: int) -> 'VectorField':
        return VectorField(self.algebra, [a.truncate(k) for a in self.coefficients])

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.coefficients)

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.algebra == other.algebra and self.coefficients == other.coefficients

    __hash__ = None

    def __str__(self):
        body = ' ; '.join(f'{name} := {a}' for name, a in zip(self.algebra.coords.names,
                                                             self.coefficients))
        return '{ ' + body + ' }'


def apply(x: VectorField, f: Series) -> Series:
    """Xf = Σ a^b ∂_b f"""
    if x.algebra != f.algebra:
        raise RingError('vector field and series over different jet algebras')
    result = f.algebra.zero()
    for b, a in enumerate(x.coefficients):
        if not a.is_zero():
            result = result + a * partial(f, b)
    return result


def pair(x: VectorField, omega: Form) -> Series:
    """
    (Σ a^b ∂_b, Σ du^i·g_i) = Σ a^i g_i 。(X, df) = Xf になる。
    """
    if x.algebra != omega.algebra:
        raise RingError('vector field and form over different jet algebras')
    if any(sum(w) != 1 for w in omega.terms):
        raise DegreeError('evaluation pairing is defined for 1-forms only')
    result = x.algebra.zero()
    for word, g in omega.terms.items():
        result = result + x.coefficients[word.index(1)] * g
    return result


def bracket(x: VectorField, y: VectorField) -> VectorField:
    """[X,Y] = XY - (-1)^<deg X, deg Y> YX"""
    dx, dy = x.degree(), y.degree()
    if dx is None or dy is None:
        raise DegreeError('bracket needs homogeneous vector fields')
    sign = -1 if dx.pairing(dy) else 1
    coefficients = []
    for b in range(x.algebra.size):
        coefficients.append(apply(x, y.coefficients[b]) - apply(y, x.coefficients[b]).scale(sign))
    return VectorField(x.algebra, coefficients)


def tangent_vector_at_basepoint(x: VectorField) -> List[Fraction]:
    """X|_m = ev∘ε∘X: 各成分 ε(a^b)"""
    return [a.epsilon() for a in x.coefficients]


def cotangent_vector_at_basepoint(omega: Form) -> List[Fraction]:
    """1-形式の係数の ε"""
    if any(sum(w) != 1 for w in omega.terms):
        raise DegreeError('cotangent vector needs a 1-form')
    out = [Fraction(0)] * omega.algebra.size
    for word, g in omega.terms.items():
        out[word.index(1)] = g.epsilon()
    return out


# ---- de Rham 複体の重み分解 ----
def chain_basis(algebra: JetAlgebra, k: int, w: int) -> List[Tuple[Exps, Exps]]:
    """C^k_w の基底 (語, 単項式)"""
    if w < k:
        return []
    return [(word, mono) for word in words(algebra, k) for mono in algebra.monomials(w - k)]


def _d_matrix(algebra: JetAlgebra, k: int, w: int) -> np.ndarray:
    """d: C^k_w → C^{k+1}_w の表現行列"""
    source = chain_basis(algebra, k, w)
    target = chain_basis(algebra, k + 1, w)
    index = {b: r for r, b in enumerate(target)}
    mat = np.empty((len(target), len(source)), dtype=object)
    mat.fill(Fraction(0))
    for col, (word, mono) in enumerate(source):
        basis = Form(algebra, k + 1, {word: Series(algebra, {mono: 1})})
        for w2, g in exterior_derivative(basis).terms.items():
            for m2, c in g.terms.items():
                mat[index[(w2, m2)], col] = c
    return mat


def _derham_cell(coords: CoordinateSystem, k: int, w: int) -> Tuple[int, int, int, int]:
    """(k, w, dim C^k_w, rank d_k)"""
    algebra = JetAlgebra(coords, max(w, 0))
    dim = len(chain_basis(algebra, k, w))
    rank = rational_rank(_d_matrix(algebra, k, w)) if dim else 0
    return k, w, dim, rank


@dataclass(frozen=True)
class DeRhamCell:
    k: int
    w: int
    dim: int
    rank: int
    h: int


@dataclass(frozen=True)
class DeRhamTable:
    domain: str
    k_max: int
    w_max: int
    cells: Tuple[DeRhamCell, ...]

    def total(self, k: int) -> int:
        return sum(c.h for c in self.cells if c.k == k)

    def totals(self) -> List[int]:
        return [self.total(k) for k in range(self.k_max + 1)]


def derham_ranks(domain: Domain, k_max: int, w_max: int, n_jobs: int = 1,
                 progress=None) -> DeRhamTable:
    """
    重み w ごとの有限次元部分複体で H^k_w = dim C^k_w - rank d_k - rank d_{k-1} 。
    """
    if k_max < 0 or w_max < 0:
        raise ArgumentError('k_max and w_max must be non-negative')
    jobs = [(k, w) for w in range(w_max + 1) for k in range(k_max + 1)]
    if progress is not None:
        jobs = progress(jobs)
    results = Parallel(n_jobs=n_jobs)(
        delayed(_derham_cell)(domain.coords, k, w) for k, w in jobs)
    by_key = {(k, w): (dim, rank) for k, w, dim, rank in results}
    cells = []
    for k in range(k_max + 1):
        for w in range(w_max + 1):
            dim, rank = by_key[(k, w)]
            prev = by_key[(k - 1, w)][1] if k > 0 else 0
            h = dim - rank - prev
            logger.debug('H^%d_%d: dim=%d rank=%d prev=%d -> %d', k, w, dim, rank, prev, h)
            cells.append(DeRhamCell(k, w, dim, rank, h))
    return DeRhamTable(domain.name or domain.dimension_text(), k_max, w_max, tuple(cells))


def find_potential(omega: Form) -> Form:
    """
    閉形式 ω について dη = ω となる η を重みごとの連立一次方程式で求める (自由変数は 0) 。
    """
    algebra = omega.algebra
    if not exterior_derivative(omega).is_zero():
        raise NotClosedError('form is not closed')
    potential = omega.zero_like()
    for (k, w), part in omega.weight_parts().items():
        if k == 0:
            raise NoPotentialError(f'weight-{w} component of degree 0 has no potential (constants)')
        if w - k + 1 > algebra.cap:
            raise CapError(f'potential of the weight-{w} component needs cap >= {w - k + 1}')
        rows = chain_basis(algebra, k, w)
        cols = chain_basis(algebra, k - 1, w)
        index = {b: r for r, b in enumerate(rows)}
        rhs = [Fraction(0)] * len(rows)
        for word, g in part.terms.items():
            for mono, c in g.terms.items():
                rhs[index[(word, mono)]] = c
        solution = solve_rational(_d_matrix(algebra, k - 1, w), rhs)
        if solution is None:
            raise NoPotentialError(f'no potential found for the weight-{w} component')
        terms: Dict[Exps, Dict[Exps, Fraction]] = defaultdict(dict)
        for (word, mono), c in zip(cols, solution):
            if c:
                terms[word][mono] = c
        potential = potential + Form(algebra, omega.form_cap,
                                     {word: Series(algebra, t) for word, t in terms.items()})
    return potential
