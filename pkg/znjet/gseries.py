#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
打ち切り Z2^n 次数付き形式的冪級数環 (原点でのジェット) 。

単項式は座標順の指数タプル。奇パリティ座標の指数は 1 以下で、
総次数が cap を超える単項式は捨てる。係数は Fraction 。
"""
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from znjet.errors import (ArgumentError, ArityError, BasepointError,
                          DegreeError, DimensionError, NonUnitError,
                          RingError, UnsupportedVariableError)
from znjet.grading import CoordinateSystem, Degree, pair_bits

Exps = Tuple[int, ...]
Scalar = Union[int, Fraction]
INFINITY = float('inf')


@lru_cache(maxsize=None)
def _compositions(nilpotent: Tuple[bool, ...], total: int) -> Tuple[Exps, ...]:
    """nilpotent[i] なら指数 1 以下、合計 total の指数タプルを全部返す"""
    if not nilpotent:
        return ((),) if total == 0 else ()
    head_max = 1 if nilpotent[0] else total
    result = []
    for head in range(min(head_max, total), -1, -1):
        for tail in _compositions(nilpotent[1:], total - head):
            result.append((head,) + tail)
    return tuple(result)


@dataclass(frozen=True)
class JetAlgebra:
    """
    座標系 coords と打ち切り次数 cap で決まるジェット環。
    """
    coords: CoordinateSystem
    cap: int
    masks: Tuple[int, ...] = field(init=False, compare=False, repr=False)
    nilpotent: Tuple[bool, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.cap, int) or self.cap < 0:
            raise ArgumentError(f'cap must be a non-negative integer, got {self.cap}')
        object.__setattr__(self, 'masks', self.coords.masks)
        object.__setattr__(self, 'nilpotent',
                           tuple(bool(d.parity) for d in self.coords.degrees))

    @property
    def n(self) -> int:
        return self.coords.n

    @property
    def size(self) -> int:
        return self.coords.size

    def with_cap(self, cap: int) -> 'JetAlgebra':
        return JetAlgebra(self.coords, cap)

    def zero(self) -> 'Series':
        return Series(self)

    def one(self) -> 'Series':
        return self.constant(1)

    def constant(self, c: Scalar) -> 'Series':
        return Series(self, {(0,) * self.size: c})

    def coordinate(self, name: Union[str, int]) -> 'Series':
        i = self.coords.index(name)
        exps = [0] * self.size
        exps[i] = 1
        return Series(self, {tuple(exps): 1})

    def coordinates(self) -> List['Series']:
        return [self.coordinate(i) for i in range(self.size)]

    def monomials(self, total: int) -> Tuple[Exps, ...]:
        """総次数 total の標準単項式 (cap は見ない)"""
        if total < 0:
            return ()
        return _compositions(self.nilpotent, total)

    def monomial_mask(self, exps: Exps) -> int:
        mask = 0
        for e, m in zip(exps, self.masks):
            if e & 1:
                mask ^= m
        return mask

    def monomial_text(self, exps: Exps) -> str:
        factors = []
        for name, e in zip(self.coords.names, exps):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f'{name}^{e}')
        return '*'.join(factors)

    def __str__(self):
        return f'n={self.n} cap={self.cap} coords {self.coords}'


def _text_key(exps: Exps):
    return (sum(exps), tuple(-e for e in exps))


class Series:
    """
    ジェット環の元。terms は 指数タプル → 非零の Fraction 。
    値として扱い、演算は常に新しい Series を返す。
    """
    __slots__ = ('algebra', 'terms')

    def __init__(self, algebra: JetAlgebra, terms: Optional[Dict[Sequence[int], Scalar]] = None):
        self.algebra = algebra
        clean: Dict[Exps, Fraction] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != algebra.size:
                raise ArgumentError(
                    f'monomial {exps} does not match {algebra.size} coordinates')
            if any(e < 0 for e in exps):
                raise ArgumentError(f'negative exponent in {exps}')
            # θ^2 = 0 と cap 超えは黙って捨てる
            if sum(exps) > algebra.cap:
                continue
            if any(e > 1 and nil for e, nil in zip(exps, algebra.nilpotent)):
                continue
            value = clean.get(exps, Fraction(0)) + Fraction(c)
            if value:
                clean[exps] = value
            else:
                clean.pop(exps, None)
        self.terms = clean

    @classmethod
    def _raw(cls, algebra: JetAlgebra, terms: Dict[Exps, Fraction]) -> 'Series':
        obj = cls.__new__(cls)
        obj.algebra = algebra
        obj.terms = {k: v for k, v in terms.items() if v}
        return obj

    # ---- 比較・基本情報 ----
    def _coerce(self, other) -> 'Series':
        if isinstance(other, Series):
            if other.algebra != self.algebra:
                raise RingError('series belong to different jet algebras')
            return other
        if isinstance(other, (int, Fraction)):
            return self.algebra.constant(other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.algebra.constant(other)
        if not isinstance(other, Series):
            return NotImplemented
        return self.algebra == other.algebra and self.terms == other.terms

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def masks(self) -> set:
        return {self.algebra.monomial_mask(e) for e in self.terms}

    def degree(self) -> Optional[Degree]:
        """斉次ならその次数、零または非斉次なら None"""
        masks = self.masks()
        if len(masks) != 1:
            return None
        return Degree(self.algebra.n, masks.pop())

    def is_homogeneous_bits(self, bits: int) -> bool:
        return all(self.algebra.monomial_mask(e) == bits for e in self.terms)

    def epsilon(self) -> Fraction:
        return self.terms.get((0,) * self.algebra.size, Fraction(0))

    def max_total(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def truncate(self, k: int) -> 'Series':
        """総次数 k 以下の部分"""
        return Series._raw(self.algebra, {e: c for e, c in self.terms.items() if sum(e) <= k})

    def of_total(self, k: int) -> 'Series':
        return Series._raw(self.algebra, {e: c for e, c in self.terms.items() if sum(e) == k})

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    # ---- 環演算 ----
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return Series._raw(self.algebra, terms)

    __radd__ = __add__

    def __neg__(self):
        return Series._raw(self.algebra, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c: Scalar) -> 'Series':
        c = Fraction(c)
        return Series._raw(self.algebra, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ArgumentError(f'exponent must be a non-negative integer, got {k}')
        result = self.algebra.one()
        for _ in range(k):
            result = result * self
        return result

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f'Series({to_text(self)!r})'


def _merge(e1: Exps, e2: Exps, masks: Tuple[int, ...],
           nilpotent: Tuple[bool, ...]) -> Optional[Tuple[int, Exps]]:
    """
    標準形の単項式 e1 と e2 の積を標準形に並べ替える。
    (符号, 指数) を返し、奇座標が 2 乗になれば None 。
    e2 の j 番目の因子は e1 の j より後ろの因子を追い越す。
    """
    sign = 0
    acc = 0
    out = [0] * len(e1)
    for j in range(len(e1) - 1, -1, -1):
        a = e1[j]
        b = e2[j]
        if b & 1 and acc and pair_bits(acc, masks[j]):
            sign ^= 1
        if a & 1:
            acc ^= masks[j]
        s = a + b
        if s > 1 and nilpotent[j]:
            return None
        out[j] = s
    return (-1 if sign else 1), tuple(out)


def _mul(f: Series, g: Series) -> Series:
    algebra = f.algebra
    cap = algebra.cap
    masks = algebra.masks
    nilpotent = algebra.nilpotent
    acc: Dict[Exps, Fraction] = defaultdict(Fraction)
    g_items = [(e, c, sum(e)) for e, c in g.terms.items()]
    for e1, c1 in f.terms.items():
        t1 = sum(e1)
        for e2, c2, t2 in g_items:
            if t1 + t2 > cap:
                continue
            merged = _merge(e1, e2, masks, nilpotent)
            if merged is None:
                continue
            sign, exps = merged
            acc[exps] += sign * c1 * c2
    return Series._raw(algebra, acc)


def _same_algebra(f: Series, g: Series):
    if f.algebra != g.algebra:
        raise RingError('series belong to different jet algebras')


def mul(f: Series, g: Series) -> Series:
    _same_algebra(f, g)
    return _mul(f, g)


def add(f: Series, g: Series) -> Series:
    _same_algebra(f, g)
    return f + g


def scale(c: Scalar, f: Series) -> Series:
    return f.scale(c)


def partial(f: Series, c: Union[str, int]) -> Series:
    """
    左からの座標微分 ∂_c 。左にある因子の次数の和を D として (-1)^<deg c, D> がかかる。
    """
    algebra = f.algebra
    i = algebra.coords.index(c)
    masks = algebra.masks
    acc: Dict[Exps, Fraction] = defaultdict(Fraction)
    for exps, coef in f.terms.items():
        k = exps[i]
        if not k:
            continue
        left = 0
        for e, m in zip(exps[:i], masks[:i]):
            if e & 1:
                left ^= m
        sign = -1 if pair_bits(left, masks[i]) else 1
        new = exps[:i] + (k - 1,) + exps[i + 1:]
        acc[new] += sign * k * coef
    return Series._raw(algebra, acc)


def epsilon(f: Series) -> Fraction:
    return f.epsilon()


def j_order(f: Series) -> Union[int, float]:
    """非零次数の座標の因子数の最小値。零級数は ∞"""
    p = f.algebra.coords.p
    return min((sum(e[p:]) for e in f.terms), default=INFINITY)


def homogeneous_part(f: Series, gamma: Degree) -> Series:
    if gamma.n != f.algebra.n:
        raise DimensionError(f'degree {gamma} does not match n={f.algebra.n}')
    mask_of = f.algebra.monomial_mask
    return Series._raw(f.algebra, {e: c for e, c in f.terms.items() if mask_of(e) == gamma.bits})


def is_homogeneous(f: Series, gamma: Degree) -> bool:
    if gamma.n != f.algebra.n:
        raise DimensionError(f'degree {gamma} does not match n={f.algebra.n}')
    return f.is_homogeneous_bits(gamma.bits)


def invert(f: Series) -> Series:
    """
    単元の逆元。f = ε(f)(1 + h) として ε(f)^-1 Σ_{k<=cap} (-h)^k 。
    """
    eps = f.epsilon()
    if eps == 0:
        raise NonUnitError(f'{f} is not a unit (constant term is 0)')
    if not f.is_homogeneous_bits(0):
        raise DegreeError(f'only degree-0 series can be inverted, got {f}')
    algebra = f.algebra
    one = algebra.one()
    h = f.scale(1 / eps) - one
    g = one
    for _ in range(algebra.cap):
        g = one - h * g
    return g.scale(1 / eps)


def substitute(f: Series, images: Sequence[Series], source: Optional[JetAlgebra] = None) -> Series:
    """
    f の各座標を images で置き換えて source 側で計算する (引き戻し)。
    images[i] は i 番目の座標と同じ次数で斉次、次数 0 の像は ε = 0 。
    """
    images = tuple(images)
    target = f.algebra
    if len(images) != target.size:
        raise ArityError(f'{target.size} images expected, got {len(images)}')
    if images:
        source = images[0].algebra
    if source is None:
        raise ArgumentError('substitute without images needs the source algebra')
    for img in images:
        if img.algebra != source:
            raise RingError('all images must live in the same jet algebra')
    if source.n != target.n:
        raise DimensionError(f'cannot substitute from n={target.n} into n={source.n}')
    for name, img, mask in zip(target.coords.names, images, target.masks):
        if not img.is_homogeneous_bits(mask):
            raise DegreeError(
                f'image of {name} must be homogeneous of degree {target.coords.degree_of(name)}')
        if mask == 0 and img.epsilon() != 0:
            raise BasepointError(f'image of {name} has nonzero constant term {img.epsilon()}')
    return _substitute(f, images, source)


def _substitute(f: Series, images: Tuple[Series, ...], source: JetAlgebra) -> Series:
    powers: List[List[Series]] = [[source.one()] for _ in images]

    def power(i: int, e: int) -> Series:
        cache = powers[i]
        while len(cache) <= e:
            cache.append(cache[-1] * images[i])
        return cache[e]

    acc: Dict[Exps, Fraction] = defaultdict(Fraction)
    for exps, coef in f.terms.items():
        prod = source.constant(coef)
        for i, e in enumerate(exps):
            if e:
                prod = prod * power(i, e)
                if prod.is_zero():
                    break
        for e, c in prod.terms.items():
            acc[e] += c
    return Series._raw(source, acc)


def twist(f: Series, mask: int) -> Series:
    """各単項式 m に (-1)^<deg m, mask> をかける"""
    mask_of = f.algebra.monomial_mask
    return Series._raw(f.algebra, {e: (-c if pair_bits(mask_of(e), mask) else c)
                                   for e, c in f.terms.items()})


def integrate(f: Series, c: Union[str, int]) -> Series:
    """
    偶パリティ座標 η についての原始関数 F (∂_η F = f, η = 0 で F = 0) 。
    標準形 L η^k R の係数 a は s(η, deg L) a/(k+1) L η^(k+1) R になる。
    cap を超える項は捨てるので、呼び出し側で余裕を確保すること。
    """
    algebra = f.algebra
    i = algebra.coords.index(c)
    if algebra.nilpotent[i]:
        raise UnsupportedVariableError(
            f'antiderivative along odd coordinate {algebra.coords.names[i]} is not defined')
    masks = algebra.masks
    terms: Dict[Exps, Fraction] = {}
    for exps, coef in f.terms.items():
        k = exps[i]
        left = 0
        for e, m in zip(exps[:i], masks[:i]):
            if e & 1:
                left ^= m
        sign = -1 if pair_bits(left, masks[i]) else 1
        terms[exps[:i] + (k + 1,) + exps[i + 1:]] = sign * coef / (k + 1)
    return Series(algebra, terms)


def set_zero(f: Series, c: Union[str, int]) -> Series:
    """零切断 η ↦ 0"""
    i = f.algebra.coords.index(c)
    return Series._raw(f.algebra, {e: v for e, v in f.terms.items() if not e[i]})


def to_text(f: Series) -> str:
    """
    正準テキスト。例: x^2 - 1/2*z*a
    """
    if not f.terms:
        return '0'
    parts: List[str] = []
    for exps in sorted(f.terms, key=_text_key):
        c = f.terms[exps]
        mono = f.algebra.monomial_text(exps)
        if not mono:
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f'{abs(c)}*{mono}'
        if not parts:
            parts.append(body if c > 0 else '-' + body)
        else:
            parts.append((' + ' if c > 0 else ' - ') + body)
    return ''.join(parts)


def series_sum(items: Iterable[Series], algebra: JetAlgebra) -> Series:
    acc: Dict[Exps, Fraction] = defaultdict(Fraction)
    for item in items:
        for e, c in item.terms.items():
            acc[e] += c
    return Series._raw(algebra, acc)
