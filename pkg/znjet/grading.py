#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
Z2^n 次数の演算と座標系。

次数は n ビットの整数 (bits) で持つ。タプル (d_1, ..., d_n) の d_k は
ビット k-1 に入る。ペアリング <a,b> は popcount(a & b) の偶奇。
"""
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from znjet.errors import (ArgumentError, DegreeError, DimensionError,
                          SignatureError, UnknownCoordinateError)

MAX_N = 16


def popcount(x: int) -> int:
    return bin(x).count('1')


def pair_bits(a: int, b: int) -> int:
    """<a,b> mod 2 (整数ビット列どうし)"""
    return popcount(a & b) & 1


def bits_to_tuple(bits: int, n: int) -> Tuple[int, ...]:
    return tuple((bits >> k) & 1 for k in range(n))


def tuple_to_bits(values: Sequence[int]) -> int:
    bits = 0
    for k, v in enumerate(values):
        if v not in (0, 1):
            raise DegreeError(f'degree entries must be 0 or 1, got {tuple(values)}')
        bits |= v << k
    return bits


@dataclass(frozen=True)
class Degree:
    """
    Z2^n の元。
    """
    n: int
    bits: int = 0

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise ArgumentError(f'n must satisfy 1 <= n <= {MAX_N}, got {self.n}')
        if self.bits < 0 or self.bits >> self.n:
            raise DegreeError(f'bits {self.bits} do not fit in n={self.n}')

    @classmethod
    def from_tuple(cls, values: Sequence[int]) -> 'Degree':
        return cls(len(values), tuple_to_bits(values))

    @classmethod
    def zero(cls, n: int) -> 'Degree':
        return cls(n, 0)

    def as_tuple(self) -> Tuple[int, ...]:
        return bits_to_tuple(self.bits, self.n)

    def _check(self, other: 'Degree'):
        if self.n != other.n:
            raise DimensionError(f'degrees of different length: n={self.n} and n={other.n}')

    def __add__(self, other: 'Degree') -> 'Degree':
        self._check(other)
        return Degree(self.n, self.bits ^ other.bits)

    @property
    def parity(self) -> int:
        return popcount(self.bits) & 1

    def is_zero(self) -> bool:
        return self.bits == 0

    def pairing(self, other: 'Degree') -> int:
        self._check(other)
        return pair_bits(self.bits, other.bits)

    def __str__(self):
        return '(' + ','.join(str(v) for v in self.as_tuple()) + ')'


def parity(d: Degree) -> int:
    """Σ d_k mod 2"""
    return d.parity


def scalar_sign(a: Degree, b: Degree) -> int:
    """(-1)^<a,b>"""
    return -1 if a.pairing(b) else 1


@lru_cache(maxsize=None)
def _standard_bits(n: int) -> Tuple[int, ...]:
    tuples = sorted(bits_to_tuple(b, n) for b in range(1 << n))
    even = [t for t in tuples if sum(t) % 2 == 0]
    odd = [t for t in tuples if sum(t) % 2 == 1]
    return tuple(tuple_to_bits(t) for t in even + odd)


@lru_cache(maxsize=None)
def _standard_rank(n: int) -> Dict[int, int]:
    return {bits: i for i, bits in enumerate(_standard_bits(n))}


def standard_order(n: int) -> List[Degree]:
    """
    偶パリティの次数を辞書式順に並べ、続けて奇パリティの次数を辞書式順に並べる。
    """
    if not isinstance(n, int) or n < 1:
        raise ArgumentError(f'standard_order needs n >= 1, got {n}')
    if n > MAX_N:
        raise ArgumentError(f'n must be at most {MAX_N}, got {n}')
    return [Degree(n, b) for b in _standard_bits(n)]


def nonzero_degrees(n: int) -> List[Degree]:
    """標準順序での非零次数 γ_1, ..., γ_N"""
    return standard_order(n)[1:]


def standard_rank(d: Degree) -> int:
    """標準順序での位置 (零次数が 0)"""
    return _standard_rank(d.n)[d.bits]


def clifford_degrees(k: int) -> List[Degree]:
    """
    Clifford 代数 Cl_k の生成元 e_i に Z2^(k+1) の次数 e_i + e_(k+1) を割り当てる。
    k=2 なら [(1,0,1), (0,1,1)] となり、四元数の j, i に一致する。
    """
    if k < 1 or k + 1 > MAX_N:
        raise ArgumentError(f'clifford_degrees needs 1 <= k <= {MAX_N - 1}, got {k}')
    n = k + 1
    return [Degree(n, (1 << i) | (1 << k)) for i in range(k)]


def parse_degree(text: str, n: int = 0) -> Degree:
    """'(0,1,1)' 形式の文字列を Degree にする"""
    body = text.strip()
    if not (body.startswith('(') and body.endswith(')')):
        raise DegreeError(f'degree literal must look like (0,1), got {text!r}')
    try:
        values = [int(v) for v in body[1:-1].split(',')]
    except ValueError as exc:
        raise DegreeError(f'bad degree literal {text!r}') from exc
    d = Degree.from_tuple(values)
    if n and d.n != n:
        raise DimensionError(f'degree {text} has length {d.n}, expected {n}')
    return d


@dataclass(frozen=True)
class DegreeSignature:
    """
    p|q の q 部分。q[i] は i 番目の非零次数を持つ座標の個数。
    """
    n: int
    q: Tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or not 1 <= self.n <= MAX_N:
            raise SignatureError(f'signature n must satisfy 1 <= n <= {MAX_N}, got {self.n}')
        expected = (1 << self.n) - 1
        if len(self.q) != expected:
            raise SignatureError(
                f'signature for n={self.n} needs {expected} entries, got {len(self.q)}')
        if any((not isinstance(v, int)) or v < 0 for v in self.q):
            raise SignatureError(f'signature entries must be non-negative integers: {self.q}')

    def __str__(self):
        return f'n={self.n} q=(' + ','.join(str(v) for v in self.q) + ')'


@dataclass(frozen=True)
class CoordinateSystem:
    """
    座標名と次数の並び。次数 0 の座標が先頭、その後に非零次数の座標を標準順序でまとめて並べる。
    """
    names: Tuple[str, ...]
    degrees: Tuple[Degree, ...]
    n: int
    _index: Dict[str, int] = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if len(self.names) != len(self.degrees):
            raise ArgumentError('names and degrees must have the same length')
        if len(set(self.names)) != len(self.names):
            raise ArgumentError(f'coordinate names must be unique: {list(self.names)}')
        ranks = []
        for name, d in zip(self.names, self.degrees):
            if d.n != self.n:
                raise DimensionError(f'coordinate {name} has degree {d} but n={self.n}')
            ranks.append(standard_rank(d))
        if any(a > b for a, b in zip(ranks, ranks[1:])):
            raise DegreeError('coordinates must be grouped by degree in standard order')
        object.__setattr__(self, '_index', {name: i for i, name in enumerate(self.names)})

    @classmethod
    def regrouped(cls, n: int, pairs: Iterable[Tuple[str, Degree]]) -> 'CoordinateSystem':
        """(name, degree) の列を標準順序に安定ソートして座標系にする"""
        pairs = list(pairs)
        for name, d in pairs:
            if d.n != n:
                raise DimensionError(f'coordinate {name} has degree {d} but n={n}')
        pairs.sort(key=lambda pair: standard_rank(pair[1]))
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), n)

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def p(self) -> int:
        return sum(1 for d in self.degrees if d.is_zero())

    @property
    def masks(self) -> Tuple[int, ...]:
        return tuple(d.bits for d in self.degrees)

    @property
    def signature(self) -> DegreeSignature:
        counts = {d.bits: 0 for d in nonzero_degrees(self.n)}
        for d in self.degrees:
            if not d.is_zero():
                counts[d.bits] += 1
        return DegreeSignature(self.n, tuple(counts[d.bits] for d in nonzero_degrees(self.n)))

    def index(self, name: Union[str, int]) -> int:
        if isinstance(name, int):
            if not 0 <= name < self.size:
                raise UnknownCoordinateError(f'coordinate index {name} out of range')
            return name
        try:
            return self._index[name]
        except KeyError:
            raise UnknownCoordinateError(f'unknown coordinate {name!r}') from None

    def degree_of(self, name: Union[str, int]) -> Degree:
        return self.degrees[self.index(name)]

    def blocks(self) -> List[Tuple[Degree, List[int]]]:
        """標準順序の各次数について、その次数を持つ座標の添字 (空ブロックも含む)"""
        return [(d, [i for i, e in enumerate(self.degrees) if e == d])
                for d in standard_order(self.n)]

    def dimension_text(self) -> str:
        return f'{self.p}|' + ','.join(str(v) for v in self.signature.q)

    def __str__(self):
        return '[' + ', '.join(f'{name}:{d}' for name, d in zip(self.names, self.degrees)) + ']'


def coordinate_system(n: int, pairs: Iterable[Tuple[str, Union[Degree, Sequence[int]]]]
                      ) -> CoordinateSystem:
    """タプルでも Degree でも受け付ける座標系コンストラクタ"""
    converted = []
    for name, d in pairs:
        if not isinstance(d, Degree):
            d = Degree.from_tuple(tuple(d))
        converted.append((name, d))
    return CoordinateSystem.regrouped(n, converted)


def auto_name(degree_index: int, a: int, degree: Degree) -> str:
    """自動生成する座標名。次数 0 は x1, x2, ...; 非零次数は偶なら z, 奇なら t を使う"""
    if degree_index == 0:
        return f'x{a}'
    prefix = 't' if degree.parity else 'z'
    return f'{prefix}{degree_index}_{a}'


def validate_signature(sig: DegreeSignature, p: int = 0) -> CoordinateSystem:
    """
    シグネチャ p|q から座標系の雛形 (自動命名) を作る。
    """
    if not isinstance(sig, DegreeSignature):
        raise SignatureError(f'expected a DegreeSignature, got {sig!r}')
    if p < 0:
        raise SignatureError(f'p must be non-negative, got {p}')
    order = standard_order(sig.n)
    pairs = [(auto_name(0, a + 1, order[0]), order[0]) for a in range(p)]
    for k, (d, count) in enumerate(zip(order[1:], sig.q), start=1):
        pairs.extend((auto_name(k, a + 1, d), d) for a in range(count))
    return CoordinateSystem(tuple(n for n, _ in pairs), tuple(d for _, d in pairs), sig.n)
