#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
形式的超領域の射 (座標の引き戻しの組) 。
合成、積、次数付きヤコビ行列、接写像、連鎖律の検証。
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np

from znjet.errors import (ArityError, BasepointError, DegreeError,
                          DomainMismatchError, RingError)
from znjet.glinalg import (GradedMatrix, RankProfile, fraction_matrix, matmul,
                           rational_rank, scalar_rank)
from znjet.grading import CoordinateSystem, Degree, standard_order
from znjet.gseries import JetAlgebra, Series, partial, substitute


@dataclass(frozen=True)
class Domain:
    """
    原点に基点を持つジェット領域 R^{p|q} 。
    """
    algebra: JetAlgebra
    name: str = ''

    @property
    def coords(self) -> CoordinateSystem:
        return self.algebra.coords

    @property
    def n(self) -> int:
        return self.algebra.n

    @property
    def cap(self) -> int:
        return self.algebra.cap

    @property
    def dimension(self) -> Tuple[int, Tuple[int, ...]]:
        return self.coords.p, self.coords.signature.q

    def dimension_text(self) -> str:
        return self.coords.dimension_text()

    def block_sizes(self) -> List[int]:
        """標準順序の各次数の座標数"""
        return [len(idx) for _, idx in self.coords.blocks()]

    def __eq__(self, other):
        # 名前は比較しない
        if not isinstance(other, Domain):
            return NotImplemented
        return self.algebra == other.algebra

    def __hash__(self):
        return hash(self.algebra)

    def __str__(self):
        label = self.name or 'domain'
        return f'ring {label} {self.algebra}'


def make_domain(coords: CoordinateSystem, cap: int, name: str = '') -> Domain:
    return Domain(JetAlgebra(coords, cap), name)


@dataclass(frozen=True)
class Morphism:
    """
    source → target の射。pullbacks[i] は target の i 番目の座標の引き戻し。
    """
    source: Domain
    target: Domain
    pullbacks: Tuple[Series, ...]
    name: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'pullbacks', tuple(self.pullbacks))
        src, tgt = self.source, self.target
        if src.n != tgt.n:
            raise DomainMismatchError(f'source has n={src.n} but target has n={tgt.n}')
        if src.cap != tgt.cap:
            raise DomainMismatchError(f'source has cap={src.cap} but target has cap={tgt.cap}')
        if len(self.pullbacks) != tgt.coords.size:
            raise ArityError(
                f'{tgt.coords.size} pullbacks expected, got {len(self.pullbacks)}')
        for name, d, f in zip(tgt.coords.names, tgt.coords.degrees, self.pullbacks):
            if f.algebra != src.algebra:
                raise RingError(f'pullback of {name} is not a series over the source')
            if not f.is_homogeneous_bits(d.bits):
                raise DegreeError(f'pullback of {name} must be homogeneous of degree {d}: {f}')
            if d.is_zero() and f.epsilon() != 0:
                raise BasepointError(
                    f'pullback of {name} has constant term {f.epsilon()}; morphisms must fix the origin')

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and all(a == b for a, b in zip(self.pullbacks, other.pullbacks)))

    def __hash__(self):
        return hash((self.source, self.target))

    def pullback(self, f: Series) -> Series:
        """f (target 上) を source 上に引き戻す"""
        if f.algebra != self.target.algebra:
            raise RingError('series is not defined on the target of the morphism')
        return substitute(f, self.pullbacks, self.source.algebra)

    def pullback_of(self, name: Union[str, int]) -> Series:
        return self.pullbacks[self.target.coords.index(name)]

    def to_dsl(self, name: str = '') -> str:
        label = name or self.name or 'F'
        src = self.source.name or 'SRC'
        tgt = self.target.name or 'TGT'
        body = ' ; '.join(f'{c} := {f}' for c, f in zip(self.target.coords.names, self.pullbacks))
        return f'morphism {label} : {src} -> {tgt} {{ {body} }}'

    def __str__(self):
        return self.to_dsl()


def make_morphism(source: Domain, target: Domain,
                  pullbacks: Union[Sequence[Series], Mapping[str, Series]],
                  name: str = '') -> Morphism:
    """
    引き戻しの組 (または 座標名 → 級数 の辞書) から射を作る。
    """
    if isinstance(pullbacks, Mapping):
        missing = [c for c in target.coords.names if c not in pullbacks]
        extra = [c for c in pullbacks if c not in target.coords.names]
        if missing or extra:
            raise ArityError(f'pullbacks missing for {missing}, unknown targets {extra}')
        pullbacks = [pullbacks[c] for c in target.coords.names]
    return Morphism(source, target, tuple(pullbacks), name)


def identity_morphism(domain: Domain) -> Morphism:
    return Morphism(domain, domain, tuple(domain.algebra.coordinates()), 'id')


def compose(psi: Morphism, phi: Morphism) -> Morphism:
    """
    psi: M → N, phi: N → S のとき phi∘psi: M → S 。 (phi∘psi)* = psi*∘phi*
    """
    if psi.target != phi.source:
        raise DomainMismatchError(
            f'cannot compose: target {psi.target.dimension_text()} of the first morphism '
            f'differs from source {phi.source.dimension_text()} of the second')
    images = tuple(psi.pullback(f) for f in phi.pullbacks)
    return Morphism(psi.source, phi.target, images)


def product_domain(m1: Domain, m2: Domain, name: str = '') -> Tuple[Domain, Morphism, Morphism]:
    """
    座標を連結して標準順序に並べ直した積領域と、その2つの射影。
    名前が衝突したら 2 番目の領域の座標に ' を付ける。
    """
    if m1.n != m2.n:
        raise DomainMismatchError(f'product needs equal n, got {m1.n} and {m2.n}')
    if m1.cap != m2.cap:
        raise DomainMismatchError(f'product needs equal cap, got {m1.cap} and {m2.cap}')
    names1 = list(m1.coords.names)
    taken = set(names1)
    names2 = []
    for c in m2.coords.names:
        new = c
        while new in taken:
            new += "'"
        taken.add(new)
        names2.append(new)
    pairs = list(zip(names1, m1.coords.degrees)) + list(zip(names2, m2.coords.degrees))
    coords = CoordinateSystem.regrouped(m1.n, pairs)
    product = make_domain(coords, m1.cap, name or _product_name(m1, m2))
    pi1 = Morphism(product, m1, tuple(product.algebra.coordinate(c) for c in names1), 'pi1')
    pi2 = Morphism(product, m2, tuple(product.algebra.coordinate(c) for c in names2), 'pi2')
    return product, pi1, pi2


def _product_name(m1: Domain, m2: Domain) -> str:
    if m1.name and m2.name:
        return f'{m1.name}x{m2.name}'
    return ''


def pair_morphism(f1: Morphism, f2: Morphism) -> Morphism:
    """普遍性で決まる N → M1×M2"""
    if f1.source != f2.source:
        raise DomainMismatchError('pair_morphism needs a common source')
    product, pi1, pi2 = product_domain(f1.target, f2.target)
    by_name: Dict[str, Series] = {}
    for pi, f in ((pi1, f1), (pi2, f2)):
        for img, series in zip(pi.pullbacks, f.pullbacks):
            by_name[_single_coordinate(img)] = series
    return make_morphism(f1.source, product, by_name)


def _single_coordinate(f: Series) -> str:
    (exps,) = f.terms
    return f.algebra.coords.names[exps.index(1)]


def product_morphism(f1: Morphism, f2: Morphism) -> Morphism:
    """f1 × f2 : M1×M2 → N1×N2"""
    source, p1, p2 = product_domain(f1.source, f2.source)
    return pair_morphism(compose(p1, f1), compose(p2, f2))


def reduced_morphism(psi: Morphism) -> Morphism:
    """
    次数 0 の部分だけを取り出した R^{p|0} → R^{p'|0} の射 (非零次数の座標は 0 にする) 。
    """
    def body(domain: Domain) -> Domain:
        coords = domain.coords
        keep = [(c, d) for c, d in zip(coords.names, coords.degrees) if d.is_zero()]
        sub = CoordinateSystem(tuple(c for c, _ in keep), tuple(d for _, d in keep), coords.n)
        return make_domain(sub, domain.cap, domain.name and f'|{domain.name}|')

    src, tgt = body(psi.source), body(psi.target)
    p = src.coords.p
    images = []
    for name, f in zip(psi.target.coords.names, psi.pullbacks):
        if name not in tgt.coords.names:
            continue
        terms = {e[:p]: c for e, c in f.terms.items() if not any(e[p:])}
        images.append(Series(src.algebra, terms))
    return Morphism(src, tgt, tuple(images), psi.name and f'|{psi.name}|')


def graded_jacobian(psi: Morphism) -> GradedMatrix:
    """
    (i, j) 成分は (-1)^<deg v^i + deg u^j, deg v^i> ∂_{u^j} ψ*(v^i) 。
    """
    src = psi.source.coords
    tgt = psi.target.coords
    rows = []
    for v_deg, f in zip(tgt.degrees, psi.pullbacks):
        row = []
        for j, u_deg in enumerate(src.degrees):
            entry = partial(f, j)
            if (v_deg + u_deg).pairing(v_deg):
                entry = -entry
            row.append(entry)
        rows.append(row)
    return GradedMatrix(psi.source.algebra, tgt.degrees, src.degrees, rows)


def derivative_matrix(psi: Morphism) -> GradedMatrix:
    """符号なしの (∂_{u^j} ψ*(v^i)) を u で行を並べたもの"""
    src = psi.source.coords
    rows = [[partial(f, j) for f in psi.pullbacks] for j in range(src.size)]
    return GradedMatrix(psi.source.algebra, src.degrees, psi.target.coords.degrees, rows)


def jacobian_multiplicativity_check(psi: Morphism, phi: Morphism) -> Tuple[bool, GradedMatrix]:
    """
    Jac(φ∘ψ) と ψ*(Jac φ)·Jac ψ を総次数 cap-1 までで比べる。
    """
    composite = compose(psi, phi)
    left = graded_jacobian(composite)
    outer = graded_jacobian(phi).map(psi.pullback, psi.source.algebra)
    right = matmul(outer, graded_jacobian(psi))
    k = psi.source.cap - 1
    residual = (left - right).truncate(k)
    return residual.is_zero(), residual


@dataclass(frozen=True)
class TangentMap:
    """
    原点での接写像。標準順序の各次数のスカラー行列 B_0, B_γ1, ... 。
    """
    degrees: Tuple[Degree, ...]
    blocks: Tuple[np.ndarray, ...]

    def rank_profile(self) -> RankProfile:
        return scalar_rank(self.blocks)

    def __eq__(self, other):
        if not isinstance(other, TangentMap):
            return NotImplemented
        return self.degrees == other.degrees and all(
            a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))
            for a, b in zip(self.blocks, other.blocks))

    __hash__ = None

    def nonempty(self) -> List[Tuple[Degree, np.ndarray]]:
        return [(d, b) for d, b in zip(self.degrees, self.blocks) if b.size]

    def to_rows(self) -> List[Tuple[str, List[List[str]]]]:
        return [(str(d), [[str(v) for v in row] for row in b.tolist()])
                for d, b in self.nonempty()]


def tangent_map(psi: Morphism) -> TangentMap:
    jac = graded_jacobian(psi)
    degrees, blocks = zip(*jac.diagonal_blocks())
    return TangentMap(tuple(degrees), tuple(blocks))


def tangent_block_product(outer: TangentMap, inner: TangentMap) -> TangentMap:
    """ブロックごとの行列積 (合成の接写像)"""
    blocks = []
    for a, b in zip(outer.blocks, inner.blocks):
        if a.shape[1] == 0:
            blocks.append(fraction_matrix([[0] * b.shape[1] for _ in range(a.shape[0])])
                          if a.shape[0] else np.empty((0, b.shape[1]), dtype=object))
        else:
            blocks.append(np.dot(a, b))
    return TangentMap(outer.degrees, tuple(blocks))


def push_tangent_vector(psi: Morphism, v: Sequence[Fraction]) -> List[Fraction]:
    """
    dψ(v): 原点の接ベクトル v (source 座標の成分) を target の成分へ送る。
    """
    if len(v) != psi.source.coords.size:
        raise ArityError(f'tangent vector needs {psi.source.coords.size} components, got {len(v)}')
    jac = graded_jacobian(psi).epsilon()
    return [sum((jac[i, j] * Fraction(v[j]) for j in range(len(v))), Fraction(0))
            for i in range(jac.shape[0])]


def chain_rule_residual(psi: Morphism, f: Series, c: Union[str, int]) -> Series:
    """
    ∂_{u^a} ψ*(f) - Σ_b ∂_{u^a} ψ*(v^b) · ψ*(∂_{v^b} f) を総次数 cap-1 で切ったもの。
    """
    a = psi.source.coords.index(c)
    lhs = partial(psi.pullback(f), a)
    rhs = psi.source.algebra.zero()
    for b, image in enumerate(psi.pullbacks):
        rhs = rhs + partial(image, a) * psi.pullback(partial(f, b))
    return (lhs - rhs).truncate(psi.source.cap - 1)


class PointClass(Enum):
    DIFFEO_CANDIDATE = 'diffeo-candidate'
    IMMERSION = 'immersion'
    SUBMERSION = 'submersion'
    NONE = 'none'


def classify_point(psi: Morphism) -> Tuple[PointClass, RankProfile]:
    """
    接写像の各ブロックの階数で、単射ならイマーション、全射ならサブマーション。
    正方で全部正則なら微分同相の候補。
    """
    tm = tangent_map(psi)
    profile = tm.rank_profile()
    ranks = (profile.r,) + profile.s
    shapes = [b.shape for b in tm.blocks]
    injective = all(r == cols for r, (_, cols) in zip(ranks, shapes))
    surjective = all(r == rows for r, (rows, _) in zip(ranks, shapes))
    if injective and surjective:
        return PointClass.DIFFEO_CANDIDATE, profile
    if injective:
        return PointClass.IMMERSION, profile
    if surjective:
        return PointClass.SUBMERSION, profile
    return PointClass.NONE, profile


def block_ranks(psi: Morphism) -> List[int]:
    return [rational_rank(b) for b in tangent_map(psi).blocks]


def linear_morphism(source: Domain, target: Domain, blocks: Sequence[np.ndarray],
                    name: str = '') -> Morphism:
    """
    標準順序のスカラーブロックから線形な射 v^i ↦ Σ_j B[i, j] u^j を作る。
    """
    src_blocks = source.coords.blocks()
    tgt_blocks = target.coords.blocks()
    images: List[Series] = [None] * target.coords.size
    for (d, src_idx), (_, tgt_idx), b in zip(src_blocks, tgt_blocks, blocks):
        for a, i in enumerate(tgt_idx):
            terms = {}
            for k, j in enumerate(src_idx):
                exps = [0] * source.coords.size
                exps[j] = 1
                terms[tuple(exps)] = b[a, k]
            images[i] = Series(source.algebra, terms)
    return Morphism(source, target, tuple(images), name)


__all__ = [
    'Domain', 'make_domain', 'Morphism', 'make_morphism', 'identity_morphism', 'compose',
    'product_domain', 'pair_morphism', 'product_morphism', 'reduced_morphism',
    'graded_jacobian', 'derivative_matrix', 'jacobian_multiplicativity_check', 'TangentMap',
    'tangent_map', 'tangent_block_product', 'push_tangent_vector', 'chain_rule_residual',
    'PointClass', 'classify_point', 'block_ranks', 'linear_morphism', 'standard_order',
]
