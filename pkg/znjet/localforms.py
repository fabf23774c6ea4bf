#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
逆関数定理、イマーション・サブマーションの標準形、定数階数の分解 φ = φ2∘φ1 。
"""
from dataclasses import dataclass
from enum import Enum
from logging import getLogger
from typing import List, Optional, Sequence, Tuple

import numpy as np

from znjet.errors import (DomainMismatchError, InternalCheckError,
                          NotImmersionError, NotLocallyInvertibleError,
                          NotSubmersionError)
from znjet.glinalg import (RankProfile, constant_rank_decompose,
                           rational_det, rational_inverse, rational_rref)
from znjet.gmorphism import (Domain, Morphism, PointClass, classify_point,
                             compose, graded_jacobian, identity_morphism,
                             make_domain, make_morphism,
                             pair_morphism, product_domain, tangent_map)
from znjet.grading import CoordinateSystem
from znjet.gseries import Series, series_sum, substitute

logger = getLogger(__name__)


@dataclass(frozen=True)
class CoordinateChange:
    """
    微分同相 forward とその逆 inverse 。
    """
    forward: Morphism
    inverse: Morphism

    def check(self) -> bool:
        return (compose(self.forward, self.inverse) == identity_morphism(self.forward.source)
                and compose(self.inverse, self.forward) == identity_morphism(self.forward.target))


class NormalFormKind(Enum):
    SUBMERSION = 'submersion'
    IMMERSION = 'immersion'


@dataclass(frozen=True)
class NormalForm:
    """
    標準形の結果。standard は射影 (サブマーション) か包含 (イマーション) 。
    selected は各次数ブロックで選んだ座標名 (可逆な小行列の行または列) 。
    """
    kind: NormalFormKind
    change: CoordinateChange
    standard: Morphism
    selected: Tuple[str, ...]
    complement: Domain
    certificate: bool


@dataclass(frozen=True)
class Factorization:
    """φ = φ2∘φ1 (φ1: サブマーション, φ2: イマーション) 。"""
    profile: RankProfile
    middle: Domain
    phi1: Morphism
    phi2: Morphism
    section: Morphism
    rows: Tuple[str, ...]
    cols: Tuple[str, ...]
    certificate: bool


def _apply_blocks(domain: Domain, blocks: Sequence[np.ndarray], values: Sequence[Series],
                  value_domain: Domain) -> List[Series]:
    """
    ブロック行列を級数のベクトルにかける。values は value_domain の座標順に並ぶ。
    """
    algebra = values[0].algebra if values else None
    out: List[Series] = [None] * domain.coords.size
    for (_, out_idx), (_, in_idx), b in zip(domain.coords.blocks(),
                                            value_domain.coords.blocks(), blocks):
        for a, i in enumerate(out_idx):
            out[i] = series_sum((values[k].scale(b[a, c]) for c, k in enumerate(in_idx)
                                 if b[a, c] != 0), algebra)
    return out


def invert_morphism(phi: Morphism) -> Morphism:
    """
    局所逆写像。線形部分 L の逆で g = L^-1 v から始め、
    g ← L^-1 (v - H(g)) を cap 回まで繰り返す (H は2次以上の部分) 。
    """
    src, tgt = phi.source, phi.target
    if src.block_sizes() != tgt.block_sizes():
        raise DomainMismatchError(
            f'cannot invert a morphism {src.dimension_text()} -> {tgt.dimension_text()}')
    tm = tangent_map(phi)
    inverse_blocks = []
    for d, b in zip(tm.degrees, tm.blocks):
        if b.size and rational_det(b) == 0:
            raise NotLocallyInvertibleError(f'tangent block of degree {d} is singular')
        inverse_blocks.append(rational_inverse(b))

    # 2次以上の部分 H
    higher = [f - f.of_total(1) for f in phi.pullbacks]
    v = tgt.algebra.coordinates()
    g = _apply_blocks(src, inverse_blocks, v, tgt)
    for step in range(tgt.cap + 1):
        h_of_g = [substitute(h, g, tgt.algebra) for h in higher]
        residual = [a - b for a, b in zip(v, h_of_g)]
        new = _apply_blocks(src, inverse_blocks, residual, tgt)
        if all(a == b for a, b in zip(new, g)):
            logger.debug('fixed point reached after %d iterations', step)
            break
        g = new
    inverse = Morphism(tgt, src, tuple(g), phi.name and f'{phi.name}_inv')
    if compose(inverse, phi) != identity_morphism(tgt) or compose(phi, inverse) != identity_morphism(src):
        raise InternalCheckError('fixed-point inverse failed its two-sided check')
    return inverse


def _sub_domain(domain: Domain, indices: Sequence[int], name: str = '') -> Domain:
    coords = domain.coords
    sub = CoordinateSystem(tuple(coords.names[i] for i in indices),
                           tuple(coords.degrees[i] for i in indices), coords.n)
    return make_domain(sub, domain.cap, name)


def _pivot_columns(block: np.ndarray) -> Tuple[int, ...]:
    return rational_rref(block)[1]


def _pivot_rows(block: np.ndarray) -> Tuple[int, ...]:
    return rational_rref(block.T)[1] if block.size else ()


def submersion_normal_form(phi: Morphism) -> NormalForm:
    """
    ψ = (φ, 補助座標) : U → V×C を作り、その逆で φ を射影に直す。
    """
    kind, _ = classify_point(phi)
    if kind not in (PointClass.SUBMERSION, PointClass.DIFFEO_CANDIDATE):
        raise NotSubmersionError(f'morphism is not a submersion at the origin ({kind.value})')
    src = phi.source
    tm = tangent_map(phi)
    selected, complement = [], []
    for (_, idx), b in zip(src.coords.blocks(), tm.blocks):
        pivots = _pivot_columns(b) if b.size else ()
        selected.extend(idx[k] for k in pivots)
        complement.extend(idx[k] for k in range(len(idx)) if k not in pivots)
    c_domain = _sub_domain(src, complement, 'C')
    kappa = make_morphism(src, c_domain, [src.algebra.coordinate(i) for i in complement])
    psi = pair_morphism(phi, kappa)
    _, projection, _ = product_domain(phi.target, c_domain)
    change = CoordinateChange(psi, invert_morphism(psi))
    certificate = compose(change.inverse, phi) == projection
    if not certificate:
        raise InternalCheckError('submersion normal form certificate failed')
    return NormalForm(NormalFormKind.SUBMERSION, change, projection,
                      tuple(src.coords.names[i] for i in selected), c_domain, certificate)


def immersion_normal_form(phi: Morphism) -> NormalForm:
    """
    Φ(u, c) = φ(u) + c (補助の行) を逆にして、φ を包含 u ↦ (u, 0) に直す。
    """
    kind, _ = classify_point(phi)
    if kind not in (PointClass.IMMERSION, PointClass.DIFFEO_CANDIDATE):
        raise NotImmersionError(f'morphism is not an immersion at the origin ({kind.value})')
    src, tgt = phi.source, phi.target
    tm = tangent_map(phi)
    selected, complement = [], []
    for (_, idx), b in zip(tgt.coords.blocks(), tm.blocks):
        pivots = _pivot_rows(b)
        selected.extend(idx[k] for k in pivots)
        complement.extend(idx[k] for k in range(len(idx)) if k not in pivots)
    c_domain = _sub_domain(tgt, complement, 'C')
    product, pi_u, pi_c = product_domain(src, c_domain)
    extra = {i: pi_c.pullbacks[k] for k, i in enumerate(complement)}
    images = []
    for i, f in enumerate(phi.pullbacks):
        image = pi_u.pullback(f)
        if i in extra:
            image = image + extra[i]
        images.append(image)
    big_phi = Morphism(product, tgt, tuple(images))
    change = CoordinateChange(invert_morphism(big_phi), big_phi)
    zero = Morphism(src, c_domain, tuple(src.algebra.zero() for _ in complement))
    inclusion = pair_morphism(identity_morphism(src), zero)
    certificate = compose(phi, change.forward) == inclusion
    if not certificate:
        raise InternalCheckError('immersion normal form certificate failed')
    return NormalForm(NormalFormKind.IMMERSION, change, inclusion,
                      tuple(tgt.coords.names[i] for i in selected), c_domain, certificate)


def normal_form(phi: Morphism) -> NormalForm:
    """原点での分類に応じてサブマーションかイマーションの標準形を返す"""
    kind, profile = classify_point(phi)
    if kind in (PointClass.SUBMERSION, PointClass.DIFFEO_CANDIDATE):
        return submersion_normal_form(phi)
    if kind is PointClass.IMMERSION:
        return immersion_normal_form(phi)
    raise NotSubmersionError(
        f'morphism is neither an immersion nor a submersion at the origin (rank {profile})')


def constant_rank_factor(phi: Morphism) -> Optional[Factorization]:
    """
    ヤコビ行列が定数階数 r|s なら φ = φ2∘φ1 と分解する。そうでなければ None 。
    ヤコビ行列の成分は総次数 cap-1 までしか正しくないので、消去の残りもそこで切って比べる。
    """
    decomposition = constant_rank_decompose(graded_jacobian(phi), phi.source.cap - 1)
    if decomposition is None:
        return None
    profile = decomposition.profile
    src, tgt = phi.source, phi.target
    tm = tangent_map(phi)
    rows, cols = [], []
    for (_, r_idx), (_, c_idx), b in zip(tgt.coords.blocks(), src.coords.blocks(), tm.blocks):
        picked_rows = _pivot_rows(b)
        rows.extend(r_idx[k] for k in picked_rows)
        if picked_rows:
            picked_cols = _pivot_columns(b[list(picked_rows), :])
            cols.extend(c_idx[k] for k in picked_cols)
    names = tuple(f'w{k + 1}' for k in range(len(rows)))
    middle_coords = CoordinateSystem(names, tuple(tgt.coords.degrees[i] for i in rows), src.n)
    middle = make_domain(middle_coords, src.cap, 'W')
    phi1 = Morphism(src, middle, tuple(phi.pullbacks[i] for i in rows), 'phi1')

    nf = submersion_normal_form(phi1)
    zero = Morphism(middle, nf.complement,
                    tuple(middle.algebra.zero() for _ in nf.complement.coords.names))
    iota = pair_morphism(identity_morphism(middle), zero)
    section = compose(iota, nf.change.inverse)
    phi2 = compose(section, phi)
    phi2 = Morphism(phi2.source, phi2.target, phi2.pullbacks, 'phi2')
    certificate = compose(phi1, phi2) == phi
    if not certificate:
        # 次数 cap の項で階数が変わる
        logger.debug('factorization through %s does not reproduce %s', middle.dimension_text(), phi)
        return None
    return Factorization(profile, middle, phi1, phi2, section,
                         tuple(tgt.coords.names[i] for i in rows),
                         tuple(src.coords.names[i] for i in cols), certificate)
