#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
乱数で生成した元についてカーネルの恒等式を確かめる自己診断 (check all) 。

各試行関数は (rng, bounds) を受け取り、失敗の説明のリストを返す (空なら成功) 。
テストからも同じ生成器と試行関数を使う。
"""
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from omegaconf import DictConfig
from tqdm import tqdm

from znjet.errors import (ArgumentError, InternalCheckError, NotLocallyInvertibleError,
                          SingularError)
from znjet.gforms import (Form, _word_mask, derham_ranks, exterior_derivative,
                          form_pullback, homotopy_K, restrict_zero, wedge, words)
from znjet.glinalg import (GradedMatrix, constant_rank_decompose,
                           fraction_matrix, is_invertible_deg0, matmul,
                           neumann_inverse, rational_rank)
from znjet.gmorphism import (Domain, Morphism, PointClass,
                             chain_rule_residual, classify_point, compose,
                             identity_morphism, jacobian_multiplicativity_check,
                             linear_morphism, make_domain, tangent_block_product,
                             tangent_map)
from znjet.grading import (Degree, DegreeSignature, clifford_degrees,
                           coordinate_system, pair_bits, scalar_sign,
                           validate_signature)
from znjet.gseries import Exps, JetAlgebra, Series, partial
from znjet.jetparser import parse_expression
from znjet.localforms import (constant_rank_factor, immersion_normal_form,
                              invert_morphism, submersion_normal_form)

# 検査に使う座標系 (名前, n, 座標)
CONFIGURATIONS = (
    ('S', 1, (('x', (0,)), ('y', (0,)), ('s', (1,)), ('t', (1,)))),
    ('Q', 2, (('x', (0, 0)), ('z', (1, 1)), ('a', (0, 1)), ('b', (1, 0)))),
    ('C', 3, (('x', (0, 0, 0)), ('w', (0, 1, 1)), ('t', (1, 0, 0)), ('u', (1, 1, 1)))),
)
RING_CAP = 4
MORPHISM_CAP = 3
FORM_CAP = 4


@dataclass(frozen=True)
class Bounds:
    """乱数で作る級数の項数と係数の範囲"""
    max_terms: int = 4
    max_coef: int = 3


@dataclass
class SuiteResult:
    name: str
    trials: int = 0
    passed: int = 0
    failures: List[str] = field(default_factory=list)


# ---- 乱数生成 ----
@lru_cache(maxsize=None)
def configuration_domain(index: int, cap: int) -> Domain:
    name, n, pairs = CONFIGURATIONS[index]
    return make_domain(coordinate_system(n, pairs), cap, name)


def random_domain(rng: random.Random, cap: int) -> Domain:
    return configuration_domain(rng.randrange(len(CONFIGURATIONS)), cap)


@lru_cache(maxsize=None)
def _basis(algebra: JetAlgebra, mask: int, low: int, high: int) -> Tuple[Exps, ...]:
    return tuple(e for t in range(low, high + 1) for e in algebra.monomials(t)
                 if algebra.monomial_mask(e) == mask)


def random_coefficient(rng: random.Random, bounds: Bounds) -> Fraction:
    value = 0
    while value == 0:
        value = rng.randint(-bounds.max_coef, bounds.max_coef)
    return Fraction(value, rng.choice((1, 1, 2)))


def random_series(rng: random.Random, algebra: JetAlgebra, mask: int, bounds: Bounds,
                  low: int = 0, high: Optional[int] = None) -> Series:
    """次数 mask で斉次、総次数 low..high の級数"""
    high = algebra.cap if high is None else min(high, algebra.cap)
    basis = _basis(algebra, mask, low, high)
    if not basis:
        return algebra.zero()
    terms = {}
    for _ in range(rng.randint(0, bounds.max_terms)):
        terms[rng.choice(basis)] = random_coefficient(rng, bounds)
    return Series(algebra, terms)


def random_mask(rng: random.Random, algebra: JetAlgebra) -> int:
    return rng.randrange(1 << algebra.n)


def random_homogeneous(rng: random.Random, algebra: JetAlgebra, bounds: Bounds,
                       high: Optional[int] = None) -> Tuple[Series, int]:
    mask = random_mask(rng, algebra)
    return random_series(rng, algebra, mask, bounds, high=high), mask


def random_block(rng: random.Random, rows: int, cols: int, kind: str = 'any') -> np.ndarray:
    """
    kind: any / full (階数 min(rows, cols)) / singular (階数落ち)
    """
    if rows == 0 or cols == 0:
        if kind == 'singular':
            raise InternalCheckError('an empty block cannot be singular')
        return np.empty((rows, cols), dtype=object)
    for _ in range(200):
        block = fraction_matrix([[rng.randint(-2, 2) for _ in range(cols)] for _ in range(rows)])
        rank = rational_rank(block)
        if (kind == 'any' or kind == 'full' and rank == min(rows, cols)
                or kind == 'singular' and rank < min(rows, cols)):
            return block
    raise InternalCheckError(f'could not draw a {kind} {rows}x{cols} block')


def random_morphism(rng: random.Random, source: Domain, target: Domain, bounds: Bounds,
                    kind: str = 'any') -> Morphism:
    """
    線形部分は random_block で決め、2次以上の項を乱数で足す。
    kind='singular' のときは空でないブロックを1つだけ階数落ちにする。
    """
    shapes = [(len(t), len(s)) for (_, t), (_, s) in zip(target.coords.blocks(),
                                                         source.coords.blocks())]
    singular_at = None
    if kind == 'singular':
        candidates = [k for k, (r, c) in enumerate(shapes) if r and c]
        singular_at = rng.choice(candidates)
    blocks = []
    for k, (r, c) in enumerate(shapes):
        if k == singular_at:
            blocks.append(random_block(rng, r, c, 'singular'))
        else:
            blocks.append(random_block(rng, r, c, 'any' if kind == 'any' else 'full'))
    linear = linear_morphism(source, target, blocks)
    images = [f + random_series(rng, source.algebra, d.bits, bounds, low=2)
              for f, d in zip(linear.pullbacks, target.coords.degrees)]
    return Morphism(source, target, tuple(images), 'F')


def random_form(rng: random.Random, algebra: JetAlgebra, form_cap: int, k: int, mask: int,
                bounds: Bounds, high: Optional[int] = None) -> Form:
    """N 次数 k 、Z2^n 次数 mask で斉次な形式"""
    candidates = words(algebra, k)
    terms: Dict[Exps, Series] = {}
    for _ in range(rng.randint(1, bounds.max_terms)):
        word = rng.choice(candidates)
        coef = random_series(rng, algebra, mask ^ _word_mask(algebra, word), bounds, high=high)
        terms[word] = terms[word] + coef if word in terms else coef
    return Form(algebra, form_cap, terms)


def sub_domain(domain: Domain, keep: Sequence[int], name: str) -> Domain:
    coords = domain.coords
    pairs = [(coords.names[i], coords.degrees[i]) for i in keep]
    return make_domain(coordinate_system(coords.n, pairs), domain.cap, name)


def random_sub_domain(rng: random.Random, domain: Domain, name: str) -> Domain:
    """各次数ブロックから座標をいくつか選んだ領域"""
    keep = []
    for _, idx in domain.coords.blocks():
        if idx:
            keep.extend(rng.sample(idx, rng.randint(0, len(idx))))
    if not keep:
        keep.append(rng.randrange(domain.coords.size))
    return sub_domain(domain, sorted(keep), name)


# ---- 試行 ----
def _oracle_sign(a: Degree, b: Degree) -> int:
    dot = sum(x * y for x, y in zip(a.as_tuple(), b.as_tuple()))
    return -1 if dot % 2 else 1


def trial_signs(rng: random.Random, bounds: Bounds) -> List[str]:
    """四元数の次数 i, j, k の 9 通りの順序対"""
    del rng, bounds
    j, i = clifford_degrees(2)
    k = i + j
    coords = coordinate_system(3, [('i', i), ('j', j), ('k', k)])
    algebra = JetAlgebra(coords, 2)
    failures = []
    for a in ('i', 'j', 'k'):
        da = coords.degree_of(a)
        square = algebra.coordinate(a) * algebra.coordinate(a)
        if square.degree() is None or not square.degree().is_zero():
            failures.append(f'{a}^2 is not of degree 0')
        for b in ('i', 'j', 'k'):
            db = coords.degree_of(b)
            expected = _oracle_sign(da, db)
            if scalar_sign(da, db) != expected:
                failures.append(f'scalar_sign({da}, {db}) != {expected}')
            if a != b and expected != -1:
                failures.append(f'{a} and {b} do not anticommute')
            ab = algebra.coordinate(a) * algebra.coordinate(b)
            ba = algebra.coordinate(b) * algebra.coordinate(a)
            if ab != ba.scale(expected):
                failures.append(f'{a}*{b} != {expected}*{b}*{a}')
    return failures


def trial_ring(rng: random.Random, bounds: Bounds) -> List[str]:
    algebra = random_domain(rng, RING_CAP).algebra
    (f, mf), (g, mg), (h, _) = (random_homogeneous(rng, algebra, bounds) for _ in range(3))
    failures = []
    if (f * g) * h != f * (g * h):
        failures.append(f'associativity fails for {f} ; {g} ; {h}')
    if f * (g + h) != f * g + f * h or (f + g) * h != f * h + g * h:
        failures.append(f'distributivity fails for {f} ; {g} ; {h}')
    sign = -1 if pair_bits(mf, mg) else 1
    if f * g != (g * f).scale(sign):
        failures.append(f'graded commutativity fails for {f} ; {g}')
    c = rng.randrange(algebra.size)
    mc = algebra.masks[c]
    lhs = partial(f * g, c)
    rhs = partial(f, c) * g + (f * partial(g, c)).scale(-1 if pair_bits(mc, mf) else 1)
    if lhs.truncate(algebra.cap - 1) != rhs.truncate(algebra.cap - 1):
        failures.append(f'Leibniz rule fails for {f} ; {g} along {algebra.coords.names[c]}')
    return failures


def trial_chain(rng: random.Random, bounds: Bounds) -> List[str]:
    """M → N → S 。半分の試行では N, S を M の部分座標系にする"""
    domain = random_domain(rng, MORPHISM_CAP)
    if rng.random() < 0.5:
        middle, last = domain, domain
    else:
        middle = random_sub_domain(rng, domain, 'N')
        last = random_sub_domain(rng, domain, 'S')
    psi = random_morphism(rng, domain, middle, bounds)
    phi = random_morphism(rng, middle, last, bounds)
    f, _ = random_homogeneous(rng, middle.algebra, bounds)
    failures = []
    for c in domain.coords.names:
        residual = chain_rule_residual(psi, f, c)
        if not residual.is_zero():
            failures.append(f'chain rule residual {residual} along {c}')
    holds, _ = jacobian_multiplicativity_check(psi, phi)
    if not holds:
        failures.append(f'Jacobian multiplicativity fails for {psi} ; {phi}')
    if tangent_map(compose(psi, phi)) != tangent_block_product(tangent_map(phi), tangent_map(psi)):
        failures.append(f'tangent map of the composite differs for {psi} ; {phi}')
    return failures


def _oracle_det(block: np.ndarray) -> Fraction:
    """置換の総和による行列式"""
    size = block.shape[0]
    total = Fraction(0)
    for perm in permutations(range(size)):
        inversions = sum(1 for a in range(size) for b in range(a + 1, size) if perm[a] > perm[b])
        term = Fraction(-1 if inversions % 2 else 1)
        for row, col in enumerate(perm):
            term *= block[row, col]
        total += term
    return total


def random_matrix(rng: random.Random, algebra: JetAlgebra, degrees: Sequence[Degree],
                  bounds: Bounds) -> GradedMatrix:
    rows = []
    for r in degrees:
        row = []
        for c in degrees:
            entry = random_series(rng, algebra, r.bits ^ c.bits, bounds, low=1)
            if r == c:
                entry = entry + rng.randint(-1, 1)
            row.append(entry)
        rows.append(row)
    return GradedMatrix(algebra, degrees, degrees, rows)


def trial_linalg(rng: random.Random, bounds: Bounds) -> List[str]:
    domain = random_domain(rng, RING_CAP)
    degrees = list(domain.coords.degrees)
    t = random_matrix(rng, domain.algebra, degrees, bounds)
    oracle = all(_oracle_det(block) != 0 for _, block in t.diagonal_blocks())
    failures = []
    if is_invertible_deg0(t) != oracle:
        failures.append(f'invertibility criterion disagrees with the determinant oracle on {t}')
        return failures
    identity = GradedMatrix.identity(domain.algebra, degrees)
    if oracle:
        inverse = neumann_inverse(t)
        if matmul(t, inverse) != identity or matmul(inverse, t) != identity:
            failures.append(f'Neumann inverse is not two-sided for {t}')
    else:
        try:
            neumann_inverse(t)
            failures.append(f'Neumann inverse accepted a singular matrix {t}')
        except SingularError:
            pass
    return failures


def trial_ift_invertible(rng: random.Random, bounds: Bounds) -> List[str]:
    """正則な線形部分を持つ射の逆は両側逆"""
    domain = random_domain(rng, MORPHISM_CAP)
    phi = random_morphism(rng, domain, domain, bounds, 'invertible')
    inverse = invert_morphism(phi)
    identity = identity_morphism(domain)
    if compose(phi, inverse) != identity or compose(inverse, phi) != identity:
        return [f'inverse of {phi} is not two-sided']
    return []


def trial_ift_singular(rng: random.Random, bounds: Bounds) -> List[str]:
    """線形部分のブロックが1つ階数落ちしている射は逆にできない"""
    domain = random_domain(rng, MORPHISM_CAP)
    phi = random_morphism(rng, domain, domain, bounds, 'singular')
    try:
        invert_morphism(phi)
    except NotLocallyInvertibleError:
        return []
    return [f'singular morphism {phi} was inverted']


def diag_z_squared() -> GradedMatrix:
    """diag(1, z^2): 原点で階数 1 だが z ≠ 0 では階数 2"""
    algebra = configuration_domain(1, RING_CAP).algebra
    degrees = [Degree.from_tuple((0, 0)), Degree.from_tuple((1, 1))]
    z2 = algebra.coordinate('z') ** 2
    return GradedMatrix(algebra, degrees, degrees, [[1, 0], [0, z2]])


def trial_normalforms(rng: random.Random, bounds: Bounds) -> List[str]:
    domain = random_domain(rng, MORPHISM_CAP)
    small = random_sub_domain(rng, domain, 'V')
    failures = []

    submersion = random_morphism(rng, domain, small, bounds, 'full')
    nf = submersion_normal_form(submersion)
    if not nf.certificate or compose(nf.change.inverse, submersion) != nf.standard:
        failures.append(f'submersion normal form fails for {submersion}')
    if not _is_inverse_pair(nf.change.forward, nf.change.inverse):
        failures.append('submersion coordinate change is not a diffeomorphism')

    immersion = random_morphism(rng, small, domain, bounds, 'full')
    nf = immersion_normal_form(immersion)
    if not nf.certificate or compose(immersion, nf.change.forward) != nf.standard:
        failures.append(f'immersion normal form fails for {immersion}')

    # サブマーションのあとに単射な射を続けたものは定数階数 (線形と非線形の両方)
    blocks = [random_block(rng, len(t), len(s), 'full')
              for (_, t), (_, s) in zip(domain.coords.blocks(), small.coords.blocks())]
    for outer in (linear_morphism(small, domain, blocks), immersion):
        failures.extend(_check_factorization(compose(submersion, outer)))

    if constant_rank_decompose(diag_z_squared()) is not None:
        failures.append('diag(1, z^2) accepted as constant rank')
    return failures


def _check_factorization(phi: Morphism) -> List[str]:
    factorization = constant_rank_factor(phi)
    if factorization is None:
        return [f'constant rank factorization not found for {phi}']
    failures = []
    if compose(factorization.phi1, factorization.phi2) != phi:
        failures.append(f'phi2 after phi1 differs from {phi}')
    kind1, _ = classify_point(factorization.phi1)
    kind2, _ = classify_point(factorization.phi2)
    if kind1 not in (PointClass.SUBMERSION, PointClass.DIFFEO_CANDIDATE):
        failures.append(f'phi1 classified as {kind1.value}')
    if kind2 not in (PointClass.IMMERSION, PointClass.DIFFEO_CANDIDATE):
        failures.append(f'phi2 classified as {kind2.value}')
    return failures


def _is_inverse_pair(forward: Morphism, inverse: Morphism) -> bool:
    return (compose(forward, inverse) == identity_morphism(forward.source)
            and compose(inverse, forward) == identity_morphism(forward.target))


def trial_forms(rng: random.Random, bounds: Bounds) -> List[str]:
    domain = random_domain(rng, MORPHISM_CAP)
    algebra = domain.algebra
    k_alpha, k_beta = rng.randint(0, 1), rng.randint(0, 2)
    m_alpha, m_beta = random_mask(rng, algebra), random_mask(rng, algebra)
    alpha = random_form(rng, algebra, FORM_CAP, k_alpha, m_alpha, bounds)
    beta = random_form(rng, algebra, FORM_CAP, k_beta, m_beta, bounds)
    failures = []
    if not exterior_derivative(exterior_derivative(beta)).is_zero():
        failures.append(f'd^2 != 0 on {beta}')
    cut = algebra.cap - 1
    lhs = exterior_derivative(wedge(alpha, beta)).truncate(cut)
    second = wedge(alpha, exterior_derivative(beta))
    if k_alpha % 2:
        second = -second
    rhs = (wedge(exterior_derivative(alpha), beta) + second).truncate(cut)
    if lhs != rhs:
        failures.append(f'graded derivation fails for {alpha} ; {beta}')
    sign = -1 if (pair_bits(m_alpha, m_beta) + k_alpha * k_beta) % 2 else 1
    if wedge(alpha, beta) != wedge(beta, alpha).scale(sign):
        failures.append(f'Deligne commutation fails for {alpha} ; {beta}')
    phi = random_morphism(rng, domain, domain, bounds)
    omega = random_form(rng, algebra, FORM_CAP, rng.randint(0, 2), random_mask(rng, algebra), bounds)
    natural_lhs = exterior_derivative(form_pullback(phi, omega)).truncate(cut)
    natural_rhs = form_pullback(phi, exterior_derivative(omega)).truncate(cut)
    if natural_lhs != natural_rhs:
        failures.append(f'pullback does not commute with d for {omega}')
    return failures


def trial_homotopy(rng: random.Random, bounds: Bounds) -> List[str]:
    """(dK - Kd)ω = (-1)^(k-1) (ω - s*π*ω) を z (偶パリティの非零次数) に沿って確かめる"""
    domain = configuration_domain(1, RING_CAP)
    algebra = domain.algebra
    k = rng.randint(0, FORM_CAP - 2)
    omega = random_form(rng, algebra, FORM_CAP, k, random_mask(rng, algebra), bounds,
                        high=algebra.cap - 1)
    lhs = exterior_derivative(homotopy_K(omega, 'z')) - homotopy_K(exterior_derivative(omega), 'z')
    rhs = omega - restrict_zero(omega, 'z')
    if k % 2 == 0:
        rhs = -rhs
    if lhs != rhs:
        return [f'homotopy identity fails for the {k}-form {omega}']
    return []


def make_poincare_trial(config: DictConfig) -> Callable[[random.Random, Bounds], List[str]]:
    kmax, wmax = int(config.poincare.kmax), int(config.poincare.wmax)
    n_jobs = int(config.n_jobs)

    def trial(rng: random.Random, bounds: Bounds) -> List[str]:
        del rng, bounds
        failures = []
        for sig in config.poincare.signatures:
            coords = validate_signature(DegreeSignature(int(sig.n), tuple(int(v) for v in sig.q)),
                                        int(sig.p))
            domain = make_domain(coords, wmax, f'R^{coords.dimension_text()}')
            totals = derham_ranks(domain, kmax, wmax, n_jobs=n_jobs).totals()
            if totals != [1] + [0] * kmax:
                failures.append(f'{domain.name} (n={sig.n}) has cohomology {totals}')
        return failures

    return trial


def trial_roundtrip(rng: random.Random, bounds: Bounds) -> List[str]:
    """テキストに書き出して読み戻すと元に戻る"""
    # 循環 import を避けるため実行時に読み込む
    from znjet.cli import Executor  # pylint: disable=import-outside-toplevel
    domain = random_domain(rng, RING_CAP)
    algebra = domain.algebra
    names = list(algebra.coords.names)
    executor = Executor(DictConfig({'cap_override': None}))
    executor.form_caps[algebra] = FORM_CAP
    if rng.random() < 0.5:
        value, _ = random_homogeneous(rng, algebra, bounds)
        value = value + random_homogeneous(rng, algebra, bounds)[0]
    else:
        value = random_form(rng, algebra, FORM_CAP, rng.randint(0, 2),
                            random_mask(rng, algebra), bounds, high=algebra.cap - 1)
    text = str(value)
    parsed = executor.evaluate(parse_expression(text, names), domain)
    if isinstance(value, Form):
        parsed = executor.as_form(parsed)
    if parsed != value:
        return [f'round trip of {text!r} gave {parsed}']
    return []


def suites(config: DictConfig) -> Dict[str, Callable[[random.Random, Bounds], List[str]]]:
    return {
        'signs': trial_signs,
        'ring': trial_ring,
        'chain': trial_chain,
        'linalg': trial_linalg,
        'ift_invertible': trial_ift_invertible,
        'ift_singular': trial_ift_singular,
        'normalforms': trial_normalforms,
        'forms': trial_forms,
        'homotopy': trial_homotopy,
        'poincare': make_poincare_trial(config),
        'roundtrip': trial_roundtrip,
    }


def run_checks(config: DictConfig, seed: int, suite: str = 'all') -> List[SuiteResult]:
    """
    各スイートを config.check.<name> 回ずつ実行する。
    試行ごとに seed から決まる乱数列を使うので結果は再現できる。
    """
    available = suites(config)
    names = list(available) if suite == 'all' else [suite]
    bounds = Bounds(int(config.check.max_terms), int(config.check.max_coef))
    results = []
    for name in names:
        if name not in available:
            raise ArgumentError(f'unknown check suite {name!r}')
        index = list(available).index(name)
        trials = int(config.check[name])
        result = SuiteResult(name, trials)
        for t in tqdm(range(trials), desc=name, disable=not config.progress):
            rng = random.Random(f'{seed}:{index}:{t}')
            failures = available[name](rng, bounds)
            if failures:
                result.failures.extend(f'trial {t}: {message}' for message in failures)
            else:
                result.passed += 1
        results.append(result)
    return results
