#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
射、合成、積、ヤコビ行列、接写像のテスト
"""
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from znjet.errors import BasepointError, DomainMismatchError
from znjet.gmorphism import (PointClass, TangentMap, chain_rule_residual,
                             classify_point, compose, derivative_matrix, graded_jacobian,
                             identity_morphism, jacobian_multiplicativity_check,
                             make_domain, make_morphism, pair_morphism,
                             product_domain, product_morphism,
                             push_tangent_vector, reduced_morphism,
                             tangent_block_product, tangent_map)
from znjet.glinalg import GradedMatrix, graded_transpose
from znjet.grading import DegreeSignature, coordinate_system, validate_signature
from znjet.selfcheck import Bounds, trial_chain


@pytest.fixture
def psi(xz_domain, yw_domain):
    """y ↦ x + z^2, w ↦ z"""
    x, z = xz_domain.algebra.coordinates()
    return make_morphism(xz_domain, yw_domain, {'y': x + z ** 2, 'w': z}, 'psi')


@pytest.fixture
def st_domain():
    return make_domain(coordinate_system(2, [('s', (0, 0)), ('t', (1, 1))]), 4, 'S')


@pytest.fixture
def phi(yw_domain, st_domain):
    """s ↦ y^2, t ↦ w"""
    y, w = yw_domain.algebra.coordinates()
    return make_morphism(yw_domain, st_domain, {'s': y ** 2, 't': w}, 'phi')


def test_identity_and_basepoint(xz_domain, yw_domain):
    ident = identity_morphism(xz_domain)
    assert ident.pullbacks == tuple(xz_domain.algebra.coordinates())
    x, z = xz_domain.algebra.coordinates()
    with pytest.raises(BasepointError):
        make_morphism(xz_domain, yw_domain, [1 + x, z])


def test_compose(psi, phi, xz_domain):
    x, z = xz_domain.algebra.coordinates()
    composite = compose(psi, phi)
    assert composite.pullback_of('s') == x ** 2 + (x * z ** 2).scale(2) + z ** 4
    assert composite.pullback_of('t') == z
    assert compose(identity_morphism(xz_domain), psi) == psi
    with pytest.raises(DomainMismatchError):
        compose(phi, psi)


def test_product_domain_dimensions():
    def domain(p, q, name):
        return make_domain(validate_signature(DegreeSignature(2, q), p), 4, name)

    product, _, _ = product_domain(domain(1, (0, 0, 0), 'A'), domain(0, (1, 0, 0), 'B'))
    assert product.dimension_text() == '1|1,0,0'
    product, pi1, pi2 = product_domain(domain(1, (1, 1, 1), 'A'), domain(1, (1, 1, 1), 'B'))
    assert product.dimension_text() == '2|2,2,2'
    assert pi1.target.coords.names == pi2.target.coords.names


def test_pair_morphism_projections(psi, xz_domain):
    paired = pair_morphism(psi, psi)
    assert paired.target.dimension_text() == '2|2,0,0'
    _, pi1, pi2 = product_domain(psi.target, psi.target)
    assert compose(paired, pi1) == psi
    assert compose(paired, pi2) == psi
    zero = make_morphism(xz_domain, xz_domain, [xz_domain.algebra.zero()] * 2)
    assert all(f.is_zero() for f in pair_morphism(zero, zero).pullbacks)


def test_product_and_reduced(psi, xz_domain):
    square = product_morphism(psi, psi)
    assert square.source.dimension_text() == '2|2,0,0'
    reduced = reduced_morphism(psi)
    (x,) = reduced.source.algebra.coordinates()
    assert reduced.pullbacks == (x,)


def test_graded_jacobian(psi, xz_domain):
    jac = graded_jacobian(psi)
    assert jac.to_rows() == [['1', '2*z'], ['0', '1']]
    ident = graded_jacobian(identity_morphism(xz_domain))
    assert ident == GradedMatrix.identity(xz_domain.algebra, xz_domain.coords.degrees)
    assert graded_transpose(derivative_matrix(psi)) == jac


def test_jacobian_multiplicativity(psi, phi, xz_domain):
    holds, residual = jacobian_multiplicativity_check(psi, phi)
    assert holds and residual.is_zero()
    ident = identity_morphism(xz_domain)
    assert jacobian_multiplicativity_check(ident, ident)[0]


def test_jacobian_multiplicativity_through_a_line(xz_domain, yw_domain):
    # U (1|1,0,0) → L (1|0,0,0) → V (1|1,0,0)
    line = make_domain(coordinate_system(2, [('s', (0, 0))]), 4, 'L')
    x, z = xz_domain.algebra.coordinates()
    (s,) = line.algebra.coordinates()
    down = make_morphism(xz_domain, line, {'s': x + z ** 2})
    up = make_morphism(line, yw_domain, {'y': s + s ** 2, 'w': line.algebra.zero()})
    holds, residual = jacobian_multiplicativity_check(down, up)
    assert holds
    assert residual.algebra == xz_domain.algebra
    assert residual.shape == (2, 2)
    composite = tangent_map(compose(down, up))
    assert composite == tangent_block_product(tangent_map(up), tangent_map(down))
    assert composite.to_rows() == [('(0,0)', [['1']]), ('(1,1)', [['0']])]


def test_tangent_block_product(psi, phi):
    product = tangent_block_product(tangent_map(phi), tangent_map(psi))
    assert product == tangent_map(compose(psi, phi))
    assert product != TangentMap(product.degrees, tuple(b * 2 for b in product.blocks))


def test_tangent_map(psi, xz_domain, yw_domain):
    tm = tangent_map(psi)
    assert tm.to_rows() == [('(0,0)', [['1']]), ('(1,1)', [['1']])]
    x, z = xz_domain.algebra.coordinates()
    scaled = make_morphism(xz_domain, yw_domain, [x, z.scale(2) + z ** 3])
    assert tangent_map(scaled).to_rows()[1] == ('(1,1)', [['2']])
    assert push_tangent_vector(scaled, [1, 1]) == [Fraction(1), Fraction(2)]


def test_chain_rule(psi, yw_domain):
    y, _ = yw_domain.algebra.coordinates()
    assert chain_rule_residual(psi, y ** 2, 'x').is_zero()
    assert chain_rule_residual(psi, y, 'z').is_zero()


def test_classify_point():
    one = make_domain(validate_signature(DegreeSignature(2, (0, 0, 0)), 1), 3, 'L')
    two = make_domain(validate_signature(DegreeSignature(2, (0, 0, 0)), 2), 3, 'P')
    (x,) = one.algebra.coordinates()
    x1, x2 = two.algebra.coordinates()
    inclusion = make_morphism(one, two, [x, one.algebra.zero()])
    projection = make_morphism(two, one, [x1])
    assert classify_point(identity_morphism(two))[0] is PointClass.DIFFEO_CANDIDATE
    assert classify_point(inclusion)[0] is PointClass.IMMERSION
    assert classify_point(projection)[0] is PointClass.SUBMERSION
    collapse = make_morphism(two, two, [x1 ** 2, x2 ** 2])
    kind, profile = classify_point(collapse)
    assert kind is PointClass.NONE
    assert str(profile) == '0|0,0,0'


def test_mismatched_cap(xz_domain, yw_domain):
    with pytest.raises(DomainMismatchError):
        make_morphism(xz_domain, make_domain(yw_domain.coords, 3), xz_domain.algebra.coordinates())


@settings(deadline=None, max_examples=15)
@given(st.integers(0, 2 ** 32 - 1))
def test_chain_rule_random(seed):
    assert trial_chain(random.Random(seed), Bounds()) == []
