#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
微分形式、ベクトル場、ホモトピー作用素、de Rham コホモロジーのテスト
"""
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from znjet.errors import (CapError, DegreeError, NoPotentialError,
                          NotClosedError, UnsupportedVariableError)
from znjet.gforms import (Form, VectorField, apply, bracket,
                          cotangent_vector_at_basepoint, derham_ranks,
                          differential, exterior_derivative, find_potential,
                          form_pullback, homotopy_K, pair,
                          tangent_vector_at_basepoint, wedge, wedge_power)
from znjet.gmorphism import identity_morphism, make_domain, make_morphism
from znjet.grading import DegreeSignature, coordinate_system, validate_signature
from znjet.selfcheck import (Bounds, make_poincare_trial, trial_forms,
                             trial_homotopy)


@pytest.fixture
def algebra(quaternionic):
    return quaternionic.algebra


def dgen(algebra, name):
    return Form.generator(algebra, name)


def test_differential(algebra):
    x, _, a, b = algebra.coordinates()
    assert differential(x ** 2) == dgen(algebra, 'x').rmul(x.scale(2))
    assert differential(a * b) == dgen(algebra, 'a').rmul(b) + dgen(algebra, 'b').rmul(a)
    assert differential(algebra.constant(Fraction(3, 2))).is_zero()
    assert str(differential(x ** 2)) == 'd(x)*(2*x)'


def test_wedge_signs(algebra):
    x, _, a, _ = algebra.coordinates()
    dx, da = dgen(algebra, 'x'), dgen(algebra, 'a')
    assert wedge(dx, dx).is_zero()
    assert not wedge(da, da).is_zero()
    assert not wedge_power(da, 4).is_zero()
    assert wedge(dx.rmul(a), da.rmul(x)) == -wedge(dx, da).rmul(a * x)


def test_wedge_cap(algebra):
    da = dgen(algebra, 'a')
    with pytest.raises(CapError):
        wedge(wedge_power(da, 3), wedge_power(da, 2))


def test_exterior_derivative(algebra):
    x, z, _, _ = algebra.coordinates()
    dx, dz = dgen(algebra, 'x'), dgen(algebra, 'z')
    assert exterior_derivative(dx.rmul(x ** 2)).is_zero()
    assert exterior_derivative(dz.rmul(z)).is_zero()
    f = x * z + z ** 3
    assert exterior_derivative(differential(f)).is_zero()
    assert exterior_derivative(Form.from_series(f)) == differential(f)


def test_form_pullback(xz_domain, yw_domain):
    x, z = xz_domain.algebra.coordinates()
    psi = make_morphism(xz_domain, yw_domain, {'y': x + z ** 2, 'w': z})
    dy = dgen(yw_domain.algebra, 'y')
    expected = dgen(xz_domain.algebra, 'x') + dgen(xz_domain.algebra, 'z').rmul(z.scale(2))
    assert form_pullback(psi, dy) == expected
    omega = wedge(dgen(yw_domain.algebra, 'y'), dgen(yw_domain.algebra, 'w'))
    assert form_pullback(identity_morphism(yw_domain), omega) == omega


def test_pairing(algebra):
    x, z, a, _ = algebra.coordinates()
    d_x = VectorField.coordinate(algebra, 'x')
    assert pair(d_x, dgen(algebra, 'x')) == 1
    assert pair(d_x.lmul(z), dgen(algebra, 'x').rmul(a)) == z * a
    vector = VectorField(algebra, [z, x, algebra.zero(), algebra.zero()])
    f = x ** 2 * z + z ** 3
    assert pair(vector, differential(f)) == apply(vector, f)
    with pytest.raises(DegreeError):
        pair(d_x, wedge(dgen(algebra, 'x'), dgen(algebra, 'z')))


def test_basepoint_vectors(algebra):
    x, z, _, _ = algebra.coordinates()
    vector = VectorField(algebra, [1 + x, z, algebra.zero(), algebra.zero()])
    assert tangent_vector_at_basepoint(vector) == [1, 0, 0, 0]
    omega = dgen(algebra, 'x').scale(3) + dgen(algebra, 'z').rmul(x)
    assert cotangent_vector_at_basepoint(omega) == [3, 0, 0, 0]


def test_bracket(algebra):
    x = algebra.coordinate('x')
    d_x = VectorField.coordinate(algebra, 'x')
    d_a = VectorField.coordinate(algebra, 'a')
    assert bracket(d_x, d_x).is_zero()
    assert bracket(d_a, d_a).is_zero()
    assert bracket(d_x.lmul(x), d_x) == d_x.scale(-1)
    with pytest.raises(DegreeError):
        bracket(d_x + d_a, d_x)


def test_homotopy(algebra):
    x, z, _, _ = algebra.coordinates()
    dz = dgen(algebra, 'z')
    assert homotopy_K(dz.rmul(z), 'z') == Form.from_series((z ** 2).scale(Fraction(1, 2)))
    assert homotopy_K(dgen(algebra, 'x').rmul(x * z), 'z').is_zero()
    assert homotopy_K(dz.rmul(z ** 3), 'z') == Form.from_series((z ** 4).scale(Fraction(1, 4)))
    with pytest.raises(UnsupportedVariableError):
        homotopy_K(dz, 'a')
    with pytest.raises(UnsupportedVariableError):
        homotopy_K(dz, 'x')
    with pytest.raises(CapError):
        homotopy_K(dz.rmul(z ** 4), 'z')


def test_derham_single_even():
    domain = make_domain(coordinate_system(2, [('z', (1, 1))]), 3, 'Z')
    table = derham_ranks(domain, 2, 3)
    cells = {(c.k, c.w): c for c in table.cells}
    assert (cells[(0, 1)].dim, cells[(0, 1)].rank, cells[(0, 1)].h) == (1, 1, 0)
    assert (cells[(1, 1)].dim, cells[(1, 1)].h) == (1, 0)
    assert (cells[(0, 0)].h, cells[(1, 0)].h, cells[(2, 0)].h) == (1, 0, 0)
    assert table.totals() == [1, 0, 0]


def test_derham_single_odd_parallel():
    coords = validate_signature(DegreeSignature(2, (0, 1, 0)), 0)
    domain = make_domain(coords, 4)
    serial = derham_ranks(domain, 3, 4)
    assert serial.totals() == [1, 0, 0, 0]
    assert derham_ranks(domain, 3, 4, n_jobs=2) == serial


def test_poincare_signatures(config):
    assert make_poincare_trial(config)(random.Random(0), Bounds()) == []


def test_find_potential(algebra):
    z = algebra.coordinate('z')
    a = algebra.coordinate('a')
    dz, da = dgen(algebra, 'z'), dgen(algebra, 'a')
    assert find_potential(dz.rmul(z)) == Form.from_series((z ** 2).scale(Fraction(1, 2)))
    assert find_potential(da) == Form.from_series(a)
    omega = wedge(da, da).scale(2)
    assert exterior_derivative(find_potential(omega)) == omega
    f = z ** 2 + algebra.coordinate('x') * a * algebra.coordinate('b')
    assert exterior_derivative(find_potential(differential(f))) == differential(f)


def test_find_potential_errors(algebra):
    a = algebra.coordinate('a')
    with pytest.raises(NotClosedError):
        find_potential(dgen(algebra, 'a').rmul(a).scale(2))
    with pytest.raises(NoPotentialError):
        find_potential(Form.from_series(algebra.one()))


@settings(deadline=None, max_examples=20)
@given(st.integers(0, 2 ** 32 - 1))
def test_form_identities(seed):
    assert trial_forms(random.Random(seed), Bounds()) == []


@settings(deadline=None, max_examples=20)
@given(st.integers(0, 2 ** 32 - 1))
def test_homotopy_identity(seed):
    assert trial_homotopy(random.Random(seed), Bounds()) == []
