#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
逆写像、サブマーション・イマーションの標準形、定数階数の分解のテスト
"""
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from znjet.errors import (DomainMismatchError, NotLocallyInvertibleError,
                          NotSubmersionError)
from znjet.gmorphism import (PointClass, classify_point, compose,
                             identity_morphism, make_domain, make_morphism)
from znjet.grading import coordinate_system
from znjet.localforms import (NormalFormKind, constant_rank_factor,
                              immersion_normal_form, invert_morphism,
                              normal_form, submersion_normal_form)
from znjet.selfcheck import (Bounds, run_checks, trial_ift_invertible,
                             trial_ift_singular, trial_normalforms)


def _even_domain(names, name):
    return make_domain(coordinate_system(2, [(s, (0, 0)) for s in names]), 4, name)


def test_invert_example(xz_domain, yw_domain):
    x, z = xz_domain.algebra.coordinates()
    y, w = yw_domain.algebra.coordinates()
    psi = make_morphism(xz_domain, yw_domain, {'y': x + z ** 2, 'w': z}, 'psi')
    inverse = invert_morphism(psi)
    assert inverse.source == yw_domain and inverse.target == xz_domain
    assert inverse.pullback_of('x') == y - w ** 2
    assert inverse.pullback_of('z') == w
    assert compose(psi, inverse) == identity_morphism(xz_domain)
    assert compose(inverse, psi) == identity_morphism(yw_domain)


def test_invert_identity(quaternionic):
    ident = identity_morphism(quaternionic)
    assert invert_morphism(ident) == ident


def test_invert_odd_coefficient(xz_domain, yw_domain):
    """w ↦ z(1 + x) の逆は z ↦ w(1 - y + y^2 - y^3)"""
    x, z = xz_domain.algebra.coordinates()
    y, w = yw_domain.algebra.coordinates()
    phi = make_morphism(xz_domain, yw_domain, {'y': x, 'w': z + z * x})
    inverse = invert_morphism(phi)
    assert inverse.pullback_of('z') == w - w * y + w * y ** 2 - w * y ** 3
    assert compose(inverse, phi) == identity_morphism(yw_domain)


def test_invert_rejects(xz_domain, yw_domain):
    x, z = xz_domain.algebra.coordinates()
    with pytest.raises(NotLocallyInvertibleError):
        invert_morphism(make_morphism(xz_domain, yw_domain, {'y': x ** 2, 'w': z}))
    line = _even_domain(['s'], 'L')
    with pytest.raises(DomainMismatchError):
        invert_morphism(make_morphism(xz_domain, line, {'s': x}))


def test_submersion_normal_form(xz_domain):
    x, z = xz_domain.algebra.coordinates()
    line = _even_domain(['y'], 'T')
    phi = make_morphism(xz_domain, line, {'y': x + z ** 2})
    nf = submersion_normal_form(phi)
    assert nf.kind is NormalFormKind.SUBMERSION
    assert nf.certificate
    assert nf.selected == ('x',)
    assert nf.complement.coords.names == ('z',)
    assert compose(nf.change.inverse, phi) == nf.standard
    assert nf.change.check()


def test_immersion_normal_form():
    line = _even_domain(['s'], 'S')
    plane = _even_domain(['y1', 'y2'], 'P')
    s = line.algebra.coordinate('s')
    phi = make_morphism(line, plane, {'y1': s, 'y2': s ** 2})
    nf = immersion_normal_form(phi)
    assert nf.kind is NormalFormKind.IMMERSION
    assert nf.certificate
    assert nf.selected == ('y1',)
    assert nf.complement.coords.names == ('y2',)
    assert compose(phi, nf.change.forward) == nf.standard
    assert normal_form(phi).kind is NormalFormKind.IMMERSION


def test_normal_form_rejects_degenerate(xz_domain, yw_domain):
    x, z = xz_domain.algebra.coordinates()
    phi = make_morphism(xz_domain, yw_domain, {'y': x ** 2, 'w': z})
    with pytest.raises(NotSubmersionError):
        normal_form(phi)


def test_constant_rank_factor():
    line = _even_domain(['x1'], 'S')
    plane = _even_domain(['y1', 'y2'], 'P')
    x1 = line.algebra.coordinate('x1')
    phi = make_morphism(line, plane, {'y1': x1, 'y2': x1 ** 2})
    factorization = constant_rank_factor(phi)
    assert factorization is not None
    assert factorization.certificate
    assert str(factorization.profile).startswith('1|')
    assert factorization.rows == ('y1',)
    assert factorization.cols == ('x1',)
    w1 = factorization.middle.algebra.coordinate('w1')
    assert factorization.phi2.pullback_of('y1') == w1
    assert factorization.phi2.pullback_of('y2') == w1 ** 2
    assert compose(factorization.phi1, factorization.phi2) == phi
    kind, _ = classify_point(factorization.phi2)
    assert kind in (PointClass.IMMERSION, PointClass.DIFFEO_CANDIDATE)


@pytest.mark.parametrize('cap', [3, 4, 5])
@pytest.mark.parametrize('power', [2, 3])
def test_constant_rank_factor_through_a_curve(cap, power):
    # y1 ↦ u, y2 ↦ u^power (u = x1 + x2^2) は w ↦ (w, w^power) を通る
    plane = make_domain(coordinate_system(2, [('x1', (0, 0)), ('x2', (0, 0))]), cap, 'S')
    target = make_domain(coordinate_system(2, [('y1', (0, 0)), ('y2', (0, 0))]), cap, 'P')
    x1, x2 = plane.algebra.coordinates()
    u = x1 + x2 ** 2
    phi = make_morphism(plane, target, {'y1': u, 'y2': u ** power})
    factorization = constant_rank_factor(phi)
    assert factorization is not None
    assert str(factorization.profile) == '1|0,0,0'
    assert factorization.rows == ('y1',)
    assert factorization.phi1.pullback_of('w1') == u
    w1 = factorization.middle.algebra.coordinate('w1')
    assert factorization.phi2.pullback_of('y2') == w1 ** power
    assert compose(factorization.phi1, factorization.phi2) == phi


def test_constant_rank_factor_rejects(xz_domain, yw_domain):
    x, z = xz_domain.algebra.coordinates()
    phi = make_morphism(xz_domain, yw_domain, {'y': x ** 2, 'w': z})
    assert constant_rank_factor(phi) is None


@settings(deadline=None, max_examples=15)
@given(st.integers(0, 2 ** 32 - 1))
def test_inverse_is_two_sided(seed):
    assert trial_ift_invertible(random.Random(seed), Bounds()) == []


@settings(deadline=None, max_examples=15)
@given(st.integers(0, 2 ** 32 - 1))
def test_singular_is_rejected(seed):
    assert trial_ift_singular(random.Random(seed), Bounds()) == []


def test_ift_suites_are_counted_separately(config):
    assert config.check.ift_invertible == 100
    assert config.check.ift_singular == 100
    config.check.ift_invertible = 3
    config.check.ift_singular = 2
    invertible = run_checks(config, 5, 'ift_invertible')
    singular = run_checks(config, 5, 'ift_singular')
    assert [(r.name, r.trials, r.passed) for r in invertible + singular] == [
        ('ift_invertible', 3, 3), ('ift_singular', 2, 2)]


@settings(deadline=None, max_examples=10)
@given(st.integers(0, 2 ** 32 - 1))
def test_normal_forms_random(seed):
    assert trial_normalforms(random.Random(seed), Bounds()) == []
