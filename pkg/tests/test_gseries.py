#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
ジェット環の演算のテスト
"""
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from znjet.errors import (BasepointError, DegreeError, NonUnitError,
                          RingError, UnsupportedVariableError)
from znjet.grading import Degree
from znjet.gseries import (add, epsilon, homogeneous_part, integrate, invert,
                           is_homogeneous, j_order, mul, partial, scale, set_zero,
                           substitute, to_text)
from znjet.selfcheck import Bounds, trial_ring


def coords_of(domain):
    return [domain.algebra.coordinate(c) for c in domain.coords.names]


def test_odd_square_vanishes(quaternionic):
    _, _, a, _ = coords_of(quaternionic)
    assert (a * a).is_zero()


def test_z_anticommutes_with_odd_a(quaternionic):
    _, z, a, _ = coords_of(quaternionic)
    assert z * a == -(a * z)
    assert not (z * z).is_zero()


def test_difference_of_squares(quaternionic):
    x, _, a, b = coords_of(quaternionic)
    assert (x + a * b) * (x - a * b) == x ** 2
    assert a * b == b * a


def test_add_and_scale(quaternionic):
    x, z, _, _ = coords_of(quaternionic)
    f = x ** 2 + z
    assert f + quaternionic.algebra.zero() == f
    assert scale(0, f).is_zero()
    assert (x + z) + (x - z) == x.scale(2)
    assert add(x, z) == x + z
    assert mul(x + z, x - z) == x ** 2 - z ** 2


def test_partial_signs(quaternionic):
    x, z, a, b = coords_of(quaternionic)
    assert partial(x ** 2, 'x') == x.scale(2)
    assert partial(a * b, 'b') == a
    assert partial(z * a, 'a') == -z


def test_epsilon_and_j_order(quaternionic):
    x, z, a, b = coords_of(quaternionic)
    assert epsilon(1 + z ** 2 + x) == 1
    assert epsilon(z * a) == 0
    assert epsilon(x * z ** 2 - 3) == -3
    assert j_order(x ** 3) == 0
    assert j_order(a * b + z ** 3) == 2
    assert j_order(quaternionic.algebra.zero()) == float('inf')


def test_invert(quaternionic):
    algebra = quaternionic.algebra.with_cap(3)
    z = algebra.coordinate('z')
    assert invert(1 + z * z) * (1 + z * z) == 1
    assert invert(algebra.constant(2)) == Fraction(1, 2)
    with pytest.raises(NonUnitError):
        invert(z)
    with pytest.raises(DegreeError):
        invert(1 + z)


def test_invert_geometric_series(yw_domain):
    # 次数 0 の偶座標 y で 1/(1+y) を確かめる
    algebra = yw_domain.algebra.with_cap(3)
    y = algebra.coordinate('y')
    assert invert(1 + y) == 1 - y + y ** 2 - y ** 3


def test_substitute(xz_domain, yw_domain):
    x, z = coords_of(xz_domain)
    y, _ = coords_of(yw_domain)
    result = substitute(y ** 2, [x + z ** 2, z])
    assert result == x ** 2 + (x * z ** 2).scale(2) + z ** 4
    assert substitute(y ** 2, [x, z]) == x ** 2
    with pytest.raises(BasepointError):
        substitute(y, [1 + x, z])
    with pytest.raises(DegreeError):
        substitute(y, [z, z])


def test_homogeneous_part(quaternionic):
    x, z, a, b = coords_of(quaternionic)
    assert homogeneous_part(x + a, Degree.zero(2)) == x
    assert is_homogeneous(z ** 2, Degree.zero(2))
    assert is_homogeneous(a * b, Degree.from_tuple((1, 1)))


def test_ring_error(quaternionic, xz_domain):
    with pytest.raises(RingError):
        _ = quaternionic.algebra.coordinate('x') + xz_domain.algebra.coordinate('x')


def test_integrate_and_set_zero(quaternionic):
    x, z, a, _ = coords_of(quaternionic)
    assert integrate(z, 'z') == (z ** 2).scale(Fraction(1, 2))
    assert partial(integrate(a * z, 'z'), 'z') == a * z
    assert set_zero(x + z * a, 'z') == x
    with pytest.raises(UnsupportedVariableError):
        integrate(x, 'a')


def test_text_form(quaternionic):
    x, z, a, _ = coords_of(quaternionic)
    assert to_text(x ** 2 + (z * a).scale(Fraction(1, 2))) == 'x^2 + 1/2*z*a'
    assert to_text(quaternionic.algebra.zero()) == '0'
    assert to_text(-x) == '-x'


@settings(deadline=None, max_examples=30)
@given(st.integers(0, 2 ** 32 - 1))
def test_ring_laws(seed):
    assert trial_ring(random.Random(seed), Bounds()) == []
