#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
次数、符号規則、標準順序、座標系のテスト
"""
import pytest
from hypothesis import given
from hypothesis import strategies as st

from znjet.errors import (ArgumentError, DegreeError, DimensionError,
                          SignatureError, UnknownCoordinateError)
from znjet.grading import (CoordinateSystem, Degree, DegreeSignature,
                           clifford_degrees, coordinate_system, parity,
                           parse_degree, scalar_sign, standard_order,
                           validate_signature)


def deg(*values):
    return Degree.from_tuple(values)


def test_parity():
    assert parity(deg(0, 0)) == 0
    assert parity(deg(1, 1)) == 0
    assert parity(deg(0, 1)) == 1
    assert parity(deg(0, 1, 1)) == 0


def test_scalar_sign_examples():
    assert scalar_sign(deg(0, 1, 1), deg(1, 0, 1)) == -1
    assert scalar_sign(deg(0, 1), deg(1, 0)) == 1
    assert scalar_sign(deg(1, 1), deg(0, 1)) == -1


@given(st.integers(0, 7), st.integers(0, 7))
def test_scalar_sign_matches_dot_product(a, b):
    da, db = Degree(3, a), Degree(3, b)
    dot = sum(x * y for x, y in zip(da.as_tuple(), db.as_tuple()))
    assert scalar_sign(da, db) == (-1) ** dot
    assert scalar_sign(Degree.zero(3), db) == 1
    assert scalar_sign(da, db) == scalar_sign(db, da)


def test_scalar_sign_dimension_mismatch():
    with pytest.raises(DimensionError):
        scalar_sign(deg(0, 1), deg(0, 1, 1))


def test_standard_order():
    assert [d.as_tuple() for d in standard_order(2)] == [(0, 0), (1, 1), (0, 1), (1, 0)]
    assert [d.as_tuple() for d in standard_order(1)] == [(0,), (1,)]
    order3 = [d.as_tuple() for d in standard_order(3)]
    assert len(order3) == 8
    assert order3[:4] == [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]
    with pytest.raises(ArgumentError):
        standard_order(0)


def test_clifford_degrees_are_quaternionic():
    j, i = clifford_degrees(2)
    k = i + j
    assert i.as_tuple() == (0, 1, 1)
    assert j.as_tuple() == (1, 0, 1)
    assert k.as_tuple() == (1, 1, 0)
    for a in (i, j, k):
        assert a.parity == 0
        for b in (i, j, k):
            if a != b:
                assert scalar_sign(a, b) == -1


def test_parse_degree():
    assert parse_degree('(0,1,1)').as_tuple() == (0, 1, 1)
    with pytest.raises(DegreeError):
        parse_degree('0,1')
    with pytest.raises(DimensionError):
        parse_degree('(0,1)', n=3)


def test_validate_signature():
    only_even = validate_signature(DegreeSignature(2, (0, 0, 0)), p=2)
    assert only_even.names == ('x1', 'x2')
    full = validate_signature(DegreeSignature(2, (1, 1, 1)), p=1)
    assert [d.as_tuple() for d in full.degrees] == [(0, 0), (1, 1), (0, 1), (1, 0)]
    assert full.dimension_text() == '1|1,1,1'
    super_case = validate_signature(DegreeSignature(1, (2,)))
    assert [d.parity for d in super_case.degrees] == [1, 1]
    with pytest.raises(SignatureError):
        DegreeSignature(2, (1, 1))


def test_coordinate_system_grouping():
    coords = coordinate_system(2, [('a', (0, 1)), ('x', (0, 0)), ('z', (1, 1))])
    assert coords.names == ('x', 'z', 'a')
    assert coords.signature.q == (1, 1, 0)
    with pytest.raises(DegreeError):
        CoordinateSystem(('a', 'x'), (deg(0, 1), deg(0, 0)), 2)
    with pytest.raises(UnknownCoordinateError):
        coords.index('q')
    with pytest.raises(ArgumentError):
        coordinate_system(2, [('x', (0, 0)), ('x', (1, 1))])
