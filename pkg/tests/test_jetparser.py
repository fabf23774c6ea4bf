#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
スクリプトの構文解析のテスト
"""
from fractions import Fraction

import pytest

from znjet.errors import ParseError
from znjet.jetparser import (Binary, Command, Differential, LetDecl, MapDecl,
                             MatrixDecl, Name, Num, Power, RingDecl, Unary,
                             parse, parse_expression, tokenize)

SCRIPT = """\
# quaternionic coordinates
ring R n=2 cap=4 coords [x:(0,0), z:(1,1), a:deg=2, b:(1,0)]
let f = x^2 + z*a/2
morphism F : R -> R {
  x := x + z^2 ;
  z := z ; a := a ; b := b
}
jac F
invert F as G
derham R kmax=3 wmax=5
"""


def test_parse_script():
    script = parse(SCRIPT)
    ring, let, morphism, jac, invert, derham = script.statements
    assert isinstance(ring, RingDecl)
    assert (ring.name, ring.n, ring.cap, ring.formcap) == ('R', 2, 4, None)
    assert ring.coords == [('x', (0, 0)), ('z', (1, 1)), ('a', (0, 1)), ('b', (1, 0))]
    assert isinstance(let, LetDecl) and let.ring == 'R'
    assert let.text == 'let f = x^2 + z*a/2'
    assert isinstance(morphism, MapDecl)
    assert [c for c, _, _, _ in morphism.assignments] == ['x', 'z', 'a', 'b']
    assert morphism.line == 4
    assert isinstance(jac, Command) and jac.args == ['F']
    assert invert.bind == 'G'
    assert derham.options == {'kmax': 3, 'wmax': 5}
    assert derham.line == 10


def test_ring_signature():
    ring = parse('ring S n=2 cap=3 formcap=2 p=1 q=(1,1,0)').statements[0]
    assert (ring.p, ring.q, ring.formcap) == (1, (1, 1, 0), 2)
    with pytest.raises(ParseError, match='q needs 3 entries'):
        parse('ring S n=2 cap=3 p=1 q=(1,1)')


def test_expression_tree():
    expr = parse_expression('-x^2 + d(z)*a/3', ['x', 'z', 'a'])
    assert isinstance(expr, Binary) and expr.op == '+'
    assert isinstance(expr.left, Unary)
    assert isinstance(expr.left.operand, Power) and expr.left.operand.exponent == 2
    right = expr.right
    assert right.op == '/' and right.right == Num(Fraction(3), 1, 15)
    assert isinstance(right.left.left, Differential)
    assert right.left.left.operand == Name('z', 1, 10)


def test_matrix_declaration():
    script = parse('ring R n=2 cap=4 coords [x:(0,0), z:(1,1)]\n'
                   'matrix M : R rows [(0,0), (1,1)] cols [(0,0), (1,1)] = [[1, z], [0, 1]]\n'
                   'neumann M')
    matrix = script.statements[1]
    assert isinstance(matrix, MatrixDecl)
    assert matrix.rows == [(0, 0), (1, 1)]
    assert len(matrix.entries) == 2


@pytest.mark.parametrize('text, line, column, message', [
    ('ring R n=2 cap=4 coords [x:(0,0)]\nlet f = x + y', 2, 13, "unknown identifier 'y'"),
    ('ring R n=2 cap=4 coords [x:(0,0)]\njac F', 2, 5, "unknown identifier 'F'"),
    ('ring R n=2 cap=4 coords [x:(0,2)]', 1, 28, 'degree literal'),
    ('ring R n=17 cap=4 coords [x:(0)]', 1, 6, 'n must satisfy'),
    ('ring R n=2 cap=4 coords [x:(0,0)]\nlet f = (x + 1', 2, 15, "missing ')'"),
    ('ring R n=2 cap=4 coords [x:(0,0)]\nlet f = x / 0', 2, 13, 'division by zero'),
    ('frobnicate R', 1, 1, "unknown statement 'frobnicate'"),
    ('let f = 1', 1, 7, 'no ring declared yet'),
    ('ring R n=2 cap=4 coords [x:(0,0)]\nmorphism F : R -> R { y := x }', 2, 23,
     "'y' is not a coordinate of R"),
])
def test_parse_errors(text, line, column, message):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert message in info.value.message


def test_parse_error_text():
    with pytest.raises(ParseError) as info:
        parse('ring R n=2 cap=4 coords [x:(0,0)]\njac F')
    assert str(info.value).startswith('2:5: ')


def test_tokenize_positions():
    tokens = tokenize('let f = x\n  # comment\njac')
    assert [(t.text, t.line, t.column) for t in tokens if t.typ == 'NAME'] == [
        ('let', 1, 1), ('f', 1, 5), ('x', 1, 9), ('jac', 3, 1)]
    with pytest.raises(ParseError):
        tokenize('let f = x @ 1')


def test_primed_names():
    expr = parse_expression("x' * x", ['x', "x'"])
    assert expr.left == Name("x'", 1, 1)
