#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
znjet スクリプトの字句解析と再帰下降構文解析。

# GRAMMAR
#
# script
#   { statement (NEWLINE | ';') }
#
# statement
#   'ring' NAME 'n' '=' INT 'cap' '=' INT ['formcap' '=' INT] 'coords' '[' coord {',' coord} ']'
#   'ring' NAME 'n' '=' INT 'cap' '=' INT ['formcap' '=' INT] 'p' '=' INT 'q' '=' '(' INT {',' INT} ')'
#   'let' NAME [':' NAME] '=' expr
#   'morphism' NAME ':' NAME '->' NAME '{' NAME ':=' expr {';' NAME ':=' expr} [';'] '}'
#   'vector' NAME ':' NAME '{' NAME ':=' expr {';' NAME ':=' expr} [';'] '}'
#   'matrix' NAME ':' NAME 'rows' degrees 'cols' degrees '=' '[' row {',' row} ']'
#   COMMAND {NAME | NAME '=' INT} ['as' NAME]
#
# coord
#   NAME ':' degree
#
# degree
#   '(' INT {',' INT} ')'
#   'deg' '=' INT
#
# expr
#   term {('+' | '-') term}
# term
#   unary {'*' unary | '/' INT}
# unary
#   '-' unary | power
# power
#   atom ['^' INT]
# atom
#   INT | NAME | '(' expr ')' | 'd' '(' expr ')'
"""
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple, Union

from znjet.errors import ParseError
from znjet.grading import DegreeSignature, nonzero_degrees, validate_signature

COMMANDS = (
    'show', 'jac', 'tangent', 'classify', 'invert', 'compose', 'normalform', 'factor',
    'd', 'wedge', 'pullback', 'homotopy', 'derham', 'potential', 'rank', 'neumann',
    'apply', 'pair', 'bracket', 'at', 'reduce', 'product', 'chain', 'jaccheck', 'transpose',
    'check',
)
DECLARATIONS = ('ring', 'let', 'morphism', 'vector', 'matrix')
RESERVED = set(DECLARATIONS) | {'d', 'as'}


class Token:
    """ 字句 """
    number = 'NUMBER'
    name = 'NAME'
    op = 'OP'
    newline = 'NEWLINE'
    eof = 'EOF'

    def __init__(self, typ: str, text: str, line: int, column: int, offset: int):
        self.typ = typ
        self.text = text
        self.line = line
        self.column = column
        self.offset = offset

    def __repr__(self):
        return f'({self.typ}, {self.text!r}, {self.line}:{self.column})'


_TOKEN_RE = re.compile(r"""
    (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<space>[ \t\r]+)
  | (?P<number>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>:=|->|[-+*/^()\[\]{},:=;])
""", re.VERBOSE)

_OPEN = {'(': ')', '[': ']', '{': '}'}


def tokenize(text: str) -> List[Token]:
    """
    括弧の内側の改行は捨てる。
    """
    tokens: List[Token] = []
    depth: List[str] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        column = pos - line_start + 1
        if match is None:
            raise ParseError(f'unexpected character {text[pos]!r}', line, column)
        kind = match.lastgroup
        value = match.group()
        if kind == 'newline':
            if not depth:
                tokens.append(Token(Token.newline, '\n', line, column, pos))
            line += 1
            line_start = match.end()
        elif kind == 'number':
            tokens.append(Token(Token.number, value, line, column, pos))
        elif kind == 'name':
            tokens.append(Token(Token.name, value, line, column, pos))
        elif kind == 'op':
            if value in _OPEN:
                depth.append(_OPEN[value])
            elif value in _OPEN.values():
                if not depth or depth[-1] != value:
                    raise ParseError(f'unbalanced {value!r}', line, column)
                depth.pop()
            tokens.append(Token(Token.op, value, line, column, pos))
        pos = match.end()
    if depth:
        raise ParseError(f'missing {depth[-1]!r} at end of input', line, pos - line_start + 1)
    tokens.append(Token(Token.eof, '', line, pos - line_start + 1, pos))
    return tokens


# ---- 式の構文木 ----
@dataclass(frozen=True)
class Num:
    value: Fraction
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class Name:
    name: str
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class Unary:
    op: str
    operand: 'Expr'
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class Binary:
    op: str
    left: 'Expr'
    right: 'Expr'
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class Power:
    base: 'Expr'
    exponent: int
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class Differential:
    operand: 'Expr'
    line: int = 0
    column: int = 0


Expr = Union[Num, Name, Unary, Binary, Power, Differential]


# ---- 文 ----
@dataclass
class Statement:
    keyword: str
    line: int
    column: int
    text: str = ''


@dataclass
class RingDecl(Statement):
    name: str = ''
    n: int = 0
    cap: int = 0
    formcap: Optional[int] = None
    coords: List[Tuple[str, Tuple[int, ...]]] = field(default_factory=list)
    p: Optional[int] = None
    q: Optional[Tuple[int, ...]] = None


@dataclass
class LetDecl(Statement):
    name: str = ''
    ring: Optional[str] = None
    expr: Expr = None


@dataclass
class MapDecl(Statement):
    """morphism と vector の宣言"""
    name: str = ''
    source: str = ''
    target: str = ''
    assignments: List[Tuple[str, Expr, int, int]] = field(default_factory=list)


@dataclass
class MatrixDecl(Statement):
    name: str = ''
    ring: str = ''
    rows: List[Tuple[int, ...]] = field(default_factory=list)
    cols: List[Tuple[int, ...]] = field(default_factory=list)
    entries: List[List[Expr]] = field(default_factory=list)


@dataclass
class Command(Statement):
    args: List[str] = field(default_factory=list)
    options: Dict[str, int] = field(default_factory=dict)
    bind: Optional[str] = None


@dataclass
class Script:
    statements: List[Statement]
    source: str = ''


class Parser:
    """ 再帰下降パーサ """

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        # 宣言済みの名前 → 種類、環 → 座標名
        self.symbols: Dict[str, str] = {}
        self.ring_coords: Dict[str, List[str]] = {}
        self.ring_n: Dict[str, int] = {}
        self.current_ring: Optional[str] = None

    # ---- トークン操作 ----
    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.column)

    def at_op(self, text: str) -> bool:
        tok = self.peek()
        return tok.typ == Token.op and tok.text == text

    def at_name(self, text: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok.typ == Token.name and (text is None or tok.text == text)

    def expect_op(self, text: str) -> Token:
        if not self.at_op(text):
            raise self.error(f'expected {text!r}, found {self.describe(self.peek())}')
        return self.advance()

    def expect_name(self, text: Optional[str] = None) -> Token:
        if not self.at_name(text):
            wanted = repr(text) if text else 'a name'
            raise self.error(f'expected {wanted}, found {self.describe(self.peek())}')
        return self.advance()

    def expect_int(self) -> int:
        tok = self.peek()
        if tok.typ != Token.number:
            raise self.error(f'expected an integer, found {self.describe(tok)}')
        self.advance()
        return int(tok.text)

    @staticmethod
    def describe(tok: Token) -> str:
        if tok.typ == Token.eof:
            return 'end of input'
        if tok.typ == Token.newline:
            return 'end of line'
        return repr(tok.text)

    def option(self, key: str) -> int:
        self.expect_name(key)
        self.expect_op('=')
        return self.expect_int()

    # ---- 名前の解決 ----
    def declare(self, tok: Token, kind: str):
        name = tok.text
        if name in RESERVED:
            raise self.error(f'{name!r} is a reserved word', tok)
        if name in self.symbols and (self.symbols[name] == 'ring') != (kind == 'ring'):
            raise self.error(f'{name!r} is already declared as a {self.symbols[name]}', tok)
        self.symbols[name] = kind

    def require(self, tok: Token, kinds: Optional[Set[str]] = None):
        kind = self.symbols.get(tok.text)
        if kind is None:
            raise self.error(f'unknown identifier {tok.text!r}', tok)
        if kinds is not None and kind not in kinds:
            raise self.error(f'{tok.text!r} is a {kind}, expected {" or ".join(sorted(kinds))}', tok)

    def ring_of(self, tok: Optional[Token]) -> str:
        if tok is None:
            if self.current_ring is None:
                raise self.error('no ring declared yet')
            return self.current_ring
        self.require(tok, {'ring'})
        return tok.text

    def check_names(self, expr: Expr, ring: str):
        """式中の名前は環の座標か宣言済みの値"""
        if isinstance(expr, Name):
            if expr.name in self.ring_coords[ring]:
                return
            kind = self.symbols.get(expr.name)
            if kind is None:
                raise ParseError(f'unknown identifier {expr.name!r}', expr.line, expr.column)
            if kind == 'ring':
                raise ParseError(f'ring {expr.name!r} used as a value', expr.line, expr.column)
        elif isinstance(expr, (Unary, Differential)):
            self.check_names(expr.operand, ring)
        elif isinstance(expr, Binary):
            self.check_names(expr.left, ring)
            self.check_names(expr.right, ring)
        elif isinstance(expr, Power):
            self.check_names(expr.base, ring)

    # ---- 文 ----
    def parse(self) -> Script:
        statements = []
        while True:
            while self.peek().typ == Token.newline or self.at_op(';'):
                self.advance()
            if self.peek().typ == Token.eof:
                break
            start = self.peek()
            stmt = self.statement()
            end = self.tokens[self.pos - 1]
            stmt.text = ' '.join(self.text[start.offset:end.offset + len(end.text)].split())
            statements.append(stmt)
            if not (self.peek().typ in (Token.newline, Token.eof) or self.at_op(';')):
                raise self.error(f'unexpected {self.describe(self.peek())} after statement')
        return Script(statements, self.text)

    def statement(self) -> Statement:
        tok = self.peek()
        if tok.typ != Token.name:
            raise self.error(f'expected a statement, found {self.describe(tok)}')
        keyword = tok.text
        if keyword == 'ring':
            return self.ring_decl()
        if keyword == 'let':
            return self.let_decl()
        if keyword in ('morphism', 'vector'):
            return self.map_decl()
        if keyword == 'matrix':
            return self.matrix_decl()
        if keyword in COMMANDS:
            return self.command()
        raise self.error(f'unknown statement {keyword!r}')

    def degree(self, n: int) -> Tuple[int, ...]:
        tok = self.peek()
        if self.at_name('deg'):
            self.advance()
            self.expect_op('=')
            k = self.expect_int()
            if not 1 <= k < (1 << n):
                raise self.error(f'deg={k} is out of range for n={n}', tok)
            return nonzero_degrees(n)[k - 1].as_tuple()
        self.expect_op('(')
        values = [self.expect_int()]
        while self.at_op(','):
            self.advance()
            values.append(self.expect_int())
        self.expect_op(')')
        if len(values) != n or any(v not in (0, 1) for v in values):
            raise self.error(f'degree literal must have {n} entries of 0 or 1', tok)
        return tuple(values)

    def degree_list(self, n: int) -> List[Tuple[int, ...]]:
        self.expect_op('[')
        degrees = []
        if not self.at_op(']'):
            degrees.append(self.degree(n))
            while self.at_op(','):
                self.advance()
                degrees.append(self.degree(n))
        self.expect_op(']')
        return degrees

    def ring_decl(self) -> RingDecl:
        kw = self.advance()
        name_tok = self.expect_name()
        stmt = RingDecl('ring', kw.line, kw.column, name=name_tok.text)
        stmt.n = self.option('n')
        if not 1 <= stmt.n <= 16:
            raise self.error(f'n must satisfy 1 <= n <= 16, got {stmt.n}', name_tok)
        stmt.cap = self.option('cap')
        if self.at_name('formcap'):
            stmt.formcap = self.option('formcap')
        if self.at_name('coords'):
            self.advance()
            self.expect_op('[')
            seen = set()
            while not self.at_op(']'):
                coord = self.expect_name()
                if coord.text in RESERVED or coord.text in seen:
                    raise self.error(f'bad or repeated coordinate name {coord.text!r}', coord)
                seen.add(coord.text)
                self.expect_op(':')
                stmt.coords.append((coord.text, self.degree(stmt.n)))
                if not self.at_op(','):
                    break
                self.advance()
            self.expect_op(']')
            names = [c for c, _ in stmt.coords]
        else:
            stmt.p = self.option('p')
            self.expect_name('q')
            self.expect_op('=')
            self.expect_op('(')
            q = [self.expect_int()]
            while self.at_op(','):
                self.advance()
                q.append(self.expect_int())
            self.expect_op(')')
            if len(q) != (1 << stmt.n) - 1:
                raise self.error(f'q needs {(1 << stmt.n) - 1} entries for n={stmt.n}', name_tok)
            stmt.q = tuple(q)
            names = list(validate_signature(DegreeSignature(stmt.n, stmt.q), stmt.p).names)
        self.declare(name_tok, 'ring')
        self.ring_coords[name_tok.text] = names
        self.ring_n[name_tok.text] = stmt.n
        self.current_ring = name_tok.text
        return stmt

    def let_decl(self) -> LetDecl:
        kw = self.advance()
        name_tok = self.expect_name()
        ring_tok = None
        if self.at_op(':'):
            self.advance()
            ring_tok = self.expect_name()
        ring = self.ring_of(ring_tok)
        self.expect_op('=')
        expr = self.expr()
        self.check_names(expr, ring)
        if name_tok.text in self.ring_coords[ring]:
            raise self.error(f'{name_tok.text!r} is a coordinate of {ring}', name_tok)
        self.declare(name_tok, 'value')
        return LetDecl('let', kw.line, kw.column, name=name_tok.text, ring=ring, expr=expr)

    def map_decl(self) -> MapDecl:
        kw = self.advance()
        name_tok = self.expect_name()
        self.expect_op(':')
        source_tok = self.expect_name()
        source = self.ring_of(source_tok)
        target = source
        if kw.text == 'morphism':
            self.expect_op('->')
            target = self.ring_of(self.expect_name())
        stmt = MapDecl(kw.text, kw.line, kw.column, name=name_tok.text, source=source, target=target)
        self.expect_op('{')
        seen = set()
        while not self.at_op('}'):
            coord = self.expect_name()
            if coord.text not in self.ring_coords[target]:
                raise self.error(f'{coord.text!r} is not a coordinate of {target}', coord)
            if coord.text in seen:
                raise self.error(f'{coord.text!r} assigned twice', coord)
            seen.add(coord.text)
            self.expect_op(':=')
            expr = self.expr()
            self.check_names(expr, source)
            stmt.assignments.append((coord.text, expr, coord.line, coord.column))
            if not self.at_op(';'):
                break
            self.advance()
        self.expect_op('}')
        self.declare(name_tok, kw.text)
        return stmt

    def matrix_decl(self) -> MatrixDecl:
        kw = self.advance()
        name_tok = self.expect_name()
        self.expect_op(':')
        ring = self.ring_of(self.expect_name())
        n = self.ring_n[ring]
        self.expect_name('rows')
        rows = self.degree_list(n)
        self.expect_name('cols')
        cols = self.degree_list(n)
        self.expect_op('=')
        self.expect_op('[')
        entries = []
        while not self.at_op(']'):
            bracket = self.expect_op('[')
            row = []
            while not self.at_op(']'):
                expr = self.expr()
                self.check_names(expr, ring)
                row.append(expr)
                if not self.at_op(','):
                    break
                self.advance()
            self.expect_op(']')
            if len(row) != len(cols):
                raise self.error(f'row has {len(row)} entries, expected {len(cols)}', bracket)
            entries.append(row)
            if not self.at_op(','):
                break
            self.advance()
        self.expect_op(']')
        if len(entries) != len(rows):
            raise self.error(f'matrix has {len(entries)} rows, expected {len(rows)}', name_tok)
        self.declare(name_tok, 'matrix')
        return MatrixDecl('matrix', kw.line, kw.column, name=name_tok.text, ring=ring,
                          rows=rows, cols=cols, entries=entries)

    def command(self) -> Command:
        kw = self.advance()
        stmt = Command(kw.text, kw.line, kw.column)
        while self.at_name() and not self.at_name('as'):
            tok = self.advance()
            if self.at_op('='):
                self.advance()
                stmt.options[tok.text] = self.expect_int()
                continue
            if kw.text == 'check' and not stmt.args:
                stmt.args.append(tok.text)
                continue
            if kw.text == 'homotopy' and len(stmt.args) == 1 or kw.text == 'chain' and len(stmt.args) == 2:
                # 座標名はここでは解決しない
                stmt.args.append(tok.text)
                continue
            self.require(tok)
            stmt.args.append(tok.text)
        if self.at_name('as'):
            self.advance()
            bind = self.expect_name()
            self.declare(bind, 'value')
            stmt.bind = bind.text
        return stmt

    # ---- 式 ----
    def expr(self) -> Expr:
        left = self.term()
        while self.at_op('+') or self.at_op('-'):
            op = self.advance()
            left = Binary(op.text, left, self.term(), op.line, op.column)
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.at_op('*') or self.at_op('/'):
            op = self.advance()
            if op.text == '*':
                left = Binary('*', left, self.unary(), op.line, op.column)
            else:
                tok = self.peek()
                divisor = self.expect_int()
                if divisor == 0:
                    raise self.error('division by zero', tok)
                left = Binary('/', left, Num(Fraction(divisor), tok.line, tok.column),
                              op.line, op.column)
        return left

    def unary(self) -> Expr:
        if self.at_op('-'):
            op = self.advance()
            return Unary('-', self.unary(), op.line, op.column)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.at_op('^'):
            op = self.advance()
            return Power(base, self.expect_int(), op.line, op.column)
        return base

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.typ == Token.number:
            self.advance()
            return Num(Fraction(int(tok.text)), tok.line, tok.column)
        if tok.typ == Token.name:
            self.advance()
            if tok.text == 'd' and self.at_op('('):
                self.advance()
                inner = self.expr()
                self.expect_op(')')
                return Differential(inner, tok.line, tok.column)
            return Name(tok.text, tok.line, tok.column)
        if self.at_op('('):
            self.advance()
            inner = self.expr()
            self.expect_op(')')
            return inner
        raise self.error(f'expected an expression, found {self.describe(tok)}')


def parse(text: str) -> Script:
    """スクリプト全体を構文解析する"""
    return Parser(text).parse()


def parse_expression(text: str, coords: List[str], values: Optional[List[str]] = None) -> Expr:
    """
    座標名 coords (と値の名前 values) だけを使う単独の式を解析する。
    """
    parser = Parser(text)
    parser.ring_coords['_'] = list(coords)
    for v in values or ():
        parser.symbols[v] = 'value'
    expr = parser.expr()
    if parser.peek().typ not in (Token.eof, Token.newline):
        raise parser.error(f'unexpected {parser.describe(parser.peek())} after expression')
    parser.check_names(expr, '_')
    return expr
