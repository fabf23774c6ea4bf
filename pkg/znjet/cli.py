#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
znjet スクリプトを実行するコマンドラインツール。

1. 設定ファイル (znjetconfig.yaml) を読み、コマンドライン引数で上書きする。
2. スクリプトを構文解析する。
3. 文を順に実行してレポートを作り、text か json で標準出力に出す。
"""
import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from os.path import dirname, join
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import colored_traceback.always  # pylint: disable=unused-import
from omegaconf import DictConfig, OmegaConf
from tqdm import tqdm

from znjet.errors import ArgumentError, ParseError, RingError, ZnJetError
from znjet.gforms import (DeRhamTable, Form, VectorField, apply, bracket,
                          cotangent_vector_at_basepoint, derham_ranks,
                          differential, exterior_derivative, find_potential,
                          form_pullback, homotopy_K, pair,
                          tangent_vector_at_basepoint, wedge, wedge_power)
from znjet.glinalg import (ConstantRankDecomposition, GradedMatrix,
                           constant_rank_decompose, graded_transpose,
                           neumann_inverse)
from znjet.gmorphism import (Domain, Morphism, TangentMap,
                             chain_rule_residual, classify_point, compose,
                             graded_jacobian, jacobian_multiplicativity_check,
                             make_domain, make_morphism, pair_morphism,
                             product_domain, product_morphism,
                             reduced_morphism, tangent_map)
from znjet.grading import (Degree, DegreeSignature, coordinate_system,
                           validate_signature)
from znjet.gseries import JetAlgebra, Series
from znjet.jetparser import (Command, Differential, Expr, LetDecl,
                             MapDecl, MatrixDecl, Name, Num, Power, RingDecl,
                             Script, Statement, Unary, parse)
from znjet.localforms import (Factorization, NormalForm, constant_rank_factor,
                              invert_morphism, normal_form)
from znjet.logger import getLogger
from znjet.report import (STATUS_ERROR, STATUS_FAIL, STATUS_OK,
                          STATUS_PARSE_ERROR, Report, emit)

DEFAULT_CONFIG = join(dirname(__file__), 'znjetconfig.yaml')

EXIT_OK = 0
EXIT_PARSE_ERROR = 1
EXIT_KERNEL_ERROR = 2


def load_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> DictConfig:
    """
    既定の設定、ユーザーの設定ファイル、引数の順に重ねる。
    """
    config = OmegaConf.load(DEFAULT_CONFIG)
    if path is not None:
        config = OmegaConf.merge(config, OmegaConf.load(path))
    if overrides:
        config = OmegaConf.merge(config, {k: v for k, v in overrides.items() if v is not None})
    return DictConfig(config)


@dataclass(frozen=True)
class PointVector:
    """基点での接ベクトルまたは余接ベクトル"""
    kind: str
    names: Tuple[str, ...]
    values: Tuple[Fraction, ...]


def _degrees_text(degrees: Sequence[Degree]) -> str:
    return ' '.join(str(d) for d in degrees) or '-'


def _named(phi: Morphism, name: str) -> Morphism:
    return Morphism(phi.source, phi.target, phi.pullbacks, name)


def describe(value) -> Dict[str, Any]:
    """
    カーネルの値をレポートの payload に変換する。
    """
    if isinstance(value, Series):
        degree = value.degree()
        return {'kind': 'series', 'degree': str(degree) if degree else 'mixed',
                'value': str(value)}
    if isinstance(value, Form):
        degree = value.degree()
        return {'kind': 'form', 'degree': str(degree) if degree else 'mixed',
                'value': str(value)}
    if isinstance(value, Morphism):
        return {'kind': 'morphism',
                'dimension': f'{value.source.dimension_text()} -> {value.target.dimension_text()}',
                'morphism': value.to_dsl()}
    if isinstance(value, GradedMatrix):
        return {'kind': 'matrix', 'rows': _degrees_text(value.row_degrees),
                'cols': _degrees_text(value.col_degrees), 'entries': value.to_rows()}
    if isinstance(value, VectorField):
        degree = value.degree()
        return {'kind': 'vector', 'degree': str(degree) if degree else 'mixed',
                'value': str(value)}
    if isinstance(value, Domain):
        return {'kind': 'ring', 'ring': str(value), 'dimension': value.dimension_text(),
                'signature': str(value.coords.signature)}
    if isinstance(value, TangentMap):
        return {'kind': 'tangent', 'rank': str(value.rank_profile()),
                'blocks': {d: rows for d, rows in value.to_rows()}}
    if isinstance(value, PointVector):
        return {'kind': value.kind,
                'components': {n: str(v) for n, v in zip(value.names, value.values)}}
    if isinstance(value, NormalForm):
        return {'kind': value.kind.value,
                'selected': list(value.selected),
                'complement': str(value.complement),
                'forward': value.change.forward.to_dsl('forward'),
                'inverse': value.change.inverse.to_dsl('inverse'),
                'standard': value.standard.to_dsl('standard'),
                'certificate': 'exact' if value.certificate else 'failed'}
    if isinstance(value, Factorization):
        return {'kind': 'factorization', 'constant_rank': 'yes', 'rank': str(value.profile),
                'rows': list(value.rows), 'cols': list(value.cols),
                'middle': str(value.middle),
                'phi1': value.phi1.to_dsl(), 'phi2': value.phi2.to_dsl(),
                'section': value.section.to_dsl('section'),
                'certificate': 'exact' if value.certificate else 'failed'}
    if isinstance(value, ConstantRankDecomposition):
        return {'kind': 'rank', 'constant_rank': 'yes', 'rank': str(value.profile),
                'G1': value.g1.to_rows(), 'G2': value.g2.to_rows()}
    if isinstance(value, DeRhamTable):
        return {'kind': 'derham', 'domain': value.domain,
                'kmax': str(value.k_max), 'wmax': str(value.w_max),
                'columns': 'k w dim rank h',
                'cells': [[str(c.k), str(c.w), str(c.dim), str(c.rank), str(c.h)]
                          for c in value.cells],
                'cohomology': [f'H^{k} = {h}' for k, h in enumerate(value.totals())]}
    raise ArgumentError(f'cannot describe a value of type {type(value).__name__}')


class Executor:
    """
    記号表を持ち、文を1つずつ実行する。
    """

    def __init__(self, config: DictConfig, logger=None):
        self.config = config
        self.logger = logger or getLogger(0)
        self.symbols: Dict[str, Any] = {}
        self.form_caps: Dict[JetAlgebra, int] = {}

    # ---- 値の取り出し ----
    def get(self, name: str, *types):
        if name not in self.symbols:
            raise ArgumentError(f'{name!r} has no value')
        value = self.symbols[name]
        if types and not isinstance(value, types):
            wanted = ' or '.join(t.__name__ for t in types)
            raise ArgumentError(f'{name!r} is a {type(value).__name__}, expected {wanted}')
        return value

    def form_cap(self, algebra: JetAlgebra) -> int:
        return self.form_caps.get(algebra, algebra.cap)

    def as_form(self, value) -> Form:
        if isinstance(value, Series):
            return Form.from_series(value, self.form_cap(value.algebra))
        if isinstance(value, Form):
            return value
        raise ArgumentError(f'expected a series or a form, got {type(value).__name__}')

    def evaluate(self, expr: Expr, domain: Domain):
        """式を domain のジェット環で評価する。値は Series か Form"""
        algebra = domain.algebra
        if isinstance(expr, Num):
            return algebra.constant(expr.value)
        if isinstance(expr, Name):
            if expr.name in algebra.coords.names:
                return algebra.coordinate(expr.name)
            value = self.get(expr.name, Series, Form)
            if value.algebra != algebra:
                raise RingError(f'{expr.name!r} is defined over another ring than {domain.name}')
            return value
        if isinstance(expr, Unary):
            return -self.evaluate(expr.operand, domain)
        if isinstance(expr, Power):
            base = self.evaluate(expr.base, domain)
            if isinstance(base, Form):
                return wedge_power(base, expr.exponent)
            return base ** expr.exponent
        if isinstance(expr, Differential):
            inner = self.evaluate(expr.operand, domain)
            if isinstance(inner, Form):
                return exterior_derivative(inner)
            return differential(inner, self.form_cap(algebra))
        left = self.evaluate(expr.left, domain)
        if expr.op == '/':
            return left.scale(Fraction(1) / expr.right.value)
        right = self.evaluate(expr.right, domain)
        if isinstance(left, Series) and isinstance(right, Series):
            if expr.op == '+':
                return left + right
            if expr.op == '-':
                return left - right
            return left * right
        left, right = self.as_form(left), self.as_form(right)
        if expr.op == '+':
            return left + right
        if expr.op == '-':
            return left - right
        return wedge(left, right)

    # ---- 宣言 ----
    def ring(self, stmt: RingDecl) -> Tuple[Any, Dict[str, Any]]:
        cap = stmt.cap if self.config.cap_override is None else int(self.config.cap_override)
        if stmt.coords:
            coords = coordinate_system(stmt.n, stmt.coords)
        else:
            coords = validate_signature(DegreeSignature(stmt.n, stmt.q), stmt.p)
        domain = make_domain(coords, cap, stmt.name)
        self.form_caps[domain.algebra] = cap if stmt.formcap is None else stmt.formcap
        payload = describe(domain)
        payload['formcap'] = str(self.form_cap(domain.algebra))
        return domain, payload

    def let(self, stmt: LetDecl):
        value = self.evaluate(stmt.expr, self.get(stmt.ring, Domain))
        return value, dict(describe(value), name=stmt.name)

    def mapping(self, stmt: MapDecl):
        source = self.get(stmt.source, Domain)
        target = self.get(stmt.target, Domain)
        values = {}
        for coord, expr, _, _ in stmt.assignments:
            value = self.evaluate(expr, source)
            if not isinstance(value, Series):
                raise ArgumentError(f'component {coord} must be a series, got a form')
            values[coord] = value
        if stmt.keyword == 'vector':
            coefficients = [values.get(c, source.algebra.zero()) for c in source.coords.names]
            value = VectorField(source.algebra, coefficients)
        else:
            value = make_morphism(source, target, values, stmt.name)
        return value, describe(value)

    def matrix(self, stmt: MatrixDecl):
        domain = self.get(stmt.ring, Domain)
        rows = []
        for row in stmt.entries:
            values = [self.evaluate(e, domain) for e in row]
            if any(isinstance(v, Form) for v in values):
                raise ArgumentError('matrix entries must be series')
            rows.append(values)
        value = GradedMatrix(domain.algebra, [Degree.from_tuple(t) for t in stmt.rows],
                             [Degree.from_tuple(t) for t in stmt.cols], rows)
        return value, describe(value)

    # ---- コマンド ----
    def command(self, stmt: Command):
        handler: Callable = getattr(self, f'cmd_{stmt.keyword}')
        return handler(stmt, *stmt.args)

    def _arity(self, stmt: Command, count: int):
        if len(stmt.args) != count:
            raise ArgumentError(f'{stmt.keyword} takes {count} argument(s), got {len(stmt.args)}')

    def cmd_show(self, stmt, *args):
        self._arity(stmt, 1)
        value = self.get(args[0])
        return value, describe(value)

    def cmd_jac(self, stmt, *args):
        self._arity(stmt, 1)
        value = graded_jacobian(self.get(args[0], Morphism))
        return value, describe(value)

    def cmd_tangent(self, stmt, *args):
        self._arity(stmt, 1)
        value = tangent_map(self.get(args[0], Morphism))
        return value, describe(value)

    def cmd_classify(self, stmt, *args):
        self._arity(stmt, 1)
        kind, profile = classify_point(self.get(args[0], Morphism))
        return None, {'class': kind.value, 'rank': str(profile)}

    def cmd_invert(self, stmt, *args):
        self._arity(stmt, 1)
        phi = self.get(args[0], Morphism)
        value = _named(invert_morphism(phi), stmt.bind or f'{args[0]}_inv')
        return value, describe(value)

    def cmd_compose(self, stmt, *args):
        self._arity(stmt, 2)
        first, second = self.get(args[0], Morphism), self.get(args[1], Morphism)
        value = _named(compose(first, second), stmt.bind or f'{args[1]}_{args[0]}')
        return value, describe(value)

    def cmd_normalform(self, stmt, *args):
        self._arity(stmt, 1)
        value = normal_form(self.get(args[0], Morphism))
        return value, describe(value)

    def cmd_factor(self, stmt, *args):
        self._arity(stmt, 1)
        value = constant_rank_factor(self.get(args[0], Morphism))
        if value is None:
            return None, {'constant_rank': 'no'}
        return value, describe(value)

    def cmd_d(self, stmt, *args):
        self._arity(stmt, 1)
        operand = self.get(args[0], Series, Form)
        if isinstance(operand, Series):
            value = differential(operand, self.form_cap(operand.algebra))
        else:
            value = exterior_derivative(operand)
        return value, describe(value)

    def cmd_wedge(self, stmt, *args):
        self._arity(stmt, 2)
        value = wedge(self.as_form(self.get(args[0], Series, Form)),
                      self.as_form(self.get(args[1], Series, Form)))
        return value, describe(value)

    def cmd_pullback(self, stmt, *args):
        self._arity(stmt, 2)
        phi = self.get(args[0], Morphism)
        operand = self.get(args[1], Series, Form)
        if isinstance(operand, Series):
            value = phi.pullback(operand)
        else:
            value = form_pullback(phi, operand)
        return value, describe(value)

    def cmd_homotopy(self, stmt, *args):
        self._arity(stmt, 2)
        value = homotopy_K(self.as_form(self.get(args[0], Series, Form)), args[1])
        return value, describe(value)

    def cmd_derham(self, stmt, *args):
        self._arity(stmt, 1)
        domain = self.get(args[0], Domain)
        k_max = stmt.options.get('kmax', self.config.poincare.kmax)
        w_max = stmt.options.get('wmax', self.config.poincare.wmax)
        unknown = set(stmt.options) - {'kmax', 'wmax'}
        if unknown:
            raise ArgumentError(f'unknown derham option(s): {", ".join(sorted(unknown))}')

        def progress(jobs):
            return tqdm(jobs, desc=f'derham {domain.name}', disable=not self.config.progress)

        value = derham_ranks(domain, k_max, w_max, n_jobs=self.config.n_jobs, progress=progress)
        return value, describe(value)

    def cmd_potential(self, stmt, *args):
        self._arity(stmt, 1)
        value = find_potential(self.as_form(self.get(args[0], Series, Form)))
        return value, describe(value)

    def cmd_rank(self, stmt, *args):
        self._arity(stmt, 1)
        value = constant_rank_decompose(self.get(args[0], GradedMatrix))
        if value is None:
            return None, {'constant_rank': 'no'}
        return value, describe(value)

    def cmd_neumann(self, stmt, *args):
        self._arity(stmt, 1)
        value = neumann_inverse(self.get(args[0], GradedMatrix))
        return value, describe(value)

    def cmd_transpose(self, stmt, *args):
        self._arity(stmt, 1)
        value = graded_transpose(self.get(args[0], GradedMatrix))
        return value, describe(value)

    def cmd_apply(self, stmt, *args):
        self._arity(stmt, 2)
        value = apply(self.get(args[0], VectorField), self.get(args[1], Series))
        return value, describe(value)

    def cmd_pair(self, stmt, *args):
        self._arity(stmt, 2)
        first, second = self.get(args[0]), self.get(args[1])
        if isinstance(first, Morphism) and isinstance(second, Morphism):
            value = pair_morphism(first, second)
            if stmt.bind:
                value = _named(value, stmt.bind)
        else:
            value = pair(self.get(args[0], VectorField), self.as_form(self.get(args[1], Series, Form)))
        return value, describe(value)

    def cmd_bracket(self, stmt, *args):
        self._arity(stmt, 2)
        value = bracket(self.get(args[0], VectorField), self.get(args[1], VectorField))
        return value, describe(value)

    def cmd_at(self, stmt, *args):
        self._arity(stmt, 1)
        operand = self.get(args[0], VectorField, Form)
        names = operand.algebra.coords.names
        if isinstance(operand, VectorField):
            value = PointVector('tangent', names, tuple(tangent_vector_at_basepoint(operand)))
        else:
            value = PointVector('cotangent', names, tuple(cotangent_vector_at_basepoint(operand)))
        return value, describe(value)

    def cmd_reduce(self, stmt, *args):
        self._arity(stmt, 1)
        value = reduced_morphism(self.get(args[0], Morphism))
        return value, describe(value)

    def cmd_product(self, stmt, *args):
        self._arity(stmt, 2)
        first, second = self.get(args[0], Morphism, Domain), self.get(args[1], Morphism, Domain)
        if isinstance(first, Domain) and isinstance(second, Domain):
            value = product_domain(first, second, stmt.bind or '')[0]
            self.form_caps[value.algebra] = min(self.form_cap(first.algebra),
                                                self.form_cap(second.algebra))
        elif isinstance(first, Morphism) and isinstance(second, Morphism):
            value = product_morphism(first, second)
        else:
            raise ArgumentError('product takes two rings or two morphisms')
        return value, describe(value)

    def cmd_chain(self, stmt, *args):
        self._arity(stmt, 3)
        residual = chain_rule_residual(self.get(args[0], Morphism), self.get(args[1], Series), args[2])
        return residual, {'residual': str(residual), 'holds': 'yes' if residual.is_zero() else 'no'}

    def cmd_jaccheck(self, stmt, *args):
        self._arity(stmt, 2)
        holds, residual = jacobian_multiplicativity_check(self.get(args[0], Morphism),
                                                          self.get(args[1], Morphism))
        return residual, {'holds': 'yes' if holds else 'no', 'residual': residual.to_rows()}

    def cmd_check(self, stmt, *args):
        # 自己診断は重いので必要なときだけ読み込む
        from znjet.selfcheck import run_checks  # pylint: disable=import-outside-toplevel
        suite = args[0] if args else 'all'
        seed = stmt.options.get('seed', self.config.seed)
        results = run_checks(self.config, seed, suite)
        payload = {'seed': str(seed),
                   'suites': [f'{r.name}: {r.passed}/{r.trials} passed' for r in results]}
        failures = [f'{r.name}: {message}' for r in results for message in r.failures]
        return None, payload, failures

    # ---- 実行 ----
    def run(self, stmt: Statement) -> Report:
        if isinstance(stmt, RingDecl):
            value, payload = self.ring(stmt)
            name = stmt.name
        elif isinstance(stmt, LetDecl):
            value, payload = self.let(stmt)
            name = stmt.name
        elif isinstance(stmt, MapDecl):
            value, payload = self.mapping(stmt)
            name = stmt.name
        elif isinstance(stmt, MatrixDecl):
            value, payload = self.matrix(stmt)
            name = stmt.name
        else:
            result = self.command(stmt)
            value, payload = result[0], result[1]
            name = stmt.bind
            if len(result) == 3 and result[2]:
                return Report(stmt.text, STATUS_FAIL, payload, list(result[2]), stmt.line)
        if name is not None and value is not None:
            self.symbols[name] = value
        return Report(stmt.text, STATUS_OK, payload, [], stmt.line)


def execute(script: Script, config: DictConfig, logger=None) -> Tuple[List[Report], int]:
    """
    文を順に実行する。カーネルの例外が起きたらそこで止めて終了コード 2 を返す。
    """
    logger = logger or getLogger(config.verbose)
    executor = Executor(config, logger)
    reports: List[Report] = []
    total = len(script.statements)
    for k, stmt in enumerate(script.statements, start=1):
        logger.info('executing statement %d/%d : %s', k, total, stmt.text)
        try:
            report = executor.run(stmt)
        except ZnJetError as exception:
            message = f'{stmt.line}:{stmt.column}: {type(exception).__name__}: {exception}'
            logger.info('statement failed: %s', message)
            reports.append(Report(stmt.text, STATUS_ERROR, {}, [message], stmt.line))
            return reports, EXIT_KERNEL_ERROR
        reports.append(report)
        if report.status == STATUS_FAIL:
            return reports, EXIT_KERNEL_ERROR
    return reports, EXIT_OK


def run_script(text: str, config: DictConfig, logger=None) -> Tuple[List[Report], int]:
    """構文解析と実行をまとめて行う"""
    try:
        script = parse(text)
    except ParseError as exception:
        return [Report('parse', STATUS_PARSE_ERROR, {},
                       [f'{exception.line}:{exception.column}: ParseError: {exception.message}'],
                       exception.line)], EXIT_PARSE_ERROR
    return execute(script, config, logger)


def build_argparser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='znjet', description='Z2^n graded jet calculator for formal superdomains')
    parser.add_argument('script', nargs='?', default=None,
                        help='script file (standard input when omitted)')
    parser.add_argument('--config', default=None, help='YAML configuration merged over the defaults')
    parser.add_argument('--format', choices=('text', 'json'), default=None)
    parser.add_argument('--cap-override', type=int, default=None, dest='cap_override')
    parser.add_argument('--seed', type=int, default=None)
    parser.add_argument('--jobs', type=int, default=None, dest='n_jobs')
    parser.add_argument('--verbose', type=int, default=None)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    スクリプトを読んで実行し、レポートを標準出力に書く。
    """
    args = build_argparser().parse_args(argv)
    config = load_config(args.config, {
        'format': args.format, 'cap_override': args.cap_override, 'seed': args.seed,
        'n_jobs': args.n_jobs, 'verbose': args.verbose})
    logger = getLogger(config.verbose)
    logger.debug('configuration\n%s', OmegaConf.to_yaml(config))

    logger.info('reading script %s', args.script or '<stdin>')
    if args.script is None:
        text = sys.stdin.read()
    else:
        with open(args.script, encoding='utf-8') as f:
            text = f.read()

    reports, code = run_script(text, config, logger)
    sys.stdout.write(emit(reports, config.format))
    logger.info('finished with exit code %d', code)
    return code


if __name__ == '__main__':
    sys.exit(main())
