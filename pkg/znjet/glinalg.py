#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
次数付き行列 (ジェット環係数) と有理数行列の厳密な線形代数。

有理数行列の階数・簡約・逆行列は sympy の DomainMatrix (QQ) で計算する。
"""
from dataclasses import dataclass
from fractions import Fraction
from logging import getLogger
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from znjet.errors import RingError, ShapeError, SingularError, DegreeError
from znjet.grading import Degree, standard_order, standard_rank
from znjet.gseries import JetAlgebra, Series, invert

logger = getLogger(__name__)


# ---- 有理数行列 ----
def _shape(a) -> Tuple[int, int]:
    arr = np.asarray(a, dtype=object)
    if arr.ndim != 2:
        if arr.size == 0:
            return (0, 0)
        raise ShapeError(f'expected a 2-D matrix, got shape {arr.shape}')
    return arr.shape


def _to_domain_matrix(a) -> DomainMatrix:
    nrows, ncols = _shape(a)
    rows = [[QQ(int(Fraction(v).numerator), int(Fraction(v).denominator)) for v in row]
            for row in np.asarray(a, dtype=object).reshape(nrows, ncols).tolist()]
    return DomainMatrix(rows, (nrows, ncols), QQ)


def _from_domain_matrix(dm: DomainMatrix) -> np.ndarray:
    nrows, ncols = dm.shape
    out = np.empty((nrows, ncols), dtype=object)
    if nrows and ncols:
        m = dm.to_Matrix()
        for i in range(nrows):
            for j in range(ncols):
                v = m[i, j]
                out[i, j] = Fraction(int(v.p), int(v.q))
    return out


def fraction_matrix(rows: Sequence[Sequence]) -> np.ndarray:
    """入れ子リストを Fraction の object 配列にする"""
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    out = np.empty((len(rows), ncols), dtype=object)
    for i, row in enumerate(rows):
        if len(row) != ncols:
            raise ShapeError('ragged matrix')
        for j, v in enumerate(row):
            out[i, j] = Fraction(v)
    return out


def rational_rank(a) -> int:
    nrows, ncols = _shape(a)
    if nrows == 0 or ncols == 0:
        return 0
    return _to_domain_matrix(a).rank()


def rational_det(a) -> Fraction:
    nrows, ncols = _shape(a)
    if nrows != ncols:
        raise ShapeError(f'determinant of a non-square {nrows}x{ncols} matrix')
    if nrows == 0:
        return Fraction(1)
    v = QQ.to_sympy(_to_domain_matrix(a).det())
    return Fraction(int(v.p), int(v.q))


def rational_inverse(a) -> np.ndarray:
    nrows, ncols = _shape(a)
    if nrows != ncols:
        raise ShapeError(f'inverse of a non-square {nrows}x{ncols} matrix')
    if nrows == 0:
        return np.empty((0, 0), dtype=object)
    if rational_det(a) == 0:
        raise SingularError('scalar matrix is singular')
    return _from_domain_matrix(_to_domain_matrix(a).inv())


def rational_rref(a) -> Tuple[np.ndarray, Tuple[int, ...]]:
    nrows, ncols = _shape(a)
    if nrows == 0 or ncols == 0:
        return np.empty((nrows, ncols), dtype=object), ()
    reduced, pivots = _to_domain_matrix(a).rref()
    return _from_domain_matrix(reduced), tuple(int(p) for p in pivots)


def solve_rational(a, b: Sequence) -> Optional[List[Fraction]]:
    """
    a x = b の特殊解 (自由変数は 0) 。解がなければ None 。
    """
    nrows, ncols = _shape(a)
    if len(b) != nrows:
        raise ShapeError(f'right-hand side has {len(b)} entries, expected {nrows}')
    if ncols == 0:
        return [] if all(Fraction(v) == 0 for v in b) else None
    augmented = np.empty((nrows, ncols + 1), dtype=object)
    if nrows:
        augmented[:, :ncols] = np.asarray(a, dtype=object).reshape(nrows, ncols)
        augmented[:, ncols] = [Fraction(v) for v in b]
    reduced, pivots = rational_rref(augmented)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, col in enumerate(pivots):
        x[col] = reduced[row, ncols]
    return x


# ---- 次数付き行列 ----
@dataclass(frozen=True)
class RankProfile:
    """次数 0 ブロックの階数 r と非零次数ブロックの階数 s"""
    r: int
    s: Tuple[int, ...]

    def __str__(self):
        return f'{self.r}|' + ','.join(str(v) for v in self.s)


def _check_grouped(degrees: Sequence[Degree], what: str):
    ranks = [standard_rank(d) for d in degrees]
    if any(a > b for a, b in zip(ranks, ranks[1:])):
        raise DegreeError(f'{what} degrees must be grouped in standard order')


class GradedMatrix:
    """
    次数 0 の次数付き行列。entries[i, j] は次数 row_degrees[i] + col_degrees[j] で斉次。
    """

    def __init__(self, algebra: JetAlgebra, row_degrees: Sequence[Degree],
                 col_degrees: Sequence[Degree], entries, check: bool = True):
        self.algebra = algebra
        self.row_degrees = tuple(row_degrees)
        self.col_degrees = tuple(col_degrees)
        shape = (len(self.row_degrees), len(self.col_degrees))
        arr = np.empty(shape, dtype=object)
        rows = list(entries) if not isinstance(entries, np.ndarray) else entries.tolist()
        if len(rows) != shape[0] or any(len(r) != shape[1] for r in rows):
            raise ShapeError(f'entries do not match the {shape[0]}x{shape[1]} degree lists')
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if not isinstance(v, Series):
                    v = algebra.constant(v)
                arr[i, j] = v
        self.entries = arr
        if check:
            self._validate()

    def _validate(self):
        n = self.algebra.n
        for d in self.row_degrees + self.col_degrees:
            if d.n != n:
                raise DegreeError(f'degree {d} does not match n={n}')
        _check_grouped(self.row_degrees, 'row')
        _check_grouped(self.col_degrees, 'column')
        for i, r in enumerate(self.row_degrees):
            for j, c in enumerate(self.col_degrees):
                v = self.entries[i, j]
                if v.algebra != self.algebra:
                    raise RingError('matrix entry from another jet algebra')
                if not v.is_homogeneous_bits(r.bits ^ c.bits):
                    raise DegreeError(
                        f'entry ({i},{j}) = {v} is not homogeneous of degree {r + c}')

    @classmethod
    def identity(cls, algebra: JetAlgebra, degrees: Sequence[Degree]) -> 'GradedMatrix':
        k = len(degrees)
        return cls(algebra, degrees, degrees,
                   [[1 if i == j else 0 for j in range(k)] for i in range(k)], check=False)

    @classmethod
    def zeros(cls, algebra: JetAlgebra, row_degrees, col_degrees) -> 'GradedMatrix':
        return cls(algebra, row_degrees, col_degrees,
                   [[0] * len(col_degrees) for _ in row_degrees], check=False)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape

    def __getitem__(self, key) -> Series:
        return self.entries[key]

    def map(self, func, algebra: Optional[JetAlgebra] = None) -> 'GradedMatrix':
        """
        各成分に func を施す。func が別の環へ写すときは algebra にその環を渡す。
        """
        return GradedMatrix(algebra or self.algebra, self.row_degrees, self.col_degrees,
                            [[func(v) for v in row] for row in self.entries.tolist()],
                            check=False)

    def epsilon(self) -> np.ndarray:
        out = np.empty(self.shape, dtype=object)
        for i in range(self.shape[0]):
            for j in range(self.shape[1]):
                out[i, j] = self.entries[i, j].epsilon()
        return out

    def truncate(self, k: int) -> 'GradedMatrix':
        return self.map(lambda v: v.truncate(k))

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.entries.flat)

    def _same_frame(self, other: 'GradedMatrix'):
        if self.algebra != other.algebra:
            raise RingError('matrices over different jet algebras')
        if self.row_degrees != other.row_degrees or self.col_degrees != other.col_degrees:
            raise ShapeError('matrices have different degree lists')

    def __add__(self, other: 'GradedMatrix') -> 'GradedMatrix':
        self._same_frame(other)
        return GradedMatrix(self.algebra, self.row_degrees, self.col_degrees,
                            self.entries + other.entries, check=False)

    def __sub__(self, other: 'GradedMatrix') -> 'GradedMatrix':
        self._same_frame(other)
        return GradedMatrix(self.algebra, self.row_degrees, self.col_degrees,
                            self.entries - other.entries, check=False)

    def __neg__(self) -> 'GradedMatrix':
        return self.map(lambda v: -v)

    def __matmul__(self, other: 'GradedMatrix') -> 'GradedMatrix':
        return matmul(self, other)

    def __eq__(self, other):
        if not isinstance(other, GradedMatrix):
            return NotImplemented
        return (self.algebra == other.algebra
                and self.row_degrees == other.row_degrees
                and self.col_degrees == other.col_degrees
                and all(a == b for a, b in zip(self.entries.flat, other.entries.flat)))

    __hash__ = None

    def block_indices(self) -> List[Tuple[Degree, List[int], List[int]]]:
        """標準順序の各次数について (次数, 行の添字, 列の添字)"""
        return [(d,
                 [i for i, r in enumerate(self.row_degrees) if r == d],
                 [j for j, c in enumerate(self.col_degrees) if c == d])
                for d in standard_order(self.algebra.n)]

    def diagonal_blocks(self) -> List[Tuple[Degree, np.ndarray]]:
        """ε で落とした対角ブロック"""
        eps = self.epsilon()
        return [(d, eps[np.ix_(rows, cols)] if rows and cols
                 else np.empty((len(rows), len(cols)), dtype=object))
                for d, rows, cols in self.block_indices()]

    def to_rows(self) -> List[List[str]]:
        return [[str(v) for v in row] for row in self.entries.tolist()]

    def __str__(self):
        rows = ', '.join('[' + ', '.join(r) + ']' for r in self.to_rows())
        return (f'rows [{", ".join(str(d) for d in self.row_degrees)}] '
                f'cols [{", ".join(str(d) for d in self.col_degrees)}] = [{rows}]')


def matmul(a: GradedMatrix, b: GradedMatrix) -> GradedMatrix:
    if a.algebra != b.algebra:
        raise RingError('matrices over different jet algebras')
    if a.col_degrees != b.row_degrees:
        raise ShapeError('column degrees of the left factor differ from row degrees of the right')
    if not a.col_degrees:
        return GradedMatrix.zeros(a.algebra, a.row_degrees, b.col_degrees)
    return GradedMatrix(a.algebra, a.row_degrees, b.col_degrees,
                        np.dot(a.entries, b.entries), check=False)


def is_invertible_deg0(t: GradedMatrix) -> bool:
    """
    ε で落とした対角ブロックがすべて正則なら可逆。
    """
    if t.shape[0] != t.shape[1]:
        raise ShapeError(f'invertibility needs a square matrix, got {t.shape[0]}x{t.shape[1]}')
    for _, block in t.diagonal_blocks():
        if block.shape[0] != block.shape[1]:
            return False
        if rational_det(block) == 0:
            return False
    return True


def _scalar_block_inverse(t: GradedMatrix) -> GradedMatrix:
    inv = np.empty(t.shape, dtype=object)
    inv.fill(Fraction(0))
    for _, rows, cols in t.block_indices():
        if not rows:
            continue
        block = rational_inverse(t.epsilon()[np.ix_(rows, cols)])
        # 逆行列のブロックは列 → 行の添字に対応する
        for a, j in enumerate(cols):
            for b, i in enumerate(rows):
                inv[j, i] = block[a, b]
    return GradedMatrix(t.algebra, t.col_degrees, t.row_degrees, inv.tolist(), check=False)


def neumann_inverse(t: GradedMatrix) -> GradedMatrix:
    """
    T = D(I + Z) と分解し、(I + Σ_{k=1}^{cap} (-Z)^k) D^-1 を返す。
    """
    if not is_invertible_deg0(t):
        raise SingularError('matrix fails the diagonal-block invertibility criterion')
    d_inv = _scalar_block_inverse(t)
    identity = GradedMatrix.identity(t.algebra, t.col_degrees)
    z = matmul(d_inv, t) - identity
    minus_z = -z
    total = identity
    power = identity
    for _ in range(t.algebra.cap):
        power = matmul(power, minus_z)
        if power.is_zero():
            break
        total = total + power
    return matmul(total, d_inv)


def scalar_rank(blocks: Sequence[np.ndarray]) -> RankProfile:
    """
    標準順序に並んだスカラー対角ブロックの階数。空ブロックの階数は 0 。
    """
    ranks = [rational_rank(b) for b in blocks]
    if not ranks:
        raise ShapeError('scalar_rank needs at least the degree-0 block')
    return RankProfile(ranks[0], tuple(ranks[1:]))


@dataclass(frozen=True)
class ConstantRankDecomposition:
    """G1 Z G2 が標準形 (各ブロックで単位行列 + 零) になる"""
    profile: RankProfile
    g1: GradedMatrix
    g2: GradedMatrix
    pivots: Tuple[Tuple[int, int], ...]


def _find_unit_pivot(work, blocks, used_rows, used_cols) -> Optional[Tuple[int, int]]:
    for _, rows, cols in blocks:
        for i in rows:
            if i in used_rows:
                continue
            for j in cols:
                if j not in used_cols and work[i][j].epsilon() != 0:
                    return i, j
    return None


def canonical_form(algebra: JetAlgebra, row_degrees, col_degrees,
                   profile: RankProfile) -> GradedMatrix:
    """各次数ブロックの左上に単位行列を置いた標準形"""
    ranks = (profile.r,) + profile.s
    rows = [[0] * len(col_degrees) for _ in row_degrees]
    for k, d in enumerate(standard_order(algebra.n)):
        ri = [i for i, r in enumerate(row_degrees) if r == d]
        ci = [j for j, c in enumerate(col_degrees) if c == d]
        for a in range(ranks[k]):
            rows[ri[a]][ci[a]] = 1
    return GradedMatrix(algebra, row_degrees, col_degrees, rows, check=False)


def constant_rank_decompose(z: GradedMatrix,
                            order: Optional[int] = None) -> Optional[ConstantRankDecomposition]:
    """
    単元ピボットだけで次数付きガウス消去を行う。
    残りが 0 にならなければ None (定数階数でない) 。
    order を渡すと、残りを総次数 order までで切ってから 0 と比べる。
    """
    algebra = z.algebra
    nrows, ncols = z.shape
    work = [list(row) for row in z.entries.tolist()]
    g1 = [list(row) for row in GradedMatrix.identity(algebra, z.row_degrees).entries.tolist()]
    g2 = [list(row) for row in GradedMatrix.identity(algebra, z.col_degrees).entries.tolist()]
    blocks = z.block_indices()
    used_rows, used_cols = set(), set()
    pivots = []
    while True:
        pivot = _find_unit_pivot(work, blocks, used_rows, used_cols)
        if pivot is None:
            break
        i, j = pivot
        logger.debug('unit pivot at (%d, %d): %s', i, j, work[i][j])
        u_inv = invert(work[i][j])
        work[i] = [u_inv * v for v in work[i]]
        g1[i] = [u_inv * v for v in g1[i]]
        for r in range(nrows):
            factor = work[r][j]
            if r == i or factor.is_zero():
                continue
            work[r] = [a - factor * b for a, b in zip(work[r], work[i])]
            g1[r] = [a - factor * b for a, b in zip(g1[r], g1[i])]
        for c in range(ncols):
            factor = work[i][c]
            if c == j or factor.is_zero():
                continue
            for r in range(nrows):
                work[r][c] = work[r][c] - work[r][j] * factor
            for r in range(ncols):
                g2[r][c] = g2[r][c] - g2[r][j] * factor
        used_rows.add(i)
        used_cols.add(j)
        pivots.append((i, j))
    for r in range(nrows):
        for c in range(ncols):
            if r in used_rows or c in used_cols:
                continue
            residual = work[r][c] if order is None else work[r][c].truncate(order)
            if not residual.is_zero():
                logger.debug('residual entry (%d, %d) = %s is neither unit nor zero', r, c, work[r][c])
                return None

    # ブロック内の並べ替えでピボットを左上に揃える
    row_perm, col_perm, ranks = [], [], []
    for _, rows, cols in blocks:
        block_pivots = [(i, j) for i, j in pivots if i in rows]
        ranks.append(len(block_pivots))
        row_perm.extend([i for i, _ in block_pivots] + [i for i in rows if i not in used_rows])
        col_perm.extend([j for _, j in block_pivots] + [j for j in cols if j not in used_cols])
    g1_sorted = [g1[i] for i in row_perm]
    g2_sorted = [[row[j] for j in col_perm] for row in g2]
    profile = RankProfile(ranks[0], tuple(ranks[1:]))
    return ConstantRankDecomposition(
        profile,
        GradedMatrix(algebra, z.row_degrees, z.row_degrees, g1_sorted, check=False),
        GradedMatrix(algebra, z.col_degrees, z.col_degrees, g2_sorted, check=False),
        tuple(pivots))


def graded_transpose(a: GradedMatrix) -> GradedMatrix:
    """
    (A^gt)_{ij} = (-1)^<r_j + c_i, c_i> A_{ji} (r, c は A の行・列の次数)。
    """
    r, c = a.row_degrees, a.col_degrees
    rows = []
    for i in range(len(c)):
        row = []
        for j in range(len(r)):
            v = a.entries[j, i]
            row.append(-v if (r[j] + c[i]).pairing(c[i]) else v)
        rows.append(row)
    return GradedMatrix(a.algebra, c, r, rows, check=False)
