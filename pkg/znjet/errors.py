#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
znjet で使う例外クラス。

カーネルの例外はすべて ZnJetError (ValueError のサブクラス) を継承する。
「定数階数でない」などの“存在しない”結果は例外ではなく None で返す。
"""


class ZnJetError(ValueError):
    """カーネル例外の基底クラス"""


class DimensionError(ZnJetError):
    """次数のビット長 n が一致しない"""


class SignatureError(ZnJetError):
    """DegreeSignature の形式が不正"""


class ArgumentError(ZnJetError):
    """引数の値が範囲外"""


class RingError(ZnJetError):
    """異なる JetAlgebra の元どうしを演算しようとした"""


class DegreeError(ZnJetError):
    """斉次性・次数の条件を満たさない"""


class NonUnitError(ZnJetError):
    """ε(f) = 0 の元を逆元にしようとした"""


class BasepointError(ZnJetError):
    """次数 0 座標の引き戻しが原点を保たない"""


class ArityError(ZnJetError):
    """引き戻しの個数が座標数と合わない"""


class DomainMismatchError(ZnJetError):
    """合成・ペアリングで定義域が一致しない"""


class ShapeError(ZnJetError):
    """行列の形や行・列の次数リストが合わない"""


class SingularError(ZnJetError):
    """可逆性の判定条件を満たさない"""


class NotLocallyInvertibleError(ZnJetError):
    """接写像のブロックが正則でない"""


class NotSubmersionError(ZnJetError):
    """原点でサブマーションでない"""


class NotImmersionError(ZnJetError):
    """原点でイマーションでない"""


class CapError(ZnJetError):
    """打ち切り次数 (cap, form_cap) の余裕が足りない"""


class UnsupportedVariableError(ZnJetError):
    """ホモトピー作用素に使えない座標"""


class NotClosedError(ZnJetError):
    """閉形式でない"""


class NoPotentialError(ZnJetError):
    """ポテンシャルが存在しない (重み 0 成分など)"""


class UnknownCoordinateError(ZnJetError):
    """座標名が見つからない"""


class InternalCheckError(ZnJetError):
    """アルゴリズム内部の事後検証に失敗した"""


class ParseError(ZnJetError):
    """
    スクリプトの構文エラー。行番号と列番号を持つ。
    未定義の識別子もこの例外で報告する。
    """

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f'{line}:{column}: {message}')
        self.message = message
