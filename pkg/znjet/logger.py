#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
ロガーの生成。verbose の値でログレベルを決める。
"""
import logging

import colorlog

_FORMAT = '%(log_color)s%(asctime)s [%(levelname)s] %(name)s : %(message)s'


def verbose_to_level(verbose: int) -> int:
    """
    0 → WARNING, 1..99 → INFO, 100 以上 → DEBUG
    """
    if verbose >= 100:
        return logging.DEBUG
    if verbose > 0:
        return logging.INFO
    return logging.WARNING


def getLogger(verbose: int = 0, name: str = 'znjet') -> logging.Logger:  # pylint: disable=invalid-name
    """
    標準エラー出力に色付きで出すロガーを返す。
    同じ名前で何度呼んでもハンドラは1つだけ。
    """
    logger = logging.getLogger(name)
    logger.setLevel(verbose_to_level(verbose))
    if not any(getattr(h, '_znjet', False) for h in logger.handlers):
        handler = colorlog.StreamHandler()
        handler.setFormatter(colorlog.ColoredFormatter(_FORMAT))
        handler._znjet = True  # pylint: disable=protected-access
        logger.addHandler(handler)
        logger.propagate = False
    return logger
