#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
Z2^n 次数付きの形式的超領域のジェット計算カーネルと、そのスクリプト言語。
"""
__version__ = '0.1.1'
