#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
コマンドの実行結果 (Report) と、その text / json 形式での出力。
"""
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

STATUS_OK = 'ok'
STATUS_ERROR = 'error'
STATUS_FAIL = 'fail'
STATUS_PARSE_ERROR = 'parse-error'


@dataclass
class Report:
    """
    command: 正規化したコマンドの文字列
    payload: 出力する値。str, list[str], list[list[str]] または dict[str, str] を値に持つ
    """
    command: str
    status: str = STATUS_OK
    payload: Dict[str, Any] = field(default_factory=dict)
    diagnostics: List[str] = field(default_factory=list)
    line: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'line': self.line,
            'command': self.command,
            'status': self.status,
            'payload': self.payload,
            'diagnostics': list(self.diagnostics),
        }


def _text_value(key: str, value) -> List[str]:
    if isinstance(value, str):
        return [f'{key}: {value}']
    if isinstance(value, dict):
        lines = [f'{key}:']
        for k, v in value.items():
            lines.extend('  ' + s for s in _text_value(k, v))
        return lines
    lines = [f'{key}:']
    for item in value:
        if isinstance(item, (list, tuple)):
            lines.append('  [' + ', '.join(str(v) for v in item) + ']')
        else:
            lines.append(f'  - {item}')
    return lines


def to_text(report: Report) -> str:
    lines = [f'>>> {report.command}', f'status: {report.status}']
    for key, value in report.payload.items():
        lines.extend(_text_value(key, value))
    for message in report.diagnostics:
        lines.append(f'! {message}')
    return '\n'.join(lines) + '\n'


def emit(reports: Sequence[Report], fmt: str = 'text') -> str:
    """
    レポートの列を文字列にする。同じレポートからは常に同じ文字列になる。
    """
    if fmt == 'json':
        return json.dumps([r.to_dict() for r in reports], ensure_ascii=False, indent=2) + '\n'
    if fmt != 'text':
        raise ValueError(f'unknown output format {fmt!r}')
    return '\n'.join(to_text(r) for r in reports)
