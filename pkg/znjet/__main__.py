#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
python -m znjet script.znj
"""
import sys

from znjet.cli import main

sys.exit(main())
