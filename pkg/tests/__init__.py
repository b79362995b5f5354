"""
Unit tests for ntos
"""
from __future__ import annotations
