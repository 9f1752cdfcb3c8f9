"""Tests for debias-lab."""
