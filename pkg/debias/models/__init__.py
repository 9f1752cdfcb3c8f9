"""Data models for debias-lab."""
