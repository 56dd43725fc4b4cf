"""Seeded sampling, state files and reports."""
