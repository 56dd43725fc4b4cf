"""Roof optimization, inequality checks, axiom suite and sweeps."""
