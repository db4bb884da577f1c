"""Scheme analysis services."""
