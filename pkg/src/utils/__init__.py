"""Errors, logging and expression parsing."""
