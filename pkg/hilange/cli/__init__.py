"""Hilange command line."""
