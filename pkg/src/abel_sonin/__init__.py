"""Top-level package for abel-sonin."""

__author__ = """Maryam K"""
__version__ = '0.1.0'
