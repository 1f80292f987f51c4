"""Unit test package for abel_sonin."""
