"""Diagonal nilsoliton metrics on nice nilpotent Lie algebras."""
