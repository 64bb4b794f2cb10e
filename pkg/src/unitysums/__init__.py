"""Minimum moduli of sums of roots of unity: exact search and constructions."""
