"""Symbolic workbench for polynomial invariant attacks on T-310-style ciphers."""

from .ring import Poly, parse, render, add, mul, substitute, factor_out, var
from .boolfun import BoolFun6, parse_anf, annihilators, is_absorber, random_boolfun

__all__ = [
    "Poly", "parse", "render", "add", "mul", "substitute", "factor_out", "var",
    "BoolFun6", "parse_anf", "annihilators", "is_absorber", "random_boolfun",
]
