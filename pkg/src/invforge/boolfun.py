"""6-input Boolean functions and annihilator/absorber spaces.

Truth tables are plain ints (bit k = value at input point k, where bit i of
k is the i-th formal argument).  The formal arguments of a 6-input function
are written a..f, reusing the first six state letters as ring variables.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

from . import ring
from .ring import ONE, Poly, mul

FORMAL_VARS = tuple(range(6))  # VarIds of a..f

MAX_ANNIHILATOR_VARS = 12


class TooManyVariablesError(ValueError):
    pass


class DegreeBoundError(ValueError):
    pass


@lru_cache(maxsize=None)
def _zero_bit_mask(i: int, n: int) -> int:
    """Bitmask of point indices whose i-th input bit is 0."""
    step = 1 << i
    block = (1 << step) - 1
    out = 0
    for start in range(0, 1 << n, 2 * step):
        out |= block << start
    return out


def mobius(table: int, n: int = 6) -> int:
    """Binary Moebius transform (truth table <-> ANF); an involution."""
    t = table
    for i in range(n):
        t ^= (t & _zero_bit_mask(i, n)) << (1 << i)
    return t & ((1 << (1 << n)) - 1)


def truth_table(p: Poly, variables: Sequence[int]) -> int:
    """Truth table of p over an explicit ordered variable list."""
    n = len(variables)
    pos = {v: i for i, v in enumerate(variables)}
    anf = 0
    for t in p.terms:
        idx = 0
        m = t
        while m:
            low = m & -m
            v = low.bit_length() - 1
            if v not in pos:
                raise ValueError("polynomial uses %s outside the declared variables"
                                 % ring.var_name(v))
            idx |= 1 << pos[v]
            m ^= low
        anf ^= 1 << idx
    return mobius(anf, n)


def poly_from_anf_bits(anf: int, variables: Sequence[int]) -> Poly:
    """Polynomial over the given variables from an ANF coefficient vector."""
    terms = []
    for idx in range(1 << len(variables)):
        if (anf >> idx) & 1:
            mask = 0
            for i, v in enumerate(variables):
                if (idx >> i) & 1:
                    mask |= 1 << v
            terms.append(mask)
    return Poly(terms)


class BoolFun6:
    """A Boolean function on 6 ordered inputs; truth-table and ANF views."""

    __slots__ = ("tt", "anf")

    def __init__(self, truth_table: int):
        tt = truth_table & ((1 << 64) - 1)
        object.__setattr__(self, "tt", tt)
        object.__setattr__(self, "anf", mobius(tt, 6))

    def __setattr__(self, *a):
        raise AttributeError("BoolFun6 is immutable")

    def __reduce__(self):
        return (BoolFun6, (self.tt,))

    def __eq__(self, other):
        return isinstance(other, BoolFun6) and self.tt == other.tt

    def __hash__(self):
        return hash(self.tt)

    def __repr__(self):
        return "BoolFun6(0x%016x)" % self.tt

    @classmethod
    def from_anf_bits(cls, anf: int) -> "BoolFun6":
        return cls(mobius(anf & ((1 << 64) - 1), 6))

    def value(self, point: int) -> int:
        return (self.tt >> (point & 63)) & 1

    def __call__(self, *args: int) -> int:
        point = 0
        for i, bit in enumerate(args):
            point |= (bit & 1) << i
        return self.value(point)

    def is_balanced(self) -> bool:
        return self.tt.bit_count() == 32

    def anf_poly(self) -> Poly:
        """ANF over the formal argument letters a..f."""
        return poly_from_anf_bits(self.anf, FORMAL_VARS)

    def instantiate(self, args: Sequence[int]) -> Poly:
        """Compose with an ordered list of 6 single variables (VarIds).

        The argument order is significant: ANF coefficient bit i selects
        args[i].
        """
        if len(args) != 6:
            raise ValueError("exactly 6 arguments required")
        terms = []
        for idx in range(64):
            if (self.anf >> idx) & 1:
                mask = 0
                for i in range(6):
                    if (idx >> i) & 1:
                        mask |= 1 << args[i]
                terms.append(mask)
        return Poly(terms)


ZERO_FUN = BoolFun6(0)


def parse_anf(text: str) -> BoolFun6:
    """Parse ANF text in the formal arguments a..f."""
    p = ring.parse(text, dialect="state")
    bad = [v for v in p.support() if v not in FORMAL_VARS]
    if bad:
        raise ValueError("variable outside a..f: %s"
                         % ",".join(ring.var_name(v) for v in sorted(bad)))
    return BoolFun6.from_anf_bits(_anf_bits(p))


def _anf_bits(p: Poly) -> int:
    anf = 0
    for t in p.terms:
        idx = 0
        m = t
        while m:
            low = m & -m
            idx |= 1 << (low.bit_length() - 1)
            m ^= low
        anf ^= 1 << idx
    return anf


def render_anf(f: BoolFun6) -> str:
    return ring.render(f.anf_poly())


def load_boolfun(text: str) -> BoolFun6:
    """Auto-detect a function file: 16 hex digits (truth table) or ANF text."""
    stripped = "".join(text.split())
    if len(stripped) == 16 and all(c in "0123456789abcdefABCDEF" for c in stripped):
        return BoolFun6(int(stripped, 16))
    return parse_anf(text)


def random_boolfun(seed: int, balanced: bool = False) -> BoolFun6:
    """Uniform seeded random function; optionally balanced."""
    rng = random.Random(seed)
    if not balanced:
        return BoolFun6(rng.getrandbits(64))
    ones = rng.sample(range(64), 32)
    tt = 0
    for i in ones:
        tt |= 1 << i
    return BoolFun6(tt)


# ---------------------------------------------------------------------------
# Annihilators and absorbers.

@dataclass(frozen=True)
class AnnihilatorBasis:
    degree_bound: int
    variables: Tuple[int, ...]
    basis: Tuple[Poly, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _monomials_up_to(variables: Sequence[int], bound: int) -> List[int]:
    """Variable-index subsets of size <= bound in graded-lex order."""
    out = []
    for d in range(bound + 1):
        for combo in itertools.combinations(range(len(variables)), d):
            idx = 0
            for i in combo:
                idx |= 1 << i
            out.append(idx)
    return out


def annihilators(f: Poly, variables: Sequence[int], degree_bound: int) -> AnnihilatorBasis:
    """Basis of {g : deg(g) <= degree_bound, f*g = 0} over GF(2).

    Works on the truth table of f over the declared (ordered-by-VarId)
    variable set: g annihilates f iff g vanishes on every point where
    f is 1.  The basis is returned in reduced row echelon form over the
    graded-lex monomial ordering.
    """
    variables = tuple(sorted(variables))
    n = len(variables)
    if n > MAX_ANNIHILATOR_VARS:
        raise TooManyVariablesError("%d variables exceed the %d-variable limit"
                                    % (n, MAX_ANNIHILATOR_VARS))
    if degree_bound > n:
        raise DegreeBoundError("degree bound %d exceeds %d variables"
                               % (degree_bound, n))
    tt = truth_table(f, variables)
    monomials = _monomials_up_to(variables, degree_bound)
    rows = []
    for x in range(1 << n):
        if (tt >> x) & 1:
            row = 0
            for j, m in enumerate(monomials):
                if m & x == m:
                    row |= 1 << j
            rows.append(row)
    from . import gf2
    kernel = gf2.kernel_basis(rows, len(monomials))
    reduced, _ = gf2.rref(kernel, len(monomials))
    basis = []
    for vec in reduced:
        terms = []
        for j, m in enumerate(monomials):
            if (vec >> j) & 1:
                mask = 0
                for i in range(n):
                    if (m >> i) & 1:
                        mask |= 1 << variables[i]
                terms.append(mask)
        basis.append(Poly(terms))
    return AnnihilatorBasis(degree_bound, variables, tuple(basis))


def is_absorber(f: Poly, g: Poly) -> bool:
    """True iff f*g = f (equivalently f*(g+1) = 0)."""
    return mul(f, g) == f


# ---------------------------------------------------------------------------
# Affine factor extraction (used by the FE engine and the factor explorer).

MAX_SPLIT_VARS = 16


def affine_factor_solutions(p: Poly, variables: Sequence[int]):
    """(particular, homogeneous basis) of affine ell with ell = 1 on supp(p).

    Every such ell satisfies (ell+1)*p = 0, i.e. ell is an affine factor of
    p.  Solution vectors use bit 0 for the constant term.  None when p = 0
    or no affine form is 1 on the whole support.
    """
    variables = tuple(sorted(variables))
    if not p.terms:
        return None
    tt = truth_table(p, variables)
    points = [x for x in range(1 << len(variables)) if (tt >> x) & 1]
    from . import gf2
    return gf2.solve_affine_ones(points, len(variables))


def vector_to_affine(vec: int, variables: Sequence[int]) -> Poly:
    terms = []
    if vec & 1:
        terms.append(0)
    for i, v in enumerate(variables):
        if (vec >> (i + 1)) & 1:
            terms.append(1 << v)
    return Poly(terms)


def affine_split(p: Poly) -> Tuple[List[Poly], Poly]:
    """Greedy full split p = product(factors) * residual with affine factors.

    Deterministic: at each step the minimal-support, lowest-VarId affine
    factor is divided out.  Polynomials over more than MAX_SPLIT_VARS
    variables are returned unsplit.
    """
    factors: List[Poly] = []
    q = p
    while True:
        sup = sorted(q.support())
        if not sup or len(sup) > MAX_SPLIT_VARS:
            return factors, q
        sol = affine_factor_solutions(q, sup)
        if sol is None:
            return factors, q
        particular, homo = sol
        best = None
        for vec in _affine_span(particular, homo):
            if vec in (0, 1):
                continue  # constants are not useful factors
            key = ((vec >> 1).bit_count(), vec)
            if best is None or key < best[0]:
                best = (key, vec)
        if best is None:
            return factors, q
        ell = vector_to_affine(best[1], sup)
        factors.append(ell)
        q = ring.factor_out(q, ell)
        if q == ONE:
            return factors, q


def _affine_span(particular: int, basis: Sequence[int], limit: int = 1 << 14):
    if 1 << len(basis) > limit:
        # too large to enumerate: yield the particular shifted by each
        # basis vector only
        yield particular
        for b in basis:
            yield particular ^ b
        return
    for combo in range(1 << len(basis)):
        v = particular
        c, i = combo, 0
        while c:
            if c & 1:
                v ^= basis[i]
            c >>= 1
            i += 1
        yield v
