"""Affine-case analysis: with the Boolean function forced to zero one round
is an affine map on the 36 state bits; study its cycle structure."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from . import gf2
from .boolfun import ZERO_FUN
from .cipher import Wiring, round_system
from .ring import F_BIT, K_BIT, L_BIT, N_STATE

# "active bits (out of 26)": weight restricted to the lowercase letter
# coordinates x11..x36 by default; configurable by mask.
LOWERCASE26_MASK = ((1 << 36) - 1) ^ ((1 << 10) - 1)
ALL36_MASK = (1 << 36) - 1

MASKS = {"lowercase26": LOWERCASE26_MASK, "all36": ALL36_MASK}

MAX_PERIOD_GUARD = 4096


@dataclass(frozen=True)
class AffineRound:
    """y = M x + F*offset_f + K*offset_k + L*offset_l over GF(2)."""

    matrix: Tuple[int, ...]          # 36 rows; bit j-1 of row i-1 = coeff of x_j in y_i
    offset_f: int
    offset_k: int
    offset_l: int

    def apply(self, state: int, f_bit: int, k_bit: int, l_bit: int) -> int:
        out = gf2.mat_vec(self.matrix, state)
        if f_bit:
            out ^= self.offset_f
        if k_bit:
            out ^= self.offset_k
        if l_bit:
            out ^= self.offset_l
        return out


def affine_of(w: Wiring) -> AffineRound:
    """Extract the linear part and the F/K/L offsets of the zero-function round."""
    rs = round_system(w, "expanded", ZERO_FUN)
    rows = []
    off_f = off_k = off_l = 0
    for i in range(1, 37):
        p = rs.output(i)
        if p.degree() > 1:
            raise ValueError("round is not affine with the zero function")
        row = 0
        for t in p.terms:
            if t == 0:
                raise ValueError("unexpected constant term in output %d" % i)
            v = (t & -t).bit_length() - 1
            if v < N_STATE:
                row |= 1 << (N_STATE - 1 - v)  # VarId back to bit index x_j - 1
            elif v == F_BIT:
                off_f |= 1 << (i - 1)
            elif v == K_BIT:
                off_k |= 1 << (i - 1)
            elif v == L_BIT:
                off_l |= 1 << (i - 1)
            else:
                raise ValueError("non-affine symbol in output %d" % i)
        rows.append(row)
    return AffineRound(tuple(rows), off_f, off_k, off_l)


def synthetic_permutation(cycles: Sequence[Sequence[int]]) -> AffineRound:
    """Permutation matrix from disjoint 1-based position cycles; no offsets.

    Positions absent from every cycle are fixed points.
    """
    perm = list(range(36))
    seen = set()
    for cyc in cycles:
        for pos in cyc:
            if not 1 <= pos <= 36 or pos in seen:
                raise ValueError("bad cycle position %d" % pos)
            seen.add(pos)
        for i, pos in enumerate(cyc):
            nxt = cyc[(i + 1) % len(cyc)]
            perm[nxt - 1] = pos - 1  # new bit nxt reads old bit pos
    rows = tuple(1 << perm[i] for i in range(36))
    return AffineRound(rows, 0, 0, 0)


@dataclass(frozen=True)
class PeriodEntry:
    period: int
    dimension: int                    # dim of the full invariant space at this period
    basis: Tuple[int, ...]            # basis of that space
    minimal_functionals: Tuple[int, ...]  # witnesses whose minimal period == period


def _prime_factors(k: int) -> List[int]:
    out = []
    d = 2
    while d * d <= k:
        if k % d == 0:
            out.append(d)
            while k % d == 0:
                k //= d
        d += 1
    if k > 1:
        out.append(k)
    return out


def _in_span(reduced_rows: Sequence[int], v: int) -> bool:
    for row in reduced_rows:
        pivot = row & -row
        if v & pivot:
            v ^= row
    return v == 0


def linear_invariant_periods(ar: AffineRound, max_period: int) -> List[PeriodEntry]:
    """Functionals ell with ell(after k rounds) = ell(before) for all
    F/K/L sequences; reported at their minimal periods only.

    The invariance condition is exact: (M^T)^k ell = ell and ell . M^i v = 0
    for every offset vector v and 0 <= i < k.  A period k is reported iff
    some functional is invariant at k but at no proper divisor of k; the
    spaces form a gcd-lattice, so existence comes from inclusion-exclusion
    over the maximal proper divisors and a witness is found by a bounded
    combination search over the period-k basis.
    """
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    if max_period > MAX_PERIOD_GUARD:
        raise ValueError("max_period %d exceeds the guard of %d"
                         % (max_period, MAX_PERIOD_GUARD))
    n = N_STATE
    m_t = gf2.transpose(ar.matrix, n)
    ident = gf2.identity(n)

    cur = [ar.offset_f, ar.offset_k, ar.offset_l]
    constraint_rows: List[int] = []
    dims: Dict[int, int] = {}
    rrefs: Dict[int, List[int]] = {}
    entries: List[PeriodEntry] = []
    mt_pow = ident
    for k in range(1, max_period + 1):
        mt_pow = gf2.mat_mul(mt_pow, m_t, n)
        for v in cur:
            if v:
                constraint_rows.append(v)
        cur = [gf2.mat_vec(ar.matrix, v) for v in cur]
        rows = [mt_pow[i] ^ ident[i] for i in range(n)] + constraint_rows
        basis = gf2.kernel_basis(rows, n)
        dims[k] = len(basis)
        rrefs[k] = gf2.rref(basis, n)[0]
        if not basis:
            continue
        maximal = sorted({k // p for p in _prime_factors(k)})
        covered = 0
        for pick in range(1, 1 << len(maximal)):
            g = k
            bits = 0
            for i, d in enumerate(maximal):
                if (pick >> i) & 1:
                    g = math.gcd(g, d)
                    bits += 1
            covered += (1 if bits % 2 else -1) * (1 << dims[g])
        if (1 << dims[k]) <= covered:
            continue  # every invariant functional already has a smaller period
        witnesses = [b for b in basis
                     if all(not _in_span(rrefs[d], b) for d in maximal)]
        if not witnesses:
            witnesses = list(_witness_search(basis, [rrefs[d] for d in maximal]))
        entries.append(PeriodEntry(k, len(basis), tuple(basis), tuple(witnesses)))
    return entries


def _witness_search(basis: Sequence[int], excluded: Sequence[Sequence[int]],
                    max_weight: int = 4):
    """First basis combination lying outside every excluded subspace."""
    for weight in range(2, min(len(basis), max_weight) + 1):
        for combo in itertools.combinations(range(len(basis)), weight):
            v = 0
            for i in combo:
                v ^= basis[i]
            if all(not _in_span(rr, v) for rr in excluded):
                yield v
                return


def orbit(ar: AffineRound, functional: int, length: int) -> List[int]:
    """functional, then its images under the transpose round action."""
    m_t = gf2.transpose(ar.matrix, N_STATE)
    out = [functional]
    for _ in range(length - 1):
        out.append(gf2.mat_vec(m_t, out[-1]))
    return out


def weight_sequence(orbit_functionals: Sequence[int],
                    mask: int = LOWERCASE26_MASK) -> List[int]:
    """Hamming weight of each functional restricted to the masked coordinates."""
    return [(f & mask).bit_count() for f in orbit_functionals]
