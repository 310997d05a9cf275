import math
import random

import pytest

from invforge import gf2, lincycle
from invforge.boolfun import ZERO_FUN
from invforge.cipher import random_wiring, step
from invforge.lincycle import (
    ALL36_MASK, LOWERCASE26_MASK, AffineRound, affine_of,
    linear_invariant_periods, orbit, synthetic_permutation, weight_sequence,
)


class TestAffineOf:
    def test_trivial_rows_are_units(self, wiring):
        ar = affine_of(wiring)
        for i in range(1, 36):
            if i % 4 != 0:
                assert ar.matrix[i + 1 - 1] == 1 << (i - 1)

    def test_y33_row(self, wiring):
        ar = affine_of(wiring)
        assert ar.matrix[32] == 1 << (wiring.D(9) - 1)
        assert (ar.offset_f >> 32) & 1

    def test_agreement_with_step(self, wiring):
        ar = affine_of(wiring)
        rng = random.Random(61)
        for _ in range(10000):
            s = rng.getrandbits(36)
            fb, kb, lb = (rng.getrandbits(1) for _ in range(3))
            assert ar.apply(s, fb, kb, lb) == step(s, wiring, ZERO_FUN, fb, kb, lb)

    def test_matrix_invertible_for_shipped_wiring(self, wiring):
        ar = affine_of(wiring)
        assert gf2.is_invertible(list(ar.matrix), 36)

    def test_k_offset_with_zero_d_entry(self):
        w = random_wiring(8)
        if 0 not in w.d:
            w = type(w)((0,) + w.d[1:], w.p)
        ar = affine_of(w)
        assert ar.offset_k != 0

    def test_127_iterated_rounds_match_affine_power(self, wiring):
        ar = affine_of(wiring)
        rng = random.Random(63)
        for fb, kb, lb in ((0, 0, 0), (1, 0, 1), (1, 1, 1)):
            s = rng.getrandbits(36)
            via_step = s
            via_affine = s
            for _ in range(127):
                via_step = step(via_step, wiring, ZERO_FUN, fb, kb, lb)
                via_affine = ar.apply(via_affine, fb, kb, lb)
            assert via_step == via_affine


class TestPeriods:
    def test_identity_all_period_one(self):
        ident = AffineRound(tuple(1 << i for i in range(36)), 0, 0, 0)
        entries = linear_invariant_periods(ident, 6)
        assert [e.period for e in entries] == [1]
        assert entries[0].dimension == 36

    def test_full_cycle_shift_divisors_of_36(self):
        shift = synthetic_permutation([tuple(range(1, 37))])
        entries = linear_invariant_periods(shift, 40)
        got = [e.period for e in entries]
        assert got == sorted(d for d in range(1, 37) if 36 % d == 0)

    def test_synthetic_3_5_7(self):
        ar = synthetic_permutation([(1, 2, 3), (4, 5, 6, 7, 8),
                                    (9, 10, 11, 12, 13, 14, 15)])
        entries = linear_invariant_periods(ar, 120)
        assert {e.period for e in entries} == {1, 3, 5, 7, 15, 21, 35, 105}
        for e in entries:
            expect = (math.gcd(e.period, 3) + math.gcd(e.period, 5)
                      + math.gcd(e.period, 7) + 21)
            assert e.dimension == expect
            assert e.minimal_functionals

    def test_minimality_of_witnesses(self):
        ar = synthetic_permutation([(1, 2, 3), (4, 5, 6, 7, 8),
                                    (9, 10, 11, 12, 13, 14, 15)])
        mt = gf2.transpose(list(ar.matrix), 36)
        for e in linear_invariant_periods(ar, 120):
            for fv in e.minimal_functionals:
                v = fv
                length = None
                for i in range(1, e.period + 1):
                    v = gf2.mat_vec(mt, v)
                    if v == fv:
                        length = i
                        break
                assert length == e.period

    def test_offset_sensitivity(self):
        # a shift with a nonzero F offset on the moved bit kills functionals
        # touching it
        shift = synthetic_permutation([(1, 2)])
        with_offset = AffineRound(shift.matrix, 0b11, 0, 0)
        entries = linear_invariant_periods(with_offset, 8)
        for e in entries:
            for b in e.basis:
                assert b & 0b11 == 0 or b & 0b11 == 0b11  # must kill the offset

    def test_reported_functionals_are_invariant(self, wiring):
        ar = affine_of(wiring)
        entries = linear_invariant_periods(ar, 64)
        assert entries
        rng = random.Random(62)
        for e in entries:
            for fv in e.minimal_functionals[:2]:
                for _ in range(200):
                    s = rng.getrandbits(36)
                    before = (s & fv).bit_count() & 1
                    cur = s
                    for _ in range(e.period):
                        cur = ar.apply(cur, rng.getrandbits(1),
                                       rng.getrandbits(1), rng.getrandbits(1))
                    assert (cur & fv).bit_count() & 1 == before

    def test_max_period_guard(self):
        ident = AffineRound(tuple(1 << i for i in range(36)), 0, 0, 0)
        with pytest.raises(ValueError):
            linear_invariant_periods(ident, 100000)
        with pytest.raises(ValueError):
            linear_invariant_periods(ident, 0)


class TestWeights:
    def test_constant_orbit(self):
        seq = weight_sequence([0b111, 0b111, 0b111], ALL36_MASK)
        assert seq == [3, 3, 3]

    def test_single_bit_under_shift(self):
        shift = synthetic_permutation([tuple(range(1, 37))])
        orb = orbit(shift, 1 << 5, 36)
        assert weight_sequence(orb, ALL36_MASK) == [1] * 36

    def test_lowercase26_mask(self):
        # x11..x36 are the lowercase letters; x1..x10 are excluded
        assert LOWERCASE26_MASK.bit_count() == 26
        assert weight_sequence([(1 << 36) - 1]) == [26]
        assert weight_sequence([(1 << 10) - 1]) == [0]

    def test_orbit_composition(self, wiring):
        ar = affine_of(wiring)
        orb = orbit(ar, 1 << 7, 5)
        mt = gf2.transpose(list(ar.matrix), 36)
        for a, b in zip(orb, orb[1:]):
            assert gf2.mat_vec(mt, a) == b
