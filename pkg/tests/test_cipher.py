import random

import pytest

from invforge import ring
from invforge.boolfun import ZERO_FUN, parse_anf, random_boolfun
from invforge.cipher import (
    Wiring, WiringError, eval_poly_lanes, parse_wiring, random_wiring,
    render_wiring, round_system, states_to_lanes, step, step_lanes, validate,
)
from invforge.ring import (
    F_BIT, K_BIT, L_BIT, PLACEHOLDER_W, PLACEHOLDER_Y,
    add, mul, parse, state_var, substitute, var,
)


class TestWiring:
    def test_parse_render(self, wiring):
        again = parse_wiring(render_wiring(wiring))
        assert again == wiring

    def test_range_errors(self):
        with pytest.raises(WiringError):
            Wiring((40,) + (1,) * 8, (1,) * 27)
        with pytest.raises(WiringError):
            Wiring((0,) * 9, (0,) + (1,) * 26)
        with pytest.raises(WiringError):
            Wiring((1,) * 8, (1,) * 27)

    def test_d5_36_is_valid(self):
        w = Wiring((1, 2, 3, 4, 36, 5, 6, 7, 8), tuple(range(1, 28)))
        assert validate(w).ok

    def test_duplicate_p_warns_only(self):
        w = Wiring(tuple(range(1, 10)), (5,) * 27)
        rep = validate(w)
        assert rep.ok
        assert any("duplicate P" in msg for msg in rep.warnings)

    def test_shipped_wiring_hypotheses(self, wiring):
        rep = validate(wiring)
        assert rep.ok and not rep.warnings
        assert all(rep.hypotheses.values())

    def test_comments_and_format(self):
        w = parse_wiring("# comment\nD = 1,2,3,4,5,6,7,8,9  # inline\n"
                         "P = " + ",".join(["1"] * 27) + "\n")
        assert w.D(1) == 1 and w.P(27) == 1

    def test_missing_section(self):
        with pytest.raises(WiringError):
            parse_wiring("D = 1,2,3,4,5,6,7,8,9\n")


class TestRoundSystem:
    def test_y33_first_equation(self, wiring):
        rs = round_system(wiring, "placeholder")
        expected = add(var(F_BIT), var(state_var(wiring.D(9))))
        assert rs.output(33) == expected

    def test_trivial_rows(self, wiring):
        rs = round_system(wiring, "placeholder")
        for i in range(1, 36):
            if i % 4 != 0:
                assert rs.output(i + 1) == var(state_var(i))

    def test_output_difference_reduction(self, wiring):
        rs = round_system(wiring, "placeholder")
        d = add(rs.output(9), rs.output(5))
        expected = add(var(PLACEHOLDER_W),
                       add(var(state_var(wiring.D(3))), var(state_var(wiring.D(2)))))
        assert d == expected

    def test_expanded_requires_function(self, wiring):
        with pytest.raises(ValueError):
            round_system(wiring, "expanded")

    def test_unknown_mode(self, wiring):
        with pytest.raises(ValueError):
            round_system(wiring, "bogus")

    def test_placeholder_expansion_commutes(self, wiring):
        fun = random_boolfun(21)
        rs_ph = round_system(wiring, "placeholder")
        rs_ex = round_system(wiring, "expanded", fun)
        args = wiring.z_args()
        mapping = {
            ring.PLACEHOLDER_Z: fun.instantiate(args[0]),
            ring.PLACEHOLDER_Y: fun.instantiate(args[1]),
            ring.PLACEHOLDER_X: fun.instantiate(args[2]),
            PLACEHOLDER_W: fun.instantiate(args[3]),
        }
        for i in range(1, 37):
            assert substitute(rs_ph.output(i), mapping) == rs_ex.output(i)

    def test_k_bit_convention(self):
        w = Wiring((0, 24, 28, 16, 20, 8, 12, 32, 36),
                   tuple(range(1, 28)))
        rs = round_system(w, "placeholder")
        assert K_BIT in rs.output(1).support()
        fun = random_boolfun(22)
        s0 = random.Random(0).getrandbits(36)
        out0 = step(s0, w, fun, 0, 0, 0)
        out1 = step(s0, w, fun, 0, 1, 0)
        assert (out0 ^ out1) == 1  # K toggles exactly y1 here

    def test_symbolic_mode_uses_coefficients(self, wiring):
        rs = round_system(wiring, "symbolic")
        sup = rs.output(29).support()
        assert ring.coef_var(0) in sup
        assert ring.coef_var(63) in sup


class TestStep:
    def test_cross_path_random_wirings(self):
        rng = random.Random(23)
        for wseed in range(3):
            w = random_wiring(wseed)
            fun = random_boolfun(wseed + 50)
            rs = round_system(w, "expanded", fun)
            outputs = [rs.output(i) for i in range(1, 37)]
            for _ in range(300):
                s = rng.getrandbits(36)
                fb, kb, lb = (rng.getrandbits(1) for _ in range(3))
                assign = {state_var(i): (s >> (i - 1)) & 1 for i in range(1, 37)}
                assign[F_BIT] = fb
                assign[K_BIT] = kb
                assign[L_BIT] = lb
                expected = 0
                for i, p in enumerate(outputs):
                    if p.evaluate(assign):
                        expected |= 1 << i
                assert step(s, w, fun, fb, kb, lb) == expected

    def test_scalar_vs_lanes(self, wiring):
        rng = random.Random(24)
        fun = random_boolfun(77)
        states = [rng.getrandbits(36) for _ in range(257)]
        width = len(states)
        wmask = (1 << width) - 1
        fl, kl, ll = (rng.getrandbits(width) for _ in range(3))
        lanes = step_lanes(states_to_lanes(states), wiring, fun, fl, kl, ll, wmask)
        for j, s in enumerate(states):
            out = step(s, wiring, fun, (fl >> j) & 1, (kl >> j) & 1, (ll >> j) & 1)
            got = 0
            for i in range(36):
                if (lanes[i] >> j) & 1:
                    got |= 1 << i
            assert got == out

    def test_bijection_collision_freeness(self, wiring):
        fun = random_boolfun(31)
        rng = random.Random(25)
        for bits in range(8):
            fb, kb, lb = bits & 1, (bits >> 1) & 1, (bits >> 2) & 1
            seen = {}
            for _ in range(20000):
                s = rng.getrandbits(36)
                out = step(s, wiring, fun, fb, kb, lb)
                if out in seen:
                    assert seen[out] == s
                else:
                    seen[out] = s

    def test_bijection_exact_small_conforming(self):
        # exhaustive inverse check on the low 2^16 states is meaningless for
        # a 36-bit map; instead verify injectivity structurally: iterate the
        # inverse-free test by collision-freeness over a seeded conforming
        # wiring distinct from the shipped one
        w = random_wiring(4, conforming=True)
        fun = random_boolfun(32)
        seen = set()
        rng = random.Random(26)
        for _ in range(20000):
            s = rng.getrandbits(36)
            seen.add(step(s, w, fun, 1, 0, 1))
        assert len(seen) >= 19900  # duplicates only from duplicate inputs

    def test_eval_poly_lanes(self):
        rng = random.Random(27)
        p = parse("ab+cd+e")
        for _ in range(20):
            vals = {v: rng.getrandbits(8) for v in p.support()}
            got = eval_poly_lanes(p, vals, 0xFF)
            for j in range(8):
                assign = {v: (vals[v] >> j) & 1 for v in vals}
                assert ((got >> j) & 1) == p.evaluate(assign)
