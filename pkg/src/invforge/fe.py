"""Build and reduce the fundamental equation for a candidate invariant."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from . import ring
from .boolfun import BoolFun6, affine_split
from .cipher import RoundSystem, Wiring, eval_poly_lanes, state_var, step_lanes
from .ring import COEF_BASE, N_STATE, Poly, add, coef_var, substitute

DEFAULT_BUDGET = 1 << 22


class NonStateVariableError(ValueError):
    def __init__(self, bad):
        names = ",".join(ring.var_name(v) for v in sorted(bad))
        super().__init__("invariant candidate uses non-state variables: %s" % names)


@dataclass(frozen=True)
class FeReport:
    """Reduced fundamental equation plus the dependence verdict."""

    fe: Poly
    is_zero: bool
    depends_on: Tuple[str, ...]
    mode: str

    def lines(self) -> List[str]:
        out = []
        if self.is_zero:
            out.append("fe = 0")
        elif len(self.fe) <= 512:
            out.append("fe = %s" % ring.render(self.fe))
        else:
            out.append("fe = <%d terms, degree %d>" % (len(self.fe), self.fe.degree()))
        out.append("is_zero = %s" % ("true" if self.is_zero else "false"))
        out.append("depends_on = %s" % (",".join(self.depends_on) or "-"))
        out.append("mode = %s" % self.mode)
        return out


def _dependence(fe: Poly) -> Tuple[str, ...]:
    names = []
    sup = fe.support()
    for v in sorted(sup):
        if v >= N_STATE:
            names.append(ring.var_name(v))
    return tuple(names)


def _check_state_only(p: Poly):
    bad = [v for v in p.support() if v >= N_STATE]
    if bad:
        raise NonStateVariableError(bad)


def _substituted(p: Poly, sub: Dict[int, Poly], budget: Optional[int]) -> Poly:
    """Image of p under the round substitution.

    Product-shaped candidates are split into affine factors first, so the
    image is a product of small factor images instead of one large
    monomial-by-monomial expansion.
    """
    if len(p) > 4 and len(p.support()) <= 16:
        factors, residual = affine_split(p)
        if factors:
            parts = [substitute(f, sub, budget) for f in factors]
            parts.append(substitute(residual, sub, budget))
            return ring.product(parts, budget)
    return substitute(p, sub, budget)


def build_fe(P: Poly, rs: RoundSystem, budget: Optional[int] = None) -> FeReport:
    """FE = P + P(outputs-as-inputs), fully expanded and canonicalized.

    In expanded mode is_zero is the attack verdict: P is then a round
    invariant for every key, IV bit and number of rounds.
    """
    _check_state_only(P)
    fe = add(P, _substituted(P, rs.as_substitution(), budget))
    return FeReport(fe, not fe, _dependence(fe), rs.mode)


def symbolic_fe(P: Poly, rs: RoundSystem, budget: int = DEFAULT_BUDGET) -> FeReport:
    """build_fe over the shared coefficient symbols Z00..Z63, budgeted."""
    if rs.mode != "symbolic":
        raise ValueError("symbolic_fe requires a symbolic-mode round system")
    return build_fe(P, rs, budget)


def substitute_coefficients(p: Poly, fun: BoolFun6) -> Poly:
    """Replace every Z00..Z63 symbol by the function's concrete ANF bit."""
    assignment = {coef_var(j): (ring.ONE if (fun.anf >> j) & 1 else ring.ZERO)
                  for j in range(64)}
    return substitute(p, assignment)


def check_candidate(fe_symbolic: Poly, fun: BoolFun6) -> bool:
    """Does a concrete function solve the symbolic FE?"""
    return not substitute_coefficients(fe_symbolic, fun)


# ---------------------------------------------------------------------------
# Coefficient-wise linear system extraction.

_COEF_MASK = 0
for _j in range(64):
    _COEF_MASK |= 1 << (COEF_BASE + _j)
del _j


@dataclass(frozen=True)
class CoefficientSystem:
    """FE = 0 as per-monomial conditions on the coefficient symbols.

    Only available when no products of distinct function instances occur;
    the equations are then affine in Z00..Z63, one per carrier monomial.
    """

    linear: bool
    equations: Tuple[Tuple[Poly, Poly], ...]  # (carrier monomial, affine Zij condition)

    def lines(self) -> List[str]:
        if not self.linear:
            return ["coefficient system: nonlinear in Zij"]
        out = ["coefficient system: linear, %d equations" % len(self.equations)]
        for carrier, cond in self.equations:
            out.append("  [%s] %s = 0" % (ring.render(carrier), ring.render(cond)))
        return out


def coefficient_system(fe: Poly) -> CoefficientSystem:
    for t in fe.terms:
        if (t & _COEF_MASK).bit_count() >= 2:
            return CoefficientSystem(False, ())
    groups: Dict[int, List[int]] = {}
    for t in fe.terms:
        groups.setdefault(t & ~_COEF_MASK, []).append(t & _COEF_MASK)
    eqs = []
    for carrier in sorted(groups, key=lambda m: (-m.bit_count(),) + ring._mono_key(m)[1:]):
        cond = Poly(groups[carrier])
        eqs.append((Poly((carrier,)), cond))
    return CoefficientSystem(True, tuple(eqs))


# ---------------------------------------------------------------------------
# Empirical confirmation channel (independent of the symbolic path).

@dataclass(frozen=True)
class EmpiricalReport:
    trials: int
    rounds: int
    mismatches: int

    @property
    def ok(self) -> bool:
        return self.mismatches == 0

    def lines(self) -> List[str]:
        return ["trials = %d" % self.trials,
                "rounds = %d" % self.rounds,
                "mismatches = %d" % self.mismatches]


_CHUNK = 1 << 13


def check_invariant_empirically(P: Poly, w: Wiring, fun: BoolFun6,
                                trials: int, seed: int = 0,
                                rounds: int = 1) -> EmpiricalReport:
    """Sample random states and per-round random (F, K, L); count violations.

    Bit-sliced: every trial gets its own trajectory and its own per-round
    bits.  Must report 0 mismatches whenever build_fe says is_zero.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    _check_state_only(P)
    rng = random.Random(seed)
    mism = 0
    remaining = trials
    while remaining:
        width = min(remaining, _CHUNK)
        wmask = (1 << width) - 1
        lanes = [rng.getrandbits(width) for _ in range(36)]
        lane_map = {state_var(i): lanes[i - 1] for i in range(1, 37)}
        before = eval_poly_lanes(P, lane_map, wmask)
        for _ in range(rounds):
            lanes = step_lanes(lanes, w, fun,
                               rng.getrandbits(width), rng.getrandbits(width),
                               rng.getrandbits(width), wmask)
        lane_map = {state_var(i): lanes[i - 1] for i in range(1, 37)}
        after = eval_poly_lanes(P, lane_map, wmask)
        mism += (before ^ after).bit_count()
        remaining -= width
    return EmpiricalReport(trials, rounds, mism)
