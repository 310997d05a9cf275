"""The degree-7 product attack: linear-form bank, step-by-step verification,
factorization explorer and random function search."""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import fe as fe_mod
from . import ring
from .boolfun import (
    BoolFun6, affine_factor_solutions, annihilators, random_boolfun,
    vector_to_affine,
)
from .cipher import Wiring, round_system
from .ring import (
    ONE, PLACEHOLDER_W, PLACEHOLDER_Y, ZERO,
    Poly, add, add_many, factor_out, form_var, mul, product, state_var,
    substitute, var,
)

# The eight affine forms over state bits; each is the sum of exactly two
# bits, and the two four-bit shift registers map them into each other:
# H -> G -> F -> E and D -> C -> B -> A on the input side.
FORM_BITS = {
    "A": (24, 28), "B": (23, 27), "C": (22, 26), "D": (21, 25),
    "E": (8, 12), "F": (7, 11), "G": (6, 10), "H": (5, 9),
}


def form_state(name: str) -> Poly:
    lo, hi = FORM_BITS[name]
    return add(var(state_var(lo)), var(state_var(hi)))


def form_bank() -> Dict[str, Poly]:
    return {name: form_state(name) for name in FORM_BITS}


def expand_forms(p: Poly) -> Poly:
    """Homomorphism from the abstract form letters A..H to state bits."""
    return substitute(p, {form_var(n): form_state(n) for n in FORM_BITS})


def _forms(*names: str) -> List[Poly]:
    return [var(form_var(n)) for n in names]


def _s(*ps: Poly) -> Poly:
    return add_many(ps)


A, B, C, D, E, F, G, H = _forms(*"ABCDEFGH")


def invariant_factors_forms() -> List[Poly]:
    """The seven affine factors of the degree-7 invariant, over A..H."""
    return [_s(A, B), _s(C, D), _s(D, F), _s(B, F), _s(E, F), _s(G, F), _s(G, H)]


def product_invariant() -> Poly:
    """The degree-7 product invariant, expanded over state bits."""
    return product([expand_forms(f) for f in invariant_factors_forms()])


def alternate_invariant_factors_forms() -> List[Poly]:
    return [_s(ONE, A, H), _s(B, H), _s(ONE, C, H), _s(D, H),
            _s(E, H), _s(ONE, F, H), _s(G, H)]


def alternate_invariant() -> Poly:
    """The second published degree-7 product (regression target).

    Computed fact: this product expands to the same canonical polynomial as
    product_invariant() - the two factor lists are one more witness of
    non-unique factorization, both describing the indicator of one pair of
    antipodal form-assignments.
    """
    return product([expand_forms(f) for f in alternate_invariant_factors_forms()])


def core_product_forms() -> Poly:
    """mu = (G+F)(G+H)(C+D)(B+C)(D+F): the factor common to both sides of
    the regrouped one-round difference."""
    return product([_s(G, F), _s(G, H), _s(C, D), _s(B, C), _s(D, F)])


def bracket_with_instances() -> Poly:
    """The cofactor of mu in the regrouped difference, with the second and
    fourth function instances still opaque (Y, W)."""
    Yv, Wv = var(PLACEHOLDER_Y), var(PLACEHOLDER_W)
    return _s(
        product([_s(A, B), _s(E, F), _s(B, F)]),
        product([_s(A, H), _s(D, E), _s(B, F)]),
        product([Yv, _s(G, D, ONE), _s(B, F), _s(H, F, ONE), _s(A, H)]),
        product([Wv, _s(H, F, ONE), _s(G, D, ONE), _s(D, E)]),
        mul(Yv, Wv),
    )


def final_bracket() -> Poly:
    """The bracket after absorbing both instances (Y = W = 1); hard-coded
    so the final annihilation check is independent of the earlier steps."""
    return _s(
        product([_s(A, B), _s(E, F), _s(B, F)]),
        product([_s(A, H), _s(D, E), _s(B, F)]),
        product([_s(G, D, ONE), _s(B, F), _s(H, F, ONE), _s(A, H)]),
        product([_s(H, F, ONE), _s(G, D, ONE), _s(D, E)]),
        ONE,
    )


def core_factorization_a() -> Tuple[List[Poly], Poly]:
    """mu = [H(B+1)(D+1)(G+1) + (H+1)BDG] (C+H+1)(C+F+1)(F+H+1)."""
    bracket = _s(product([H, _s(B, ONE), _s(D, ONE), _s(G, ONE)]),
                 product([_s(H, ONE), B, D, G]))
    return [_s(C, H, ONE), _s(C, F, ONE), _s(F, H, ONE)], bracket


def core_factorization_b() -> Tuple[List[Poly], Poly]:
    """mu = [G(C+1)(F+1)(H+1) + (G+1)CHF] (B+D+1)(D+G+1)(B+G+1)."""
    bracket = _s(product([G, _s(C, ONE), _s(F, ONE), _s(H, ONE)]),
                 product([_s(G, ONE), C, H, F]))
    return [_s(B, D, ONE), _s(D, G, ONE), _s(B, G, ONE)], bracket


# ---------------------------------------------------------------------------
# Step-by-step verification of the attack.

class HypothesisError(ValueError):
    def __init__(self, failed: Sequence[str]):
        super().__init__("wiring violates attack hypotheses: %s" % ", ".join(failed))
        self.failed = tuple(failed)


@dataclass(frozen=True)
class StepResult:
    key: str
    description: str
    passed: bool


@dataclass(frozen=True)
class ChainReport:
    steps: Tuple[StepResult, ...]
    fe_report: fe_mod.FeReport

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.steps)

    def lines(self) -> List[str]:
        out = []
        for s in self.steps:
            out.append("step %-22s %s  (%s)" % (s.key + ":",
                                                "PASS" if s.passed else "FAIL",
                                                s.description))
        out.append("ALL STEPS PASS" if self.passed else "STEP FAILURES: %d"
                   % sum(1 for s in self.steps if not s.passed))
        return out


def verify_attack(w: Wiring, fun: BoolFun6) -> ChainReport:
    """Re-derive the attack mechanically, one exact identity per step.

    Raises HypothesisError when the wiring lacks the required D/P structure.
    """
    hyps = w.hypotheses()
    failed = [k for k, ok in sorted(hyps.items()) if not ok]
    if failed:
        raise HypothesisError(failed)

    steps: List[StepResult] = []

    def record(key, description, ok):
        steps.append(StepResult(key, description, bool(ok)))

    bank = form_bank()
    A_, B_, C_, D_, E_, F_, G_, H_ = (bank[n] for n in "ABCDEFGH")
    Yv, Wv = var(PLACEHOLDER_Y), var(PLACEHOLDER_W)

    rs_ph = round_system(w, "placeholder")
    record("output-differences",
           "y9+y5 = W + A and y25+y21 = Y + E",
           add(rs_ph.output(9), rs_ph.output(5)) == add(Wv, A_)
           and add(rs_ph.output(25), rs_ph.output(21)) == add(Yv, E_))

    P_state = product_invariant()
    fe_ph = add(P_state, substitute(P_state, rs_ph.as_substitution()))
    regrouped = mul(expand_forms(core_product_forms()),
                    expand_forms(bracket_with_instances()))
    record("regrouped-difference",
           "one-round difference = mu * bracket with opaque Y, W",
           fe_ph == regrouped)

    args = w.z_args()
    Yex = fun.instantiate(args[1])
    Wex = fun.instantiate(args[3])
    CHF = product([C_, H_, F_])
    BDG = product([B_, D_, G_])
    record("absorption",
           "CHF*W = CHF and BDG*Y = BDG",
           mul(CHF, Wex) == CHF and mul(BDG, Yex) == BDG)

    cCHF = product([_s(C_, ONE), _s(H_, ONE), _s(F_, ONE)])
    cBDG = product([_s(B_, ONE), _s(D_, ONE), _s(G_, ONE)])
    record("complement-absorption",
           "(C+1)(H+1)(F+1)*W and (B+1)(D+1)(G+1)*Y absorb too",
           mul(cCHF, Wex) == cCHF and mul(cBDG, Yex) == cBDG)

    mu_forms = core_product_forms()
    ok = True
    for factors, bracket in (core_factorization_a(), core_factorization_b()):
        ok = ok and product(factors + [bracket]) == mu_forms
    record("core-factorizations",
           "both printed factorizations re-multiply to mu",
           ok)

    mu_state = expand_forms(mu_forms)
    record("core-absorption",
           "Y*mu = mu and W*mu = mu",
           mul(Yex, mu_state) == mu_state and mul(Wex, mu_state) == mu_state)

    derived = substitute(bracket_with_instances(),
                         {PLACEHOLDER_Y: ONE, PLACEHOLDER_W: ONE})
    record("final-bracket",
           "substituting Y = W = 1 annihilates: mu * bracket = 0",
           derived == final_bracket() and not mul(mu_forms, final_bracket()))

    report = fe_mod.build_fe(P_state, round_system(w, "expanded", fun))
    record("fundamental-equation",
           "FE reduces to 0 with no F/K/L dependence",
           report.is_zero and not report.depends_on)

    return ChainReport(tuple(steps), report)


# ---------------------------------------------------------------------------
# Non-unique factorization explorer.

@dataclass(frozen=True)
class FactorizationTree:
    """One discovered factorization chain.

    branches holds at most one (affine factor, quotient subtree) pair;
    distinct trees over the same root witness non-unique factorization.
    """

    root: Poly
    branches: Tuple[Tuple[Poly, "FactorizationTree"], ...]

    @property
    def is_leaf(self) -> bool:
        return not self.branches

    def chain(self) -> Tuple[List[Poly], List[Poly]]:
        """(recorded factors, quotient polynomial after each division)."""
        factors, nodes = [], []
        t = self
        while t.branches:
            ell, sub = t.branches[0]
            factors.append(ell)
            nodes.append(sub.root)
            t = sub
        return factors, nodes

    @property
    def leaf(self) -> Poly:
        factors, nodes = self.chain()
        return nodes[-1] if nodes else self.root

    def verify(self) -> bool:
        factors, _ = self.chain()
        return product(factors + [self.leaf]) == self.root

    def factor_set(self) -> frozenset:
        return frozenset(self.chain()[0])


def _affine_candidates(p: Poly) -> List[Poly]:
    """Nonconstant affine factors of p, from the degree-1 annihilator space.

    Every annihilator ell' of p yields the factor ell'+1; the whole
    annihilator span is enumerated (the reduced basis alone misses factors
    that are sums of basis elements), capped at 2^12 elements.  Up to 12
    variables the basis comes from the annihilator operation; 13..16
    variables use the truth-table solver, whose homogeneous part is the
    same space.
    """
    sup = sorted(p.support())
    if not sup or len(sup) > 16:
        return []
    if len(sup) <= 12:
        ann_basis = list(annihilators(p, sup, 1).basis)
    else:
        sol = affine_factor_solutions(p, sup)
        if sol is None:
            return []
        ann_basis = [vector_to_affine(b, sup) for b in sol[1]]
    ann_basis = [b for b in ann_basis if b]
    out = set()
    if len(ann_basis) <= 12:
        for combo in range(1, 1 << len(ann_basis)):
            acc = ZERO
            c, i = combo, 0
            while c:
                if c & 1:
                    acc = add(acc, ann_basis[i])
                c >>= 1
                i += 1
            ell = add(acc, ONE)
            if ell.degree() == 1:
                out.add(ell)
    else:
        out.update(add(b, ONE) for b in ann_basis if add(b, ONE).degree() == 1)
    return sorted(out, key=lambda q: (len(q.support()), ring.render(q)))


def explore_factorizations(p: Poly, max_trees: int, seed: int) -> List[FactorizationTree]:
    """Randomized division chains; returns up to max_trees distinct trees.

    At each node one factor is drawn uniformly from the minimal-support
    affine candidates and divided out; a polynomial with no affine factor
    yields a single-leaf tree.  Every tree re-verifies by multiplication.
    """
    if not p:
        raise ValueError("cannot factor the zero polynomial")
    rng = random.Random(seed)
    seen = set()
    trees: List[FactorizationTree] = []
    for _ in range(max(8 * max_trees, 16)):
        if len(trees) >= max_trees:
            break
        chain: List[Poly] = []
        nodes: List[Poly] = []
        node = p
        while True:
            cands = _affine_candidates(node)
            if not cands:
                break
            smallest = len(cands[0].support())
            pool = [c for c in cands if len(c.support()) == smallest]
            ell = pool[rng.randrange(len(pool))]
            chain.append(ell)
            node = factor_out(node, ell)
            nodes.append(node)
            if node == ONE:
                break
        key = (frozenset(chain), node)
        if key in seen:
            continue
        seen.add(key)
        tree = FactorizationTree(node, ())
        for ell, q in zip(reversed(chain), reversed([p] + nodes[:-1])):
            tree = FactorizationTree(q, ((ell, tree),))
        assert tree.root == p
        if not tree.verify():  # pragma: no cover - factor_out re-checks
            continue
        trees.append(tree)
    return trees


def affine_divisors(p: Poly) -> frozenset:
    """All nonconstant affine ell with (ell+1)*p = 0, by exhaustive span."""
    sup = sorted(p.support())
    if not sup:
        return frozenset()
    sol = affine_factor_solutions(p, sup)
    if sol is None:
        return frozenset()
    particular, basis = sol
    out = set()
    if len(basis) > 14:
        return frozenset()
    for combo in range(1 << len(basis)):
        v = particular
        c, i = combo, 0
        while c:
            if c & 1:
                v ^= basis[i]
            c >>= 1
            i += 1
        ell = vector_to_affine(v, sup)
        if ell.degree() == 1:
            out.add(ell)
    return frozenset(out)


def matches_presentation(tree: FactorizationTree, factors: Sequence[Poly],
                         bracket: Poly) -> bool:
    """Does some division prefix of the tree realize a printed factorization?

    A prefix matches when its quotient equals the printed cofactor and the
    affine divisors of the prefix product are exactly the printed factor
    set (printed presentations list dependent factors, e.g. three pairwise
    sums whose product equals that of any two of them).
    """
    chain, nodes = tree.chain()
    want = frozenset(factors)
    for k in range(1, len(chain) + 1):
        if nodes[k - 1] != bracket:
            continue
        if affine_divisors(product(chain[:k])) == want:
            return True
    return False


# ---------------------------------------------------------------------------
# Random function search.

@dataclass(frozen=True)
class SearchReport:
    trials: int
    hits: Tuple[Tuple[int, int], ...]  # (trial index, truth table)
    frequency: float
    wilson_low: float
    wilson_high: float

    def lines(self) -> List[str]:
        out = ["trials = %d" % self.trials, "hits = %d" % len(self.hits)]
        for idx, tt in self.hits:
            out.append("hit trial=%d tt=%016x" % (idx, tt))
        out.append("frequency = %.6g" % self.frequency)
        out.append("wilson95 = [%.6g, %.6g]" % (self.wilson_low, self.wilson_high))
        return out


def wilson_interval(hits: int, trials: int, z: float = 1.96) -> Tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    phat = hits / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def is_hit(w: Wiring, P: Poly, fun: BoolFun6, screen_seed: int = 0) -> bool:
    """Exact invariant verdict for one candidate function.

    A cheap empirical screen rejects most functions (any observed mismatch
    is a true counterexample); survivors get the exact symbolic verdict.
    """
    screen = fe_mod.check_invariant_empirically(P, w, fun, 128, seed=screen_seed)
    if screen.mismatches:
        return False
    return fe_mod.build_fe(P, round_system(w, "expanded", fun)).is_zero


def _search_trial(args) -> Optional[Tuple[int, int]]:
    w, P, seed, idx = args
    fun = random_boolfun(seed + idx)
    if is_hit(w, P, fun, screen_seed=seed ^ 0x5EED ^ idx):
        return (idx, fun.tt)
    return None


def thread_count() -> int:
    try:
        n = int(os.environ.get("INVFORGE_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def search_random_functions(w: Wiring, P: Poly, trials: int, seed: int,
                            threads: Optional[int] = None) -> SearchReport:
    """Seeded stream of random functions; a hit is an exact FE = 0 verdict.

    Trial i uses the function seeded by seed+i, so results are independent
    of the worker count and byte-reproducible.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    fe_mod._check_state_only(P)
    if threads is None:
        threads = thread_count()
    jobs = [(w, P, seed, i) for i in range(trials)]
    results: List[Optional[Tuple[int, int]]] = []
    if threads > 1:
        try:
            from concurrent.futures import ProcessPoolExecutor
            with ProcessPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(_search_trial, jobs, chunksize=64))
        except OSError:
            results = [_search_trial(j) for j in jobs]
    else:
        results = [_search_trial(j) for j in jobs]
    hits = tuple(r for r in results if r is not None)
    lo, hi = wilson_interval(len(hits), trials)
    return SearchReport(trials, hits, len(hits) / trials, lo, hi)
