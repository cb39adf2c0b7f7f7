"""Approximation algorithms for the robust equilibrium.

Two routes:

* :func:`gap_approx` - when the inducibility gap exceeds delta, blend the
  optimistic-commitment optimum with the strategy that forces its response
  by the full gap; the blend pins the response set and loses at most a
  delta/gap fraction of the optimistic value.
* :func:`qptas_solve` - enumerate k-uniform anchor strategies, search each
  anchor's surrogate neighborhood (strategies whose leader payoffs stay
  within epsilon of the anchor's, column by column) with a feasibility LP
  per candidate response and a binary search over the anchor's payoff
  levels. Quasi-polynomial in the action counts.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import lp
from .baseline import induce_strategy, inducibility_gap, solve_sse
from .errors import EnumerationCapExceeded, GameFormatError, GapTooSmall
from .exact import RseSolution
from .game import (BimatrixGame, MixedStrategy, ResponseSet, evaluate,
                   leader_payoffs)
from .kernels import compositions, count_compositions

ANCHOR_BUDGET = 2_000_000


@dataclass(frozen=True)
class KUniformStrategy:
    """Mixed strategy with all probabilities integer multiples of 1/k."""

    counts: tuple[int, ...]
    k: int

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if self.k < 1 or any(c < 0 for c in counts) or sum(counts) != self.k:
            raise GameFormatError("counts must be nonnegative and sum to k")
        object.__setattr__(self, "counts", counts)

    def to_strategy(self, *, exact: bool = False) -> MixedStrategy:
        probs = np.array(self.counts, dtype=np.float64) / self.k
        ex = tuple(Fraction(c, self.k) for c in self.counts) if exact else None
        return MixedStrategy(probs, ex)


@dataclass(frozen=True)
class SurrogateRegion:
    """Anchor plus the 2n payoff-proximity inequalities defining its cell."""

    anchor: KUniformStrategy
    epsilon: float | Fraction
    anchor_payoffs: tuple

    def contains(self, game: BimatrixGame, x: MixedStrategy, *,
                 exact: bool = False) -> bool:
        vals = leader_payoffs(game, x, exact=exact)
        eps = self.epsilon if exact else float(self.epsilon)
        tol = 0 if exact else 1e-9
        return all(abs(v - t) <= eps + tol
                   for v, t in zip(vals, self.anchor_payoffs))


def make_region(game: BimatrixGame, anchor: KUniformStrategy, epsilon, *,
                exact: bool = False) -> SurrogateRegion:
    x = anchor.to_strategy(exact=exact)
    vals = tuple(leader_payoffs(game, x, exact=exact))
    eps = Fraction(epsilon) if exact else float(epsilon)
    return SurrogateRegion(anchor, eps, vals)


def gap_approx(game: BimatrixGame, delta, *, exact: bool = False) -> RseSolution:
    """delta/gap-optimal strategy from one convex combination.

    Requires gap > delta. Output: (1 - w) x_sse + w x_induce with
    w = delta / gap; its response set collapses to the optimistic response,
    certifying value >= (1 - delta/gap) * sse_value.
    """
    if not delta > 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    t0 = time.perf_counter()
    report = inducibility_gap(game, exact=exact)
    gap = report.gap
    if not gap > delta:
        raise GapTooSmall(f"inducibility gap {gap} must exceed delta {delta}")
    sse = solve_sse(game, exact=exact)
    lp_count = game.n * 2  # n SSE column LPs plus n per-action margin LPs
    if math.isinf(gap):
        x_hat = sse.strategy
        floor = sse.leader_value
    else:
        lp_count += 1
        inducer = induce_strategy(game, sse.response, gap, exact=exact)
        if exact:
            w = Fraction(delta) / gap
            coords = tuple((1 - w) * a + w * b
                           for a, b in zip(sse.strategy.exact, inducer.exact))
            x_hat = MixedStrategy(np.array([float(v) for v in coords]), coords)
        else:
            w = float(delta) / float(gap)
            x_hat = MixedStrategy((1 - w) * sse.strategy.probs + w * inducer.probs)
        floor = (1 - w) * sse.leader_value
    outcome = evaluate(game, x_hat, delta, exact=exact)
    guarantee = {
        "kind": "gap-approx",
        "gap": gap,
        "sse_value": sse.leader_value,
        "floor": floor,
    }
    return RseSolution(outcome, None, outcome.response_set, outcome.response,
                       lp_count, time.perf_counter() - t0, "gap-approx",
                       guarantee)


def build_k(game: BimatrixGame, epsilon, *, log_base: float = math.e) -> int:
    """Anchor granularity: ceil(log(2n) / (2 epsilon^2)), natural log default."""
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must be in (0, 1], got {epsilon}")
    e = float(epsilon)
    return max(1, math.ceil(math.log(2 * game.n, log_base) / (2 * e * e)))


def utility_verification(game: BimatrixGame, region: SurrogateRegion, delta,
                         mu, *, exact: bool = False,
                         eta: float = 1e-9) -> tuple[bool, MixedStrategy | None]:
    """Does some strategy in the region make every response worth >= mu?

    Collects the anchor-payoff-below-mu actions into Q, then scans the
    remaining actions ascending for one that can be made a best response
    while beating every Q member by at least delta (non-strict, which under
    the strict response rule suffices to exclude Q). Returns the first
    witness.
    """
    ok, x, _ = _verification_counted(game, region, delta, mu, exact, eta)
    return ok, x


def _verification_counted(game, region, delta, mu, exact, eta=1e-9):
    if exact:
        mu = Fraction(mu)
        d = Fraction(delta)
        below = [t < mu for t in region.anchor_payoffs]
    else:
        mu = float(mu)
        d = float(delta)
        below = [t < mu - eta for t in region.anchor_payoffs]
    Q = [j for j, b in enumerate(below) if b]
    candidates = [j for j, b in enumerate(below) if not b]
    region_rows = _region_constraints(game, region, exact)
    m, n = game.m, game.n
    if exact:
        col = [[row[j] for row in game.exact_u_f] for j in range(n)]
    else:
        col = [tuple(game.u_f[:, j]) for j in range(n)]
    nlp = 0
    for j in candidates:
        cons = list(region_rows)
        for k in range(n):
            if k == j:
                continue
            cons.append(lp.Constraint(
                tuple(col[j][i] - col[k][i] for i in range(m)), ">=", 0))
        for k in Q:
            cons.append(lp.Constraint(
                tuple(col[j][i] - col[k][i] for i in range(m)), ">=", d))
        out = lp.feasible(lp.feasibility(m, cons, simplex=True), exact=exact)
        nlp += 1
        if out.status == "optimal":
            if exact:
                x = MixedStrategy(np.array([float(v) for v in out.solution]),
                                  tuple(out.solution))
            else:
                x = MixedStrategy(np.array(out.solution, dtype=float))
            return True, x, nlp
    return False, None, nlp


def _region_constraints(game: BimatrixGame, region: SurrogateRegion, exact):
    m, n = game.m, game.n
    if exact:
        if not game.has_exact:
            raise GameFormatError("exact mode requires a game with rational matrices")
        col = [[row[j] for row in game.exact_u_l] for j in range(n)]
        eps = Fraction(region.epsilon)
    else:
        col = [tuple(game.u_l[:, j]) for j in range(n)]
        eps = float(region.epsilon)
    rows = []
    for j in range(n):
        t = region.anchor_payoffs[j]
        rows.append(lp.Constraint(tuple(col[j]), "<=", t + eps))
        rows.append(lp.Constraint(tuple(col[j]), ">=", t - eps))
    return rows


def qptas_solve(game: BimatrixGame, delta, epsilon, *, exact: bool = False,
                anchor_budget: int = ANCHOR_BUDGET,
                log_base: float = math.e) -> RseSolution:
    """Additive-epsilon approximation via k-uniform anchor enumeration.

    Per anchor, binary-search the largest verifiable payoff level mu over
    the anchor's n payoff values. Witnesses (and the anchors themselves)
    are scored by their true pessimistic value; the best is returned.
    Anchors enumerate in lexicographic count order and ties keep the
    earliest, so the result is deterministic.
    """
    if not delta > 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    t0 = time.perf_counter()
    k = build_k(game, epsilon, log_base=log_base)
    total = count_compositions(k, game.m)
    if total > anchor_budget:
        raise EnumerationCapExceeded(
            f"{total} k-uniform anchors exceed the budget {anchor_budget} "
            f"(k={k}, m={game.m})")
    lp_count = 0
    best = None  # (true value, strategy, anchor, mu)
    for counts in compositions(k, game.m):
        anchor = KUniformStrategy(counts, k)
        region = make_region(game, anchor, epsilon, exact=exact)
        levels = sorted(set(region.anchor_payoffs))
        # Largest verifiable mu; the smallest level always verifies with the
        # anchor's own best response as witness.
        lo, hi = 0, len(levels) - 1
        witness = None
        while lo < hi:
            mid = (lo + hi + 1) // 2
            ok, x, nlp = _verification_counted(game, region, delta,
                                               levels[mid], exact)
            lp_count += nlp
            if ok:
                lo = mid
                witness = x
            else:
                hi = mid - 1
        if witness is None:
            ok, witness, nlp = _verification_counted(game, region, delta,
                                                     levels[lo], exact)
            lp_count += nlp
            if not ok:
                continue
        for x in (witness, anchor.to_strategy(exact=exact)):
            rep = evaluate(game, x, delta, exact=exact)
            if best is None or rep.leader_value > best[0]:
                best = (rep.leader_value, x, anchor, levels[lo])
    if best is None:
        raise GameFormatError("verification failed on every anchor")
    value, x, anchor, mu = best
    outcome = evaluate(game, x, delta, exact=exact)
    guarantee = {
        "kind": "qptas",
        "k": k,
        "anchors": total,
        "epsilon": float(epsilon),
        "floor_formula": "value >= u_rse(delta) - epsilon",
        "anchor_counts": anchor.counts,
        "verified_mu": mu,
    }
    return RseSolution(outcome, None, outcome.response_set, outcome.response,
                       lp_count, time.perf_counter() - t0, "qptas", guarantee)
