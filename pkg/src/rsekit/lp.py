"""Uniform linear-program representation and a deterministic simplex solver.

Every solver in the package funnels through :func:`solve` / :func:`feasible`.
The solver runs in one of two arithmetic modes:

* float mode (default): IEEE doubles with a feasibility tolerance of 1e-8
  and a pivot/strictness tolerance of 1e-9,
* exact mode: ``fractions.Fraction`` throughout, no tolerances.

Both modes share a single two-phase tableau simplex using Bland's rule, so
results are deterministic and cycling-free. Strict inequalities (``<``/``>``)
are never sent to the pivoting core: they are relaxed to their non-strict
counterparts before solving and the relaxation is recorded on the outcome so
callers can post-verify tightness.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .errors import MalformedLpError, SolverFailure

Scalar = Union[int, float, Fraction]

FEASIBILITY_TOL = 1e-8
PIVOT_TOL = 1e-9

RELATIONS = ("<=", ">=", "==", "<", ">")
_STRICT = {"<": "<=", ">": ">="}


@dataclass(frozen=True)
class Constraint:
    """One linear constraint ``coeffs . x  <rel>  rhs``."""

    coeffs: tuple
    relation: str
    rhs: Scalar

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise MalformedLpError(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))


@dataclass(frozen=True)
class LinearProgram:
    """An LP over nonnegative variables, optionally restricted to the simplex.

    ``sense`` is one of ``"max"``, ``"min"`` or ``"feasibility"``. When
    ``simplex_constraint`` is set, the constraint ``sum(x) == 1`` is added
    (all variables are nonnegative regardless).
    """

    num_vars: int
    objective: tuple | None
    sense: str
    constraints: tuple[Constraint, ...]
    simplex_constraint: bool = False

    def __post_init__(self):
        if self.sense not in ("max", "min", "feasibility"):
            raise MalformedLpError(f"unknown sense {self.sense!r}")
        if self.sense != "feasibility":
            if self.objective is None or len(self.objective) != self.num_vars:
                raise MalformedLpError("objective length != num_vars")
        for c in self.constraints:
            if len(c.coeffs) != self.num_vars:
                raise MalformedLpError("constraint length != num_vars")
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.objective is not None:
            object.__setattr__(self, "objective", tuple(self.objective))

    def strict_indices(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.constraints) if c.relation in _STRICT)


def maximize(objective: Sequence[Scalar], constraints: Sequence[Constraint], *,
             simplex: bool = False) -> LinearProgram:
    return LinearProgram(len(objective), tuple(objective), "max", tuple(constraints), simplex)


def feasibility(num_vars: int, constraints: Sequence[Constraint], *,
                simplex: bool = False) -> LinearProgram:
    return LinearProgram(num_vars, None, "feasibility", tuple(constraints), simplex)


@dataclass(frozen=True)
class LpOutcome:
    """Result of an LP solve.

    ``tight_constraints`` indexes into the program's constraint tuple and
    holds the constraints satisfied with equality at the solution (within
    the feasibility tolerance in float mode, exactly in exact mode).
    ``relaxed_constraints`` records which strict constraints were relaxed
    before solving; callers post-verify those.
    """

    status: str  # "optimal" | "infeasible" | "unbounded"
    solution: tuple | None
    objective_value: Scalar | None
    tight_constraints: frozenset = field(default_factory=frozenset)
    relaxed_constraints: tuple[int, ...] = ()


def lp_to_text(lp: LinearProgram) -> str:
    """Plain-text normal form, one constraint per line, for audit dumps."""
    lines = []
    if lp.sense == "feasibility":
        lines.append("feasibility")
    else:
        lines.append(f"{lp.sense} " + " ".join(str(c) for c in lp.objective))
    for con in lp.constraints:
        lines.append(" ".join(str(c) for c in con.coeffs) + f" {con.relation} {con.rhs}")
    if lp.simplex_constraint:
        lines.append(" ".join(["1"] * lp.num_vars) + " == 1")
    return "\n".join(lines)


def _rows_for_solve(lp: LinearProgram, exact: bool):
    """Canonical (coeffs, relation, rhs) rows with strict relations relaxed."""
    conv = Fraction if exact else float
    rows = []
    for con in lp.constraints:
        rel = _STRICT.get(con.relation, con.relation)
        rows.append(([conv(v) for v in con.coeffs], rel, conv(con.rhs)))
    if lp.simplex_constraint:
        rows.append(([conv(1)] * lp.num_vars, "==", conv(1)))
    return rows


def solve(lp: LinearProgram, *, exact: bool = False) -> LpOutcome:
    """Solve ``lp`` to a vertex-optimal solution with Bland's rule.

    Deterministic: identical inputs give identical outcomes. Strict
    constraints are relaxed (recorded in the outcome) before solving.
    """
    if os.environ.get("RSEKIT_LP_DUMP") == "1":
        print(lp_to_text(lp), file=sys.stderr)
        print("--", file=sys.stderr)
    relaxed = lp.strict_indices()
    rows = _rows_for_solve(lp, exact)
    conv = Fraction if exact else float
    if lp.sense == "feasibility":
        objective = [conv(0)] * lp.num_vars
    else:
        sign = 1 if lp.sense == "max" else -1
        objective = [sign * conv(v) for v in lp.objective]

    status, x = _simplex(lp.num_vars, rows, objective, exact)
    if status != "optimal":
        return LpOutcome(status, None, None, frozenset(), relaxed)

    obj_val = None
    if lp.sense != "feasibility":
        val = sum(c * xi for c, xi in zip(objective, x))
        obj_val = val if lp.sense == "max" else -val
    tight = _tight_set(lp, x, exact)
    return LpOutcome("optimal", tuple(x), obj_val, tight, relaxed)


def feasible(lp: LinearProgram, *, exact: bool = False) -> LpOutcome:
    """Feasibility variant of :func:`solve`; returns any feasible point.

    The one fully unconstrained case (no constraints, simplex only) returns
    the uniform distribution rather than an arbitrary vertex.
    """
    if not lp.constraints and lp.simplex_constraint:
        conv = Fraction if exact else float
        point = tuple(conv(1) / conv(lp.num_vars) if exact else 1.0 / lp.num_vars
                      for _ in range(lp.num_vars))
        return LpOutcome("optimal", point, None, frozenset(), lp.strict_indices())
    flp = LinearProgram(lp.num_vars, None, "feasibility", lp.constraints,
                        lp.simplex_constraint)
    return solve(flp, exact=exact)


def _tight_set(lp: LinearProgram, x, exact: bool) -> frozenset:
    conv = Fraction if exact else float
    tight = set()
    for i, con in enumerate(lp.constraints):
        lhs = sum(conv(c) * xi for c, xi in zip(con.coeffs, x))
        diff = lhs - conv(con.rhs)
        if (diff == 0) if exact else (abs(diff) <= FEASIBILITY_TOL):
            tight.add(i)
    return frozenset(tight)


# ---------------------------------------------------------------------------
# Two-phase tableau simplex, Bland's rule, generic over float / Fraction.
# ---------------------------------------------------------------------------

def _simplex(num_vars: int, rows, objective, exact: bool):
    """Maximize objective . x subject to rows, x >= 0.

    rows: list of (coeffs, rel in {"<=", ">=", "=="}, rhs).
    Returns (status, solution_list).
    """
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    tol = zero if exact else PIVOT_TOL

    # Normalize to rhs >= 0, preferring "<=" rows (slack-basic, no
    # artificial): flip ">=" rows whenever their rhs is nonpositive.
    norm = []
    for coeffs, rel, rhs in rows:
        if rhs < 0 or (rel == ">=" and rhs == 0):
            coeffs = [-c for c in coeffs]
            rhs = -rhs
            rel = {"<=": ">=", ">=": "<=", "==": "=="}[rel]
        norm.append((coeffs, rel, rhs))

    n_slack = sum(1 for _, rel, _ in norm if rel != "==")
    # artificial vars for ">=" and "==" rows
    art_rows = [i for i, (_, rel, _) in enumerate(norm) if rel != "<="]
    n_art = len(art_rows)
    n_total = num_vars + n_slack + n_art

    m = len(norm)
    tableau = [[zero] * (n_total + 1) for _ in range(m)]
    basis = [-1] * m
    s_at = num_vars
    a_at = num_vars + n_slack
    for r, (coeffs, rel, rhs) in enumerate(norm):
        for j, c in enumerate(coeffs):
            tableau[r][j] = c if exact else float(c)
        tableau[r][n_total] = rhs
        if rel == "<=":
            tableau[r][s_at] = one
            basis[r] = s_at
            s_at += 1
        elif rel == ">=":
            tableau[r][s_at] = -one
            s_at += 1
            tableau[r][a_at] = one
            basis[r] = a_at
            a_at += 1
        else:
            tableau[r][a_at] = one
            basis[r] = a_at
            a_at += 1

    art_start = num_vars + n_slack

    if n_art:
        # Phase 1: minimize sum of artificials.
        cost = [zero] * (n_total + 1)
        for j in range(art_start, n_total):
            cost[j] = one
        for r in range(m):
            if basis[r] >= art_start:
                row = tableau[r]
                for j in range(n_total + 1):
                    cost[j] = cost[j] - row[j]
        status = _pivot_until_optimal(tableau, basis, cost, n_total, tol,
                                      blocked_from=None)
        if status == "unbounded":  # cannot happen for a bounded-below phase 1
            raise SolverFailure("phase 1 reported unbounded")
        phase1_val = -cost[n_total]
        infeasible = (phase1_val != 0) if exact else (abs(phase1_val) > FEASIBILITY_TOL)
        if infeasible:
            return "infeasible", None
        # Drive remaining artificials out of the basis (or drop unit rows).
        keep = []
        for r in range(m):
            if basis[r] >= art_start:
                pivot_col = -1
                for j in range(art_start):
                    v = tableau[r][j]
                    if (v != 0) if exact else (abs(v) > tol):
                        pivot_col = j
                        break
                if pivot_col >= 0:
                    _pivot(tableau, basis, r, pivot_col)
                    keep.append(r)
                # else: redundant row, skip it entirely below
            else:
                keep.append(r)
        if len(keep) != m:
            tableau = [tableau[r] for r in keep]
            basis = [basis[r] for r in keep]
            m = len(keep)

    # Phase 2: maximize objective. Work with cost row for min(-objective).
    cost = [zero] * (n_total + 1)
    for j in range(num_vars):
        cost[j] = -(objective[j] if exact else float(objective[j]))
    for r in range(m):
        b = basis[r]
        cb = cost[b]
        if (cb != 0) if exact else (abs(cb) > 0.0):
            row = tableau[r]
            for j in range(n_total + 1):
                cost[j] = cost[j] - cb * row[j]
    status = _pivot_until_optimal(tableau, basis, cost, n_total, tol,
                                  blocked_from=art_start if n_art else None)
    if status == "unbounded":
        return "unbounded", None

    x = [zero] * num_vars
    for r in range(m):
        if basis[r] < num_vars:
            x[basis[r]] = tableau[r][n_total]
    if not exact:
        x = [0.0 if abs(v) < PIVOT_TOL else v for v in x]
    return "optimal", x


def _pivot_until_optimal(tableau, basis, cost, n_total, tol, blocked_from):
    """Bland pivoting on the cost row until no negative reduced cost remains.

    ``blocked_from`` excludes columns at or past that index (artificials in
    phase 2) from entering the basis.
    """
    limit = n_total if blocked_from is None else blocked_from
    while True:
        enter = -1
        for j in range(limit):
            if cost[j] < -tol:
                enter = j
                break
        if enter < 0:
            return "optimal"
        # Ratio test; ties broken by smallest basic variable index (Bland).
        leave = -1
        best = None
        for r in range(len(tableau)):
            a = tableau[r][enter]
            if a > tol:
                ratio = tableau[r][n_total] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best = ratio
                    leave = r
        if leave < 0:
            return "unbounded"
        _pivot(tableau, basis, leave, enter, cost)


def _pivot(tableau, basis, r, c, cost=None):
    row = tableau[r]
    piv = row[c]
    for j in range(len(row)):
        row[j] = row[j] / piv
    row[c] = piv / piv  # exactly one, also in float
    for rr in range(len(tableau)):
        if rr == r:
            continue
        other = tableau[rr]
        f = other[c]
        if f == 0:
            continue
        for j in range(len(row)):
            other[j] = other[j] - f * row[j]
        other[c] = 0 * f  # kill residual noise in float mode
    if cost is not None:
        f = cost[c]
        if f != 0:
            for j in range(len(row)):
                cost[j] = cost[j] - f * row[j]
            cost[c] = 0 * f
    basis[r] = c
