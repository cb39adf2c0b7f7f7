"""Game representation, delta-optimal response sets, and leader value evaluation.

A :class:`BimatrixGame` always carries float64 utility matrices with entries
in [0, 1]. Games built from rational data additionally carry exact
``Fraction`` matrices; operations accept ``exact=True`` to run entirely in
rational arithmetic (the reference mode for boundary-sensitive questions).

The delta-optimal response set uses a strict inequality: ``j`` responds iff
``u_f(x, j) > max_j' u_f(x, j') - delta``. In float mode strictness is decided
with the tolerance ``eta`` (default 1e-9): a candidate enters only if it
clears the threshold by more than ``eta``. For ``delta == 0`` the set is the
plain argmax set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .errors import GameFormatError, InvalidStrategyError

ETA = 1e-9

ExactMatrix = tuple[tuple[Fraction, ...], ...]

PESSIMISTIC = "pessimistic"
OPTIMISTIC = "optimistic"


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BimatrixGame:
    """Leader/follower utility matrices with entries in [0, 1].

    Rows index leader actions, columns follower actions (zero-based).
    ``exact_u_l``/``exact_u_f`` hold the same matrices as Fractions when the
    game was built from rational data.
    """

    u_l: np.ndarray
    u_f: np.ndarray
    meta: dict = field(default_factory=dict)
    exact_u_l: ExactMatrix | None = None
    exact_u_f: ExactMatrix | None = None

    def __post_init__(self):
        ul = _freeze(self.u_l)
        uf = _freeze(self.u_f)
        if ul.ndim != 2 or ul.shape != uf.shape or ul.shape[0] < 1 or ul.shape[1] < 1:
            raise GameFormatError(f"matrix shapes disagree: {ul.shape} vs {uf.shape}")
        if not (np.isfinite(ul).all() and np.isfinite(uf).all()):
            raise GameFormatError("non-finite utility entry")
        for a in (ul, uf):
            if a.min() < -ETA or a.max() > 1 + ETA:
                raise GameFormatError("utilities must lie in [0, 1]; normalize first")
        object.__setattr__(self, "u_l", ul)
        object.__setattr__(self, "u_f", uf)
        for name in ("exact_u_l", "exact_u_f"):
            ex = getattr(self, name)
            if ex is not None:
                ex = tuple(tuple(Fraction(v) for v in row) for row in ex)
                if len(ex) != ul.shape[0] or any(len(r) != ul.shape[1] for r in ex):
                    raise GameFormatError(f"{name} shape disagrees with float matrix")
                if any(v < 0 or v > 1 for row in ex for v in row):
                    raise GameFormatError("exact utilities must lie in [0, 1]")
                object.__setattr__(self, name, ex)

    @property
    def m(self) -> int:
        return self.u_l.shape[0]

    @property
    def n(self) -> int:
        return self.u_l.shape[1]

    @property
    def has_exact(self) -> bool:
        return self.exact_u_l is not None and self.exact_u_f is not None

    def __eq__(self, other):
        if not isinstance(other, BimatrixGame):
            return NotImplemented
        return (
            np.array_equal(self.u_l, other.u_l)
            and np.array_equal(self.u_f, other.u_f)
            and self.exact_u_l == other.exact_u_l
            and self.exact_u_f == other.exact_u_f
            and self.meta == other.meta
        )

    def __hash__(self):
        return hash((self.u_l.tobytes(), self.u_f.tobytes()))


def exact_game(u_l_rows: Sequence[Sequence], u_f_rows: Sequence[Sequence],
               meta: dict | None = None) -> BimatrixGame:
    """Build a game from rational entries, keeping the exact matrices."""
    exl = tuple(tuple(Fraction(v) for v in row) for row in u_l_rows)
    exf = tuple(tuple(Fraction(v) for v in row) for row in u_f_rows)
    ul = np.array([[float(v) for v in row] for row in exl])
    uf = np.array([[float(v) for v in row] for row in exf])
    return BimatrixGame(ul, uf, meta or {}, exl, exf)


@dataclass(frozen=True)
class MixedStrategy:
    """Point on the leader's simplex, optionally with exact coordinates."""

    probs: np.ndarray
    exact: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 1 or p.size < 1:
            raise InvalidStrategyError("strategy must be a 1-d probability vector")
        if p.min() < -ETA:
            raise InvalidStrategyError(f"negative probability {p.min()}")
        if abs(p.sum() - 1.0) > ETA:
            raise InvalidStrategyError(f"probabilities sum to {p.sum()}, not 1")
        p = np.where(p < 0, 0.0, p)
        object.__setattr__(self, "probs", _freeze(p))
        if self.exact is not None:
            ex = tuple(Fraction(v) for v in self.exact)
            if len(ex) != p.size or any(v < 0 for v in ex) or sum(ex) != 1:
                raise InvalidStrategyError("exact coordinates are not a distribution")
            object.__setattr__(self, "exact", ex)

    def __eq__(self, other):
        if not isinstance(other, MixedStrategy):
            return NotImplemented
        return np.array_equal(self.probs, other.probs) and self.exact == other.exact

    def __hash__(self):
        return hash(self.probs.tobytes())


def exact_strategy(coords: Sequence) -> MixedStrategy:
    ex = tuple(Fraction(v) for v in coords)
    return MixedStrategy(np.array([float(v) for v in ex]), ex)


def pure_strategy(i: int, m: int, *, exact: bool = False) -> MixedStrategy:
    p = np.zeros(m)
    p[i] = 1.0
    ex = tuple(Fraction(1 if k == i else 0) for k in range(m)) if exact else None
    return MixedStrategy(p, ex)


@dataclass(frozen=True)
class ResponseSet:
    """Nonempty subset of follower actions, stored sorted."""

    actions: tuple[int, ...]

    def __post_init__(self):
        acts = tuple(sorted(set(int(a) for a in self.actions)))
        if not acts:
            raise GameFormatError("response set must be nonempty")
        object.__setattr__(self, "actions", acts)

    def __contains__(self, j) -> bool:
        return j in self.actions

    def __iter__(self):
        return iter(self.actions)

    def __len__(self):
        return len(self.actions)

    def issubset(self, other: "ResponseSet") -> bool:
        return set(self.actions) <= set(other.actions)


@dataclass(frozen=True)
class GameValueReport:
    """A (strategy, response) outcome with the convention that produced it."""

    strategy: MixedStrategy
    response: int
    response_set: ResponseSet
    leader_value: float | Fraction
    follower_value: float | Fraction
    tie_breaking: str = PESSIMISTIC


def _require_exact(game: BimatrixGame, x: MixedStrategy):
    if not game.has_exact:
        raise GameFormatError("exact mode requires a game with rational matrices")
    if x.exact is None:
        raise InvalidStrategyError("exact mode requires an exact strategy")


def follower_payoffs(game: BimatrixGame, x: MixedStrategy, *, exact: bool = False):
    """Follower utility of each pure response against ``x``."""
    if exact:
        _require_exact(game, x)
        return [sum(xi * row[j] for xi, row in zip(x.exact, game.exact_u_f))
                for j in range(game.n)]
    return x.probs @ game.u_f


def leader_payoffs(game: BimatrixGame, x: MixedStrategy, *, exact: bool = False):
    """Leader utility of each follower pure response against ``x``."""
    if exact:
        _require_exact(game, x)
        return [sum(xi * row[j] for xi, row in zip(x.exact, game.exact_u_l))
                for j in range(game.n)]
    return x.probs @ game.u_l


def br_delta(game: BimatrixGame, x: MixedStrategy, delta, *, eta: float = ETA,
             exact: bool = False) -> ResponseSet:
    """Delta-optimal response set: strictly within ``delta`` of the optimum.

    ``delta == 0`` returns the plain argmax set.
    """
    if delta < 0:
        raise InvalidStrategyError(f"delta must be nonnegative, got {delta}")
    payoffs = follower_payoffs(game, x, exact=exact)
    if exact:
        best = max(payoffs)
        if delta == 0:
            acts = [j for j, v in enumerate(payoffs) if v == best]
        else:
            acts = [j for j, v in enumerate(payoffs) if v > best - Fraction(delta)]
    else:
        best = float(np.max(payoffs))
        if delta == 0:
            acts = [j for j, v in enumerate(payoffs) if v >= best - eta]
        else:
            # The argmax set always belongs, so a delta below eta degrades
            # gracefully to the plain best-response set.
            acts = [j for j, v in enumerate(payoffs)
                    if v >= best - eta or v > best - float(delta) + eta]
    return ResponseSet(tuple(acts))


def evaluate(game: BimatrixGame, x: MixedStrategy, delta, *, eta: float = ETA,
             exact: bool = False) -> GameValueReport:
    """Leader value against a pessimistic delta-rational follower.

    The response is the leader-utility minimizer in the delta-optimal set,
    ties broken by smallest follower index.
    """
    rset = br_delta(game, x, delta, eta=eta, exact=exact)
    lead = leader_payoffs(game, x, exact=exact)
    foll = follower_payoffs(game, x, exact=exact)
    response = min(rset.actions, key=lambda j: (lead[j], j))
    lv = lead[response] if exact else float(lead[response])
    fv = foll[response] if exact else float(foll[response])
    return GameValueReport(x, response, rset, lv, fv, PESSIMISTIC)


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

def _affine_params(values):
    """(scale, shift) mapping values into [0, 1] via (v + shift) * scale."""
    lo = min(values)
    hi = max(values)
    one = Fraction(1) if isinstance(lo, Fraction) else 1.0
    zero = one - one
    if lo >= 0 and hi <= 1:
        return one, zero
    if lo == hi:
        return one, -lo
    return one / (hi - lo), -lo


def normalize(raw_leader, raw_follower, meta: dict | None = None) -> BimatrixGame:
    """Affinely map each player's matrix into [0, 1], independently.

    Matrices already inside [0, 1] pass through unchanged; constant matrices
    map to all zeros. The per-player (scale, shift) pair lands in
    ``meta["normalization"]``; a delta measured against the raw follower
    utilities must be multiplied by the follower scale. Accepts numeric or
    Fraction entries; Fraction input yields an exact game.
    """
    rows_l = [list(r) for r in raw_leader]
    rows_f = [list(r) for r in raw_follower]
    if len(rows_l) != len(rows_f) or any(
            len(a) != len(b) or len(a) != len(rows_l[0]) for a, b in zip(rows_l, rows_f)):
        raise GameFormatError("leader/follower matrices must share one shape")
    is_exact = all(isinstance(v, (int, Fraction)) for row in rows_l + rows_f for v in row)
    if is_exact:
        rows_l = [[Fraction(v) for v in r] for r in rows_l]
        rows_f = [[Fraction(v) for v in r] for r in rows_f]
    else:
        for rows in (rows_l, rows_f):
            for r in rows:
                for v in r:
                    if not np.isfinite(float(v)):
                        raise GameFormatError("non-finite utility entry")
        rows_l = [[float(v) for v in r] for r in rows_l]
        rows_f = [[float(v) for v in r] for r in rows_f]

    flat_l = [v for r in rows_l for v in r]
    flat_f = [v for r in rows_f for v in r]
    scale_l, shift_l = _affine_params(flat_l)
    scale_f, shift_f = _affine_params(flat_f)
    mapped_l = [[(v + shift_l) * scale_l for v in r] for r in rows_l]
    mapped_f = [[(v + shift_f) * scale_f for v in r] for r in rows_f]

    meta = dict(meta or {})
    meta["normalization"] = {
        "leader": {"scale": float(scale_l), "shift": float(shift_l)},
        "follower": {"scale": float(scale_f), "shift": float(shift_f)},
    }
    if is_exact:
        meta["normalization"]["exact"] = {
            "leader": {"scale": str(scale_l), "shift": str(shift_l)},
            "follower": {"scale": str(scale_f), "shift": str(shift_f)},
        }
        return exact_game(mapped_l, mapped_f, meta)
    return BimatrixGame(np.array(mapped_l), np.array(mapped_f), meta)


# ---------------------------------------------------------------------------
# Game JSON schema
# ---------------------------------------------------------------------------

_MAX_EXACT_DENOMINATOR = 10 ** 12


def float_to_fraction(v: float) -> Fraction:
    """Decimal-faithful conversion: 0.1 becomes 1/10, not the IEEE ratio."""
    f = Fraction(repr(float(v)))
    if f.denominator > _MAX_EXACT_DENOMINATOR:
        raise GameFormatError(
            f"entry {v!r} is not representable on a rational grid; "
            "exact mode rejected")
    return f


def attach_exact(game: BimatrixGame) -> BimatrixGame:
    """Return the game with exact matrices derived from its float entries."""
    if game.has_exact:
        return game
    exl = tuple(tuple(float_to_fraction(v) for v in row) for row in game.u_l.tolist())
    exf = tuple(tuple(float_to_fraction(v) for v in row) for row in game.u_f.tolist())
    return BimatrixGame(game.u_l, game.u_f, game.meta, exl, exf)


def game_to_dict(game: BimatrixGame) -> dict[str, Any]:
    meta = dict(game.meta)
    if game.has_exact:
        meta["exact"] = {
            "u_l": [[str(v) for v in row] for row in game.exact_u_l],
            "u_f": [[str(v) for v in row] for row in game.exact_u_f],
        }
    return {
        "m": game.m,
        "n": game.n,
        "u_l": [list(row) for row in game.u_l.tolist()],
        "u_f": [list(row) for row in game.u_f.tolist()],
        "meta": meta,
    }


def game_from_dict(d: dict[str, Any]) -> BimatrixGame:
    try:
        m, n = int(d["m"]), int(d["n"])
        ul = np.array(d["u_l"], dtype=np.float64)
        uf = np.array(d["u_f"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as e:
        raise GameFormatError(f"bad game JSON: {e}") from e
    if ul.shape != (m, n) or uf.shape != (m, n):
        raise GameFormatError(f"declared {m}x{n} but matrices are {ul.shape}/{uf.shape}")
    meta = dict(d.get("meta") or {})
    exact = meta.pop("exact", None)
    exl = exf = None
    if exact is not None:
        exl = tuple(tuple(Fraction(v) for v in row) for row in exact["u_l"])
        exf = tuple(tuple(Fraction(v) for v in row) for row in exact["u_f"])
    return BimatrixGame(ul, uf, meta, exl, exf)


def dumps_game(game: BimatrixGame) -> str:
    return json.dumps(game_to_dict(game), sort_keys=True)


def loads_game(text: str) -> BimatrixGame:
    return game_from_dict(json.loads(text))
