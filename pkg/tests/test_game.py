"""Tests for game construction, normalization, response sets, and evaluation."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rsekit import game as g
from rsekit.errors import GameFormatError, InvalidStrategyError

# Equilibrium-variants game: SSE at row 0, maximin at row 2.
VARIANTS_UL = [[1, 0.25, 0], [0.5, 0.5, 0], [0.25, 0.25, 0.25]]
VARIANTS_UF = [[0.5, 0.5, 0], [0.5, 0.5, 0], [0.5, 0.5, 0.5]]

# Existence counterexample game (raw utilities include -1 and -delta).
def existence_raw(delta):
    u_l = [[0, 0], [0, 1], [0, 0]]
    u_f = [[-1, 0], [-delta, 0], [1, 0]]
    return u_l, u_f


def strat(*p):
    return g.MixedStrategy(np.array(p, dtype=float))


def test_constructor_rejects_bad_shapes_and_ranges():
    with pytest.raises(GameFormatError):
        g.BimatrixGame(np.zeros((2, 2)), np.zeros((2, 3)))
    with pytest.raises(GameFormatError):
        g.BimatrixGame(np.array([[2.0]]), np.array([[0.0]]))
    with pytest.raises(GameFormatError):
        g.BimatrixGame(np.array([[np.nan]]), np.array([[0.0]]))


def test_strategy_validation():
    with pytest.raises(InvalidStrategyError):
        strat(0.5, 0.6)
    with pytest.raises(InvalidStrategyError):
        strat(1.5, -0.5)
    s = strat(0.25, 0.75)
    assert s.probs.sum() == 1.0


def test_normalize_shifts_negative_range():
    raw = [[-1.0, 1.0], [0.0, 0.5]]
    out = g.normalize(raw, raw)
    assert out.u_f.tolist() == [[0.0, 1.0], [0.5, 0.75]]
    assert out.meta["normalization"]["follower"] == {"scale": 0.5, "shift": 1.0}


def test_normalize_identity_when_already_unit_range():
    raw = [[0.2, 0.8], [0.0, 1.0]]
    out = g.normalize(raw, raw)
    assert out.u_l.tolist() == raw
    assert out.meta["normalization"]["leader"] == {"scale": 1.0, "shift": 0.0}


def test_normalize_constant_matrix_to_zero():
    out = g.normalize([[5.0, 5.0]], [[0.3, 0.3]])
    assert out.u_l.tolist() == [[0.0, 0.0]]
    assert out.u_f.tolist() == [[0.3, 0.3]]


def test_normalize_mismatched_shapes():
    with pytest.raises(GameFormatError):
        g.normalize([[0.0]], [[0.0, 1.0]])


def test_existence_game_normalization_preserves_br_delta():
    # Raw game spans [-1, 1] so the follower scale is 1/2 and a raw delta
    # must be halved against the normalized matrices.
    delta = 0.25
    u_l, u_f = existence_raw(delta)
    norm = g.normalize(u_l, u_f)
    assert norm.meta["normalization"]["follower"]["scale"] == 0.5

    raw_as_unit = g.BimatrixGame((np.array(u_l) + 1) / 2, (np.array(u_f) + 1) / 2)
    x = strat(0.01, 0.99, 0.0)
    got_norm = g.br_delta(norm, x, delta * 0.5)
    got_manual = g.br_delta(raw_as_unit, x, delta * 0.5)
    assert got_norm.actions == got_manual.actions == (1,)


def test_br_delta_existence_game_pins_second_column():
    delta = 0.25
    norm = g.normalize(*existence_raw(delta))
    x = strat(0.01, 0.99, 0.0)
    assert g.br_delta(norm, x, delta / 2).actions == (1,)


def test_br_delta_full_set_for_large_delta():
    game = g.BimatrixGame(np.array(VARIANTS_UL), np.array(VARIANTS_UF))
    assert g.br_delta(game, strat(0.2, 0.5, 0.3), 1.0).actions == (0, 1, 2)


def test_br_delta_on_variants_game_pure_rows():
    game = g.BimatrixGame(np.array(VARIANTS_UL), np.array(VARIANTS_UF))
    assert g.br_delta(game, strat(1, 0, 0), 0.25).actions == (0, 1)
    assert g.br_delta(game, strat(0, 0, 1), 0.25).actions == (0, 1, 2)


def test_br_delta_zero_is_argmax_set():
    game = g.BimatrixGame(np.array(VARIANTS_UL), np.array(VARIANTS_UF))
    assert g.br_delta(game, strat(1, 0, 0), 0).actions == (0, 1)
    with pytest.raises(InvalidStrategyError):
        g.br_delta(game, strat(1, 0, 0), -0.1)


def test_evaluate_variants_game_sse_and_maximin_rows():
    game = g.BimatrixGame(np.array(VARIANTS_UL), np.array(VARIANTS_UF))
    r1 = g.evaluate(game, strat(1, 0, 0), 0.25)
    assert r1.leader_value == pytest.approx(0.25)
    assert r1.response == 1
    r3 = g.evaluate(game, strat(0, 0, 1), 0.25)
    assert r3.leader_value == pytest.approx(0.25)
    assert r3.response == 0
    assert r3.response in r3.response_set


def test_evaluate_single_leader_row():
    game = g.BimatrixGame(np.array([[0.9, 0.1, 0.4]]), np.array([[0.5, 0.45, 0.0]]))
    rep = g.evaluate(game, strat(1.0), 0.2)
    assert rep.response_set.actions == (0, 1)
    assert rep.leader_value == pytest.approx(0.1)


def test_exact_mode_matches_float_on_rational_game():
    game = g.exact_game(VARIANTS_UL_EXACT, VARIANTS_UF_EXACT)
    x = g.exact_strategy([Fraction(1, 2), Fraction(1, 2), 0])
    got = g.br_delta(game, x, Fraction(1, 4), exact=True)
    assert got.actions == g.br_delta(game, x, 0.25).actions
    rep = g.evaluate(game, x, Fraction(1, 4), exact=True)
    assert isinstance(rep.leader_value, Fraction)
    float_rep = g.evaluate(game, x, 0.25)
    assert float(rep.leader_value) == pytest.approx(float_rep.leader_value)


VARIANTS_UL_EXACT = [
    [1, Fraction(1, 4), 0],
    [Fraction(1, 2), Fraction(1, 2), 0],
    [Fraction(1, 4), Fraction(1, 4), Fraction(1, 4)],
]
VARIANTS_UF_EXACT = [
    [Fraction(1, 2), Fraction(1, 2), 0],
    [Fraction(1, 2), Fraction(1, 2), 0],
    [Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)],
]


def test_exact_boundary_delta_is_excluded():
    # At delta exactly equal to the margin, the strict definition keeps the
    # trailing action out; exact arithmetic decides this without tolerances.
    game = g.exact_game([[1, 0]], [[Fraction(3, 4), Fraction(1, 2)]])
    x = g.exact_strategy([1])
    assert g.br_delta(game, x, Fraction(1, 4), exact=True).actions == (0,)
    assert g.br_delta(game, x, Fraction(1, 4) + Fraction(1, 100), exact=True).actions == (0, 1)


games_st = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(0, 8).map(lambda v: v / 8), min_size=n, max_size=n),
            min_size=m, max_size=m).map(
                lambda uf: g.BimatrixGame(np.full((m, n), 0.5), np.array(uf)))))


@st.composite
def game_and_strategy(draw):
    game = draw(games_st)
    w = draw(st.lists(st.integers(0, 10), min_size=game.m, max_size=game.m)
             .filter(lambda ws: sum(ws) > 0))
    probs = np.array(w, dtype=float) / sum(w)
    return game, g.MixedStrategy(probs)


@settings(max_examples=200, deadline=None)
@given(game_and_strategy(), st.floats(0, 1), st.floats(0, 1))
def test_response_sets_nest(gx, d1, d2):
    game, x = gx
    lo, hi = sorted((d1, d2))
    assert g.br_delta(game, x, lo).issubset(g.br_delta(game, x, hi))


@settings(max_examples=200, deadline=None)
@given(game_and_strategy(), st.floats(0.001, 1))
def test_plain_br_subsets_delta_br(gx, delta):
    game, x = gx
    assert g.br_delta(game, x, 0).issubset(g.br_delta(game, x, delta))


@settings(max_examples=150, deadline=None)
@given(game_and_strategy(), st.floats(0, 1), st.floats(0, 1))
def test_evaluate_nonincreasing_in_delta(gx, d1, d2):
    game, x = gx
    lo, hi = sorted((d1, d2))
    assert g.evaluate(game, x, lo).leader_value >= g.evaluate(game, x, hi).leader_value - 1e-12


@settings(max_examples=150, deadline=None)
@given(game_and_strategy(), st.floats(0.01, 0.9), st.sampled_from([0.25, 0.5, 0.75]))
def test_scale_covariance(gx, delta, a):
    game, x = gx
    scaled = g.BimatrixGame(game.u_l, a * game.u_f)
    assert g.br_delta(game, x, delta).actions == g.br_delta(scaled, x, a * delta).actions


def test_json_round_trip_bit_identical():
    game = g.exact_game(VARIANTS_UL_EXACT, VARIANTS_UF_EXACT, {"name": "variants"})
    text = g.dumps_game(game)
    back = g.loads_game(text)
    assert back == game
    assert g.dumps_game(back) == text


def test_attach_exact_uses_decimal_reading():
    game = g.BimatrixGame(np.array([[0.1, 0.3]]), np.array([[0.7, 0.9]]))
    ex = g.attach_exact(game)
    assert ex.exact_u_l == ((Fraction(1, 10), Fraction(3, 10)),)
    assert ex.exact_u_f == ((Fraction(7, 10), Fraction(9, 10)),)
