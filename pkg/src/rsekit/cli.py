"""Command-line front end: solve, curve, gen, learn, verify.

Outputs are machine-readable (JSON or CSV) and byte-stable: re-running a
command with the same flags and seed reproduces the output exactly, for any
``--jobs`` value. Guard errors (enumeration caps, insufficient inducibility
gap) exit with code 3 and a JSON error object; usage errors exit 2.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

import numpy as np

from . import lab, learning
from .approx import gap_approx, qptas_solve
from .baseline import inducibility_gap, solve_maximin, solve_sse
from .errors import (BudgetExceeded, EnumerationCapExceeded, GameFormatError,
                     GapTooSmall, RsekitError)
from .exact import RseSolution, rse_curve, solve_exact
from .game import (BimatrixGame, MixedStrategy, attach_exact, dumps_game,
                   evaluate, game_from_dict, loads_game)

GUARD_ERRORS = (EnumerationCapExceeded, GapTooSmall, BudgetExceeded)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_GUARD = 3


def _load_game(path: str, exact: bool) -> BimatrixGame:
    with open(path) as fh:
        game = loads_game(fh.read())
    if exact and not game.has_exact:
        game = attach_exact(game)
    return game


def _parse_level(text: str | None, exact: bool):
    """Accept both decimal and fraction spellings for delta/epsilon."""
    if text is None:
        return None
    value = Fraction(text)
    return value if exact else float(value)


def _follower_scale(game: BimatrixGame, exact: bool):
    """Rescale factor for a delta stated against the raw follower matrix."""
    norm = game.meta.get("normalization")
    if not norm:
        return Fraction(1) if exact else 1.0
    if exact and "exact" in norm:
        return Fraction(norm["exact"]["follower"]["scale"])
    scale = norm["follower"]["scale"]
    return Fraction(str(scale)) if exact else float(scale)


def _maybe_str(value, exact: bool):
    if exact and isinstance(value, Fraction):
        return str(value)
    return None


def _strategy_json(x: MixedStrategy, exact: bool) -> dict:
    out = {"probs": [float(v) for v in x.probs]}
    if exact and x.exact is not None:
        out["exact"] = [str(v) for v in x.exact]
    return out


def _solution_json(sol: RseSolution, delta, mode: str) -> dict:
    exact = mode == "exact"
    out = {
        "method": sol.method,
        "mode": mode,
        "delta": float(delta),
        "value": float(sol.value),
        "strategy": _strategy_json(sol.strategy, exact),
        "response": sol.outcome.response,
        "response_set": list(sol.repaired_set.actions),
        "lp_count": sol.lp_count,
    }
    if exact:
        out["delta_exact"] = str(Fraction(delta))
        ve = _maybe_str(sol.value, exact)
        if ve:
            out["value_exact"] = ve
    if sol.chosen_tuple is not None:
        out["chosen_tuple"] = {
            "S": list(sol.chosen_tuple.S.actions),
            "j_tilde": sol.chosen_tuple.j_tilde,
            "j": sol.chosen_tuple.j,
        }
    if sol.guarantee is not None:
        out["guarantee"] = {
            k: (str(v) if isinstance(v, Fraction) else
                list(v) if isinstance(v, tuple) else v)
            for k, v in sol.guarantee.items()
        }
    return out


def _report_json(rep, delta, mode: str, method: str) -> dict:
    exact = mode == "exact"
    out = {
        "method": method,
        "mode": mode,
        "value": float(rep.leader_value),
        "strategy": _strategy_json(rep.strategy, exact),
        "response": rep.response,
        "response_set": list(rep.response_set.actions),
        "tie_breaking": rep.tie_breaking,
    }
    if delta is not None:
        out["delta"] = float(delta)
    ve = _maybe_str(rep.leader_value, exact)
    if ve:
        out["value_exact"] = ve
    return out


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _grid_values(spec: str) -> list[Fraction]:
    try:
        a, b, step = (Fraction(part) for part in spec.split(":"))
    except (ValueError, ZeroDivisionError) as e:
        raise GameFormatError(f"bad grid spec {spec!r}: {e}") from e
    if step <= 0 or a <= 0 or b < a:
        raise GameFormatError("grid needs 0 < start <= stop and step > 0")
    vals = []
    v = a
    while v <= b:
        vals.append(v)
        v += step
    return vals


def cmd_solve(args) -> int:
    exact = args.mode == "exact"
    game = _load_game(args.game, exact)
    delta = _parse_level(args.delta, exact)
    if delta is not None and args.raw_delta:
        delta = delta * _follower_scale(game, exact)
    if args.method in ("exact", "qptas", "gap-approx") and delta is None:
        print("solve: --delta is required for this method", file=sys.stderr)
        return EXIT_USAGE
    if args.method == "sse":
        _emit(_report_json(solve_sse(game, exact=exact), None, args.mode, "sse"))
    elif args.method == "maximin":
        _emit(_report_json(solve_maximin(game, exact=exact), None, args.mode,
                           "maximin"))
    elif args.method == "gap":
        rep = inducibility_gap(game, exact=exact)
        out = {
            "method": "gap",
            "mode": args.mode,
            "gap": float(rep.gap),
            "per_action": [
                {"action": j, "margin": float(a.margin),
                 "strategy": _strategy_json(a.strategy, exact)}
                for j, a in enumerate(rep.per_action)
            ],
        }
        if exact and isinstance(rep.gap, Fraction):
            out["gap_exact"] = str(rep.gap)
        _emit(out)
    elif args.method == "exact":
        sol = solve_exact(game, delta, exact=exact, cap=args.cap,
                          exhaustive=args.exhaustive)
        _emit(_solution_json(sol, delta, args.mode))
    elif args.method == "qptas":
        if args.epsilon is None:
            print("solve: --epsilon is required for qptas", file=sys.stderr)
            return EXIT_USAGE
        eps = _parse_level(args.epsilon, exact)
        sol = qptas_solve(game, delta, eps, exact=exact)
        _emit(_solution_json(sol, delta, args.mode))
    elif args.method == "gap-approx":
        sol = gap_approx(game, delta, exact=exact)
        _emit(_solution_json(sol, delta, args.mode))
    else:  # pragma: no cover - argparse restricts choices
        return EXIT_USAGE
    return EXIT_OK


def cmd_curve(args) -> int:
    exact = args.mode == "exact"
    game = _load_game(args.game, exact)
    grid = _grid_values(args.grid)
    if args.raw_delta:
        scale = _follower_scale(game, True)
        grid = [v * scale for v in grid]
    deltas = grid if exact else [float(v) for v in grid]
    curve = rse_curve(game, deltas, exact=exact, jobs=args.jobs)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["delta", "value", "sse", "maximin", "gap"])

    def fmt(v):
        return str(v) if exact else repr(float(v))

    for dv, val in zip(curve.deltas, curve.values):
        writer.writerow([fmt(dv), fmt(val), fmt(curve.sse_value),
                         fmt(curve.maximin_value), fmt(curve.gap)])
    return EXIT_OK


def _parse_params(text: str | None) -> dict:
    if not text:
        return {}
    out = {}
    for part in text.split(","):
        if not part:
            continue
        key, _, val = part.partition("=")
        if not _:
            raise GameFormatError(f"bad --params entry {part!r}, want k=v")
        out[key.strip()] = Fraction(val.strip())
    return out


def cmd_gen(args) -> int:
    chosen = [bool(args.catalog), bool(args.x3c), bool(args.random)]
    if sum(chosen) != 1:
        print("gen: choose exactly one of --catalog/--x3c/--random",
              file=sys.stderr)
        return EXIT_USAGE
    if args.catalog:
        entry = lab.catalog(args.catalog, _parse_params(args.params))
        print(dumps_game(entry.game))
        return EXIT_OK
    if args.x3c:
        if not (args.delta and args.eps):
            print("gen: --x3c needs --delta and --eps", file=sys.stderr)
            return EXIT_USAGE
        with open(args.x3c) as fh:
            instance = lab.parse_x3c(fh.read())
        game = lab.gen_x3c_game(instance, Fraction(args.delta),
                                Fraction(args.eps))
        print(dumps_game(game))
        return EXIT_OK
    try:
        m, n, seed = (int(v) for v in args.random.split(","))
    except ValueError:
        print("gen: --random wants m,n,seed", file=sys.stderr)
        return EXIT_USAGE
    game = lab.gen_random(m, n, seed, rational_grid=args.grid_denominator,
                          ensure_gap=args.ensure_gap)
    print(dumps_game(game))
    return EXIT_OK


def _one_learn_run(payload):
    truth, delta, epsilon, iota, noise, solver, run_seed = payload
    oracle = learning.NoisyGameOracle(truth, noise, run_seed)
    return learning.learn_rse(oracle, delta, epsilon, iota, solver)


def cmd_learn(args) -> int:
    if args.seed is None:
        print("learn: --seed is required", file=sys.stderr)
        return EXIT_USAGE
    truth = _load_game(args.game, False)
    noise = args.noise
    run_seeds = [int(np.random.SeedSequence([args.seed, i]).generate_state(1)[0])
                 for i in range(args.seeds)]
    work = [(truth, args.delta, args.epsilon, args.iota, noise, args.solver, s)
            for s in run_seeds]
    if args.jobs > 1 and len(work) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_one_learn_run, work))
    else:
        outcomes = [_one_learn_run(w) for w in work]
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["seed", "T", "sup_err_l", "sup_err_f", "value", "floor",
                     "pass"])
    for s, out in zip(run_seeds, outcomes):
        concentrated = (out.sup_err_l <= args.epsilon + 1e-12
                        and out.sup_err_f <= args.epsilon + 1e-12)
        ok = (not concentrated) or out.true_value >= out.guarantee_floor - 1e-9
        writer.writerow([s, out.samples_per_pair, repr(out.sup_err_l),
                         repr(out.sup_err_f), repr(float(out.true_value)),
                         repr(float(out.guarantee_floor)), int(ok)])
    return EXIT_OK


def cmd_verify(args) -> int:
    with open(args.solution) as fh:
        sol = json.load(fh)
    if "delta" not in sol and "delta_exact" not in sol:
        print("verify: the solution file carries no delta (only "
              "delta-indexed solutions can be rechecked)", file=sys.stderr)
        return EXIT_USAGE
    exact = sol.get("mode") == "exact"
    game = _load_game(args.game, exact)
    if exact and "exact" in sol["strategy"]:
        coords = [Fraction(v) for v in sol["strategy"]["exact"]]
        x = MixedStrategy(np.array([float(v) for v in coords]), tuple(coords))
        delta = Fraction(sol["delta_exact"])
    else:
        exact = False
        x = MixedStrategy(np.array(sol["strategy"]["probs"], dtype=float))
        delta = float(sol["delta"])
    rep = evaluate(game, x, delta, exact=exact)
    stated = (Fraction(sol["value_exact"]) if exact and "value_exact" in sol
              else float(sol["value"]))
    value_ok = (rep.leader_value == stated if exact
                else abs(rep.leader_value - stated) <= args.tolerance)
    response_ok = rep.response == sol["response"]
    set_ok = list(rep.response_set.actions) == sol["response_set"]
    verdict = {
        "value_ok": bool(value_ok),
        "response_ok": bool(response_ok),
        "response_set_ok": bool(set_ok),
        "recomputed_value": float(rep.leader_value),
    }
    _emit(verdict)
    return EXIT_OK if (value_ok and response_ok and set_ok) else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rsekit",
                                description="robust Stackelberg equilibrium kit")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve a game by one method")
    sp.add_argument("game")
    sp.add_argument("--method", required=True,
                    choices=["sse", "maximin", "gap", "exact", "qptas",
                             "gap-approx"])
    sp.add_argument("--delta")
    sp.add_argument("--epsilon")
    sp.add_argument("--mode", choices=["float", "exact"], default="float")
    sp.add_argument("--cap", type=int, default=16)
    sp.add_argument("--exhaustive", action="store_true")
    sp.add_argument("--raw-delta", action="store_true",
                    help="delta is stated against the raw (pre-normalization) "
                         "follower utilities")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_solve)

    cp = sub.add_parser("curve", help="robust-value curve over a delta grid")
    cp.add_argument("game")
    cp.add_argument("--grid", required=True, metavar="A:B:STEP")
    cp.add_argument("--mode", choices=["float", "exact"], default="float")
    cp.add_argument("--raw-delta", action="store_true")
    cp.add_argument("--jobs", type=int, default=1)
    cp.set_defaults(func=cmd_curve)

    gp = sub.add_parser("gen", help="emit a game as JSON")
    gp.add_argument("--catalog")
    gp.add_argument("--params")
    gp.add_argument("--x3c")
    gp.add_argument("--delta")
    gp.add_argument("--eps")
    gp.add_argument("--random", metavar="M,N,SEED")
    gp.add_argument("--grid-denominator", type=int)
    gp.add_argument("--ensure-gap", type=float)
    gp.set_defaults(func=cmd_gen)

    lp_ = sub.add_parser("learn", help="bandit-feedback learning runs")
    lp_.add_argument("--game", required=True)
    lp_.add_argument("--delta", type=float, required=True)
    lp_.add_argument("--epsilon", type=float, required=True)
    lp_.add_argument("--iota", type=float, required=True)
    lp_.add_argument("--noise", default="bernoulli")
    lp_.add_argument("--seeds", type=int, default=1)
    lp_.add_argument("--seed", type=int)
    lp_.add_argument("--solver", choices=["exact", "qptas"], default="exact")
    lp_.add_argument("--jobs", type=int, default=1)
    lp_.set_defaults(func=cmd_learn)

    vp = sub.add_parser("verify", help="recheck an emitted solution")
    vp.add_argument("game")
    vp.add_argument("solution")
    vp.add_argument("--tolerance", type=float, default=1e-9)
    vp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GUARD_ERRORS as e:
        _emit({"error": {"type": type(e).__name__, "message": str(e)}})
        return EXIT_GUARD
    except (RsekitError, ValueError, OSError) as e:
        print(f"rsekit: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
