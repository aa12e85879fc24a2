"""Command-line interface.

Subcommands::

    stpgames verify GAME... [--weights W... | --estimate]
    stpgames nwpg GAME...
    stpgames design GAME OBJECTIVE
    stpgames simulate GAME --start 1,1,1 --steps N

Reports are JSON (to stdout or ``--output``); a short human summary goes to
stderr. Exit codes: 0 positive outcome, 2 negative outcome (closest-only,
not NWPG, not equivalent), 3 degenerate or singular, 64 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import report
from .design import DesignProblem, design
from .dynamics import mbra_dynamics, nwpg_check, simulate
from .errors import (
    DegenerateGameError,
    DimensionError,
    GameFormatError,
    SingularDesignError,
)
from .estimator import AlsConfig, VerdictKind, estimate
from .game import FiniteGame, game_from_document
from .potential import project_closest_wpg, solve_wpe

EXIT_OK = 0
EXIT_NEGATIVE = 2
EXIT_DEGENERATE = 3
EXIT_USAGE = 64


class InputError(Exception):
    """Malformed or unreadable input; maps to exit code 64."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_json(path: str) -> tuple[object, bytes]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(raw), raw
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def load_game(path: str) -> tuple[FiniteGame, bytes]:
    doc, raw = _read_json(path)
    try:
        return game_from_document(doc), raw
    except GameFormatError as exc:
        raise InputError(f"{path}: field '{exc.field}': {exc}") from None


def load_objective(path: str, kappa: int) -> tuple[np.ndarray, bytes]:
    doc, raw = _read_json(path)
    if isinstance(doc, dict):
        if "objective" not in doc:
            raise InputError(f"{path}: field 'objective': missing")
        doc = doc["objective"]
    if not isinstance(doc, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in doc
    ):
        raise InputError(f"{path}: field 'objective': must be a list of numbers")
    if len(doc) != kappa:
        raise InputError(f"{path}: field 'objective': expected {kappa} entries, got {len(doc)}")
    return np.array(doc, dtype=float), raw


def _als_config(args) -> AlsConfig:
    try:
        return AlsConfig(
            epsilon=args.epsilon,
            max_iter=args.max_iter,
            weight_floor=args.weight_floor,
            restarts=args.restarts,
            seed=args.seed,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _envelope(command: str, path: str, raw: bytes, settings: dict) -> dict:
    return {
        "format": report.FORMAT_VERSION,
        "command": command,
        "input": path,
        "input_digest": report.digest(raw),
        "settings": settings,
        "timings": {},
    }


def _run_verify(path: str, args) -> tuple[int, dict, str]:
    t0 = time.perf_counter()
    game, raw = load_game(path)
    t1 = time.perf_counter()
    if args.weights is not None:
        settings = {"weights": args.weights, "epsilon": args.epsilon, "mode": args.mode}
        rep = _envelope("verify", path, raw, settings)
        try:
            sol = solve_wpe(game, args.weights, rtol=args.epsilon)
            closest, dist = project_closest_wpg(game, args.weights, args.mode.replace("-", "_"))
        except GameFormatError as exc:
            raise InputError(f"field '{exc.field}': {exc}") from None
        rep["result"] = report.wpe_fields(sol, closest, dist, args.mode)
        code = EXIT_OK if sol.is_wpg else EXIT_NEGATIVE
        summary = f"{path}: {rep['result']['kind']} residual={sol.residual:.6g}"
    else:
        cfg = _als_config(args)
        settings = {
            "estimate": True,
            "epsilon": cfg.epsilon,
            "max_iter": cfg.max_iter,
            "weight_floor": cfg.weight_floor,
            "restarts": cfg.restarts,
            "seed": cfg.seed,
        }
        rep = _envelope("verify", path, raw, settings)
        verdict = estimate(game, cfg)
        rep["result"] = report.verdict_fields(verdict)
        code = {
            VerdictKind.EXACT_PG: EXIT_OK,
            VerdictKind.EXACT_WPG: EXIT_OK,
            VerdictKind.CLOSEST_ONLY: EXIT_NEGATIVE,
            VerdictKind.DEGENERATE: EXIT_DEGENERATE,
        }[verdict.kind]
        w = ", ".join(f"{x:.4f}" for x in verdict.weights)
        summary = f"{path}: {verdict.kind.value} w=({w}) distance={verdict.distance:.6g}"
    rep["timings"] = {"load": t1 - t0, "analysis": time.perf_counter() - t1}
    return code, rep, summary


def _run_nwpg(path: str, args) -> tuple[int, dict, str]:
    t0 = time.perf_counter()
    game, raw = load_game(path)
    t1 = time.perf_counter()
    cfg = _als_config(args)
    settings = {
        "epsilon": cfg.epsilon,
        "max_iter": cfg.max_iter,
        "weight_floor": cfg.weight_floor,
        "restarts": cfg.restarts,
        "seed": cfg.seed,
    }
    rep = _envelope("nwpg", path, raw, settings)
    try:
        result = nwpg_check(game, cfg)
    except DegenerateGameError as exc:
        rep["result"] = {"is_nwpg": False, "kind": "Degenerate", "message": str(exc)}
        rep["timings"] = {"load": t1 - t0, "analysis": time.perf_counter() - t1}
        return EXIT_DEGENERATE, rep, f"{path}: Degenerate ({exc})"
    rep["result"] = report.nwpg_fields(result)
    rep["timings"] = {"load": t1 - t0, "analysis": time.perf_counter() - t1}
    summary = (
        f"{path}: is_nwpg={result.is_nwpg} L={result.dynamics_G.composed}"
        + (f" mismatches={result.mismatch_profiles}" if result.mismatch_profiles else "")
    )
    return (EXIT_OK if result.is_nwpg else EXIT_NEGATIVE), rep, summary


def _run_design(args) -> tuple[int, dict, str]:
    t0 = time.perf_counter()
    game, raw = load_game(args.game)
    objective, raw_obj = load_objective(args.objective, game.kappa)
    t1 = time.perf_counter()
    settings = {"weight_floor": args.weight_floor, "pin_last": not args.no_pin}
    rep = _envelope("design", args.game, raw + raw_obj, settings)
    rep["objective"] = args.objective
    try:
        sol = design(
            DesignProblem(game, objective),
            weight_floor=args.weight_floor,
            pin_last=not args.no_pin,
        )
    except (SingularDesignError, DegenerateGameError) as exc:
        kind = "SingularDesign" if isinstance(exc, SingularDesignError) else "Degenerate"
        rep["result"] = {"kind": kind, "equivalent": False, "message": str(exc)}
        rep["timings"] = {"load": t1 - t0, "analysis": time.perf_counter() - t1}
        return EXIT_DEGENERATE, rep, f"{args.game}: {kind} ({exc})"
    rep["result"] = report.design_fields(sol)
    rep["timings"] = {"load": t1 - t0, "analysis": time.perf_counter() - t1}
    w = ", ".join(f"{x:.4f}" for x in sol.weights)
    summary = f"{args.game}: w=({w}) equivalent={sol.equivalent} residual={sol.residual:.6g}"
    return (EXIT_OK if sol.equivalent else EXIT_NEGATIVE), rep, summary


def _parse_profile(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(","))
    except ValueError:
        raise InputError(f"field 'start': cannot parse profile {text!r}") from None


def _run_simulate(args) -> tuple[int, dict, str]:
    t0 = time.perf_counter()
    game, raw = load_game(args.game)
    t1 = time.perf_counter()
    start = _parse_profile(args.start) if args.start else (1,) * game.n
    if args.steps < 0:
        raise InputError("field 'steps': must be nonnegative")
    dyn = mbra_dynamics(game)
    try:
        traj = simulate(dyn, start, args.steps)
    except DimensionError as exc:
        raise InputError(f"field 'start': {exc}") from None
    rep = _envelope("simulate", args.game, raw, {"start": list(start), "steps": args.steps})
    rep["result"] = report.trajectory_fields(traj)
    rep["result"]["dynamics"] = dyn.to_document()
    rep["timings"] = {"load": t1 - t0, "analysis": time.perf_counter() - t1}
    lines = [f"t={t}: {p}" for t, p in enumerate(traj.profiles)]
    if traj.cycle_detected:
        lines.append(f"cycle of length {traj.cycle_length} entered at t={traj.cycle_start}")
    return EXIT_OK, rep, "\n".join(lines)


def _per_file(task):
    runner, path, args = task
    try:
        return runner(path, args)
    except InputError as exc:
        return EXIT_USAGE, None, f"error: {exc}"


def _fan_out(runner, args):
    tasks = [(runner, path, args) for path in args.games]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            return list(pool.map(_per_file, tasks))
    return [_per_file(t) for t in tasks]


def _add_als_flags(p):
    p.add_argument("--epsilon", type=float, default=1e-6, help="convergence/WPG tolerance")
    p.add_argument("--max-iter", type=int, default=10000, help="iteration cap")
    p.add_argument("--weight-floor", type=float, default=1e-6, help="smallest admissible weight")
    p.add_argument("--restarts", type=int, default=0, help="extra seeded starting points")
    p.add_argument("--seed", type=int, default=0, help="seed for --restarts")


def _add_output_flags(p, multi: bool):
    p.add_argument("--output", help="write the JSON report here instead of stdout")
    if multi:
        p.add_argument("--jobs", type=int, default=1, help="analyse several files in parallel")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stpgames", description="Weighted potential game analysis")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="test for (weighted) potential structure")
    p.add_argument("games", nargs="+", metavar="GAME")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--weights", type=float, nargs="+", help="check with these fixed weights")
    group.add_argument("--estimate", action="store_true", help="estimate weights (default)")
    p.add_argument("--mode", choices=["fix-v1", "joint"], default="fix-v1",
                   help="closest-WPG reconstruction used with --weights")
    _add_als_flags(p)
    _add_output_flags(p, multi=True)

    p = sub.add_parser("nwpg", help="near weighted potential game check")
    p.add_argument("games", nargs="+", metavar="GAME")
    _add_als_flags(p)
    _add_output_flags(p, multi=True)

    p = sub.add_parser("design", help="utility design for a prescribed potential")
    p.add_argument("game", metavar="GAME")
    p.add_argument("objective", metavar="OBJECTIVE")
    p.add_argument("--weight-floor", type=float, default=1e-6)
    p.add_argument("--no-pin", action="store_true",
                   help="do not pin the last entry of xi_n to zero")
    _add_output_flags(p, multi=False)

    p = sub.add_parser("simulate", help="best-response trajectory")
    p.add_argument("game", metavar="GAME")
    p.add_argument("--start", help="start profile as comma-separated strategies, e.g. 1,2,1")
    p.add_argument("--steps", type=int, default=10)
    _add_output_flags(p, multi=False)
    return parser


def _emit(args, payload: dict) -> None:
    text = report.dumps(payload)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command in ("verify", "nwpg"):
        if args.jobs < 1:
            print("error: field 'jobs': must be at least 1", file=sys.stderr)
            return EXIT_USAGE
        runner = _run_verify if args.command == "verify" else _run_nwpg
        results = _fan_out(runner, args)
        for _, _, summary in results:
            print(summary, file=sys.stderr)
        reports = [rep for _, rep, _ in results if rep is not None]
        if len(results) == 1:
            if reports:
                _emit(args, reports[0])
        elif reports:
            _emit(args, {"format": report.FORMAT_VERSION, "reports": reports})
        return max(code for code, _, _ in results)

    runner = _run_design if args.command == "design" else _run_simulate
    try:
        code, rep, summary = runner(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(summary, file=sys.stderr)
    _emit(args, rep)
    return code


if __name__ == "__main__":
    sys.exit(main())
