"""JSON report assembly for the command-line tools."""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any

import numpy as np

FORMAT_VERSION = 1


def digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def plain(value: Any) -> Any:
    """Convert numpy values to JSON-ready Python values; non-finite floats become None."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def dumps(report: dict) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(plain(report), indent=2, sort_keys=True, allow_nan=False) + "\n"


def verdict_fields(verdict) -> dict:
    return {
        "kind": verdict.kind.value,
        "weights": verdict.weights,
        "xi": verdict.xi,
        "potential": verdict.potential,
        "closest": verdict.closest.payoffs,
        "distance": verdict.distance,
        "tolerance": verdict.tolerance,
        "iterations": verdict.iterations,
        "converged": verdict.converged,
        "residual_history_tail": verdict.residual_history[-5:],
        "message": verdict.message,
    }


def wpe_fields(solution, closest, dist: float, mode: str) -> dict:
    unit = bool(np.all(solution.weights == solution.weights[0]))
    if solution.is_wpg:
        kind = "ExactPG" if unit else "ExactWPG"
    else:
        kind = "ClosestOnly"
    return {
        "kind": kind,
        "weights": solution.weights,
        "xi": solution.xi,
        "residual": solution.residual,
        "tolerance": solution.tolerance,
        "is_wpg": solution.is_wpg,
        "potential": solution.potential if solution.is_wpg else None,
        "closest": closest.payoffs,
        "distance": dist,
        "mode": mode,
    }


def nwpg_fields(rep) -> dict:
    return {
        "is_nwpg": rep.is_nwpg,
        "kind": rep.verdict.kind.value,
        "weights": rep.weights,
        "distance": rep.verdict.distance,
        "surrogate": rep.surrogate.payoffs,
        "potential": rep.verdict.potential,
        "dynamics_game": rep.dynamics_G.to_document(),
        "dynamics_surrogate": rep.dynamics_surrogate.to_document(),
        "mismatch_profiles": rep.mismatch_profiles,
    }


def design_fields(sol) -> dict:
    return {
        "weights": sol.weights,
        "xi": sol.xi,
        "utilities": sol.utilities,
        "residual": sol.residual,
        "equivalent": sol.equivalent,
        "dynamics_game": sol.dynamics_game.to_document(),
        "dynamics_designed": sol.dynamics_designed.to_document(),
        "mismatch_profiles": sol.mismatch_profiles,
    }


def trajectory_fields(traj) -> dict:
    return {
        "flats": traj.flats,
        "profiles": [list(p) for p in traj.profiles],
        "cycle_detected": traj.cycle_detected,
        "cycle_start": traj.cycle_start,
        "cycle_length": traj.cycle_length,
    }
