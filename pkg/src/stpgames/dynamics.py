"""Myopic best-response dynamics and near weighted potential game checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGameError, DimensionError
from .estimator import AlsConfig, VerdictKind, WpgVerdict, estimate
from .game import FiniteGame
from .stp import LogicalMatrix, khatri_rao, profile_decode, profile_encode


@dataclass(frozen=True)
class ProfileDynamics:
    """Per-player update matrices ``M_i`` (``k_i x kappa``) and the composed map ``L``."""

    radices: tuple[int, ...]
    per_player: tuple[LogicalMatrix, ...]
    composed: LogicalMatrix

    def step(self, flat: int) -> int:
        return self.composed.indices[flat - 1]

    def to_document(self) -> dict:
        return {
            "per_player": [list(m.indices) for m in self.per_player],
            "composed": list(self.composed.indices),
        }


def best_responses(game: FiniteGame, player: int) -> np.ndarray:
    """Winning strategy (1-based) of ``player`` against every profile, smallest index on ties."""
    k = game.radices[player - 1]
    before = int(np.prod(game.radices[: player - 1]))
    after = int(np.prod(game.radices[player:]))
    v = game.payoffs[player - 1].reshape(before, k, after)
    # np.argmax returns the first maximiser, which is the tie-break we want
    winners = np.argmax(v, axis=1) + 1  # (before, after)
    return np.broadcast_to(winners[:, None, :], (before, k, after)).reshape(-1)


def mbra_dynamics(game: FiniteGame) -> ProfileDynamics:
    per_player = tuple(
        LogicalMatrix(game.radices[i - 1], tuple(int(x) for x in best_responses(game, i)))
        for i in range(1, game.n + 1)
    )
    return ProfileDynamics(game.radices, per_player, khatri_rao(per_player))


@dataclass(frozen=True)
class Trajectory:
    flats: list[int]
    profiles: list[tuple[int, ...]]
    cycle_start: int | None
    cycle_length: int | None

    @property
    def cycle_detected(self) -> bool:
        return self.cycle_start is not None


def simulate(dyn: ProfileDynamics, start, steps: int) -> Trajectory:
    """Iterate ``x(t+1) = L x(t)`` from ``start`` (flat index or digit tuple).

    ``cycle_start`` is the first time step that is revisited within the
    returned trajectory, and ``cycle_length`` its period.
    """
    if steps < 0:
        raise DimensionError(f"steps must be nonnegative, got {steps}")
    flat = start if isinstance(start, int) else profile_encode(start, dyn.radices)
    profile_decode(flat, dyn.radices)  # range check
    flats = [flat]
    for _ in range(steps):
        flats.append(dyn.step(flats[-1]))
    first_seen: dict[int, int] = {}
    cycle_start = cycle_length = None
    for t, f in enumerate(flats):
        if f in first_seen:
            cycle_start, cycle_length = first_seen[f], t - first_seen[f]
            break
        first_seen[f] = t
    return Trajectory(
        flats=flats,
        profiles=[profile_decode(f, dyn.radices) for f in flats],
        cycle_start=cycle_start,
        cycle_length=cycle_length,
    )


def pure_nash(game: FiniteGame, atol: float = 0.0) -> list[tuple[int, ...]]:
    """Profiles where no player has a unilateral deviation gaining more than ``atol``."""
    best = np.full(game.kappa, True)
    for i in range(1, game.n + 1):
        k = game.radices[i - 1]
        before = int(np.prod(game.radices[: i - 1]))
        after = int(np.prod(game.radices[i:]))
        v = game.payoffs[i - 1].reshape(before, k, after)
        top = v.max(axis=1, keepdims=True)
        best &= (v >= top - atol).reshape(-1)
    return [profile_decode(f + 1, game.radices) for f in np.flatnonzero(best)]


def mismatch_profiles(a: ProfileDynamics, b: ProfileDynamics) -> list[int]:
    """Flat profiles where any player's update differs."""
    if a.radices != b.radices:
        raise DimensionError(f"dynamics over different shapes {a.radices} and {b.radices}")
    out = []
    for j in range(len(a.composed.indices)):
        if any(ma.indices[j] != mb.indices[j] for ma, mb in zip(a.per_player, b.per_player)):
            out.append(j + 1)
    return out


def evolutionary_equivalent(g: FiniteGame, h: FiniteGame) -> bool:
    return not mismatch_profiles(mbra_dynamics(g), mbra_dynamics(h))


@dataclass(frozen=True, eq=False)
class NwpgReport:
    is_nwpg: bool
    surrogate: FiniteGame
    weights: np.ndarray
    verdict: WpgVerdict
    dynamics_G: ProfileDynamics
    dynamics_surrogate: ProfileDynamics
    mismatch_profiles: list[int]


def nwpg_check(game: FiniteGame, cfg: AlsConfig | None = None) -> NwpgReport:
    """Compare the MBRA dynamics of ``game`` with those of its closest WPG.

    Raises:
        DegenerateGameError: if weight estimation is degenerate.
    """
    verdict = estimate(game, cfg)
    if verdict.kind is VerdictKind.DEGENERATE:
        raise DegenerateGameError(verdict.message)
    surrogate = verdict.closest
    dyn_g = mbra_dynamics(game)
    dyn_s = mbra_dynamics(surrogate)
    mism = mismatch_profiles(dyn_g, dyn_s)
    return NwpgReport(
        is_nwpg=not mism,
        surrogate=surrogate,
        weights=verdict.weights,
        verdict=verdict,
        dynamics_G=dyn_g,
        dynamics_surrogate=dyn_s,
        mismatch_profiles=mism,
    )
