"""Utility design: closest WPG whose potential is a prescribed objective.

Every player's payoff is written as ``U_i = E_i xi_i + w_i J`` with ``w_1 = 1``.
Any such game is a WPG with potential ``J`` as long as all weights are
positive, so the least-squares fit against the given game is exact by
construction and only the fit quality and the dynamics need checking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import ProfileDynamics, mbra_dynamics, mismatch_profiles
from .errors import DegenerateGameError, GameFormatError, SingularDesignError
from .game import FiniteGame
from .potential import build_Ei, lstsq

IDENTIFIABILITY_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class DesignProblem:
    game: FiniteGame
    objective: np.ndarray

    def __post_init__(self):
        obj = np.array(self.objective, dtype=float).reshape(-1)
        if obj.shape != (self.game.kappa,):
            raise GameFormatError(
                f"objective must have {self.game.kappa} entries, got {obj.size}",
                field="objective",
            )
        if not np.all(np.isfinite(obj)):
            raise GameFormatError("objective entries must be finite", field="objective")
        obj.setflags(write=False)
        object.__setattr__(self, "objective", obj)


@dataclass(frozen=True, eq=False)
class DesignSolution:
    weights: np.ndarray
    xi: np.ndarray
    utilities: np.ndarray
    residual: float
    designed: FiniteGame
    equivalent: bool
    dynamics_game: ProfileDynamics
    dynamics_designed: ProfileDynamics
    mismatch_profiles: list[int]


def build_design_system(p: DesignProblem, pin_last: bool = True):
    """Assemble ``E0 x = b`` with ``x = (xi_1; ...; xi_n; w_2; ...; w_n)``.

    With ``pin_last`` the last entry of ``xi_n`` is fixed at zero and its
    column dropped. Returns ``(E0, b, blocks)`` where ``blocks`` lists the
    per-player ``E_i`` actually used.
    """
    g, obj = p.game, p.objective
    n, kappa = g.n, g.kappa
    blocks = [build_Ei(g.radices, i) for i in range(1, n + 1)]
    if pin_last:
        blocks[-1] = blocks[-1][:, :-1]
    widths = [e.shape[1] for e in blocks]
    offsets = np.concatenate([[0], np.cumsum(widths)])
    e0 = np.zeros((n * kappa, offsets[-1] + n - 1))
    for i, e in enumerate(blocks):
        rows = slice(i * kappa, (i + 1) * kappa)
        e0[rows, offsets[i] : offsets[i + 1]] = e
        if i > 0:
            e0[rows, offsets[-1] + i - 1] = obj
    b = np.concatenate([g.payoffs[0] - obj, *g.payoffs[1:]])
    return e0, b, blocks


def _check_identifiable(p: DesignProblem) -> None:
    obj = p.objective
    norm = float(np.linalg.norm(obj))
    for i in range(2, p.game.n + 1):
        e = build_Ei(p.game.radices, i)
        resid = float(np.linalg.norm(obj - e @ lstsq(e, obj)))
        if resid <= IDENTIFIABILITY_RTOL * max(1.0, norm):
            raise SingularDesignError(
                f"objective carries no strategic information for player {i}; "
                f"weight w_{i} is unidentifiable"
            )


def design(
    p: DesignProblem, weight_floor: float = 1e-6, pin_last: bool = True
) -> DesignSolution:
    """Fit the closest WPG with potential ``p.objective`` and compare dynamics.

    Raises:
        SingularDesignError: if some weight cannot be identified.
        DegenerateGameError: if a fitted weight is below ``weight_floor``.
    """
    g = p.game
    n = g.n
    _check_identifiable(p)
    e0, b, blocks = build_design_system(p, pin_last)
    x = lstsq(e0, b)
    residual = float(np.linalg.norm(e0 @ x - b))

    n_xi = e0.shape[1] - (n - 1)
    weights = np.concatenate([[1.0], x[n_xi:]])
    if np.any(weights <= weight_floor):
        raise DegenerateGameError(
            f"designed weights {weights.tolist()} fall below the floor {weight_floor}"
        )
    xi_flat = x[:n_xi]
    if pin_last:
        xi_flat = np.append(xi_flat, 0.0)
    full_blocks = [build_Ei(g.radices, i) for i in range(1, n + 1)]
    parts = np.split(xi_flat, np.cumsum([e.shape[1] for e in full_blocks])[:-1])
    utilities = np.vstack(
        [e @ part + w * p.objective for e, part, w in zip(full_blocks, parts, weights)]
    )
    designed = FiniteGame(g.radices, utilities)
    dyn_g = mbra_dynamics(g)
    dyn_d = mbra_dynamics(designed)
    mism = mismatch_profiles(dyn_g, dyn_d)
    return DesignSolution(
        weights=weights,
        xi=xi_flat,
        utilities=utilities,
        residual=residual,
        designed=designed,
        equivalent=not mism,
        dynamics_game=dyn_g,
        dynamics_designed=dyn_d,
        mismatch_profiles=mism,
    )


def certify_gtc(p: DesignProblem, **kwargs) -> tuple[bool, DesignSolution]:
    """Whether the designed WPG is evolutionary equivalent to the given game."""
    sol = design(p, **kwargs)
    return sol.equivalent, sol
