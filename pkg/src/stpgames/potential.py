"""Weighted potential equation, WPG subspace and closest-WPG projection.

For weights ``w`` a game is weighted potential iff ``E_w xi = B`` is solvable,
where block row ``i`` (players ``i + 1`` against player 1) reads::

    -w_{i+1} E_1 xi_1 + w_1 E_{i+1} xi_{i+1} = (w_1 V_{i+1} - w_{i+1} V_1)^T

and ``E_i = I ⊗ 1_{k_i} ⊗ I`` copies a function of the opponents' strategies
across player ``i``'s own strategies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import DimensionError, GameFormatError, NotASolutionError
from .game import FiniteGame, distance
from .stp import check_entries

RCOND = 1e-10
WPG_RTOL = 1e-6

Gauge = Literal["min_norm", "pinned"]
Mode = Literal["fix_v1", "joint"]


def lstsq(a: np.ndarray, b: np.ndarray, rcond: float = RCOND) -> np.ndarray:
    """Minimum-norm least squares via SVD, dropping singular values below ``rcond * s_max``."""
    return np.linalg.lstsq(a, b, rcond=rcond)[0]


def wpg_tolerance(b_norm: float, rtol: float = WPG_RTOL) -> float:
    return rtol * max(1.0, b_norm)


def check_weights(weights: Sequence[float], n: int) -> np.ndarray:
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.shape != (n,):
        raise GameFormatError(f"expected {n} weights, got {w.size}", field="weights")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise GameFormatError(f"weights must be positive, got {w.tolist()}", field="weights")
    return w


def build_Ei(radices: Sequence[int], i: int) -> np.ndarray:
    """``I_{k_1...k_{i-1}} ⊗ 1_{k_i} ⊗ I_{k_{i+1}...k_n}`` for 1-based player ``i``."""
    if not 1 <= i <= len(radices):
        raise DimensionError(f"player {i} outside 1..{len(radices)}")
    before = math.prod(radices[: i - 1])
    k = radices[i - 1]
    after = math.prod(radices[i:])
    check_entries(before * k * after, before * after)
    # E[p, q] = 1 iff profile p with player i's digit removed has index q
    p = np.arange(before * k * after)
    q = (p // (k * after)) * after + p % after
    e = np.zeros((before * k * after, before * after))
    e[p, q] = 1.0
    return e


def xi_sizes(radices: Sequence[int]) -> list[int]:
    kappa = math.prod(radices)
    return [kappa // k for k in radices]


def split_xi(radices: Sequence[int], xi: np.ndarray) -> list[np.ndarray]:
    sizes = xi_sizes(radices)
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.size != sum(sizes):
        raise DimensionError(f"xi has length {xi.size}, expected {sum(sizes)}")
    return np.split(xi, np.cumsum(sizes)[:-1])


def build_Ew(radices: Sequence[int], weights: Sequence[float]) -> np.ndarray:
    n = len(radices)
    w = np.asarray(weights, dtype=float)
    kappa = math.prod(radices)
    sizes = xi_sizes(radices)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    check_entries((n - 1) * kappa, offsets[-1])
    e1 = build_Ei(radices, 1)
    ew = np.zeros(((n - 1) * kappa, offsets[-1]))
    for i in range(1, n):
        rows = slice((i - 1) * kappa, i * kappa)
        ew[rows, : offsets[1]] = -w[i] * e1
        ew[rows, offsets[i] : offsets[i + 1]] = w[0] * build_Ei(radices, i + 1)
    return ew


def build_B(game: FiniteGame, weights: Sequence[float]) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    v = game.payoffs
    return np.concatenate([w[0] * v[i] - w[i] * v[0] for i in range(1, game.n)])


def build_EPw(radices: Sequence[int], weights: Sequence[float]) -> np.ndarray:
    """Spanning matrix of the WPG subspace, shape ``n kappa x (kappa + sum kappa/k_i)``."""
    n = len(radices)
    w = np.asarray(weights, dtype=float)
    kappa = math.prod(radices)
    ew = build_Ew(radices, w)
    check_entries(n * kappa, kappa + ew.shape[1])
    out = np.zeros((n * kappa, kappa + ew.shape[1]))
    eye = np.eye(kappa)
    for i in range(n):
        out[i * kappa : (i + 1) * kappa, :kappa] = w[i] * eye
    out[kappa:, kappa:] = ew
    return out


@dataclass(frozen=True, eq=False)
class WpeSolution:
    """Least-squares solution of the weighted potential equation for fixed weights."""

    weights: np.ndarray
    xi: np.ndarray
    residual: float
    tolerance: float
    potential: np.ndarray

    @property
    def is_wpg(self) -> bool:
        return self.residual <= self.tolerance


def solve_xi(
    game: FiniteGame, weights: Sequence[float], gauge: Gauge = "min_norm"
) -> tuple[np.ndarray, float, float]:
    """Return ``(xi, residual, ||B||)`` for fixed weights without validating them.

    ``E_w`` has a one-dimensional kernel (``xi_i ∝ w_i 1``). ``"min_norm"``
    picks the minimum-norm solution; ``"pinned"`` fixes the last entry of
    ``xi_n`` at zero, which selects the same residual but a different
    representative.
    """
    ew = build_Ew(game.radices, weights)
    b = build_B(game, weights)
    if gauge == "pinned":
        xi = np.append(lstsq(ew[:, :-1], b), 0.0)
    elif gauge == "min_norm":
        xi = lstsq(ew, b)
    else:
        raise ValueError(f"unknown gauge {gauge!r}")
    return xi, float(np.linalg.norm(ew @ xi - b)), float(np.linalg.norm(b))


def potential_row(game: FiniteGame, weights: Sequence[float], xi, i: int = 1) -> np.ndarray:
    """``(V_i - xi_i^T E_i^T) / w_i`` without checking that ``xi`` solves the WPE."""
    w = np.asarray(weights, dtype=float)
    part = split_xi(game.radices, xi)[i - 1]
    return (game.payoffs[i - 1] - build_Ei(game.radices, i) @ part) / w[i - 1]


def solve_wpe(
    game: FiniteGame,
    weights: Sequence[float],
    gauge: Gauge = "min_norm",
    rtol: float = WPG_RTOL,
) -> WpeSolution:
    w = check_weights(weights, game.n)
    xi, residual, b_norm = solve_xi(game, w, gauge)
    return WpeSolution(
        weights=w,
        xi=xi,
        residual=residual,
        tolerance=wpg_tolerance(b_norm, rtol),
        potential=potential_row(game, w, xi, 1),
    )


def potential_from_solution(
    game: FiniteGame, weights: Sequence[float], xi, i: int = 1, rtol: float = WPG_RTOL
) -> np.ndarray:
    """Potential structure row read off player ``i``'s block of a WPE solution.

    Raises:
        NotASolutionError: if ``xi`` does not solve the WPE within tolerance.
    """
    w = check_weights(weights, game.n)
    if not 1 <= i <= game.n:
        raise GameFormatError(f"player {i} outside 1..{game.n}", field="player")
    xi = np.asarray(xi, dtype=float).reshape(-1)
    ew = build_Ew(game.radices, w)
    b = build_B(game, w)
    residual = float(np.linalg.norm(ew @ xi - b))
    if residual > wpg_tolerance(float(np.linalg.norm(b)), rtol):
        raise NotASolutionError(f"xi leaves a WPE residual of {residual:.3g}")
    return potential_row(game, w, xi, i)


def reconstruct_fix_v1(game: FiniteGame, weights: Sequence[float], xi) -> FiniteGame:
    """WPG that keeps ``V_1`` and sets ``V_{i+1} = (E_w xi)_i + w_{i+1} V_1`` (with ``w_1 = 1``).

    For general ``w_1`` the blocks are divided by ``w_1``. The result solves
    the WPE exactly with the given ``xi``.
    """
    w = np.asarray(weights, dtype=float)
    kappa = game.kappa
    exi = build_Ew(game.radices, w) @ np.asarray(xi, dtype=float)
    v1 = game.payoffs[0]
    rows = [v1] + [
        (exi[(i - 1) * kappa : i * kappa] + w[i] * v1) / w[0] for i in range(1, game.n)
    ]
    return FiniteGame(game.radices, np.vstack(rows))


def project_closest_wpg(
    game: FiniteGame, weights: Sequence[float], mode: Mode = "fix_v1"
) -> tuple[FiniteGame, float]:
    """Closest WPG with the given weights, and its distance to ``game``.

    ``"joint"`` projects the whole stacked structure vector onto the WPG
    subspace. ``"fix_v1"`` keeps player 1's payoffs and fits the rest, which
    is what the NWPG check uses.
    """
    w = check_weights(weights, game.n)
    if mode == "joint":
        basis = build_EPw(game.radices, w)[:, :-1]
        target = game.stacked()
        fitted = basis @ lstsq(basis, target)
        closest = FiniteGame(game.radices, fitted.reshape(game.n, game.kappa))
    elif mode == "fix_v1":
        xi, _, _ = solve_xi(game, w)
        closest = reconstruct_fix_v1(game, w, xi)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return closest, distance(game, closest)


@dataclass(frozen=True, eq=False)
class WpgBasis:
    EPw: np.ndarray
    EPw_tilde: np.ndarray
    dim: int


def column_rank(a: np.ndarray) -> int:
    """Numerical column rank; a Cholesky test on the Gram matrix short-cuts the full-rank case."""
    gram = a.T @ a
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        chol = None
    if chol is not None:
        pivots = np.diag(chol) ** 2
        if pivots.min() > 1e-12 * gram.diagonal().max():
            return a.shape[1]
    return int(np.linalg.matrix_rank(a))


def wpg_subspace(radices: Sequence[int], weights: Sequence[float]) -> WpgBasis:
    """Basis of the WPG subspace for fixed weights; dimension ``kappa + sum kappa/k_i - 1``.

    The leading ``kappa`` columns carry an invertible ``w_1 I`` block above a
    zero block, so the rank of the reduced basis is ``kappa`` plus the rank of
    ``E_w`` without its last column.
    """
    w = check_weights(weights, len(radices))
    epw = build_EPw(radices, w)
    tilde = epw[:, :-1]
    kappa = math.prod(radices)
    rank = kappa + column_rank(tilde[kappa:, kappa:])
    if rank != tilde.shape[1]:
        raise DimensionError(
            f"reduced basis has rank {rank} but {tilde.shape[1]} columns"
        )
    return WpgBasis(EPw=epw, EPw_tilde=tilde, dim=rank)
