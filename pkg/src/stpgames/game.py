"""Finite normal-form games in structure-vector form."""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import GameFormatError
from .stp import delta, profile_decode, profile_encode, stp_chain


@dataclass(frozen=True, eq=False)
class FiniteGame:
    """An n-player game with ``radices[i]`` strategies for player ``i + 1``.

    ``payoffs[i]`` is the structure vector of player ``i + 1``: entry ``f - 1``
    is the payoff at the profile with flat index ``f``. Players, strategies
    and flat profile indices are 1-based in the public API.
    """

    radices: tuple[int, ...]
    payoffs: np.ndarray

    def __post_init__(self):
        radices = tuple(int(k) for k in self.radices)
        object.__setattr__(self, "radices", radices)
        if len(radices) < 2:
            raise GameFormatError("a game needs at least two players", field="radices")
        if any(k < 2 for k in radices):
            raise GameFormatError(
                f"every player needs at least two strategies, got {list(radices)}",
                field="radices",
            )
        payoffs = np.array(self.payoffs, dtype=float)
        kappa = math.prod(radices)
        if payoffs.shape != (len(radices), kappa):
            raise GameFormatError(
                f"payoffs must have shape ({len(radices)}, {kappa}), got {payoffs.shape}",
                field="payoffs",
            )
        if not np.all(np.isfinite(payoffs)):
            raise GameFormatError("payoffs must be finite", field="payoffs")
        payoffs.setflags(write=False)
        object.__setattr__(self, "payoffs", payoffs)

    @property
    def n(self) -> int:
        return len(self.radices)

    @property
    def kappa(self) -> int:
        return self.payoffs.shape[1]

    def __eq__(self, other):
        if not isinstance(other, FiniteGame):
            return NotImplemented
        return self.radices == other.radices and np.array_equal(self.payoffs, other.payoffs)

    def __hash__(self):
        return hash((self.radices, self.payoffs.tobytes()))

    def __repr__(self):
        return f"FiniteGame(radices={self.radices})"

    def structure_vector(self, player: int) -> np.ndarray:
        self._check_player(player)
        return self.payoffs[player - 1]

    def stacked(self) -> np.ndarray:
        """All structure vectors stacked into one vector of length ``n * kappa``."""
        return self.payoffs.reshape(-1)

    def payoff(self, player: int, profile: Sequence[int]) -> float:
        self._check_player(player)
        return float(self.payoffs[player - 1, profile_encode(profile, self.radices) - 1])

    def payoff_stp(self, player: int, profile: Sequence[int]) -> float:
        """Payoff computed as ``V_i ⋉ x_1 ⋉ ... ⋉ x_n``; slow, used for cross-checks."""
        self._check_player(player)
        cols = [delta(k, x) for k, x in zip(self.radices, profile)]
        row = self.payoffs[player - 1][None, :]
        return float(stp_chain([row, *cols])[0, 0])

    def profiles(self) -> Iterator[tuple[int, ...]]:
        """All profiles in flat-index order."""
        return itertools.product(*(range(1, k + 1) for k in self.radices))

    def table(self) -> dict[tuple[int, ...], tuple[float, ...]]:
        return {
            prof: tuple(float(v) for v in self.payoffs[:, f])
            for f, prof in enumerate(self.profiles())
        }

    def scaled(self, factor: float) -> "FiniteGame":
        return FiniteGame(self.radices, self.payoffs * factor)

    def to_document(self) -> dict:
        return {
            "radices": list(self.radices),
            "payoffs": [[float(v) for v in row] for row in self.payoffs],
        }

    def _check_player(self, player: int) -> None:
        if not 1 <= player <= self.n:
            raise GameFormatError(f"player {player} outside 1..{self.n}", field="player")


def zero_game(radices: Sequence[int]) -> FiniteGame:
    return FiniteGame(tuple(radices), np.zeros((len(radices), math.prod(radices))))


def from_payoff_table(
    radices: Sequence[int], table: Mapping[Sequence[int], Sequence[float]]
) -> FiniteGame:
    """Build a game from ``{profile digits: payoff tuple}`` covering every profile once."""
    radices = tuple(int(k) for k in radices)
    n, kappa = len(radices), math.prod(radices)
    payoffs = np.full((n, kappa), np.nan)
    seen = set()
    for profile, values in table.items():
        profile = tuple(int(x) for x in profile)
        try:
            flat = profile_encode(profile, radices)
        except ValueError as exc:
            raise GameFormatError(str(exc), field="profile") from None
        if flat in seen:
            raise GameFormatError(f"duplicate profile {profile}", field="profile")
        seen.add(flat)
        if len(values) != n:
            raise GameFormatError(
                f"profile {profile} has {len(values)} payoffs, expected {n}", field="payoffs"
            )
        payoffs[:, flat - 1] = values
    if len(seen) != kappa:
        missing = [profile_decode(f, radices) for f in range(1, kappa + 1) if f not in seen]
        raise GameFormatError(f"missing profiles {missing[:5]}", field="table")
    return FiniteGame(radices, payoffs)


def game_from_document(doc: Mapping) -> FiniteGame:
    """Parse a JSON game document (``payoffs`` form or ``table`` form)."""
    if not isinstance(doc, Mapping):
        raise GameFormatError("game document must be a JSON object", field="$")
    if "radices" not in doc:
        raise GameFormatError("missing 'radices'", field="radices")
    radices = doc["radices"]
    if not isinstance(radices, list) or not all(
        isinstance(k, int) and not isinstance(k, bool) for k in radices
    ):
        raise GameFormatError("'radices' must be a list of integers", field="radices")
    if "payoffs" in doc and "table" in doc:
        raise GameFormatError("give either 'payoffs' or 'table', not both", field="payoffs")
    if "payoffs" in doc:
        try:
            payoffs = np.array(doc["payoffs"], dtype=float)
        except (TypeError, ValueError):
            raise GameFormatError("'payoffs' must be a list of numeric rows", field="payoffs") from None
        return FiniteGame(tuple(radices), payoffs)
    if "table" in doc:
        entries = doc["table"]
        if not isinstance(entries, list):
            raise GameFormatError("'table' must be a list", field="table")
        table = {}
        for pos, entry in enumerate(entries):
            if not isinstance(entry, Mapping) or "profile" not in entry or "payoffs" not in entry:
                raise GameFormatError(
                    f"table entry {pos} needs 'profile' and 'payoffs'", field=f"table[{pos}]"
                )
            key = tuple(entry["profile"])
            if key in table:
                raise GameFormatError(f"duplicate profile {list(key)}", field=f"table[{pos}]")
            table[key] = entry["payoffs"]
        return from_payoff_table(radices, table)
    raise GameFormatError("document needs 'payoffs' or 'table'", field="payoffs")


def distance(g: FiniteGame, h: FiniteGame) -> float:
    """Euclidean distance between the stacked structure vectors of two games."""
    if g.radices != h.radices:
        raise GameFormatError(
            f"games have different shapes {g.radices} and {h.radices}", field="radices"
        )
    return float(np.linalg.norm(g.stacked() - h.stacked()))


def _deviation_edges(radices: Sequence[int]):
    """Yield ``(player, flat_a, flat_b)`` for every unilateral deviation pair (0-based flats)."""
    kappa = math.prod(radices)
    strides = [math.prod(radices[i + 1:]) for i in range(len(radices))]
    for f in range(kappa):
        for i, (k, s) in enumerate(zip(radices, strides)):
            x = (f // s) % k
            for y in range(x + 1, k):
                yield i, f, f + (y - x) * s


def satisfies_potential(
    g: FiniteGame, weights: Sequence[float], potential: Sequence[float], atol: float
) -> bool:
    """Check ``c_i(x_i, s) - c_i(y_i, s) = w_i (P(x_i, s) - P(y_i, s))`` for every deviation."""
    w = np.asarray(weights, dtype=float)
    p = np.asarray(potential, dtype=float)
    v = g.payoffs
    for i, a, b in _deviation_edges(g.radices):
        if abs((v[i, a] - v[i, b]) - w[i] * (p[a] - p[b])) > atol:
            return False
    return True


def potential_by_enumeration(
    g: FiniteGame, weights: Sequence[float], atol: float
) -> np.ndarray | None:
    """Find a weighted potential by walking the unilateral-deviation graph.

    Potential differences are fixed along a spanning tree from profile 1 and
    then checked on every remaining edge. Returns the potential (zero at
    profile 1) or ``None`` when none exists at tolerance ``atol``.
    """
    w = np.asarray(weights, dtype=float)
    v = g.payoffs
    kappa = g.kappa
    adj: list[list[tuple[int, int]]] = [[] for _ in range(kappa)]
    for i, a, b in _deviation_edges(g.radices):
        adj[a].append((b, i))
        adj[b].append((a, i))
    pot = np.full(kappa, np.nan)
    pot[0] = 0.0
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for b, i in adj[a]:
            if np.isnan(pot[b]):
                pot[b] = pot[a] + (v[i, b] - v[i, a]) / w[i]
                queue.append(b)
    return pot if satisfies_potential(g, w, pot, atol) else None
