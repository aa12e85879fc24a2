"""Semi-tensor product algebra and logical (delta-form) matrices.

Dense matrices are plain 2-D ``numpy`` float arrays. Logical matrices are
kept as lists of 1-based row indices, one per column, and are densified only
on request. Strategy profiles are indexed in mixed radix with player 1 most
significant, which is the ordering produced by ``x_1 ⋉ x_2 ⋉ ... ⋉ x_n``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError

DEFAULT_MAX_ENTRIES = 2**24
MAX_ENTRIES_ENV = "STPGAMES_MAX_ENTRIES"


def max_entries() -> int:
    """Current dimension cap; ``STPGAMES_MAX_ENTRIES`` overrides the default."""
    raw = os.environ.get(MAX_ENTRIES_ENV)
    if raw is None:
        return DEFAULT_MAX_ENTRIES
    try:
        value = int(raw)
    except ValueError:
        raise DimensionError(f"{MAX_ENTRIES_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise DimensionError(f"{MAX_ENTRIES_ENV} must be positive, got {value}")
    return value


def check_entries(rows: int, cols: int) -> None:
    cap = max_entries()
    if rows * cols > cap:
        raise DimensionError(
            f"result of shape {rows}x{cols} exceeds the cap of {cap} entries"
        )


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D float array; 1-D input becomes a column."""
    m = np.asarray(a, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2 or m.size == 0:
        raise DimensionError(f"expected a non-empty matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimensionError("matrix entries must be finite")
    return m


def stp(a, b) -> np.ndarray:
    """Left semi-tensor product ``a ⋉ b``.

    Computes ``(a ⊗ I_{t/n})(b ⊗ I_{t/p})`` with ``t = lcm(n, p)`` where ``n``
    is the column count of ``a`` and ``p`` the row count of ``b``. Neither
    identity factor is materialized.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    m, n = a.shape
    p, q = b.shape
    t = math.lcm(n, p)
    alpha, beta = t // n, t // p
    check_entries(m * alpha, q * beta)
    if alpha == 1 and beta == 1:
        return a @ b
    # Rows of (b ⊗ I_beta), grouped as (n, alpha) to line up with the columns of a ⊗ I_alpha.
    rhs = np.zeros((t, q, beta))
    r = np.arange(t)
    rhs[r, :, r % beta] = b[r // beta, :]
    rhs = rhs.reshape(n, alpha, q * beta)
    out = np.einsum("ij,jac->iac", a, rhs)
    return out.reshape(m * alpha, q * beta)


def stp_chain(factors: Iterable) -> np.ndarray:
    """Left-to-right semi-tensor product of several factors."""
    it = iter(factors)
    try:
        acc = as_matrix(next(it))
    except StopIteration:
        raise DimensionError("stp_chain needs at least one factor") from None
    for f in it:
        acc = stp(acc, f)
    return acc


def delta(n: int, i: int) -> np.ndarray:
    """Column ``δ_n^i`` (1-based) as an ``n x 1`` array."""
    if not 1 <= i <= n:
        raise DimensionError(f"delta index {i} outside 1..{n}")
    col = np.zeros((n, 1))
    col[i - 1, 0] = 1.0
    return col


@dataclass(frozen=True)
class LogicalMatrix:
    """Logical matrix ``δ_rows[indices]``; column j is ``δ_rows^{indices[j]}``."""

    rows: int
    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if self.rows < 1:
            raise DimensionError(f"row count must be positive, got {self.rows}")
        if not self.indices:
            raise DimensionError("a logical matrix needs at least one column")
        bad = [i for i in self.indices if not 1 <= i <= self.rows]
        if bad:
            raise DimensionError(f"delta indices {bad} outside 1..{self.rows}")

    @property
    def cols(self) -> int:
        return len(self.indices)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def to_dense(self) -> np.ndarray:
        check_entries(self.rows, self.cols)
        m = np.zeros((self.rows, self.cols))
        m[np.asarray(self.indices) - 1, np.arange(self.cols)] = 1.0
        return m

    @classmethod
    def from_dense(cls, m) -> "LogicalMatrix":
        m = as_matrix(m)
        ones = (m == 1.0).sum(axis=0)
        zeros = (m == 0.0).sum(axis=0)
        if np.any(ones != 1) or np.any(ones + zeros != m.shape[0]):
            raise DimensionError("matrix is not logical: columns must be unit vectors")
        return cls(m.shape[0], tuple(int(i) + 1 for i in np.argmax(m, axis=0)))

    @classmethod
    def identity(cls, n: int) -> "LogicalMatrix":
        return cls(n, tuple(range(1, n + 1)))

    def __matmul__(self, other: "LogicalMatrix") -> "LogicalMatrix":
        if not isinstance(other, LogicalMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionError(f"cannot compose {self.shape} with {other.shape}")
        return LogicalMatrix(self.rows, tuple(self.indices[j - 1] for j in other.indices))

    def __str__(self) -> str:
        return f"δ_{self.rows}[{','.join(map(str, self.indices))}]"


def swap_matrix(m: int, n: int) -> LogicalMatrix:
    """Swap matrix ``W_[m,n]`` with ``W_[m,n] ⋉ x ⋉ y = y ⋉ x`` for x in Δ_m, y in Δ_n."""
    if m < 1 or n < 1:
        raise DimensionError(f"swap matrix needs m, n >= 1, got ({m}, {n})")
    # column (i-1)n + j holds δ_n^j ⊗ δ_m^i
    return LogicalMatrix(
        m * n, tuple((j - 1) * m + i for i in range(1, m + 1) for j in range(1, n + 1))
    )


def profile_encode(digits: Sequence[int], radices: Sequence[int]) -> int:
    """Flat 1-based index of a strategy profile (player 1 most significant)."""
    if len(digits) != len(radices):
        raise DimensionError(
            f"profile has {len(digits)} entries but there are {len(radices)} players"
        )
    flat = 0
    for pos, (x, k) in enumerate(zip(digits, radices)):
        if not 1 <= x <= k:
            raise DimensionError(f"strategy {x} of player {pos + 1} outside 1..{k}")
        flat = flat * k + (x - 1)
    return flat + 1


def profile_decode(flat: int, radices: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`profile_encode`."""
    kappa = math.prod(radices)
    if not 1 <= flat <= kappa:
        raise DimensionError(f"flat profile index {flat} outside 1..{kappa}")
    rem = flat - 1
    digits = []
    for k in reversed(radices):
        rem, d = divmod(rem, k)
        digits.append(d + 1)
    return tuple(reversed(digits))


def khatri_rao(mats: Sequence[LogicalMatrix]) -> LogicalMatrix:
    """Column-wise Kronecker product of logical matrices sharing a column count."""
    if not mats:
        raise DimensionError("khatri_rao needs at least one matrix")
    cols = mats[0].cols
    if any(mat.cols != cols for mat in mats):
        raise DimensionError(
            f"column counts differ: {[mat.cols for mat in mats]}"
        )
    radices = [mat.rows for mat in mats]
    indices = tuple(
        profile_encode([mat.indices[j] for mat in mats], radices) for j in range(cols)
    )
    return LogicalMatrix(math.prod(radices), indices)
