"""Ball statistics and stability scores of a transition map under an ordering.

For an ordering ``perm`` the level-``n`` ball with index ``m`` holds every
configuration whose encoding is congruent to ``m`` modulo ``p**n``.  Its image
set has a common base-p prefix of length ``M``; the observable radius is
``t = p**-M`` and the ball is expanding, isometric or contracting as ``M`` is
below, equal to or above ``n``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .network import TransitionMap, state_digits
from .padic_core import PadicError, check_ordering, identity_ordering


class BallClass(enum.Enum):
    CONTRACTING = "A"
    EXPANDING = "E"
    ISOMETRIC = "I"

    @property
    def letter(self) -> str:
        return self.value


def classify(M: int, n: int) -> BallClass:
    if M < n:
        return BallClass.EXPANDING
    if M == n:
        return BallClass.ISOMETRIC
    return BallClass.CONTRACTING


@dataclass(frozen=True)
class Ordering:
    """Position ``k`` holds the canonical index of the gene at hierarchy position ``k``."""

    perm: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "perm", check_ordering(self.perm, len(self.perm)))

    @classmethod
    def identity(cls, N: int) -> "Ordering":
        return cls(identity_ordering(N))

    @property
    def N(self) -> int:
        return len(self.perm)

    def names(self, gene_names: Sequence[str]) -> list[str]:
        return [gene_names[i] for i in self.perm]

    def __iter__(self):
        return iter(self.perm)

    def __len__(self):
        return len(self.perm)

    def __getitem__(self, k):
        return self.perm[k]


def as_perm(ordering, N: int) -> tuple[int, ...]:
    if ordering is None:
        return identity_ordering(N)
    if isinstance(ordering, Ordering):
        ordering = ordering.perm
    return check_ordering(ordering, N)


@dataclass(frozen=True)
class BallStats:
    n: int
    m: int
    M: int
    p: int

    @property
    def ball(self) -> tuple[int, int]:
        return (self.n, self.m)

    @property
    def t(self) -> Fraction:
        return Fraction(1, self.p ** self.M)

    @property
    def Lambda(self) -> Fraction:
        return Fraction(self.p) ** (self.n - self.M)

    @property
    def cls(self) -> BallClass:
        return classify(self.M, self.n)


@dataclass(frozen=True)
class StabilityScores:
    mu_E: int
    mu_A: int
    mu_I: int
    per_level: tuple[tuple[int, int, int], ...] = field(default=())

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.mu_E, self.mu_A, self.mu_I)


# --- vectorised core ---------------------------------------------------------

def permuted_images(f: TransitionMap, ordering=None) -> np.ndarray:
    """``g`` with ``g[enc(a)] = enc(f(a))`` where ``enc`` uses ``ordering``."""
    perm = as_perm(ordering, f.N)
    if perm == identity_ordering(f.N):
        return f.images
    return f.relabel(perm).images


def _valuations(d: np.ndarray, p: int, cap: int) -> np.ndarray:
    """Elementwise p-adic valuation of integers, with zero (and overflow) capped at ``cap``."""
    out = np.zeros(d.shape, dtype=np.int64)
    alive = np.ones(d.shape, dtype=bool)
    q = 1
    for _ in range(cap):
        q *= p
        alive &= (d % q == 0)
        if not alive.any():
            break
        out += alive
    return out


def image_digits(g: np.ndarray, p: int, N: int) -> np.ndarray:
    """Base-p digits of every image, shape ``(p**N, N)``, least significant first."""
    return ((g[:, None] // p ** np.arange(N, dtype=np.int64)) % p).astype(np.uint8)


def prefix_lengths_from_digits(D: np.ndarray, p: int, N: int, n: int) -> np.ndarray:
    """``M_{n,m}`` for every ``m`` from the image digit table of :func:`image_digits`."""
    if not 0 <= n <= N:
        raise PadicError(f"level {n} outside 0..{N}")
    cols = D.reshape(p ** (N - n), p ** n, N)
    differ = (cols != cols[0]).any(axis=0)  # (ball, digit)
    return np.where(differ.any(axis=1), differ.argmax(axis=1), N).astype(np.int64)


def level_prefix_lengths(g: np.ndarray, p: int, N: int, n: int) -> np.ndarray:
    """``M_{n,m}`` for every ``m`` given images ``g`` indexed by encoding."""
    return prefix_lengths_from_digits(image_digits(g, p, N), p, N, n)


def ball_stats(f: TransitionMap, ordering, n: int, m: int) -> BallStats:
    if not 0 <= n <= f.N:
        raise PadicError(f"level {n} outside 0..{f.N}")
    if not 0 <= m < f.p ** n:
        raise PadicError(f"ball index {m} outside 0..{f.p ** n - 1}")
    g = permuted_images(f, ordering)
    members = g[m::f.p ** n]
    M = int(_valuations(members - members[0], f.p, f.N).min())
    return BallStats(n, m, M, f.p)


def level_stats(f: TransitionMap, ordering, n: int) -> list[BallStats]:
    M = level_prefix_lengths(permuted_images(f, ordering), f.p, f.N, n)
    return [BallStats(n, m, int(v), f.p) for m, v in enumerate(M)]


def _counts(M: np.ndarray, n: int) -> tuple[int, int, int]:
    E = int(np.count_nonzero(M < n))
    I = int(np.count_nonzero(M == n))
    return E, I, M.size - E - I


def level_counts(f: TransitionMap, ordering, n: int) -> tuple[int, int, int]:
    """``(E(n), I(n), A(n))``."""
    return _counts(level_prefix_lengths(permuted_images(f, ordering), f.p, f.N, n), n)


def expanding_set(f: TransitionMap, ordering, n: int) -> set[int]:
    M = level_prefix_lengths(permuted_images(f, ordering), f.p, f.N, n)
    return {int(m) for m in np.flatnonzero(M < n)}


def per_level_counts(f: TransitionMap, ordering) -> list[tuple[int, int, int]]:
    D = image_digits(permuted_images(f, ordering), f.p, f.N)
    return [_counts(prefix_lengths_from_digits(D, f.p, f.N, n), n) for n in range(1, f.N)]


def stability_scores(f: TransitionMap, ordering=None) -> StabilityScores:
    """``mu_* = sum_n count_*(n) * p**(N-n)`` over levels ``1..N-1``."""
    p, N = f.p, f.N
    levels = per_level_counts(f, ordering)
    mu = [0, 0, 0]
    for n, counts in enumerate(levels, start=1):
        w = p ** (N - n)
        for i, c in enumerate(counts):
            mu[i] += c * w
    mu_E, mu_I, mu_A = mu
    return StabilityScores(mu_E, mu_A, mu_I, tuple(levels))


def scores_via_haar(f: TransitionMap, ordering=None) -> StabilityScores:
    """Same scores as the total configuration volume ``p**N`` times the Haar mass of each class."""
    p, N = f.p, f.N
    levels = per_level_counts(f, ordering)
    mass = [Fraction(0)] * 3
    for n, counts in enumerate(levels, start=1):
        for i, c in enumerate(counts):
            mass[i] += Fraction(c, p ** n)
    vals = []
    for x in mass:
        x *= p ** N
        if x.denominator != 1:
            raise ArithmeticError(f"Haar mass {x} is not integral")
        vals.append(int(x))
    mu_E, mu_I, mu_A = vals
    return StabilityScores(mu_E, mu_A, mu_I, tuple(levels))


def expanding_score(f: TransitionMap, ordering=None) -> int:
    """``mu_E`` alone, computed through the per-level route."""
    p, N = f.p, f.N
    D = image_digits(permuted_images(f, ordering), p, N)
    total = 0
    for n in range(1, N):
        M = prefix_lengths_from_digits(D, p, N, n)
        total += int(np.count_nonzero(M < n)) * p ** (N - n)
    return total


class SubsetExpansion:
    """``E(n)`` keyed by the set of genes in the first ``n`` positions.

    A level-``n`` ball is expanding exactly when its images differ on some gene
    in that set, so the count depends on the set alone.  Results are memoised
    by bitmask; at most ``2**N`` distinct sets occur.
    """

    def __init__(self, f: TransitionMap):
        self.f = f
        self.p, self.N = f.p, f.N
        self._digits = state_digits(self.N, self.p)
        self._img_digits = self._digits[f.images]
        self._weights = self.p ** np.arange(self.N, dtype=np.int64)
        self._cache: dict[int, int] = {0: 0}
        self.evaluations = 0

    def count(self, mask: int) -> int:
        hit = self._cache.get(mask)
        if hit is not None:
            return hit
        genes = [i for i in range(self.N) if mask >> i & 1]
        w = self._weights[genes]
        proj = self._digits[:, genes] @ w
        img_proj = self._img_digits[:, genes] @ w
        bad = img_proj != img_proj[proj]
        flags = np.zeros(self.p ** self.N, dtype=bool)
        flags[proj[bad]] = True
        E = int(np.count_nonzero(flags))
        self._cache[mask] = E
        self.evaluations += 1
        return E

    def weight(self, n: int) -> int:
        return self.p ** (self.N - n)

    def prefix_cost(self, perm: Sequence[int]) -> int:
        """Exact sum of ``E(n) * p**(N-n)`` over ``n = 1..len(perm)`` (capped at ``N-1``)."""
        cost, mask = 0, 0
        for n, gene in enumerate(perm[: self.N - 1], start=1):
            mask |= 1 << gene
            cost += self.count(mask) * self.weight(n)
        return cost

    def score(self, perm: Sequence[int]) -> int:
        return self.prefix_cost(perm)
