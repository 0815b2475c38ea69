"""Per-ball affine approximations ``g_m(z) = A (z - m) + beta`` and their verification.

For a level-``n`` ball with common image prefix length ``M`` the coefficient
is the pure power ``A = p**(M-n)`` and ``beta`` is the shared image prefix
(any image reduced mod ``p**M``).  For ``z`` in the ball, ``z - m`` has
valuation at least ``n``, so ``A (z - m)`` has valuation at least ``M`` and
``g_m`` maps the ball into the closed ball of radius ``p**-M`` about ``beta``.
Evaluation is restricted to p-adic integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .network import TransitionMap
from .padic_core import PadicScalar, valuation
from .stability import BallClass, as_perm, classify, level_prefix_lengths, permuted_images


@dataclass(frozen=True)
class AffineLocalMap:
    n: int
    m: int
    M: int
    A: PadicScalar
    beta: int
    images: tuple[int, ...]  # encoded images of the ball's configurations
    N: int

    @property
    def p(self) -> int:
        return self.A.p

    @property
    def ball(self) -> tuple[int, int]:
        return (self.n, self.m)

    @property
    def t(self) -> Fraction:
        return Fraction(1, self.p ** self.M)

    @property
    def cls(self) -> BallClass:
        return classify(self.M, self.n)

    @property
    def precision(self) -> int:
        return self.A.precision

    def contains(self, z: int) -> bool:
        return z >= 0 and (z - self.m) % self.p ** self.n == 0

    def __call__(self, z: int) -> Fraction:
        """``g_m(z)`` as an exact rational (an integer whenever ``z`` lies in the ball)."""
        return self.A.to_fraction() * (z - self.m) + self.beta

    def evaluate(self, z: int) -> PadicScalar:
        prod = self.A * PadicScalar.from_int(z - self.m, self.p, self.precision)
        return prod + PadicScalar.from_int(self.beta, self.p, self.precision)

    def describe(self) -> str:
        v = self.M - self.n
        A = str(self.p ** v) if v >= 0 else f"{self.p}^{v}"
        if self.m == 0 and self.beta == 0:
            return f"g(z) = {A}*z"
        return f"g(z) = {A}*(z - {self.m}) + {self.beta}"


def build_affine_model(f: TransitionMap, ordering, n: int,
                       precision: int | None = None) -> list[AffineLocalMap]:
    """One affine map per level-``n`` ball, ``A`` with unit part 1."""
    p, N = f.p, f.N
    K = precision if precision is not None else 2 * N
    g = permuted_images(f, as_perm(ordering, N))
    Ms = level_prefix_lengths(g, p, N, n)
    cols = g.reshape(p ** (N - n), p ** n)
    out = []
    for m in range(p ** n):
        M = int(Ms[m])
        imgs = tuple(int(x) for x in cols[:, m])
        out.append(AffineLocalMap(n, m, M, PadicScalar.power(p, M - n, K),
                                  imgs[0] % p ** M, imgs, N))
    return out


@dataclass
class VerificationReport:
    ball: tuple[int, int]
    samples: int
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _sample_offsets(rng: np.random.Generator, p: int, ndigits: int, count: int) -> list[int]:
    if ndigits <= 0:
        return [0] * count
    digs = rng.integers(0, p, size=(count, ndigits))
    w = [p ** k for k in range(ndigits)]
    return [sum(int(d) * wk for d, wk in zip(row, w)) for row in digs]


def _vmin(values, ref, p, cap) -> int:
    return min((valuation(v - ref, p, cap) for v in values), default=cap)


def verify_mapping_property(model: AffineLocalMap, samples: int = 100,
                            rng_seed: int | np.random.Generator = 0) -> VerificationReport:
    """Check the ball-mapping property of ``model`` on random ball members.

    Sample points ``z = m + p**n y`` stay below ``p**precision``.  Checks that
    ``|g(z) - beta|_p <= t`` for every sample, that the configuration images
    agree with ``beta`` modulo ``p**M``, and that the image diameter over the
    samples and the configuration images equals ``t`` when the ball has at
    least two distinct images.
    """
    p, n, m, M = model.p, model.n, model.m, model.M
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    rep = VerificationReport(model.ball, samples)
    cap = model.precision + abs(M - n) + n
    if model.A.valuation != M - n:
        rep.violations.append(f"A has valuation {model.A.valuation}, expected {M - n}")
    ys = _sample_offsets(rng, p, model.precision - n, samples)
    values = []
    for y in ys:
        z = m + p ** n * y
        gz = model(z)
        if gz.denominator != 1:
            rep.violations.append(f"g({z}) = {gz} is not a p-adic integer")
            continue
        gz = int(gz)
        v = valuation(gz - model.beta, p, cap)
        if v < M:
            rep.violations.append(f"z={z}: |g(z) - beta|_p = {p}^-{v} exceeds t = {p}^-{M}")
        values.append(gz)
    for a in model.images:
        if (a - model.beta) % p ** M:
            rep.violations.append(f"image {a} differs from beta={model.beta} below digit {M}")
    if len(set(model.images)) >= 2:
        pts = list(model.images) + values
        diam = _vmin(pts, pts[0], p, cap)
        if diam != M:
            rep.violations.append(f"image diameter {p}^-{diam} differs from t = {p}^-{M}")
    return rep


def verify_level(f: TransitionMap, ordering, n: int, samples: int = 100,
                 seed: int = 0) -> list[VerificationReport]:
    rng = np.random.default_rng([seed, n])
    return [verify_mapping_property(mod, samples, rng) for mod in build_affine_model(f, ordering, n)]
