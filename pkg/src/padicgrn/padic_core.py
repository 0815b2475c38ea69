"""Base-p digit arithmetic for configurations embedded in the p-adic integers.

A configuration ``a = (a_0, ..., a_{N-1})`` with ``a_i in {0, ..., p-1}`` is
encoded as the integer ``sum_k a[ordering[k]] * p**k``.  Digit ``k`` of the
encoding is the state of the gene at hierarchy position ``k``; position 0 is
the least-significant digit and the coarsest level of the ball tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

MAX_STATES = 1 << 63


class PadicError(ValueError):
    """Base class for invalid inputs to the digit arithmetic."""


class InvalidConfigurationError(PadicError):
    pass


class EncodingRangeError(PadicError):
    pass


class EmptyInputError(PadicError):
    pass


class PrecisionExhaustedError(ArithmeticError):
    """Raised when cancellation consumes every known digit of a result."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def check_size(N: int, p: int) -> None:
    """Reject state spaces whose size does not fit a signed 64-bit word."""
    if N < 1:
        raise PadicError(f"need at least one gene, got N={N}")
    if p ** N >= MAX_STATES:
        raise PadicError(f"p^N = {p}^{N} does not fit in 63 bits")


def identity_ordering(N: int) -> tuple[int, ...]:
    return tuple(range(N))


def check_ordering(ordering: Sequence[int], N: int) -> tuple[int, ...]:
    perm = tuple(int(k) for k in ordering)
    if len(perm) != N or sorted(perm) != list(range(N)):
        raise PadicError(f"{perm!r} is not a permutation of 0..{N - 1}")
    return perm


def encode(config: Sequence[int], ordering: Sequence[int] | None, p: int) -> int:
    """Encode a configuration as ``sum_k config[ordering[k]] * p**k``.

    >>> encode((0, 1, 0, 1), None, 2)
    10
    """
    N = len(config)
    perm = identity_ordering(N) if ordering is None else check_ordering(ordering, N)
    m = 0
    for k in reversed(range(N)):
        s = config[perm[k]]
        if not 0 <= s < p:
            raise InvalidConfigurationError(
                f"state {s} of gene {perm[k]} is outside 0..{p - 1}"
            )
        m = m * p + s
    return m


def decode(m: int, N: int, p: int, ordering: Sequence[int] | None = None) -> tuple[int, ...]:
    """Inverse of :func:`encode` for the same ``ordering``."""
    if not 0 <= m < p ** N:
        raise EncodingRangeError(f"{m} is outside 0..{p}^{N}-1")
    perm = identity_ordering(N) if ordering is None else check_ordering(ordering, N)
    config = [0] * N
    for k in range(N):
        m, config[perm[k]] = divmod(m, p)
    return tuple(config)


def digits(m: int, N: int, p: int) -> list[int]:
    """Base-p digits of ``m``, least significant first, padded to ``N``."""
    out = []
    for _ in range(N):
        m, d = divmod(m, p)
        out.append(d)
    return out


def truncate(m: int, n: int, p: int) -> int:
    """Index of the level-``n`` ball containing ``m`` (that is, ``m mod p**n``)."""
    if n < 0:
        raise PadicError(f"level must be nonnegative, got {n}")
    return m % p ** n


def valuation(x: int, p: int, cap: int | None = None) -> int | None:
    """p-adic valuation of an integer.

    Returns ``None`` for zero unless ``cap`` is given, in which case zero (and
    any valuation above ``cap``) is reported as ``cap``.
    """
    if x == 0:
        return cap
    x = abs(x)
    v = 0
    while x % p == 0:
        x //= p
        v += 1
        if cap is not None and v >= cap:
            return cap
    return v


def distance(x: int, y: int, p: int) -> Fraction:
    """|x - y|_p as an exact rational."""
    v = valuation(x - y, p)
    return Fraction(0) if v is None else Fraction(1, p ** v)


def common_prefix_length(values: Iterable[int], N: int, p: int) -> int:
    """Largest ``k <= N`` such that every value agrees modulo ``p**k``.

    Singletons (and sets of identical values) return ``N``.
    """
    it = iter(values)
    try:
        first = next(it)
    except StopIteration:
        raise EmptyInputError("common prefix of an empty set") from None
    M = N
    for v in it:
        M = min(M, valuation(v - first, p, cap=N))
        if M == 0:
            break
    return M


@dataclass(frozen=True)
class PadicScalar:
    """An element ``p**valuation * unit`` of Q_p known to ``precision`` digits.

    ``unit`` is coprime to ``p`` and has at most ``precision`` base-p digits.
    Zero is represented by ``unit == 0`` with ``valuation is None``.  When
    ``exact`` is set the stored (possibly negative) unit is the true unit, so
    sums can be formed without loss; otherwise it is known modulo
    ``p**precision`` only.
    """

    p: int
    valuation: int | None
    unit: int
    precision: int
    exact: bool = True

    @classmethod
    def zero(cls, p: int, precision: int) -> "PadicScalar":
        return cls(p, None, 0, precision, True)

    @classmethod
    def from_int(cls, x: int, p: int, precision: int) -> "PadicScalar":
        return cls.from_fraction(Fraction(x), p, precision)

    @classmethod
    def power(cls, p: int, v: int, precision: int) -> "PadicScalar":
        """The pure power ``p**v`` (unit part 1)."""
        return cls(p, v, 1, precision, True)

    @classmethod
    def from_fraction(cls, x: Fraction, p: int, precision: int) -> "PadicScalar":
        if precision < 1:
            raise PadicError("precision must be at least one digit")
        if x == 0:
            return cls.zero(p, precision)
        num, den = x.numerator, x.denominator
        v = valuation(num, p) - valuation(den, p)
        num //= p ** max(0, valuation(num, p))
        den //= p ** max(0, valuation(den, p))
        mod = p ** precision
        if den == 1 and abs(num) < mod:
            return cls(p, v, num, precision, True)
        unit = num * pow(den, -1, mod) % mod
        return cls(p, v, unit, precision, False)

    @property
    def is_zero(self) -> bool:
        return self.valuation is None

    def to_fraction(self) -> Fraction:
        """Value of the stored digits (exact when ``self.exact``)."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.valuation

    def _check(self, other: "PadicScalar") -> None:
        if self.p != other.p:
            raise PadicError(f"mixed primes {self.p} and {other.p}")

    def __neg__(self) -> "PadicScalar":
        if self.is_zero:
            return self
        if self.exact:
            return PadicScalar(self.p, self.valuation, -self.unit, self.precision, True)
        mod = self.p ** self.precision
        return PadicScalar(self.p, self.valuation, (-self.unit) % mod, self.precision, False)

    def __mul__(self, other: "PadicScalar") -> "PadicScalar":
        self._check(other)
        K = min(self.precision, other.precision)
        if self.is_zero or other.is_zero:
            return PadicScalar.zero(self.p, K)
        if self.exact and other.exact:
            prod = self.to_fraction() * other.to_fraction()
            return PadicScalar.from_fraction(prod, self.p, K)
        mod = self.p ** K
        return PadicScalar(self.p, self.valuation + other.valuation,
                           self.unit * other.unit % mod, K, False)

    def __add__(self, other: "PadicScalar") -> "PadicScalar":
        self._check(other)
        K = min(self.precision, other.precision)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.exact and other.exact:
            return PadicScalar.from_fraction(self.to_fraction() + other.to_fraction(), self.p, K)
        # align both operands at the smaller valuation; K digits are known there
        v = min(self.valuation, other.valuation)
        mod = self.p ** K
        s = (self.unit * self.p ** (self.valuation - v)
             + other.unit * self.p ** (other.valuation - v)) % mod
        if s == 0:
            raise PrecisionExhaustedError(
                f"sum cancels all {K} known digits above p^{v}"
            )
        w = valuation(s, self.p)
        return PadicScalar(self.p, v + w, s // self.p ** w, K - w, False)

    def __sub__(self, other: "PadicScalar") -> "PadicScalar":
        self._check(other)
        if self.exact and other.exact:
            K = min(self.precision, other.precision)
            return PadicScalar.from_fraction(self.to_fraction() - other.to_fraction(), self.p, K)
        return self + (-other)

    def __abs__(self) -> Fraction:
        return padic_abs(self)


def padic_abs(x: PadicScalar) -> Fraction:
    """|x|_p = p**(-valuation); zero maps to 0."""
    if x.is_zero:
        return Fraction(0)
    return Fraction(x.p) ** (-x.valuation)
