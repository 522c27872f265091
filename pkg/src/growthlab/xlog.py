"""Log-domain scalars and iterated logarithms.

Magnitudes such as |c_n| for n in the thousands, or E_n(f), sit far outside
the float64 range, so everything is carried as (sign, ln|x|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LN2 = math.log(2.0)


class DomainError(ValueError):
    """An iterated logarithm was asked for outside its domain."""


def log_sum_exp(a: float, b: float) -> float:
    """Return ln(e^a + e^b) without overflow."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError(f"log_sum_exp needs finite arguments, got ({a!r}, {b!r})")
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


@dataclass(frozen=True)
class LogReal:
    """A real number stored as sign and natural log of its magnitude."""

    sign: int
    logmag: float = -math.inf

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign!r}")
        if self.sign == 0:
            object.__setattr__(self, "logmag", -math.inf)
        elif not math.isfinite(self.logmag):
            raise ValueError(f"nonzero LogReal needs a finite logmag, got {self.logmag!r}")

    @classmethod
    def zero(cls) -> LogReal:
        return cls(0)

    @classmethod
    def from_float(cls, x: float) -> LogReal:
        if x == 0:
            return cls(0)
        if not math.isfinite(x):
            raise ValueError(f"cannot represent {x!r}")
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def from_log(cls, logmag: float, sign: int = 1) -> LogReal:
        """Build from ln|x|; ``-inf`` gives zero."""
        if logmag == -math.inf:
            return cls(0)
        return cls(sign, logmag)

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.logmag)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def __neg__(self) -> LogReal:
        return LogReal(-self.sign, self.logmag)

    def __abs__(self) -> LogReal:
        return LogReal(abs(self.sign), self.logmag)

    def __mul__(self, other: LogReal) -> LogReal:
        if self.sign == 0 or other.sign == 0:
            return LogReal(0)
        return LogReal(self.sign * other.sign, self.logmag + other.logmag)

    def __truediv__(self, other: LogReal) -> LogReal:
        if other.sign == 0:
            raise ZeroDivisionError("LogReal division by zero")
        if self.sign == 0:
            return LogReal(0)
        return LogReal(self.sign * other.sign, self.logmag - other.logmag)

    def __pow__(self, k: float) -> LogReal:
        if self.sign == 0:
            if k > 0:
                return LogReal(0)
            raise ZeroDivisionError("zero to a nonpositive power")
        if self.sign < 0 and not float(k).is_integer():
            raise ValueError("negative base with non-integer exponent")
        sign = -1 if (self.sign < 0 and int(k) % 2) else 1
        return LogReal(sign, self.logmag * k)

    def __add__(self, other: LogReal) -> LogReal:
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        if self.sign == other.sign:
            return LogReal(self.sign, log_sum_exp(self.logmag, other.logmag))
        big, small = (self, other) if self.logmag >= other.logmag else (other, self)
        if big.logmag == small.logmag:
            return LogReal(0)
        return LogReal(big.sign, big.logmag + math.log1p(-math.exp(small.logmag - big.logmag)))

    def __sub__(self, other: LogReal) -> LogReal:
        return self + (-other)

    def _key(self):
        # total order: negatives by decreasing logmag, then zero, then positives
        if self.sign == 0:
            return (0, 0.0)
        return (self.sign, self.sign * self.logmag)

    def __eq__(self, other):
        if not isinstance(other, LogReal):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other: LogReal) -> bool:
        return self._key() < other._key()

    def __le__(self, other: LogReal) -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: LogReal) -> bool:
        return self._key() > other._key()

    def __ge__(self, other: LogReal) -> bool:
        return self._key() >= other._key()

    def __repr__(self):
        if self.sign == 0:
            return "LogReal(0)"
        return f"LogReal({'+' if self.sign > 0 else '-'}exp({self.logmag!r}))"


def iter_ln(q: int, x):
    """Apply ln q times; ``iter_ln(0, x) == x``.

    Works on floats and numpy arrays. Any intermediate value <= 0 raises
    DomainError instead of producing nan/-inf.
    """
    if q < 0:
        raise ValueError("q must be nonnegative")
    scalar = np.ndim(x) == 0
    y = np.asarray(x, dtype=float)
    for step in range(q):
        if np.any(~(y > 0)):
            raise DomainError(f"ln^({q}) undefined: value <= 0 after {step} logarithm(s)")
        y = np.log(y)
    return float(y) if scalar else y


def iter_exp(q: int, y: float) -> float:
    for _ in range(q):
        y = math.exp(y)
    return y


def iter_ln_min_arg(q: int, floor: float = 1.0) -> int:
    """Smallest integer n >= 2 with ln^(q-1)(n) >= floor.

    Raises OverflowError when that index does not fit in a machine integer
    (q >= 5 with floor 1).
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if floor <= 0:
        raise ValueError("floor must be positive")

    def ok(n: int) -> bool:
        try:
            return iter_ln(q - 1, float(n)) >= floor
        except DomainError:
            return False

    try:
        guess = iter_exp(q - 1, floor)
    except OverflowError:
        raise OverflowError(f"start index for q={q} exceeds float range") from None
    if guess > 2.0**62:
        raise OverflowError(f"start index for q={q} is about {guess:.3g}")
    n = max(2, math.ceil(guess) - 2)
    while n > 2 and ok(n - 1):
        n -= 1
    while not ok(n):
        n += 1
    return n
