"""Truncated p-adic integers: exact arithmetic in Z/p^N.

Residues are kept reduced to [0, p^N).  The valuation of zero is reported
as N, meaning "at least N at this precision"; consumers treat valuation N
as indistinguishable-from-zero.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PrecisionError


def is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def int_valuation(n: int, p: int) -> int:
    """Exponent of p in the integer n; raises on n = 0 (no finite answer)."""
    if n == 0:
        raise ValueError("valuation of integer 0 is unbounded")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PAdicInt:
    """An element of Z/p^N with its prime and precision attached."""

    residue: int
    prime: int
    precision: int

    def __post_init__(self):
        if not is_odd_prime(self.prime):
            raise ValueError(f"prime must be an odd prime, got {self.prime}")
        if self.precision < 1:
            raise ValueError(f"precision must be >= 1, got {self.precision}")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    @property
    def modulus(self) -> int:
        return self.prime ** self.precision

    def _check_compatible(self, other: "PAdicInt"):
        if (self.prime, self.precision) != (other.prime, other.precision):
            raise ValueError(
                f"mixed coefficient rings: Z/{self.prime}^{self.precision} "
                f"vs Z/{other.prime}^{other.precision}"
            )

    def __add__(self, other):
        other = self._coerce(other)
        return PAdicInt(self.residue + other.residue, self.prime, self.precision)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return PAdicInt(-self.residue, self.prime, self.precision)

    def __sub__(self, other):
        other = self._coerce(other)
        return PAdicInt(self.residue - other.residue, self.prime, self.precision)

    def __mul__(self, other):
        other = self._coerce(other)
        return PAdicInt(self.residue * other.residue, self.prime, self.precision)

    def __rmul__(self, other):
        return self.__mul__(other)

    def _coerce(self, other) -> "PAdicInt":
        if isinstance(other, PAdicInt):
            self._check_compatible(other)
            return other
        if isinstance(other, int):
            return PAdicInt(other, self.prime, self.precision)
        return NotImplemented

    def valuation(self) -> int:
        """Largest k <= N with p^k | residue; N for zero."""
        if self.residue == 0:
            return self.precision
        return min(int_valuation(self.residue, self.prime), self.precision)

    def is_unit(self) -> bool:
        return self.residue % self.prime != 0

    def is_zero(self) -> bool:
        return self.residue == 0

    def inverse(self) -> "PAdicInt":
        if not self.is_unit():
            raise ZeroDivisionError(f"{self.residue} is not a unit mod {self.modulus}")
        return PAdicInt(pow(self.residue, -1, self.modulus), self.prime, self.precision)

    def unit_part(self) -> "PAdicInt":
        """u with residue = u * p^valuation; unit for nonzero elements."""
        if self.residue == 0:
            return PAdicInt(1, self.prime, self.precision)
        return PAdicInt(self.residue // self.prime ** self.valuation(),
                        self.prime, self.precision)

    def __repr__(self):
        return f"PAdicInt({self.residue} mod {self.prime}^{self.precision})"


def padic_reduce(n: int, p: int, N: int) -> PAdicInt:
    """Canonical residue of a signed integer in Z/p^N; negatives wrap."""
    return PAdicInt(n, p, N)


def valuation(a: PAdicInt) -> int:
    return a.valuation()


def nu_max_for_window(p: int, min_degree: int, max_degree: int) -> int:
    """Largest nu(m) over integers m whose periodicity degrees (2p-2)m or
    (2p-2)m - 1 land in the window.  Drives the precision rule N >= nu_max + 2."""
    period = 2 * p - 2
    lo = min(min_degree, -max_degree)
    hi = max(max_degree, -min_degree)
    best = 0
    m = 1
    while period * m - 1 <= hi or -(period * m) - 1 >= lo or period * m <= hi:
        best = max(best, int_valuation(m, p))
        m += 1
    return best


def require_precision(p: int, N: int, min_degree: int, max_degree: int):
    """Enforce N >= nu_max + 2 so torsion orders never alias precision."""
    needed = nu_max_for_window(p, min_degree, max_degree) + 2
    if N < needed:
        raise PrecisionError(f"precision must be >= {needed} for this window")
