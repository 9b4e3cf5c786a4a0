"""Exact combinatorics: double factorials, sphere volumes, coefficient families, Pfaffians.

Every coefficient is a :class:`fractions.Fraction`. Powers of pi are carried
symbolically by :class:`PiRational`, so identities such as
``a(m,0) * (m-1)! * Vol(S^{m-1}) == (2 pi)^{m/2}`` are checked without floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

from .errors import CostGuardError, DomainError

Rational = Fraction
Number = Union[int, Fraction]


def double_factorial(n: int) -> int:
    """``n!!`` for ``n >= -1`` with ``(-1)!! = 0!! = 1``."""
    if n < -1:
        raise DomainError(f"double factorial undefined for n={n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


@dataclass(frozen=True)
class PiRational:
    """The real number ``coeff * pi**pi_power``.

    ``pi_power`` is a Fraction; only integers and (in :func:`tube_alpha`)
    half-integers occur. Zero is normalised to power 0.
    """

    coeff: Fraction
    pi_power: Fraction = Fraction(0)

    def __post_init__(self):
        coeff = Fraction(self.coeff)
        power = Fraction(self.pi_power)
        if power.denominator not in (1, 2):
            raise DomainError(f"pi power must be a half-integer, got {power}")
        if coeff == 0:
            power = Fraction(0)
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "pi_power", power)

    @classmethod
    def of(cls, x) -> "PiRational":
        return x if isinstance(x, PiRational) else cls(Fraction(x), 0)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PiRational.of(other)
        if not isinstance(other, PiRational):
            return NotImplemented
        return self.coeff == other.coeff and self.pi_power == other.pi_power

    def __hash__(self):
        if self.pi_power == 0:
            return hash(self.coeff)
        return hash((self.coeff, self.pi_power))

    @property
    def is_rational(self) -> bool:
        return self.pi_power == 0

    def __add__(self, other):
        if isinstance(other, float):
            return float(self) + other
        other = PiRational.of(other)
        if self.coeff == 0:
            return other
        if other.coeff == 0:
            return self
        if self.pi_power != other.pi_power:
            raise DomainError(
                f"cannot add pi^{self.pi_power} and pi^{other.pi_power} exactly"
            )
        return PiRational(self.coeff + other.coeff, self.pi_power)

    __radd__ = __add__

    def __neg__(self):
        return PiRational(-self.coeff, self.pi_power)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, float):
            return float(self) * other
        other = PiRational.of(other)
        return PiRational(self.coeff * other.coeff, self.pi_power + other.pi_power)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, float):
            return float(self) / other
        other = PiRational.of(other)
        if other.coeff == 0:
            raise ZeroDivisionError("division by zero PiRational")
        return PiRational(self.coeff / other.coeff, self.pi_power - other.pi_power)

    def __rtruediv__(self, other):
        if isinstance(other, float):
            return other / float(self)
        return PiRational.of(other) / self

    def __pow__(self, n: int):
        return PiRational(self.coeff**n, self.pi_power * n)

    def __float__(self):
        return float(self.coeff) * math.pi ** float(self.pi_power)

    def __str__(self):
        if self.pi_power == 0:
            return str(self.coeff)
        p = self.pi_power
        pstr = "pi" if p == 1 else f"pi^{p}"
        return f"{self.coeff}*{pstr}"


def sphere_volume(d: int) -> PiRational:
    """Volume of the unit sphere ``S^d`` in ``R^{d+1}``."""
    if d < 0:
        raise DomainError(f"sphere dimension must be >= 0, got {d}")
    if d % 2 == 1:
        half = (d + 1) // 2
        return PiRational(Fraction(2**half, double_factorial(d - 1)), half)
    half = d // 2
    return PiRational(Fraction(2 ** (half + 1), double_factorial(d - 1)), half)


def two_pi_power(m: int) -> PiRational:
    """``(2 pi)^{m/2}`` for even ``m``."""
    if m % 2:
        raise DomainError("(2 pi)^{m/2} is only exact for even m")
    return PiRational(Fraction(2 ** (m // 2)), m // 2)


def _check_mk(m: int, k: int) -> None:
    if m < 2 or m % 2:
        raise DomainError(f"m must be even and >= 2, got {m}")
    if not 0 <= k <= m // 2 - 1:
        raise DomainError(f"k={k} outside [0, {m // 2 - 1}] for m={m}")


def coeff_a_product(m: int, k: int) -> Fraction:
    """``a(m,k)`` as ``(1/m!!) prod_{j=k}^{m/2-1} (2j+2)/(m-2j-1)``."""
    _check_mk(m, k)
    out = Fraction(1, double_factorial(m))
    for j in range(k, m // 2):
        out *= Fraction(2 * j + 2, m - 2 * j - 1)
    return out


def coeff_a(m: int, k: int) -> Fraction:
    """Coefficient of the k-th boundary form in the primitive of the Pfaffian.

    Closed form ``1/((2k)!! (m-2k-1)!!)``; the product form is recomputed and
    compared on every call.
    """
    _check_mk(m, k)
    closed = Fraction(1, double_factorial(2 * k) * double_factorial(m - 2 * k - 1))
    if closed != coeff_a_product(m, k):
        raise ArithmeticError(f"a({m},{k}): closed form and product form disagree")
    return closed


def coeff_b(m: int, k: int) -> Fraction:
    """``b(m,k) = (m-2k-2)!!``, the weight of Q_k(R, h) in the boundary term."""
    _check_mk(m, k)
    return Fraction(double_factorial(m - 2 * k - 2))


def coeff_w(m: int, p: int, k: int) -> Fraction:
    """Change-of-basis weight expressing Q_p(R, h) through the Q_k(Rbar, h)."""
    if m < 2 or m % 2:
        raise DomainError(f"m must be even and >= 2, got {m}")
    if not 0 <= p <= m // 2 - 1 or k < 0:
        raise DomainError(f"(p, k)=({p}, {k}) out of range for m={m}")
    if k > p:
        return Fraction(0)
    return (
        Fraction(-1, 2) ** (p - k)
        * math.factorial(m - 1 - 2 * k)
        / (math.factorial(m - 1 - 2 * p) * math.factorial(p - k))
    )


def coeff_c_sum(m: int, k: int) -> Fraction:
    """``c(m,k)`` as ``sum_{p>=k} w(m,p,k) b(m,p)``."""
    _check_mk(m, k)
    return sum((coeff_w(m, p, k) * coeff_b(m, p) for p in range(k, m // 2)), Fraction(0))


def coeff_c(m: int, k: int) -> Fraction:
    """``c(m,k) = (-1)^{m/2-k-1} (m-2k-3)!!``, checked against :func:`coeff_c_sum`."""
    _check_mk(m, k)
    closed = Fraction((-1) ** (m // 2 - k - 1) * double_factorial(m - 2 * k - 3))
    if closed != coeff_c_sum(m, k):
        raise ArithmeticError(f"c({m},{k}): closed form and w-b sum disagree")
    return closed


def coeff_lambda(m: int, k: int, r: int) -> Fraction:
    if m < 2 or m % 2:
        raise DomainError(f"m must be even and >= 2, got {m}")
    top = m // 2 - 1
    if not (0 <= r <= top and -1 <= k <= top):
        raise DomainError(f"(k, r)=({k}, {r}) out of range for m={m}")
    if r > k:
        return Fraction(0)
    out = Fraction((-1) ** (k - r))
    for j in range(r, k + 1):
        out *= Fraction(2 * j + 2, m - 2 * j - 1)
    return out


def coeff_gamma(m: int, k: int) -> Fraction:
    """Boundary coefficient of a rotationally symmetric ball: ``(m-1)! c(m,k) / (2^k k! (m-1-2k)!)``."""
    _check_mk(m, k)
    return Fraction(
        math.factorial(m - 1) * coeff_c(m, k),
        2**k * math.factorial(k) * math.factorial(m - 1 - 2 * k),
    )


def coeff_gamma_alt(m: int, k: int) -> Fraction:
    """Second closed form for gamma as printed, with ``2^{m/2-k}`` in the denominator.

    Diagnostic only: it differs from :func:`coeff_gamma` by a factor ``2^{k-1}``.
    """
    _check_mk(m, k)
    return Fraction(
        (-1) ** (m // 2 - k - 1) * math.factorial(m - 1),
        2 ** (m // 2 - k) * math.factorial(k) * (m - 2 * k - 1) * math.factorial(m // 2 - k - 1),
    )


def gamma_discrepancies(m_max: int) -> list[dict]:
    """Every ``(m, k)`` where the two printed gamma forms differ."""
    out = []
    for m in range(2, m_max + 1, 2):
        for k in range(m // 2):
            first, second = coeff_gamma(m, k), coeff_gamma_alt(m, k)
            if first != second:
                out.append({"m": m, "k": k, "gamma": first, "gamma_alt": second,
                            "ratio": second / first})
    return out


def _gamma_fn_value(twice_s: int) -> PiRational:
    """Gamma(s) for ``s = twice_s / 2 > 0`` as an exact multiple of a pi power."""
    if twice_s <= 0:
        raise DomainError("Gamma argument must be positive")
    if twice_s % 2 == 0:
        return PiRational(Fraction(math.factorial(twice_s // 2 - 1)), 0)
    j = twice_s // 2  # s = j + 1/2
    return PiRational(Fraction(double_factorial(2 * j - 1), 2**j), Fraction(1, 2))


def tube_alpha(d: int, n: int, k: int) -> PiRational:
    """Weyl tube coefficient ``pi^{(d-n)/2} / (2^{k+1} Gamma((d-n)/2 + 1 + k))``."""
    if not 0 <= n < d:
        raise DomainError(f"need 0 <= n < d, got n={n}, d={d}")
    if not 0 <= k <= n // 2:
        raise DomainError(f"k={k} outside [0, {n // 2}]")
    num = PiRational(Fraction(1), Fraction(d - n, 2))
    return num / (PiRational(Fraction(2 ** (k + 1))) * _gamma_fn_value(d - n + 2 + 2 * k))


# --- Pfaffians -------------------------------------------------------------

def as_antisym(A) -> list[list]:
    """Validate an even antisymmetric matrix and return it as nested lists."""
    rows = [list(r) for r in A]
    m = len(rows)
    if any(len(r) != m for r in rows):
        raise DomainError("matrix must be square")
    if m % 2:
        raise DomainError(f"Pfaffian needs even size, got {m}")
    for i in range(m):
        if rows[i][i] != 0:
            raise DomainError("diagonal of an antisymmetric matrix must vanish")
        for j in range(i + 1, m):
            if rows[i][j] != -rows[j][i]:
                raise DomainError(f"entries ({i},{j}) and ({j},{i}) are not opposite")
    return rows


@dataclass(frozen=True)
class AntisymMatrix:
    entries: tuple

    def __post_init__(self):
        rows = as_antisym(self.entries)
        if len(rows) < 2:
            raise DomainError("antisymmetric matrix must have size >= 2")
        object.__setattr__(self, "entries", tuple(tuple(r) for r in rows))

    @property
    def size(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def permutation_sign(seq: Sequence[int]) -> int:
    """Signature of a permutation given as a sequence of distinct integers."""
    sign = 1
    seen = list(seq)
    for i in range(len(seen)):
        for j in range(i + 1, len(seen)):
            if seen[i] > seen[j]:
                sign = -sign
    return sign


PFAFFIAN_PERM_MAX = 10


def pfaffian_perm(A):
    """``(1/m!!) sum_{sigma in S_m} sgn(sigma) prod a_{sigma(2i-1) sigma(2i)}``.

    The sum runs over all of ``S_m``, organised as a tree of ordered pairs so
    that partial products are shared; it exists as an oracle, hence the guard.
    """
    a = as_antisym(A)
    m = len(a)
    if m > PFAFFIAN_PERM_MAX:
        raise CostGuardError(f"pfaffian_perm is limited to m <= {PFAFFIAN_PERM_MAX}")
    if m == 0:
        return 1

    def walk(remaining: list[int]):
        if not remaining:
            return 1
        total = 0
        n = len(remaining)
        for x in range(n):
            for y in range(n):
                if x == y:
                    continue
                i, j = remaining[x], remaining[y]
                entry = a[i][j]
                if entry == 0:
                    continue
                # parity of moving positions x, y of `remaining` to the front
                sign = (-1) ** (x + y - (1 if y > x else 0))
                rest = remaining[:min(x, y)] + remaining[min(x, y) + 1:max(x, y)] + remaining[max(x, y) + 1:]
                total += sign * entry * walk(rest)
        return total

    total = walk(list(range(m)))
    df = double_factorial(m)
    if isinstance(total, (int, Fraction)):
        return Fraction(total) / df
    return total / df


def pairings(m: int) -> Iterator[tuple[int, ...]]:
    """Enumerate the canonical representatives of perfect matchings of ``0..m-1``.

    Each yielded permutation ``s`` satisfies ``s[1] > s[0]`` and
    ``s[2i+1] > max(s[2i-1], s[2i])``: every pair ends with the largest element
    not yet used. There are ``(m-1)!!`` of them.
    """
    if m % 2:
        raise DomainError(f"pairings need even m, got {m}")

    def build(remaining: list[int]):
        if not remaining:
            yield ()
            return
        top = remaining[-1]
        for idx in range(len(remaining) - 1):
            partner = remaining[idx]
            rest = remaining[:idx] + remaining[idx + 1:-1]
            for head in build(rest):
                yield head + (partner, top)

    yield from build(list(range(m)))


def is_canonical_pairing(s: Sequence[int]) -> bool:
    """Membership test for the pairing set, usable as a filter over ``S_m``."""
    m = len(s)
    if m == 0:
        return True
    if s[1] <= s[0]:
        return False
    return all(s[2 * i + 1] > max(s[2 * i - 1], s[2 * i]) for i in range(1, m // 2))


def pfaffian_pairings(A):
    """Pfaffian as a signed sum over the ``(m-1)!!`` pair partitions.

    No size guard; the term count grows as ``(m-1)!!``.
    """
    a = as_antisym(A)
    m = len(a)
    total = 0
    for s in pairings(m):
        term = permutation_sign(s)
        for i in range(0, m, 2):
            term *= a[s[i]][s[i + 1]]
            if term == 0:
                break
        total += term
    return total


def det_exact(M) -> Fraction:
    """Exact determinant by fraction-valued Gaussian elimination."""
    rows = [[Fraction(x) for x in r] for r in M]
    n = len(rows)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        p = rows[col][col]
        det *= p
        for r in range(col + 1, n):
            f = rows[r][col] / p
            if f:
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return det
