"""Pointwise algebra of double forms over an oriented n-dimensional inner-product space.

A double form of bidegree ``(k, l)`` is stored as a sparse map from pairs of
strictly increasing 1-based index tuples ``(A, B)`` to coefficients, meaning
``sum c[A, B] theta^A (x) theta^B`` in a fixed orthonormal coframe. Because
wedges of the coframe are normalised by the determinant, ``c[A, B]`` is also the
value of the form on the basis vectors ``(e_A; e_B)``.

Each instance is either exact (``Fraction`` coefficients) or float. Mixing the
two in one operation raises :class:`ScalarModeError`.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import CostGuardError, DomainError, ScalarModeError

Index = tuple[int, ...]
Key = tuple[Index, Index]


def sort_sign(seq: Iterable[int]) -> tuple[int, Index]:
    """Sign of the permutation sorting ``seq`` and the sorted tuple; sign 0 on repeats."""
    seq = tuple(seq)
    if len(set(seq)) != len(seq):
        return 0, ()
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return (-1 if inv % 2 else 1), tuple(sorted(seq))


def merge_sign(a: Index, b: Index) -> int:
    """Sign of the shuffle taking sorted ``a + b`` (disjoint, each sorted) to sorted order."""
    inv = 0
    j = 0
    for x in a:
        while j < len(b) and b[j] < x:
            j += 1
        inv += j
    return -1 if inv % 2 else 1


def _coerce(value, exact: bool):
    if exact:
        if isinstance(value, float) or isinstance(value, np.floating):
            raise ScalarModeError("float value in an exact double form")
        return Fraction(value)
    return float(value)


def _check_index(idx: Index, n: int) -> None:
    for i in idx:
        if not 1 <= i <= n:
            raise DomainError(f"index {i} outside 1..{n}")


class DoubleForm:
    """Immutable sparse double form.

    ``coeffs`` may be keyed by unsorted tuples; they are sorted at insertion
    with the corresponding sign, repeated indices are dropped, duplicates are
    summed and zeros pruned.
    """

    __slots__ = ("dims", "bidegree", "exact", "_coeffs", "_hash")

    def __init__(self, dims: int, bidegree: tuple[int, int],
                 coeffs: Mapping[Key, object] | None = None, exact: bool = True):
        if dims < 1:
            raise DomainError("dims must be >= 1")
        k, l = bidegree
        if not (0 <= k and 0 <= l):
            raise DomainError(f"bad bidegree {bidegree}")
        self.dims = dims
        self.bidegree = (k, l)
        self.exact = exact
        store: dict[Key, object] = {}
        for (left, right), value in (coeffs or {}).items():
            left, right = tuple(left), tuple(right)
            if len(left) != k or len(right) != l:
                raise DomainError(f"key {(left, right)} does not match bidegree {bidegree}")
            _check_index(left, dims)
            _check_index(right, dims)
            s1, a = sort_sign(left)
            s2, b = sort_sign(right)
            if s1 == 0 or s2 == 0:
                continue
            v = _coerce(value, exact)
            store[(a, b)] = store.get((a, b), 0) + s1 * s2 * v
        self._coeffs = {key: v for key, v in store.items() if v != 0}
        self._hash = None

    # construction helpers --------------------------------------------------
    @classmethod
    def _raw(cls, dims, bidegree, coeffs, exact):
        obj = cls.__new__(cls)
        obj.dims = dims
        obj.bidegree = bidegree
        obj.exact = exact
        obj._coeffs = {key: v for key, v in coeffs.items() if v != 0}
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, dims: int, bidegree=(0, 0), exact: bool = True) -> "DoubleForm":
        return cls(dims, bidegree, {}, exact)

    @classmethod
    def scalar(cls, dims: int, value, exact: bool = True) -> "DoubleForm":
        return cls(dims, (0, 0), {((), ()): value}, exact)

    @classmethod
    def from_matrix(cls, M, exact: bool | None = None) -> "DoubleForm":
        """(1,1) form with ``c[{i},{j}] = M[i-1][j-1]``."""
        rows = [list(r) for r in M]
        n = len(rows)
        if exact is None:
            exact = not any(isinstance(x, (float, np.floating)) for r in rows for x in r)
        return cls(n, (1, 1), {((i + 1,), (j + 1,)): rows[i][j]
                                for i in range(n) for j in range(n)}, exact)

    @classmethod
    def from_tensor4(cls, T) -> "DoubleForm":
        """Float (2,2) form from a dense ``n^4`` array, antisymmetrised in each pair."""
        T = np.asarray(T, dtype=float)
        n = T.shape[0]
        coeffs = {}
        for i, j in itertools.combinations(range(n), 2):
            for k, l in itertools.combinations(range(n), 2):
                v = 0.25 * (T[i, j, k, l] - T[j, i, k, l] - T[i, j, l, k] + T[j, i, l, k])
                coeffs[((i + 1, j + 1), (k + 1, l + 1))] = v
        return cls(n, (2, 2), coeffs, exact=False)

    # mapping-like access ---------------------------------------------------
    @property
    def coeffs(self) -> dict[Key, object]:
        return dict(self._coeffs)

    def items(self):
        return self._coeffs.items()

    def __len__(self):
        return len(self._coeffs)

    def __getitem__(self, key: Key):
        return self._coeffs.get((tuple(key[0]), tuple(key[1])), self._zero())

    def _zero(self):
        return Fraction(0) if self.exact else 0.0

    def is_zero(self) -> bool:
        return not self._coeffs

    def evaluate(self, left: Iterable[int], right: Iterable[int]):
        """Value on basis vectors ``(e_left; e_right)`` for arbitrary index tuples."""
        s1, a = sort_sign(left)
        s2, b = sort_sign(right)
        if s1 == 0 or s2 == 0:
            return self._zero()
        return s1 * s2 * self._coeffs.get((a, b), self._zero())

    # comparisons -----------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, DoubleForm):
            return NotImplemented
        return (self.dims == other.dims and self.bidegree == other.bidegree
                and self._coeffs == other._coeffs)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dims, self.bidegree, self.exact,
                               frozenset(self._coeffs.items())))
        return self._hash

    def max_abs(self) -> float:
        return max((abs(float(v)) for v in self._coeffs.values()), default=0.0)

    def allclose(self, other: "DoubleForm", atol: float = 1e-12) -> bool:
        if self.dims != other.dims or self.bidegree != other.bidegree:
            return False
        return (self - other.to_mode(self.exact) if self.exact == other.exact
                else self.to_float() - other.to_float()).max_abs() <= atol

    def __repr__(self):
        mode = "exact" if self.exact else "float"
        return f"DoubleForm(n={self.dims}, bidegree={self.bidegree}, {mode}, {len(self)} terms)"

    # linear structure ------------------------------------------------------
    def _check_compatible(self, other: "DoubleForm", same_bidegree: bool = True):
        if not isinstance(other, DoubleForm):
            raise TypeError(f"expected DoubleForm, got {type(other).__name__}")
        if self.dims != other.dims:
            raise DomainError(f"dimension mismatch {self.dims} != {other.dims}")
        if self.exact != other.exact:
            raise ScalarModeError("cannot combine exact and float double forms")
        if same_bidegree and self.bidegree != other.bidegree:
            raise DomainError(f"bidegree mismatch {self.bidegree} != {other.bidegree}")

    def __add__(self, other: "DoubleForm") -> "DoubleForm":
        self._check_compatible(other)
        out = dict(self._coeffs)
        for key, v in other._coeffs.items():
            out[key] = out.get(key, 0) + v
        return DoubleForm._raw(self.dims, self.bidegree, out, self.exact)

    def __neg__(self):
        return DoubleForm._raw(self.dims, self.bidegree,
                               {k: -v for k, v in self._coeffs.items()}, self.exact)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c) -> "DoubleForm":
        if isinstance(c, DoubleForm):
            return owedge(self, c)
        c = _coerce(c, self.exact)
        return DoubleForm._raw(self.dims, self.bidegree,
                               {k: c * v for k, v in self._coeffs.items()}, self.exact)

    def __rmul__(self, c):
        return self.__mul__(c)

    def __truediv__(self, c):
        c = _coerce(c, self.exact)
        return self * (1 / c)

    def to_float(self) -> "DoubleForm":
        return DoubleForm._raw(self.dims, self.bidegree,
                               {k: float(v) for k, v in self._coeffs.items()}, False)

    def to_mode(self, exact: bool) -> "DoubleForm":
        if exact == self.exact:
            return self
        if exact:
            raise ScalarModeError("refusing to convert a float form to exact mode")
        return self.to_float()

    # algebra ---------------------------------------------------------------
    def owedge(self, other: "DoubleForm") -> "DoubleForm":
        return owedge(self, other)

    def transpose(self) -> "DoubleForm":
        return transpose(self)

    @property
    def T(self) -> "DoubleForm":
        return transpose(self)

    def contract(self, p: int) -> "DoubleForm":
        return contract(self, p)

    def full_contract(self):
        return full_contract(self)

    def power(self, j: int) -> "DoubleForm":
        return df_power(self, j)

    def is_symmetric(self, atol: float = 0.0) -> bool:
        if self.bidegree[0] != self.bidegree[1]:
            return False
        diff = self - transpose(self)
        return diff.max_abs() <= atol

    def restrict(self, n_sub: int) -> "DoubleForm":
        """Keep components whose indices all lie in ``1..n_sub``; result lives in ``n_sub`` dims."""
        keep = {(a, b): v for (a, b), v in self._coeffs.items()
                if all(i <= n_sub for i in a + b)}
        return DoubleForm._raw(n_sub, self.bidegree, keep, self.exact)

    def embed(self, dims: int, offset: int = 0) -> "DoubleForm":
        """Shift indices by ``offset`` into a larger ``dims``-dimensional space."""
        if self.dims + offset > dims:
            raise DomainError("embedding does not fit")
        shifted = {(tuple(i + offset for i in a), tuple(i + offset for i in b)): v
                   for (a, b), v in self._coeffs.items()}
        return DoubleForm._raw(dims, self.bidegree, shifted, self.exact)

    def to_matrix(self) -> np.ndarray:
        if self.bidegree != (1, 1):
            raise DomainError("to_matrix needs a (1,1) form")
        dtype = object if self.exact else float
        M = np.zeros((self.dims, self.dims), dtype=dtype)
        if self.exact:
            M[:] = Fraction(0)
        for ((i,), (j,)), v in self._coeffs.items():
            M[i - 1, j - 1] = v
        return M

    def to_tensor4(self) -> np.ndarray:
        """Dense float array ``T[i,j,k,l]`` of a (2,2) form (0-based)."""
        if self.bidegree != (2, 2):
            raise DomainError("to_tensor4 needs a (2,2) form")
        n = self.dims
        T = np.zeros((n, n, n, n))
        for ((i, j), (k, l)), v in self._coeffs.items():
            v = float(v)
            for (a, b, s1) in ((i, j, 1), (j, i, -1)):
                for (c, d, s2) in ((k, l, 1), (l, k, -1)):
                    T[a - 1, b - 1, c - 1, d - 1] = s1 * s2 * v
        return T

    # serialisation ---------------------------------------------------------
    def to_json(self) -> dict:
        entries = []
        for (a, b), v in sorted(self._coeffs.items()):
            value = (f"{v.numerator}/{v.denominator}" if self.exact else float(v))
            entries.append({"left": list(a), "right": list(b), "value": value})
        return {"dims": self.dims, "bidegree": list(self.bidegree),
                "mode": "exact" if self.exact else "float", "entries": entries}

    @classmethod
    def from_json(cls, obj: Mapping) -> "DoubleForm":
        exact = obj.get("mode", "exact") == "exact"
        coeffs = {}
        for e in obj["entries"]:
            v = Fraction(e["value"]) if exact else float(e["value"])
            coeffs[(tuple(e["left"]), tuple(e["right"]))] = v
        return cls(obj["dims"], tuple(obj["bidegree"]), coeffs, exact)


def make_metric_form(n: int, exact: bool = True) -> DoubleForm:
    """The metric ``g`` as the (1,1) form with coefficients ``delta_ij``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return DoubleForm(n, (1, 1), {((i,), (i,)): 1 for i in range(1, n + 1)}, exact)


def basis_form(n: int, left: Index, right: Index, value=1, exact: bool = True) -> DoubleForm:
    """``value * theta^left (x) theta^right`` (indices in any order)."""
    return DoubleForm(n, (len(left), len(right)), {(tuple(left), tuple(right)): value}, exact)


def owedge(psi1: DoubleForm, psi2: DoubleForm) -> DoubleForm:
    """Double wedge product; returns the zero form when a degree exceeds ``n``."""
    psi1._check_compatible(psi2, same_bidegree=False)
    n = psi1.dims
    k, l = psi1.bidegree
    p, q = psi2.bidegree
    bideg = (k + p, l + q)
    if k + p > n or l + q > n:
        return DoubleForm._raw(n, bideg, {}, psi1.exact)
    out: dict[Key, object] = {}
    for (a, b), v1 in psi1._coeffs.items():
        sa, sb = set(a), set(b)
        for (c, d), v2 in psi2._coeffs.items():
            if sa.intersection(c) or sb.intersection(d):
                continue
            sign = merge_sign(a, c) * merge_sign(b, d)
            key = (tuple(sorted(a + c)), tuple(sorted(b + d)))
            out[key] = out.get(key, 0) + sign * v1 * v2
    return DoubleForm._raw(n, bideg, out, psi1.exact)


def transpose(psi: DoubleForm) -> DoubleForm:
    k, l = psi.bidegree
    return DoubleForm._raw(psi.dims, (l, k), {(b, a): v for (a, b), v in psi._coeffs.items()},
                           psi.exact)


def contract(psi: DoubleForm, p: int) -> DoubleForm:
    """Contraction of order ``p``: trace over ``p`` appended pairs of basis vectors.

    For a stored term ``c theta^A (x) theta^B`` and each ``p``-subset ``S`` of
    ``A`` and ``B`` in common, the term contributes
    ``p! sgn(A\\S, S) sgn(B\\S, S) c`` to ``(A\\S, B\\S)``; this is the
    iterated trace written out on basis elements.
    """
    k, l = psi.bidegree
    if not 0 <= p <= min(k, l):
        raise DomainError(f"contraction order {p} outside [0, {min(k, l)}]")
    if p == 0:
        return psi
    pf = math.factorial(p)
    out: dict[Key, object] = {}
    for (a, b), v in psi._coeffs.items():
        common = sorted(set(a).intersection(b))
        if len(common) < p:
            continue
        for s in itertools.combinations(common, p):
            ra = tuple(i for i in a if i not in s)
            rb = tuple(i for i in b if i not in s)
            sign = merge_sign(ra, s) * merge_sign(rb, s)
            key = (ra, rb)
            out[key] = out.get(key, 0) + sign * pf * v
    return DoubleForm._raw(psi.dims, (k - p, l - p), out, psi.exact)


def full_contract(psi: DoubleForm):
    """Scalar ``C^p(psi)`` of a square-bidegree form."""
    k, l = psi.bidegree
    if k != l:
        raise DomainError(f"full contraction needs square bidegree, got {psi.bidegree}")
    # (A, A) terms are the only survivors; shortcut the general routine
    total = sum((v for (a, b), v in psi._coeffs.items() if a == b), psi._zero())
    return math.factorial(k) * total


def brute_force_contract(psi: DoubleForm):
    """Independent oracle for :func:`full_contract`: sum over all ``n^p`` index tuples."""
    k, l = psi.bidegree
    if k != l:
        raise DomainError(f"full contraction needs square bidegree, got {psi.bidegree}")
    if psi.dims > 6:
        raise CostGuardError("brute_force_contract is limited to n <= 6")
    total = psi._zero()
    for t in itertools.product(range(1, psi.dims + 1), repeat=k):
        total += psi.evaluate(t, t)
    return total


def df_power(psi: DoubleForm, j: int) -> DoubleForm:
    """``psi`` wedged with itself ``j`` times; ``psi^0`` is the scalar 1."""
    if j < 0:
        raise DomainError("power must be >= 0")
    out = DoubleForm.scalar(psi.dims, 1, psi.exact)
    for _ in range(j):
        out = owedge(out, psi)
        if out.is_zero():
            k, l = psi.bidegree
            return DoubleForm._raw(psi.dims, (j * k, j * l), {}, psi.exact)
    return out


def first_bianchi_residual(A: DoubleForm) -> float:
    """Largest ``|A(X,Y;U,V) + A(Y,U;X,V) + A(U,X;Y,V)|`` over basis 4-tuples."""
    if A.bidegree != (2, 2):
        raise DomainError("first Bianchi identity applies to (2,2) forms")
    n = A.dims
    worst = 0.0
    rng = range(1, n + 1)
    for x, y, u, v in itertools.product(rng, rng, rng, rng):
        s = A.evaluate((x, y), (u, v)) + A.evaluate((y, u), (x, v)) + A.evaluate((u, x), (y, v))
        worst = max(worst, abs(float(s)))
    return worst


# --- ordinary forms --------------------------------------------------------

class FormVector:
    """Sparse exterior form of degree ``k`` in the orthonormal coframe."""

    __slots__ = ("dims", "degree", "exact", "_coeffs")

    def __init__(self, dims: int, degree: int, coeffs: Mapping[Index, object] | None = None,
                 exact: bool = True):
        self.dims = dims
        self.degree = degree
        self.exact = exact
        store: dict[Index, object] = {}
        for idx, value in (coeffs or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise DomainError(f"index {idx} does not match degree {degree}")
            _check_index(idx, dims)
            s, a = sort_sign(idx)
            if s == 0:
                continue
            store[a] = store.get(a, 0) + s * _coerce(value, exact)
        self._coeffs = {a: v for a, v in store.items() if v != 0}

    @classmethod
    def covector(cls, X, exact: bool | None = None) -> "FormVector":
        """``X^flat`` of a coefficient vector in the orthonormal basis."""
        X = list(X)
        if exact is None:
            exact = not any(isinstance(x, (float, np.floating)) for x in X)
        return cls(len(X), 1, {(i + 1,): x for i, x in enumerate(X)}, exact)

    def items(self):
        return self._coeffs.items()

    def __getitem__(self, idx):
        return self._coeffs.get(tuple(idx), Fraction(0) if self.exact else 0.0)

    def __eq__(self, other):
        if not isinstance(other, FormVector):
            return NotImplemented
        return (self.dims, self.degree, self._coeffs) == (other.dims, other.degree, other._coeffs)

    def __repr__(self):
        return f"FormVector(n={self.dims}, degree={self.degree}, {dict(self._coeffs)})"

    def __add__(self, other):
        out = dict(self._coeffs)
        for a, v in other._coeffs.items():
            out[a] = out.get(a, 0) + v
        return FormVector(self.dims, self.degree, out, self.exact)

    def __mul__(self, c):
        return FormVector(self.dims, self.degree,
                          {a: c * v for a, v in self._coeffs.items()}, self.exact)

    __rmul__ = __mul__

    def wedge(self, other: "FormVector") -> "FormVector":
        if self.dims != other.dims:
            raise DomainError("dimension mismatch")
        if self.exact != other.exact:
            raise ScalarModeError("cannot combine exact and float forms")
        out: dict[Index, object] = {}
        for a, v1 in self._coeffs.items():
            for b, v2 in other._coeffs.items():
                if set(a).intersection(b):
                    continue
                key = tuple(sorted(a + b))
                out[key] = out.get(key, 0) + merge_sign(a, b) * v1 * v2
        return FormVector(self.dims, self.degree + other.degree, out, self.exact)

    def tensor(self, other: "FormVector") -> DoubleForm:
        """``self (x) other`` as a double form of bidegree ``(deg self, deg other)``."""
        if self.exact != other.exact:
            raise ScalarModeError("cannot combine exact and float forms")
        coeffs = {(a, b): v1 * v2 for a, v1 in self._coeffs.items()
                  for b, v2 in other._coeffs.items()}
        return DoubleForm(self.dims, (self.degree, other.degree), coeffs, self.exact)


def volume_form(n: int, exact: bool = True) -> FormVector:
    """``Theta = theta^1 ^ ... ^ theta^n``."""
    return FormVector(n, n, {tuple(range(1, n + 1)): 1}, exact)


def inner_product_forms(alpha: FormVector, beta: FormVector):
    """``<alpha, beta> = C^p(alpha (x) beta) / p!``."""
    if alpha.degree != beta.degree or alpha.dims != beta.dims:
        raise DomainError("inner product needs forms of equal degree and dimension")
    return full_contract(alpha.tensor(beta)) / math.factorial(alpha.degree)


def hodge_varpi(X, orientation: int = 1) -> FormVector:
    """``*(X^flat)``, the (n-1)-form with ``X^flat ^ varpi_X = |X|^2 Theta``."""
    X = list(X)
    n = len(X)
    if n < 1:
        raise DomainError("need n >= 1")
    if orientation not in (1, -1):
        raise DomainError("orientation must be +1 or -1")
    exact = not any(isinstance(x, (float, np.floating)) for x in X)
    coeffs = {}
    for i, x in enumerate(X, start=1):
        rest = tuple(j for j in range(1, n + 1) if j != i)
        coeffs[rest] = coeffs.get(rest, 0) + orientation * (-1) ** (i - 1) * x
    return FormVector(n, n - 1, coeffs, exact)
