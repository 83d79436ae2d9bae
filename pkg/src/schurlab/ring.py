"""Exact Laurent-polynomial arithmetic over the integers.

Two closely related representations
-----------------------------------

``LaurentPoly``
    An element of Z[v, v^-1], stored as a dict {exponent: coefficient}
    with no zero coefficients.  This is the coefficient ring of every
    algebra in the package; coefficients are Python ints, so nothing
    ever overflows.

``QPoly``
    An ordinary polynomial in q with integer coefficients and
    nonnegative exponents.  Orbit counts over finite fields live here;
    the substitution q = v^2 turns a QPoly into a LaurentPoly.

The bar involution v -> v^-1, Gaussian binomials, quantum factorials
with exact division, and exact interpolation from point counts are all
provided here so that downstream modules never touch floating point.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .errors import ConsistencyFailure


class LaurentPoly:
    """Immutable integer Laurent polynomial in one variable v."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, int] | None = None):
        c = {}
        if coeffs:
            for e, a in coeffs.items():
                if a:
                    c[int(e)] = int(a)
        object.__setattr__(self, "_c", c)

    def __setattr__(self, *args):  # pragma: no cover
        raise AttributeError("LaurentPoly is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "LaurentPoly":
        return LaurentPoly()

    @staticmethod
    def one() -> "LaurentPoly":
        return LaurentPoly({0: 1})

    @staticmethod
    def from_int(n: int) -> "LaurentPoly":
        return LaurentPoly({0: n})

    @staticmethod
    def v_power(e: int, coeff: int = 1) -> "LaurentPoly":
        return LaurentPoly({e: coeff})

    # -- basic queries -------------------------------------------------

    @property
    def coeffs(self) -> dict[int, int]:
        return dict(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def is_one(self) -> bool:
        return self._c == {0: 1}

    def coeff(self, e: int) -> int:
        return self._c.get(e, 0)

    def min_exp(self) -> int:
        return min(self._c) if self._c else 0

    def max_exp(self) -> int:
        return max(self._c) if self._c else 0

    def is_positive(self) -> bool:
        """True iff every stored coefficient is nonnegative."""
        return all(a >= 0 for a in self._c.values())

    def is_bar_symmetric(self) -> bool:
        return self == self.bar()

    def only_negative_exponents(self) -> bool:
        """True iff supported on strictly negative powers of v (or zero)."""
        return all(e < 0 for e in self._c)

    # -- ring operations -----------------------------------------------

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        c = dict(self._c)
        for e, a in other._c.items():
            s = c.get(e, 0) + a
            if s:
                c[e] = s
            else:
                c.pop(e, None)
        return LaurentPoly(c)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -a for e, a in self._c.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly({e: a * other for e, a in self._c.items()})
        c: dict[int, int] = {}
        for e1, a1 in self._c.items():
            for e2, a2 in other._c.items():
                e = e1 + e2
                s = c.get(e, 0) + a1 * a2
                if s:
                    c[e] = s
                else:
                    c.pop(e, None)
        return LaurentPoly(c)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise ValueError("negative powers only for monomials; invert explicitly")
        out = LaurentPoly.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, e: int) -> "LaurentPoly":
        """Multiply by v^e."""
        return LaurentPoly({k + e: a for k, a in self._c.items()})

    def bar(self) -> "LaurentPoly":
        """The involution v -> v^-1."""
        return LaurentPoly({-e: a for e, a in self._c.items()})

    def negative_part(self) -> "LaurentPoly":
        """Restriction to strictly negative exponents."""
        return LaurentPoly({e: a for e, a in self._c.items() if e < 0})

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        """Exact division; raises ConsistencyFailure on nonzero remainder."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero Laurent polynomial")
        if self.is_zero():
            return LaurentPoly.zero()
        # Normalize both to ordinary polynomials with nonzero constant term.
        a = {e - self.min_exp(): c for e, c in self._c.items()}
        b = {e - other.min_exp(): c for e, c in other._c.items()}
        deg_a, deg_b = max(a), max(b)
        if deg_a < deg_b:
            raise ConsistencyFailure("exact division failed: degree too small")
        lead_b = b[deg_b]
        q: dict[int, int] = {}
        rem = dict(a)
        for e in range(deg_a - deg_b, -1, -1):
            top = rem.get(e + deg_b, 0)
            if top % lead_b:
                raise ConsistencyFailure("exact division failed: non-integral quotient")
            f = top // lead_b
            if f:
                q[e] = f
                for eb, cb in b.items():
                    k = e + eb
                    s = rem.get(k, 0) - f * cb
                    if s:
                        rem[k] = s
                    else:
                        rem.pop(k, None)
        if rem:
            raise ConsistencyFailure("exact division failed: nonzero remainder")
        off = self.min_exp() - other.min_exp()
        return LaurentPoly({e + off: c for e, c in q.items()})

    # -- evaluation / conversion ----------------------------------------

    def eval_fraction(self, x: Fraction) -> Fraction:
        out = Fraction(0)
        for e, a in self._c.items():
            out += a * (x ** e)
        return out

    def specialize_int(self, x: int) -> Fraction:
        return self.eval_fraction(Fraction(x))

    # -- hashing, comparison, display ------------------------------------

    def key(self) -> tuple:
        return tuple(sorted(self._c.items()))

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self._c == other._c

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for e in sorted(self._c):
            a = self._c[e]
            if e == 0:
                parts.append(f"{a}")
            else:
                mon = "v" if e == 1 else f"v^{e}"
                if a == 1:
                    parts.append(mon)
                elif a == -1:
                    parts.append(f"-{mon}")
                else:
                    parts.append(f"{a}*{mon}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    # -- JSON ------------------------------------------------------------

    def to_json(self) -> dict:
        return {"v": {str(e): str(a) for e, a in sorted(self._c.items())}}

    @staticmethod
    def from_json(obj: dict) -> "LaurentPoly":
        return LaurentPoly({int(e): int(a) for e, a in obj["v"].items()})


ZERO = LaurentPoly.zero()
ONE = LaurentPoly.one()


def quantum_integer(k: int) -> LaurentPoly:
    """[k] = (v^k - v^-k)/(v - v^-1) = v^(k-1) + v^(k-3) + ... + v^(1-k)."""
    if k < 0:
        return -quantum_integer(-k)
    return LaurentPoly({e: 1 for e in range(1 - k, k, 2)})


def quantum_factorial(m: int) -> LaurentPoly:
    out = ONE
    for k in range(2, m + 1):
        out = out * quantum_integer(k)
    return out


class QPoly:
    """Integer polynomial in q with nonnegative exponents (a counting polynomial)."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, int] | None = None):
        c = {}
        if coeffs:
            for e, a in coeffs.items():
                if a:
                    if e < 0:
                        raise ValueError("QPoly exponents must be nonnegative")
                    c[int(e)] = int(a)
        object.__setattr__(self, "_c", c)

    def __setattr__(self, *args):  # pragma: no cover
        raise AttributeError("QPoly is immutable")

    @staticmethod
    def zero() -> "QPoly":
        return QPoly()

    @staticmethod
    def one() -> "QPoly":
        return QPoly({0: 1})

    @staticmethod
    def from_int(n: int) -> "QPoly":
        return QPoly({0: n})

    @staticmethod
    def q_power(e: int, coeff: int = 1) -> "QPoly":
        return QPoly({e: coeff})

    @property
    def coeffs(self) -> dict[int, int]:
        return dict(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def degree(self) -> int:
        """Degree in q; -1 for the zero polynomial."""
        return max(self._c) if self._c else -1

    def __add__(self, other: "QPoly") -> "QPoly":
        c = dict(self._c)
        for e, a in other._c.items():
            s = c.get(e, 0) + a
            if s:
                c[e] = s
            else:
                c.pop(e, None)
        return QPoly(c)

    def __mul__(self, other):
        if isinstance(other, int):
            return QPoly({e: a * other for e, a in self._c.items()})
        c: dict[int, int] = {}
        for e1, a1 in self._c.items():
            for e2, a2 in other._c.items():
                e = e1 + e2
                s = c.get(e, 0) + a1 * a2
                if s:
                    c[e] = s
                else:
                    c.pop(e, None)
        return QPoly(c)

    __rmul__ = __mul__

    def eval_int(self, q: int) -> int:
        return sum(a * q ** e for e, a in self._c.items())

    def to_laurent(self) -> LaurentPoly:
        """Substitute q = v^2."""
        return LaurentPoly({2 * e: a for e, a in self._c.items()})

    def key(self) -> tuple:
        return tuple(sorted(self._c.items()))

    def __eq__(self, other) -> bool:
        return isinstance(other, QPoly) and self._c == other._c

    def __hash__(self) -> int:
        return hash(self.key())

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for e in sorted(self._c, reverse=True):
            a = self._c[e]
            if e == 0:
                parts.append(f"{a}")
            elif e == 1:
                parts.append(f"{a}*q" if a != 1 else "q")
            else:
                parts.append(f"{a}*q^{e}" if a != 1 else f"q^{e}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"QPoly({self})"


def qbinom(l: int, a: int) -> QPoly:
    """Gaussian binomial [l choose a]: the number of a-dim subspaces of F_q^l.

    Zero (by convention) unless 0 <= a <= l.  Computed by the q-Pascal
    recursion, which keeps everything in integer arithmetic.
    """
    if a < 0 or l < 0 or a > l:
        return QPoly.zero()
    # row-by-row DP over [m choose k] for m <= l
    row = [QPoly.one()]
    for m in range(1, l + 1):
        new = [QPoly.one()]
        for k in range(1, m):
            # [m,k] = [m-1,k-1] + q^k [m-1,k]
            left = row[k - 1]
            right = row[k] if k < len(row) else QPoly.zero()
            new.append(left + QPoly.q_power(k) * right)
        new.append(QPoly.one())
        row = new
    return row[a]


def interpolate(samples: Iterable[tuple[int, int]], degree_bound: int) -> QPoly:
    """Exact polynomial through integer point counts.

    Fits a polynomial of degree <= degree_bound through the first
    degree_bound + 1 samples and demands that every remaining sample
    (at least one is required as a reserve) matches exactly.  A
    mismatch means the degree bound was wrong or the data is not
    polynomial; both are reported as ConsistencyFailure.
    """
    pts = list(samples)
    if degree_bound < 0:
        raise ValueError("degree_bound must be >= 0")
    if len(pts) < degree_bound + 2:
        raise ConsistencyFailure(
            f"need at least {degree_bound + 2} samples (got {len(pts)}); "
            "one point is reserved as a consistency check"
        )
    if len({q for q, _ in pts}) != len(pts):
        raise ValueError("sample points must be distinct")
    base = pts[: degree_bound + 1]
    # Newton's divided differences over Fraction, then expand.
    xs = [Fraction(q) for q, _ in base]
    coeffs = [Fraction(vv) for _, vv in base]
    for level in range(1, len(base)):
        for i in range(len(base) - 1, level - 1, -1):
            coeffs[i] = (coeffs[i] - coeffs[i - 1]) / (xs[i] - xs[i - level])
    # expand Newton form into monomial coefficients
    poly = [Fraction(0)] * len(base)
    acc = [Fraction(1)]  # product (x - x_0)...(x - x_{k-1})
    for k, ck in enumerate(coeffs):
        for e, c in enumerate(acc):
            poly[e] += ck * c
        # acc *= (x - xs[k])
        nxt = [Fraction(0)] * (len(acc) + 1)
        for e, c in enumerate(acc):
            nxt[e + 1] += c
            nxt[e] -= xs[k] * c
        acc = nxt
    out = {}
    for e, c in enumerate(poly):
        if c:
            if c.denominator != 1:
                raise ConsistencyFailure(f"non-integer coefficient {c} at degree {e}")
            out[e] = int(c)
    result = QPoly(out)
    for q, vv in pts[degree_bound + 1:]:
        if result.eval_int(q) != vv:
            raise ConsistencyFailure(
                f"reserve sample mismatch at q={q}: poly gives "
                f"{result.eval_int(q)}, data says {vv}"
            )
    return result
