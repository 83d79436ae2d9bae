"""The finite and affine q-Schur algebras over Z[v, v^-1].

Elements are finite Laurent-polynomial combinations of standard basis
symbols [A], one for each index matrix A (finite n x n, or periodic).
The standard basis is normalized by [A] = v^(-d_A) e_A against the
characteristic functions e_A of the underlying orbit counts, with d_A
the fiber statistic from :mod:`schurlab.matrices`.

Multiplication is exact.  A product by a *semisimple* basis element
(matrix = diagonal plus one full super- or sub-diagonal) is given by a
closed Gaussian-binomial formula; everything else is routed through the
monomial basis, whose factors are semisimple.  The same monomial basis
drives the bar involution (monomials are products of bar-fixed
generators, so they are themselves fixed) and hence the canonical
basis machinery in :mod:`schurlab.canonical`.

Finite-type elements also carry an exact rewriting into Chevalley
generator words (divided powers of E_i, F_i and weight idempotents).
Words are what make the coproduct and the transfer map computable at
sizes where counting points would be hopeless; the flag oracle
validates the word route wherever both are affordable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import (
    CompositionMismatch,
    MonomialUnavailable,
    NotInChevalleyImage,
    TriangularityFailure,
)
from .matrices import (
    Composition,
    IntMatrix,
    bruhat_leq,
    compositions,
    linear_extension,
    lower_order_ideal,
)
from .ring import ONE, ZERO, LaurentPoly, QPoly, qbinom, quantum_factorial


@dataclass(frozen=True)
class Ambient:
    n: int
    d: int
    affine: bool = False

    def __str__(self):
        kind = "affine" if self.affine else "finite"
        return f"{kind}(n={self.n}, d={self.d})"


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------

class Element:
    """A finite combination of standard basis symbols in one ambient algebra."""

    __slots__ = ("ambient", "terms")

    def __init__(self, ambient: Ambient, terms: dict[IntMatrix, LaurentPoly] | None = None):
        self.ambient = ambient
        self.terms = {}
        if terms:
            for m, c in terms.items():
                if not c.is_zero():
                    self.terms[m] = c

    def __eq__(self, other):
        return (isinstance(other, Element) and self.ambient == other.ambient
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.ambient, tuple(sorted(
            (m.sort_key(), c.key()) for m, c in self.terms.items()))))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Element") -> "Element":
        if self.ambient != other.ambient:
            raise CompositionMismatch("cannot add across ambients")
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, ZERO) + c
            if s.is_zero():
                out.pop(m, None)
            else:
                out[m] = s
        return Element(self.ambient, out)

    def __sub__(self, other: "Element") -> "Element":
        return self + other.scale(LaurentPoly.from_int(-1))

    def scale(self, c: LaurentPoly) -> "Element":
        return Element(self.ambient, {m: x * c for m, x in self.terms.items()})

    def coeff(self, m: IntMatrix) -> LaurentPoly:
        return self.terms.get(m, ZERO)

    def support(self) -> list[IntMatrix]:
        return sorted(self.terms, key=IntMatrix.sort_key)

    def map_coeffs(self, fn) -> "Element":
        return Element(self.ambient, {m: fn(c) for m, c in self.terms.items()})

    def bar_coeffs(self) -> "Element":
        return self.map_coeffs(LaurentPoly.bar)

    def to_ebasis(self) -> dict[IntMatrix, LaurentPoly]:
        """Coefficients against the unnormalized characteristic functions."""
        return {m: c.shift(-m.d_stat()) for m, c in self.terms.items()}

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for m in self.support():
            bits.append(f"({self.terms[m]})*[{m}]")
        return " + ".join(bits)

    __repr__ = __str__

    def to_json(self) -> dict:
        return {
            "basis": "standard",
            "ambient": {"n": self.ambient.n, "d": self.ambient.d,
                        "affine": self.ambient.affine},
            "terms": [{"matrix": m.to_json(), "coeff": self.terms[m].to_json()}
                      for m in self.support()],
        }

    @staticmethod
    def from_json(obj: dict) -> "Element":
        amb = Ambient(obj["ambient"]["n"], obj["ambient"]["d"],
                      obj["ambient"].get("affine", False))
        terms = {}
        for t in obj["terms"]:
            terms[IntMatrix.from_json(t["matrix"])] = LaurentPoly.from_json(t["coeff"])
        return Element(amb, terms)


def zero(ambient: Ambient) -> Element:
    return Element(ambient)


def basis_element(ambient: Ambient, m: IntMatrix,
                  coeff: LaurentPoly = ONE) -> Element:
    _check_matrix(ambient, m)
    return Element(ambient, {m: coeff})


def _check_matrix(ambient: Ambient, m: IntMatrix):
    if m.nrows != ambient.n or m.periodic != ambient.affine:
        raise CompositionMismatch(f"matrix {m} not valid for {ambient}")
    if m.total() != ambient.d:
        raise CompositionMismatch(f"matrix total {m.total()} != d={ambient.d}")


def weight_classes(ambient: Ambient) -> list[Composition]:
    return list(compositions(ambient.d, ambient.n))


def idempotent(ambient: Ambient, comp: Composition) -> Element:
    return basis_element(ambient,
                         IntMatrix.diagonal(comp, periodic=ambient.affine))


def unit(ambient: Ambient) -> Element:
    out = zero(ambient)
    for comp in weight_classes(ambient):
        out = out + idempotent(ambient, comp)
    return out


# ---------------------------------------------------------------------------
# Chevalley generators and semisimple basis elements
# ---------------------------------------------------------------------------

def _gen_indices(ambient: Ambient) -> range:
    return range(1, ambient.n + 1) if ambient.affine else range(1, ambient.n)


def generator_E(ambient: Ambient, i: int, m: int = 1) -> Element:
    """Sum of [A] over A = diagonal + m units at (i+1, i)."""
    if i not in _gen_indices(ambient):
        raise ValueError(f"index {i} invalid for {ambient}")
    out = {}
    for g in compositions(ambient.d - m, ambient.n):
        mat = IntMatrix.make(
            ambient.n,
            {(k + 1, k + 1): g[k] for k in range(ambient.n)} | {},
            periodic=ambient.affine)
        mat = mat.add_cells({(i + 1, i): m})
        out[mat] = ONE
    return Element(ambient, out)


def generator_F(ambient: Ambient, i: int, m: int = 1) -> Element:
    """Sum of [A] over A = diagonal + m units at (i, i+1)."""
    if i not in _gen_indices(ambient):
        raise ValueError(f"index {i} invalid for {ambient}")
    out = {}
    for g in compositions(ambient.d - m, ambient.n):
        mat = IntMatrix.make(
            ambient.n,
            {(k + 1, k + 1): g[k] for k in range(ambient.n)},
            periodic=ambient.affine)
        mat = mat.add_cells({(i, i + 1): m})
        out[mat] = ONE
    return Element(ambient, out)


def generator_H(ambient: Ambient, a: int, exp: int = 1) -> Element:
    """Diagonal element weighting each class by v^(exp * class_a)."""
    out = {}
    for comp in weight_classes(ambient):
        mat = IntMatrix.diagonal(comp, periodic=ambient.affine)
        out[mat] = LaurentPoly.v_power(exp * comp[(a - 1) % ambient.n])
    return Element(ambient, out)


def generator_K(ambient: Ambient, i: int, exp: int = 1) -> Element:
    """K_i = H_{i+1} H_i^{-1} as a single diagonal element."""
    out = {}
    n = ambient.n
    for comp in weight_classes(ambient):
        mat = IntMatrix.diagonal(comp, periodic=ambient.affine)
        w = comp[i % n] - comp[(i - 1) % n]
        out[mat] = LaurentPoly.v_power(exp * w)
    return Element(ambient, out)


def semisimple_kind(m: IntMatrix) -> str | None:
    """'upper' / 'lower' / None; diagonal counts as either (we say upper)."""
    def offset(i, j):
        if not m.periodic:
            return j - i
        return j - i  # base rows are normalized, offsets literal

    offs = {offset(i, j) for i, j, _ in m.entries}
    if offs <= {0}:
        return "upper"
    if offs <= {0, 1}:
        return "upper"
    if offs <= {0, -1}:
        return "lower"
    return None


# ---------------------------------------------------------------------------
# the closed multiplication formula for semisimple factors
# ---------------------------------------------------------------------------

def _upper_products(b: IntMatrix, a: IntMatrix) -> Iterator[tuple[IntMatrix, QPoly]]:
    """e_B * e_A for B = diagonal + superdiagonal(alpha): all (result, count)."""
    n = b.nrows
    alpha = [b.get(i, i + 1) for i in range(1, n + 1)]
    # T: rows 1..n, row k bounded by row k+1 of A (entry-wise), row sums alpha
    rows_choices: list[list[dict]] = []
    for k in range(1, n + 1):
        support = [(k + 1, j) for (i, j, _) in _row_cells(a, k + 1)]
        caps = [a.get(i, j) for (i, j) in support]
        choices = []
        for combo in _capped_compositions(alpha[k - 1], caps):
            choices.append({support[t][1]: combo[t]
                            for t in range(len(support)) if combo[t]})
        rows_choices.append(choices)
    for assignment in itertools.product(*rows_choices):
        tdict: dict[tuple[int, int], int] = {}
        for k, row in enumerate(assignment, start=1):
            for j, tv in row.items():
                tdict[(k, j)] = tv
        T = IntMatrix.make(n, tdict, periodic=a.periodic)
        delta: dict[tuple[int, int], int] = {}
        for (k, j), tv in tdict.items():
            delta[(k, j)] = delta.get((k, j), 0) + tv
            delta[(k + 1, j)] = delta.get((k + 1, j), 0) - tv
        try:
            result = a.add_cells(delta)
        except ValueError:
            continue
        coeff = _upper_coeff(result, T, n)
        if not coeff.is_zero():
            yield result, coeff


def _row_cells(m: IntMatrix, row: int) -> list[tuple[int, int, int]]:
    """Cells of a given row; periodic rows are folded into the base window."""
    if m.periodic:
        s = (row - 1) // m.nrows
        base = row - s * m.nrows
        return [(base + s * m.nrows, j + s * m.nrows, a)
                for i, j, a in m.entries if i == base]
    return [(i, j, a) for i, j, a in m.entries if i == row]


def _capped_compositions(total: int, caps: Sequence[int]) -> Iterator[tuple[int, ...]]:
    if not caps:
        if total == 0:
            yield ()
        return
    for first in range(min(total, caps[0]) + 1):
        for rest in _capped_compositions(total - first, caps[1:]):
            yield (first,) + rest


def _upper_coeff(result: IntMatrix, T: IntMatrix, n: int) -> QPoly:
    exp = 0
    binom = QPoly.one()
    tcells = {(i, j): tv for i, j, tv in T.entries}
    for (i, l), tl in tcells.items():
        for (i2, j, aij) in _row_cells(result, i):
            if j > l:
                exp += (aij - tcells.get((i, j), 0)) * tl
    for (i, j), tv in tcells.items():
        binom = binom * qbinom(result.get(i, j), tv)
        if binom.is_zero():
            return QPoly.zero()
    return QPoly.q_power(exp) * binom


def _lower_products(c: IntMatrix, a: IntMatrix) -> Iterator[tuple[IntMatrix, QPoly]]:
    """e_C * e_A for C = diagonal + subdiagonal(beta): all (result, count)."""
    n = c.nrows
    beta = [c.get(i + 1, i) for i in range(1, n + 1)]
    rows_choices: list[list[dict]] = []
    for k in range(1, n + 1):
        support = [(i, j) for (i, j, _) in _row_cells(a, k)]
        caps = [a.get(i, j) for (i, j) in support]
        choices = []
        for combo in _capped_compositions(beta[k - 1], caps):
            choices.append({support[t][1]: combo[t]
                            for t in range(len(support)) if combo[t]})
        rows_choices.append(choices)
    for assignment in itertools.product(*rows_choices):
        tdict: dict[tuple[int, int], int] = {}
        for k, row in enumerate(assignment, start=1):
            for j, tv in row.items():
                tdict[(k, j)] = tv
        T = IntMatrix.make(n, tdict, periodic=a.periodic)
        delta: dict[tuple[int, int], int] = {}
        for (k, j), tv in tdict.items():
            delta[(k, j)] = delta.get((k, j), 0) - tv
            delta[(k + 1, j)] = delta.get((k + 1, j), 0) + tv
        try:
            result = a.add_cells(delta)
        except ValueError:
            continue
        coeff = _lower_coeff(a, result, T, n)
        if not coeff.is_zero():
            yield result, coeff


def _lower_coeff(a: IntMatrix, result: IntMatrix, T: IntMatrix, n: int) -> QPoly:
    exp = 0
    binom = QPoly.one()
    tcells = {(i, j): tv for i, j, tv in T.entries}

    def tget(i, j):
        if T.periodic:
            return T.get(i, j)
        return tcells.get((i, j), 0)

    for i in range(1, n + 1):
        arow = _row_cells(a, i)
        # pairs (j, l) with j < l: (a_{ij} - t_{ij}) * t_{i-1, l}
        lvals = [(j, tget(i - 1, j)) for (_, j, _) in _row_cells(result, i)]
        lvals += [(j, tget(i - 1, j)) for (_, j, _) in arow
                  if all(j != jj for jj, _ in lvals)]
        for (_, j, aij) in arow:
            for (l, tl) in lvals:
                if j < l and tl:
                    exp += (aij - tget(i, j)) * tl
    for i, j, av in result.entries:
        tv = tget(i - 1, j)
        if tv:
            binom = binom * qbinom(av, tv)
            if binom.is_zero():
                return QPoly.zero()
    return QPoly.q_power(exp) * binom


def multiply_semisimple(b: IntMatrix, x: Element) -> Element:
    """Exact left product by a semisimple standard basis element [b]."""
    amb = x.ambient
    _check_matrix(amb, b)
    kind = semisimple_kind(b)
    if kind is None:
        raise ValueError(f"{b} is not semisimple")
    out = zero(amb)
    d_b = b.d_stat()
    cob = b.co()
    for a, coeff in x.terms.items():
        if a.ro() != cob:
            continue
        d_a = a.d_stat()
        gen = _upper_products(b, a) if kind == "upper" else _lower_products(b, a)
        acc: dict[IntMatrix, LaurentPoly] = {}
        for result, count in gen:
            lc = count.to_laurent().shift(result.d_stat() - d_b - d_a)
            prev = acc.get(result, ZERO) + lc
            if prev.is_zero():
                acc.pop(result, None)
            else:
                acc[result] = prev
        for result, lc in acc.items():
            out = out + Element(amb, {result: lc * coeff})
    return out


def multiply_semisimple_upper(b: IntMatrix, x: Element) -> Element:
    if semisimple_kind(b) != "upper":
        raise ValueError("matrix is not diagonal + superdiagonal")
    if not any(a.ro() == b.co() for a in x.terms):
        if x.terms:
            raise CompositionMismatch("column sums of b match no term of x")
    return multiply_semisimple(b, x)


def multiply_semisimple_lower(c: IntMatrix, x: Element) -> Element:
    if semisimple_kind(c) != "lower":
        raise ValueError("matrix is not diagonal + subdiagonal")
    if not any(a.ro() == c.co() for a in x.terms):
        if x.terms:
            raise CompositionMismatch("column sums of c match no term of x")
    return multiply_semisimple(c, x)


def multiply_element_semisimple(x: Element, y: Element) -> Element:
    """x * y where every matrix of x is semisimple or diagonal."""
    out = zero(y.ambient)
    for m, c in x.terms.items():
        out = out + multiply_semisimple(m, y).scale(c)
    return out


# ---------------------------------------------------------------------------
# monomial basis: peeling a matrix to its diagonal
# ---------------------------------------------------------------------------

def monomial_factors(a: IntMatrix) -> list[IntMatrix]:
    """Semisimple factors whose ordered product expands through [a].

    Upper mass is peeled first (every strictly-upper unit drops one
    row per step), then lower mass (every strictly-lower unit rises one
    row per step); each step emits the semisimple factor that undoes it.
    Diagonal matrices give the empty list.
    """
    n = a.nrows
    factors: list[IntMatrix] = []
    cur = a

    def norm_row(i: int) -> int:
        return ((i - 1) % n) + 1 if a.periodic else i

    def peel(kind: str, m: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
        cells = m.to_dict()
        moved: dict[int, int] = {}  # multiplicity vector of the emitted factor
        delta: dict[tuple[int, int], int] = {}
        for (i, j), val in cells.items():
            if kind == "upper" and j > i:
                # unit drops one row; the factor lifts it back: alpha_i += val
                moved[i] = moved.get(i, 0) + val
                delta[(i, j)] = delta.get((i, j), 0) - val
                delta[(i + 1, j)] = delta.get((i + 1, j), 0) + val
            if kind == "lower" and j < i:
                # unit rises one row; the factor pushes it back: beta_{i-1} += val
                k = norm_row(i - 1)
                moved[k] = moved.get(k, 0) + val
                delta[(i, j)] = delta.get((i, j), 0) - val
                delta[(i - 1, j)] = delta.get((i - 1, j), 0) + val
        nxt = m.add_cells(delta)
        fac_cells: dict[tuple[int, int], int] = {}
        ro_next = nxt.ro()
        for i in range(1, n + 1):
            mv = moved.get(i, 0)
            if kind == "upper":
                prev = moved.get(norm_row(i - 1), 0) if (a.periodic or i > 1) else 0
                diag = ro_next[i - 1] - prev
                if mv:
                    fac_cells[(i, i + 1)] = mv
            else:
                diag = ro_next[i - 1] - mv
                if mv:
                    fac_cells[(i + 1, i)] = mv
            if diag < 0:
                raise TriangularityFailure(f"negative diagonal while peeling {a}")
            if diag:
                fac_cells[(i, i)] = diag
        fac = IntMatrix.make(n, fac_cells, periodic=m.periodic)
        return fac, nxt

    while any(j > i for i, j, _ in cur.entries):
        fac, cur = peel("upper", cur)
        factors.append(fac)
    while any(j < i for i, j, _ in cur.entries):
        fac, cur = peel("lower", cur)
        factors.append(fac)
    return factors


class SchurContext:
    """Per-ambient caches: monomial expansions, word expansions, bar data."""

    _instances: dict[Ambient, "SchurContext"] = {}

    def __new__(cls, ambient: Ambient):
        if ambient not in cls._instances:
            obj = super().__new__(cls)
            obj.ambient = ambient
            obj._mono: dict[IntMatrix, Element] = {}
            obj._words: dict[IntMatrix, list] = {}
            cls._instances[ambient] = obj
        return cls._instances[ambient]

    # -- monomials -----------------------------------------------------

    def monomial_for(self, a: IntMatrix) -> list[IntMatrix]:
        _check_matrix(self.ambient, a)
        return monomial_factors(a)

    def monomial_expansion(self, a: IntMatrix) -> Element:
        """Expansion of the monomial through [a]; asserts unitriangularity."""
        if a in self._mono:
            return self._mono[a]
        _check_matrix(self.ambient, a)
        factors = monomial_factors(a)
        if not factors:
            exp = basis_element(self.ambient, a)
        else:
            exp = basis_element(self.ambient, factors[-1])
            for fac in reversed(factors[:-1]):
                exp = multiply_semisimple(fac, exp)
        lead = exp.coeff(a)
        if not lead.is_one():
            raise TriangularityFailure(
                f"monomial for {a} has leading coefficient {lead}")
        for m in exp.support():
            if m != a and not (bruhat_leq(m, a) and m != a):
                raise TriangularityFailure(
                    f"monomial for {a} contains incomparable term {m}")
        self._mono[a] = exp
        return exp

    def monomial_coordinates(self, x: Element) -> dict[IntMatrix, LaurentPoly]:
        """Solve x = sum c_A * monomial_A by triangular elimination."""
        coords: dict[IntMatrix, LaurentPoly] = {}
        residue = x
        while not residue.is_zero():
            support = linear_extension(residue.support())
            top = support[-1]
            c = residue.coeff(top)
            coords[top] = coords.get(top, ZERO) + c
            residue = residue - self.monomial_expansion(top).scale(c)
            if top in residue.terms:  # pragma: no cover
                raise TriangularityFailure("elimination failed to clear top term")
        return coords

    # -- multiplication -------------------------------------------------

    def multiply(self, x: Element, y: Element) -> Element:
        """Associative product via the monomial coordinates of x."""
        if x.ambient != self.ambient or y.ambient != self.ambient:
            raise CompositionMismatch("ambient mismatch in multiply")
        if all(semisimple_kind(m) is not None for m in x.terms):
            return multiply_element_semisimple(x, y)
        out = zero(self.ambient)
        for a, c in self.monomial_coordinates(x).items():
            factors = monomial_factors(a)
            acc = y
            if not factors:
                acc = multiply_semisimple(a, y)  # diagonal
            else:
                for fac in reversed(factors):
                    acc = multiply_semisimple(fac, acc)
            out = out + acc.scale(c)
        return out

    # -- bar involution ---------------------------------------------------

    def bar(self, x: Element) -> Element:
        """Semilinear involution fixing every monomial."""
        out = zero(self.ambient)
        for a, c in self.monomial_coordinates(x).items():
            out = out + self.monomial_expansion(a).scale(c.bar())
        return out

    def bar_matrix(self, slice_mats: Sequence[IntMatrix]
                   ) -> dict[tuple[IntMatrix, IntMatrix], LaurentPoly]:
        """Coefficients of bar([A]) on [A'] for A, A' in a closed slice."""
        out = {}
        for a in slice_mats:
            img = self.bar(basis_element(self.ambient, a))
            for ap, c in img.terms.items():
                out[(a, ap)] = c
        return out

    # -- generator words (finite type only) --------------------------------

    def word_for(self, a: IntMatrix) -> list[tuple]:
        """Chevalley word whose expansion is [a] + strictly lower terms."""
        if self.ambient.affine:
            raise NotInChevalleyImage(
                "standard basis elements are rewritten into words in finite "
                "type only")
        if a in self._words:
            return self._words[a]
        tokens: list[tuple] = []
        for fac in monomial_factors(a):
            kind = semisimple_kind(fac)
            n = fac.nrows
            if kind == "upper":
                for i in range(n - 1, 0, -1):
                    m = fac.get(i, i + 1)
                    if m:
                        tokens.append(("F", i, m))
            else:
                for i in range(1, n):
                    m = fac.get(i + 1, i)
                    if m:
                        tokens.append(("E", i, m))
        tokens.append(("idem", a.co()))
        expansion = self.expand_word(tokens)
        if not expansion.coeff(a).is_one():
            raise TriangularityFailure(
                f"word for {a} has leading coefficient {expansion.coeff(a)}")
        for m in expansion.support():
            if m != a and not bruhat_leq(m, a):
                raise TriangularityFailure(
                    f"word for {a} contains incomparable term {m}")
        self._words[a] = tokens
        return tokens

    def expand_word(self, tokens: Sequence[tuple]) -> Element:
        """Evaluate a generator word to an element (rightmost factor first)."""
        acc = unit(self.ambient)
        for tok in reversed(list(tokens)):
            acc = apply_token(self.ambient, tok, acc)
        return acc

    def word_coordinates(self, x: Element) -> list[tuple[LaurentPoly, list[tuple]]]:
        """x as a combination of generator words (finite type)."""
        out = []
        residue = x
        while not residue.is_zero():
            support = linear_extension(residue.support())
            top = support[-1]
            c = residue.coeff(top)
            w = self.word_for(top)
            out.append((c, w))
            residue = residue - self.expand_word(w).scale(c)
            if top in residue.terms:  # pragma: no cover
                raise TriangularityFailure("word elimination failed")
        return out


def apply_token(ambient: Ambient, tok: tuple, y: Element) -> Element:
    """Left-multiply y by one generator token."""
    kind = tok[0]
    if kind == "E":
        _, i, m = tok
        return multiply_element_semisimple(generator_E(ambient, i, m), y)
    if kind == "F":
        _, i, m = tok
        return multiply_element_semisimple(generator_F(ambient, i, m), y)
    if kind == "K":
        _, i, e = tok
        return multiply_element_semisimple(generator_K(ambient, i, e), y)
    if kind == "H":
        _, a, e = tok
        return multiply_element_semisimple(generator_H(ambient, a, e), y)
    if kind == "idem":
        _, comp = tok
        return multiply_element_semisimple(idempotent(ambient, tuple(comp)), y)
    raise ValueError(f"unknown token {tok}")


def token_element(ambient: Ambient, tok: tuple) -> Element:
    return apply_token(ambient, tok, unit(ambient))


# ---------------------------------------------------------------------------
# twists
# ---------------------------------------------------------------------------

def xi_twist(x: Element, i: int, c: int) -> Element:
    """Rescale each standard symbol by v^(c * eps_i); an algebra isomorphism."""
    return Element(x.ambient, {
        m: coeff * LaurentPoly.v_power(c * m.epsilon_stat(i))
        for m, coeff in x.terms.items()})


def epsilon_sum_twist(x: Element, c: int) -> Element:
    """Product of all xi twists: v^(c * sum_i eps_i) on each symbol."""
    n = x.ambient.n
    out = x
    for i in range(1, n + 1):
        out = xi_twist(out, i, c)
    return out


# ---------------------------------------------------------------------------
# tensor elements and the coproduct (finite via words; affine via words)
# ---------------------------------------------------------------------------

class TensorElement:
    """Element of a two-factor tensor product of ambient algebras."""

    __slots__ = ("left", "right", "terms")

    def __init__(self, left: Ambient, right: Ambient,
                 terms: dict[tuple[IntMatrix, IntMatrix], LaurentPoly] | None = None):
        self.left = left
        self.right = right
        self.terms = {}
        if terms:
            for k, c in terms.items():
                if not c.is_zero():
                    self.terms[k] = c

    def __eq__(self, other):
        return (isinstance(other, TensorElement) and self.left == other.left
                and self.right == other.right and self.terms == other.terms)

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, ZERO) + c
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return TensorElement(self.left, self.right, out)

    def __sub__(self, other):
        return self + other.scale(LaurentPoly.from_int(-1))

    def scale(self, c: LaurentPoly) -> "TensorElement":
        return TensorElement(self.left, self.right,
                             {k: x * c for k, x in self.terms.items()})

    def support(self):
        return sorted(self.terms, key=lambda k: (k[0].sort_key(), k[1].sort_key()))

    def block(self, ro1, co1, ro2, co2) -> "TensorElement":
        """Restriction to one (row, column) block of each factor."""
        return TensorElement(self.left, self.right, {
            (m1, m2): c for (m1, m2), c in self.terms.items()
            if m1.ro() == ro1 and m1.co() == co1
            and m2.ro() == ro2 and m2.co() == co2})

    def exact_div(self, q: LaurentPoly) -> "TensorElement":
        return TensorElement(self.left, self.right,
                             {k: c.exact_div(q) for k, c in self.terms.items()})

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({self.terms[k]})*[{k[0]}]x[{k[1]}]"
                          for k in self.support())

    __repr__ = __str__


def tensor_unit_expansion(left: Ambient, right: Ambient) -> TensorElement:
    terms = {}
    for c1 in weight_classes(left):
        for c2 in weight_classes(right):
            m1 = IntMatrix.diagonal(c1, periodic=left.affine)
            m2 = IntMatrix.diagonal(c2, periodic=right.affine)
            terms[(m1, m2)] = ONE
    return TensorElement(left, right, terms)


def tensor_apply(pairs: Sequence[tuple[Element, Element]],
                 t: TensorElement) -> TensorElement:
    """Left-multiply a tensor element by sum_k x_k (x) y_k."""
    ctx_l = SchurContext(t.left)
    ctx_r = SchurContext(t.right)
    out = TensorElement(t.left, t.right)
    for (m1, m2), c in t.terms.items():
        b1 = basis_element(t.left, m1)
        b2 = basis_element(t.right, m2)
        for xl, xr in pairs:
            u = ctx_l.multiply(xl, b1)
            w = ctx_r.multiply(xr, b2)
            for mu, cu in u.terms.items():
                for mw, cw in w.terms.items():
                    key = (mu, mw)
                    s = out.terms.get(key, ZERO) + c * cu * cw
                    if s.is_zero():
                        out.terms.pop(key, None)
                    else:
                        out.terms[key] = s
    return out


def _coproduct_pairs_finite(ambient: Ambient, left: Ambient, right: Ambient,
                            tok: tuple) -> list[tuple[Element, Element]]:
    kind = tok[0]
    if kind == "E":
        _, i, _ = tok
        return [(generator_E(left, i), generator_K(right, i)),
                (unit(left), generator_E(right, i))]
    if kind == "F":
        _, i, _ = tok
        return [(generator_F(left, i), unit(right)),
                (generator_K(left, i, -1), generator_F(right, i))]
    if kind == "K":
        _, i, e = tok
        return [(generator_K(left, i, e), generator_K(right, i, e))]
    if kind == "H":
        _, a, e = tok
        return [(generator_H(left, a, e), generator_H(right, a, e))]
    raise ValueError(f"no coproduct rule for token {tok}")


def _apply_coproduct_token(ambient, left, right, tok, acc,
                           pairs_fn) -> TensorElement:
    kind = tok[0]
    if kind == "idem":
        _, comp = tok
        comp = tuple(comp)
        out = TensorElement(left, right)
        for (m1, m2), c in acc.terms.items():
            r1, r2 = m1.ro(), m2.ro()
            total = tuple(a + b for a, b in zip(r1, r2))
            if total == comp:
                out.terms[(m1, m2)] = c
        return out
    mult = tok[2] if kind in ("E", "F") else None
    if kind in ("E", "F") and mult and mult > 1:
        base = (kind, tok[1], 1)
        out = acc
        for _ in range(mult):
            out = tensor_apply(pairs_fn((base[0], base[1], 1)), out)
        return out.exact_div(quantum_factorial(mult))
    return tensor_apply(pairs_fn(tok), acc)


def comult_finite_word(ambient: Ambient, tokens: Sequence[tuple],
                       d1: int, d2: int) -> TensorElement:
    """Twisted coproduct of a generator word into size (d1, d2) factors."""
    if ambient.affine:
        raise ValueError("finite coproduct on a finite ambient only")
    if d1 + d2 != ambient.d:
        raise CompositionMismatch("split must sum to d")
    left = Ambient(ambient.n, d1, False)
    right = Ambient(ambient.n, d2, False)
    acc = tensor_unit_expansion(left, right)
    for tok in reversed(list(tokens)):
        acc = _apply_coproduct_token(
            ambient, left, right, tok, acc,
            lambda t: _coproduct_pairs_finite(ambient, left, right, t))
    return acc


def comult_finite(x: Element, d1: int, d2: int) -> TensorElement:
    """Twisted coproduct of a finite-type element via its word expression."""
    ctx = SchurContext(x.ambient)
    out = TensorElement(Ambient(x.ambient.n, d1, False),
                        Ambient(x.ambient.n, d2, False))
    for c, w in ctx.word_coordinates(x):
        out = out + comult_finite_word(x.ambient, w, d1, d2).scale(c)
    return out


def _coproduct_pairs_affine_dagger(left: Ambient, right: Ambient, n: int,
                                   tok: tuple) -> list[tuple[Element, Element]]:
    d1, d2 = left.d, right.d
    kind = tok[0]
    if kind == "E":
        _, i, _ = tok
        twist1 = LaurentPoly.v_power(d2) if i == n else ONE
        twist2 = LaurentPoly.v_power(-d1) if i == n else ONE
        return [(generator_E(left, i).scale(twist1), generator_K(right, i)),
                (unit(left), generator_E(right, i).scale(twist2))]
    if kind == "F":
        _, i, _ = tok
        twist1 = LaurentPoly.v_power(-d2) if i == n else ONE
        twist2 = LaurentPoly.v_power(d1) if i == n else ONE
        return [(generator_F(left, i).scale(twist1), unit(right)),
                (generator_K(left, i, -1), generator_F(right, i).scale(twist2))]
    if kind == "K":
        _, i, e = tok
        return [(generator_K(left, i, e), generator_K(right, i, e))]
    if kind == "H":
        _, a, e = tok
        return [(generator_H(left, a, e), generator_H(right, a, e))]
    raise ValueError(f"no coproduct rule for token {tok}")


def comult_affine_word(ambient: Ambient, tokens: Sequence[tuple],
                       d1: int, d2: int, dagger: bool = False) -> TensorElement:
    """Affine coproduct of a generator word.

    With dagger=True the raw block twist is used; otherwise the result
    is corrected by the epsilon twists at the boundary index so the
    generator images take the standard Hopf form.
    """
    if not ambient.affine:
        raise ValueError("affine coproduct on an affine ambient only")
    if d1 + d2 != ambient.d:
        raise CompositionMismatch("split must sum to d")
    n = ambient.n
    left = Ambient(n, d1, True)
    right = Ambient(n, d2, True)
    acc = tensor_unit_expansion(left, right)
    for tok in reversed(list(tokens)):
        acc = _apply_coproduct_token(
            ambient, left, right, tok, acc,
            lambda t: _coproduct_pairs_affine_dagger(left, right, n, t))
    if dagger:
        return acc
    out = TensorElement(left, right)
    for (m1, m2), c in acc.terms.items():
        tw = LaurentPoly.v_power(d2 * m1.epsilon_stat(n) - d1 * m2.epsilon_stat(n))
        out.terms[(m1, m2)] = c * tw
    return out


def comult_affine(x_word: Sequence[tuple], ambient: Ambient,
                  d1: int, d2: int, dagger: bool = False) -> TensorElement:
    if not ambient.affine:
        raise NotInChevalleyImage("affine coproduct needs an affine ambient")
    return comult_affine_word(ambient, x_word, d1, d2, dagger=dagger)


# ---------------------------------------------------------------------------
# the determinant character and the finite transfer map
# ---------------------------------------------------------------------------

def _det(m: IntMatrix) -> int:
    n = m.nrows
    rows = [[m.get(i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]
    # fraction-free Gaussian elimination (Bareiss)
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if rows[r][k]), None)
            if swap is None:
                return 0
            rows[k], rows[swap] = rows[swap], rows[k]
            prev_sign = -1
            rows[k] = [x * prev_sign for x in rows[k]]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                rows[i][j] = (rows[i][j] * rows[k][k] - rows[i][k] * rows[k][j]) // prev
            rows[i][k] = 0
        prev = rows[k][k]
    return rows[n - 1][n - 1]


def chi_character(x: Element) -> LaurentPoly:
    """The determinant character on the d = n finite algebra."""
    amb = x.ambient
    if amb.affine or amb.d != amb.n:
        raise ValueError("character defined on the d = n finite algebra")
    out = ZERO
    for m, c in x.terms.items():
        det = _det(m)
        if det:
            out = out + c * LaurentPoly.v_power(-m.d_stat(), det)
    return out


def transfer_finite_word(ambient: Ambient, tokens: Sequence[tuple]
                         ) -> tuple[Ambient, list[tuple], LaurentPoly]:
    """Relabel a word from size d to size d - n; returns (ambient', word', scale).

    Generator labels are preserved; weight idempotents drop by one in
    every coordinate (words whose weights cannot drop die to zero and
    are signalled by a None word); each H token contributes one power
    of v through the character of the unit-size factor.
    """
    n, d = ambient.n, ambient.d
    if d < n:
        raise CompositionMismatch("transfer needs d >= n")
    target = Ambient(n, d - n, False)
    scale = ONE
    out: list[tuple] = []
    for tok in tokens:
        if tok[0] == "idem":
            comp = tuple(c - 1 for c in tok[1])
            if any(c < 0 for c in comp):
                return target, None, ZERO
            out.append(("idem", comp))
        elif tok[0] == "H":
            scale = scale * LaurentPoly.v_power(tok[2])
            out.append(tok)
        else:
            out.append(tok)
    return target, out, scale


def transfer_finite(x: Element) -> Element:
    """Algebra homomorphism from size d to size d - n (finite type)."""
    ctx = SchurContext(x.ambient)
    target = Ambient(x.ambient.n, x.ambient.d - x.ambient.n, False)
    tctx = SchurContext(target)
    out = zero(target)
    for c, w in ctx.word_coordinates(x):
        _, w2, scale = transfer_finite_word(x.ambient, w)
        if w2 is None:
            continue
        out = out + tctx.expand_word(w2).scale(c * scale)
    return out


def transfer_finite_via_counting(x: Element, q_list: Sequence[int]) -> Element:
    """Independent route: coproduct by counting, then pair with the character."""
    from .flag_oracle import comult_count
    from .ring import interpolate

    amb = x.ambient
    n = amb.n
    d1 = amb.d - n
    target = Ambient(n, d1, False)
    out = zero(target)
    for m, coeff in x.terms.items():
        table: dict[tuple[IntMatrix, IntMatrix], QPoly] = {}
        sampled = [comult_count(m, d1, n, q) for q in q_list]
        keys = set().union(*[set(t) for t in sampled])
        for key in keys:
            samples = [(q, t.get(key, 0)) for q, t in zip(q_list, sampled)]
            table[key] = interpolate(samples, len(q_list) - 2)
        for (b1, b2), poly in table.items():
            # twist to the Hopf normalization, then apply the character
            tw = _block_twist_exponent(b1, b2)
            c2 = poly.to_laurent().shift(tw + b1.d_stat() + b2.d_stat())
            ch = chi_character(basis_element(Ambient(n, n, False), b2))
            if ch.is_zero():
                continue
            piece = c2 * ch * coeff * LaurentPoly.v_power(-m.d_stat())
            out = out + basis_element(target, b1).scale(piece)
    return out


def _block_twist_exponent(b1: IntMatrix, b2: IntMatrix) -> int:
    n = b1.nrows
    bp, bpp = b1.ro(), b2.ro()
    ap, app = b1.co(), b2.co()
    s = 0
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            s += bp[i - 1] * bpp[j - 1] - ap[i - 1] * app[j - 1]
    return s
