"""Small finite fields and exact linear algebra over them.

Everything the flag oracle needs: GF(q) for odd prime powers q (tables
for the non-prime cases), canonical row-reduced bases for subspaces,
sums, intersections, perps with respect to an explicit Gram matrix, and
exhaustive subspace/vector enumeration.  Dimensions stay below ten, so
plain Python lists are fast enough and keep everything exact.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator, Sequence

# Irreducible polynomials (coefficients of x^k, descending below the top
# monomial) used to build the non-prime fields we care about.
_IRREDUCIBLE = {
    9: (3, 2, (1, 0)),     # x^2 + 1 over F_3
    25: (5, 2, (1, 1)),    # x^2 + x + 1 over F_5
    27: (3, 3, (1, 2, 0)), # x^3 + 2x + 1 over F_3
    49: (7, 2, (3, 1)),    # x^2 + x + 3 over F_7
}

_SMALL_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_odd_prime_power(q: int) -> bool:
    return q in _SMALL_PRIMES or q in _IRREDUCIBLE


def odd_prime_powers() -> Iterator[int]:
    """Odd prime powers in increasing order (the oracle's sample points)."""
    for q in sorted(set(_SMALL_PRIMES) | set(_IRREDUCIBLE)):
        yield q


class GF:
    """Arithmetic in GF(q); elements are ints in range(q).

    For prime q the element IS the residue.  For prime powers the int
    encodes polynomial coefficients in base p and multiplication runs
    through precomputed tables.
    """

    def __init__(self, q: int):
        if not is_odd_prime_power(q):
            raise ValueError(f"unsupported field size {q}")
        self.q = q
        if q in _SMALL_PRIMES:
            self.p = q
            self._mul = None
            self._inv = [0] + [pow(a, q - 2, q) for a in range(1, q)]
        else:
            p, k, tail = _IRREDUCIBLE[q]
            self.p = p
            self._build_tables(p, k, tail)

    def _build_tables(self, p: int, k: int, tail: Sequence[int]):
        q = self.q

        def to_poly(e: int) -> list[int]:
            out = []
            for _ in range(k):
                out.append(e % p)
                e //= p
            return out  # coefficient of x^i at index i

        def from_poly(c: Sequence[int]) -> int:
            e = 0
            for a in reversed(c):
                e = e * p + a
            return e

        # x^k = -(tail), tail listed from x^(k-1) down to x^0
        red = [(-t) % p for t in reversed(tail)]  # coefficient of x^i at index i
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            pa = to_poly(a)
            for b in range(a, q):
                pb = to_poly(b)
                prod = [0] * (2 * k - 1)
                for i, ca in enumerate(pa):
                    if ca:
                        for j, cb in enumerate(pb):
                            prod[i + j] = (prod[i + j] + ca * cb) % p
                for i in range(2 * k - 2, k - 1, -1):
                    c = prod[i]
                    if c:
                        prod[i] = 0
                        for j, r in enumerate(red):
                            prod[i - k + j] = (prod[i - k + j] + c * r) % p
                v = from_poly(prod[:k])
                mul[a][b] = v
                mul[b][a] = v
        self._mul = mul
        inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a][b] == 1:
                    inv[a] = b
                    break
        self._inv = inv

    def add(self, a: int, b: int) -> int:
        if self._mul is None:
            return (a + b) % self.q
        p = self.p
        out, mult = 0, 1
        while a or b:
            out += ((a + b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def neg(self, a: int) -> int:
        if self._mul is None:
            return (-a) % self.q
        p = self.p
        out, mult = 0, 1
        while a:
            out += ((-a) % p) * mult
            a //= p
            mult *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self._mul is None:
            return (a * b) % self.q
        return self._mul[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._inv[a]

    def elements(self) -> range:
        return range(self.q)


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    return GF(q)


Vector = tuple[int, ...]
Subspace = tuple[Vector, ...]  # canonical RREF rows, no zero rows


def vec_add(gf: GF, u: Vector, v: Vector) -> Vector:
    return tuple(gf.add(a, b) for a, b in zip(u, v))


def vec_scale(gf: GF, c: int, u: Vector) -> Vector:
    return tuple(gf.mul(c, a) for a in u)


def rref(gf: GF, rows: Sequence[Vector]) -> Subspace:
    """Canonical reduced row echelon form; identical subspaces compare equal."""
    mat = [list(r) for r in rows]
    nrows = len(mat)
    if nrows == 0:
        return ()
    ncols = len(mat[0])
    pivot_row = 0
    pivots = []
    for col in range(ncols):
        sel = None
        for r in range(pivot_row, nrows):
            if mat[r][col]:
                sel = r
                break
        if sel is None:
            continue
        mat[pivot_row], mat[sel] = mat[sel], mat[pivot_row]
        inv = gf.inv(mat[pivot_row][col])
        mat[pivot_row] = [gf.mul(inv, a) for a in mat[pivot_row]]
        for r in range(nrows):
            if r != pivot_row and mat[r][col]:
                c = mat[r][col]
                mat[r] = [gf.sub(a, gf.mul(c, b))
                          for a, b in zip(mat[r], mat[pivot_row])]
        pivots.append(col)
        pivot_row += 1
        if pivot_row == nrows:
            break
    return tuple(tuple(r) for r in mat[:pivot_row])


def dim(space: Subspace) -> int:
    return len(space)


def span_sum(gf: GF, a: Subspace, b: Subspace) -> Subspace:
    return rref(gf, list(a) + list(b))


def intersect_dim(gf: GF, a: Subspace, b: Subspace) -> int:
    return len(a) + len(b) - len(span_sum(gf, a, b))


def contains(gf: GF, space: Subspace, v: Vector) -> bool:
    """Membership test by reduction against the RREF basis."""
    w = list(v)
    for row in space:
        piv = next(i for i, x in enumerate(row) if x)
        if w[piv]:
            c = w[piv]
            w = [gf.sub(a, gf.mul(c, b)) for a, b in zip(w, row)]
    return not any(w)

def contains_space(gf: GF, big: Subspace, small: Subspace) -> bool:
    return all(contains(gf, big, v) for v in small)


def nullspace(gf: GF, rows: Sequence[Vector], ncols: int) -> Subspace:
    """Right nullspace {x : M x^T = 0} of the matrix with the given rows."""
    mat = rref(gf, rows)
    pivots = []
    for row in mat:
        pivots.append(next(i for i, x in enumerate(row) if x))
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for r, row in enumerate(mat):
            # pivot variable = -sum(free coefficients)
            v[pivots[r]] = gf.neg(row[f])
        basis.append(tuple(v))
    return rref(gf, basis)


def intersection(gf: GF, a: Subspace, b: Subspace) -> Subspace:
    """Basis of the intersection via the kernel of [a^T | -b^T]."""
    if not a or not b:
        return ()
    ncols = len(a[0])
    k, m = len(a), len(b)
    rows = []
    for col in range(ncols):
        rows.append(tuple([a[r][col] for r in range(k)]
                          + [gf.neg(b[r][col]) for r in range(m)]))
    combos = nullspace(gf, rows, k + m)
    vecs = []
    for z in combos:
        v = [0] * ncols
        for r in range(k):
            if z[r]:
                v = [gf.add(x, gf.mul(z[r], y)) for x, y in zip(v, a[r])]
        vecs.append(tuple(v))
    return rref(gf, vecs)


def perp(gf: GF, space: Subspace, gram: Sequence[Vector], ambient: int) -> Subspace:
    """Orthogonal complement {x : (row) G x^T = 0 for all basis rows}."""
    if not space:
        return rref(gf, [tuple(1 if i == j else 0 for j in range(ambient))
                         for i in range(ambient)])
    rows = []
    for r in space:
        out = []
        for col in range(ambient):
            s = 0
            for i, ri in enumerate(r):
                if ri:
                    s = gf.add(s, gf.mul(ri, gram[i][col]))
            out.append(s)
        rows.append(tuple(out))
    return nullspace(gf, rows, ambient)


def form_value(gf: GF, gram: Sequence[Vector], u: Vector, v: Vector) -> int:
    s = 0
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                if b and gram[i][j]:
                    s = gf.add(s, gf.mul(gf.mul(a, b), gram[i][j]))
    return s


def is_isotropic(gf: GF, gram: Sequence[Vector], space: Subspace) -> bool:
    basis = list(space)
    for i, u in enumerate(basis):
        for v in basis[i:]:
            if form_value(gf, gram, u, v):
                return False
    return True


def all_vectors(gf: GF, space: Subspace) -> Iterator[Vector]:
    """All q^dim vectors of a subspace (including zero)."""
    if not space:
        yield ()
        return
    ncols = len(space[0])
    k = len(space)

    def rec(i: int, acc: Vector):
        if i == k:
            yield acc
            return
        for c in gf.elements():
            yield from rec(i + 1, vec_add(gf, acc, vec_scale(gf, c, space[i])))

    yield from rec(0, tuple([0] * ncols))


def superspaces(gf: GF, base: Subspace, target_dim: int, within: Subspace,
                gram: Sequence[Vector] | None = None) -> Iterator[Subspace]:
    """All subspaces of `within` of dimension target_dim containing `base`.

    With a Gram matrix, only totally isotropic results are produced
    (the base must itself be isotropic).
    """
    if len(base) > target_dim:
        return
    if len(base) == target_dim:
        yield base
        return

    def rec(current: Subspace):
        if len(current) == target_dim:
            yield current
            return
        seen = set()
        domain = within
        if gram is not None:
            ambient = len(within[0]) if within else 0
            domain = intersection(gf, within,
                                  perp(gf, current, gram, ambient))
        for v in all_vectors(gf, domain):
            if not any(v) or contains(gf, current, v):
                continue
            if gram is not None and form_value(gf, gram, v, v):
                continue
            nxt = rref(gf, list(current) + [v])
            if nxt in seen:
                continue
            seen.add(nxt)
            yield from rec(nxt)

    # deduplicate across recursion levels for multi-step extensions
    emitted = set()
    for s in rec(base):
        if s not in emitted:
            emitted.add(s)
            yield s


def standard_basis_space(gf: GF, ambient: int, coords: Sequence[int]) -> Subspace:
    """Coordinate subspace spanned by the given 0-based coordinates."""
    rows = []
    for c in coords:
        v = [0] * ambient
        v[c] = 1
        rows.append(tuple(v))
    return rref(gf, rows)


def anti_diagonal_gram(ambient: int) -> tuple[Vector, ...]:
    """Gram matrix of the form pairing coordinate i with coordinate D+1-i."""
    return tuple(tuple(1 if i + j == ambient - 1 else 0 for j in range(ambient))
                 for i in range(ambient))
