"""Matrix index sets, compositions, numerical statistics and partial orders.

Every basis in the package is indexed by a matrix with nonnegative
integer entries:

* square n x n matrices with total d index the finite algebra;
* Z x Z matrices with period n (stored by their base rows [1, n]) and
  total d per period index the affine algebra;
* symmetric matrices (a_{ij} = a_{n+1-i, n+1-j}) index the type-B
  (coideal) algebra, with the further center-row/column truncation for
  its even-rank variant;
* n x d column matrices over {0, 1} with column sums 1 index tensor
  (flag-module) slices.

A single immutable class ``IntMatrix`` covers all of these; the
``periodic`` flag switches row/column sums and the statistics between
the window and the periodic interpretations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import NonInteger

Composition = tuple[int, ...]


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


@dataclass(frozen=True)
class IntMatrix:
    """Nonnegative integer matrix; periodic matrices store one period of rows.

    Rows are indexed 1..nrows.  For finite matrices columns are
    1..ncols; for periodic matrices ncols == nrows == the period n and
    column indices of the stored entries range over all of Z (entry
    (i, j) represents the full family (i + sn, j + sn)).
    """

    nrows: int
    ncols: int
    periodic: bool
    entries: tuple[tuple[int, int, int], ...]  # sorted (row, col, value), value > 0

    # -- construction ---------------------------------------------------

    @staticmethod
    def make(nrows: int, entries: dict | Iterable, periodic: bool = False,
             ncols: int | None = None) -> "IntMatrix":
        if ncols is None:
            ncols = nrows
        if periodic and ncols != nrows:
            raise ValueError("periodic matrices are square by convention")
        if isinstance(entries, dict):
            items = entries.items()
        else:
            items = [((i, j), a) for (i, j, a) in entries]
        cells: dict[tuple[int, int], int] = {}
        for (i, j), a in items:
            if a < 0:
                raise ValueError("entries must be nonnegative")
            if not a:
                continue
            if periodic:
                # normalize the row into [1, nrows], shifting the column along
                s = (i - 1) // nrows
                i, j = i - s * nrows, j - s * nrows
            else:
                if not (1 <= i <= nrows and 1 <= j <= ncols):
                    raise ValueError(f"cell ({i},{j}) outside {nrows}x{ncols} window")
            cells[(i, j)] = cells.get((i, j), 0) + a
        ent = tuple(sorted((i, j, a) for (i, j), a in cells.items() if a))
        return IntMatrix(nrows, ncols, periodic, ent)

    @staticmethod
    def diagonal(diag: Sequence[int], periodic: bool = False) -> "IntMatrix":
        n = len(diag)
        return IntMatrix.make(n, {(i + 1, i + 1): a for i, a in enumerate(diag)},
                              periodic=periodic)

    def to_dict(self) -> dict[tuple[int, int], int]:
        return {(i, j): a for i, j, a in self.entries}

    # -- basic queries ---------------------------------------------------

    def get(self, i: int, j: int) -> int:
        if self.periodic:
            s = (i - 1) // self.nrows
            i, j = i - s * self.nrows, j - s * self.nrows
        for r, c, a in self.entries:
            if r == i and c == j:
                return a
        return 0

    def total(self) -> int:
        """Sum of all entries (one period of rows in the periodic case)."""
        return sum(a for _, _, a in self.entries)

    def ro(self) -> Composition:
        out = [0] * self.nrows
        for i, _, a in self.entries:
            out[i - 1] += a
        return tuple(out)

    def co(self) -> Composition:
        out = [0] * self.ncols
        for _, j, a in self.entries:
            out[(j - 1) % self.ncols] += a
        return tuple(out)

    def is_diagonal(self) -> bool:
        return all(i == j for i, j, _ in self.entries)

    def max_offset(self) -> int:
        """Largest |column - row| over the support (0 for diagonal)."""
        return max((abs(j - i) for i, j, _ in self.entries), default=0)

    def transpose(self) -> "IntMatrix":
        return IntMatrix.make(self.ncols, {(j, i): a for i, j, a in self.entries},
                              periodic=self.periodic,
                              ncols=self.nrows)

    def add_cells(self, delta: dict[tuple[int, int], int]) -> "IntMatrix":
        cells = self.to_dict()
        for (i, j), a in delta.items():
            if self.periodic:
                s = (i - 1) // self.nrows
                i, j = i - s * self.nrows, j - s * self.nrows
            cells[(i, j)] = cells.get((i, j), 0) + a
        if any(a < 0 for a in cells.values()):
            raise ValueError("negative entry after update")
        return IntMatrix.make(self.nrows, cells, periodic=self.periodic,
                              ncols=self.ncols)

    def is_symmetric_pairing(self) -> bool:
        """a_{ij} == a_{n+1-i, M+1-j} (the type-B index symmetry)."""
        n, m = self.nrows, self.ncols
        cells = self.to_dict()
        if self.periodic:
            return False
        return all(cells.get((n + 1 - i, m + 1 - j), 0) == a
                   for (i, j), a in cells.items())

    def is_center_truncated(self) -> bool:
        """Center row and column reduced to a single central 1 (square, odd n)."""
        n = self.nrows
        if n % 2 == 0 or self.periodic or self.ncols != n:
            return False
        r1 = (n + 1) // 2
        cells = self.to_dict()
        for (i, j), a in cells.items():
            if i == r1 and (j != r1 or a != 1):
                return False
            if j == r1 and (i != r1 or a != 1):
                return False
        return cells.get((r1, r1), 0) == 1

    # -- numerical statistics ---------------------------------------------

    def _shift_count(self, lo_num: int, hi_num: int) -> int:
        """#{t in Z : ceil(lo/n) <= t <= floor(hi/n)} for the stored period."""
        n = self.nrows
        lo = _ceil_div(lo_num, n)
        hi = hi_num // n
        return max(0, hi - lo + 1)

    def d_stat(self) -> int:
        """Exponent of the standard-basis normalization (orbit fiber dimension).

        Counts pairs of cells ((i,j),(k,l)) of the full matrix with
        1 <= i <= n, k <= i and j < l, weighted by the entry product.
        """
        out = 0
        for i, j, a in self.entries:
            for k0, l0, b in self.entries:
                if self.periodic:
                    out += a * b * self._shift_count(j - l0 + 1, i - k0)
                else:
                    if k0 <= i and j < l0:
                        out += a * b
        return out

    def epsilon_stat(self, i: int) -> int:
        """eps_i: upper-right mass through the gap (i, i+1) minus lower-left mass."""
        out = 0
        for r0, s0, a in self.entries:
            if self.periodic:
                out += a * self._shift_count(i + 1 - s0, i - r0)
                out -= a * self._shift_count(i + 1 - r0, i - s0)
            else:
                if r0 <= i < s0:
                    out += a
                if r0 > i >= s0:
                    out -= a
        return out

    def sigma_upper(self, i: int, j: int) -> int:
        """Corner sum over rows <= i and columns >= j (use for i < j)."""
        out = 0
        for r0, s0, a in self.entries:
            if self.periodic:
                out += a * self._shift_count(j - s0, i - r0)
            else:
                if r0 <= i and s0 >= j:
                    out += a
        return out

    def sigma_lower(self, i: int, j: int) -> int:
        """Corner sum over rows >= i and columns <= j (use for i > j)."""
        out = 0
        for r0, s0, a in self.entries:
            if self.periodic:
                out += a * self._shift_count(i - r0, j - s0)
            else:
                if r0 >= i and s0 <= j:
                    out += a
        return out

    # -- ordering and serialization ----------------------------------------

    def sort_key(self) -> tuple:
        return (self.periodic, self.nrows, self.ncols, self.entries)

    def to_json(self) -> dict:
        out = {"n": self.nrows, "d": self.total(), "periodic": self.periodic,
               "entries": [[i, j, a] for i, j, a in self.entries]}
        if self.ncols != self.nrows:
            out["ncols"] = self.ncols
        return out

    @staticmethod
    def from_json(obj: dict) -> "IntMatrix":
        return IntMatrix.make(obj["n"],
                              [(i, j, a) for i, j, a in obj["entries"]],
                              periodic=obj.get("periodic", False),
                              ncols=obj.get("ncols", obj["n"]))

    def __str__(self) -> str:
        kind = "periodic" if self.periodic else f"{self.nrows}x{self.ncols}"
        cells = " ".join(f"({i},{j}):{a}" for i, j, a in self.entries)
        return f"<{kind} {cells or 'zero'}>"


def ro(m: IntMatrix) -> Composition:
    return m.ro()


def co(m: IntMatrix) -> Composition:
    return m.co()


def d_stat(m: IntMatrix) -> int:
    return m.d_stat()


def epsilon_stat(m: IntMatrix, i: int) -> int:
    return m.epsilon_stat(i)


def bruhat_leq(a: IntMatrix, b: IntMatrix) -> bool:
    """Closure (Bruhat) order: corner sums of `a` dominated by those of `b`.

    False when the row or column sums differ.  Realized through the
    standard partial-sum formulation: upper-right corner sums for
    column > row, lower-left corner sums for column < row.
    """
    if (a.nrows, a.ncols, a.periodic) != (b.nrows, b.ncols, b.periodic):
        return False
    if a.ro() != b.ro() or a.co() != b.co():
        return False
    if a.periodic:
        n = a.nrows
        w = max(a.max_offset(), b.max_offset())
        for i in range(1, n + 1):
            for j in range(i + 1, i + w + 1):
                if a.sigma_upper(i, j) > b.sigma_upper(i, j):
                    return False
            for j in range(i - 1, i - w - 1, -1):
                if a.sigma_lower(i, j) > b.sigma_lower(i, j):
                    return False
        return True
    for i in range(1, a.nrows + 1):
        for j in range(1, a.ncols + 1):
            if j > i and a.sigma_upper(i, j) > b.sigma_upper(i, j):
                return False
            if j < i and a.sigma_lower(i, j) > b.sigma_lower(i, j):
                return False
    return True


# ---------------------------------------------------------------------------
# compositions
# ---------------------------------------------------------------------------

def compositions(d: int, parts: int) -> Iterator[Composition]:
    """All weak compositions of d into `parts` nonnegative parts."""
    if parts == 0:
        if d == 0:
            yield ()
        return
    if parts == 1:
        yield (d,)
        return
    for first in range(d + 1):
        for rest in compositions(d - first, parts - 1):
            yield (first,) + rest


def is_symmetric_composition(a: Composition) -> bool:
    """a_i == a_{n+1-i}; the weight lattice of the type-B algebra."""
    return a == tuple(reversed(a))


def symmetric_compositions(total: int, parts: int) -> Iterator[Composition]:
    for a in compositions(total, parts):
        if is_symmetric_composition(a):
            yield a


# ---------------------------------------------------------------------------
# twist statistics for the type-B renormalization
# ---------------------------------------------------------------------------

def half_twist(c: Composition) -> int:
    """(1/2)(sum_{i+j >= n+1} c_i c_j - sum_{i >= r+1} c_i) for n = 2r+1."""
    n = len(c)
    r1 = (n + 1) // 2  # == r + 1
    s = 0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i + j >= n + 1:
                s += c[i - 1] * c[j - 1]
    s -= sum(c[i - 1] for i in range(r1, n + 1))
    if s % 2:
        raise NonInteger(f"half twist of {c} is not an integer")
    return s // 2


def u_twist(b: Composition, a: Composition) -> int:
    """The integer cocycle twisting the type-B coproduct; u(c,a) = u(c,b) + u(b,a)."""
    if len(b) != len(a):
        raise ValueError("compositions must have equal length")
    if len(b) % 2 == 0:
        raise ValueError("defined for an odd number of parts")
    return half_twist(b) - half_twist(a)


def ell_stat(m: IntMatrix) -> int:
    """Standard-basis exponent for symmetric (type-B) matrices.

    (1/2)(sum over cell pairs with row >= row', col < col'  -  sum of
    entries in the lower-left quadrant strictly left of the middle
    column, rows >= middle row).  Defined for matrices with an odd
    number of columns satisfying the index symmetry.
    """
    if m.periodic:
        raise ValueError("ell_stat is for finite matrices")
    if m.ncols % 2 == 0 or m.nrows % 2 == 0:
        raise ValueError("ell_stat needs odd dimensions")
    if not m.is_symmetric_pairing():
        raise NonInteger("ell_stat requires the index symmetry")
    mid_col = (m.ncols + 1) // 2
    mid_row = (m.nrows + 1) // 2
    s = 0
    for i, j, a in m.entries:
        for k, l, b in m.entries:
            if k <= i and j < l:
                s += a * b
    s -= sum(a for i, j, a in m.entries if i >= mid_row and j < mid_col)
    if s % 2:
        raise NonInteger(f"ell statistic of {m} is not an integer")
    return s // 2


# ---------------------------------------------------------------------------
# column matrices and the type-A <-> type-B bijection
# ---------------------------------------------------------------------------

def is_column_matrix(m: IntMatrix) -> bool:
    return (not m.periodic and all(a == 1 for _, _, a in m.entries)
            and m.co() == (1,) * m.ncols)


def column_matrices(n: int, d: int) -> Iterator[IntMatrix]:
    """All n x d matrices over {0,1} with column sums 1."""
    for rows in itertools.product(range(1, n + 1), repeat=d):
        yield IntMatrix.make(n, {(r, j + 1): 1 for j, r in enumerate(rows)},
                             ncols=d)


def a_to_AJ(m: IntMatrix) -> IntMatrix:
    """Extend an n x d column matrix to its symmetric n x (2d+1) partner.

    Columns: the original d, then the central column hitting the middle
    row, then the original block flipped through both centers.
    """
    if not is_column_matrix(m):
        raise ValueError("input must be a column matrix with column sums 1")
    n, d = m.nrows, m.ncols
    if n % 2 == 0:
        raise ValueError("row count must be odd")
    r1 = (n + 1) // 2
    cells = {}
    for i, j, a in m.entries:
        cells[(i, j)] = a
        cells[(n + 1 - i, 2 * d + 2 - j)] = a
    cells[(r1, d + 1)] = 1
    return IntMatrix.make(n, cells, ncols=2 * d + 1)


def aj_to_a(m: IntMatrix) -> IntMatrix:
    """Inverse of a_to_AJ: read off the first (cols-1)/2 columns."""
    d = (m.ncols - 1) // 2
    cells = {(i, j): a for i, j, a in m.entries if j <= d}
    return IntMatrix.make(m.nrows, cells, ncols=d)


# ---------------------------------------------------------------------------
# enumeration of matrix classes
# ---------------------------------------------------------------------------

def finite_matrices_with(row_sums: Composition, col_sums: Composition) -> list[IntMatrix]:
    """All finite matrices with the given row and column sums."""
    nrows, ncols = len(row_sums), len(col_sums)
    if sum(row_sums) != sum(col_sums):
        return []
    out = []

    def fill(i: int, remaining_cols: tuple[int, ...], acc: dict):
        if i > nrows:
            if all(c == 0 for c in remaining_cols):
                out.append(IntMatrix.make(nrows, dict(acc), ncols=ncols))
            return
        for row in _bounded_compositions(row_sums[i - 1], remaining_cols):
            new_cols = tuple(c - r for c, r in zip(remaining_cols, row))
            for j, a in enumerate(row):
                if a:
                    acc[(i, j + 1)] = a
            fill(i + 1, new_cols, acc)
            for j, a in enumerate(row):
                if a:
                    del acc[(i, j + 1)]

    fill(1, tuple(col_sums), {})
    return out


def _bounded_compositions(total: int, bounds: Sequence[int]) -> Iterator[tuple[int, ...]]:
    if not bounds:
        if total == 0:
            yield ()
        return
    for first in range(min(total, bounds[0]) + 1):
        for rest in _bounded_compositions(total - first, bounds[1:]):
            yield (first,) + rest


def periodic_matrices_with(row_sums: Composition, col_sums: Composition,
                           spread: int) -> list[IntMatrix]:
    """Periodic matrices with given sums and support within |col - row| <= spread."""
    n = len(row_sums)
    if len(col_sums) != n or sum(row_sums) != sum(col_sums):
        return []
    cols_per_row = {i: list(range(i - spread, i + spread + 1)) for i in range(1, n + 1)}
    out = []

    def fill(i: int, residue_left: list[int], acc: dict):
        if i > n:
            if all(c == 0 for c in residue_left):
                out.append(IntMatrix.make(n, dict(acc), periodic=True))
            return
        cols = cols_per_row[i]

        def assign(k: int, left: int):
            if k == len(cols):
                if left == 0:
                    fill(i + 1, residue_left, acc)
                return
            j = cols[k]
            cap = min(left, residue_left[(j - 1) % n])
            for a in range(cap + 1):
                if a:
                    acc[(i, j)] = a
                    residue_left[(j - 1) % n] -= a
                assign(k + 1, left - a)
                if a:
                    del acc[(i, j)]
                    residue_left[(j - 1) % n] += a

        assign(0, row_sums[i - 1])

    fill(1, list(col_sums), {})
    return out


def matrix_class(m: IntMatrix, spread: int | None = None) -> list[IntMatrix]:
    """All matrices sharing (ro, co) with m, at m's spread (periodic case)."""
    if m.periodic:
        w = m.max_offset() if spread is None else spread
        return periodic_matrices_with(m.ro(), m.co(), w)
    return finite_matrices_with(m.ro(), m.co())


def lower_order_ideal(m: IntMatrix, spread: int | None = None) -> list[IntMatrix]:
    """The set {m' : m' <= m} in the closure order, m included."""
    return [x for x in matrix_class(m, spread) if bruhat_leq(x, m)]


def linear_extension(mats: Iterable[IntMatrix]) -> list[IntMatrix]:
    """Deterministic linear extension of the closure order on a finite set."""
    pending = sorted(mats, key=IntMatrix.sort_key)
    out: list[IntMatrix] = []
    while pending:
        for idx, cand in enumerate(pending):
            if not any(other != cand and bruhat_leq(other, cand)
                       for other in pending):
                out.append(cand)
                pending.pop(idx)
                break
        else:  # pragma: no cover - cannot happen for a partial order
            raise RuntimeError("cycle detected; order is not a partial order")
    return out
