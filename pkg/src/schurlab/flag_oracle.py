"""Brute-force ground truth over small finite fields.

Everything algebraic in the package is ultimately checked against
honest counting here: enumerate partial flags (plain or isotropic),
classify pairs of flags by their intersection-invariant matrix, count
convolution and coproduct fibers, and interpolate the counts into
polynomials in q.

Subspaces are kept in reduced row echelon form so equality is literal
tuple equality.  For the isotropic theory the ambient form defaults to
the anti-diagonal one (coordinate i pairs with coordinate D+1-i), which
makes the standard isotropic subspace spanned by the first coordinates
and its perp spanned by all but the last ones.
"""

from __future__ import annotations

import csv
import itertools
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from . import linalg
from .errors import (
    ConsistencyFailure,
    RepresentativeDependence,
    ScaleExceeded,
    SymmetryViolation,
)
from .linalg import GF, Subspace, field
from .matrices import Composition, IntMatrix
from .ring import QPoly, interpolate, qbinom

_ABS_MAX_Q = 49
_ABS_MAX_DIM = 9


def _max_q() -> int:
    return min(int(os.environ.get("SCHURLAB_MAX_Q", "13")), _ABS_MAX_Q)


def _max_dim() -> int:
    return min(int(os.environ.get("SCHURLAB_MAX_DIM", "7")), _ABS_MAX_DIM)


def _guard(q: int, ambient: int, what: str):
    if q > _max_q() or ambient > _max_dim():
        raise ScaleExceeded(
            f"{what}: q={q}, dim={ambient} beyond guard "
            f"(q<={_max_q()}, dim<={_max_dim()})")
    if not linalg.is_odd_prime_power(q):
        raise ScaleExceeded(f"{what}: q={q} is not a supported odd prime power")


@dataclass(frozen=True)
class FlagInstance:
    """An n-step flag 0 = V_0 <= V_1 <= ... <= V_n = F_q^D."""

    q: int
    ambient: int
    steps: tuple[Subspace, ...]

    def __post_init__(self):
        gf = field(self.q)
        prev: Subspace = ()
        for s in self.steps:
            if not linalg.contains_space(gf, s, prev):
                raise ValueError("steps are not nested")
            prev = s
        if len(prev) != self.ambient:
            raise ValueError("last step must be the full space")

    @property
    def nsteps(self) -> int:
        return len(self.steps)

    def dims(self) -> Composition:
        out = []
        prev = 0
        for s in self.steps:
            out.append(len(s) - prev)
            prev = len(s)
        return tuple(out)


def is_isotropic_flag(flag: FlagInstance, gram: Sequence) -> bool:
    """Check the self-duality V_i = V_{n-i}^perp for all i."""
    gf = field(flag.q)
    n = flag.nsteps
    for i in range(1, n):
        p = linalg.perp(gf, flag.steps[n - i - 1], gram, flag.ambient)
        if p != flag.steps[i - 1]:
            return False
    return True


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def enumerate_flags(dims: Composition, q: int) -> list[FlagInstance]:
    """Exhaustive list of flags with the given step sizes in F_q^(sum dims)."""
    ambient = sum(dims)
    _guard(q, ambient, "enumerate_flags")
    if ambient > 6:
        raise ScaleExceeded(f"enumerate_flags: ambient {ambient} > 6")
    gf = field(q)
    full = linalg.standard_basis_space(gf, ambient, range(ambient))
    partials: list[list[Subspace]] = [[]]
    current_dim = 0
    for step in dims[:-1]:
        current_dim += step
        nxt = []
        for chain in partials:
            base = chain[-1] if chain else ()
            for sup in linalg.superspaces(gf, base, current_dim, full):
                nxt.append(chain + [sup])
        partials = nxt
    out = [FlagInstance(q, ambient, tuple(chain + [full])) for chain in partials]
    return out


def enumerate_isotropic_flags(dims: Composition, q: int,
                              gram: Sequence | None = None) -> list[FlagInstance]:
    """Isotropic flags: dims symmetric of odd length, V_i = V_{n-i}^perp."""
    n = len(dims)
    if n % 2 == 0 or tuple(dims) != tuple(reversed(dims)):
        raise ValueError("step sizes must be symmetric of odd length")
    ambient = sum(dims)
    _guard(q, ambient, "enumerate_isotropic_flags")
    gf = field(q)
    if gram is None:
        gram = linalg.anti_diagonal_gram(ambient)
    r = n // 2
    full = linalg.standard_basis_space(gf, ambient, range(ambient))
    partials: list[list[Subspace]] = [[]]
    current_dim = 0
    for step in dims[:r]:
        current_dim += step
        nxt = []
        for chain in partials:
            base = chain[-1] if chain else ()
            for sup in linalg.superspaces(gf, base, current_dim, full, gram=gram):
                nxt.append(chain + [sup])
        partials = nxt
    out = []
    for chain in partials:
        steps = list(chain)
        # complete by perpendicularity
        for i in range(r + 1, n + 1):
            lower = steps[n - i - 1] if n - i - 1 >= 0 else ()
            steps.append(linalg.perp(gf, lower, gram, ambient))
        flag = FlagInstance(q, ambient, tuple(steps))
        out.append(flag)
    return out


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def classify_pair(v: FlagInstance, w: FlagInstance,
                  isotropic: bool = False) -> IntMatrix:
    """Invariant matrix of a flag pair: m_{ij} is the bidegree-(i,j) jump
    of the intersection dimensions."""
    if v.q != w.q or v.ambient != w.ambient:
        raise ValueError("flags live in different spaces")
    gf = field(v.q)
    nr, nc = v.nsteps, w.nsteps
    inter = [[0] * (nc + 1) for _ in range(nr + 1)]
    for i in range(1, nr + 1):
        for j in range(1, nc + 1):
            inter[i][j] = linalg.intersect_dim(gf, v.steps[i - 1], w.steps[j - 1])
    cells = {}
    for i in range(1, nr + 1):
        for j in range(1, nc + 1):
            m = inter[i][j] - inter[i - 1][j] - inter[i][j - 1] + inter[i - 1][j - 1]
            if m < 0:
                raise ValueError("modularity violated; bug in intersections")
            if m:
                cells[(i, j)] = m
    out = IntMatrix.make(nr, cells, ncols=nc)
    if isotropic and not out.is_symmetric_pairing():
        raise SymmetryViolation(f"isotropic pair classified as asymmetric {out}")
    return out


# ---------------------------------------------------------------------------
# representative pairs straight from a matrix
# ---------------------------------------------------------------------------

def representative_pair(c: IntMatrix, q: int) -> tuple[FlagInstance, FlagInstance]:
    """A pair of flags whose invariant matrix is exactly c.

    Coordinates are assigned one per matrix unit; the row flag collects
    rows top-down, the column flag collects columns left-right.
    """
    if c.periodic:
        raise ValueError("representatives exist for finite matrices only")
    ambient = c.total()
    _guard(q, ambient, "representative_pair")
    gf = field(q)
    coords_of_cell: dict[tuple[int, int], list[int]] = {}
    k = 0
    for i, j, a in c.entries:
        coords_of_cell[(i, j)] = list(range(k, k + a))
        k += a
    vsteps, wsteps = [], []
    for i in range(1, c.nrows + 1):
        coords = [x for (r, _), xs in coords_of_cell.items() if r <= i for x in xs]
        vsteps.append(linalg.standard_basis_space(gf, ambient, sorted(coords)))
    for j in range(1, c.ncols + 1):
        coords = [x for (_, s), xs in coords_of_cell.items() if s <= j for x in xs]
        wsteps.append(linalg.standard_basis_space(gf, ambient, sorted(coords)))
    return (FlagInstance(q, ambient, tuple(vsteps)),
            FlagInstance(q, ambient, tuple(wsteps)))


def representative_pair_isotropic(c: IntMatrix, q: int
                                  ) -> tuple[FlagInstance, FlagInstance, tuple]:
    """An isotropic pair realizing the symmetric matrix c, plus its Gram matrix.

    Matrix units are matched with their mirror cells; mirrored units
    pair hyperbolically, the self-mirrored center block carries an
    anti-diagonal form.  The result is isometric to the standard
    ambient form (same dimension and the same determinant class), so
    orbit counts computed against it are the honest ones.
    """
    if not c.is_symmetric_pairing():
        raise ValueError("matrix lacks the required symmetry")
    ambient = c.total()
    _guard(q, ambient, "representative_pair_isotropic")
    gf = field(q)
    n, m = c.nrows, c.ncols
    coords_of_cell: dict[tuple[int, int], list[int]] = {}
    k = 0
    for i, j, a in c.entries:
        coords_of_cell[(i, j)] = list(range(k, k + a))
        k += a
    gram = [[0] * ambient for _ in range(ambient)]
    for (i, j), xs in coords_of_cell.items():
        mi, mj = n + 1 - i, m + 1 - j
        if (mi, mj) == (i, j):
            for a, x in enumerate(xs):
                y = xs[len(xs) - 1 - a]
                gram[x][y] = 1
        elif (i, j) < (mi, mj):
            ys = coords_of_cell[(mi, mj)]
            for x, y in zip(xs, ys):
                gram[x][y] = 1
                gram[y][x] = 1
    gram_t = tuple(tuple(r) for r in gram)
    vsteps, wsteps = [], []
    for i in range(1, n + 1):
        coords = [x for (r, _), xs in coords_of_cell.items() if r <= i for x in xs]
        vsteps.append(linalg.standard_basis_space(gf, ambient, sorted(coords)))
    for j in range(1, m + 1):
        coords = [x for (_, s), xs in coords_of_cell.items() if s <= j for x in xs]
        wsteps.append(linalg.standard_basis_space(gf, ambient, sorted(coords)))
    v = FlagInstance(q, ambient, tuple(vsteps))
    w = FlagInstance(q, ambient, tuple(wsteps))
    return v, w, gram_t


# ---------------------------------------------------------------------------
# convolution counting
# ---------------------------------------------------------------------------

def _semisimple_kind(b: IntMatrix) -> str | None:
    """'upper' if b is diagonal + superdiagonal, 'lower' if + subdiagonal."""
    up = all(j in (i, i + 1) for i, j, _ in b.entries)
    lo = all(j in (i, i - 1) for i, j, _ in b.entries)
    if b.is_diagonal():
        return "upper"
    if up:
        return "upper"
    if lo:
        return "lower"
    return None


def _middles_semisimple(b: IntMatrix, l: FlagInstance) -> Iterator[FlagInstance]:
    """Flags L'' with (L, L'') in the orbit of a semisimple matrix b."""
    gf = field(l.q)
    kind = _semisimple_kind(b)
    n = l.nsteps
    if kind == "upper":
        alpha = [b.get(i, i + 1) for i in range(1, n + 1)]
        per_step = []
        for i in range(1, n):
            base = l.steps[i - 2] if i >= 2 else ()
            target = len(l.steps[i - 1]) - alpha[i - 1]
            per_step.append(list(linalg.superspaces(gf, base, target,
                                                    l.steps[i - 1])))
        if alpha[n - 1]:
            return
        for combo in itertools.product(*per_step):
            yield FlagInstance(l.q, l.ambient, tuple(list(combo) + [l.steps[-1]]))
    elif kind == "lower":
        beta = [b.get(i + 1, i) for i in range(1, n + 1)]
        per_step = []
        for i in range(1, n):
            target = len(l.steps[i - 1]) + beta[i - 1]
            per_step.append(list(linalg.superspaces(gf, l.steps[i - 1], target,
                                                    l.steps[i])))
        if beta[n - 1]:
            return
        for combo in itertools.product(*per_step):
            yield FlagInstance(l.q, l.ambient, tuple(list(combo) + [l.steps[-1]]))
    else:
        raise ValueError("not a semisimple matrix")


def convolve(b: IntMatrix, a: IntMatrix, q: int,
             check_representatives: bool = False) -> dict[IntMatrix, int]:
    """Convolution counts: for each target class c, the number of middle
    flags L'' with (L, L'') in the b-orbit and (L'', L') in the a-orbit,
    computed at a representative (L, L') of c."""
    from .matrices import finite_matrices_with

    if b.co() != a.ro():
        raise ValueError("column sums of b must equal row sums of a")
    out: dict[IntMatrix, int] = {}
    semisimple = _semisimple_kind(b) is not None
    middle_pool = None
    if not semisimple:
        middle_pool = enumerate_flags(b.co(), q)
    for c in finite_matrices_with(b.ro(), a.co()):
        l, lp = representative_pair(c, q)
        count = _count_middles(b, a, l, lp, semisimple, middle_pool)
        if check_representatives:
            l2p, l2 = representative_pair(c.transpose(), q)
            count2 = _count_middles(b, a, l2, l2p, semisimple, middle_pool)
            if count != count2:
                raise RepresentativeDependence(
                    f"counts {count} vs {count2} for target {c}")
        if count:
            out[c] = count
    return out


def _count_middles(b, a, l, lp, semisimple, middle_pool) -> int:
    count = 0
    if semisimple:
        for mid in _middles_semisimple(b, l):
            if classify_pair(mid, lp) == a:
                count += 1
    else:
        for mid in middle_pool:
            if classify_pair(l, mid) == b and classify_pair(mid, lp) == a:
                count += 1
    return count


# ---------------------------------------------------------------------------
# coproduct counting
# ---------------------------------------------------------------------------

def _lift_flag_pair_plain(vp: FlagInstance, vpp: FlagInstance) -> FlagInstance:
    """Coordinate lift: step i is V'_i (first coordinates) + V''_i (last)."""
    gf = field(vp.q)
    d1, d2 = vp.ambient, vpp.ambient
    ambient = d1 + d2
    steps = []
    for s1, s2 in zip(vp.steps, vpp.steps):
        rows = [tuple(list(r) + [0] * d2) for r in s1]
        rows += [tuple([0] * d1 + list(r)) for r in s2]
        steps.append(linalg.rref(gf, rows))
    return FlagInstance(vp.q, ambient, tuple(steps))


def _project_first(gf: GF, space: Subspace, d1: int, d2: int) -> Subspace:
    return linalg.rref(gf, [r[:d1] for r in space])


def _intersect_last(gf: GF, space: Subspace, d1: int, d2: int) -> Subspace:
    block = linalg.standard_basis_space(gf, d1 + d2, range(d1, d1 + d2))
    inter = linalg.intersection(gf, space, block)
    return linalg.rref(gf, [r[d1:] for r in inter])


def _zfiber_plain(vp: FlagInstance, vpp: FlagInstance) -> Iterator[FlagInstance]:
    """All flags V with projection V' to the first block and intersection V''
    with the last block."""
    gf = field(vp.q)
    d1, d2 = vp.ambient, vpp.ambient
    ambient = d1 + d2
    nsteps = vp.nsteps

    def embed_first(s):
        return [tuple(list(r) + [0] * d2) for r in s]

    def embed_last(s):
        return [tuple([0] * d1 + list(r)) for r in s]

    def rec(i: int, chain: list[Subspace]):
        if i == nsteps:
            yield FlagInstance(vp.q, ambient, tuple(chain))
            return
        target = len(vp.steps[i]) + len(vpp.steps[i])
        within = linalg.rref(gf, embed_first(vp.steps[i])
                             + embed_last(linalg.standard_basis_space(
                                 gf, d2, range(d2))))
        base = linalg.rref(gf, list(chain[-1] if chain else ())
                           + embed_last(vpp.steps[i]))
        for cand in linalg.superspaces(gf, base, target, within):
            if _intersect_last(gf, cand, d1, d2) != vpp.steps[i]:
                continue
            if _project_first(gf, cand, d1, d2) != vp.steps[i]:
                continue
            yield from rec(i + 1, chain + [cand])

    yield from rec(0, [])


def comult_count(a: IntMatrix, d1: int, d2: int, q: int,
                 isotropic: bool = False,
                 check_representatives: bool = False
                 ) -> dict[tuple[IntMatrix, IntMatrix], int]:
    """Counting form of the coproduct: values of the split of the a-orbit's
    characteristic function on all pairs of orbit classes.

    Plain case: the ambient splits into a first block of dimension d1
    and a last block of dimension d2.  Isotropic case: d2 is the
    dimension of the standard isotropic subspace spanned by the first
    coordinates; the first tensor factor is then an isotropic flag in
    the subquotient of dimension 2*d1+1 and the second factor a plain
    flag in dimension d2, with d = d1 + d2.
    """
    if isotropic:
        return _comult_count_isotropic(a, d1, d2, q, check_representatives)
    if a.total() != d1 + d2:
        raise ValueError("split must sum to the matrix total")
    from .matrices import compositions, finite_matrices_with

    n = a.nrows
    out: dict[tuple[IntMatrix, IntMatrix], int] = {}
    roA, coA = a.ro(), a.co()
    for ro1 in compositions(d1, n):
        ro2 = tuple(x - y for x, y in zip(roA, ro1))
        if any(x < 0 for x in ro2):
            continue
        for co1 in compositions(d1, n):
            co2 = tuple(x - y for x, y in zip(coA, co1))
            if any(x < 0 for x in co2):
                continue
            for b1 in finite_matrices_with(ro1, co1):
                for b2 in finite_matrices_with(ro2, co2):
                    cnt = _comult_value_plain(a, b1, b2, q)
                    if check_representatives:
                        cnt2 = _comult_value_plain(a, b1, b2, q, flip=True)
                        if cnt != cnt2:
                            raise RepresentativeDependence(
                                f"coproduct count differs across representatives "
                                f"for {b1}, {b2}")
                    if cnt:
                        out[(b1, b2)] = cnt
    return out


def _comult_value_plain(a, b1, b2, q, flip=False) -> int:
    v1, w1 = representative_pair(b1, q)
    v2, w2 = representative_pair(b2, q)
    if flip:
        # a different representative of the same orbit pair: transpose trick
        w1b, v1b = representative_pair(b1.transpose(), q)
        w2b, v2b = representative_pair(b2.transpose(), q)
        v1, w1, v2, w2 = v1b, w1b, v2b, w2b
    lift = _lift_flag_pair_plain(v1, v2)
    count = 0
    for cand in _zfiber_plain(w1, w2):
        if classify_pair(lift, cand) == a:
            count += 1
    return count


# -- isotropic version -------------------------------------------------------

def _lift_flag_pair_isotropic(lp: FlagInstance, lpp: FlagInstance
                              ) -> tuple[FlagInstance, tuple]:
    """Standard lift of (isotropic flag in the subquotient, plain flag in the
    isotropic block) to an isotropic flag in the full space."""
    q = lp.q
    gf = field(q)
    d2 = lpp.ambient
    dprime = lp.ambient  # = 2*d1 + 1
    ambient = dprime + 2 * d2
    gram = linalg.anti_diagonal_gram(ambient)
    n = lp.nsteps

    def embed_iso(s):  # isotropic block: first d2 coordinates
        return [tuple(list(r) + [0] * (ambient - d2)) for r in s]

    def embed_mid(s):  # subquotient: middle coordinates
        return [tuple([0] * d2 + list(r) + [0] * d2) for r in s]

    w_coords = range(ambient - d2, ambient)

    steps = []
    for i in range(1, n + 1):
        rows = embed_iso(lpp.steps[i - 1]) + embed_mid(lp.steps[i - 1])
        # W-part: vectors in the last block pairing to zero with L''_{n-i}
        lower = lpp.steps[n - i - 1] if n - i - 1 >= 0 else ()
        wblock = linalg.standard_basis_space(gf, ambient, w_coords)
        if lower:
            lower_emb = linalg.rref(gf, embed_iso(lower))
            wpart = linalg.intersection(
                gf, wblock, linalg.perp(gf, lower_emb, gram, ambient))
        else:
            wpart = wblock
        rows += list(wpart)
        steps.append(linalg.rref(gf, rows))
    return FlagInstance(q, ambient, tuple(steps)), gram


def _pi_natural(gf: GF, space: Subspace, d2: int, ambient: int) -> Subspace:
    """(C intersect D''^perp + D'')/D'' in middle coordinates."""
    # D''^perp = vectors with zero last-d2 block
    perp_block = linalg.standard_basis_space(gf, ambient, range(ambient - d2))
    inter = linalg.intersection(gf, space, perp_block)
    return linalg.rref(gf, [r[d2:ambient - d2] for r in inter])


def _pi_intersect(gf: GF, space: Subspace, d2: int, ambient: int) -> Subspace:
    block = linalg.standard_basis_space(gf, ambient, range(d2))
    inter = linalg.intersection(gf, space, block)
    return linalg.rref(gf, [r[:d2] for r in inter])


def _zfiber_isotropic(lp: FlagInstance, lpp: FlagInstance,
                      gram: tuple) -> Iterator[FlagInstance]:
    """Isotropic flags with prescribed subquotient and intersection images."""
    gf = field(lp.q)
    d2 = lpp.ambient
    ambient = lp.ambient + 2 * d2
    n = lp.nsteps
    r = n // 2

    def rec(i: int, chain: list[Subspace]):
        if i == r:
            steps = list(chain)
            for k in range(r + 1, n + 1):
                lower = steps[n - k - 1] if n - k - 1 >= 0 else ()
                steps.append(linalg.perp(gf, lower, gram, ambient))
            flag = FlagInstance(lp.q, ambient, tuple(steps))
            for k in range(1, n + 1):
                if _pi_natural(gf, flag.steps[k - 1], d2, ambient) != lp.steps[k - 1]:
                    return
                if _pi_intersect(gf, flag.steps[k - 1], d2, ambient) != lpp.steps[k - 1]:
                    return
            yield flag
            return
        target = len(lp.steps[i]) + len(lpp.steps[i])
        base = chain[-1] if chain else ()
        full = linalg.standard_basis_space(gf, ambient, range(ambient))
        for cand in linalg.superspaces(gf, base, target, full, gram=gram):
            if _pi_natural(gf, cand, d2, ambient) != lp.steps[i]:
                continue
            if _pi_intersect(gf, cand, d2, ambient) != lpp.steps[i]:
                continue
            yield from rec(i + 1, chain + [cand])

    yield from rec(0, [])


def _paired_splits(resid: Composition) -> Iterator[Composition]:
    """All x >= 0 with x_i + x_{n+1-i} = resid_i (resid symmetric, even middle)."""
    n = len(resid)
    r1 = (n + 1) // 2
    if resid != tuple(reversed(resid)) or resid[r1 - 1] % 2:
        return
    pair_idx = list(range(1, r1))

    def rec(k: int, acc: list):
        if k == len(pair_idx):
            x = [0] * n
            for i, v in acc:
                x[i - 1] = v
                x[n - i] = resid[i - 1] - v
            x[r1 - 1] = resid[r1 - 1] // 2
            yield tuple(x)
            return
        i = pair_idx[k]
        for v in range(resid[i - 1] + 1):
            yield from rec(k + 1, acc + [(i, v)])

    yield from rec(0, [])


_ISO_REP_CACHE: dict = {}


def isotropic_orbit_representative(b: IntMatrix, q: int
                                   ) -> tuple[FlagInstance, FlagInstance]:
    """A pair of isotropic flags (standard form) classifying to b, by search."""
    key = (b, q)
    if key not in _ISO_REP_CACHE:
        left = enumerate_isotropic_flags(b.ro(), q)
        right = (left if b.co() == b.ro()
                 else enumerate_isotropic_flags(b.co(), q))
        for v in left:
            for w in right:
                if classify_pair(v, w, isotropic=True) == b:
                    _ISO_REP_CACHE[key] = (v, w)
                    break
            if key in _ISO_REP_CACHE:
                break
        else:
            raise ValueError(f"no isotropic pair realizes {b} at q={q}")
    return _ISO_REP_CACHE[key]


def _comult_count_isotropic(a: IntMatrix, d1: int, d2: int, q: int,
                            check_representatives: bool
                            ) -> dict[tuple[IntMatrix, IntMatrix], int]:
    """Isotropic coproduct counts; d = d1 + d2 with ambient 2d+1."""
    from .matrices import finite_matrices_with, symmetric_compositions

    n = a.nrows
    if a.total() != 2 * (d1 + d2) + 1:
        raise ValueError("matrix total must be 2(d1+d2)+1")
    _guard(q, a.total(), "comult_count_isotropic")
    out: dict[tuple[IntMatrix, IntMatrix], int] = {}
    roA, coA = a.ro(), a.co()
    for ro1 in symmetric_compositions(2 * d1 + 1, n):
        ro_resid = tuple(t - p for t, p in zip(roA, ro1))
        if any(x < 0 for x in ro_resid):
            continue
        for co1 in symmetric_compositions(2 * d1 + 1, n):
            co_resid = tuple(t - p for t, p in zip(coA, co1))
            if any(x < 0 for x in co_resid):
                continue
            for b1 in finite_matrices_with(ro1, co1):
                if not b1.is_symmetric_pairing():
                    continue
                for ro2 in _paired_splits(ro_resid):
                    for co2 in _paired_splits(co_resid):
                        for b2 in finite_matrices_with(ro2, co2):
                            cnt = _comult_value_isotropic(a, b1, b2, q)
                            if check_representatives:
                                cnt2 = _comult_value_isotropic(a, b1, b2, q,
                                                               flip=True)
                                if cnt != cnt2:
                                    raise RepresentativeDependence(
                                        f"isotropic coproduct count differs "
                                        f"for {b1}, {b2}")
                            if cnt:
                                out[(b1, b2)] = cnt
    return out


def _comult_value_isotropic(a, b1, b2, q, flip=False) -> int:
    v1, w1 = isotropic_orbit_representative(b1, q)
    v2, w2 = representative_pair(b2, q)
    if flip:
        w1b, v1b = isotropic_orbit_representative(b1.transpose(), q)
        w2b, v2b = representative_pair(b2.transpose(), q)
        v1, w1, v2, w2 = v1b, w1b, v2b, w2b
    lift, gram = _lift_flag_pair_isotropic(v1, v2)
    count = 0
    for cand in _zfiber_isotropic(w1, w2, gram):
        if classify_pair(lift, cand, isotropic=True) == a:
            count += 1
    return count


# ---------------------------------------------------------------------------
# fibers and their degrees
# ---------------------------------------------------------------------------

def fiber_count_formula(a: IntMatrix) -> QPoly:
    """Closed form for the number of column flags paired with a fixed row
    flag in the class of `a` (plain type only), column by column."""
    if a.periodic:
        raise ValueError("finite matrices only")
    out = QPoly.one()
    for j in range(1, a.ncols + 1):
        exp = 0
        col = {i: a.get(i, j) for i in range(1, a.nrows + 1)}
        for i in range(1, a.nrows + 1):
            for k in range(1, i):
                exp += col[i] * sum(a.get(k, l) for l in range(j + 1, a.ncols + 1))
        term = QPoly.q_power(exp)
        for i in range(1, a.nrows + 1):
            li = sum(a.get(i, l) for l in range(j, a.ncols + 1))
            term = term * qbinom(li, col[i])
        out = out * term
    return out


def fiber_count_enumerated(a: IntMatrix, q: int, isotropic: bool = False) -> int:
    """|{L' : (L, L') in the a-orbit}| by exhaustive enumeration."""
    if isotropic:
        l, _, gram = representative_pair_isotropic(a, q)
        pool = enumerate_isotropic_flags(a.co(), q, gram=gram)
        return sum(1 for w in pool if classify_pair(l, w, isotropic=True) == a)
    l, _ = representative_pair(a, q)
    pool = enumerate_flags(a.co(), q)
    return sum(1 for w in pool if classify_pair(l, w) == a)


def fiber_degree(a: IntMatrix, isotropic: bool = False,
                 degree_bound: int | None = None,
                 qs: Sequence[int] | None = None) -> int:
    """Degree in q of the fiber-count polynomial.

    Plain type uses the closed form.  The isotropic case enumerates at
    enough sample points and interpolates, with the usual reserve-point
    consistency check.
    """
    if not isotropic:
        return fiber_count_formula(a).degree()
    if degree_bound is None:
        from .matrices import ell_stat

        try:
            degree_bound = max(0, ell_stat(a))
        except Exception:
            degree_bound = max(0, a.d_stat())
    if qs is None:
        qs = list(itertools.islice(linalg.odd_prime_powers(), degree_bound + 2))
    samples = [(q, fiber_count_enumerated(a, q, isotropic=True)) for q in qs]
    return interpolate(samples, degree_bound).degree()


# ---------------------------------------------------------------------------
# fixture export
# ---------------------------------------------------------------------------

def export_convolution_csv(path: str, rows: Iterable[tuple]):
    """Write (q, B, A, C, count) rows with matrices in their JSON encoding."""
    import json

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["q", "B", "A", "C", "count"])
        for q, b, a, c, count in rows:
            writer.writerow([q, json.dumps(b.to_json()), json.dumps(a.to_json()),
                             json.dumps(c.to_json()), count])
