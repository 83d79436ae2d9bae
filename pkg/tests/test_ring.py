import random

import pytest

from schurlab.errors import ConsistencyFailure
from schurlab.ring import (
    LaurentPoly,
    QPoly,
    interpolate,
    qbinom,
    quantum_factorial,
    quantum_integer,
)


def L(coeffs):
    return LaurentPoly(coeffs)


def random_laurent(rng, max_terms=4, max_exp=5, max_coeff=9):
    c = {}
    for _ in range(rng.randint(0, max_terms)):
        c[rng.randint(-max_exp, max_exp)] = rng.randint(-max_coeff, max_coeff)
    return LaurentPoly(c)


class TestLaurentBasics:
    def test_add_cancels(self):
        # (v + 1) + (-1) = v
        assert L({1: 1, 0: 1}) + L({0: -1}) == L({1: 1})

    def test_mul_difference_of_squares(self):
        # (v + v^-1)(v - v^-1) = v^2 - v^-2
        a = L({1: 1, -1: 1})
        b = L({1: 1, -1: -1})
        assert a * b == L({2: 1, -2: -1})

    def test_q_plus_one_times_v(self):
        # (v^2 + 1) * v = v^3 + v
        assert L({2: 1, 0: 1}) * L({1: 1}) == L({3: 1, 1: 1})

    def test_no_zero_coefficients_stored(self):
        p = L({3: 2, 1: 0, -2: 5})
        assert set(p.coeffs) == {3, -2}

    def test_ring_axioms_on_random_triples(self):
        rng = random.Random(20240)
        for _ in range(1000):
            a, b, c = (random_laurent(rng) for _ in range(3))
            assert (a + b) + c == a + (b + c)
            assert a + b == b + a
            assert (a * b) * c == a * (b * c)
            assert a * b == b * a
            assert a * (b + c) == a * b + a * c

    def test_is_positive(self):
        assert L({1: 1, 0: 3}).is_positive()
        assert not L({1: 1, -1: -1}).is_positive()
        assert LaurentPoly.zero().is_positive()

    def test_str_sorted_by_exponent(self):
        assert str(L({2: 1, -1: 3, 0: -2})) == "3*v^-1 - 2 + v^2"

    def test_json_round_trip(self):
        p = L({-3: 12345678901234567890, 0: -7, 4: 1})
        assert LaurentPoly.from_json(p.to_json()) == p


class TestBar:
    def test_bar_example(self):
        # v^2 + 2 v^-1  ->  v^-2 + 2 v
        assert L({2: 1, -1: 2}).bar() == L({-2: 1, 1: 2})

    def test_bar_fixes_integers(self):
        assert L({0: 5}).bar() == L({0: 5})

    def test_bar_is_ring_involution_on_random_pairs(self):
        rng = random.Random(77)
        for _ in range(200):
            a, b = random_laurent(rng), random_laurent(rng)
            assert a.bar().bar() == a
            assert (a * b).bar() == a.bar() * b.bar()
            assert (a + b).bar() == a.bar() + b.bar()


class TestExactDivision:
    def test_quantum_factorial_divides_power(self):
        # [2]! = v + v^-1 divides (v + v^-1)^3 exactly
        f = quantum_factorial(2)
        cube = f * f * f
        assert cube.exact_div(f) == f * f

    def test_nonzero_remainder_raises(self):
        with pytest.raises(ConsistencyFailure):
            L({1: 1, 0: 1}).exact_div(L({1: 1, -1: 1}))

    def test_random_exact_divisions(self):
        rng = random.Random(3)
        for _ in range(200):
            a = random_laurent(rng)
            b = random_laurent(rng)
            if b.is_zero():
                continue
            assert (a * b).exact_div(b) == a

    def test_quantum_integers(self):
        assert quantum_integer(1) == LaurentPoly.one()
        assert quantum_integer(2) == L({1: 1, -1: 1})
        assert quantum_integer(3) == L({2: 1, 0: 1, -2: 1})


def brute_force_subspace_count(l: int, a: int, q: int) -> int:
    """Independent oracle: count a-dim subspaces of F_q^l by the orbit formula.

    #subspaces = # injective a-tuples / # ordered bases of an a-space
    = prod (q^l - q^i) / prod (q^a - q^i), evaluated with exact ints.
    """
    num = 1
    den = 1
    for i in range(a):
        num *= q ** l - q ** i
        den *= q ** a - q ** i
    assert a == 0 or num % den == 0
    return 1 if a == 0 else num // den


class TestQBinom:
    def test_trivial_cases(self):
        assert qbinom(5, 0) == QPoly.one()
        assert qbinom(3, 4) == QPoly.zero()
        assert qbinom(0, 0) == QPoly.one()

    def test_two_choose_one(self):
        assert qbinom(2, 1) == QPoly({1: 1, 0: 1})

    def test_four_choose_two(self):
        # q^4 + q^3 + 2 q^2 + q + 1
        assert qbinom(4, 2) == QPoly({4: 1, 3: 1, 2: 2, 1: 1, 0: 1})

    @pytest.mark.parametrize("q", [3, 5, 7])
    def test_matches_subspace_counts(self, q):
        for l in range(6):
            for a in range(l + 1):
                assert qbinom(l, a).eval_int(q) == brute_force_subspace_count(l, a, q)

    def test_symmetry(self):
        for l in range(7):
            for a in range(l + 1):
                assert qbinom(l, a) == qbinom(l, l - a)


class TestQPoly:
    def test_to_laurent_doubles_exponents(self):
        assert QPoly({2: 3, 0: 1}).to_laurent() == L({4: 3, 0: 1})

    def test_eval(self):
        assert QPoly({2: 1, 1: 1, 0: 1}).eval_int(3) == 13


class TestInterpolate:
    def test_constant(self):
        assert interpolate([(3, 1), (5, 1), (7, 1)], 0) == QPoly.one()

    def test_linear(self):
        assert interpolate([(3, 4), (5, 6), (7, 8)], 1) == QPoly({1: 1, 0: 1})

    def test_projective_line_counts(self):
        # 1-dim subspaces of F_q^3: q^2 + q + 1, verified by brute force
        samples = [(q, brute_force_subspace_count(3, 1, q)) for q in (3, 5, 7, 9)]
        assert interpolate(samples, 2) == QPoly({2: 1, 1: 1, 0: 1})

    def test_reserve_mismatch_raises(self):
        with pytest.raises(ConsistencyFailure):
            interpolate([(3, 4), (5, 6), (7, 9)], 1)

    def test_too_few_samples_raises(self):
        with pytest.raises(ConsistencyFailure):
            interpolate([(3, 4), (5, 6)], 1)

    def test_round_trip_on_random_qpolys(self):
        rng = random.Random(11)
        for _ in range(100):
            deg = rng.randint(0, 4)
            p = QPoly({e: rng.randint(-9, 9) for e in range(deg + 1)})
            qs = [3, 5, 7, 9, 11, 13][: deg + 2]
            samples = [(q, p.eval_int(q)) for q in qs]
            assert interpolate(samples, deg) == p
