import math
from fractions import Fraction

import numpy as np
import pytest

from oracles import companion_roots, sympy_leading_minors
from zeroloc.errors import BadOrder, InputError
from zeroloc.grommer import (
    build_matrices,
    default_order,
    leading_minors,
    negativity_verdict,
    split_series,
)
from zeroloc.model import build_structured, expand_to_series

# leading minors of the order-6 matrices, computed with sympy
MINORS_TABLE = {
    (1, Fraction(3, 2), Fraction(1, 2)): [1, Fraction(3, 2), Fraction(5, 4), Fraction(1, 8), Fraction(1, 16), 0],
    (1, -1): [1, -1, 1, 0, 0, 0],
    (1, Fraction(11, 6), 1, Fraction(1, 6)): [1, Fraction(11, 6), Fraction(49, 36), Fraction(5, 18),
                                              Fraction(73, 648), Fraction(1, 1944)],
    (1, 1, 1): [1, 1, -1, -3, -3, 0],
}


def poly_from_roots(roots) -> list[Fraction]:
    """Coefficients (low order first) of prod (1 - z / r), exact."""
    coeffs = [Fraction(1)]
    for r in roots:
        inv = -1 / Fraction(r)
        nxt = coeffs + [Fraction(0)]
        for k in range(len(coeffs)):
            nxt[k + 1] += inv * coeffs[k]
        coeffs = nxt
    return coeffs


def only_negative_zeros(coeffs) -> bool:
    roots = companion_roots([float(c) for c in coeffs])
    return bool(np.all(np.abs(roots.imag) < 1e-6 * np.maximum(1, np.abs(roots))) and np.all(roots.real < 0))


def suite(seed: int, flip: bool) -> list[list[Fraction]]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(50):
        deg = int(rng.integers(1, 6))
        ks = rng.choice(np.arange(1, 41), size=deg, replace=False)
        roots = [-Fraction(int(k), 4) for k in ks]
        if flip:
            i = int(rng.integers(deg))
            roots[i] = -roots[i]
        out.append(poly_from_roots(roots))
    return out


class TestBuildMatrices:
    def test_pattern(self):
        M = build_matrices([1, 1], [0], 3).even_matrix
        assert M == [[1, 1, 0], [0, 1, 0], [0, 1, 1]]

    def test_constant(self):
        assert build_matrices([1], [0], 2).even_matrix == [[1, 0], [0, 0]]

    def test_rows(self):
        M = build_matrices([1, 3, 2], [0], 5).even_matrix
        assert M[1] == [0, 3, 4, 0, 0]
        assert M[3] == [0, 0, 3, 4, 0]

    @pytest.mark.parametrize("order", [0, -1, 2.5, True])
    def test_bad_order(self, order):
        with pytest.raises(BadOrder):
            build_matrices([1], [1], order)


class TestLeadingMinors:
    def test_examples(self):
        assert leading_minors([[1, 1, 0], [0, 1, 0], [0, 1, 1]]).values == [1, 1, 1]
        assert leading_minors([[1, -1], [0, -1]]).values == [1, -1]
        assert leading_minors(np.eye(4).tolist()).values == [1, 1, 1, 1]

    @pytest.mark.parametrize("seq", list(MINORS_TABLE))
    def test_frozen_table(self, seq):
        M = build_matrices(list(seq), [0], 6).even_matrix
        minors = leading_minors(M)
        assert minors.exact
        assert minors.values == MINORS_TABLE[seq]

    def test_against_sympy(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            seq = [Fraction(int(x), int(y)) for x, y in zip(rng.integers(-9, 10, 4), rng.integers(1, 7, 4))]
            seq[0] = Fraction(1)
            M = build_matrices(seq, [0], 7).even_matrix
            assert leading_minors(M).values == sympy_leading_minors(M)

    def test_float_path(self):
        M = build_matrices([1, 1.5, 0.5], [0], 6).even_matrix
        f = leading_minors(M, exact=False)
        assert not f.exact
        np.testing.assert_allclose(f.values, [float(x) for x in MINORS_TABLE[(1, Fraction(3, 2), Fraction(1, 2))]],
                                   atol=1e-14)
        assert f.signs() == [1, 1, 1, 1, 1, 0]

    def test_non_square(self):
        with pytest.raises(ValueError):
            leading_minors([[1, 2]])


class TestNegativityVerdict:
    def test_two_negative_zeros(self):
        v = negativity_verdict([1, 1.5, 0.5], order=6)
        assert v.passed and v.verdict == "positive-then-zero"
        assert all(z.real < 0 for z in companion_roots([1, 1.5, 0.5]))

    def test_positive_zero(self):
        v = negativity_verdict([1, -1], order=4)
        assert v.verdict == "fail" and v.fail_index == 2
        assert v.minors[1] == -1

    def test_constant(self):
        v = negativity_verdict([1])
        assert v.passed
        assert "constant series" in v.notes

    def test_default_order(self):
        assert default_order([1, 0, 2]) == 6

    def test_empty(self):
        with pytest.raises(InputError):
            negativity_verdict([])


class TestSuites:
    @pytest.mark.parametrize("flip", [False, True])
    def test_against_root_oracle(self, flip):
        for coeffs in suite(11 if flip else 7, flip):
            assert only_negative_zeros(coeffs) is (not flip)
            exact = negativity_verdict(coeffs)
            assert exact.exact
            assert exact.passed is (not flip)

    @pytest.mark.parametrize("flip", [False, True])
    def test_exact_and_float_signs_agree(self, flip):
        for coeffs in suite(11 if flip else 7, flip):
            order = default_order(coeffs)
            M = build_matrices(coeffs, [0], order).even_matrix
            exact = leading_minors(M)
            approx = leading_minors([[float(x) for x in row] for row in M], exact=False)
            assert exact.signs() == approx.signs()


class TestSplitSeries:
    def test_quadratic(self):
        parts = split_series([1, 1, 1])
        assert (parts.alpha, parts.beta, parts.j) == (1, 1, 0)
        assert parts.even == [1, 1] and parts.odd == [1]
        assert parts.c == -1

    def test_octic(self):
        S = build_structured(60, [2, 2.5, 3, 4], 5 * (1 + 1j), 0, [1, 5])
        parts = split_series(expand_to_series(S).coeffs)
        assert parts.c == pytest.approx(-(1 + 1j) / math.sqrt(2), abs=1e-15)
        assert negativity_verdict(parts.even).passed
        assert negativity_verdict(parts.odd).passed

    def test_odd_start(self):
        parts = split_series([2, 0, 0, 3j, 0, -1.5j])
        assert parts.j == 1 and parts.odd == [1, 0.5]

    def test_errors(self):
        with pytest.raises(InputError):
            split_series([0, 1])
        with pytest.raises(InputError):
            split_series([1, 0, 1])
        with pytest.raises(InputError):
            split_series([1, 1, 1j])
