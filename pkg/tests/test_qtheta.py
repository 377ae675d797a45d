import cmath
import math

import numpy as np
import pytest

from oracles import mp_gauss_sum, mp_qexp, mp_qexp_zero
from zeroloc.errors import ChainViolation, InputError, NonPrimitiveMu, TrustRadiusExceeded
from zeroloc.grommer import split_series
from zeroloc.qtheta import (
    MU8,
    QSpec,
    admissible_mus,
    build_chain,
    chi_parts,
    conjecture_report,
    eight_term_parts,
    gauss_nu,
    i_power_transform,
    interlacing_check,
    negative_q_check,
    ode_residual,
    phi_even_odd_at,
    qexp_coeffs,
    qexp_polynomial,
    qexp_series,
    ratio_value,
    representation_residual,
    rotated_qexp,
    self_interlacing_ratio,
    two_term_form,
    two_term_sign_resolution,
)
from zeroloc.roots import find_roots
from zeroloc.verdict import quadrant_of, verify_distribution

# multiprecision roots of chi_e and chi_o at rho = 0.8 (mpmath.findroot on the full sums)
CHI_E_ZEROS_08 = [2.696103557058966, 42.01894961140467, 246.92634849048315, 1095.6067039385264, 4223.513140676197]
CHI_O_ZEROS_08 = [13.606342976606353, 107.263316453112, 532.2258018238771, 2179.7057853874526, 8012.917283827764]
# first zero of F(z; -1/2), multiprecision
LAMBDA0_HALF = -0.8372840632838171
# |F'(3) - F(-3/2)| of the N = 8 truncation at q = -1/2; the trust radius there is 1
ODE_RESIDUAL_N8_Z3 = 2.368327756130384e-12


def sample_points(radius: float, n: int = 20, seed: int = 0) -> list[complex]:
    rng = np.random.default_rng(seed)
    u, v = rng.random((2, n))
    return [radius * math.sqrt(a) * cmath.exp(2j * math.pi * b) for a, b in zip(u, v)]


class TestSeries:
    def test_exponential(self):
        np.testing.assert_allclose(qexp_coeffs(1, 5), [1, 1, 1 / 2, 1 / 6, 1 / 24, 1 / 120], rtol=1e-15)

    def test_cos_plus_sin(self):
        np.testing.assert_allclose(qexp_coeffs(-1, 4), [1, 1, -1 / 2, -1 / 6, 1 / 24], rtol=1e-15)

    @pytest.mark.parametrize("q", [0.3, -0.9, 0.5j, cmath.exp(0.7j)])
    def test_first_two_coefficients(self, q):
        assert list(qexp_coeffs(q, 10)[:2]) == [1, 1]

    def test_against_multiprecision_sum(self):
        for q in (0.7, -0.4, 0.6j):
            c = qexp_series(QSpec(q, 80)).coeffs
            for z in (0.5, -2 + 1j, 3j):
                assert abs(np.polyval(c[::-1], z) - complex(mp_qexp(q, z))) < 1e-13 * max(1, abs(complex(mp_qexp(q, z))))

    def test_polynomial(self):
        np.testing.assert_array_equal(qexp_polynomial(2, 0.3).coeffs, [1, 2, 0.3])
        np.testing.assert_array_equal(qexp_polynomial(1, 0.3).coeffs, [1, 1])
        np.testing.assert_array_equal(qexp_polynomial(3, -1).coeffs, [1, 3, -3, -1])
        assert qexp_polynomial(3, -1).trust_radius == math.inf

    @pytest.mark.parametrize("q, N", [(0, 20), (1.5, 20), (0.5, 4), (0.5, 8.5)])
    def test_bad_spec(self, q, N):
        with pytest.raises(InputError):
            QSpec(q, N)


class TestOde:
    def test_exponential(self):
        assert ode_residual(QSpec(1, 30), sample_points(1.0)) < 1e-12

    def test_half(self):
        assert ode_residual(QSpec(0.5, 40), sample_points(2.0)) < 1e-12

    def test_guard_refuses_points_outside_the_trust_disk(self):
        assert qexp_series(QSpec(-0.5, 8)).trust_radius == pytest.approx(1.0)
        with pytest.raises(TrustRadiusExceeded):
            ode_residual(QSpec(-0.5, 8), [3])

    def test_unchecked_residual(self):
        res = ode_residual(QSpec(-0.5, 8), [3], check_trust=False)
        assert res == pytest.approx(ODE_RESIDUAL_N8_Z3, rel=1e-6)


class TestChi:
    def test_rho_one(self):
        e, o = chi_parts(1.0, 10)
        np.testing.assert_allclose(e.coeffs, [1 / math.factorial(2 * n) for n in range(11)], rtol=1e-14)
        np.testing.assert_allclose(o.coeffs, [1 / math.factorial(2 * n + 1) for n in range(11)], rtol=1e-14)

    @pytest.mark.parametrize("rho", [0.2, 0.8])
    def test_leading_terms(self, rho):
        e, o = chi_parts(rho, 10)
        assert e.coeffs[0] == 1 and o.coeffs[0] == 1
        assert e.coeffs[1] == pytest.approx(rho / 2)
        assert o.coeffs[1] == pytest.approx(rho**3 / 6)

    def test_rho_out_of_range(self):
        with pytest.raises(InputError):
            chi_parts(1.2, 10)


class TestInterlacing:
    def test_rho_one_plain_interlacing(self):
        chain = interlacing_check(1.0, 60, 3)
        assert chain.betas == pytest.approx([(math.pi / 2) ** 2, (3 * math.pi / 2) ** 2, (5 * math.pi / 2) ** 2])
        assert chain.alphas == pytest.approx([math.pi**2, (2 * math.pi) ** 2, (3 * math.pi) ** 2])
        assert len(chain.chain) == 6 and chain.holds

    def test_rho_08(self):
        chain = interlacing_check(0.8, 60, 5)
        assert chain.betas == pytest.approx(CHI_E_ZEROS_08, rel=1e-12)
        assert chain.alphas == pytest.approx(CHI_O_ZEROS_08, rel=1e-12)
        assert len(chain.chain) == 20 and chain.holds
        assert chain.min_margin > 1e-6

    def test_rho_099_tight(self):
        chain = interlacing_check(0.99, 80, 3)
        assert chain.holds
        assert 0 < chain.min_margin < 0.05

    def test_broken_chain_reported(self):
        chain = build_chain([1.0, 5.0], [1.2, 6.0], 0.8)
        assert not chain.holds


class TestNegativeQ:
    def test_rho_one(self):
        report = negative_q_check(1.0, 40, 4)
        expected = [-math.pi / 4, 3 * math.pi / 4, -5 * math.pi / 4, 7 * math.pi / 4]
        assert [z.real for z in report.zeros] == pytest.approx(expected, abs=1e-10)

    def test_rho_half(self):
        report = negative_q_check(0.5, 80, 8)
        assert report.ok and report.alternating
        assert report.zeros[0].real == pytest.approx(LAMBDA0_HALF, abs=1e-13)
        assert complex(report.zeros[0]) == pytest.approx(mp_qexp_zero(-0.5, -0.8), abs=1e-13)
        assert min(report.ratio_margins) > 0

    def test_rho_09(self):
        report = negative_q_check(0.9, 100, 8)
        assert report.ok
        ratios = [abs(b) / abs(a) for a, b in zip(report.zeros[:-1], report.zeros[1:])]
        assert min(ratios) > 1 / 0.9


class TestSelfInterlacing:
    def test_rho_one_real(self):
        phi = qexp_coeffs(1.0, 60)
        for x in (0.3, 1.1, 2.5):
            v = ratio_value(phi, x)
            assert v.imag == pytest.approx(0, abs=1e-14)
            # cosh(ix) / (i sinh(ix)) = -cot x
            assert v.real == pytest.approx(-math.cos(x) / math.sin(x), rel=1e-12)

    def test_pole_at_origin(self):
        assert ratio_value(qexp_coeffs(0.5, 60), 0.0).real == math.inf

    @pytest.mark.parametrize("rho", [0.5, 1.0])
    def test_sign_flips_at_zeros(self, rho):
        report = self_interlacing_ratio(rho, 80)
        assert report.ok and report.sign_flips and report.monotone


class TestGaussSums:
    def test_n1(self):
        d = gauss_nu(1, -1)
        assert d.nu == pytest.approx(1)

    def test_n2(self):
        d = gauss_nu(2, 1j)
        assert d.nu == pytest.approx((1 - 1j) / 2, abs=1e-15)
        assert d.nu_tilde == pytest.approx((1 + 1j) / 2, abs=1e-15)
        assert abs(d.nu) == pytest.approx(1 / math.sqrt(2))

    def test_n3(self):
        assert abs(gauss_nu(3, cmath.exp(1j * math.pi / 3)).nu) == pytest.approx(1 / math.sqrt(3), abs=1e-15)

    @pytest.mark.parametrize("n", range(1, 13))
    def test_against_multiprecision(self, n):
        for p, mu in admissible_mus(n):
            d = gauss_nu(n, mu)
            assert d.nu == pytest.approx(1 / mp_gauss_sum(n, (2 * p + 1) / n), abs=1e-13)
            assert d.modulus_residual < 1e-12 and d.fourth_power_residual < 1e-10

    def test_admissible_counts(self):
        # odd k in [1, 2n) coprime to n: Euler phi(2n) choices
        assert [len(admissible_mus(n)) for n in (1, 2, 3, 4, 8, 12)] == [1, 2, 2, 4, 8, 8]

    @pytest.mark.parametrize("n, mu", [(4, 1j), (3, -1), (6, cmath.exp(1j * math.pi / 2)), (4, 1.01j)])
    def test_not_primitive(self, n, mu):
        with pytest.raises(NonPrimitiveMu):
            gauss_nu(n, mu)


class TestRepresentations:
    def test_origin(self):
        r = representation_residual(4, MU8, 0.7, [0j], 80)
        assert r.max() < 1e-15

    @pytest.mark.parametrize("n", [2, 3, 4, 8])
    def test_random_points(self, n):
        zs = sample_points(2.0)
        for _, mu in admissible_mus(n):
            r = representation_residual(n, mu, 0.7, zs, 80)
            assert r.max() < 1e-9, r

    def test_two_term_sign(self):
        phi = qexp_coeffs(0.5, 80)
        target = complex(mp_qexp(-0.5, 1.0))
        assert abs(two_term_form(phi, 1.0) - target) < 1e-10
        assert abs(two_term_form(phi, 1.0, sign=+1) - target) > 1e-3

    def test_sign_resolution(self):
        res = two_term_sign_resolution(0.7, sample_points(2.0), 80)
        assert res.orders_of_magnitude >= 6

    def test_eight_term_needs_n_multiple_of_eight(self):
        with pytest.raises(InputError):
            eight_term_parts(qexp_coeffs(0.5, 40), gauss_nu(4, MU8), 1.0)

    def test_eight_term_even_part(self):
        phi = qexp_coeffs(0.7, 80)
        d = gauss_nu(8, cmath.exp(1j * math.pi / 8))
        F = qexp_coeffs(0.7 * d.mu**2, 80)
        z = 0.9 - 0.4j
        Fe, Fo = phi_even_odd_at(F, z)
        ge, go = eight_term_parts(phi, d, z)
        assert abs(Fe - ge) < 1e-12 and abs(Fo - go) < 1e-12


class TestRotation:
    def test_i_power_examples(self):
        np.testing.assert_allclose(i_power_transform([1, 1, 1, 1]).coeffs, [1, 1, 1j, -1j], atol=1e-16)
        np.testing.assert_array_equal(i_power_transform([1], alpha=2).coeffs, [2])

    def test_i_power_rejects(self):
        with pytest.raises(InputError):
            i_power_transform([0, 1])

    @pytest.mark.parametrize("rho", [0.4, 0.7])
    def test_rotated_parts_are_real_with_c_minus_conj_mu(self, rho):
        parts = split_series(rotated_qexp(rho, 100).coeffs)
        assert parts.c == pytest.approx(-MU8.conjugate(), abs=1e-14)

    @pytest.mark.parametrize("rho", [0.4, 0.7])
    def test_rotated_function_is_case_2(self, rho):
        series = rotated_qexp(rho, 100)
        zeros = find_roots(series)
        parts = split_series(series.coeffs)
        report = verify_distribution(type(zeros)(tuple(zeros.entries[:8])), parts.c, parts.j)
        assert report.case == 2 and report.overall
        assert [quadrant_of(z) for z in report.ordering[:4]] == [3, 2, 1, 4]


class TestConjecture:
    def test_negative_real(self):
        rep = conjecture_report(QSpec(-0.6, 80), 8)
        assert rep.all_simple and rep.distinct_moduli and not rep.exploratory
        assert all(abs(z.imag) < 1e-8 * abs(z) for z in rep.zeros)
        assert [z.real > 0 for z in rep.zeros] == [False, True] * 4

    def test_imaginary_q(self):
        rep = conjecture_report(QSpec(0.6 * MU8**2, 80), 8)
        assert rep.all_simple and rep.distinct_moduli
        rotated = [quadrant_of(z * MU8) for z in rep.zeros]
        assert rotated[:4] == [3, 2, 1, 4]

    def test_exponential_empty(self):
        rep = conjecture_report(QSpec(1.0, 80), 8)
        assert rep.zeros == [] and "no zeros" in rep.note
