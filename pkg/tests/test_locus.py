import cmath
import math
import time

import numpy as np
import pytest

from zeroloc.errors import DegenerateMonotonicity, SingularRadius
from zeroloc.locus import (
    LocusSample,
    check_arg_monotone,
    first_crossing,
    l_of_r,
    locate_c_points,
    trace_branch,
    u_value,
)
from zeroloc.model import build_structured, eval_R
from zeroloc.roots import zeros_of_structured

OCTIC = (60, [2, 2.5, 3, 4], 5 * (1 + 1j), 0, [1, 5])
# unwrapped arg span of the octic branch over r in [0.1, 6], from a 400-point trace
OCTIC_ARG_SPAN = 12.566370614359172

QUAD = build_structured(1, [1], 1, 0, [])  # F = 1 + z + z^2


def quad_l(r: float) -> float:
    """Closed form for 1 + z + z^2: |1 + r^2 e^{2i phi}| = r gives cos 2phi."""
    cos2 = (r * r - 1 - r**4) / (2 * r * r)
    if cos2 <= -1:
        return math.pi / 2
    return 0.5 * math.acos(cos2)


class TestU:
    def test_examples(self):
        assert u_value(build_structured(1, [], 1, 0, []), 2) == pytest.approx(math.log(0.5))
        assert u_value(QUAD, 1j * (math.sqrt(5) - 1) / 2) == pytest.approx(0, abs=1e-15)
        assert u_value(QUAD, 1) == pytest.approx(math.log(2))


class TestLOfR:
    def test_small_r(self):
        assert l_of_r(QUAD, 0.01) == math.pi / 2

    def test_branch_point(self):
        assert l_of_r(QUAD, 1.0) == pytest.approx(math.pi / 3, abs=1e-12)

    @pytest.mark.parametrize("r", [0.2, 0.62, 0.7, 0.9, 1.3, 1.61, 2.5, 7.0])
    def test_closed_form(self, r):
        assert l_of_r(QUAD, r) == pytest.approx(quad_l(r), abs=1e-11)

    def test_degenerate(self):
        with pytest.raises(DegenerateMonotonicity):
            l_of_r(build_structured(1, [], 1, 0, []), 1.0)

    @pytest.mark.parametrize("r", [0.0, -1.0, math.inf, math.nan])
    def test_bad_radius(self, r):
        with pytest.raises(SingularRadius):
            l_of_r(QUAD, r)

    def test_u_vanishes_on_the_curve(self):
        S = build_structured(*OCTIC)
        for r in (0.5, 1.1, 1.9, 2.4):
            phi = l_of_r(S, r)
            if 0 < phi < math.pi / 2:
                assert u_value(S, r * cmath.exp(1j * phi)) == pytest.approx(0, abs=1e-10)


class TestTraceBranch:
    def test_near_origin_on_imaginary_axis(self):
        samples = trace_branch(QUAD, 0.01, 0.6, 50)
        assert all(s.phi == math.pi / 2 for s in samples)
        assert all(s.arg_unwrapped == pytest.approx(-math.pi / 2, abs=1e-12) for s in samples)

    def test_grows_only_off_the_axes(self):
        samples = trace_branch(QUAD, 0.01, 3, 300)
        assert check_arg_monotone(samples).ok
        for a, b in zip(samples[:-1], samples[1:]):
            if b.arg_unwrapped - a.arg_unwrapped > 1e-9:
                assert not (a.flat and b.flat and a.phi == b.phi)

    def test_octic_span(self):
        samples = trace_branch(build_structured(*OCTIC), 0.1, 6, 400)
        assert check_arg_monotone(samples).ok
        span = samples[-1].arg_unwrapped - samples[0].arg_unwrapped
        assert span == pytest.approx(OCTIC_ARG_SPAN, abs=1e-9)

    def test_unwrapped_matches_principal(self):
        S = build_structured(*OCTIC)
        for s in trace_branch(S, 0.1, 6, 60)[::7]:
            if s.flat and s.phi == 0.0 and s.r in (1.0, math.sqrt(5)):
                continue
            R = eval_R(S, s.z)
            assert cmath.phase(R * cmath.exp(-1j * s.arg_unwrapped)) == pytest.approx(0, abs=1e-9)

    def test_bad_range(self):
        with pytest.raises(ValueError):
            trace_branch(QUAD, 2, 1)


class TestCPoints:
    def test_quadratic(self):
        pts = locate_c_points(QUAD, 0.1, 3)
        locs = sorted((p.location for p in pts), key=lambda z: z.imag)
        assert locs == pytest.approx([cmath.exp(-2j * math.pi / 3), cmath.exp(2j * math.pi / 3)], abs=1e-10)
        assert eval_R(QUAD, cmath.exp(2j * math.pi / 3)) == pytest.approx(-1, abs=1e-15)

    def test_octic_matches_solver(self):
        S = build_structured(*OCTIC)
        start = time.perf_counter()
        pts = locate_c_points(S, 0.1, 6)
        assert time.perf_counter() - start < 5
        zeros = zeros_of_structured(S).locations
        assert len(pts) == 8
        for p in pts:
            assert np.min(np.abs(zeros - p.location)) < 1e-8
            assert p.residual < 1e-10

    def test_degenerate(self):
        with pytest.raises(DegenerateMonotonicity):
            locate_c_points(build_structured(1, [], 1, 0, []), 0.1, 2)


def synthetic(args, phis=None):
    phis = phis or [0.7] * len(args)
    return [LocusSample(1 + k, p, 0.0, a) for k, (a, p) in enumerate(zip(args, phis))]


class TestMonotone:
    def test_monotone(self):
        assert check_arg_monotone(synthetic([0, 0.1, 0.1, 0.5])).ok

    def test_one_decrease(self):
        report = check_arg_monotone(synthetic([0, 0.3, 0.2, 0.5]))
        assert len(report.decreases) == 1
        assert report.decreases[0][1] == pytest.approx(-0.1)

    def test_flat_drift(self):
        report = check_arg_monotone(synthetic([0, 0.2], [math.pi / 2, math.pi / 2]))
        assert not report.ok and len(report.flat_drifts) == 1


class TestFirstCrossing:
    @pytest.mark.parametrize("j", [0, 1, 2, 3])
    def test_on_imaginary_axis(self, j):
        S = build_structured(1.3, [0.5, 2.0], 0.8 * cmath.exp(0.4j), j, [1.5])
        fc = first_crossing(S)
        assert fc.on_imaginary_axis
        assert fc.arg_matches
        assert fc.expected_arg == (-1) ** (j + 1) * math.pi / 2

    def test_literal_angle_reading(self):
        # read as an angle, (-1)^(j+1) pi/2 is -pi/2 for even j, which l never takes
        S = build_structured(1, [1], 1, 0, [])
        assert not first_crossing(S).literal_matches
        S = build_structured(1, [1], 1, 1, [])
        assert first_crossing(S).literal_matches
