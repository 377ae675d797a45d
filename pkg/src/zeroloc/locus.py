"""Level-curve machinery for u = ln|R| in the closed first quadrant.

For fixed r the map phi -> u(r e^{i phi}) is strictly decreasing on
(0, pi/2), so the curve u = 0 is a graph phi = l(r) over r, with flat pieces
where it sticks to one of the axes. Along that graph arg R is continuous and
non-decreasing; zeros of F in the four quadrants are recovered as the radii
where the unwrapped arg hits one of four target angles built from arg c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMonotonicity, SingularInput, SingularRadius, UnresolvedJump
from .model import StructuredFunction, _R_unchecked, constant_c, eval_F, eval_R
from .roots import structured_scale
from .verdict import quadrant_of

HALF_PI = 0.5 * math.pi
PHI_TOL = 1e-12
PUNCTURE = 1e-9
MAX_DEPTH = 12
MONOTONE_TOL = 1e-9


@dataclass(frozen=True)
class LocusSample:
    r: float
    phi: float
    u_residual: float
    arg_unwrapped: float

    @property
    def z(self) -> complex:
        return self.r * complex(math.cos(self.phi), math.sin(self.phi))

    @property
    def flat(self) -> bool:
        return self.phi == 0.0 or self.phi == HALF_PI


@dataclass(frozen=True)
class CPoint:
    location: complex
    quadrant: object
    target: int  # which of the four problems: R(z) = c, -conj c, -c, conj c
    residual: float


@dataclass
class MonotoneReport:
    decreases: list[tuple[int, float]] = field(default_factory=list)
    flat_drifts: list[tuple[int, float]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.decreases and not self.flat_drifts


@dataclass(frozen=True)
class FirstCrossing:
    r: float
    l: float
    arg: float
    expected_arg: float
    literal_l: float  # the value (-1)**(j+1) * pi/2 read as an angle

    @property
    def on_imaginary_axis(self) -> bool:
        return self.l == HALF_PI

    @property
    def arg_matches(self) -> bool:
        return abs(self.arg - self.expected_arg) < 1e-10

    @property
    def literal_matches(self) -> bool:
        return abs(self.l - self.literal_l) < 1e-12


def u_value(S: StructuredFunction, z) -> float:
    R = eval_R(S, z)
    if R == 0:
        raise SingularInput(f"R vanishes at {z}")
    return math.log(abs(R))


def _u_limit(S: StructuredFunction, z: complex) -> float:
    """ln|R| with zeros and poles of R mapped to -inf and +inf."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        R = complex(_R_unchecked(S, np.complex128(z)))
    a = abs(R)
    if a == 0:
        return -math.inf
    if not math.isfinite(a):
        return math.inf
    return math.log(a)


def _check_nondegenerate(S: StructuredFunction):
    if S.is_constant_pair:
        raise DegenerateMonotonicity("u does not depend on the angle when f and g are constants")


def l_of_r(S: StructuredFunction, r: float) -> float:
    """The angle of the curve u = 0 on the circle |z| = r, in [0, pi/2]."""
    _check_nondegenerate(S)
    if not (math.isfinite(r) and r > 0):
        raise SingularRadius(f"radius must be positive and finite, got {r}")
    if _u_limit(S, complex(r, 0.0)) <= 0:
        return 0.0
    if _u_limit(S, complex(0.0, r)) >= 0:
        return HALF_PI
    lo, hi = 0.0, HALF_PI
    while hi - lo > PHI_TOL:
        mid = 0.5 * (lo + hi)
        if _u_limit(S, r * complex(math.cos(mid), math.sin(mid))) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _point(r: float, phi: float) -> complex:
    if phi == HALF_PI:
        return complex(0.0, r)
    return r * complex(math.cos(phi), math.sin(phi))


def _principal_arg_R(S: StructuredFunction, z: complex) -> float:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        R = complex(_R_unchecked(S, np.complex128(z)))
    return math.atan2(R.imag, R.real)


def _wrap(x: float) -> float:
    return (x + math.pi) % (2 * math.pi) - math.pi


def _raw_sample(S: StructuredFunction, r: float):
    phi = l_of_r(S, r)
    z = _point(r, phi)
    return r, phi, _u_limit(S, z), _principal_arg_R(S, z)


def _singular_moduli(S: StructuredFunction) -> list[float]:
    return sorted(math.sqrt(x) for x in (*S.a, *S.b))


def _grid(S: StructuredFunction, r_min: float, r_max: float, n: int) -> list[float]:
    grid = list(np.geomspace(r_min, r_max, n))
    for s in _singular_moduli(S):
        if r_min < s < r_max:
            grid = [r for r in grid if abs(r - s) > PUNCTURE * s]
            grid += [s * (1 - PUNCTURE), s * (1 + PUNCTURE)]
    return sorted(set(grid))


def trace_branch(S: StructuredFunction, r_min: float, r_max: float,
                 n_samples: int = 400) -> list[LocusSample]:
    """Samples (r, l(r)) on a geometric grid with arg R continued along the curve."""
    _check_nondegenerate(S)
    if not (0 < r_min < r_max) or n_samples < 2:
        raise ValueError("need 0 < r_min < r_max and n_samples >= 2")
    raw = [_raw_sample(S, r) for r in _grid(S, r_min, r_max, n_samples)]

    def refine(left, right, depth):
        if abs(_wrap(right[3] - left[3])) <= HALF_PI:
            return []
        if depth >= MAX_DEPTH:
            raise UnresolvedJump(
                f"arg R jumps by more than pi/2 between r={left[0]:.12g} and r={right[0]:.12g}"
            )
        mid = _raw_sample(S, math.sqrt(left[0] * right[0]))
        return refine(left, mid, depth + 1) + [mid] + refine(mid, right, depth + 1)

    dense = [raw[0]]
    for left, right in zip(raw[:-1], raw[1:]):
        dense += refine(left, right, 0)
        dense.append(right)
    out = []
    prev = None
    for r, phi, u, arg in dense:
        unwrapped = arg if prev is None else prev + _wrap(arg - prev)
        out.append(LocusSample(r, phi, u if math.isfinite(u) else math.copysign(1e308, u), unwrapped))
        prev = unwrapped
    return out


def check_arg_monotone(samples: list[LocusSample], tol: float = MONOTONE_TOL) -> MonotoneReport:
    report = MonotoneReport()
    for i in range(len(samples) - 1):
        a, b = samples[i], samples[i + 1]
        delta = b.arg_unwrapped - a.arg_unwrapped
        if delta < -tol:
            report.decreases.append((i, delta))
        if a.flat and b.flat and a.phi == b.phi and abs(delta) >= tol:
            report.flat_drifts.append((i, delta))
    return report


def _targets(c: complex) -> list[float]:
    t = math.atan2(c.imag, c.real)
    return [t, math.pi - t, math.pi + t, -t]


_MAPS = (
    lambda z: z,
    lambda z: -z.conjugate(),
    lambda z: -z,
    lambda z: z.conjugate(),
)


def _arg_near(S, r, reference):
    phi = l_of_r(S, r)
    z = _point(r, phi)
    return reference + _wrap(_principal_arg_R(S, z) - reference), z


def _bisect_crossing(S, left: LocusSample, right: LocusSample, target: float) -> complex:
    lo, hi = left.r, right.r
    z_hi = right.z
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        arg, z = _arg_near(S, mid, left.arg_unwrapped)
        if arg < target:
            lo = mid
        else:
            hi, z_hi = mid, z
    return z_hi


def locate_c_points(S: StructuredFunction, r_min: float, r_max: float,
                    n_samples: int = 400) -> list[CPoint]:
    """Zeros of F obtained from crossings of the unwrapped arg with the four targets."""
    samples = trace_branch(S, r_min, r_max, n_samples)
    c = constant_c(S)
    found: list[CPoint] = []
    for left, right in zip(samples[:-1], samples[1:]):
        a, b = left.arg_unwrapped, right.arg_unwrapped
        if b - a <= MONOTONE_TOL:
            continue
        for problem, base in enumerate(_targets(c)):
            k = math.ceil((a + MONOTONE_TOL - base) / (2 * math.pi))
            target = base + 2 * math.pi * k
            while target <= b:
                z1 = _bisect_crossing(S, left, right, target)
                z = _MAPS[problem](z1)
                residual = abs(eval_F(S, z)) / structured_scale(S, z)
                if not any(abs(p.location - z) <= 1e-8 * max(1.0, abs(z)) for p in found):
                    found.append(CPoint(z, quadrant_of(z), problem + 1, residual))
                target += 2 * math.pi
    found.sort(key=lambda p: (abs(p.location), math.atan2(p.location.imag, p.location.real)))
    return found


def first_crossing(S: StructuredFunction, r_cap: float = 1e6) -> FirstCrossing:
    """Smallest r where the curve u = 0 is reached; l must be pi/2 there."""
    _check_nondegenerate(S)

    def u_im(r):
        return _u_limit(S, complex(0.0, r))

    lo = 1e-8
    while u_im(lo) <= 0:
        lo *= 1e-3
        if lo < 1e-300:
            raise SingularRadius("u(ir) is not positive near the origin")
    hi = math.sqrt(min(S.b)) if S.b else 1.0
    while u_im(hi) > 0:
        hi *= 2
        if hi > r_cap:
            raise SingularRadius("u(ir) stays positive up to the search cap")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if u_im(mid) > 0:
            lo = mid
        else:
            hi = mid
    r = lo
    l = l_of_r(S, r)
    arg = _principal_arg_R(S, _point(r, l))
    sign = 1 if S.j % 2 else -1
    return FirstCrossing(r, l, arg, sign * HALF_PI, sign * HALF_PI)
