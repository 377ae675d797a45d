"""Factorized even/odd pairs, the composite function F and the ratio R.

A structured function is given by

    f(w) = f0 * prod(1 + w / b_mu)          (zeros at -b_mu < 0)
    g(w) = g0 * w**j * prod(1 - w / a_nu)   (zeros at +a_nu > 0, and 0 if j > 0)

and defines F(z) = f(z**2) + z * g(z**2). Its zeros are the solutions of
R(z) = c where R(z) = -c f(z**2) / (z g(z**2)) and |c| = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateConstantPair,
    EvaluationOverflow,
    NonpositiveFactor,
    OriginInput,
    PoleAtInput,
    SingularInput,
    ZeroLeadingCoefficient,
)

PROVENANCES = ("structured-expansion", "q-exponential", "user")
EXACT_PROVENANCES = ("structured-expansion", "user")

# eval_R refuses points with |z**2 - a| below this multiple of (1 + a)
POLE_GUARD = 1e-13


@dataclass(frozen=True)
class StructuredFunction:
    f0: complex
    b: tuple[float, ...]
    g0: complex
    j: int
    a: tuple[float, ...]

    @property
    def is_constant_pair(self) -> bool:
        """True when both f and z**j g are constants (only allowed for j = 0)."""
        return not self.b and not self.a and self.j == 0

    @property
    def degree(self) -> int:
        return max(2 * len(self.b), 2 * len(self.a) + 2 * self.j + 1)

    def as_dict(self) -> dict:
        return {
            "f0": [self.f0.real, self.f0.imag],
            "b": list(self.b),
            "g0": [self.g0.real, self.g0.imag],
            "j": self.j,
            "a": list(self.a),
        }


@dataclass(frozen=True)
class SeriesFunction:
    """Truncated power series c_0 + c_1 z + ... + c_N z**N.

    Use :func:`make_series` to build one; it fills in the trust radius.
    """

    coeffs: np.ndarray
    trust_radius: float
    provenance: str = "user"
    tail_bound: float = field(default=0.0, compare=False)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_exact(self) -> bool:
        """Finite polynomials are exact; only q-exponential truncations have a tail."""
        return self.provenance in EXACT_PROVENANCES

    def __call__(self, z):
        return eval_series(self.coeffs, z)

    def derivative(self) -> "SeriesFunction":
        k = np.arange(1, len(self.coeffs))
        d = self.coeffs[1:] * k if len(self.coeffs) > 1 else np.zeros(1, complex)
        return make_series(d, self.provenance)


def _complex(x, name: str) -> complex:
    z = complex(x)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{name} must be finite, got {x!r}")
    return z


def build_structured(f0, b_list: Sequence[float], g0, j: int,
                     a_list: Sequence[float], allow_degenerate: bool = False) -> StructuredFunction:
    """Validate the factorized data and return a :class:`StructuredFunction`.

    With both factor lists empty and j > 0 the function f0 + g0 z**(2j+1) lies
    outside the class the zero-distribution results cover; it is refused
    unless ``allow_degenerate`` is set (evaluation and expansion still work).
    """
    f0 = _complex(f0, "f0")
    g0 = _complex(g0, "g0")
    if f0 == 0:
        raise ZeroLeadingCoefficient("f0 must be nonzero")
    if g0 == 0:
        raise ZeroLeadingCoefficient("g0 must be nonzero")
    if isinstance(j, bool) or int(j) != j or j < 0:
        raise ValueError(f"j must be a nonnegative integer, got {j!r}")
    b = tuple(float(x) for x in b_list)
    a = tuple(float(x) for x in a_list)
    for name, values in (("b", b), ("a", a)):
        for x in values:
            if not (math.isfinite(x) and x > 0):
                raise NonpositiveFactor(f"every {name} factor must be a positive real, got {x!r}")
    if not b and not a and j > 0 and not allow_degenerate:
        raise DegenerateConstantPair(
            "f and z**j g are both constant; only j = 0 is admissible"
        )
    return StructuredFunction(f0, b, g0, int(j), a)


def constant_c(S: StructuredFunction) -> complex:
    """c = -(g0/|g0|) * (|f0|/f0), a number of modulus one."""
    return -(S.g0 / abs(S.g0)) * (abs(S.f0) / S.f0)


def _check_finite(value, what: str):
    if not np.all(np.isfinite(value)):
        raise EvaluationOverflow(f"{what} overflowed double precision")
    return value


def _f_of(S: StructuredFunction, w):
    out = S.f0 * np.ones_like(w)
    for bm in S.b:
        out = out * (1 + w / bm)
    return out


def _g_of(S: StructuredFunction, w):
    out = S.g0 * w**S.j if S.j else S.g0 * np.ones_like(w)
    for an in S.a:
        out = out * (1 - w / an)
    return out


def _scalar_or_array(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def eval_F(S: StructuredFunction, z):
    """F(z) = f(z**2) + z g(z**2); accepts scalars or arrays."""
    arr, scalar = _scalar_or_array(z)
    w = arr * arr
    with np.errstate(over="ignore", invalid="ignore"):
        out = _f_of(S, w) + arr * _g_of(S, w)
    _check_finite(out, "F")
    return complex(out) if scalar else out


def _product_derivative(w, scale, roots_inv, sign):
    """Value and derivative of scale * prod(1 + sign * w * r) by the product rule."""
    value = scale * np.ones_like(w)
    deriv = np.zeros_like(w)
    for r in roots_inv:
        factor = 1 + sign * w * r
        deriv = deriv * factor + value * (sign * r)
        value = value * factor
    return value, deriv


def eval_dF(S: StructuredFunction, z):
    """F'(z) = 2z f'(z**2) + g(z**2) + 2 z**2 g'(z**2), assembled factor by factor."""
    arr, scalar = _scalar_or_array(z)
    w = arr * arr
    with np.errstate(over="ignore", invalid="ignore"):
        f, df = _product_derivative(w, S.f0, [1 / bm for bm in S.b], +1)
        h, dh = _product_derivative(w, S.g0, [1 / an for an in S.a], -1)
        if S.j:
            g = w**S.j * h
            dg = S.j * w ** (S.j - 1) * h + w**S.j * dh
        else:
            g, dg = h, dh
        out = 2 * arr * df + g + 2 * w * dg
    _check_finite(out, "F'")
    return complex(out) if scalar else out


def _R_unchecked(S: StructuredFunction, z):
    w = z * z
    num = abs(S.f0) * np.ones_like(w)
    for bm in S.b:
        num = num * (1 + w / bm)
    den = abs(S.g0) * z ** (2 * S.j + 1)
    for an in S.a:
        den = den * (1 - w / an)
    return num / den


def eval_R(S: StructuredFunction, z) -> complex:
    z = complex(z)
    if z == 0:
        raise OriginInput("R has a pole of order 2j+1 at the origin")
    w = z * z
    for an in S.a:
        if abs(w - an) < POLE_GUARD * (1 + an):
            raise PoleAtInput(f"z**2 = {w} is within the pole guard of a = {an}")
    value = complex(_R_unchecked(S, np.complex128(z)))
    _check_finite(value, "R")
    return value


def eval_log_deriv_R(S: StructuredFunction, z) -> complex:
    """R'/R = sum 2z/(b+z**2) + sum 2z/(a-z**2) - (2j+1)/z."""
    z = complex(z)
    if z == 0:
        raise SingularInput("log-derivative of R is singular at the origin")
    w = z * z
    total = -(2 * S.j + 1) / z
    for bm in S.b:
        if abs(w + bm) < POLE_GUARD * (1 + bm):
            raise SingularInput(f"z**2 = {w} hits the zero -b = {-bm}")
        total += 2 * z / (bm + w)
    for an in S.a:
        if abs(w - an) < POLE_GUARD * (1 + an):
            raise SingularInput(f"z**2 = {w} hits the pole a = {an}")
        total += 2 * z / (an - w)
    return total


def _poly_from_factors(lead: complex, roots_inv, sign) -> np.ndarray:
    coeffs = np.array([lead], dtype=complex)
    for r in roots_inv:
        coeffs = np.convolve(coeffs, np.array([1.0, sign * r], dtype=complex))
    return coeffs


def expand_to_series(S: StructuredFunction) -> SeriesFunction:
    """Coefficients of F as an exact polynomial (low order first)."""
    f = _poly_from_factors(S.f0, [1 / bm for bm in S.b], +1)
    g = _poly_from_factors(S.g0, [1 / an for an in S.a], -1)
    out = np.zeros(S.degree + 1, dtype=complex)
    out[0 : 2 * len(f) : 2] += f
    start = 2 * S.j + 1
    out[start : start + 2 * len(g) : 2] += g
    return make_series(out, "structured-expansion")


def split_even_odd(series: SeriesFunction) -> tuple[SeriesFunction, SeriesFunction]:
    """E, O with F(z) = E(z**2) + z O(z**2)."""
    c = series.coeffs
    even = c[0::2].copy()
    odd = c[1::2].copy()
    if odd.size == 0:
        odd = np.zeros(1, dtype=complex)

    def part(c):
        if np.any(c != 0):
            return make_series(c, series.provenance)
        c.setflags(write=False)
        return SeriesFunction(c, math.inf, series.provenance)

    return part(even), part(odd)


def eval_series(coeffs, z):
    """Horner evaluation of a low-order-first coefficient vector."""
    arr, scalar = _scalar_or_array(z)
    out = np.zeros_like(arr)
    for c in coeffs[::-1]:
        out = out * arr + c
    return complex(out) if scalar else out


def make_series(coeffs, provenance: str = "user") -> SeriesFunction:
    """Build a :class:`SeriesFunction` and attach its trust radius."""
    from .roots import trust_disk_of_coeffs

    if provenance not in PROVENANCES:
        raise ValueError(f"unknown provenance {provenance!r}")
    c = np.array(coeffs, dtype=complex).ravel()
    if c.size == 0 or not np.any(c != 0):
        raise ValueError("a series needs at least one nonzero coefficient")
    if not np.all(np.isfinite(c)):
        raise ValueError("series coefficients must be finite")
    c.setflags(write=False)
    disk = trust_disk_of_coeffs(c, exact=provenance in EXACT_PROVENANCES)
    return SeriesFunction(c, disk.radius, provenance, disk.tail_bound)
