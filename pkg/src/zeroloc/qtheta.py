"""The q-exponential F(z; q) = sum q^(k(k-1)/2) z^k / k! and its companions.

F is the solution of F'(z) = F(qz), F(0) = 1. For q**2 real its zeros can be
checked against the distribution theorem: real q through the sign pattern of
real zeros, q = mu**2 rho with mu**4 = -1 through a rotation that turns F into
a structured pair. Roots-of-unity representations express F(z; rho mu**2) as a
combination of rotated copies of Phi = F(.; rho), normalized by a quadratic
Gauss sum.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from math import comb, gcd, lgamma, log
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ChainViolation,
    InputError,
    NonPrimitiveMu,
    PropertyViolation,
    TrustRadiusExceeded,
    ZeroSum,
)
from .model import SeriesFunction, eval_series, make_series
from .roots import ZeroList, find_roots
from .verdict import quadrant_of

TINY = np.finfo(float).tiny
DEFAULT_N = 80
ODE_SAFETY = 0.5
REAL_TOL = 1e-8


@dataclass(frozen=True)
class QSpec:
    q: complex
    N: int = DEFAULT_N

    def __post_init__(self):
        q = complex(self.q)
        if not (0 < abs(q) <= 1 + 1e-15):
            raise InputError(f"|q| must lie in (0, 1], got {abs(q)}")
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 8:
            raise InputError(f"truncation order must be an integer >= 8, got {self.N!r}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "N", int(self.N))


def _flush(c: np.ndarray) -> np.ndarray:
    c[np.abs(c) < TINY] = 0
    return c


def qexp_coeffs(q: complex, N: int) -> np.ndarray:
    """q^(k(k-1)/2) / k! for k = 0..N, accumulated as c_k = c_(k-1) q^(k-1) / k."""
    q = complex(q)
    c = np.zeros(N + 1, dtype=complex)
    c[0] = 1
    qpow = 1 + 0j  # q^(k-1)
    for k in range(1, N + 1):
        c[k] = c[k - 1] * qpow / k
        qpow *= q
    return _flush(c)


def qexp_series(spec: QSpec) -> SeriesFunction:
    return make_series(qexp_coeffs(spec.q, spec.N), "q-exponential")


def qexp_polynomial(N: int, q: complex) -> SeriesFunction:
    """P_N(z; q) = sum binom(N, n) q^(n(n-1)/2) z^n, an exact polynomial."""
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise InputError(f"N must be a positive integer, got {N!r}")
    q = complex(q)
    c = np.array([comb(N, n) * q ** (n * (n - 1) // 2) for n in range(N + 1)], dtype=complex)
    return make_series(c, "user")


def rotate(series: SeriesFunction, w: complex) -> SeriesFunction:
    """The function z -> S(w z)."""
    k = np.arange(len(series.coeffs))
    return make_series(series.coeffs * complex(w) ** k, series.provenance)


def series_ode_residual(coeffs: np.ndarray, q: complex, z: complex) -> float:
    """|F'(z) - F(q z)| for the truncated series."""
    c = np.asarray(coeffs, dtype=complex)
    k = np.arange(len(c))
    dF = eval_series(c[1:] * k[1:], z)
    Fq = eval_series(c * complex(q) ** k, z)
    return abs(dF - Fq)


def ode_residual(spec: QSpec, sample_points: Iterable[complex], check_trust: bool = True) -> float:
    """Largest |F'(z) - F(qz)| over the samples, from the truncated series."""
    S = qexp_series(spec)
    pts = [complex(z) for z in sample_points]
    limit = ODE_SAFETY * S.trust_radius
    if check_trust:
        bad = [z for z in pts if abs(z) > limit]
        if bad:
            raise TrustRadiusExceeded(
                f"sample {bad[0]} lies outside {ODE_SAFETY} x trust radius {S.trust_radius:.6g}"
            )
    return max((series_ode_residual(S.coeffs, spec.q, z) for z in pts), default=0.0)


# ---------------------------------------------------------------------------
# even and odd parts for positive rho


def _power_over_factorial(rho: float, e: int, f: int) -> float:
    if rho == 1:
        return math.exp(-lgamma(f + 1))
    val = e * log(rho) - lgamma(f + 1)
    return math.exp(val) if val > -745 else 0.0


def chi_parts(rho: float, N: int) -> tuple[SeriesFunction, SeriesFunction]:
    """chi_e(z) = Phi_e(sqrt z) and chi_o(z) = Phi_o(sqrt z)/sqrt z for Phi = F(.; rho)."""
    if not (0 < rho <= 1):
        raise InputError(f"rho must lie in (0, 1], got {rho}")
    e = [_power_over_factorial(rho, n * (2 * n - 1), 2 * n) for n in range(N + 1)]
    o = [_power_over_factorial(rho, n * (2 * n + 1), 2 * n + 1) for n in range(N + 1)]
    return (make_series(_flush(np.array(e, dtype=complex)), "q-exponential"),
            make_series(_flush(np.array(o, dtype=complex)), "q-exponential"))


def _negative_real_zeros(series: SeriesFunction, m: int, what: str) -> list[float]:
    zeros = find_roots(series)
    if zeros.count() < m:
        raise TrustRadiusExceeded(
            f"only {zeros.count()} trusted zeros of {what}, {m} requested"
        )
    out = []
    for e in list(zeros)[:m]:
        z = e.location
        if abs(z.imag) > REAL_TOL * abs(z) or z.real >= 0 or e.multiplicity != 1:
            raise PropertyViolation(f"zero {z} of {what} is not simple negative real", report=None)
        out.append(-z.real)
    return out


@dataclass
class InterlacingChain:
    betas: list[float]
    alphas: list[float]
    rho: float
    chain: list[float] = field(default_factory=list)
    labels: list[str] = field(default_factory=list)

    @property
    def gaps(self) -> list[float]:
        """Relative gaps (b - a) / b between consecutive chain members."""
        return [(b - a) / b for a, b in zip(self.chain[:-1], self.chain[1:])]

    @property
    def min_margin(self) -> float:
        return min(self.gaps) if self.gaps else math.inf

    @property
    def holds(self) -> bool:
        return all(b > a for a, b in zip(self.chain[:-1], self.chain[1:]))


def build_chain(betas: Sequence[float], alphas: Sequence[float], rho: float) -> InterlacingChain:
    """beta_1 < rho^-2 beta_1 < alpha_1 < rho^-2 alpha_1 < beta_2 < ... (plain interlacing at rho = 1)."""
    chain, labels = [], []
    s = rho**-2
    for k, (b, a) in enumerate(zip(betas, alphas), start=1):
        if rho == 1:
            chain += [b, a]
            labels += [f"beta{k}", f"alpha{k}"]
        else:
            chain += [b, s * b, a, s * a]
            labels += [f"beta{k}", f"rho^-2 beta{k}", f"alpha{k}", f"rho^-2 alpha{k}"]
    return InterlacingChain(list(betas), list(alphas), rho, chain, labels)


def interlacing_check(rho: float, N: int, m: int) -> InterlacingChain:
    chi_e, chi_o = chi_parts(rho, N)
    betas = _negative_real_zeros(chi_e, m, "chi_e")
    alphas = _negative_real_zeros(chi_o, m, "chi_o")
    chain = build_chain(betas, alphas, rho)
    if not chain.holds:
        i = next(i for i, g in enumerate(chain.gaps) if g <= 0)
        raise ChainViolation(
            f"{chain.labels[i]} = {chain.chain[i]:.15g} is not below "
            f"{chain.labels[i + 1]} = {chain.chain[i + 1]:.15g}",
            report=chain,
        )
    return chain


# ---------------------------------------------------------------------------
# negative q


@dataclass
class NegativeQReport:
    rho: float
    zeros: list[complex]
    real: bool
    simple: bool
    alternating: bool
    ratio_margins: list[float]  # rho * |lambda_k| / |lambda_(k-1)| - 1

    @property
    def ratios_ok(self) -> bool:
        return all(x > 0 for x in self.ratio_margins)

    @property
    def ok(self) -> bool:
        return self.real and self.simple and self.alternating and self.ratios_ok


def _first_trusted(zeros: ZeroList, m: int, what: str) -> list:
    if zeros.count() < m:
        raise TrustRadiusExceeded(f"only {zeros.count()} trusted zeros of {what}, {m} requested")
    return list(zeros)[:m]


def negative_q_check(rho: float, N: int, m: int, raise_on_failure: bool = True) -> NegativeQReport:
    """First m zeros of F(z; -rho): real, simple, alternating from negative, ratio above 1/rho."""
    spec = QSpec(-rho, N)
    entries = _first_trusted(find_roots(qexp_series(spec)), m, f"F(z; {-rho})")
    zs = [e.location for e in entries]
    real = all(abs(z.imag) <= REAL_TOL * abs(z) for z in zs)
    simple = all(e.multiplicity == 1 for e in entries)
    signs = [1 if z.real > 0 else -1 for z in zs]
    alternating = all(s == (-1) ** (k + 1) for k, s in enumerate(signs))
    margins = [rho * abs(b) / abs(a) - 1 for a, b in zip(zs[:-1], zs[1:])]
    report = NegativeQReport(rho, zs, real, simple, alternating, margins)
    if raise_on_failure and not report.ok:
        raise PropertyViolation(f"negative-q pattern broken for rho = {rho}", report=report)
    return report


def phi_even_odd_at(coeffs: np.ndarray, w: complex) -> tuple[complex, complex]:
    """Phi_e(w) and Phi_o(w) from the coefficients of Phi."""
    c = np.asarray(coeffs, dtype=complex)
    even = c.copy()
    even[1::2] = 0
    odd = c.copy()
    odd[0::2] = 0
    return eval_series(even, w), eval_series(odd, w)


def ratio_value(coeffs: np.ndarray, x):
    """Phi_e(ix) / (i Phi_o(ix)), infinite where the denominator vanishes.

    Accepts a scalar or an array of real points.
    """
    e, o = phi_even_odd_at(coeffs, 1j * np.asarray(x, dtype=float))
    den = 1j * np.asarray(o)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den == 0, complex(math.inf, 0), np.asarray(e) / np.where(den == 0, 1, den))
    return complex(out) if out.ndim == 0 else out


@dataclass
class SelfInterlacingReport:
    rho: float
    max_imag: float
    intervals: list[tuple[float, float, str, int]]  # (left, right, kind, zeros inside)
    monotone: bool
    sign_flips: bool

    @property
    def ok(self) -> bool:
        counts_ok = all((n == 1) if kind == "zero-pole" else (n == 0)
                        for _, _, kind, n in self.intervals)
        return self.max_imag < 1e-10 and counts_ok and self.monotone and self.sign_flips


def self_interlacing_ratio(rho: float, N: int, samples: int = 400) -> SelfInterlacingReport:
    """The ratio Phi_e(iz)/(i Phi_o(iz)) on the real line against the zeros of F(z; -rho)."""
    phi = qexp_coeffs(rho, N)
    chi_e, chi_o = chi_parts(rho, N)
    lambdas = [e.location.real for e in find_roots(qexp_series(QSpec(-rho, N)))]
    zs = [math.sqrt(-e.location.real) for e in find_roots(chi_e)]
    ps = [math.sqrt(-e.location.real) for e in find_roots(chi_o)]
    reach = min(max(zs, default=0), max(ps, default=0), max((abs(x) for x in lambdas), default=0))
    crit = sorted([(0.0, "pole")]
                  + [(s * x, "zero") for x in zs if x <= reach for s in (1, -1)]
                  + [(s * x, "pole") for x in ps if x <= reach for s in (1, -1)])
    intervals = []
    monotone = True
    max_imag = 0.0
    for (a, ka), (b, kb) in zip(crit[:-1], crit[1:]):
        kind = f"{ka}-{kb}"
        inside = sum(1 for lam in lambdas if a < lam < b)
        intervals.append((a, b, kind, inside))
        xs = np.linspace(a, b, samples + 2)[1:-1]
        vals = ratio_value(phi, xs)
        max_imag = max(max_imag, float(np.max(np.abs(vals.imag) / np.maximum(1.0, np.abs(vals)))))
        if np.any(np.diff(vals.real) <= 0):
            monotone = False
    flips = True
    for lam in lambdas:
        if abs(lam) >= reach:
            continue
        d = 1e-6 * max(1.0, abs(lam))
        lo = ratio_value(phi, lam - d).real - 1
        hi = ratio_value(phi, lam + d).real - 1
        if not lo * hi < 0:
            flips = False
    return SelfInterlacingReport(rho, max_imag, intervals, monotone, flips)


# ---------------------------------------------------------------------------
# Gauss sums and roots-of-unity representations


@dataclass(frozen=True)
class RootOfUnityDecomposition:
    n: int
    p: int  # mu = exp(i pi (2p+1)/n)
    mu: complex
    rho: float
    nu: complex
    modulus_residual: float
    fourth_power_residual: float

    @property
    def nu_tilde(self) -> complex:
        """mu^(m^2) nu for even n = 2m."""
        m = self.n // 2
        return _mu_power(self.p, self.n, m * m) * self.nu


def _mu_power(p: int, n: int, e: int) -> complex:
    """mu**e with the exponent reduced exactly modulo 2n."""
    r = (e * (2 * p + 1)) % (2 * n)
    return cmath.exp(1j * math.pi * r / n)


def admissible_mus(n: int) -> list[tuple[int, complex]]:
    """All mu = exp(i pi (2p+1)/n) with mu**2 a primitive n-th root of unity, by Arg mu."""
    out = [(p, cmath.exp(1j * math.pi * (2 * p + 1) / n)) for p in range(n) if gcd(2 * p + 1, n) == 1]
    return sorted(out, key=lambda t: cmath.phase(t[1]))


def _mu_index(n: int, mu: complex) -> int:
    t = cmath.phase(complex(mu)) * n / math.pi
    odd = round(t)
    if abs(t - odd) > 1e-9 or odd % 2 == 0 or abs(abs(complex(mu)) - 1) > 1e-12:
        raise NonPrimitiveMu(f"mu = {mu} does not satisfy mu**{n} = -1")
    p = (odd % (2 * n) - 1) // 2
    if gcd(2 * p + 1, n) != 1:
        raise NonPrimitiveMu(f"mu**2 is not a primitive {n}-th root of unity for mu = {mu}")
    return p


def gauss_nu(n: int, mu: complex, rho: float = 1.0, tol: float = 1e-9) -> RootOfUnityDecomposition:
    """nu = 1 / sum_{k=1}^{n} (-mu)^(-k^2), summed with exactly reduced phases."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InputError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    p = _mu_index(n, mu)
    # (-mu) = exp(i pi (n + 2p + 1)/n)
    total = sum(cmath.exp(1j * math.pi * ((-k * k * (n + 2 * p + 1)) % (2 * n)) / n)
                for k in range(1, n + 1))
    if abs(total) < 1e-12:
        raise ZeroSum(f"the Gauss sum vanishes for n = {n}, mu = {mu}")
    nu = 1 / total
    mod_res = abs(abs(nu) - 1 / math.sqrt(n))
    if n % 2:
        fourth = abs(nu**-4 - n**2)
    else:
        fourth = abs(nu**4 + n**-2)
    d = RootOfUnityDecomposition(n, p, _mu_power(p, n, 1), rho, nu, mod_res, fourth)
    if mod_res > tol or fourth > tol:
        raise PropertyViolation(f"Gauss-sum law fails for n = {n}, p = {p}", report=d)
    return d


def _check_samples(spans: Sequence[SeriesFunction], zs: Sequence[complex], scale: float = 1.0):
    limit = ODE_SAFETY * min(s.trust_radius for s in spans)
    for z in zs:
        if abs(z) * scale > limit:
            raise TrustRadiusExceeded(f"sample {z} outside the joint trust radius {limit:.6g}")


def representation_sum(phi: np.ndarray, d: RootOfUnityDecomposition, z: complex) -> complex:
    """nu sum_{k=1}^{n} (-mu)^(-k^2) Phi(-mu^(2k-1) z)."""
    n, p = d.n, d.p
    total = 0j
    for k in range(1, n + 1):
        weight = cmath.exp(1j * math.pi * ((-k * k * (n + 2 * p + 1)) % (2 * n)) / n)
        total += weight * eval_series(phi, -_mu_power(p, n, 2 * k - 1) * z)
    return d.nu * total


def even_n_sum(phi: np.ndarray, d: RootOfUnityDecomposition, z: complex) -> complex:
    """nu_tilde sum_{k=1}^{n} mu^(-k^2) Phi(mu^(2k-1) z), the rewritten form for even n."""
    n, p = d.n, d.p
    total = sum(_mu_power(p, n, -k * k) * eval_series(phi, _mu_power(p, n, 2 * k - 1) * z)
                for k in range(1, n + 1))
    return d.nu_tilde * total


def two_term_form(phi: np.ndarray, z: complex, sign: int = -1) -> complex:
    """Phi_e(iz) + sign * i Phi_o(iz); the minus sign reproduces F(z; -rho)."""
    e, o = phi_even_odd_at(phi, 1j * z)
    return e + sign * 1j * o


def four_term_form(phi: np.ndarray, mu: complex, z: complex) -> complex:
    """Phi_e(mu z) + mu Phi_o(conj(mu) z) for mu**4 = -1."""
    e, _ = phi_even_odd_at(phi, mu * z)
    _, o = phi_even_odd_at(phi, mu.conjugate() * z)
    return e + mu * o


def eight_term_parts(phi: np.ndarray, d: RootOfUnityDecomposition, z: complex) -> tuple[complex, complex]:
    """Even and odd parts of F(z; q) for n = 8 as sums over Phi_e and Phi_o.

    Folding the n-term sum pairs Phi(w) with Phi(-w), which leaves a factor 2
    in front of each of the two half-sums.
    """
    if d.n % 8:
        raise InputError("the folded even/odd form needs n divisible by 8")
    n, p = d.n, d.p
    l = n // 8
    Fe = Fo = 0j
    for k in range(1, 2 * l + 1):
        e, _ = phi_even_odd_at(phi, _mu_power(p, n, 4 * k - 1) * z)
        _, o = phi_even_odd_at(phi, _mu_power(p, n, 4 * k - 3) * z)
        Fe += _mu_power(p, n, -4 * k * k) * e
        Fo += _mu_power(p, n, -(2 * k - 1) ** 2) * o
    return 2 * d.nu_tilde * Fe, 2 * d.nu_tilde * Fo


@dataclass
class RepresentationResidual:
    n: int
    mu: complex
    rho: float
    general: float
    even_form: float | None = None
    special: float | None = None
    folded: float | None = None

    def max(self) -> float:
        vals = [v for v in (self.general, self.even_form, self.special, self.folded) if v is not None]
        return max(vals)


def representation_residual(n: int, mu: complex, rho: float, z_samples: Sequence[complex],
                            N: int = DEFAULT_N) -> RepresentationResidual:
    """Largest deviation between F(z; rho mu^2) and its roots-of-unity representations."""
    d = gauss_nu(n, mu, rho)
    mu = d.mu
    q = rho * mu * mu
    F_series = qexp_series(QSpec(q, N))
    phi_series = qexp_series(QSpec(rho, N))
    zs = [complex(z) for z in z_samples]
    _check_samples([F_series, phi_series], zs)
    F, phi = F_series.coeffs, phi_series.coeffs
    targets = [eval_series(F, z) for z in zs]
    out = RepresentationResidual(n, mu, rho, max(
        (abs(t - representation_sum(phi, d, z)) for t, z in zip(targets, zs)), default=0.0))
    if n % 2 == 0:
        out.even_form = max((abs(t - even_n_sum(phi, d, z)) for t, z in zip(targets, zs)), default=0.0)
    if n == 2:
        # F(z; -rho) depends on mu only through mu**2 = -1
        out.special = max((abs(t - two_term_form(phi, z)) for t, z in zip(targets, zs)), default=0.0)
    if n == 4:
        out.special = max((abs(t - four_term_form(phi, mu, z)) for t, z in zip(targets, zs)), default=0.0)
    if n % 8 == 0:
        worst = 0.0
        for z in zs:
            Fe, Fo = phi_even_odd_at(F, z)
            ge, go = eight_term_parts(phi, d, z)
            worst = max(worst, abs(Fe - ge), abs(Fo - go))
        out.folded = worst
    return out


@dataclass
class SignResolution:
    rho: float
    minus_residual: float
    plus_residual: float

    @property
    def orders_of_magnitude(self) -> float:
        return math.log10(self.plus_residual / max(self.minus_residual, 1e-300))


def two_term_sign_resolution(rho: float, z_samples: Sequence[complex], N: int = DEFAULT_N) -> SignResolution:
    """ODE residual |G'(z) - G(-rho z)| of G = Phi_e(iz) -/+ i Phi_o(iz)."""
    phi = qexp_coeffs(rho, N)
    k = np.arange(N + 1)
    base = phi * (1j) ** k  # Phi(iz)
    even = base.copy()
    even[1::2] = 0
    odd = base.copy()
    odd[0::2] = 0
    res = []
    for sign in (-1, 1):
        g = even + sign * 1j * odd
        res.append(max(series_ode_residual(g, -rho, z) for z in z_samples))
    return SignResolution(rho, res[0], res[1])


# ---------------------------------------------------------------------------
# the i^(k(k-1)/2) transform and the rotated q-exponential


def i_power_transform(real_coeffs: Sequence[float], alpha: complex = 1.0,
                      provenance: str = "user") -> SeriesFunction:
    """alpha * i^(k(k-1)/2) * f_k."""
    f = np.asarray(real_coeffs, dtype=float)
    if f.size == 0 or f[0] <= 0:
        raise InputError("the transform needs f_0 > 0")
    if complex(alpha) == 0:
        raise InputError("alpha must be nonzero")
    phases = np.array([1j ** ((k * (k - 1) // 2) % 4) for k in range(len(f))])
    return make_series(complex(alpha) * phases * f, provenance)


MU8 = cmath.exp(1j * math.pi / 4)


def rotated_qexp(rho: float, N: int = DEFAULT_N, mu: complex = MU8) -> SeriesFunction:
    """z -> F(conj(mu) z; mu^2 rho), the form in which q = mu^2 rho becomes a structured pair."""
    return rotate(qexp_series(QSpec(mu * mu * rho, N)), complex(mu).conjugate())


@dataclass
class ConjectureReport:
    q: complex
    N: int
    exploratory: bool
    zeros: list[complex]
    quadrants: list
    all_simple: bool
    min_distance: float
    distinct_moduli: bool
    min_modulus_gap: float  # min |z_(k+1)|/|z_k| - 1
    separation_factor: float  # min |z_(k+1)|/|z_k|, to compare with 1/|q|
    note: str = ""


def conjecture_report(spec: QSpec, m: int = 8) -> ConjectureReport:
    """Simplicity and distinct moduli of the first m trusted zeros of F(z; q)."""
    q = spec.q
    exploratory = abs((q * q).imag) > 1e-14 * abs(q) ** 2
    zeros = find_roots(qexp_series(spec))
    if zeros.count() == 0:
        return ConjectureReport(q, spec.N, exploratory, [], [], True, math.inf, True, math.inf,
                                math.inf, "no zeros inside the trust disk")
    entries = list(zeros)[:m]
    notes = ["exploratory: q**2 is not real"] if exploratory else []
    if len(entries) < m:
        notes.append(f"only {len(entries)} zeros inside the trust disk, {m} requested")
    zs = [e.location for e in entries]
    dists = [abs(a - b) / max(1.0, abs(a)) for i, a in enumerate(zs) for b in zs[i + 1:]]
    min_dist = min(dists, default=math.inf)
    simple = all(e.multiplicity == 1 for e in entries) and min_dist > 1e-6
    ratios = [abs(b) / abs(a) for a, b in zip(zs[:-1], zs[1:])]
    gap = min(ratios, default=math.inf) - 1
    return ConjectureReport(q, spec.N, exploratory, zs, [quadrant_of(z) for z in zs], simple,
                            min_dist, gap > 1e-8, gap, min(ratios, default=math.inf),
                            "; ".join(notes))
