"""Zeros of truncated power series: trust disk, simultaneous iteration, clustering.

The solver is the Aberth-Ehrlich method (cubically convergent simultaneous
Newton iteration). Starting points sit on the circles of the Newton polygon of
the coefficient moduli, which collapses to the single circle of radius
|c_0/c_N|**(1/N) for polynomials whose coefficients do not span many orders of
magnitude. Evaluation switches to a scaled log-sum form when Horner's scheme
would over- or underflow, which happens for q-series with |q| < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, NewtonDiverged, NoConvergence
from .model import (
    SeriesFunction,
    StructuredFunction,
    eval_dF,
    eval_F,
    expand_to_series,
)

EPS = np.finfo(float).eps
GOLDEN_ANGLE = math.pi * (3 - math.sqrt(5))

TAIL_RATIO = 1e-13
MONOTONE_WINDOW = 10
SAFETY = 0.8
CLUSTER_RADIUS = 1e-6
SORT_TOLERANCE = 1e-8
RESIDUAL_TOLERANCE = 1e-11
MAX_SWEEPS = 500
# a truncation zero is confirmed when the last-term proxy moves it less than this
CONFIRM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class TrustDisk:
    radius: float
    tail_bound: float


@dataclass(frozen=True)
class Zero:
    location: complex
    multiplicity: int = 1

    @property
    def modulus(self) -> float:
        return abs(self.location)


@dataclass(frozen=True)
class ZeroList:
    entries: tuple[Zero, ...]
    sort_tolerance: float = SORT_TOLERANCE
    unconfirmed: tuple[Zero, ...] = ()
    trust_radius: float = math.inf
    worst_residual: float = field(default=0.0, compare=False)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def locations(self) -> np.ndarray:
        return np.array([e.location for e in self.entries], dtype=complex)

    @property
    def multiplicities(self) -> list[int]:
        return [e.multiplicity for e in self.entries]

    def expanded(self) -> list[complex]:
        """Locations repeated according to multiplicity, in sorted order."""
        return [e.location for e in self.entries for _ in range(e.multiplicity)]

    def count(self) -> int:
        return sum(e.multiplicity for e in self.entries)


# ---------------------------------------------------------------------------
# trust disk


def _strip_trailing(c: np.ndarray) -> np.ndarray:
    nz = np.nonzero(c)[0]
    return c[: nz[-1] + 1] if nz.size else c[:1]


def trust_disk_of_coeffs(coeffs, exact: bool = False) -> TrustDisk:
    c = _strip_trailing(np.asarray(coeffs, dtype=complex))
    N = len(c) - 1
    if exact or N == 0:
        return TrustDisk(math.inf, 0.0)
    mag = np.abs(c)
    nonzero = mag > 0
    k_all = np.arange(N + 1)
    logc = np.log(mag[nonzero])
    k_nz = k_all[nonzero]
    window = [k for k in range(max(0, N - MONOTONE_WINDOW), N)
              if mag[k] > 0 and mag[k + 1] > 0]
    log_tail_ratio = math.log(TAIL_RATIO)

    def ok(log_r: float) -> bool:
        terms = logc + k_nz * log_r
        if terms[-1] >= log_tail_ratio + terms.max():
            return False
        return all(math.log(mag[k + 1]) + log_r <= math.log(mag[k]) for k in window)

    lo, hi = 0.0, 0.0
    if ok(0.0):
        hi = 1.0
        while ok(hi):
            lo, hi = hi, 2 * hi
            if hi > 1400:  # r beyond 1e600 cannot happen for a nonzero last term
                return TrustDisk(math.inf, 0.0)
    else:
        lo = -1.0
        while not ok(lo):
            hi, lo = lo, 2 * lo
            if lo < -1400:
                return TrustDisk(0.0, float(mag[N]))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 * max(1.0, abs(lo)):
            break
    radius = math.exp(lo)
    log_tail = math.log(mag[N]) + N * lo
    return TrustDisk(radius, math.exp(log_tail) if log_tail < 709 else math.inf)


def trust_radius(series: SeriesFunction) -> TrustDisk:
    """Radius inside which zeros of the truncation are taken as zeros of the full function."""
    return trust_disk_of_coeffs(series.coeffs, exact=series.is_exact)


# ---------------------------------------------------------------------------
# evaluation helpers


def _initial_points(c: np.ndarray) -> np.ndarray:
    """Starting points on the circles of the upper convex hull of (k, log|c_k|)."""
    N = len(c) - 1
    mag = np.abs(c)
    pts = [k for k in range(N + 1) if mag[k] > 0]
    lg = {k: math.log(mag[k]) for k in pts}
    hull: list[int] = []
    for k in pts:
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            if (lg[j] - lg[i]) * (k - i) <= (lg[k] - lg[i]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    out = []
    idx = 0
    for i, j in zip(hull[:-1], hull[1:]):
        m = j - i
        radius = math.exp((lg[i] - lg[j]) / m)
        for t in range(m):
            phase = 2 * math.pi * t / m + GOLDEN_ANGLE * idx + 0.4
            out.append(radius * complex(math.cos(phase), math.sin(phase)))
            idx += 1
    return np.array(out, dtype=complex)


def _horner_forward(c, z):
    p = np.full_like(z, c[-1])
    dp = np.zeros_like(z)
    s = np.full(z.shape, abs(c[-1]))
    az = np.abs(z)
    for ck in c[-2::-1]:
        dp = dp * z + p
        p = p * z + ck
        s = s * az + abs(ck)
    return p / dp, np.abs(p) / s


def _horner_reversed(c, z):
    N = len(c) - 1
    w = 1 / z
    p = np.full_like(w, c[0])
    dp = np.zeros_like(w)
    s = np.full(w.shape, abs(c[0]))
    aw = np.abs(w)
    for ck in c[1:]:
        dp = dp * w + p
        p = p * w + ck
        s = s * aw + abs(ck)
    return z * p / (N * p - w * dp), np.abs(p) / s


def _log_sum(c, z):
    nz = np.nonzero(c)[0]
    L = np.log(c[nz])[None, :] + nz[None, :] * np.log(z)[:, None]
    M = L.real.max(axis=1)
    E = np.exp(L - M[:, None])
    p = E.sum(axis=1)
    kp = (E * nz[None, :]).sum(axis=1)
    return z * p / kp, np.abs(p) / np.abs(E).sum(axis=1)


def newton_ratio(c: np.ndarray, z: np.ndarray, logabs: np.ndarray):
    """p/p' and the backward-error ratio |p|/sum|c_k z^k| at each point of ``z``."""
    N = len(c) - 1
    ratio = np.empty_like(z)
    berr = np.empty(z.shape)
    az = np.abs(z)
    with np.errstate(divide="ignore"):
        la = np.log(az)
    finite = np.isfinite(logabs)
    peak = (logabs[finite][None, :] + np.arange(N + 1)[finite][None, :] * la[:, None]).max(axis=1)
    forward = az <= 1
    rev_peak = peak - N * la
    safe_f = forward & (np.abs(peak) < 600)
    safe_r = ~forward & (np.abs(rev_peak) < 600)
    rest = ~(safe_f | safe_r)
    with np.errstate(all="ignore"):
        for mask, fn in ((safe_f, _horner_forward), (safe_r, _horner_reversed), (rest, _log_sum)):
            if mask.any():
                ratio[mask], berr[mask] = fn(c, z[mask])
    return ratio, berr


def aberth_ehrlich(c: np.ndarray, max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """All roots of sum c_k z**k (c_0 != 0, c_N != 0). Returns roots and backward errors."""
    c = np.asarray(c, dtype=complex)
    N = len(c) - 1
    with np.errstate(divide="ignore"):
        logabs = np.log(np.abs(c))
    if N == 1:
        z = np.array([-c[0] / c[1]])
        return z, newton_ratio(c, z, logabs)[1]
    z = _initial_points(c)
    tol = 4 * N * EPS
    done = np.zeros(N, dtype=bool)
    berr = np.full(N, np.inf)
    for _ in range(max_sweeps):
        ratio, berr = newton_ratio(c, z, logabs)
        done |= berr <= tol
        if done.all():
            return z, berr
        with np.errstate(all="ignore"):
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            repulsion = (1 / diff).sum(axis=1)
            step = ratio / (1 - ratio * repulsion)
        step[~np.isfinite(step)] = 0
        # synchronous update; converged roots stay frozen
        z = np.where(done, z, z - step)
    worst = float(np.max(berr[~done])) if (~done).any() else 0.0
    if worst <= RESIDUAL_TOLERANCE:
        return z, berr
    raise NoConvergence(
        f"simultaneous iteration did not converge in {max_sweeps} sweeps "
        f"(worst backward error {worst:.3e})",
        worst_residual=worst,
    )


# ---------------------------------------------------------------------------
# clustering and ordering


def _principal_arg(z: complex) -> float:
    # -0.0 imaginary parts would give -pi for negative reals
    return math.atan2(z.imag + 0.0, z.real) if z.imag != 0 else (math.pi if z.real < 0 else 0.0)


def sort_zeros(zeros: Iterable[Zero], tol: float = SORT_TOLERANCE) -> tuple[Zero, ...]:
    """Modulus ascending; within modulus ties, principal argument ascending."""
    items = sorted(zeros, key=lambda e: (e.modulus, _principal_arg(e.location)))
    out: list[Zero] = []
    group: list[Zero] = []
    for e in items:
        if group and e.modulus - group[0].modulus > tol * max(1.0, group[0].modulus):
            out.extend(sorted(group, key=lambda g: _principal_arg(g.location)))
            group = []
        group.append(e)
    out.extend(sorted(group, key=lambda g: _principal_arg(g.location)))
    return tuple(out)


def cluster_multiplicities(raw_roots: Sequence[complex], scale: float | None = None,
                           radius: float = CLUSTER_RADIUS) -> ZeroList:
    """Merge roots closer than ``radius * scale`` (scale defaults to max(1, |z|))."""
    pts = np.asarray(list(raw_roots), dtype=complex)
    n = len(pts)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for k in range(i + 1, n):
            s = scale if scale is not None else max(1.0, abs(pts[i]), abs(pts[k]))
            if abs(pts[i] - pts[k]) <= radius * s:
                parent[find(i)] = find(k)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    zeros = [Zero(complex(pts[idx].mean()), len(idx)) for idx in groups.values()]
    return ZeroList(sort_zeros(zeros))


# ---------------------------------------------------------------------------
# public root finding


def _log_abs_poly(c: np.ndarray, z: complex) -> float:
    """log|sum c_k z**k| by a scaled sum, safe for huge or tiny terms."""
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return -math.inf
    if z == 0:
        return math.log(abs(c[0])) if c[0] != 0 else -math.inf
    L = np.log(c[nz]) + nz * np.log(complex(z))
    M = L.real.max()
    total = abs(np.exp(L - M).sum())
    return M + math.log(total) if total > 0 else -math.inf


def _confirmed(c: np.ndarray, zero: Zero) -> bool:
    """Zero position is stable against the truncation tail and against rounding.

    The perturbation of p near the zero is bounded by the last-term proxy plus
    the evaluation rounding N*eps*sum|c_k||z|**k; the induced shift of an m-fold
    zero is (perturbation * m! / |p^(m)(z)|)**(1/m).
    """
    z, m = zero.location, zero.multiplicity
    if z == 0:
        return True
    N = len(c) - 1
    log_z = math.log(abs(z))
    log_tail = math.log(abs(c[-1])) + N * log_z
    log_round = math.log(N * EPS) + _log_abs_poly(np.abs(c).astype(complex), abs(z))
    log_perturb = np.logaddexp(log_tail, log_round)
    log_deriv = _log_abs_poly(np.polynomial.polynomial.polyder(c, m), z)
    if log_deriv == -math.inf:
        return False
    log_shift = (log_perturb + math.lgamma(m + 1) - log_deriv) / m
    return log_shift < math.log(CONFIRM_TOLERANCE * max(1.0, abs(z)))


def _refine_multiple(c: np.ndarray, zero: Zero, max_iter: int = 20) -> Zero:
    """Newton on the (m-1)-th derivative, where an m-fold zero becomes simple."""
    m = zero.multiplicity
    d = np.polynomial.polynomial.polyder(c, m - 1)
    dd = np.polynomial.polynomial.polyder(d)
    z = zero.location
    for _ in range(max_iter):
        den = np.polynomial.polynomial.polyval(z, dd)
        if den == 0:
            break
        step = np.polynomial.polynomial.polyval(z, d) / den
        if not np.isfinite(step) or abs(step) > CLUSTER_RADIUS * max(1.0, abs(zero.location)):
            return zero
        z = z - step
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            break
    return Zero(complex(z), m)


def find_roots(series: SeriesFunction, safety: float = SAFETY,
               max_sweeps: int = MAX_SWEEPS) -> ZeroList:
    """Zeros of the truncation inside ``safety`` times the trust radius.

    Roots outside the disk, or whose position is not stable against the
    truncation tail, are returned in ``unconfirmed`` rather than dropped.
    """
    c = _strip_trailing(np.asarray(series.coeffs, dtype=complex))
    N = len(c) - 1
    if N < 1:
        raise InputError("root finding needs degree >= 1 after stripping trailing zeros")
    lead = int(np.nonzero(c)[0][0])
    core = c[lead:]
    raw = [0j] * lead
    berr = np.zeros(0)
    if len(core) > 1:
        found, berr = aberth_ehrlich(core, max_sweeps)
        raw.extend(complex(z) for z in found)
    clustered = cluster_multiplicities(raw)
    if series.is_exact:
        clustered = ZeroList(sort_zeros(
            _refine_multiple(c, z) if z.multiplicity > 1 else z for z in clustered))
    worst = float(berr.max()) if berr.size else 0.0
    if worst > RESIDUAL_TOLERANCE:
        raise NoConvergence(f"residual {worst:.3e} above tolerance", worst_residual=worst)
    limit = safety * series.trust_radius
    trusted, unconfirmed = [], []
    for zero in clustered:
        inside = zero.modulus <= limit
        if inside and (series.is_exact or _confirmed(c, zero)):
            trusted.append(zero)
        else:
            unconfirmed.append(zero)
    return ZeroList(tuple(trusted), SORT_TOLERANCE, tuple(unconfirmed),
                    series.trust_radius, worst)


def structured_scale(S: StructuredFunction, z: complex) -> float:
    """Sum of moduli of the two parts' factor products: the size of F's terms near z."""
    w = abs(z) ** 2
    f = abs(S.f0) * math.prod(1 + w / bm for bm in S.b)
    g = abs(S.g0) * w**S.j * math.prod(1 + w / an for an in S.a)
    return f + abs(z) * g


def polish_on_function(S: StructuredFunction, z0: complex, multiplicity: int = 1,
                       max_iter: int = 40) -> complex:
    """Newton refinement of an approximate zero on the exact structured function."""
    z = complex(z0)
    start = max(1.0, abs(z))
    for _ in range(max_iter):
        dF = eval_dF(S, z)
        F = eval_F(S, z)
        if F == 0:
            return z
        if dF == 0:
            break
        step = multiplicity * F / dF
        z_new = z - step
        if not (math.isfinite(z_new.real) and math.isfinite(z_new.imag)) or abs(z_new) > 1e8 * start:
            raise NewtonDiverged(f"Newton iteration from {z0} left the finite plane")
        z = z_new
        if abs(step) < 1e-14 * max(abs(z), 1e-300):
            return z
    residual = abs(eval_F(S, z)) / structured_scale(S, z)
    if residual < RESIDUAL_TOLERANCE:
        return z
    raise NewtonDiverged(f"Newton iteration from {z0} stalled with relative residual {residual:.3e}")


def zeros_of_structured(S: StructuredFunction) -> ZeroList:
    """All zeros of a structured polynomial, polished on the factorized form."""
    if S.is_constant_pair:
        return ZeroList((Zero(-S.f0 / S.g0, 1),))
    raw = find_roots(expand_to_series(S))
    polished = []
    for zero in raw:
        if zero.multiplicity == 1:
            loc = polish_on_function(S, zero.location)
        else:
            loc = zero.location
        polished.append(Zero(loc, zero.multiplicity))
    merged = cluster_multiplicities(
        [p.location for p in polished for _ in range(p.multiplicity)]
    )
    return ZeroList(merged.entries, raw.sort_tolerance, raw.unconfirmed,
                    raw.trust_radius, raw.worst_residual)
