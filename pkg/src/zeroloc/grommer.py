"""Grommer-type minors test for series with only negative zeros.

For a base sequence (s_0, s_1, s_2, ...) the test matrix has rows

    s_0   s_1   s_2   s_3  ...
    0     s_1  2s_2  3s_3  ...
    0     s_0   s_1   s_2  ...
    0     0     s_1  2s_2  ...

i.e. odd rows are the sequence, even rows its termwise derivative weights,
each pair shifted one column further right. All leading principal minors
positive (or positive and then identically zero) signals that
sum s_k z**k has only negative zeros.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BadOrder, InputError

EXACT_LIMIT = 2**53
EPS = float(np.finfo(float).eps)
EQUILIBRATION_SWEEPS = 3


@dataclass(frozen=True)
class GrommerMatrices:
    even_matrix: list
    odd_matrix: list
    order: int
    base_even: tuple
    base_odd: tuple


@dataclass(frozen=True)
class LeadingMinors:
    values: list
    exact: bool
    conditions: list = field(default_factory=list)

    def signs(self) -> list[int]:
        """Signs of the minors; in floating point a minor counts as zero when
        its equilibrated block is numerically singular."""
        if self.exact:
            return [(v > 0) - (v < 0) for v in self.values]
        out = []
        for k, (v, (cond, _)) in enumerate(zip(self.values, self.conditions), start=1):
            singular = v == 0 or not cond < 1 / (k * EPS)
            out.append(0 if singular else (1 if v > 0 else -1))
        return out


@dataclass(frozen=True)
class MinorVerdict:
    minors: list
    verdict: str  # "all-positive" | "positive-then-zero" | "fail"
    fail_index: int | None = None
    exact: bool = True
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.verdict != "fail"


def _as_rational(x):
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, complex):
        if x.imag != 0:
            return None
        x = x.real
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            return None
        fr = Fraction(float(x))
        if abs(fr.numerator) <= EXACT_LIMIT and fr.denominator <= EXACT_LIMIT:
            return fr
        return None
    if isinstance(x, np.integer):
        return Fraction(int(x))
    return None


def _pad(seq: Sequence, n: int, zero) -> list:
    seq = list(seq)
    return seq[:n] + [zero] * max(0, n - len(seq))


def _matrix(base: Sequence, order: int) -> list:
    zero = base[0] * 0 if base else 0
    b = _pad(base, order, zero)
    deriv = [k * b[k] for k in range(order)]
    rows = []
    for i in range(order):
        source = b if i % 2 == 0 else deriv
        shift = i // 2
        rows.append([zero] * shift + source[: order - shift])
    return rows


def build_matrices(even_coeffs: Sequence, odd_coeffs: Sequence, order: int) -> GrommerMatrices:
    if isinstance(order, bool) or int(order) != order or order < 1:
        raise BadOrder(f"matrix order must be a positive integer, got {order!r}")
    order = int(order)
    even = list(even_coeffs) or [0]
    odd = list(odd_coeffs) or [0]
    return GrommerMatrices(_matrix(even, order), _matrix(odd, order), order,
                           tuple(even), tuple(odd))


def _det_fraction(block: list[list[Fraction]]) -> Fraction:
    """Fraction-free (Bareiss) determinant with row pivoting."""
    a = [row[:] for row in block]
    n = len(a)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else Fraction(1)


def _leading_exact(M: list[list[Fraction]]) -> list[Fraction]:
    """Bareiss without pivoting: the k-th pivot is the k-th leading minor.

    After a zero pivot the elimination can no longer supply the remaining
    minors, so those are computed block by block.
    """
    n = len(M)
    a = [row[:] for row in M]
    minors = []
    prev = Fraction(1)
    for k in range(n):
        pivot = a[k][k]
        minors.append(pivot)
        if pivot == 0:
            minors += [_det_fraction([row[: m] for row in M[: m]]) for m in range(k + 2, n + 1)]
            return minors
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) / prev
        prev = pivot
    return minors


def _equilibrate(block: np.ndarray) -> np.ndarray:
    """Alternate row and column scaling to unit max-norm.

    Positive diagonal scalings leave the sign of the determinant unchanged,
    and they strip the dynamic range coming from the powers in the
    coefficient sequence before singularity is judged.
    """
    B = block.copy()
    for _ in range(EQUILIBRATION_SWEEPS):
        r = np.abs(B).max(axis=1)
        B /= np.where(r > 0, r, 1.0)[:, None]
        c = np.abs(B).max(axis=0)
        B /= np.where(c > 0, c, 1.0)[None, :]
    return B


def _leading_float(M: np.ndarray) -> tuple[list[float], list[tuple[float, float]]]:
    values, conds = [], []
    for k in range(1, len(M) + 1):
        block = M[:k, :k]
        values.append(float(np.linalg.det(block)))
        with np.errstate(all="ignore"):
            cond = float(np.linalg.cond(_equilibrate(block)))
        if not math.isfinite(cond):
            cond = math.inf
        hadamard = float(np.prod(np.maximum(np.linalg.norm(block, axis=1), 1e-300)))
        conds.append((cond, hadamard))
    return values, conds


def leading_minors(M, exact: bool | None = None) -> LeadingMinors:
    """Determinants of the top-left k x k blocks, k = 1..order.

    Exact rational arithmetic is used whenever every entry is representable
    as a ratio of integers up to 2**53, unless ``exact=False``.
    """
    rows = [list(r) for r in M]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("leading minors need a square matrix")
    rational = [[_as_rational(x) for x in r] for r in rows]
    can_exact = all(x is not None for r in rational for x in r)
    if exact is None:
        exact = can_exact
    if exact:
        if not can_exact:
            raise InputError("matrix entries are not representable as exact rationals")
        return LeadingMinors(_leading_exact(rational), True)
    arr = np.array([[complex(x).real for x in r] for r in rows], dtype=float)
    values, conds = _leading_float(arr)
    return LeadingMinors(values, False, conds)


def default_order(coeffs: Sequence) -> int:
    nnz = sum(1 for x in coeffs if x != 0)
    return 2 * nnz + 2


def classify_minors(minors: LeadingMinors, coeffs: Sequence) -> MinorVerdict:
    signs = minors.signs()
    notes = []
    if not any(x != 0 for x in list(coeffs)[1:]):
        notes.append("constant series")
    k = 0
    while k < len(signs) and signs[k] > 0:
        k += 1
    if k == len(signs):
        return MinorVerdict(minors.values, "all-positive", None, minors.exact, tuple(notes))
    if k > 0 and all(s == 0 for s in signs[k:]):
        return MinorVerdict(minors.values, "positive-then-zero", None, minors.exact, tuple(notes))
    return MinorVerdict(minors.values, "fail", k + 1, minors.exact, tuple(notes))


def negativity_verdict(coeffs: Sequence, order: int | None = None,
                       exact: bool | None = None) -> MinorVerdict:
    """Decide whether sum coeffs[k] z**k has only negative zeros.

    The 1-based ``fail_index`` names the first leading minor that breaks the
    positive-then-zero pattern.
    """
    coeffs = list(coeffs)
    if not coeffs:
        raise InputError("empty coefficient list")
    if order is None:
        order = default_order(coeffs)
    M = build_matrices(coeffs, [0], order).even_matrix
    return classify_minors(leading_minors(M, exact), coeffs)


@dataclass(frozen=True)
class SeriesParts:
    alpha: complex
    beta: complex
    j: int
    even: list[float]
    odd: list[float]

    @property
    def c(self) -> complex:
        return -(self.beta * abs(self.alpha)) / (self.alpha * abs(self.beta))


def split_series(coeffs: Sequence[complex], tol: float = 1e-12) -> SeriesParts:
    """Write F = alpha*sum f_2k z^2k + beta*sum (-1)^l f_2l+1 z^(2l+2j+1) with f_0 = f_1 = 1.

    The even part is normalized by its constant term, the odd part by its
    lowest nonzero coefficient; both normalized sequences must be real.
    """
    c = [complex(x) for x in coeffs]
    if not c or c[0] == 0:
        raise InputError("the constant term must be nonzero")
    odd_idx = [k for k in range(1, len(c), 2) if c[k] != 0]
    if not odd_idx:
        raise InputError("the series has no odd part")
    first = odd_idx[0]
    j = (first - 1) // 2
    alpha, beta = c[0], c[first]
    even = [x / alpha for x in c[0::2]]
    odd = [(-1) ** l * c[first + 2 * l] / beta for l in range((len(c) - first + 1) // 2)]
    for name, part in (("even", even), ("odd", odd)):
        if any(abs(x.imag) > tol * max(1.0, abs(x)) for x in part):
            raise InputError(f"normalized {name} part is not real")
    return SeriesParts(alpha, beta, j, [x.real for x in even], [x.real for x in odd])
