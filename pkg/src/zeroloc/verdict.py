"""Case classification of c and clause-by-clause verification of zero distributions.

The four cases are decided by c alone:

    1: Im c**2 > 0   all zeros simple, strictly growing moduli, quadrants cycle Q1->Q2->Q3->Q4
    2: Im c**2 < 0   same, cycling clockwise
    3: Im c == 0     zeros in conjugate pairs or real pairs, no purely imaginary zeros
    4: Re c == 0     zeros in mirror pairs z, -conj(z) or imaginary pairs, no real zeros

Zeros are handled as a flat list in which an m-fold zero appears m times.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import AmbiguousCase, EmptyZeroList
from .roots import ZeroList

C_AXIS_TOL = 1e-10
Z_AXIS_TOL = 1e-8
MODULUS_TOL = 1e-8

# quadrant of z_1, z_2, z_3, z_4 by quadrant of c, for even j
FIRST_QUADRANTS_EVEN_J = {
    1: (4, 1, 2, 3),
    2: (3, 2, 1, 4),
    3: (2, 3, 4, 1),
    4: (1, 4, 3, 2),
}
_OPPOSITE = {1: 3, 2: 4, 3: 1, 4: 2}


def quadrant_of(z: complex, tol: float = Z_AXIS_TOL):
    """1..4 for the open quadrants, otherwise an axis code."""
    z = complex(z)
    scale = abs(z)
    if scale == 0:
        return "origin"
    on_real = abs(z.imag) <= tol * scale
    on_imag = abs(z.real) <= tol * scale
    if on_real:
        return "+re" if z.real > 0 else "-re"
    if on_imag:
        return "+im" if z.imag > 0 else "-im"
    if z.real > 0:
        return 1 if z.imag > 0 else 4
    return 2 if z.imag > 0 else 3


def quadrant_listing(c: complex, j: int) -> tuple[int, int, int, int]:
    """Quadrants of z_1..z_4 in cases 1/2 (odd j swaps c for -c)."""
    q = quadrant_of(c, C_AXIS_TOL)
    if not isinstance(q, int):
        raise AmbiguousCase(f"c = {c} lies on an axis; no quadrant listing applies")
    if j % 2:
        q = _OPPOSITE[q]
    return FIRST_QUADRANTS_EVEN_J[q]


def classify_case(c: complex, tol: float = C_AXIS_TOL) -> int:
    c = complex(c)
    small_im = abs(c.imag) < tol
    small_re = abs(c.real) < tol
    if small_im and small_re:
        raise AmbiguousCase(f"c = {c} is not of modulus one")
    if small_im:
        return 3
    if small_re:
        return 4
    return 1 if (c * c).imag > 0 else 2


def _sign(x: float, scale: float, tol: float = Z_AXIS_TOL) -> int:
    if abs(x) <= tol * scale:
        return 0
    return 1 if x > 0 else -1


@dataclass(frozen=True)
class FirstZeroPredicate:
    """Conjunction of named sign conditions on the first zero."""

    case: int
    conditions: tuple[tuple[str, Callable[[complex], bool]], ...]

    def evaluate(self, z1: complex) -> list[tuple[str, bool]]:
        return [(name, bool(test(complex(z1)))) for name, test in self.conditions]

    def __call__(self, z1: complex) -> bool:
        return all(ok for _, ok in self.evaluate(z1))


def expected_first_zero(c: complex, j: int) -> FirstZeroPredicate:
    case = classify_case(c)
    s = -1 if j % 2 else 1

    def re_s(z):
        return _sign(z.real, abs(z))

    def im_s(z):
        return _sign(z.imag, abs(z))

    if case == 1:
        conds = (
            ("(-1)^j Re c Re z1 > 0", lambda z: s * _sign(c.real, 1, C_AXIS_TOL) * re_s(z) > 0),
            ("Re z1 Im z1 < 0", lambda z: re_s(z) * im_s(z) < 0),
        )
    elif case == 2:
        conds = (
            ("(-1)^j Im c Im z1 < 0", lambda z: s * _sign(c.imag, 1, C_AXIS_TOL) * im_s(z) < 0),
            ("Re z1 Im z1 > 0", lambda z: re_s(z) * im_s(z) > 0),
        )
    elif case == 3:
        conds = (
            ("(-1)^j c Re z1 > 0", lambda z: s * _sign(c.real, 1, C_AXIS_TOL) * re_s(z) > 0),
            ("Re z1 Im z1 <= 0", lambda z: re_s(z) * im_s(z) <= 0),
        )
    else:
        conds = (
            ("(-1)^j Im c Im z1 < 0", lambda z: s * _sign(c.imag, 1, C_AXIS_TOL) * im_s(z) < 0),
            ("Re z1 = 0", lambda z: re_s(z) == 0),
        )
    return FirstZeroPredicate(case, conds)


@dataclass(frozen=True)
class ClauseResult:
    name: str
    passed: bool
    witness: str = ""


@dataclass
class DistributionReport:
    case: int
    c: complex
    j: int
    clause_results: list[ClauseResult]
    first_zero_checks: list[ClauseResult]
    ordering: list[complex] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(r.passed for r in self.clause_results + self.first_zero_checks)

    def failures(self) -> list[ClauseResult]:
        return [r for r in self.clause_results + self.first_zero_checks if not r.passed]

    def as_dict(self) -> dict:
        def rows(results):
            return [{"clause": r.name, "pass": r.passed, "witness": r.witness} for r in results]

        return {
            "case": self.case,
            "c": [self.c.real, self.c.imag],
            "j": self.j,
            "clauses": rows(self.clause_results),
            "first_zero": rows(self.first_zero_checks),
            "overall": "pass" if self.overall else "fail",
        }


def _clause(name: str, violations: list[str]) -> ClauseResult:
    return ClauseResult(name, not violations, "; ".join(violations[:3]))


def _fmt(z: complex) -> str:
    return f"({z.real:.6g}{z.imag:+.6g}j)"


def _less(a: float, b: float) -> bool:
    return b - a > MODULUS_TOL * a


def _equal(a: float, b: float) -> bool:
    return abs(b - a) <= MODULUS_TOL * a


def _close(z: complex, w: complex) -> bool:
    return abs(z - w) <= Z_AXIS_TOL * max(1.0, abs(z))


def _check_moduli(zs: Sequence[complex], pattern: Callable[[int], str]) -> list[str]:
    """pattern(k) gives '<' or '<=' for the step from z_k to z_{k+1} (1-based)."""
    bad = []
    if abs(zs[0]) == 0:
        bad.append("z1 = 0")
    for k in range(1, len(zs)):
        a, b = abs(zs[k - 1]), abs(zs[k])
        rel = pattern(k)
        ok = _less(a, b) if rel == "<" else (_less(a, b) or _equal(a, b))
        if not ok:
            bad.append(f"|z{k}|={a:.12g} {rel} |z{k + 1}|={b:.12g} fails")
    return bad


def _check_multiplicities(zeros: ZeroList, case: int) -> list[str]:
    bad = []
    for e in zeros:
        q = quadrant_of(e.location)
        if e.multiplicity == 1:
            continue
        allowed = (case == 3 and q in ("+re", "-re")) or (case == 4 and q in ("+im", "-im"))
        if e.multiplicity > 2 or not allowed:
            bad.append(f"{_fmt(e.location)} has multiplicity {e.multiplicity}")
    return bad


def _rotating_clauses(zs, case, c, j) -> list[ClauseResult]:
    results = [_clause("strictly increasing moduli", _check_moduli(zs, lambda k: "<"))]
    quads = [quadrant_of(z) for z in zs]
    results.append(_clause(
        "no zeros on the axes",
        [f"z{k + 1}={_fmt(z)} on {q}" for k, (z, q) in enumerate(zip(zs, quads)) if not isinstance(q, int)],
    ))
    step = 1 if case == 1 else -1
    cyc = []
    for k in range(1, len(zs)):
        a, b = quads[k - 1], quads[k]
        if not (isinstance(a, int) and isinstance(b, int) and (a - 1 + step) % 4 + 1 == b):
            cyc.append(f"z{k} in {a} -> z{k + 1} in {b}")
    results.append(_clause("counterclockwise quadrant cycle" if case == 1 else "clockwise quadrant cycle", cyc))
    listing = quadrant_listing(c, j)
    results.append(_clause(
        "quadrant listing",
        [f"z{k + 1} in {q}, expected Q{listing[k % 4]}" for k, q in enumerate(quads) if q != listing[k % 4]],
    ))
    return results


def _real_pair_clauses(zs) -> list[ClauseResult]:
    """Case 3 relations, 1-based pairs (z_{2k-1}, z_{2k})."""
    n = len(zs)
    mod = _check_moduli(zs, lambda k: "<=" if k % 2 else "<")
    imag = [f"z{k + 1}={_fmt(z)}" for k, z in enumerate(zs) if quadrant_of(z) in ("+im", "-im")]
    pairs = []
    for k in range(1, n // 2 + 1):
        a, b = zs[2 * k - 2], zs[2 * k - 1]
        if _equal(abs(a), abs(b)):
            if not _close(a, b.conjugate()):
                pairs.append(f"|z{2 * k - 1}|=|z{2 * k}| but not conjugate")
        else:
            qa, qb = quadrant_of(a), quadrant_of(b)
            if qa not in ("+re", "-re") or qa != qb:
                pairs.append(f"z{2 * k - 1}, z{2 * k} differ in modulus but are not real of one sign")
    signs = []
    for k in range(1, (n - 1) // 2 + 1):
        a, b = zs[2 * k - 1], zs[2 * k]
        sa, sb = _sign(a.real, abs(a)), _sign(b.real, abs(b))
        if sa == 0 or sa != -sb:
            signs.append(f"sign Re z{2 * k}={sa}, sign Re z{2 * k + 1}={sb}")
    return [
        _clause("moduli pattern |z1|<=|z2|<|z3|<=...", mod),
        _clause("no purely imaginary zeros", imag),
        _clause("pair relation", pairs),
        _clause("sign Re z_2k = -sign Re z_2k+1", signs),
    ]


def _imag_pair_clauses(zs) -> list[ClauseResult]:
    """Case 4 relations, 1-based pairs (z_{2k}, z_{2k+1})."""
    n = len(zs)
    mod = _check_moduli(zs, lambda k: "<" if k % 2 else "<=")
    real = [f"z{k + 1}={_fmt(z)}" for k, z in enumerate(zs) if quadrant_of(z) in ("+re", "-re")]
    pairs = []
    for k in range(1, (n - 1) // 2 + 1):
        a, b = zs[2 * k - 1], zs[2 * k]
        if _equal(abs(a), abs(b)):
            if not _close(a, -b.conjugate()):
                pairs.append(f"|z{2 * k}|=|z{2 * k + 1}| but not mirror images")
        else:
            qa, qb = quadrant_of(a), quadrant_of(b)
            if qa not in ("+im", "-im") or qa != qb:
                pairs.append(f"z{2 * k}, z{2 * k + 1} differ in modulus but are not imaginary of one sign")
    signs = []
    for k in range(1, n // 2 + 1):
        a, b = zs[2 * k - 2], zs[2 * k - 1]
        sa, sb = _sign(a.imag, abs(a)), _sign(b.imag, abs(b))
        if sa == 0 or sa != -sb:
            signs.append(f"sign Im z{2 * k - 1}={sa}, sign Im z{2 * k}={sb}")
    return [
        _clause("moduli pattern |z1|<|z2|<=|z3|<...", mod),
        _clause("no real zeros", real),
        _clause("pair relation", pairs),
        _clause("sign Im z_2k-1 = -sign Im z_2k", signs),
    ]


def _tie_group_orderings(zs: list[complex], limit: int = 6):
    """Orderings that permute the leading group of equal-modulus zeros."""
    end = 1
    while end < len(zs) and _equal(abs(zs[0]), abs(zs[end])):
        end += 1
    head = zs[:end]
    if end > limit:
        yield zs
        return
    seen = set()
    for perm in itertools.permutations(range(end)):
        key = tuple(head[i] for i in perm)
        if key in seen:
            continue
        seen.add(key)
        yield list(key) + zs[end:]


def _evaluate(zeros: ZeroList, zs: list[complex], case: int, c: complex, j: int):
    mult = _clause("multiplicities", _check_multiplicities(zeros, case))
    if case in (1, 2):
        clauses = [mult] + _rotating_clauses(zs, case, c, j)
    elif case == 3:
        clauses = [mult] + _real_pair_clauses(zs)
    else:
        clauses = [mult] + _imag_pair_clauses(zs)
    pred = expected_first_zero(c, j)
    first = [ClauseResult(name, ok, _fmt(zs[0]) if not ok else "") for name, ok in pred.evaluate(zs[0])]
    return clauses, first


def verify_distribution(zeros: ZeroList, c: complex, j: int) -> DistributionReport:
    """Check every clause of the distribution theorem for the case of c.

    Equal-modulus zeros carry no intrinsic order, so the orderings of the
    leading tie group are searched and the first fully passing one is kept.
    """
    if len(zeros) == 0:
        raise EmptyZeroList("no zeros to verify")
    c = complex(c)
    case = classify_case(c)
    base = zeros.expanded()
    best = None
    for zs in _tie_group_orderings(base):
        clauses, first = _evaluate(zeros, zs, case, c, j)
        report = DistributionReport(case, c, j, clauses, first, zs)
        if best is None:
            best = report
        if report.overall:
            return report
    return best
