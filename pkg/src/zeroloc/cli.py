"""Command-line front end: ``zeroloc {analyze,locus,grommer,sokal,identities}``.

Jobs are JSON documents validated against ``schemas/job.schema.json``.
Reports are written as deterministic JSON (17 significant digits), locus
samples as CSV and pictures as SVG.

Exit codes: 0 all verdicts pass, 1 a verdict fails, 2 input error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import json
import math
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from . import __version__, grommer, locus, qtheta
from .errors import InputError, NumericalError, SchemaError, ZerolocError
from .model import (
    StructuredFunction,
    build_structured,
    constant_c,
    expand_to_series,
    make_series,
)
from .roots import ZeroList, find_roots, zeros_of_structured
from .verdict import quadrant_of, verify_distribution

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VERDICT, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
SUBCOMMANDS = ("analyze", "locus", "grommer", "sokal", "identities")


# ---------------------------------------------------------------------------
# serialization


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return {"exact": f"{obj.numerator}/{obj.denominator}", "value": float(obj)}
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _number(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0:
        return "0.0"
    text = format(x, ".17g")
    return text if ("e" in text or "." in text) else text + ".0"


def dumps(obj: Any, indent: int = 0) -> str:
    """JSON text with every float written to 17 significant digits.

    The standard encoder has no hook for float formatting, so the walk is
    done here; strings and keys still go through ``json.dumps``.
    """
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{end}}}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj) and len(obj) <= 4:
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + f"\n{end}]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _number(obj)
    return json.dumps(obj)


# ---------------------------------------------------------------------------
# input


def load_schema() -> dict:
    text = resources.files("zeroloc").joinpath("schemas/job.schema.json").read_text()
    return json.loads(text)


def validate_job(job: Any) -> dict:
    try:
        jsonschema.validate(job, load_schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise SchemaError(f"job does not match the schema at '{path}': {exc.message}") from None
    return job


def read_job(path: str | None) -> dict:
    if path is None:
        raise SchemaError("this subcommand needs --input")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    try:
        job = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from None
    return validate_job(job)


def _cx(pair) -> complex:
    return complex(pair[0], pair[1])


def build_structured_from(payload: dict) -> StructuredFunction:
    return build_structured(_cx(payload["f0"]), payload["b"], _cx(payload["g0"]),
                            payload["j"], payload["a"])


def build_series_from(job: dict, truncation: int | None):
    kind, payload = job["kind"], job["payload"]
    if kind == "structured":
        return expand_to_series(build_structured_from(payload))
    if kind == "series":
        return make_series([_cx(c) for c in payload["coeffs"]], payload.get("provenance", "user"))
    N = truncation or payload.get("N", qtheta.DEFAULT_N)
    if kind == "qexp":
        return qtheta.qexp_series(qtheta.QSpec(_cx(payload["q"]), N))
    return qtheta.qexp_polynomial(N, _cx(payload["q"]))


# ---------------------------------------------------------------------------
# report pieces


def zero_rows(zeros) -> list[dict]:
    return [
        {
            "re": e.location.real,
            "im": e.location.imag,
            "multiplicity": e.multiplicity,
            "modulus": abs(e.location),
            "quadrant": quadrant_of(e.location),
        }
        for e in zeros
    ]


def _zeros_for(job: dict, truncation: int | None) -> ZeroList:
    if job["kind"] == "structured":
        return zeros_of_structured(build_structured_from(job["payload"]))
    return find_roots(build_series_from(job, truncation))


def _c_and_j(job: dict, series) -> tuple[complex, int, str]:
    if job["kind"] == "structured":
        S = build_structured_from(job["payload"])
        return constant_c(S), S.j, "structured"
    parts = grommer.split_series(series.coeffs)
    return parts.c, parts.j, "series normal form"


HYPOTHESIS_ORDER = 20


def _hypotheses(job: dict, series) -> str:
    """Empty when the even and odd parts have only negative zeros, else the reason.

    Structured jobs satisfy this by construction; for series the minors test
    on the first coefficients decides.
    """
    if job["kind"] == "structured":
        return ""
    parts = grommer.split_series(series.coeffs)
    for name, seq in (("even", parts.even), ("odd", parts.odd)):
        order = min(grommer.default_order(seq), HYPOTHESIS_ORDER)
        v = grommer.negativity_verdict(seq, order=order)
        if not v.passed:
            return f"the {name} part fails the negative-zeros minors test at minor {v.fail_index}"
    return ""


def _tolerances(args) -> dict:
    return {
        "cluster_radius": 1e-6,
        "sort_tolerance": 1e-8,
        "axis_tolerance_c": 1e-10,
        "axis_tolerance_z": 1e-8,
        "trust_safety": 0.8,
        "identity_tolerance": args.tol,
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_analyze(job: dict, args, out: dict, side: dict) -> bool:
    analyses = job.get("analyses", {})
    series = build_series_from(job, args.truncation)
    zeros = _zeros_for(job, args.truncation)
    out["trust_radius"] = series.trust_radius
    out["zeros"] = zero_rows(zeros)
    out["unconfirmed"] = zero_rows(zeros.unconfirmed)
    ok = True
    side["zeros"] = zeros
    c = None
    if analyses.get("verdict", True) and len(zeros):
        try:
            c, j, source = _c_and_j(job, series)
            hypotheses = _hypotheses(job, series)
        except InputError as exc:
            out["distribution"] = {"skipped": str(exc)}
        else:
            if hypotheses:
                out["distribution"] = {"skipped": hypotheses}
                c = None
        if c is not None and "distribution" not in out:
            head = ZeroList(tuple(zeros.entries[: args.max_zeros])) if job["kind"] == "qexp" else zeros
            report = verify_distribution(head, c, j)
            out["distribution"] = {**report.as_dict(), "c_source": source}
            ok &= report.overall
            side["c"] = c
    if analyses.get("grommer", False):
        ok &= _grommer_into(job, series, out)
    if analyses.get("locus", False) and job["kind"] == "structured":
        ok &= _locus_into(job, analyses.get("locus"), zeros, out, side)
    if analyses.get("sokal", False) and job["kind"] == "qexp":
        ok &= cmd_sokal(job, args, out, {})
    if analyses.get("identities", False):
        ok &= cmd_identities(job, args, out, {})
    return ok


def _grommer_into(job: dict, series, out: dict) -> bool:
    parts = grommer.split_series(series.coeffs)
    results = {}
    ok = True
    for name, seq in (("even", parts.even), ("odd", parts.odd)):
        v = grommer.negativity_verdict(seq)
        results[name] = {
            "coefficients": seq,
            "minors": v.minors,
            "verdict": v.verdict,
            "fail_index": v.fail_index,
            "exact": v.exact,
            "notes": list(v.notes),
        }
        ok &= v.passed
    out["grommer"] = {
        "alpha": parts.alpha,
        "beta": parts.beta,
        "j": parts.j,
        "c": parts.c,
        "parts": results,
        "overall": "pass" if ok else "fail",
    }
    return ok


def _locus_into(job: dict, spec, zeros, out: dict, side: dict) -> bool:
    S = build_structured_from(job["payload"])
    spec = spec if isinstance(spec, dict) else {}
    moduli = [abs(z.location) for z in zeros] or [1.0]
    r_min = spec.get("r_min", 0.1 * min(moduli))
    r_max = spec.get("r_max", 1.5 * max(moduli))
    n = spec.get("n_samples", 400)
    samples = locus.trace_branch(S, r_min, r_max, n)
    mono = locus.check_arg_monotone(samples)
    cpoints = locus.locate_c_points(S, r_min, r_max, n)
    first = locus.first_crossing(S)
    zs = [z.location for z in zeros]
    offaxis = [z for z in zs if isinstance(quadrant_of(z), int) and r_min < abs(z) < r_max]
    match = max((min(abs(z - p.location) for p in cpoints) for z in offaxis), default=0.0) if cpoints else math.inf
    out["locus"] = {
        "r_range": [r_min, r_max],
        "samples": len(samples),
        "arg_span": samples[-1].arg_unwrapped - samples[0].arg_unwrapped,
        "monotone": mono.ok,
        "decreases": mono.decreases,
        "flat_drifts": mono.flat_drifts,
        "c_points": [
            {"location": p.location, "quadrant": p.quadrant, "problem": p.target, "residual": p.residual}
            for p in cpoints
        ],
        "max_distance_to_zeros": match,
        "first_crossing": {
            "r": first.r,
            "l": first.l,
            "arg": first.arg,
            "expected_arg": first.expected_arg,
            "on_imaginary_axis": first.on_imaginary_axis,
            "literal_angle_matches": first.literal_matches,
        },
    }
    side["samples"] = samples
    side["structured"] = S
    return mono.ok and first.on_imaginary_axis and first.arg_matches and match < 1e-7


def cmd_locus(job: dict, args, out: dict, side: dict) -> bool:
    if job["kind"] != "structured":
        raise InputError("the locus subcommand needs a structured job")
    zeros = _zeros_for(job, args.truncation)
    out["zeros"] = zero_rows(zeros)
    side["zeros"] = zeros
    side["c"] = constant_c(build_structured_from(job["payload"]))
    return _locus_into(job, job.get("analyses", {}).get("locus", True), zeros, out, side)


def cmd_grommer(job: dict, args, out: dict, side: dict) -> bool:
    if job["kind"] not in ("structured", "series"):
        raise InputError("the grommer subcommand needs a structured or series job")
    return _grommer_into(job, build_series_from(job, args.truncation), out)


def _sokal_for_q(q: complex, N: int, m: int, out: dict, side: dict) -> bool:
    rep = qtheta.conjecture_report(qtheta.QSpec(q, N), m)
    out["conjecture"] = {
        "q": q,
        "N": N,
        "exploratory": rep.exploratory,
        "zeros": rep.zeros,
        "quadrants": rep.quadrants,
        "all_simple": rep.all_simple,
        "min_distance": rep.min_distance,
        "distinct_moduli": rep.distinct_moduli,
        "min_modulus_gap": rep.min_modulus_gap,
        "separation_factor": rep.separation_factor,
        "inverse_abs_q": 1 / abs(q),
        "note": rep.note,
    }
    ok = rep.all_simple and rep.distinct_moduli
    side["zeros"] = ZeroList(tuple(find_roots(qtheta.qexp_series(qtheta.QSpec(q, N))).entries[:m]))
    if abs(q.imag) <= 1e-15 and q.real < 0:
        rho = -q.real
        neg = qtheta.negative_q_check(rho, N, m, raise_on_failure=False)
        si = qtheta.self_interlacing_ratio(rho, N)
        out["negative_q"] = {
            "rho": rho,
            "zeros": neg.zeros,
            "real": neg.real,
            "simple": neg.simple,
            "alternating_from_negative": neg.alternating,
            "ratio_margins": neg.ratio_margins,
            "ok": neg.ok,
        }
        out["self_interlacing"] = {
            "max_imag": si.max_imag,
            "intervals": [list(t) for t in si.intervals],
            "monotone": si.monotone,
            "sign_flips": si.sign_flips,
            "ok": si.ok,
        }
        ok &= neg.ok and si.ok
    elif abs(q.imag) <= 1e-15 and 0 < q.real < 1:
        chain = qtheta.interlacing_check(q.real, N, min(m, 5))
        out["interlacing_chain"] = {
            "betas": chain.betas,
            "alphas": chain.alphas,
            "min_relative_gap": chain.min_margin,
            "holds": chain.holds,
        }
        ok &= chain.holds
    elif abs((q * q).imag) <= 1e-14 and (q * q).real < 0:
        rho = abs(q)
        mu = cmath.sqrt(q / rho)
        rotated = qtheta.rotated_qexp(rho, N, mu)
        zeros = find_roots(rotated)
        head = ZeroList(tuple(zeros.entries[:m]))
        parts = grommer.split_series(rotated.coeffs)
        structural = verify_distribution(head, parts.c, parts.j)
        stated = verify_distribution(head, mu.conjugate(), parts.j)
        out["rotated"] = {
            "mu": mu,
            "c_structural": parts.c,
            "distribution": structural.as_dict(),
            "distribution_with_conj_mu": stated.as_dict(),
        }
        ok &= structural.overall
        side["zeros"] = head
        side["c"] = parts.c
    return ok


SOKAL_SUITE = (-1.0, -0.3, -0.6, -0.9, 0.8, 0.4j, 0.7j)


def cmd_sokal(job: dict | None, args, out: dict, side: dict) -> bool:
    if job is None:
        ok = True
        suite = {}
        for q in SOKAL_SUITE:
            sub: dict = {}
            ok &= _sokal_for_q(complex(q), args.truncation or 100, args.max_zeros, sub, {})
            suite[str(q)] = sub
        out["suite"] = suite
        return ok
    if job["kind"] != "qexp":
        raise InputError("the sokal subcommand needs a qexp job")
    q = _cx(job["payload"]["q"])
    N = args.truncation or job["payload"].get("N", qtheta.DEFAULT_N)
    return _sokal_for_q(q, N, args.max_zeros, out, side)


def cmd_identities(job: dict | None, args, out: dict, side: dict) -> bool:
    payload = (job or {}).get("payload", {}) if job and job.get("kind") == "qexp" else {}
    rho = abs(_cx(payload["q"])) if "q" in payload else 0.7
    N = args.truncation or payload.get("N", qtheta.DEFAULT_N)
    rng = np.random.default_rng(args.seed)
    u, v = rng.random((2, 20))
    zs = [2 * math.sqrt(a) * cmath.exp(2j * math.pi * b) for a, b in zip(u, v)]
    ok = True
    gauss = []
    for n in range(1, 13):
        for p, mu in qtheta.admissible_mus(n):
            d = qtheta.gauss_nu(n, mu)
            gauss.append({"n": n, "p": p, "mu": mu, "nu": d.nu,
                          "modulus_residual": d.modulus_residual,
                          "fourth_power_residual": d.fourth_power_residual})
            ok &= d.modulus_residual < 1e-10 and d.fourth_power_residual < args.tol
    reps = []
    for n in (2, 3, 4, 8):
        for p, mu in qtheta.admissible_mus(n):
            r = qtheta.representation_residual(n, mu, rho, zs, N)
            reps.append({"n": n, "p": p, "mu": mu, "general": r.general, "even_form": r.even_form,
                         "special_form": r.special, "folded_even_odd": r.folded})
            ok &= r.max() < args.tol
    sign = qtheta.two_term_sign_resolution(rho, zs, N)
    ok &= sign.orders_of_magnitude >= 6
    out["identities"] = {
        "rho": rho,
        "N": N,
        "seed": args.seed,
        "gauss_sums": gauss,
        "representations": reps,
        "two_term_sign": {
            "canonical": "Phi_e(iz) - i Phi_o(iz)",
            "minus_residual": sign.minus_residual,
            "plus_residual": sign.plus_residual,
            "orders_of_magnitude": sign.orders_of_magnitude,
            "note": "the '+' variant does not satisfy F'(z) = F(-rho z); the minus sign is used",
        },
    }
    return ok


# ---------------------------------------------------------------------------
# side files


def write_locus_csv(path: Path, samples) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "phi", "u_residual", "arg_unwrapped"])
        for s in samples:
            w.writerow([format(s.r, ".17g"), format(s.phi, ".17g"),
                        format(s.u_residual, ".17g"), format(s.arg_unwrapped, ".17g")])


def write_zeros_csv(path: Path, zeros) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["re", "im", "multiplicity", "modulus", "quadrant"])
        for row in zero_rows(zeros):
            w.writerow([format(row["re"], ".17g"), format(row["im"], ".17g"), row["multiplicity"],
                        format(row["modulus"], ".17g"), row["quadrant"]])


def write_svg(path: Path, side: dict) -> None:
    """Level curve u = 0 (solid), the four arg targets (dashed) and the zeros (dots)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "zeroloc"
    zeros = side.get("zeros")
    pts = np.array([e.location for e in zeros], dtype=complex) if zeros is not None else np.zeros(0, complex)
    extent = 1.25 * float(np.max(np.abs(pts))) if pts.size else 3.0
    fig, ax = plt.subplots(figsize=(800 / 72, 800 / 72), dpi=72)
    S = side.get("structured")
    c = side.get("c")
    if S is not None and c is not None:
        from .model import _R_unchecked

        x = np.linspace(-extent, extent, 601)
        X, Y = np.meshgrid(x, x)
        Z = X + 1j * Y
        with np.errstate(all="ignore"):
            R = _R_unchecked(S, Z)
            u = np.log(np.abs(R))
            ax.contour(X, Y, u, levels=[0.0], colors="tab:blue", linewidths=1.2)
            for k, w in enumerate((c, -np.conj(c), -c, np.conj(c))):
                # the ray arg R = arg w: imaginary part of R/w vanishes with positive real part
                ratio = R / w
                im = np.where(ratio.real > 0, ratio.imag, np.nan)
                ax.contour(X, Y, im, levels=[0.0], colors="tab:red", linestyles="dashed", linewidths=0.8)
        ax.plot([], [], color="tab:blue", label="$u(z)=0$")
        ax.plot([], [], color="tab:red", linestyle="dashed", label="$R(z)/|R(z)|=c$")
    if pts.size:
        ax.plot(pts.real, pts.imag, "o", color="black", markersize=5, label="zeros")
    ax.axhline(0, color="gray", linewidth=0.5)
    ax.axvline(0, color="gray", linewidth=0.5)
    ax.set_xlim(-extent, extent)
    ax.set_ylim(-extent, extent)
    ax.set_aspect("equal")
    ax.legend(loc="upper right")
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zeroloc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", help="job file (JSON)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", action="append", choices=("json", "csv", "svg"),
                       help="output format, repeatable (default json)")
        p.add_argument("--truncation", type=int, help="series truncation order N")
        p.add_argument("--max-zeros", type=int, default=8, help="number of leading zeros to test")
        p.add_argument("--tol", type=float, default=1e-9, help="identity residual tolerance")
        p.add_argument("--seed", type=int, default=0, help="seed for random sample points")
    return parser


HANDLERS = {
    "analyze": cmd_analyze,
    "locus": cmd_locus,
    "grommer": cmd_grommer,
    "sokal": cmd_sokal,
    "identities": cmd_identities,
}


def _header(command: str, job: dict | None, args) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "input": job,
        "tolerances": _tolerances(args),
    }


def execute(command: str, job: dict | None, args) -> tuple[int, dict, dict]:
    """Run one job; returns the exit code, the report document and plot data."""
    out = _header(command, job, args)
    side: dict = {}
    try:
        ok = HANDLERS[command](job, args, out, side)
        code = EXIT_OK if ok else EXIT_VERDICT
        out["status"] = "pass" if ok else "fail"
    except InputError as exc:
        code = EXIT_INPUT
        out["status"] = "error"
        out["error"] = {"type": type(exc).__name__, "message": str(exc)}
    except (NumericalError, ZerolocError) as exc:
        code = EXIT_NUMERIC
        out["status"] = "error"
        out["error"] = {"type": type(exc).__name__, "message": str(exc)}
    return code, out, side


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    formats = args.format or ["json"]
    outdir = Path(args.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"zeroloc: cannot create {outdir}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        job = read_job(args.input) if (args.input or args.command not in ("sokal", "identities")) else None
    except InputError as exc:
        code, side = EXIT_INPUT, {}
        out = _header(args.command, None, args)
        out["status"] = "error"
        out["error"] = {"type": type(exc).__name__, "message": str(exc), "input_file": args.input}
    else:
        code, out, side = execute(args.command, job, args)
    if "json" in formats:
        (outdir / "report.json").write_text(dumps(to_jsonable(out)) + "\n")
    if "csv" in formats:
        if "samples" in side:
            write_locus_csv(outdir / "locus.csv", side["samples"])
        if "zeros" in side:
            write_zeros_csv(outdir / "zeros.csv", side["zeros"])
    if "svg" in formats and code != EXIT_INPUT:
        write_svg(outdir / "plot.svg", side)
    if "error" in out:
        print(f"zeroloc: {out['error']['type']}: {out['error']['message']}", file=sys.stderr)
    else:
        print(f"zeroloc {args.command}: {out['status']}")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
