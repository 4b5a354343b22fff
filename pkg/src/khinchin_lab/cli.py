"""Batch front door: subcommands that run verification suites, reproduce
the slope and tangent tables, sweep the interpolation function, and emit
machine-readable reports.

Exit status: 0 when every selected verdict passes, 1 on partial failures
(failing claims listed on standard error), 2 on malformed input or an
unwritable output path.  Identical config and seed give byte-identical
output.  KHINCHIN_LAB_THREADS caps the worker pool.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import haagerup, lemmas, schur
from .exactprob import (
    StepLawParams,
    convolve_weighted,
    first_abs_moment,
    gaussian_norm,
    make_step_law,
    second_moment,
    sigma_of,
)
from .reports import VerdictReport, format_reports, sig12, to_jsonable

__all__ = ["DEFAULT_SEED", "RunConfig", "build_config", "main", "parse_weights", "run"]

DEFAULT_SEED = 1729
_VERIFY_CLAIMS = ("all", "two-point", "dominance", "schur", "comparison",
                  "l1l2", "power-floor", "ostrowski", "concavity")


class CliInputError(ValueError):
    """Malformed input; mapped to exit status 2."""


def parse_weights(text: str) -> list:
    """Comma-separated weights; "1/3" stays rational, "0.5" becomes float."""
    if text is None or text.strip() == "":
        raise CliInputError("weights: empty list")
    out = []
    for pos, piece in enumerate(text.split(","), start=1):
        p = piece.strip()
        if not p:
            raise CliInputError(f"weights entry {pos}: empty")
        try:
            if "/" in p:
                out.append(Fraction(p))
            else:
                try:
                    out.append(Fraction(int(p)))
                except ValueError:
                    val = float(p)
                    if not math.isfinite(val):
                        raise ValueError("not finite")
                    out.append(val)
        except (ValueError, ZeroDivisionError) as exc:
            raise CliInputError(f"weights entry {pos} ({p!r}): {exc}") from None
    return out


def _parse_rational(text: str, name: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliInputError(f"{name}: {exc}") from None


def _parse_p(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        val = float(text)
    except ValueError as exc:
        raise CliInputError(f"p: {exc}") from None
    if not math.isfinite(val):
        raise CliInputError("p: not finite")
    return val


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    output_format: str = "json"
    output_path: str | None = None
    seed: int = DEFAULT_SEED


def _pool_size() -> int:
    env = os.environ.get("KHINCHIN_LAB_THREADS", "")
    if env.strip():
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(4, os.cpu_count() or 1))


def _run_tasks(tasks):
    if len(tasks) <= 1 or _pool_size() == 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=_pool_size()) as ex:
        return list(ex.map(lambda t: t(), tasks))


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliInputError(f"cannot write {path}: {exc}") from None


def _finish(reports: list[VerdictReport], config: RunConfig) -> int:
    _emit(format_reports(reports, config.output_format), config.output_path)
    failed = [r.claim for r in reports if not r.passed]
    if failed:
        print("failed claims: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


def _law(params) -> "object":
    return make_step_law(StepLawParams(params["rho0"], params["L"]))


def _cmd_constants(config: RunConfig) -> int:
    p = config.params
    law = _law(p)
    crit = haagerup.solve_critical_exponent()
    m2 = second_moment(law)
    entries: dict[str, object] = {
        "p": p["p"],
        "rho0": p["rho0"],
        "L": p["L"],
        "gaussian_norm": gaussian_norm(float(p["p"])),
        "critical_exponent": crit.value,
        "critical_residual": crit.residual,
        "schur_zero_mass_threshold": Fraction(1, 2),
        "comparison_zero_mass_limit": 1.0 - 27.0 * math.pi / 128.0,
        "two_weight_threshold_closed_form":
            1.0 - 3.0 * p["L"] * (2.0 - math.sqrt(2.0)) / (2 * p["L"] + 1),
        "sigma": sigma_of(law),
        "first_abs_moment": first_abs_moment(law),
        "second_moment": m2,
    }
    if m2 != 0:
        entries["c1"] = float(first_abs_moment(law)) / math.sqrt(float(m2))
    if p.get("n_given"):
        entries["ratio_sequence"] = schur.equal_weight_ratio_sequence(
            law, p["p"], p["n"])
    if config.output_format == "csv":
        lines = ["name,value"]
        for k, v in entries.items():
            if isinstance(v, list):
                for i, item in enumerate(v, start=1):
                    lines.append(f"{k}_{i},{_csv_scalar(item)}")
            else:
                lines.append(f"{k},{_csv_scalar(v)}")
        _emit("\n".join(lines) + "\n", config.output_path)
    else:
        _emit(json.dumps(to_jsonable(entries), indent=2, allow_nan=False) + "\n",
              config.output_path)
    return 0


def _csv_scalar(v) -> str:
    v = to_jsonable(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _cmd_table1(config: RunConfig) -> int:
    p = config.params
    if p.get("tangents"):
        vals = lemmas.tangent_values()
        ok = all(v > lemmas.TANGENT_LOWER_BOUNDS[L] for L, v in vals.items())
        if config.output_format == "csv":
            _emit(lemmas.tangent_csv(), config.output_path)
        else:
            rows = [{"L": L, "v": sig12(v),
                     "lower_bound": lemmas.TANGENT_LOWER_BOUNDS[L],
                     "exceeds": v > lemmas.TANGENT_LOWER_BOUNDS[L]}
                    for L, v in sorted(vals.items())]
            _emit(json.dumps(rows, indent=2, allow_nan=False) + "\n", config.output_path)
        if not ok:
            print("failed claims: tangent-table-bounds", file=sys.stderr)
            return 1
        return 0
    table = lemmas.slope_table()
    ok, _ = table.check_lower_bounds()
    if config.output_format == "csv":
        _emit(table.to_csv(), config.output_path)
    else:
        rows = [{"L": L, "b": b, "theta": sig12(theta),
                 "lower_bound": lemmas.SLOPE_LOWER_BOUNDS[(L, b)],
                 "exceeds": theta > lemmas.SLOPE_LOWER_BOUNDS[(L, b)]}
                for L, b, theta in table.entries]
        _emit(json.dumps(rows, indent=2, allow_nan=False) + "\n", config.output_path)
    if not ok:
        print("failed claims: slope-table-bounds", file=sys.stderr)
        return 1
    return 0


def _verify_tasks(config: RunConfig) -> list:
    p = config.params
    claim = p["claim"]
    rho0: Fraction = p["rho0"]
    L: int = p["L"]
    weights = p.get("weights") or [1] * p["n"]
    tasks = []

    def with_claim(name, fn):
        if claim in ("all", name):
            tasks.append(fn)

    # "all" selects only claims whose hypotheses the parameters satisfy;
    # naming a claim explicitly runs it regardless (exploratory ranges are
    # flagged in the report and may legitimately fail).
    with_claim("two-point", lambda: lemmas.verify_two_point(p["a"]))
    with_claim("dominance", lambda: lemmas.verify_convex_dominance(L))
    schur_proved = L == 1 and rho0 <= Fraction(1, 2) and float(p["p"]) >= 3
    if claim == "schur" or (claim == "all" and schur_proved):
        tasks.append(lambda: schur.majorization_report(
            p["n"], _law(p), p["p"], p["trials"], config.seed))
    if claim == "comparison" or (claim == "all" and rho0 == 0):
        tasks.append(lambda: schur.verify_gaussian_comparison(
            weights, [_law(p)] * len(weights), p["p"]))
    elif claim == "comparison":
        raise CliInputError("comparison claim needs --rho0 0")
    if claim == "l1l2" or (claim == "all" and rho0 >= Fraction(1, 2)):
        tasks.append(lambda: haagerup.l1_l2_verdict(_law(p), weights))
    if claim == "power-floor" or (claim == "all" and rho0 >= Fraction(1, 2)):
        tasks.append(lambda: haagerup.verify_charfn_power_floor(
            _law(p), (1.0, 1.5, 2.0, 3.0, 5.0), tol=p["tol"]))
    elif claim == "power-floor":
        raise CliInputError("power-floor claim needs --rho0 at least 1/2")
    if claim == "ostrowski":
        tasks.append(lambda: schur.ostrowski_check(
            [float(w) for w in weights], _law(p), p["p"]))
    if claim == "concavity":
        grid = [Fraction(k, 8) for k in range(0, 8)]
        tasks.append(lambda: haagerup.concavity_in_zero_mass(L, 2.0, grid, tol=p["tol"]))
    if not tasks:
        raise CliInputError(f"no applicable checks for claim {claim!r}")
    return tasks


def _cmd_verify(config: RunConfig) -> int:
    reports = _run_tasks(_verify_tasks(config))
    return _finish(reports, config)


def _cmd_haagerup(config: RunConfig) -> int:
    p = config.params
    law = _law(p)
    weights = p.get("weights") or [1] * p["n"]
    budget = p.get("budget")
    quad_kwargs = {"max_evals": budget} if budget else {}
    res = haagerup.first_abs_moment_integral(weights, law, tol=p["tol"], **quad_kwargs)
    conv_kwargs = {"max_atoms": budget} if budget else {}
    s_law = convolve_weighted([law] * len(weights), list(weights), **conv_kwargs)
    enum = first_abs_moment(s_law)
    diff = abs(res.value - float(enum))
    agree_tol = max(10 * p["tol"], 4 * res.abs_error, 1e-9)
    report = VerdictReport(
        claim="abs-moment-dual-route",
        params={"n": len(weights), "rho0": p["rho0"], "L": p["L"], "tol": p["tol"]},
        passed=bool(diff <= agree_tol and res.converged),
        margin=agree_tol - diff,
        witness={"integral": res.value, "integral_err": res.abs_error,
                 "enumeration": enum, "difference": diff},
    )
    return _finish([report], config)


def _cmd_necessity(config: RunConfig) -> int:
    p = config.params
    L = p["L"]

    def schur_side():
        try:
            thr = schur.schur_zero_mass_threshold()
            return VerdictReport(
                claim="schur-zero-mass-threshold",
                params={"p": 3, "L": 1},
                passed=True, margin=0.0,
                witness={"threshold": thr},
            )
        except ArithmeticError as exc:
            return VerdictReport(
                claim="schur-zero-mass-threshold",
                params={"p": 3, "L": 1},
                passed=False, margin=-1.0,
                witness={"error": str(exc)},
            )

    def comparison_side():
        sizes = (10, 100, 1000, 10000)
        # the threshold sequence converges like 1/L, so the sweep tolerance
        # is fixed at 1e-4 rather than tied to the generic --tol
        sweep_tol = 1e-4
        try:
            limit = schur.comparison_zero_mass_limit(sizes, tol=sweep_tol)
            thresholds = {str(s): schur.comparison_threshold_by_L(s) for s in sizes}
            gap = abs(thresholds[str(sizes[-1])] - limit)
            return VerdictReport(
                claim="comparison-zero-mass-limit",
                params={"sizes": list(sizes), "tol": sweep_tol},
                passed=True, margin=sweep_tol - gap,
                witness={"limit": limit, "thresholds": thresholds,
                         "single_block": schur.comparison_threshold_by_L(1)},
            )
        except ArithmeticError as exc:
            return VerdictReport(
                claim="comparison-zero-mass-limit",
                params={"sizes": list(sizes), "tol": sweep_tol},
                passed=False, margin=-1.0,
                witness={"error": str(exc)},
            )

    def critical():
        res = haagerup.solve_critical_exponent()
        return VerdictReport(
            claim="critical-exponent",
            params={"tol": 1e-12},
            passed=res.residual <= 1e-12,
            margin=1e-12 - res.residual,
            witness={"value": res.value, "residual": res.residual,
                     "bracket": list(res.bracket), "sign_changes": res.sign_changes},
        )

    tasks = [schur_side, comparison_side,
             lambda: haagerup.two_weight_threshold(L), critical]
    reports = _run_tasks(tasks)
    return _finish(reports, config)


def _cmd_sweep(config: RunConfig) -> int:
    p = config.params
    law = _law(p)
    n = p["n"]
    if n < 2:
        raise CliInputError("sweep needs --n at least 2")
    lo, hi = p["s_min"], p["s_max"]
    if not (1.0 <= lo < hi):
        raise CliInputError("sweep needs 1 <= s-min < s-max")
    budget = p.get("budget")
    quad_kwargs = {"max_evals": budget} if budget else {}
    ss = [lo + (hi - lo) * k / (n - 1) for k in range(n)]
    results = _run_tasks([
        (lambda s=s: haagerup.charfn_power_integral(law, s, tol=p["tol"], **quad_kwargs))
        for s in ss])
    rows = [{"s": sig12(s), "F_value": sig12(r.value), "err": sig12(r.abs_error)}
            for s, r in zip(ss, results)]
    if config.output_format == "csv":
        lines = ["s,F_value,err"]
        lines += [f"{row['s']:.12g},{row['F_value']:.12g},{row['err']:.12g}" for row in rows]
        _emit("\n".join(lines) + "\n", config.output_path)
    else:
        _emit(json.dumps(rows, indent=2, allow_nan=False) + "\n", config.output_path)
    bad = [s for s, r in zip(ss, results) if not r.converged]
    if bad:
        print(f"failed claims: sweep-convergence at s = {bad}", file=sys.stderr)
        return 1
    return 0


_COMMANDS = {
    "constants": _cmd_constants,
    "table1": _cmd_table1,
    "verify": _cmd_verify,
    "haagerup": _cmd_haagerup,
    "necessity": _cmd_necessity,
    "sweep": _cmd_sweep,
}


def _add_common(sp, fmt_default="json"):
    sp.add_argument("--rho0", default="0", help="zero mass, rational like 1/3")
    sp.add_argument("--L", type=int, default=1, help="block size")
    sp.add_argument("--p", default="3", help="moment order")
    sp.add_argument("--weights", default=None, help="comma list, e.g. 1/3,0.5")
    sp.add_argument("--n", type=int, default=None, help="count (weights, points, trials base)")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--format", choices=("json", "csv"), default=fmt_default)
    sp.add_argument("--out", default=None)
    sp.add_argument("--budget", type=int, default=None,
                    help="cap on integrand evaluations and enumeration atoms")


def build_config(argv) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="khinchin-lab",
        description="verify moment-comparison inequalities for weighted sums "
                    "of symmetric discrete laws")
    subs = parser.add_subparsers(dest="subcommand", required=True)
    for name in _COMMANDS:
        fmt_default = "csv" if name == "table1" else "json"
        sp = subs.add_parser(name)
        _add_common(sp, fmt_default)
        if name == "table1":
            sp.add_argument("--tangents", action="store_true",
                            help="emit last-branch tangent values instead of slopes")
        if name == "verify":
            sp.add_argument("--claim", choices=_VERIFY_CLAIMS, default="all")
            sp.add_argument("--a", default="1/2", help="two-point weight, rational in (0,1)")
        if name == "sweep":
            sp.add_argument("--s-min", dest="s_min", type=float, default=1.0)
            sp.add_argument("--s-max", dest="s_max", type=float, default=20.0)
    ns = parser.parse_args(argv)

    params: dict = {
        "rho0": _parse_rational(ns.rho0, "rho0"),
        "L": ns.L,
        "p": _parse_p(ns.p),
        "weights": parse_weights(ns.weights) if ns.weights is not None else None,
        "n": ns.n if ns.n is not None else (20 if ns.subcommand == "sweep" else 4),
        "n_given": ns.n is not None,
        "trials": ns.trials,
        "tol": ns.tol,
        "budget": ns.budget,
    }
    if ns.L < 1:
        raise CliInputError("L must be at least 1")
    if not (0 <= params["rho0"] <= 1):
        raise CliInputError("rho0 must lie in [0, 1]")
    if params["budget"] is not None and params["budget"] < 1:
        raise CliInputError("budget must be positive")
    if ns.subcommand == "table1":
        params["tangents"] = ns.tangents
    if ns.subcommand == "verify":
        params["claim"] = ns.claim
        params["a"] = _parse_rational(ns.a, "a")
    if ns.subcommand == "sweep":
        params["s_min"] = ns.s_min
        params["s_max"] = ns.s_max
    return RunConfig(
        subcommand=ns.subcommand,
        params=params,
        output_format=ns.format,
        output_path=ns.out,
        seed=ns.seed,
    )


def run(config: RunConfig) -> int:
    try:
        return _COMMANDS[config.subcommand](config)
    except CliInputError:
        raise
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    try:
        config = build_config(argv)
        return run(config)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
