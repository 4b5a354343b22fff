"""Verdict records and deterministic JSON/CSV emission.

Every verification routine returns a VerdictReport; the emitters round
floats to 12 significant digits, render rationals as "num/den" strings and
keep a fixed field order, so identical runs produce byte-identical output.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Any

__all__ = ["VerdictReport", "format_reports", "sig12", "to_jsonable"]


def sig12(x: float) -> float:
    """Round to 12 significant digits (report precision)."""
    return float(f"{float(x):.12g}")


def _clean(value: Any) -> Any:
    """Normalize a value for report emission."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Rational) and not isinstance(value, int):
        f = Fraction(value)
        return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return sig12(value)
    if isinstance(value, str):
        return value
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "tolist"):
        return _clean(value.tolist())
    return str(value)


@dataclass
class VerdictReport:
    """Outcome of one verified claim.

    `margin` is the signed distance to the failure boundary (nonnegative
    when the claim holds with room); `witness` carries the extremal point
    or counterexample data, if any.
    """

    claim: str
    params: dict = field(default_factory=dict)
    passed: bool = True
    margin: float = 0.0
    witness: Any = None

    def to_obj(self) -> dict:
        return {
            "claim": self.claim,
            "params": _clean(self.params),
            "pass": bool(self.passed),
            "margin": sig12(self.margin),
            "witness": _clean(self.witness),
        }


def to_jsonable(value: Any) -> Any:
    """Public cleaning hook: 12-digit floats, rationals as "num/den"."""
    return _clean(value)


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (dict, list)):
        text = json.dumps(value, separators=(",", ":"))
    else:
        text = str(value)
    if any(ch in text for ch in ",\"\n"):
        text = '"' + text.replace('"', '""') + '"'
    return text


def format_reports(reports, fmt: str = "json") -> str:
    """Render reports as a JSON document or a flat CSV table.

    A single report becomes one JSON object; several become an array in
    input order.  CSV flattens params into sorted columns.
    """
    reports = list(reports)
    if fmt == "json":
        objs = [r.to_obj() for r in reports]
        payload = objs[0] if len(objs) == 1 else objs
        return json.dumps(payload, indent=2, allow_nan=False) + "\n"
    if fmt == "csv":
        objs = [r.to_obj() for r in reports]
        param_keys = sorted({k for o in objs for k in o["params"]})
        header = ["claim", *[f"param.{k}" for k in param_keys], "pass", "margin", "witness"]
        lines = [",".join(header)]
        for o in objs:
            row = [o["claim"]]
            row += [_csv_cell(o["params"].get(k)) for k in param_keys]
            row += [_csv_cell(o["pass"]), _csv_cell(o["margin"]), _csv_cell(o["witness"])]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")
