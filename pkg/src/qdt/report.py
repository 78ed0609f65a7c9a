"""Report documents and their human / line-delimited JSON renderings.

Numbers are written with 12 significant digits so reports diff cleanly.
No timestamps are recorded; identical runs give identical bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

from .lottery import PredictionReport
from .quarterlaw import MCResult

SIG_DIGITS = 12


@dataclass(frozen=True)
class Check:
    """One validation row. ``passed`` is ``None`` for informational rows."""

    name: str
    residual: float
    passed: bool | None
    tolerance: float | None = None
    detail: str = ""


@dataclass(frozen=True)
class ProspectRow:
    label: str
    p_raw: float
    f_raw: float
    q_raw: float
    p: float
    f: float
    q: float
    separability_residual: float
    operator_entangled: bool
    q_must_vanish: bool
    gate_holds: bool


@dataclass(frozen=True)
class QuantumSection:
    dims: tuple[int, int]
    belief_amplitudes: tuple[complex, ...]
    state_product_residual: float
    state_product: bool
    povm_deviation: float
    prospects: tuple[ProspectRow, ...]


@dataclass
class ReportDocument:
    command: str
    metadata: dict[str, Any]
    prediction: PredictionReport | None = None
    quantum: QuantumSection | None = None
    mc: MCResult | None = None
    checks: list[Check] = field(default_factory=list)

    @property
    def failed(self) -> list[Check]:
        return [c for c in self.checks if c.passed is False]

    @property
    def ok(self) -> bool:
        return not self.failed


def num(x):
    """Round to 12 significant digits; non-finite values become strings."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, complex):
        return [num(x.real), num(x.imag)]
    x = float(x)
    if not math.isfinite(x):
        return str(x)
    x = float(f"{x:.{SIG_DIGITS}g}")
    return 0.0 if x == 0 else x


def records(doc: ReportDocument) -> list[dict[str, Any]]:
    out: list[dict[str, Any]] = [
        {"record": "meta", "command": doc.command, **{k: num(v) if isinstance(v, float) else v
                                                      for k, v in doc.metadata.items()}}
    ]
    pr = doc.prediction
    if pr is not None:
        for r in pr.records:
            row = {
                "record": "lottery",
                "label": r.label,
                "expected_utility": num(r.expected_utility),
                "f": num(r.f),
                "q": num(r.q),
                "p": num(r.p),
            }
            if pr.empirical is not None:
                row["empirical"] = num(pr.empirical[r.label])
                row["deviation"] = num(pr.deviations[r.label])
            out.append(row)
        rank = {"record": "ranking", "attraction_ranking": list(pr.attraction_ranking),
                "predicted_choice": pr.predicted_choice}
        if pr.deviations is not None:
            rank["max_deviation"] = num(pr.max_deviation)
        out.append(rank)
    qs = doc.quantum
    if qs is not None:
        out.append({
            "record": "quantum",
            "dims": list(qs.dims),
            "belief_amplitudes": [num(complex(b)) for b in qs.belief_amplitudes],
            "state_product": qs.state_product,
            "state_product_residual": num(qs.state_product_residual),
            "povm_deviation": num(qs.povm_deviation),
        })
        for r in qs.prospects:
            out.append({"record": "prospect", **{k: num(v) if not isinstance(v, str) else v
                                                 for k, v in r.__dict__.items()}})
    if doc.mc is not None:
        m = doc.mc
        out.append({
            "record": "montecarlo",
            "kind": m.kind,
            "lattice_size": m.lattice_size,
            "samples": m.sample_count,
            "seed": m.seed,
            "aggregate_abs_q": num(m.aggregate_abs_q),
            "standard_error": num(m.standard_error),
        })
    for c in doc.checks:
        out.append({
            "record": "check",
            "name": c.name,
            "status": "info" if c.passed is None else ("pass" if c.passed else "fail"),
            "residual": num(c.residual),
            "tolerance": num(c.tolerance),
            **({"detail": c.detail} if c.detail else {}),
        })
    return out


def render_records(doc: ReportDocument) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records(doc))


def _g(x) -> str:
    return f"{x:.{SIG_DIGITS}g}" if isinstance(x, float) else str(x)


def render_human(doc: ReportDocument) -> str:
    lines = [f"qdt {doc.command}"]
    lines += [f"  {k}: {_g(v)}" for k, v in doc.metadata.items()]
    pr = doc.prediction
    if pr is not None:
        lines += ["", "Prediction", f"  {'lottery':<12}{'U':>14}{'f':>14}{'q':>14}{'p':>14}"
                  + (f"{'empirical':>14}{'|dev|':>14}" if pr.empirical else "")]
        for r in pr.records:
            row = f"  {r.label:<12}{_g(r.expected_utility):>14}{_g(r.f):>14}{_g(r.q):>14}{_g(r.p):>14}"
            if pr.empirical:
                row += f"{_g(pr.empirical[r.label]):>14}{_g(pr.deviations[r.label]):>14}"
            lines.append(row)
        lines.append(f"  attraction ranking: {' > '.join(pr.attraction_ranking)}")
        lines.append(f"  predicted choice: {pr.predicted_choice}")
        if pr.deviations is not None:
            lines.append(f"  max deviation from empirical: {_g(pr.max_deviation)}")
    qs = doc.quantum
    if qs is not None:
        lines += [
            "",
            f"Quantum evaluation ({qs.dims[0]} x {qs.dims[1]})",
            f"  strategic state product form: {qs.state_product} (residual {_g(qs.state_product_residual)})",
            f"  POVM deviation ||sum P - 1||: {_g(qs.povm_deviation)}",
            f"  {'prospect':<12}{'q_raw':>16}{'p':>16}{'f':>16}{'q':>16}{'sep.residual':>16}  entangled  q=0 forced  gate",
        ]
        for r in qs.prospects:
            lines.append(
                f"  {r.label:<12}{_g(r.q_raw):>16}{_g(r.p):>16}{_g(r.f):>16}{_g(r.q):>16}"
                f"{_g(r.separability_residual):>16}  {str(r.operator_entangled):<9}  "
                f"{str(r.q_must_vanish):<10}  {'ok' if r.gate_holds else 'VIOLATED'}"
            )
    if doc.mc is not None:
        m = doc.mc
        lines += [
            "",
            "Quarter law Monte Carlo",
            f"  distribution: {m.kind}, lattice size {m.lattice_size}",
            f"  samples: {m.sample_count}, seed: {m.seed}",
            f"  aggregate |q|: {_g(m.aggregate_abs_q)} +- {_g(m.standard_error)}",
        ]
    if doc.checks:
        lines += ["", "Checks"]
        for c in doc.checks:
            status = "info" if c.passed is None else ("pass" if c.passed else "FAIL")
            tol = "" if c.tolerance is None else f" (tol {_g(c.tolerance)})"
            lines.append(f"  [{status:>4}] {c.name}: {_g(c.residual)}{tol}{'  ' + c.detail if c.detail else ''}")
    return "\n".join(lines) + "\n"


def render(doc: ReportDocument, fmt: str = "human") -> str:
    if fmt == "records":
        return render_records(doc)
    if fmt == "human":
        return render_human(doc)
    raise ValueError(f"unknown format {fmt!r}")
