"""Command-line front end: ``qdt {predict,validate,quarterlaw} CONFIG``.

Exit codes: 0 success, 1 invariant violation, 2 input error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__, _kernels
from .config import (
    SCHEMA_ID,
    ExperimentConfig,
    QuarterLawSpec,
    composite_space,
    load_config,
    resolve_state,
)
from .entanglement import (
    CLASSIFY_TOL,
    is_product_state,
    prospect_entanglement_gate,
    separability_test,
)
from .errors import ConfigError, ConvergenceError, InvariantViolation
from .events import UncertainUnion
from .linalg import DEFAULT_TOL
from .lottery import predict
from .prospects import (
    ProspectLattice,
    lattice_probabilities,
    povm_deviation,
    prospect_operator,
)
from .quarterlaw import estimate_aggregate
from .report import Check, ProspectRow, QuantumSection, ReportDocument, render

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT = 0, 1, 2
QUARTER_SLACK = 0.005


def _metadata(tol: float, **extra) -> dict:
    meta = {"tool_version": __version__, "schema": SCHEMA_ID, "backend": _kernels.backend_name(),
            "tol": tol, "classify_tol": CLASSIFY_TOL}
    meta.update({k: v for k, v in extra.items() if v is not None})
    return meta


def _theta(config: ExperimentConfig, theta: float | None) -> float:
    return config.attraction.theta if theta is None else theta


def _prediction(config: ExperimentConfig, tol: float, theta: float | None):
    if not config.lotteries:
        raise ConfigError("this command needs a 'lotteries' section")
    return predict(
        config.lotteries,
        config.utility,
        theta=_theta(config, theta),
        ranking=config.attraction.ranking,
        empirical=config.empirical,
        tol=tol,
    )


def quantum_evaluation(config: ExperimentConfig, tol: float = DEFAULT_TOL):
    """Evaluate the lottery lattice through the prospect engine.

    Returns the :class:`QuantumSection` and its validation rows.
    """
    space = composite_space(config)
    rho = resolve_state(config, tol)
    union = UncertainUnion.normalized(space.space_b, config.quantum.belief_amplitudes)
    lattice = ProspectLattice.complete(space.space_a, union)
    raw = lattice_probabilities(rho, lattice, normalize=False, tol=tol)
    norm = lattice_probabilities(rho, lattice, normalize=True, tol=tol)
    product = is_product_state(rho, space.dims, CLASSIFY_TOL)

    rows, misclassified, gate_fail, forced_q = [], [], [], [0.0]
    for pr, r, n in zip(lattice, raw, norm):
        sep = separability_test(prospect_operator(pr).matrix, space.dims, CLASSIFY_TOL)
        gate = prospect_entanglement_gate(rho, pr, CLASSIFY_TOL)
        entangled_expected = pr.uncertainty.mode_count >= 2
        if (not sep.separable) != entangled_expected:
            misclassified.append(pr.outcome.label)
        if not gate.holds:
            gate_fail.append(pr.outcome.label)
        if gate.q_must_vanish:
            forced_q.append(abs(gate.q))
        rows.append(ProspectRow(
            pr.outcome.label, r.p, r.f, r.q, n.p, n.f, n.q,
            sep.residual, not sep.separable, gate.q_must_vanish, gate.holds,
        ))
    section = QuantumSection(
        space.dims, tuple(union.amplitudes), product.residual, product.separable,
        povm_deviation(lattice), tuple(rows),
    )
    sum_p = abs(math.fsum(d.p for d in norm) - 1.0)
    sum_f = abs(math.fsum(d.f for d in norm) - 1.0)
    sum_q = abs(math.fsum(d.q for d in norm))
    split = max(abs(d.p - d.f - d.q) for d in raw)
    overshoot = max(max(abs(d.q) - 1.0, 0.0) for d in norm)
    checks = [
        Check("quantum.raw_p_eq_f_plus_q", split, split <= tol, tol),
        Check("quantum.sum_p", sum_p, sum_p <= tol, tol),
        Check("quantum.sum_f", sum_f, sum_f <= tol, tol),
        Check("quantum.alternation_sum_q", sum_q, sum_q <= tol, tol),
        Check("quantum.q_in_range", overshoot, overshoot <= 0.0, 0.0),
        Check("quantum.povm_deviation", section.povm_deviation, None, None,
              "diagnostic: 1_A (x) |B><B| vs 1_AB"),
        Check("quantum.separability_classification", float(len(misclassified)), not misclassified, 0.0,
              ",".join(misclassified)),
        Check("quantum.interference_gate", max(forced_q), not gate_fail, CLASSIFY_TOL,
              ",".join(gate_fail)),
    ]
    return section, checks


def _prediction_checks(prediction, tol: float) -> list[Check]:
    return [Check(f"prediction.{name}", res, ok, tol) for name, res, ok in prediction.consistency(tol)]


def run_predict(config: ExperimentConfig, tol: float = DEFAULT_TOL, theta: float | None = None) -> ReportDocument:
    prediction = _prediction(config, tol, theta)
    doc = ReportDocument("predict", _metadata(tol, theta=_theta(config, theta)), prediction)
    doc.checks.extend(_prediction_checks(prediction, tol))
    if config.quantum is not None:
        doc.quantum, qchecks = quantum_evaluation(config, tol)
        doc.checks.extend(qchecks)
    if doc.failed:
        raise InvariantViolation(
            "internal consistency failed: " + ", ".join(c.name for c in doc.failed)
        )
    return doc


def run_validate(config: ExperimentConfig, tol: float = DEFAULT_TOL, theta: float | None = None) -> ReportDocument:
    """Executable invariant checks; failures are reported, not raised."""
    if config.quantum is None:
        raise ConfigError("validate needs a 'quantum' section")
    prediction = _prediction(config, tol, theta)
    doc = ReportDocument("validate", _metadata(tol, theta=_theta(config, theta)), prediction)
    doc.checks.extend(_prediction_checks(prediction, tol))
    doc.quantum, qchecks = quantum_evaluation(config, tol)
    doc.checks.extend(qchecks)
    return doc


def run_quarterlaw(
    law: QuarterLawSpec, samples: int | None = None, seed: int | None = None, tol: float = DEFAULT_TOL
) -> ReportDocument:
    """Monte Carlo estimate of the aggregate attraction factor.

    For the uniform-magnitude family the estimate must lie within
    ``3 * standard_error + 0.005`` of 1/4; other families get an
    informational row.
    """
    seed = law.seed if seed is None else seed
    if seed is None:
        raise ConfigError("quarterlaw needs a seed (--seed or quarterlaw.seed)")
    samples = law.samples if samples is None else samples
    result = estimate_aggregate(law.distribution, samples, seed)
    doc = ReportDocument("quarterlaw", _metadata(tol, seed=seed), mc=result)
    gap = abs(result.aggregate_abs_q - 0.25)
    if law.distribution.kind == "uniform_magnitude":
        bound = 3.0 * result.standard_error + QUARTER_SLACK
        doc.checks.append(Check("quarter_law", gap, gap <= bound, bound))
    else:
        doc.checks.append(Check("quarter_law", gap, None, None, "no pass/fail for this family"))
    doc.checks.append(Check("magnitude_mean", law.distribution.magnitude_mean, None, None,
                            "analytic mean of |q| law"))
    return doc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="config file path, or a bundled fixture name such as kt_pair1")
    common.add_argument("--seed", type=int, default=None, help="random seed (quarterlaw)")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="numerical tolerance")
    common.add_argument("--theta", type=float, default=None, help="attraction certainty threshold")
    common.add_argument("--format", choices=("human", "records"), default="human")
    common.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="qdt", description="Quantum decision theory engine")
    parser.add_argument("--version", action="version", version=f"qdt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("predict", parents=[common], help="predict lottery choice probabilities")
    sub.add_parser("validate", parents=[common], help="run invariant checks on the quantum evaluation")
    ql = sub.add_parser("quarterlaw", parents=[common], help="Monte Carlo check of the quarter law")
    ql.add_argument("--samples", type=int, default=None, help="override quarterlaw.samples")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.command == "predict":
            doc = run_predict(config, args.tol, args.theta)
        elif args.command == "validate":
            doc = run_validate(config, args.tol, args.theta)
        else:
            if config.quarterlaw is None:
                raise ConfigError("quarterlaw needs a 'quarterlaw' section")
            doc = run_quarterlaw(config.quarterlaw, args.samples, args.seed, args.tol)
    except InvariantViolation as exc:
        print(f"qdt: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ConfigError, FileNotFoundError, ValueError, ConvergenceError) as exc:
        print(f"qdt: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    text = render(doc, args.format)
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if doc.ok else EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
