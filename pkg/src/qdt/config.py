"""Experiment configuration documents (YAML, schema ``qdt-experiment/1``).

See ``fixtures/SCHEMA.txt`` for the field reference. Complex numbers are
written as ``[re, im]`` pairs (a bare real is accepted on input). Errors carry
the 1-based line of the offending field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from .errors import ConfigError
from .events import StatisticalOperator
from .linalg import DEFAULT_TOL, HilbertSpace
from .lottery import DEFAULT_THETA, Lottery, UtilityFunction, utility_factors
from .prospects import CompositeSpace
from .quarterlaw import AttractionDistribution

SCHEMA_ID = "qdt-experiment/1"
PRESETS = ("product_state", "correlated_state", "entangled_state", "maximally_mixed")
FIXTURES = ("kt_pair1", "kt_pair2", "product_state", "correlated_state",
            "entangled_state", "dimB1", "quarter_law")

_TOP_KEYS = {"schema", "lotteries", "utility", "attraction", "empirical", "quantum", "quarterlaw"}


@dataclass(frozen=True)
class AttractionSpec:
    mode: str = "heuristic"
    theta: float = DEFAULT_THETA
    ranking: tuple[str, ...] | None = None


@dataclass(frozen=True)
class QuantumSpec:
    """Strategic state (preset name or explicit matrix) and belief amplitudes."""

    strategic_state: str | tuple[tuple[complex, ...], ...]
    belief_amplitudes: tuple[complex, ...] = (1 / math.sqrt(2), 1 / math.sqrt(2))


@dataclass(frozen=True)
class QuarterLawSpec:
    distribution: AttractionDistribution = field(default_factory=AttractionDistribution)
    samples: int = 1_000_000
    seed: int | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    lotteries: tuple[Lottery, ...] = ()
    utility: UtilityFunction = field(default_factory=UtilityFunction)
    attraction: AttractionSpec = field(default_factory=AttractionSpec)
    empirical: Mapping[str, float] | None = None
    quantum: QuantumSpec | None = None
    quarterlaw: QuarterLawSpec | None = None
    schema: str = SCHEMA_ID


# -- locating nodes -----------------------------------------------------------

def _node_at(node, path):
    for key in path:
        if isinstance(node, yaml.MappingNode):
            match = [v for k, v in node.value if k.value == key]
            if not match:
                return node
            node = match[0]
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
        else:
            return node
    return node


class _Reader:
    def __init__(self, root):
        self.root = root

    def fail(self, path, message):
        node = _node_at(self.root, path)
        line = node.start_mark.line + 1 if node is not None else None
        where = ".".join(str(p) for p in path) or "<document>"
        raise ConfigError(f"{where}: {message}", line)


def _complex(value, reader, path) -> complex:
    if isinstance(value, bool):
        reader.fail(path, "expected a number or an [re, im] pair")
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if isinstance(value, list) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(float(value[0]), float(value[1]))
    reader.fail(path, f"expected a complex literal [re, im], got {value!r}")


def _float(value, reader, path) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        reader.fail(path, f"expected a number, got {value!r}")
    return float(value)


def _mapping(value, reader, path, allowed) -> dict:
    if not isinstance(value, dict):
        reader.fail(path, "expected a mapping")
    extra = set(value) - set(allowed)
    if extra:
        reader.fail(path, f"unknown keys {sorted(extra)}")
    return value


def _lotteries(raw, reader) -> tuple[Lottery, ...]:
    if not isinstance(raw, list) or len(raw) < 2:
        reader.fail(["lotteries"], "expected a sequence of at least two lotteries")
    out = []
    for i, item in enumerate(raw):
        path = ["lotteries", i]
        item = _mapping(item, reader, path, {"label", "outcomes"})
        if "label" not in item or "outcomes" not in item:
            reader.fail(path, "a lottery needs 'label' and 'outcomes'")
        outs = item["outcomes"]
        if not isinstance(outs, list) or not outs:
            reader.fail(path + ["outcomes"], "expected a non-empty sequence of [payoff, probability]")
        pairs = []
        for j, pair in enumerate(outs):
            if not isinstance(pair, list) or len(pair) != 2:
                reader.fail(path + ["outcomes", j], "expected [payoff, probability]")
            pairs.append(tuple(_float(v, reader, path + ["outcomes", j]) for v in pair))
        try:
            out.append(Lottery(str(item["label"]), tuple(pairs)))
        except ValueError as exc:
            reader.fail(path + ["outcomes"], str(exc))
    labels = [lot.label for lot in out]
    if len(set(labels)) != len(labels):
        reader.fail(["lotteries"], f"duplicate lottery labels {labels}")
    return tuple(out)


def _utility(raw, reader) -> UtilityFunction:
    raw = _mapping(raw, reader, ["utility"], {"kind", "scale", "exponent"})
    try:
        return UtilityFunction(
            str(raw.get("kind", "linear")),
            _float(raw.get("scale", 1.0), reader, ["utility", "scale"]),
            _float(raw.get("exponent", 1.0), reader, ["utility", "exponent"]),
        )
    except ValueError as exc:
        reader.fail(["utility"], str(exc))


def _attraction(raw, reader, labels) -> AttractionSpec:
    raw = _mapping(raw, reader, ["attraction"], {"mode", "theta", "ranking"})
    mode = raw.get("mode", "heuristic")
    theta = _float(raw.get("theta", DEFAULT_THETA), reader, ["attraction", "theta"])
    if theta < 0:
        reader.fail(["attraction", "theta"], "theta must be nonnegative")
    if mode == "heuristic":
        if "ranking" in raw:
            reader.fail(["attraction", "ranking"], "ranking is only used with mode: explicit")
        return AttractionSpec("heuristic", theta, None)
    if mode != "explicit":
        reader.fail(["attraction", "mode"], f"mode must be 'heuristic' or 'explicit', got {mode!r}")
    ranking = raw.get("ranking")
    if not isinstance(ranking, list):
        reader.fail(["attraction"], "mode: explicit needs a 'ranking' list of labels")
    ranking = tuple(str(x) for x in ranking)
    if sorted(ranking) != sorted(labels) or len(set(ranking)) != len(ranking):
        reader.fail(["attraction", "ranking"], f"{list(ranking)} is not a permutation of {labels}")
    return AttractionSpec("explicit", theta, ranking)


def _empirical(raw, reader, labels) -> dict[str, float]:
    if not isinstance(raw, dict):
        reader.fail(["empirical"], "expected a mapping label -> frequency")
    freqs = {str(k): _float(v, reader, ["empirical", k]) for k, v in raw.items()}
    if sorted(freqs) != sorted(labels):
        reader.fail(["empirical"], f"labels {sorted(freqs)} do not match lotteries {sorted(labels)}")
    total = math.fsum(freqs.values())
    if abs(total - 1.0) > 1e-9:
        reader.fail(["empirical"], f"frequencies sum to {total:.12g}, not 1")
    return {lab: freqs[lab] for lab in labels}


def _quantum(raw, reader) -> QuantumSpec:
    raw = _mapping(raw, reader, ["quantum"], {"strategic_state", "belief_amplitudes"})
    if "strategic_state" not in raw:
        reader.fail(["quantum"], "missing 'strategic_state'")
    st = raw["strategic_state"]
    if isinstance(st, str):
        if st not in PRESETS:
            reader.fail(["quantum", "strategic_state"], f"unknown preset {st!r}; expected one of {PRESETS}")
        state = st
    elif isinstance(st, list) and st and all(isinstance(r, list) for r in st):
        state = tuple(
            tuple(_complex(v, reader, ["quantum", "strategic_state", i, j]) for j, v in enumerate(row))
            for i, row in enumerate(st)
        )
    else:
        reader.fail(["quantum", "strategic_state"], "expected a preset name or a matrix of [re, im] entries")
    amps = raw.get("belief_amplitudes")
    if amps is None:
        amps_t = QuantumSpec.__dataclass_fields__["belief_amplitudes"].default
    else:
        if not isinstance(amps, list) or not amps:
            reader.fail(["quantum", "belief_amplitudes"], "expected a non-empty list of [re, im] pairs")
        amps_t = tuple(_complex(a, reader, ["quantum", "belief_amplitudes", i]) for i, a in enumerate(amps))
        weight = math.fsum(abs(a) ** 2 for a in amps_t)
        if abs(weight - 1.0) > 1e-9:
            reader.fail(["quantum", "belief_amplitudes"], f"squared amplitudes sum to {weight:.12g}, not 1")
    return QuantumSpec(state, amps_t)


def _quarterlaw(raw, reader) -> QuarterLawSpec:
    raw = _mapping(raw, reader, ["quarterlaw"], {"kind", "params", "lattice_size", "samples", "seed"})
    params = raw.get("params", {}) or {}
    if not isinstance(params, dict):
        reader.fail(["quarterlaw", "params"], "expected a mapping")
    try:
        dist = AttractionDistribution(
            str(raw.get("kind", "uniform_magnitude")),
            {k: _float(v, reader, ["quarterlaw", "params", k]) for k, v in params.items()},
            raw.get("lattice_size", 2),
        )
    except (ValueError, TypeError) as exc:
        reader.fail(["quarterlaw"], str(exc))
    samples = raw.get("samples", 1_000_000)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 1:
        reader.fail(["quarterlaw", "samples"], "samples must be a positive integer")
    seed = raw.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int) or seed < 0):
        reader.fail(["quarterlaw", "seed"], "seed must be a nonnegative integer")
    return QuarterLawSpec(dist, samples, seed)


def parse_config(source: str) -> ExperimentConfig:
    """Parse and validate a configuration document.

    Raises
    ------
    ConfigError
        ``kind="syntax"`` for unparsable or empty documents, ``kind="semantic"``
        for invariant violations; both carry a line number when available.
    """
    try:
        root = yaml.compose(source, Loader=yaml.SafeLoader)
        data = yaml.safe_load(source)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(str(getattr(exc, "problem", exc)), mark.line + 1 if mark else None, "syntax") from None
    if root is None or data is None:
        raise ConfigError("empty document", 1, "syntax")
    reader = _Reader(root)
    if not isinstance(data, dict):
        reader.fail([], "top level must be a mapping")
    extra = set(data) - _TOP_KEYS
    if extra:
        reader.fail([], f"unknown top-level keys {sorted(extra)}")
    if data.get("schema") != SCHEMA_ID:
        reader.fail(["schema"], f"schema must be {SCHEMA_ID!r}, got {data.get('schema')!r}")

    lotteries = _lotteries(data["lotteries"], reader) if "lotteries" in data else ()
    labels = [lot.label for lot in lotteries]
    utility = _utility(data.get("utility", {}) or {}, reader)
    for key in ("attraction", "empirical", "quantum"):
        if key in data and not lotteries:
            reader.fail([key], "requires a 'lotteries' section")
    attraction = _attraction(data.get("attraction", {}) or {}, reader, labels)
    empirical = _empirical(data["empirical"], reader, labels) if "empirical" in data else None
    quantum = _quantum(data["quantum"], reader) if "quantum" in data else None
    quarterlaw = _quarterlaw(data["quarterlaw"] or {}, reader) if "quarterlaw" in data else None

    config = ExperimentConfig(lotteries, utility, attraction, empirical, quantum, quarterlaw)
    if quantum is not None:
        try:
            resolve_state(config)
        except ValueError as exc:
            reader.fail(["quantum", "strategic_state"], str(exc))
    return config


def load_config(path_or_fixture: str | Path) -> ExperimentConfig:
    """Read a config file, or a bundled fixture by bare name (``"kt_pair1"``)."""
    path = Path(path_or_fixture)
    if path.exists():
        return parse_config(path.read_text())
    if str(path_or_fixture) in FIXTURES:
        return parse_config(fixture_text(str(path_or_fixture)))
    raise FileNotFoundError(f"no config file or fixture named {str(path_or_fixture)!r}")


def fixture_text(name: str) -> str:
    return resources.files("qdt").joinpath("fixtures", f"{name}.yaml").read_text()


# -- serialization ------------------------------------------------------------

def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def config_to_dict(config: ExperimentConfig) -> dict[str, Any]:
    out: dict[str, Any] = {"schema": config.schema}
    if config.lotteries:
        out["lotteries"] = [
            {"label": lot.label, "outcomes": [[x, p] for x, p in lot.outcomes]} for lot in config.lotteries
        ]
    u = config.utility
    out["utility"] = {"kind": u.kind, "scale": u.scale, "exponent": u.exponent}
    a = config.attraction
    if config.lotteries:
        out["attraction"] = {"mode": a.mode, "theta": a.theta}
        if a.ranking is not None:
            out["attraction"]["ranking"] = list(a.ranking)
    if config.empirical is not None:
        out["empirical"] = dict(config.empirical)
    if config.quantum is not None:
        st = config.quantum.strategic_state
        out["quantum"] = {
            "strategic_state": st if isinstance(st, str) else [[_pair(z) for z in row] for row in st],
            "belief_amplitudes": [_pair(z) for z in config.quantum.belief_amplitudes],
        }
    if config.quarterlaw is not None:
        ql = config.quarterlaw
        out["quarterlaw"] = {
            "kind": ql.distribution.kind,
            "params": dict(ql.distribution.params),
            "lattice_size": ql.distribution.lattice_size,
            "samples": ql.samples,
        }
        if ql.seed is not None:
            out["quarterlaw"]["seed"] = ql.seed
    return out


def dump_config(config: ExperimentConfig) -> str:
    return yaml.safe_dump(config_to_dict(config), sort_keys=False, default_flow_style=None)


# -- strategic states ---------------------------------------------------------

def composite_space(config: ExperimentConfig) -> CompositeSpace:
    if config.quantum is None:
        raise ValueError("configuration has no quantum section")
    labels_a = tuple(lot.label for lot in config.lotteries)
    d_b = len(config.quantum.belief_amplitudes)
    labels_b = ("belief", "disbelief") if d_b == 2 else tuple(f"B{i}" for i in range(d_b))
    return CompositeSpace(HilbertSpace(len(labels_a), labels_a), HilbertSpace(d_b, labels_b))


def preset_matrix(name: str, d_a: int, d_b: int, amplitudes, weights_a=None) -> np.ndarray:
    """Density matrix for a named preset on a ``d_a x d_b`` product space.

    product_state     diag(weights_a) (x) |B><B|
    correlated_state  |0> (x) uniform superposition over H_B
    entangled_state   psi[n, a] = exp(2 pi i n a / d_b) / sqrt(d_a d_b)
    maximally_mixed   identity / (d_a d_b)
    """
    if name == "product_state":
        w = np.full(d_a, 1.0 / d_a) if weights_a is None else np.asarray(weights_a, dtype=float)
        b = np.asarray(amplitudes, dtype=np.complex128).reshape(-1, 1)
        return np.kron(np.diag(w).astype(np.complex128), b @ b.conj().T)
    if name == "correlated_state":
        psi = np.zeros(d_a * d_b, dtype=np.complex128)
        psi[:d_b] = 1.0 / math.sqrt(d_b)
    elif name == "entangled_state":
        n, a = np.meshgrid(np.arange(d_a), np.arange(d_b), indexing="ij")
        psi = (np.exp(2j * np.pi * n * a / d_b) / math.sqrt(d_a * d_b)).ravel()
    elif name == "maximally_mixed":
        return np.eye(d_a * d_b, dtype=np.complex128) / (d_a * d_b)
    else:
        raise ValueError(f"unknown preset {name!r}")
    return np.outer(psi, psi.conj())


def resolve_state(config: ExperimentConfig, tol: float = DEFAULT_TOL) -> StatisticalOperator:
    space = composite_space(config)
    d_a, d_b = space.dims
    st = config.quantum.strategic_state
    if isinstance(st, str):
        weights = utility_factors(config.lotteries, config.utility) if st == "product_state" else None
        m = preset_matrix(st, d_a, d_b, config.quantum.belief_amplitudes, weights)
    else:
        m = np.array(st, dtype=np.complex128)
        if m.shape != (d_a * d_b, d_a * d_b):
            raise ValueError(
                f"strategic state has shape {m.shape}; expected {(d_a * d_b,) * 2} "
                f"for {d_a} lotteries x {d_b} belief modes"
            )
    return StatisticalOperator(m, space, tol)
