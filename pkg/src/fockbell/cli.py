"""Scenario runner: distributions, CHSH, ring certificates, joint
impossibilities, and the quantum-vs-classical comparison from one command.

Exit codes: 0 success, 2 usage error, 3 validation failure, 4 a requested
expectation (``--expect-violation``) was not met.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, bell, fock, hardy, phase_models
from .optics import AngleSettings, three_source_ring, two_source_interferometer
from .serialize import csv_text, tree_text, write_text

SCENARIOS = ("dist", "bchsh", "ghz", "hardy", "compare")

DEFAULTS = {
    "n_alpha": 1,
    "n_beta": 1,
    "n_gamma": None,
    "n": None,
    "zeta": 0.0,
    "theta": 0.0,
    "chi": None,
    "angles": None,
    "scan_zeta": None,
    "scan_theta": None,
    "scan_chi": None,
    "scan_xi": None,
    "m_measured": None,
    "quad_nodes": None,
    "tol": None,
    "seed": 0,
    "samples": 0,
    "output": None,
    "format": "csv",
    "expect_violation": False,
    "max_outcomes": 10_000_000,
}


class UsageError(Exception):
    pass


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class ScanRange:
    start: float
    stop: float
    steps: int

    def values(self) -> list[float]:
        return [float(v) for v in np.linspace(self.start, self.stop, self.steps)]


@dataclass
class ScenarioConfig:
    scenario: str
    n_alpha: int
    n_beta: int
    n_gamma: int | None
    zeta: float
    theta: float
    chi: float | None
    scans: dict[str, ScanRange]
    m_measured: int | None
    quad_nodes: int | None
    tol: float | None
    seed: int
    samples: int
    output: Path | None
    format: str
    expect_violation: bool
    max_outcomes: int

    def echo(self) -> dict:
        out = asdict(self)
        out["output"] = None if self.output is None else str(self.output)
        out["scans"] = {
            name: [rng.start, rng.stop, rng.steps] for name, rng in self.scans.items()
        }
        return out


@dataclass
class ResultRecord:
    scenario: str
    inputs: dict
    outputs: dict
    engine_version: str = __version__
    duration_seconds: float = 0.0

    def to_tree(self) -> dict:
        return asdict(self)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockbell",
        description=(
            "Exact condensate-interferometer statistics and local-realism "
            "certificates"
        ),
    )
    parser.add_argument("scenario_pos", nargs="?", metavar="scenario",
                        help=f"one of {', '.join(SCENARIOS)}")
    parser.add_argument("--scenario", choices=SCENARIOS)
    parser.add_argument("--config", type=Path, help="JSON file mirroring the flags")
    parser.add_argument("--n-alpha", type=int, dest="n_alpha")
    parser.add_argument("--n-beta", type=int, dest="n_beta")
    parser.add_argument("--n-gamma", type=int, dest="n_gamma")
    parser.add_argument("--n", type=int, help="total particles, split equally")
    parser.add_argument("--zeta", type=float)
    parser.add_argument("--theta", type=float)
    parser.add_argument("--chi", type=float)
    parser.add_argument("--angles", help="comma-separated shifter angles")
    parser.add_argument("--scan-zeta", dest="scan_zeta", metavar="START:STOP:STEPS")
    parser.add_argument("--scan-theta", dest="scan_theta", metavar="START:STOP:STEPS")
    parser.add_argument("--scan-chi", dest="scan_chi", metavar="START:STOP:STEPS")
    parser.add_argument("--scan-xi", dest="scan_xi", metavar="START:STOP:STEPS")
    parser.add_argument("--m-measured", type=int, dest="m_measured")
    parser.add_argument("--quad-nodes", type=int, dest="quad_nodes")
    parser.add_argument("--tol", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--output", type=Path)
    parser.add_argument("--format", choices=("csv", "tree"))
    parser.add_argument(
        "--expect-violation",
        dest="expect_violation",
        action=argparse.BooleanOptionalAction,
    )
    parser.add_argument("--max-outcomes", type=int, dest="max_outcomes")
    return parser


def _parse_scan(text: str, name: str) -> ScanRange:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--scan-{name} expects START:STOP:STEPS, got {text!r}")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"--scan-{name}: {exc}") from exc
    if steps < 1:
        raise UsageError(f"--scan-{name}: steps must be at least 1")
    return ScanRange(start, stop, steps)


def _load_config_file(path: Path) -> dict:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise UsageError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise UsageError("config file must hold a JSON object")
    allowed = set(DEFAULTS) | {"scenario"}
    unknown = set(raw) - allowed
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return raw


def parse_config(argv: list[str] | None = None) -> ScenarioConfig:
    """Resolve flags over config-file values over defaults into one config."""
    parser = build_parser()
    args = parser.parse_args(argv)

    merged: dict = dict(DEFAULTS)
    merged["scenario"] = None
    if args.config is not None:
        merged.update(_load_config_file(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    scenario = args.scenario or args.scenario_pos or merged.get("scenario")
    if scenario is None:
        raise UsageError(
            f"no scenario given; choose one of {', '.join(SCENARIOS)}"
        )
    if scenario not in SCENARIOS:
        raise UsageError(f"unknown scenario {scenario!r}")

    if merged["angles"] is not None:
        try:
            parts = [float(v) for v in str(merged["angles"]).split(",")]
        except ValueError as exc:
            raise UsageError(f"--angles: {exc}") from exc
        if len(parts) not in (2, 3):
            raise UsageError("--angles expects two or three comma-separated values")
        merged["zeta"], merged["theta"] = parts[0], parts[1]
        if len(parts) == 3:
            merged["chi"] = parts[2]

    scans: dict[str, ScanRange] = {}
    for name in ("zeta", "theta", "chi", "xi"):
        text = merged[f"scan_{name}"]
        if text is None:
            continue
        if name != "xi" and getattr(args, name, None) is not None:
            raise UsageError(
                f"conflicting point and scan specifications for {name}"
            )
        scans[name] = _parse_scan(str(text), name)

    if merged["n"] is not None:
        n_total = int(merged["n"])
        ways = {"dist": 2, "bchsh": 2, "compare": 2, "ghz": 3, "hardy": 2}[scenario]
        if n_total < 0 or n_total % ways:
            raise ValidationError(
                f"--n must be a non-negative multiple of {ways} for {scenario}, "
                f"got {n_total}"
            )
        explicit = args.n_alpha is not None or args.n_beta is not None
        if explicit and (merged["n_alpha"] + merged["n_beta"]) != n_total:
            raise UsageError("--n conflicts with the per-source populations")
        merged["n_alpha"] = merged["n_beta"] = n_total // ways
        if ways == 3:
            merged["n_gamma"] = n_total // 3

    config = ScenarioConfig(
        scenario=scenario,
        n_alpha=int(merged["n_alpha"]),
        n_beta=int(merged["n_beta"]),
        n_gamma=None if merged["n_gamma"] is None else int(merged["n_gamma"]),
        zeta=float(merged["zeta"]),
        theta=float(merged["theta"]),
        chi=None if merged["chi"] is None else float(merged["chi"]),
        scans=scans,
        m_measured=None if merged["m_measured"] is None else int(merged["m_measured"]),
        quad_nodes=None if merged["quad_nodes"] is None else int(merged["quad_nodes"]),
        tol=None if merged["tol"] is None else float(merged["tol"]),
        seed=int(merged["seed"]),
        samples=int(merged["samples"]),
        output=None if merged["output"] is None else Path(merged["output"]),
        format=str(merged["format"]),
        expect_violation=bool(merged["expect_violation"]),
        max_outcomes=int(merged["max_outcomes"]),
    )
    _validate(config)
    return config


def _validate(config: ScenarioConfig) -> None:
    if config.n_alpha < 0 or config.n_beta < 0:
        raise ValidationError("populations must be non-negative")
    if config.n_gamma is not None and config.n_gamma < 0:
        raise ValidationError("populations must be non-negative")
    if config.tol is not None and config.tol <= 0:
        raise ValidationError("--tol must be positive")
    if config.samples < 0:
        raise ValidationError("--samples must be non-negative")
    if config.quad_nodes is not None and config.quad_nodes < 1:
        raise ValidationError("--quad-nodes must be at least 1")
    if config.max_outcomes < 1:
        raise ValidationError("--max-outcomes must be at least 1")
    if config.scenario == "ghz":
        pops = {config.n_alpha, config.n_beta, config.n_gamma or config.n_alpha}
        if len(pops) != 1:
            raise ValidationError("the ring scenario needs three equal populations")
    if config.scenario in ("dist", "compare") and config.expect_violation:
        raise UsageError(
            f"--expect-violation does not apply to the {config.scenario} scenario"
        )
    if config.scenario == "bchsh" and config.n_alpha != config.n_beta:
        raise ValidationError("the CHSH scenario needs equal populations")
    if config.scenario == "hardy":
        if config.n_alpha != config.n_beta:
            raise ValidationError("the impossibility scenario needs equal populations")
    if config.m_measured is not None:
        total = config.n_alpha + config.n_beta
        if not 0 <= config.m_measured <= total:
            raise ValidationError(
                f"--m-measured must lie in [0, {total}], got {config.m_measured}"
            )
    for name in config.scans:
        if name == "xi" and config.scenario != "bchsh":
            raise UsageError("--scan-xi only applies to the bchsh scenario")
        if name == "chi" and config.scenario not in ("ghz",):
            raise UsageError("--scan-chi only applies to the ghz scenario")


def _check_outcome_budget(n_detectors: int, n_total: int, cap: int) -> None:
    count = math.comb(n_total + n_detectors - 1, n_detectors - 1)
    if count > cap:
        raise ValidationError(
            f"refusing to enumerate {count} outcomes "
            f"({n_total} particles over {n_detectors} detectors); "
            f"the cap is {cap}, raise --max-outcomes to override"
        )


def _grid(config: ScenarioConfig, n_total: int) -> phase_models.QuadratureGrid:
    if config.quad_nodes is None:
        return phase_models.QuadratureGrid.for_total(n_total)
    return phase_models.QuadratureGrid(config.quad_nodes, config.quad_nodes)


def _angle_scan_points(config: ScenarioConfig) -> list[dict[str, float]]:
    axes = [
        (name, config.scans[name].values())
        for name in ("zeta", "theta", "chi")
        if name in config.scans
    ]
    if not axes:
        return [{}]
    points: list[dict[str, float]] = [{}]
    for name, values in axes:
        points = [dict(p, **{name: v}) for p in points for v in values]
    return points


def _run_dist(config: ScenarioConfig) -> tuple[list[ResultRecord], bool | None]:
    three = config.n_gamma is not None or config.chi is not None or (
        "chi" in config.scans
    )
    records = []
    for point in _angle_scan_points(config):
        zeta = point.get("zeta", config.zeta)
        theta = point.get("theta", config.theta)
        if three:
            chi = point.get("chi", config.chi or 0.0)
            pops = (config.n_alpha, config.n_beta, config.n_gamma or 0)
            matrix = three_source_ring(zeta, theta, chi)
            inputs = {"zeta": zeta, "theta": theta, "chi": chi}
        else:
            pops = (config.n_alpha, config.n_beta)
            matrix = two_source_interferometer(zeta, theta)
            inputs = {"zeta": zeta, "theta": theta}
        _check_outcome_budget(matrix.n_detectors, sum(pops), config.max_outcomes)
        dist = fock.distribution(matrix, pops)
        outcomes = [
            {"counts": list(counts), "probability": prob}
            for counts, prob in sorted(dist.support.items())
        ]
        outputs: dict = {"outcomes": outcomes}
        if config.samples:
            draws = fock.sample_outcomes(dist, config.samples, config.seed)
            tally: dict[tuple, int] = {}
            for draw in draws:
                tally[draw] = tally.get(draw, 0) + 1
            for row in outcomes:
                row["empirical_frequency"] = (
                    tally.get(tuple(row["counts"]), 0) / config.samples
                )
        records.append(
            ResultRecord(scenario="dist", inputs={**config.echo(), **inputs},
                         outputs=outputs)
        )
    return records, None


def _run_bchsh(config: ScenarioConfig) -> tuple[list[ResultRecord], bool | None]:
    n_total = config.n_alpha + config.n_beta
    if n_total < 2:
        raise ValidationError("the CHSH scenario needs at least two particles")
    if "xi" in config.scans:
        records = [
            ResultRecord(
                scenario="bchsh",
                inputs={**config.echo(), "xi": xi},
                outputs={"q": bell.bchsh_q(n_total, xi)},
            )
            for xi in config.scans["xi"].values()
        ]
        return records, None
    if config.m_measured is not None and config.m_measured < n_total:
        grid = _grid(config, n_total)
        q_max, settings = phase_models.maximize_partial_chsh(
            (config.n_alpha, config.n_beta), config.m_measured, grid
        )
        verdict = q_max > 2.0
        outputs = {
            "q_max": q_max,
            "m_measured": config.m_measured,
            "settings": list(settings),
            "violation": verdict,
        }
        record = ResultRecord(
            scenario="bchsh", inputs=config.echo(), outputs=outputs
        )
        return [record], verdict
    optimum = bell.maximize_bchsh(n_total)
    outputs = {
        "q_max": optimum.q_max,
        "xi_star": optimum.xi_star,
        "settings": list(optimum.settings),
        "violation": optimum.violation,
        "report": bell.bchsh_report(optimum).to_tree(),
    }
    record = ResultRecord(scenario="bchsh", inputs=config.echo(), outputs=outputs)
    return [record], optimum.violation


def _run_ghz(config: ScenarioConfig) -> tuple[list[ResultRecord], bool | None]:
    n_total = config.n_alpha * 3
    tol = config.tol if config.tol is not None else 1e-9
    try:
        certificate = bell.ghz_contradiction_certificate(n_total, tol=tol)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    records = []
    for point in _angle_scan_points(config):
        zeta = point.get("zeta", config.zeta)
        theta = point.get("theta", config.theta)
        chi = point.get("chi", config.chi if config.chi is not None else 0.0)
        correlation = bell.ghz_correlation_closed_form(n_total, zeta, theta, chi)
        records.append(
            ResultRecord(
                scenario="ghz",
                inputs={**config.echo(), "zeta": zeta, "theta": theta, "chi": chi},
                outputs={
                    "correlation": correlation,
                    "contradiction": certificate.contradiction,
                    "report": bell.ghz_report(certificate, tol).to_tree(),
                },
            )
        )
    return records, certificate.contradiction


def _run_hardy(config: ScenarioConfig) -> tuple[list[ResultRecord], bool | None]:
    n_total = config.n_alpha + config.n_beta
    if n_total <= 0 or n_total % 2:
        raise ValidationError(
            f"the impossibility scenario needs an even positive total, got {n_total}"
        )
    _check_outcome_budget(4, n_total, config.max_outcomes)
    network = hardy.build_hardy_network()
    tol = config.tol if config.tol is not None else 1e-10
    certificate = hardy.impossibility_certificate(
        network, n_total, certainty_tol=tol
    )
    tables = {}
    for configuration in hardy.CONFIGURATIONS:
        table = hardy.hardy_amplitudes(network, n_total, configuration)
        tables[configuration] = [
            {
                "counts": list(counts),
                "re": complex(value).real,
                "im": complex(value).imag,
                "probability": float(abs(value) ** 2),
            }
            for counts, value in sorted(table.entries.items())
        ]
    record = ResultRecord(
        scenario="hardy",
        inputs=config.echo(),
        outputs={
            "certificate": certificate.as_report().to_tree(),
            "tables": tables,
        },
    )
    return [record], certificate.verdict


def _run_compare(config: ScenarioConfig) -> tuple[list[ResultRecord], bool | None]:
    n_total = config.n_alpha + config.n_beta
    _check_outcome_budget(4, n_total, config.max_outcomes)
    grid = _grid(config, n_total)
    records = []
    for point in _angle_scan_points(config):
        zeta = point.get("zeta", config.zeta)
        theta = point.get("theta", config.theta)
        report = phase_models.compare_models(
            (config.n_alpha, config.n_beta),
            AngleSettings(zeta=zeta, theta=theta),
            grid,
        )
        rows = [
            {
                "counts": list(row.outcome),
                "p_quantum": row.p_quantum,
                "p_classical": row.p_classical,
                "divergence": row.divergence,
            }
            for row in report.rows
        ]
        records.append(
            ResultRecord(
                scenario="compare",
                inputs={**config.echo(), "zeta": zeta, "theta": theta},
                outputs={
                    "rows": rows,
                    "total_variation": report.total_variation,
                },
            )
        )
    return records, None


_RUNNERS = {
    "dist": _run_dist,
    "bchsh": _run_bchsh,
    "ghz": _run_ghz,
    "hardy": _run_hardy,
    "compare": _run_compare,
}


def run(config: ScenarioConfig) -> tuple[list[ResultRecord], bool | None]:
    """Dispatch to the owning module; returns records and an optional verdict."""
    started = time.perf_counter()
    records, verdict = _RUNNERS[config.scenario](config)
    elapsed = time.perf_counter() - started
    for record in records:
        record.duration_seconds = elapsed / max(len(records), 1)
    return records, verdict


def _csv_payload(records: list[ResultRecord]) -> str:
    scenario = records[0].scenario
    if scenario == "dist":
        n_modes = len(records[0].outputs["outcomes"][0]["counts"])
        sampled = "empirical_frequency" in records[0].outputs["outcomes"][0]
        header = ["zeta", "theta"]
        if "chi" in records[0].inputs and records[0].inputs["chi"] is not None:
            header.append("chi")
        header += [f"m{i + 1}" for i in range(n_modes)] + ["probability"]
        if sampled:
            header.append("empirical_frequency")
        rows = []
        for record in records:
            prefix = [record.inputs["zeta"], record.inputs["theta"]]
            if "chi" in header:
                prefix.append(record.inputs["chi"])
            for row in record.outputs["outcomes"]:
                line = prefix + row["counts"] + [row["probability"]]
                if sampled:
                    line.append(row["empirical_frequency"])
                rows.append(line)
        return csv_text(header, rows)
    if scenario == "bchsh":
        if "q" in records[0].outputs:
            header = ["n_particles", "xi", "q"]
            rows = [
                [r.inputs["n_alpha"] + r.inputs["n_beta"], r.inputs["xi"],
                 r.outputs["q"]]
                for r in records
            ]
            return csv_text(header, rows)
        record = records[0]
        n_total = record.inputs["n_alpha"] + record.inputs["n_beta"]
        header = [
            "n_particles", "m_measured", "q_max", "xi_star", "violation",
            "phi_a", "phi_a_prime", "phi_b", "phi_b_prime",
        ]
        outputs = record.outputs
        row = [
            n_total,
            outputs.get("m_measured", n_total),
            outputs["q_max"],
            outputs.get("xi_star", float("nan")),
            outputs["violation"],
            *outputs["settings"],
        ]
        return csv_text(header, [row])
    if scenario == "ghz":
        header = ["n_particles", "zeta", "theta", "chi", "correlation",
                  "contradiction"]
        rows = [
            [
                r.inputs["n_alpha"] * 3,
                r.inputs["zeta"],
                r.inputs["theta"],
                r.inputs["chi"],
                r.outputs["correlation"],
                r.outputs["contradiction"],
            ]
            for r in records
        ]
        return csv_text(header, rows)
    if scenario == "hardy":
        header = ["configuration", "m1", "m2", "m3", "m4", "re", "im",
                  "probability"]
        rows = []
        for configuration, table in sorted(records[0].outputs["tables"].items()):
            for row in table:
                rows.append(
                    [configuration, *row["counts"], row["re"], row["im"],
                     row["probability"]]
                )
        return csv_text(header, rows)
    header = ["m1", "m2", "m3", "m4", "p_quantum", "p_classical", "divergence"]
    rows = []
    for record in records:
        for row in record.outputs["rows"]:
            rows.append(
                row["counts"]
                + [row["p_quantum"], row["p_classical"], row["divergence"]]
            )
    return csv_text(header, rows)


def _summarize(records: list[ResultRecord], verdict: bool | None) -> str:
    record = records[0]
    scenario = record.scenario
    if scenario == "dist":
        n_rows = sum(len(r.outputs["outcomes"]) for r in records)
        return f"dist: {len(records)} setting(s), {n_rows} outcome rows"
    if scenario == "bchsh":
        if "q" in record.outputs:
            return f"bchsh: Q(xi) curve with {len(records)} points"
        outputs = record.outputs
        xi = outputs.get("xi_star")
        xi_part = "" if xi is None else f" at xi = {xi:.6f}"
        return (
            f"bchsh: Q_max = {outputs['q_max']:.6f}{xi_part}"
            f" (violation: {'yes' if outputs['violation'] else 'no'})"
        )
    if scenario == "ghz":
        value = record.outputs["correlation"]
        flag = "yes" if verdict else "no"
        return f"ghz: correlation = {value:.9f}, contradiction: {flag}"
    if scenario == "hardy":
        cert = record.outputs["certificate"]["evidence"]
        flag = "yes" if verdict else "no"
        return (
            f"hardy: joint-event probability = "
            f"{cert['nonzero_event_probability']:.3e}, forbidden amplitude = "
            f"{cert['forbidden_event_amplitude']:.3e}, impossibility: {flag}"
        )
    tvd = record.outputs["total_variation"]
    return f"compare: total variation quantum vs classical = {tvd:.6e}"


def main(argv: list[str] | None = None) -> int:
    try:
        config = parse_config(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    except SystemExit as exc:  # argparse already printed its message
        return int(exc.code or 0)
    try:
        records, verdict = run(config)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, fock.DegenerateConditionError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3

    if config.output is not None:
        if config.format == "csv":
            write_text(config.output, _csv_payload(records))
        else:
            write_text(
                config.output,
                tree_text({"records": [r.to_tree() for r in records]}),
            )
        print(f"wrote {config.output}")
    print(_summarize(records, verdict))
    if config.expect_violation and verdict is not True:
        print("expectation mismatch: no violation certified", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
