"""Grigorchuk-Lab FastAPI application and command-line entry point."""

import argparse
import csv
import hashlib
import json
import logging
import sys
from collections.abc import Iterable, Sequence
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Any, Optional

import uvicorn
from fastapi import FastAPI
from fastapi.responses import PlainTextResponse
from pydantic import ValidationError
from sqlmodel import Session

from grigorchuk_lab.config import settings
from grigorchuk_lab.database import engine, init_db
from grigorchuk_lab.errors import GrigorchukLabError, PreconditionError
from grigorchuk_lab.models import RunStatus
from grigorchuk_lab.routers import api
from grigorchuk_lab.schemas import (
    ExponentReport,
    FrReport,
    GreenEstimate,
    GreenSumReport,
    GrowthTable,
    RunConfig,
    SamplerSpec,
    StabilizationReport,
    TailReport,
    TrajectorySummary,
    VerifyReport,
)
from grigorchuk_lab.services.analysis import analyze_omega
from grigorchuk_lab.services.grigorchuk import parse_omega
from grigorchuk_lab.services.ledger import record_run
from grigorchuk_lab.services.measures import MixtureSampler, MuBetaInfo, build_mu_beta, build_sampler
from grigorchuk_lab.services.schreier import export_graph, from_gray_index, write_distance_table
from grigorchuk_lab.services.verify import run_suite, suite_names
from grigorchuk_lab.services.walk_lab import (
    ball_growth,
    eta0_envelope,
    green_mc,
    mu_beta_envelope,
    run_walk,
    stabilization_stats,
    tail_report,
    weighted_green_sum,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
EXPERIMENTS = ("stabilization", "green", "green-sum", "tail", "trajectories")
SAMPLERS = ("mu-beta", "eta0", "eta1", "eta2", "eta2-restricted", "uniform", "f1-only", "id")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FR_FAILURE = 2


def get_api_documentation() -> str:
    """Generate usage documentation with current base_url."""
    return f"""# Grigorchuk-Lab

Batch analyses of the Grigorchuk groups G_omega.

Service URL: {settings.base_url}

---

## Endpoints

### POST /analyze-omega
Fr(D) scan and growth exponent of an omega string ("preperiod|period").

```bash
curl -X POST {settings.base_url}/analyze-omega \\
  -H "Content-Type: application/json" \\
  -d '{{"omega": "01|201", "D": 3}}'
```

**Response:**
```json
{{"fr": {{"passed": true, "shift": 0, "m": [0, 0, ...]}}, "exponent": {{"alpha": 0.7674}}, "code": "abc123"}}
```

A string failing Fr(D) is still answered with 200 and `fr.passed = false`.

### POST /verify/{{suite}}
Run one verification suite: {", ".join(suite_names())}.

### GET /matrices
Substitution matrices M0, M1, M2, M, A and M^2 A with their Perron values.

### GET /runs/{{code}}
Ledger row of an earlier analysis (6 lowercase alphanumeric characters).

---

## Command line

```bash
grigorchuk-lab analyze-omega --omega "01|201" --D 3
grigorchuk-lab simulate --config configs/mu-beta-stabilization.json
grigorchuk-lab verify relations
grigorchuk-lab growth --radius 8
grigorchuk-lab export-graph --radius 32 --out graphs/
grigorchuk-lab serve
```

Artifacts go to {settings.output_dir}; every run writes its resolved config next to the results.

---

### Errors

- 400: malformed omega, code or parameters
- 404: run code not found
""".strip()


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Application lifespan handler."""
    init_db()
    settings.output_dir.mkdir(parents=True, exist_ok=True)
    yield


app = FastAPI(
    title="Grigorchuk-Lab",
    description="Batch analyses of Grigorchuk groups G_omega",
    version="0.1.0",
    lifespan=lifespan,
)

app.include_router(api.router)


@app.get("/", response_class=PlainTextResponse)
def root():
    """Return usage documentation."""
    return get_api_documentation()


# --- command line ------------------------------------------------------------


def configure_logging(level: Optional[str] = None) -> None:
    logging.basicConfig(level=(level or settings.log_level).upper(), format=LOG_FORMAT, force=True)


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1; 2 is reserved for Fr(D) failures."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _common_flags() -> argparse.ArgumentParser:
    # None marks "not given" so config files are only overridden explicitly
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--omega", help='omega as "preperiod|period"')
    common.add_argument("--D", type=int)
    common.add_argument("--beta", type=float)
    common.add_argument("--A", type=int)
    common.add_argument("--nmax", type=int)
    common.add_argument("--epsilon", type=float)
    common.add_argument("--steps", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--radius", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--mode", choices=("desk", "theorem"))
    common.add_argument("--out", help="output directory")
    common.add_argument("--config", type=Path, help="JSON file mirroring the flags")
    common.add_argument("--no-ledger", action="store_true", help="do not record the run in the database")
    common.add_argument("--log-level")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(prog="grigorchuk-lab", description="Grigorchuk groups G_omega toolkit")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    commands.add_parser("analyze-omega", parents=[common], help="Fr(D) scan and growth exponent")

    simulate = commands.add_parser("simulate", parents=[common], help="random-walk experiments")
    simulate.add_argument("--experiment", choices=EXPERIMENTS)
    simulate.add_argument("--sampler", choices=SAMPLERS)
    simulate.add_argument("--targets", type=int, nargs="+", help="Gray indices for the Green estimate")
    simulate.add_argument("--samples", type=int, help="draws per procedural component for bad-germ weights")

    verify = commands.add_parser("verify", parents=[common], help="run a verification suite")
    verify.add_argument("suite", choices=suite_names())

    commands.add_parser("growth", parents=[common], help="ball sizes v(n) by breadth-first search")
    commands.add_parser("export-graph", parents=[common], help="DOT export of the Schreier ball")
    commands.add_parser("serve", parents=[common], help="run the HTTP service")
    return parser


CONFIG_FLAGS = (
    "omega", "D", "beta", "A", "nmax", "epsilon", "steps", "trials", "radius", "seed", "mode",
    "out", "experiment", "sampler", "targets", "samples", "suite",
)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file values, then explicit flags, validated through RunConfig."""
    values: dict[str, Any] = {}
    if args.config is not None:
        values = json.loads(args.config.read_text())
        command = values.pop("command", args.command)
        if command != args.command:
            raise PreconditionError(f"config {args.config} is for {command!r}, not {args.command!r}")
    for name in CONFIG_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            values[name] = value
    return RunConfig(command=args.command, **values)


def _output_dir(config: RunConfig) -> Path:
    directory = Path(config.out) if config.out else settings.output_dir
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def config_digest(config: RunConfig) -> str:
    """Short hash of every setting that can change the artifacts."""
    payload = json.dumps(config.model_dump(mode="json", exclude={"out"}), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:8]


def _prefix(config: RunConfig) -> str:
    parts = [config.command]
    if config.command == "simulate":
        parts += [config.sampler, config.experiment]
    elif config.command == "verify":
        parts.append(config.suite or "all")
    return "-".join(parts + [f"s{config.seed}", config_digest(config)])


def _write_config(path: Path, config: RunConfig) -> None:
    if path.exists() and config_digest(RunConfig.model_validate_json(path.read_text())) != config_digest(config):
        raise PreconditionError(f"{path} holds a different config; refusing to mix artifacts")
    path.write_text(config.model_dump_json(indent=2) + "\n")


def _write_json(path: Path, payload: Any) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)


def _make_sampler(config: RunConfig) -> tuple[MixtureSampler, Optional[MuBetaInfo]]:
    omega = parse_omega(config.omega)
    if config.sampler == "mu-beta":
        return build_mu_beta(omega, config.D, config.beta, config.A, config.nmax, config.seed, config.mode)
    sampler = build_sampler(
        config.sampler, omega, nmax=config.nmax, epsilon=config.epsilon, seed=config.seed, mode=config.mode
    )
    return sampler, None


def cmd_analyze_omega(config: RunConfig, directory: Path, prefix: str) -> tuple[dict, RunStatus, int]:
    analysis = analyze_omega(config.omega, config.D)
    fr = FrReport.from_analysis(analysis.fr)
    exponent = None
    if analysis.exponent is not None:
        exponent = ExponentReport.from_data(str(analysis.omega), analysis.exponent, analysis.tails)
    result = {
        "fr": fr.model_dump(),
        "exponent": exponent.model_dump() if exponent else None,
        "volume_exponent": analysis.volume_exponent,
    }
    _write_json(directory / f"{prefix}.json", result)

    if fr.passed:
        print(f"{analysis.omega}: Fr({config.D}) holds after shift {fr.shift}; m = {fr.m}")
    else:
        print(f"{analysis.omega}: Fr({config.D}) fails at block {fr.failure_block}")
    if exponent is not None:
        print(f"lambda = {exponent.lam:.6f}, alpha = {exponent.alpha:.6f} (period {exponent.period})")
    print(f"volume exponent from L_n: {analysis.volume_exponent:.6f}")
    if not fr.passed:
        return result, RunStatus.FR_FAILURE, EXIT_FR_FAILURE
    return result, RunStatus.OK, EXIT_OK


def cmd_simulate(config: RunConfig, directory: Path, prefix: str) -> tuple[dict, RunStatus, int]:
    sampler, info = _make_sampler(config)
    spec = SamplerSpec.from_sampler(sampler)
    result: dict[str, Any] = {"sampler": spec.model_dump()}
    experiment = config.experiment

    if experiment == "trajectories":
        lines = directory / f"{prefix}.jsonl"
        with open(lines, "a") as f:
            for trial in range(config.trials):
                summary = TrajectorySummary(**run_walk(sampler, config.steps, seed=config.seed + trial).summary())
                f.write(summary.model_dump_json() + "\n")
        result["trajectories"] = str(lines)
        print(f"{config.trials} trajectories of {config.steps} steps -> {lines}")

    elif experiment == "stabilization":
        stats = stabilization_stats(sampler, config.steps, config.trials, seed=config.seed)
        report = StabilizationReport.from_result(stats)
        with open(directory / f"{prefix}.jsonl", "a") as f:
            for summary in stats.summaries:
                f.write(TrajectorySummary(**summary).model_dump_json() + "\n")
        _write_csv(directory / f"{prefix}-histogram.csv", ["bit_length", "flips"], report.histogram.items())
        _write_csv(
            directory / f"{prefix}-curve.csv",
            ["t", "fraction_flipping_after"],
            zip(report.checkpoints, report.fraction_flipping_after),
        )
        result["stabilization"] = report.model_dump()
        print(f"fraction flipping after {report.checkpoints}: {report.fraction_flipping_after}")

    elif experiment == "green":
        estimates = [
            GreenEstimate.from_result(r)
            for r in green_mc(sampler, config.targets, config.steps, config.trials, seed=config.seed)
        ]
        _write_csv(
            directory / f"{prefix}.csv",
            list(GreenEstimate.model_fields),
            ([getattr(e, name) for name in GreenEstimate.model_fields] for e in estimates),
        )
        result["green"] = [e.model_dump() for e in estimates]
        for e in estimates:
            print(f"G(o, {e.target}) ~ {e.estimate:.4f} +- {e.stderr:.4f} (half horizon {e.half_horizon_estimate:.4f})")

    elif experiment == "green-sum":
        report = GreenSumReport.from_result(
            weighted_green_sum(
                sampler, config.radius, config.steps, config.trials, samples=config.samples, seed=config.seed
            )
        )
        _write_csv(
            directory / f"{prefix}.csv",
            ["gray_index", "bad_germ_weight", "partial_sum"],
            zip(range(config.radius + 1), report.weights, report.partial_sums),
        )
        result["green_sum"] = report.model_dump()
        print(f"weighted Green sum up to {config.radius}: {report.total:.6g} (flattening: {report.flattening})")

    else:
        envelope = None
        if config.sampler == "eta0":
            envelope = eta0_envelope(config.nmax or 16, config.epsilon)
        elif info is not None:
            envelope = mu_beta_envelope(info)
        report = TailReport.from_result(tail_report(sampler, config.trials, seed=config.seed, envelope=envelope))
        _write_csv(directory / f"{prefix}.csv", ["radius", "tail"], zip(report.grid, report.tail))
        result["tail"] = report.model_dump()
        print(f"max length {report.max_length:.4g}; envelope constant {report.envelope_constant}")

    _write_json(directory / f"{prefix}.json", result)
    return result, RunStatus.OK, EXIT_OK


def cmd_verify(config: RunConfig, directory: Path, prefix: str) -> tuple[dict, RunStatus, int]:
    suite = config.suite or "all"
    report = VerifyReport.from_checks(suite, run_suite(suite))
    for check in report.checks:
        mark = "PASS" if check.passed else "FAIL"
        print(f"{mark}  {check.suite:<18} {check.name}  {check.detail}")
    print(f"{report.total - report.failed}/{report.total} checks passed")
    result = report.model_dump()
    _write_json(directory / f"{prefix}.json", result)
    if not report.passed:
        return result, RunStatus.FAILED, EXIT_ERROR
    return result, RunStatus.OK, EXIT_OK


def cmd_growth(config: RunConfig, directory: Path, prefix: str) -> tuple[dict, RunStatus, int]:
    table = GrowthTable.from_result(ball_growth(parse_omega(config.omega), config.radius))
    _write_csv(directory / f"{prefix}.csv", ["radius", "ball_size"], zip(table.radii, table.sizes))
    print(" ".join(f"v({r})={v}" for r, v in zip(table.radii, table.sizes)))
    result = table.model_dump()
    _write_json(directory / f"{prefix}.json", result)
    return result, RunStatus.OK, EXIT_OK


def cmd_export_graph(config: RunConfig, directory: Path, prefix: str) -> tuple[dict, RunStatus, int]:
    omega = parse_omega(config.omega)
    dot = directory / f"{prefix}.dot"
    dot.write_text(export_graph(config.radius, omega))
    rows = write_distance_table(
        (from_gray_index(n) for n in range(config.radius + 1)), directory / f"{prefix}-distances.csv"
    )
    print(f"ball of Gray radius {config.radius} -> {dot}")
    return {"dot": str(dot), "points": rows}, RunStatus.OK, EXIT_OK


COMMANDS = {
    "analyze-omega": cmd_analyze_omega,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "growth": cmd_growth,
    "export-graph": cmd_export_graph,
}


def _stamp(config: RunConfig, result: dict, status: RunStatus) -> str:
    init_db()
    with Session(engine) as session:
        run = record_run(session, config.command, config.model_dump(mode="json"), result, status)
    return run.code


def serve() -> None:
    """Run the HTTP service."""
    uvicorn.run(
        "grigorchuk_lab.main:app",
        host=settings.host,
        port=settings.port,
        reload=False,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Command-line entry point; returns the exit code."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    if args.command == "serve":
        serve()
        return EXIT_OK

    try:
        config = resolve_config(args)
        directory = _output_dir(config)
        prefix = _prefix(config)
        _write_config(directory / f"{prefix}.config.json", config)
        result, status, code = COMMANDS[config.command](config, directory, prefix)
    except (GrigorchukLabError, ValidationError, json.JSONDecodeError, OSError) as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    if not args.no_ledger:
        run_code = _stamp(config, result, status)
        print(f"run code: {run_code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
