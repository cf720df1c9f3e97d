"""Command-line entry point.

Usage:
    polarfade construct --n 10 --rate 0.5 --sigma2 1.0 --output code.txt
    polarfade capacity --rate 0.5 --Q 10 --fading gaussian:1.0
    polarfade sweep --figure 5 --seed 7 --trials 1000 --n 6
    polarfade sweep --from-manifest out/ber_vs_q.csv.manifest.json

Exit codes: 0 success, 2 usage or configuration error, 3 numeric failure
or infeasible design, 1 anything unexpected.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import pandas as pd
from pydantic import ValidationError

from polarfade import __version__
from polarfade.config import settings
from polarfade.exceptions import (
    EXIT_USAGE,
    ConfigError,
    InfeasibleError,
    InvalidArgumentError,
    PolarFadeError,
)
from polarfade.harness import campaigns, output
from polarfade.harness.config_file import build_campaign_config, load_config_file
from polarfade.harness.seeding import resolve_master_seed
from polarfade.logging_config import setup_logging
from polarfade.models import (
    CampaignConfig,
    CapacityResult,
    PowerBudget,
    QuadratureSpec,
    RunManifest,
)
from polarfade.services.cache import design_cache
from polarfade.services.capacity import (
    bi_awgn_capacity,
    equivalent_capacity,
    solve_design_power,
)
from polarfade.services.construction import construct
from polarfade.services.fading import parse_fading
from polarfade.services.metrics import metrics
from polarfade.services.power_control import erasure_prob, make_policy
from polarfade.services.run_context import get_run_id, run_scope

logger = logging.getLogger(__name__)

_FIGURE_OUTPUTS = {3: output.EPSILON_CSV, 5: output.BER_CSV, 6: output.RATE_CSV}


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _manifest(
    command: str,
    config: dict[str, Any],
    outputs: list[Path],
    started: float,
    master_seed: int | None = None,
) -> RunManifest:
    return RunManifest(
        command=command,
        config=config,
        version=__version__,
        master_seed=master_seed,
        run_id=get_run_id(),
        created_at=datetime.now(timezone.utc).isoformat(),
        outputs=[str(p) for p in outputs],
        duration_seconds=round(time.monotonic() - started, 3),
        diagnostics=metrics.snapshot(),
    )


def _finish(command: str, outputs: list[Path], started: float) -> None:
    logger.info(
        "%s finished in %.2fs", command, time.monotonic() - started,
        extra={"outputs": ",".join(str(p) for p in outputs)},
    )


# ---------------------------------------------------------------------------
# construct
# ---------------------------------------------------------------------------


def cmd_construct(args: argparse.Namespace) -> int:
    started = time.monotonic()
    if args.n < 0:
        raise InvalidArgumentError(f"--n must be nonnegative, got {args.n}")
    N = 1 << args.n
    K = args.k if args.k is not None else round(args.rate * N)
    if not 0 <= K <= N:
        raise InvalidArgumentError(f"K={K} outside [0, {N}]")

    if args.design_snr is not None:
        design_snr = args.design_snr
    else:
        P = solve_design_power(K / N, args.sigma2, QuadratureSpec())
        design_snr = P / args.sigma2

    code = construct(N, K, design_snr, args.mixture_eps)
    path = Path(args.output or Path(settings.output_dir) / f"polar_n{args.n}_k{K}.txt")
    output.write_code_description(code, path)

    config = {
        "n": args.n,
        "k": K,
        "sigma2": args.sigma2,
        "design_snr": design_snr,
        "mixture_eps": args.mixture_eps,
    }
    output.write_manifest(_manifest("construct", config, [path], started), path)
    _finish("construct", [path], started)
    return 0


# ---------------------------------------------------------------------------
# capacity
# ---------------------------------------------------------------------------


def cmd_capacity(args: argparse.Namespace) -> int:
    started = time.monotonic()
    quad = QuadratureSpec()
    if args.power is not None:
        rate = bi_awgn_capacity(args.power, args.sigma2, quad)
        point = CapacityResult(rate=rate, power=args.power)
    else:
        power = solve_design_power(args.rate, args.sigma2, quad)
        point = CapacityResult(rate=args.rate, power=power)
    P = point.power

    report: dict[str, Any] = {"power": P, "rate": point.rate, "sigma2": args.sigma2}
    if args.Q is not None:
        fading = parse_fading(args.fading)
        budget = PowerBudget(P=P, Q=args.Q, Qpeak=args.Qpeak, sigma2=args.sigma2)
        policy = make_policy(budget, fading, quad)
        eps = erasure_prob(policy.delta, fading)
        if eps >= 1.0:
            raise InfeasibleError(
                f"every slot is skipped at P={P:.6g}, Q={args.Q:.6g}, Qpeak={args.Qpeak:.6g}"
            )
        point = replace(point, epsilon=eps)
        report.update(
            q=args.Q,
            qpeak=args.Qpeak,
            fading=fading.spec,
            delta_bar=policy.delta_bar,
            delta=policy.delta,
            epsilon=point.epsilon,
            c_eq=equivalent_capacity(point.rate, point.epsilon),
        )

    for key, value in report.items():
        text = f"{value:.12g}" if isinstance(value, float) else str(value)
        print(f"{key}={text}")

    outputs: list[Path] = []
    if args.csv:
        path = Path(args.csv)
        path.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame([report]).to_csv(path, index=False, float_format="%.12g", lineterminator="\n")
        output.write_manifest(_manifest("capacity", report, [path], started), path)
        outputs.append(path)
    _finish("capacity", outputs, started)
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _sweep_config(args: argparse.Namespace) -> CampaignConfig:
    if args.from_manifest:
        manifest = output.read_manifest(Path(args.from_manifest))
        if manifest.command != "sweep":
            raise ConfigError(f"manifest records a {manifest.command!r} run, not a sweep")
        try:
            return CampaignConfig.model_validate(manifest.config)
        except ValueError as exc:
            raise ConfigError(f"manifest config is invalid: {exc}") from exc

    file_overrides = load_config_file(Path(args.config)) if args.config else {}
    cli_overrides = {
        "n": args.n,
        "trials": args.trials,
        "objective": args.objective,
        "master_seed": resolve_master_seed(args.seed, file_overrides.get("master_seed")),
    }
    return build_campaign_config(args.figure, file_overrides, cli_overrides)


def run_sweep(config: CampaignConfig, output_dir: Path, threads: int | None) -> Path:
    """Run the campaign for ``config.figure`` and write its CSV."""
    path = output_dir / _FIGURE_OUTPUTS[config.figure]
    if config.figure == 3:
        output.write_epsilon_csv(campaigns.sweep_epsilon_vs_q(config), path)
    elif config.figure == 5:
        output.write_ber_csv(campaigns.run_ber_campaign(config, threads=threads), path)
    else:
        output.write_rate_csv(campaigns.sweep_optimal_rate(config), path)
    return path


def cmd_sweep(args: argparse.Namespace) -> int:
    started = time.monotonic()
    config = _sweep_config(args)
    output_dir = Path(args.output_dir or settings.output_dir)

    logger.info(
        "Starting sweep", extra={"figure": config.figure, "master_seed": config.master_seed}
    )
    path = run_sweep(config, output_dir, args.threads)

    manifest = _manifest(
        "sweep", config.model_dump(mode="json"), [path], started, config.master_seed
    )
    output.write_manifest(manifest, path)
    _finish("sweep", [path], started)
    return 0


# ---------------------------------------------------------------------------
# Parser and entry point
# ---------------------------------------------------------------------------


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0 or math.isnan(value):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarfade",
        description="Polar-coded transmission over fading AWGN with truncated channel inversion",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=settings.log_level)
    parser.add_argument("--log-format", choices=("text", "json"), default=settings.log_format)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="Build a polar code and write its description")
    p.add_argument("--n", type=int, required=True, help="log2 blocklength")
    size = p.add_mutually_exclusive_group(required=True)
    size.add_argument("--k", type=int, help="information bits")
    size.add_argument("--rate", type=float, help="target rate K/N")
    p.add_argument("--sigma2", type=_positive_float, default=1.0)
    p.add_argument(
        "--design-snr", type=float, help="design P/sigma2 (default: solved from the rate)"
    )
    p.add_argument("--mixture-eps", type=float, default=0.0, help="design erasure probability")
    p.add_argument("--output", help="description file path")
    p.set_defaults(handler=cmd_construct)

    p = sub.add_parser("capacity", help="BI-AWGN capacity, design power, and erasure figures")
    point = p.add_mutually_exclusive_group(required=True)
    point.add_argument("--power", type=float, help="BPSK power P")
    point.add_argument("--rate", type=float, help="target rate R in (0, 1)")
    p.add_argument("--sigma2", type=_positive_float, default=1.0)
    p.add_argument("--Q", type=_positive_float, help="average power constraint")
    p.add_argument("--Qpeak", type=_positive_float, default=math.inf, help="peak power constraint")
    p.add_argument("--fading", default="gaussian:1.0", help="e.g. gaussian:1.0, rayleigh:1.0")
    p.add_argument("--csv", help="also write the report as a one-row CSV")
    p.set_defaults(handler=cmd_capacity)

    p = sub.add_parser("sweep", help="Run a figure campaign and write its CSV")
    source = p.add_mutually_exclusive_group()
    source.add_argument("--figure", type=int, choices=(3, 5, 6))
    source.add_argument("--from-manifest", help="replay the config stored in a manifest")
    p.add_argument("--config", help="INI-style config file")
    p.add_argument("--seed", type=int, help="master seed (falls back to POLARFADE_SEED)")
    p.add_argument("--trials", type=int)
    p.add_argument("--n", type=int, help="log2 blocklength")
    p.add_argument("--threads", type=int, help="worker cap (default: CPU count)")
    p.add_argument("--output-dir")
    p.add_argument("--objective", choices=("throughput", "entropy"))
    p.set_defaults(handler=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    setup_logging(args.log_level, args.log_format)
    if args.command == "sweep" and args.from_manifest and args.config:
        logger.error("--from-manifest cannot be combined with --config")
        return ConfigError.exit_code

    metrics.reset()
    design_cache.clear()
    with run_scope():
        try:
            return args.handler(args)
        except PolarFadeError as exc:
            logger.error("%s failed: %s", args.command, exc.detail)
            return exc.exit_code
        except ValidationError as exc:
            logger.error("%s failed: invalid arguments: %s", args.command, exc)
            return EXIT_USAGE
        except Exception:
            logger.exception("%s failed unexpectedly", args.command)
            return 1


if __name__ == "__main__":
    sys.exit(main())
