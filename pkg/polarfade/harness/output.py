"""CSV tables, run manifests and code description files."""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from pathlib import Path

import pandas as pd

from polarfade.exceptions import ConfigError, InvalidArgumentError
from polarfade.models import BerPoint, EpsilonPoint, OptimalRatePoint, PolarCode, RunManifest

logger = logging.getLogger(__name__)

EPSILON_CSV = "eps_vs_q.csv"
BER_CSV = "ber_vs_q.csv"
RATE_CSV = "r_star_vs_q.csv"

EPSILON_COLUMNS = ["q", "sigma_h2", "p_design", "delta", "epsilon"]
BER_COLUMNS = ["q", "scheme", "n", "k", "trials", "bit_errors", "ber", "ci95"]
RATE_COLUMNS = ["q", "p_star", "r_star", "epsilon_star"]

_FLOAT_FORMAT = "%.12g"


def _write_frame(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=_FLOAT_FORMAT, lineterminator="\n")
    logger.info("Wrote %d rows to %s", len(frame), path)
    return path


def epsilon_frame(points: Sequence[EpsilonPoint]) -> pd.DataFrame:
    return pd.DataFrame(
        [(p.q, p.sigma_h2, p.p_design, p.delta, p.epsilon) for p in points],
        columns=EPSILON_COLUMNS,
    )


def ber_frame(points: Sequence[BerPoint]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            (p.q_or_snr, p.scheme, p.n, p.k, p.trials, p.bit_errors, p.ber, p.ci95_halfwidth)
            for p in points
        ],
        columns=BER_COLUMNS,
    )


def rate_frame(points: Sequence[OptimalRatePoint]) -> pd.DataFrame:
    return pd.DataFrame(
        [(p.q, p.p_star, p.r_star, p.epsilon_star) for p in points], columns=RATE_COLUMNS
    )


def write_epsilon_csv(points: Sequence[EpsilonPoint], path: Path) -> Path:
    return _write_frame(epsilon_frame(points), path)


def write_ber_csv(points: Sequence[BerPoint], path: Path) -> Path:
    return _write_frame(ber_frame(points), path)


def write_rate_csv(points: Sequence[OptimalRatePoint], path: Path) -> Path:
    return _write_frame(rate_frame(points), path)


# ---------------------------------------------------------------------------
# Manifests
# ---------------------------------------------------------------------------


def manifest_path(output: Path) -> Path:
    return output.with_name(output.name + ".manifest.json")


def write_manifest(manifest: RunManifest, output: Path) -> Path:
    """Write *manifest* next to *output* as ``<output>.manifest.json``."""
    path = manifest_path(output)
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def read_manifest(path: Path) -> RunManifest:
    # json.loads accepts the Infinity literal used for an absent peak constraint.
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
    try:
        return RunManifest.model_validate(data)
    except ValueError as exc:
        raise ConfigError(f"invalid manifest {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Code descriptions
# ---------------------------------------------------------------------------


def format_code_description(code: PolarCode) -> str:
    lines = [
        f"N={code.N}",
        f"K={code.K}",
        f"design_snr={code.design_snr!r}",
        f"eps={code.eps!r}",
        *(str(i) for i in code.info_set),
    ]
    return "\n".join(lines) + "\n"


def write_code_description(code: PolarCode, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_code_description(code), encoding="utf-8", newline="\n")
    return path


def read_code_description(path: Path) -> PolarCode:
    """Parse the header lines and the 1-based info-set indices back into a code."""
    header: dict[str, str] = {}
    indices: list[int] = []
    for number, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        try:
            if sep:
                header[key.strip()] = value.strip()
            else:
                indices.append(int(line))
        except ValueError as exc:
            raise InvalidArgumentError(f"{path}:{number}: bad line {raw!r}") from exc

    missing = {"N", "K", "design_snr", "eps"} - header.keys()
    if missing:
        raise InvalidArgumentError(f"{path}: missing header fields {sorted(missing)}")
    try:
        N = int(header["N"])
        K = int(header["K"])
        design_snr = float(header["design_snr"])
        eps = float(header["eps"])
    except ValueError as exc:
        raise InvalidArgumentError(f"{path}: bad header value: {exc}") from exc
    if N < 1 or N & (N - 1):
        raise InvalidArgumentError(f"{path}: N={N} is not a power of two")

    return PolarCode(
        n=N.bit_length() - 1, K=K, info_set=tuple(indices), design_snr=design_snr, eps=eps
    )
