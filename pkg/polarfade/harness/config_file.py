"""Campaign configuration: figure presets, ``key = value`` files, and overrides.

A config file is plain INI text::

    [code]
    n = 10
    rate = 0.5

    [channel]
    sigma2 = 1.0
    q_grid = 2, 5, 10, 20, 50
    qpeak = inf
    fading = gaussian:1.0

    [campaign]
    trials = 2000
    master_seed = 7

Values are decimal literals; grids are comma-separated.  Layering is
preset < file < command-line flags.
"""

from __future__ import annotations

import configparser
import logging
from collections.abc import Callable, Mapping
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from polarfade.exceptions import ConfigError
from polarfade.models import CampaignConfig

logger = logging.getLogger(__name__)

FIGURE_PRESETS: dict[int, dict[str, Any]] = {
    3: {
        "figure": 3,
        "n": 10,
        "rate": 0.5,
        "sigma2": 1.0,
        "q_grid": (0.5, 1.0, 2.0, 3.0, 5.0, 7.5, 10.0, 15.0, 20.0, 30.0, 50.0),
        "sigma_h2_grid": (0.5, 1.0, 2.0),
    },
    5: {
        "figure": 5,
        "n": 10,
        "rate": 0.5,
        "sigma2": 1.0,
        # Rate 1/2 at P = 2.5 stays below (1 - ε)·C(P) from Q = 5 upward.
        "p_design": 2.5,
        "q_grid": (2.0, 5.0, 10.0, 20.0, 50.0),
        "fading": "gaussian:1.0",
        "trials": 2000,
        "schemes": ("proposed", "mixture_design"),
    },
    6: {
        "figure": 6,
        "sigma2": 1.0,
        "q_grid": (0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0, 35.0, 50.0),
        "fading": "gaussian:1.0",
        "qpeak": float("inf"),
    },
}


def _grid(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _names(text: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in text.split(",") if v.strip())


_Parser = Callable[[str], Any]

# section -> key -> parser
_SCHEMA: dict[str, dict[str, _Parser]] = {
    "code": {"n": int, "k": int, "rate": float, "p_design": float},
    "channel": {
        "sigma2": float,
        "q_grid": _grid,
        "qpeak": float,
        "fading": str,
        "sigma_h2_grid": _grid,
    },
    "campaign": {
        "figure": int,
        "trials": int,
        "max_bit_errors": int,
        "batch_size": int,
        "master_seed": int,
        "schemes": _names,
        "objective": str,
    },
    "quadrature": {"abs_tol": float, "max_subdivisions": int, "range_sigmas": float},
}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, Any]:
    """Parse config text into CampaignConfig field overrides.

    Unknown sections or keys and unparsable values raise :class:`ConfigError`.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc

    overrides: dict[str, Any] = {}
    quad: dict[str, Any] = {}
    for section in parser.sections():
        schema = _SCHEMA.get(section)
        if schema is None:
            raise ConfigError(f"{source}: unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in schema:
                raise ConfigError(f"{source}: unknown key {key!r} in [{section}]")
            try:
                value = schema[key](raw.strip())
            except ValueError as exc:
                raise ConfigError(f"{source}: bad value for {key}: {raw!r}") from exc
            if section == "quadrature":
                quad[key] = value
            else:
                overrides[key] = value
    if quad:
        overrides["quad"] = quad
    return overrides


def load_config_file(path: Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))


def build_campaign_config(
    figure: int | None,
    file_overrides: Mapping[str, Any] | None = None,
    cli_overrides: Mapping[str, Any] | None = None,
) -> CampaignConfig:
    """Layer preset, file and flag values into one validated config."""
    file_overrides = dict(file_overrides or {})
    cli_overrides = {k: v for k, v in (cli_overrides or {}).items() if v is not None}

    chosen = figure if figure is not None else file_overrides.get("figure")
    if chosen is None:
        raise ConfigError("a figure is required: pass --figure or set figure in [campaign]")
    if chosen not in FIGURE_PRESETS:
        raise ConfigError(f"unknown figure {chosen}; expected one of {sorted(FIGURE_PRESETS)}")

    merged = {**FIGURE_PRESETS[chosen], **file_overrides, **cli_overrides, "figure": chosen}
    try:
        config = CampaignConfig.model_validate(merged)
    except ValidationError as exc:
        raise ConfigError(f"invalid campaign configuration: {exc}") from exc

    logger.debug("Resolved campaign config: %s", config.model_dump(mode="json"))
    return config
