"""Deterministic per-trial random streams."""

from __future__ import annotations

import numpy as np

from polarfade.config import settings


def trial_rng(master_seed: int, point_index: int, trial_index: int) -> np.random.Generator:
    """Independent generator for one trial of one grid point.

    The stream depends only on the three integers, so results do not
    depend on execution order or worker count.
    """
    sequence = np.random.SeedSequence(master_seed, spawn_key=(point_index, trial_index))
    return np.random.default_rng(sequence)


def resolve_master_seed(cli_seed: int | None, file_seed: int | None = None) -> int:
    """``--seed`` wins over the config file, which wins over ``POLARFADE_SEED``; default 0."""
    for candidate in (cli_seed, file_seed, settings.seed):
        if candidate is not None:
            return int(candidate)
    return 0
