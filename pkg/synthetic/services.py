"""
Writing a synthetic dataset to disk.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import pandas as pd

from core.exceptions import InvalidArgumentError
from core.recordings import MANIFEST_COLUMNS, write_manifest, write_recording
from synthetic.generator import (
    CAMPAIGN_RUNS,
    ConditionGrid,
    SignalModel,
    cell_seed,
    default_bearings,
    generate_recording,
)

logger = logging.getLogger(__name__)

RECORDINGS_DIR = 'recordings'
MANIFEST_NAME = 'manifest.csv'


def recording_name(bearing_id, speed_rpm, load_nm, run):
    return f"{bearing_id}_{speed_rpm:g}rpm_{load_nm:g}nm_r{run}.f32"


def grid_from_config(config):
    synth = config.synth
    return ConditionGrid(
        speeds_rpm=tuple(synth.speeds_rpm),
        loads_nm=tuple(synth.loads_nm),
        held_out=tuple(config.eval.test_conditions),
        cells=tuple(synth.cells),
        duration_s=synth.duration_s,
        fs=synth.fs,
        channels=synth.channels,
    )


def bearings_for(campaign_runs=False):
    specs = default_bearings()
    if campaign_runs:
        specs = [replace(s, runs=CAMPAIGN_RUNS.get(s.id, s.runs)) for s in specs]
    return specs


def generate_dataset(specs, grid, runs_per_cell, seed, out_dir, model=None, workers=1):
    """
    Generate every (bearing, condition, run) recording and the manifest.

    Each recording is seeded from (seed, bearing, condition, run) alone, so
    the files do not depend on the worker count or generation order.

    Returns:
        Tuple of (manifest DataFrame, manifest path)
    """
    if not specs:
        raise InvalidArgumentError("No bearings to generate")
    conditions = grid.conditions()
    if not conditions:
        raise InvalidArgumentError("Condition grid is empty")
    if runs_per_cell < 1:
        raise InvalidArgumentError(f"Runs per cell must be at least 1, got {runs_per_cell}")

    model = model or SignalModel()
    out_dir = Path(out_dir)
    channel_label = 'A1+A2' if grid.channels >= 2 else 'A1'

    jobs = []
    for spec in specs:
        for speed, load in conditions:
            for run in range(1, (spec.runs or runs_per_cell) + 1):
                jobs.append((spec, speed, load, run))

    def produce(job):
        spec, speed, load, run = job
        relative = Path(RECORDINGS_DIR) / recording_name(spec.id, speed, load, run)
        data = generate_recording(
            spec, speed, load, cell_seed(seed, spec.id, speed, load, run), grid, model
        )
        write_recording(out_dir / relative, data, grid.fs)
        return {
            'path': relative.as_posix(),
            'bearing_id': spec.id,
            'class': str(spec.health_class),
            'speed_rpm': speed,
            'load_nm': load,
            'run': run,
            'channel': channel_label,
            'held_out': grid.is_held_out(speed, load),
        }

    logger.info(f"Generating {len(jobs)} recordings into {out_dir} with {workers} worker(s)")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(produce, jobs))

    manifest = pd.DataFrame(rows, columns=MANIFEST_COLUMNS)
    path = write_manifest(manifest, out_dir / MANIFEST_NAME)
    return manifest, path


def synthesize(config, campaign_runs=False):
    """generate_dataset with every setting taken from a RunConfig."""
    return generate_dataset(
        bearings_for(campaign_runs),
        grid_from_config(config),
        config.synth.runs,
        config.seed,
        config.data_dir,
        model=SignalModel(snr_db=config.synth.snr_db),
        workers=config.workers,
    )
