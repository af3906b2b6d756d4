"""
Recording files and the dataset manifest.

A recording is a little-endian float32 file holding its channels one
after the other, with a sidecar ``.hdr`` text file giving fs, channel
count and per-channel length. The manifest is a CSV with one row per
recording.
"""
import hashlib
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from core.exceptions import DataError
from core.models import HealthClass

logger = logging.getLogger(__name__)

MANIFEST_COLUMNS = [
    'path', 'bearing_id', 'class', 'speed_rpm', 'load_nm', 'run', 'channel', 'held_out',
]

SAMPLE_DTYPE = np.dtype('<f4')


def header_path(path):
    return Path(path).with_suffix('.hdr')


def write_recording(path, data, fs):
    """Write a (channels, n) array and its sidecar header."""
    path = Path(path)
    data = np.atleast_2d(np.asarray(data))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        data.astype(SAMPLE_DTYPE).tofile(path)
        header_path(path).write_text(
            f"fs={fs:g}\nchannels={data.shape[0]}\nlength={data.shape[1]}\n",
            encoding='ascii',
        )
    except OSError as e:
        raise DataError(f"Could not write recording {path}: {e}") from e
    return path


def read_header(path):
    hdr = header_path(path)
    try:
        lines = hdr.read_text(encoding='ascii').splitlines()
    except OSError as e:
        raise DataError(f"Could not read recording header {hdr}: {e}") from e

    fields = {}
    for line in lines:
        if '=' in line:
            key, value = line.split('=', 1)
            fields[key.strip()] = value.strip()
    try:
        return float(fields['fs']), int(fields['channels']), int(fields['length'])
    except (KeyError, ValueError) as e:
        raise DataError(f"Malformed recording header {hdr}: {e}") from e


def read_recording(path):
    """
    Load a recording as float64.

    Returns:
        Tuple of (data with shape (channels, n), fs)
    """
    path = Path(path)
    fs, channels, length = read_header(path)
    try:
        raw = np.fromfile(path, dtype=SAMPLE_DTYPE)
    except OSError as e:
        raise DataError(f"Could not read recording {path}: {e}") from e

    if raw.size != channels * length:
        raise DataError(
            f"Recording {path} holds {raw.size} samples, header promises "
            f"{channels} x {length}"
        )
    data = raw.reshape(channels, length).astype(np.float64)
    if not np.all(np.isfinite(data)):
        raise DataError(f"Recording {path} contains non-finite samples")
    return data, fs


def write_manifest(frame, path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame[MANIFEST_COLUMNS].to_csv(path, index=False)
    except OSError as e:
        raise DataError(f"Could not write manifest {path}: {e}") from e
    return path


def read_manifest(path):
    """Parse and validate a manifest; paths are resolved against its directory."""
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype={'path': str, 'bearing_id': str, 'class': str, 'channel': str})
    except FileNotFoundError:
        raise DataError(f"Manifest not found: {path}")
    except pd.errors.EmptyDataError:
        raise DataError(f"Manifest is empty: {path}")
    except (OSError, pd.errors.ParserError) as e:
        raise DataError(f"Could not read manifest {path}: {e}") from e

    missing = [c for c in MANIFEST_COLUMNS if c not in frame.columns]
    if missing:
        raise DataError(f"Manifest {path} is missing columns: {', '.join(missing)}")
    if frame.empty:
        raise DataError(f"Manifest has no recordings: {path}")

    bad_class = set(frame['class']) - set(HealthClass.values)
    if bad_class:
        raise DataError(f"Manifest {path} has unknown classes: {', '.join(sorted(bad_class))}")
    if (frame['speed_rpm'] <= 0).any():
        raise DataError(f"Manifest {path} has non-positive speeds")

    frame['held_out'] = frame['held_out'].astype(str).str.lower().isin(['true', '1'])
    frame['run'] = frame['run'].astype(int)
    frame['speed_rpm'] = frame['speed_rpm'].astype(float)
    frame['load_nm'] = frame['load_nm'].astype(float)
    frame['resolved_path'] = [str(path.parent / p) for p in frame['path']]
    logger.info(f"Read manifest {path} with {len(frame)} recordings")
    return frame


def file_hash(path):
    """SHA-256 of a file's bytes, used as provenance for models and reports."""
    digest = hashlib.sha256()
    try:
        with open(path, 'rb') as f:
            for chunk in iter(lambda: f.read(1 << 16), b''):
                digest.update(chunk)
    except OSError as e:
        raise DataError(f"Could not hash {path}: {e}") from e
    return digest.hexdigest()
