"""
Feature extraction over a manifest.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from core.exceptions import DataError
from core.models import ChannelSet, Method
from core.recordings import read_manifest, read_recording
from core.signal_utils import butterworth_zero_phase_lowpass
from features.baseline import baseline_features
from features.harmonic import harmonic_features
from features.matrix import FeatureMatrix, read_store, store_filename, write_store

logger = logging.getLogger(__name__)


class FeatureService:
    """
    Runs preprocessing and one extraction method over every recording.

    Recordings are processed in parallel; rows are always assembled in
    manifest order, then segment order, so the store is identical for any
    worker count.
    """

    def __init__(self, config):
        self.config = config

    @property
    def method(self):
        return Method(self.config.method)

    @property
    def channel_set(self):
        return ChannelSet(self.config.channel_set)

    def store_path(self, method=None, channel_set=None):
        method = method or self.config.method
        channel_set = channel_set or self.config.channel_set
        return self.config.features_dir / store_filename(method, channel_set)

    def extract_recording(self, row):
        """Feature rows for one manifest entry."""
        path = row['resolved_path']
        data, fs = read_recording(path)

        indices = self.channel_set.channel_indices
        if max(indices) >= data.shape[0]:
            raise DataError(
                f"Recording {path} has {data.shape[0]} channel(s); "
                f"channel set {self.channel_set.value} needs {max(indices) + 1}"
            )
        channels = data[list(indices)]

        pre = self.config.preprocess
        try:
            channels = butterworth_zero_phase_lowpass(channels, fs, pre.cutoff_hz, pre.order, axis=1)
        except ValueError as e:
            raise DataError(f"Cannot preprocess {path}: {e}") from e

        fo = row['speed_rpm'] / 60.0
        if self.method.is_harmonic:
            cfg = replace(self.config.harmonic, fs=fs).validate()
            if fo > cfg.fo_max:
                raise DataError(
                    f"Recording {path} runs at fo={fo:g} Hz, above fo_max={cfg.fo_max:g} Hz"
                )
            values = harmonic_features(channels, fo, cfg)
        else:
            cfg = replace(self.config.baseline, fs=fs).validate()
            values = baseline_features(channels, cfg)

        return FeatureMatrix.for_recording(
            values,
            bearing_id=row['bearing_id'],
            label=row['class'],
            speed_rpm=row['speed_rpm'],
            load_nm=row['load_nm'],
            run=row['run'],
            columns=cfg.feature_labels(),
        )

    def extract(self, manifest):
        """
        Extract features for every recording of a manifest DataFrame.

        Returns:
            FeatureMatrix with rows ordered by manifest then segment
        """
        rows = [row for _, row in manifest.iterrows()]
        if not rows:
            raise DataError("Manifest has no recordings to extract")

        logger.info(
            f"Extracting {self.method.value} ({self.channel_set.value}) from "
            f"{len(rows)} recordings with {self.config.workers} worker(s)"
        )
        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            parts = list(pool.map(self.extract_recording, rows))

        matrix = FeatureMatrix.concatenate(parts)
        logger.info(f"Extracted {matrix.n_rows} rows x {matrix.n_features} features")
        return matrix

    def run(self, manifest_path=None):
        """Extract from a manifest file and persist the store."""
        manifest = read_manifest(manifest_path or self.config.manifest_path)
        matrix = self.extract(manifest)
        path = write_store(matrix, self.store_path())
        return matrix, path

    def load(self, method=None, channel_set=None):
        return read_store(self.store_path(method, channel_set))
