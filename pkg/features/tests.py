import io
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from core.exceptions import ConfigError, DataError, EmptyExtractionError, InvalidArgumentError
from core.models import SpectrumKind
from core.recordings import MANIFEST_COLUMNS, read_manifest
from core.run_config import load_run_config
from features.baseline import BaselineConfig, baseline_features, extract_baseline_rows
from features.harmonic import (
    HarmonicConfig,
    combine_channels,
    extract_harmonic_rows,
    harmonic_features,
    postprocess,
    trim_features,
)
from features.matrix import FeatureMatrix, read_store, write_store
from features.services import FeatureService
from synthetic.generator import BearingSpec, ConditionGrid, Defect
from synthetic.services import generate_dataset

FS = 48000.0
FO_GRID = [20.0, 100 / 3, 50.0, 200 / 3]
HARMONICS = [1, 2, 5]


def tone(freq, seconds=1.0, amplitude=1.0):
    t = np.arange(int(FS * seconds)) / FS
    return amplitude * np.cos(2 * np.pi * freq * t)


def small_dataset(directory, speeds=(1200, 2400, 3600), loads=(0, 10), seconds=0.5):
    specs = [
        BearingSpec('H-1'),
        BearingSpec('H-2'),
        BearingSpec('F-1', 'faulty', (Defect(3.57, 1.0),)),
    ]
    grid = ConditionGrid(speeds_rpm=speeds, loads_nm=loads, duration_s=seconds)
    return generate_dataset(specs, grid, 1, 11, directory)


class HarmonicAlignmentTests(SimpleTestCase):

    def test_tone_lands_on_harmonic_bin(self):
        cfg = HarmonicConfig(use_hilbert=False)
        for fo in FO_GRID:
            for h in HARMONICS:
                with self.subTest(fo=fo, h=h):
                    rows = extract_harmonic_rows(tone(h * fo), fo, cfg)
                    assert_array_equal(rows.argmax(axis=1), h * cfg.d)

    def test_feature_index_and_peak_level(self):
        cfg = HarmonicConfig(use_hilbert=False)
        for h in HARMONICS:
            peaks = []
            for fo in FO_GRID:
                features = harmonic_features([tone(h * fo)], fo, cfg)
                # Feature j holds harmonic (j + 1) / d
                assert_array_equal(features.argmax(axis=1) + 1, h * cfg.d)
                peaks.append(features.max())
            with self.subTest(h=h):
                self.assertLessEqual(max(peaks) - min(peaks), 0.3)

    def test_envelope_alignment(self):
        cfg = HarmonicConfig(use_hilbert=True)
        t = np.arange(int(FS)) / FS
        for fo in FO_GRID:
            for h in HARMONICS:
                with self.subTest(fo=fo, h=h):
                    x = (1 + 0.5 * np.cos(2 * np.pi * h * fo * t)) * np.cos(2 * np.pi * 3000 * t)
                    rows = extract_harmonic_rows(x, fo, cfg)
                    # Bins 0-2 hold the main lobe of the envelope's mean
                    assert_array_equal(rows[:, 3:].argmax(axis=1) + 3, h * cfg.d)

    def test_row_count_is_whole_segments(self):
        cfg = HarmonicConfig()
        n = 5760
        rows = extract_harmonic_rows(np.random.default_rng(0).normal(size=3 * n + 100), 100 / 3, cfg)
        self.assertEqual(rows.shape, (3, n // 2))

    def test_zero_signal(self):
        rows = extract_harmonic_rows(np.zeros(int(FS)), 50.0, HarmonicConfig())
        assert_allclose(rows, 0.0, atol=1e-12)

    def test_signal_shorter_than_window(self):
        with self.assertRaises(EmptyExtractionError):
            extract_harmonic_rows(np.ones(100), 50.0, HarmonicConfig())


class HarmonicPipelineTests(SimpleTestCase):

    def test_combine_single_channel(self):
        m = np.random.default_rng(1).uniform(size=(3, 5))
        assert_array_equal(combine_channels([m]), m)

    def test_combine_identical_channels(self):
        m = np.random.default_rng(1).uniform(size=(3, 5))
        assert_allclose(combine_channels([m, m]), np.sqrt(2) * m)

    def test_combine_three_four_five(self):
        assert_allclose(combine_channels([np.full((1, 1), 3.0), np.full((1, 1), 4.0)]), [[5.0]])

    def test_combine_is_order_free(self):
        rng = np.random.default_rng(2)
        a, b, c = (rng.uniform(size=(2, 4)) for _ in range(3))
        assert_allclose(combine_channels([a, b, c]), combine_channels([c, a, b]), rtol=1e-15)

    def test_combine_shape_mismatch(self):
        with self.assertRaises(InvalidArgumentError):
            combine_channels([np.ones((2, 4)), np.ones((2, 5))])

    def test_trim(self):
        rows = np.arange(20.0).reshape(2, 10)
        assert_array_equal(trim_features(rows, 8), rows[:, :4])
        assert_array_equal(trim_features(rows[:, :4], 8), rows[:, :4])

    def test_trim_too_few_columns(self):
        with self.assertRaises(InvalidArgumentError):
            trim_features(np.ones((2, 3)), 8)

    def test_trim_equalises_speeds(self):
        cfg = HarmonicConfig(d=4, fs=100.0, fo_max=50.0, max_harmonics=1)
        t = np.arange(400) / 100.0
        widths = {
            trim_features(extract_harmonic_rows(np.cos(2 * np.pi * fo * t), fo, cfg), cfg.n_min).shape[1]
            for fo in (25.0, 50.0)
        }
        self.assertEqual(widths, {cfg.n_min // 2})

    def test_postprocess(self):
        cfg = HarmonicConfig()
        rows = np.ones((2, 300))
        rows[:, 5] = 0.0
        features = postprocess(rows, cfg)
        self.assertEqual(features.shape, (2, 240))
        self.assertEqual(features[0, 0], 0.0)
        self.assertEqual(features[0, 4], -240.0)

    def test_postprocess_is_monotone(self):
        rng = np.random.default_rng(14)
        for kind in (SpectrumKind.MAGNITUDE, SpectrumKind.POWER):
            cfg = HarmonicConfig(max_harmonics=2, spectrum=kind)
            low = np.abs(rng.normal(size=(50, 12))) * 10.0 ** rng.integers(-14, 2, size=(50, 12))
            high = low + np.abs(rng.normal(size=low.shape)) * 10.0 ** rng.integers(-14, 2, size=low.shape)
            self.assertTrue(np.all(postprocess(high, cfg) >= postprocess(low, cfg)))

    def test_postprocess_too_many_harmonics(self):
        with self.assertRaises(ConfigError):
            postprocess(np.ones((1, 100)), HarmonicConfig())

    def test_config_rejects_too_many_harmonics(self):
        with self.assertRaises(ConfigError):
            HarmonicConfig(max_harmonics=300).validate()

    def test_labels_in_harmonic_units(self):
        labels = HarmonicConfig().feature_labels()
        self.assertEqual(labels[:4], ['h0.25', 'h0.5', 'h0.75', 'h1'])
        self.assertEqual(labels[-1], 'h60')


class BaselineTests(SimpleTestCase):

    def test_retained_bins(self):
        self.assertEqual(BaselineConfig().feature_count, 1024)

    def test_one_kilohertz_bin(self):
        features = extract_baseline_rows(tone(1000.0), BaselineConfig())
        self.assertEqual(features.shape[1], 1024)
        assert_array_equal(features.argmax(axis=1) + 1, 171)

    def test_zero_signal_is_floor(self):
        features = extract_baseline_rows(np.zeros(int(FS)), BaselineConfig())
        assert_array_equal(features, -240.0)

    def test_peak_moves_with_speed(self):
        cfg = BaselineConfig()
        freqs, bins = [], []
        for fo in FO_GRID:
            for h in HARMONICS:
                features = baseline_features([tone(h * fo)], cfg)
                freqs.append(h * fo)
                bins.append(int(features[0].argmax()) + 1)
        slope, intercept = np.polyfit(freqs, bins, 1)
        predicted = slope * np.asarray(freqs) + intercept
        ss_res = np.sum((np.asarray(bins) - predicted) ** 2)
        ss_tot = np.sum((np.asarray(bins) - np.mean(bins)) ** 2)
        self.assertGreater(1 - ss_res / ss_tot, 0.999)
        self.assertAlmostEqual(slope, 1 / cfg.resolution, delta=0.01 / cfg.resolution)

    def test_short_signal(self):
        with self.assertRaises(EmptyExtractionError):
            extract_baseline_rows(np.ones(1000), BaselineConfig())

    def test_lowpass_above_nyquist(self):
        with self.assertRaises(ConfigError):
            BaselineConfig(lowpass_hz=30000).validate()


class FeatureMatrixTests(SimpleTestCase):

    def matrix(self):
        return FeatureMatrix.concatenate([
            FeatureMatrix.for_recording(np.ones((2, 3)), 'AM-01', 'healthy', 1000, 0, 1, ['a', 'b', 'c']),
            FeatureMatrix.for_recording(np.zeros((3, 3)), 'F3-01', 'faulty', 2000, 5, 2, ['a', 'b', 'c']),
        ])

    def test_metadata(self):
        m = self.matrix()
        self.assertEqual(m.n_rows, 5)
        assert_array_equal(m.segment, [0, 1, 0, 1, 2])
        assert_allclose(m.fo, [1000 / 60] * 2 + [2000 / 60] * 3)
        assert_array_equal(m.is_healthy, [True, True, False, False, False])
        self.assertEqual(m.condition_id[2], (2000.0, 5.0))

    def test_store_keeps_rows(self):
        m = self.matrix()
        with tempfile.TemporaryDirectory() as tmp:
            loaded = read_store(write_store(m, Path(tmp) / 'features' / 'X.csv'))
        assert_array_equal(loaded.values, m.values)
        assert_array_equal(loaded.bearing_id, m.bearing_id)
        self.assertEqual(loaded.columns, ('a', 'b', 'c'))

    def test_missing_store(self):
        with self.assertRaises(DataError):
            read_store(Path('/nonexistent/store.csv'))

    def test_width_mismatch(self):
        with self.assertRaises(InvalidArgumentError):
            FeatureMatrix.concatenate([
                FeatureMatrix.for_recording(np.ones((1, 2)), 'a', 'healthy', 1, 0, 1),
                FeatureMatrix.for_recording(np.ones((1, 3)), 'b', 'healthy', 1, 0, 1),
            ])

    def test_metadata_length_mismatch(self):
        with self.assertRaises(InvalidArgumentError):
            FeatureMatrix(np.ones((2, 2)), ['a'], ['healthy'] * 2, [1, 1], [0, 0], [1, 1], [0, 1])


class FeatureServiceTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.data_dir = Path(self.tmp.name) / 'data'
        self.out_dir = Path(self.tmp.name) / 'out'
        self.manifest, self.manifest_path = small_dataset(self.data_dir)

    def config(self, **overrides):
        values = {'paths_data_dir': str(self.data_dir), 'paths_out_dir': str(self.out_dir)}
        values.update(overrides)
        return load_run_config(overrides=values)

    def test_rows_follow_manifest_order(self):
        matrix = FeatureService(self.config(workers=1)).extract(read_manifest(self.manifest_path))
        order = list(zip(matrix.bearing_id, matrix.speed_rpm, matrix.load_nm))
        expected = []
        for _, row in self.manifest.iterrows():
            n = int(0.5 * FS) // round(FS * 4 / (row['speed_rpm'] / 60))
            expected += [(row['bearing_id'], row['speed_rpm'], row['load_nm'])] * n
        self.assertEqual(order, expected)
        self.assertEqual(matrix.n_features, 240)

    def test_worker_count_does_not_change_features(self):
        manifest = read_manifest(self.manifest_path)
        one = FeatureService(self.config(workers=1)).extract(manifest)
        many = FeatureService(self.config(workers=4)).extract(manifest)
        assert_array_equal(one.values, many.values)

    def test_baseline_method(self):
        matrix = FeatureService(self.config(method='FFT')).extract(read_manifest(self.manifest_path))
        self.assertEqual(matrix.n_features, 1024)
        self.assertEqual(matrix.columns[0], 'f5.857')

    def test_speed_above_fo_max(self):
        config = self.config(harmonic_fo_max=50, synth_speeds_rpm='1000,2000,3000')
        with self.assertRaisesMessage(DataError, 'fo_max'):
            FeatureService(config).extract(read_manifest(self.manifest_path))

    def test_channel_set_needs_channels(self):
        grid = ConditionGrid(speeds_rpm=(1200,), loads_nm=(0,), duration_s=0.5, channels=1)
        data_dir = Path(self.tmp.name) / 'mono'
        _, path = generate_dataset([BearingSpec('H-1')], grid, 1, 3, data_dir)
        with self.assertRaisesMessage(DataError, 'A2'):
            FeatureService(self.config(channel_set='A2')).extract(read_manifest(path))

    def test_extract_command(self):
        out = io.StringIO()
        call_command('extract', data=str(self.data_dir), out=str(self.out_dir), method='HAR',
                     channels='A1', stdout=out)
        store = pd.read_csv(self.out_dir / 'features' / 'HAR_A1.csv')
        self.assertEqual(list(store.columns[:6]),
                         ['bearing_id', 'class', 'speed_rpm', 'load_nm', 'run', 'segment'])
        self.assertEqual(store.columns[6], 'h0.25')
        self.assertIn('Wrote', out.getvalue())

    def test_extract_command_empty_manifest(self):
        empty = Path(self.tmp.name) / 'empty'
        empty.mkdir()
        (empty / 'manifest.csv').write_text(','.join(MANIFEST_COLUMNS) + '\n')
        with self.assertRaises(CommandError) as ctx:
            call_command('extract', data=str(empty), out=str(self.out_dir), stdout=io.StringIO())
        self.assertEqual(ctx.exception.returncode, 3)

    def test_extract_command_bad_config(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('extract', config='/nonexistent/run.env', stdout=io.StringIO())
        self.assertEqual(ctx.exception.returncode, 2)
