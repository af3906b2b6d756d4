import tempfile
from pathlib import Path

import numpy as np
import pandas as pd
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from core.exceptions import ConfigError, DataError, InvalidArgumentError, InvalidConditionError
from core.models import ChannelSet, Method, SpectrumKind
from core.recordings import (
    MANIFEST_COLUMNS,
    read_manifest,
    read_recording,
    write_manifest,
    write_recording,
)
from core.run_config import load_run_config
from core.signal_utils import (
    blackman_window,
    butterworth_zero_phase_lowpass,
    dc_remove,
    hilbert_envelope,
    normalized_spectrum_rows,
    one_sided_spectrum,
    to_decibels,
    window_energy_correction,
    window_size,
)


def rms(x):
    return float(np.sqrt(np.mean(np.square(x))))


class WindowSizeTests(SimpleTestCase):

    def test_small_example(self):
        self.assertEqual(window_size(100, 25, 4), 16)

    def test_2000_rpm_at_48k(self):
        self.assertEqual(window_size(48000, 2000 / 60, 4), 5760)

    def test_too_coarse_window(self):
        with self.assertRaises(InvalidConditionError):
            window_size(48000, 48000, 4)

    def test_non_positive_frequency(self):
        with self.assertRaises(InvalidConditionError):
            window_size(48000, 0, 4)

    def test_rounds_half_away_from_zero(self):
        # 100 * 1 / 8 = 12.5
        self.assertEqual(window_size(100, 8, 1), 13)

    def test_monotone_in_frequency(self):
        sizes = [window_size(48000, fo, 4) for fo in np.linspace(10, 100, 50)]
        self.assertTrue(all(a >= b for a, b in zip(sizes, sizes[1:])))


class WindowTests(SimpleTestCase):

    def test_three_point_blackman(self):
        assert_allclose(blackman_window(3), [0, 1, 0], atol=1e-12)

    def test_five_point_center(self):
        self.assertAlmostEqual(blackman_window(5)[2], 1.0, delta=1e-12)

    def test_matches_closed_form(self):
        n = 64
        k = np.arange(n)
        brute = 0.42 - 0.5 * np.cos(2 * np.pi * k / (n - 1)) + 0.08 * np.cos(4 * np.pi * k / (n - 1))
        self.assertAlmostEqual(blackman_window(n).sum(), brute.sum(), delta=1e-10)

    def test_too_short(self):
        with self.assertRaises(InvalidArgumentError):
            blackman_window(1)

    def test_energy_correction(self):
        self.assertEqual(window_energy_correction(np.ones(7)), 1.0)
        self.assertEqual(window_energy_correction(np.full(4, 0.5)), 2.0)

    def test_blackman_energy_correction(self):
        w = blackman_window(1024)
        brute = np.sqrt(1024 / sum(v * v for v in w))
        self.assertAlmostEqual(window_energy_correction(w), brute, delta=1e-12)
        self.assertAlmostEqual(window_energy_correction(w), 1.812, delta=2e-3)

    def test_all_zero_window(self):
        with self.assertRaises(InvalidArgumentError):
            window_energy_correction(np.zeros(8))


class DCRemoveTests(SimpleTestCase):

    def test_examples(self):
        assert_array_equal(dc_remove([1, 1, 1, 1]), [0, 0, 0, 0])
        assert_array_equal(dc_remove([0, 2]), [-1, 1])

    def test_random_mean_is_zero(self):
        x = np.random.default_rng(3).normal(5.0, 2.0, 1000)
        self.assertLess(abs(dc_remove(x).mean()), 1e-12 * max(1, np.abs(x).max()))

    def test_empty(self):
        with self.assertRaises(InvalidArgumentError):
            dc_remove([])


class HilbertEnvelopeTests(SimpleTestCase):

    def test_zeros(self):
        assert_array_equal(hilbert_envelope(np.zeros(32)), np.zeros(32))

    def test_cosine_envelope(self):
        n = 256
        k = np.arange(n)
        env = hilbert_envelope(2.0 * np.cos(2 * np.pi * 8 * k / n))
        assert_allclose(env[n // 8:7 * n // 8], 2.0, rtol=0.01)

    def test_central_half_of_long_segment(self):
        n = 4096
        k = np.arange(n)
        env = hilbert_envelope(2.0 * np.cos(2 * np.pi * 64 * k / n))
        centre = env[n // 4:3 * n // 4]
        assert_allclose(centre, 2.0, rtol=0.01)
        self.assertLessEqual(centre.max() / centre.min(), 1.02)

    def test_positive_homogeneity(self):
        x = np.random.default_rng(0).normal(size=128)
        assert_allclose(hilbert_envelope(3.5 * x), 3.5 * hilbert_envelope(x), rtol=1e-12)

    def test_too_short(self):
        with self.assertRaises(InvalidArgumentError):
            hilbert_envelope([1.0, 2.0, 3.0])


class SpectrumTests(SimpleTestCase):

    def test_constant(self):
        spectrum = one_sided_spectrum(np.full(16, 3.0))
        self.assertEqual(spectrum.size, 8)
        self.assertAlmostEqual(spectrum[0], 48.0, delta=1e-9)
        assert_allclose(spectrum[1:], 0, atol=1e-9)

    def test_tone_peak(self):
        n = 64
        spectrum = one_sided_spectrum(np.cos(2 * np.pi * 5 * np.arange(n) / n))
        self.assertEqual(int(np.argmax(spectrum[1:])) + 1, 5)

    def test_parseval(self):
        n = 128
        rng = np.random.default_rng(7)
        k = np.arange(n)
        # Band limited below Nyquist so the returned half holds all the energy
        x = 0.3 + sum(
            rng.normal() * np.cos(2 * np.pi * b * k / n + rng.uniform(0, 6)) for b in range(1, 60)
        )
        spectrum = one_sided_spectrum(x)
        energy = (spectrum[0] ** 2 + 2 * np.sum(spectrum[1:] ** 2)) / n
        self.assertAlmostEqual(energy / np.sum(x * x), 1.0, delta=1e-9)

    def test_power_is_squared_magnitude(self):
        x = np.random.default_rng(1).normal(size=50)
        assert_allclose(
            one_sided_spectrum(x, kind=SpectrumKind.POWER), one_sided_spectrum(x) ** 2, rtol=1e-12
        )

    def test_power_rows_keep_the_linear_scale(self):
        segments = np.random.default_rng(2).normal(size=(3, 64))
        c = window_energy_correction(blackman_window(64))
        magnitude = normalized_spectrum_rows(segments, False)
        power = normalized_spectrum_rows(segments, False, kind=SpectrumKind.POWER)
        assert_allclose(power, magnitude ** 2 * 32 / c, rtol=1e-12)

    def test_decibels(self):
        assert_allclose(to_decibels(np.array([1.0, 0.0]), 1e-12), [0.0, -240.0])
        assert_allclose(to_decibels(np.array([100.0]), 1e-12, kind=SpectrumKind.POWER), [20.0])


class ButterworthTests(SimpleTestCase):
    fs = 1000.0

    def tone(self, freq, n=4000):
        return np.sin(2 * np.pi * freq * np.arange(n) / self.fs)

    def test_dc_unchanged(self):
        x = np.full(500, 2.5)
        assert_allclose(butterworth_zero_phase_lowpass(x, self.fs, 100.0), x, atol=1e-6)

    def test_stopband_attenuation(self):
        nyquist = self.fs / 2
        x = self.tone(0.9 * nyquist)
        y = butterworth_zero_phase_lowpass(x, self.fs, 0.1 * nyquist, order=4)
        self.assertLess(rms(y[500:-500]), 0.01 * rms(x))

    def test_passband_flat(self):
        cutoff = 100.0
        x = self.tone(0.05 * cutoff)
        y = butterworth_zero_phase_lowpass(x, self.fs, cutoff)
        self.assertAlmostEqual(rms(y[500:-500]) / rms(x[500:-500]), 1.0, delta=0.01)

    def test_zero_phase(self):
        x = self.tone(20.0)
        y = butterworth_zero_phase_lowpass(x, self.fs, 100.0)
        inner = slice(500, -500)
        lags = range(-10, 11)
        corr = [np.dot(x[inner], np.roll(y, lag)[inner]) for lag in lags]
        self.assertEqual(list(lags)[int(np.argmax(corr))], 0)

    def test_preserves_length(self):
        x = np.random.default_rng(2).normal(size=301)
        self.assertEqual(butterworth_zero_phase_lowpass(x, self.fs, 100.0).shape, x.shape)

    def test_cutoff_at_nyquist(self):
        with self.assertRaises(InvalidArgumentError):
            butterworth_zero_phase_lowpass(self.tone(10.0), self.fs, self.fs / 2)


class ChoiceTests(SimpleTestCase):

    def test_method_flags(self):
        self.assertTrue(Method.HARH.is_harmonic and Method.HARH.uses_hilbert)
        self.assertTrue(Method.HAR.is_harmonic and not Method.HAR.uses_hilbert)
        self.assertTrue(Method.HFFT.uses_hilbert and not Method.HFFT.is_harmonic)

    def test_channel_indices(self):
        self.assertEqual(ChannelSet('A1+A2').channel_indices, (0, 1))
        self.assertEqual(ChannelSet.A2.channel_indices, (1,))
        self.assertEqual(ChannelSet.A1_A2.file_slug, 'A1-A2')


class RunConfigTests(SimpleTestCase):

    def write_config(self, directory, text):
        path = Path(directory) / 'run.env'
        path.write_text(text)
        return path

    def test_defaults(self):
        config = load_run_config()
        self.assertEqual(config.method, 'HARH')
        self.assertEqual(config.harmonic.d, 4)
        self.assertTrue(config.harmonic.use_hilbert)
        self.assertEqual(config.baseline.window, 8196)
        self.assertEqual(
            config.eval.test_conditions, ((2000.0, 5.0), (3000.0, 5.0), (4000.0, 5.0))
        )
        self.assertEqual(len(config.synth.cells), 15)

    def test_file_then_flags(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = self.write_config(tmp, 'SEED=5\nMETHOD=FFT\n')
            config = load_run_config(path, {'seed': 9, 'channel_set': None})
        self.assertEqual(config.method, 'FFT')
        self.assertFalse(config.baseline.use_hilbert)
        self.assertEqual(config.seed, 9)
        self.assertEqual(config.channel_set, 'A1+A2')

    def test_hash_tracks_results_not_paths(self):
        base = load_run_config()
        self.assertEqual(base.config_hash, load_run_config().config_hash)
        self.assertEqual(
            base.config_hash, load_run_config(overrides={'paths_out_dir': '/elsewhere'}).config_hash
        )
        self.assertNotEqual(base.config_hash, load_run_config(overrides={'seed': 1}).config_hash)

    def test_with_method_switches_hilbert(self):
        config = load_run_config().with_method('HAR', 'A1')
        self.assertEqual(config.method, 'HAR')
        self.assertFalse(config.harmonic.use_hilbert)
        self.assertEqual(config.channel_set, 'A1')

    def test_unknown_key(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = self.write_config(tmp, 'WINDOW_SIZE=12\n')
            with self.assertRaises(ConfigError):
                load_run_config(path)

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            load_run_config('/nonexistent/run.env')

    def test_invalid_values(self):
        bad = [
            {'harmonic_d': 0},
            {'method': 'WAVELET'},
            {'preprocess_cutoff_hz': 24000},
            {'baseline_lowpass_hz': 30000},
            {'harmonic_max_harmonics': 300},
            {'eval_test_conditions': '2500:5'},
            {'eval_test_conditions': '2000-5'},
        ]
        for overrides in bad:
            with self.subTest(overrides=overrides):
                with self.assertRaises(ConfigError) as ctx:
                    load_run_config(overrides=overrides)
                self.assertEqual(ctx.exception.exit_code, 2)


class RecordingTests(SimpleTestCase):

    def test_round_trip(self):
        data = np.random.default_rng(4).normal(size=(2, 100)).astype(np.float32)
        with tempfile.TemporaryDirectory() as tmp:
            path = write_recording(Path(tmp) / 'sub' / 'rec.f32', data, 48000)
            loaded, fs = read_recording(path)
        self.assertEqual(fs, 48000.0)
        assert_array_equal(loaded, data.astype(np.float64))

    def test_truncated_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_recording(Path(tmp) / 'rec.f32', np.zeros((2, 50)), 1000)
            path.write_bytes(path.read_bytes()[:-4])
            with self.assertRaisesMessage(DataError, str(path)):
                read_recording(path)

    def test_missing_file_names_path(self):
        with self.assertRaisesMessage(DataError, '/nonexistent/missing'):
            read_recording('/nonexistent/missing.f32')

    def manifest(self):
        return pd.DataFrame([{
            'path': 'recordings/a.f32', 'bearing_id': 'AM-01', 'class': 'healthy',
            'speed_rpm': 1000.0, 'load_nm': 0.0, 'run': 1, 'channel': 'A1+A2', 'held_out': False,
        }], columns=MANIFEST_COLUMNS)

    def test_manifest_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_manifest(self.manifest(), Path(tmp) / 'manifest.csv')
            frame = read_manifest(path)
        self.assertEqual(frame.loc[0, 'bearing_id'], 'AM-01')
        self.assertEqual(frame.loc[0, 'speed_rpm'], 1000.0)
        self.assertFalse(frame.loc[0, 'held_out'])
        self.assertTrue(frame.loc[0, 'resolved_path'].endswith('recordings/a.f32'))

    def test_manifest_missing_column(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'manifest.csv'
            self.manifest().drop(columns=['load_nm']).to_csv(path, index=False)
            with self.assertRaisesMessage(DataError, 'load_nm'):
                read_manifest(path)

    def test_manifest_without_rows(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'manifest.csv'
            path.write_text(','.join(MANIFEST_COLUMNS) + '\n')
            with self.assertRaises(DataError):
                read_manifest(path)

    def test_manifest_unknown_class(self):
        frame = self.manifest()
        frame.loc[0, 'class'] = 'cracked'
        with tempfile.TemporaryDirectory() as tmp:
            path = write_manifest(frame, Path(tmp) / 'manifest.csv')
            with self.assertRaisesMessage(DataError, 'cracked'):
                read_manifest(path)
