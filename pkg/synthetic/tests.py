import io
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.test import SimpleTestCase
from numpy.testing import assert_array_equal

from adjustment.regression import fit_adjustment
from core.exceptions import InvalidArgumentError
from core.models import HealthClass
from core.recordings import read_manifest, read_recording
from core.run_config import load_run_config
from features.harmonic import HarmonicConfig, harmonic_features
from synthetic.generator import (
    CAMPAIGN_RUNS,
    OUTER_RACE_ORDER,
    BearingSpec,
    ConditionGrid,
    Defect,
    SignalModel,
    cell_seed,
    default_bearings,
    generate_recording,
    impulse_indices,
)
from synthetic.services import bearings_for, generate_dataset, grid_from_config, synthesize

GRID = ConditionGrid(speeds_rpm=(1000, 6000), loads_nm=(0, 20), duration_s=0.5)


def twin(spec):
    return replace(spec, health_class=HealthClass.HEALTHY, defects=())


class SpecTests(SimpleTestCase):

    def test_healthy_bearing_cannot_carry_defects(self):
        with self.assertRaises(InvalidArgumentError):
            BearingSpec('AM-09', HealthClass.HEALTHY, (Defect(3.57),))

    def test_negative_excitation(self):
        with self.assertRaises(InvalidArgumentError):
            BearingSpec('AM-09', excitation=-0.1)

    def test_defect_order_above_one(self):
        with self.assertRaises(InvalidArgumentError):
            Defect(0.5)

    def test_default_bearings(self):
        specs = default_bearings()
        self.assertEqual([s.id for s in specs], ['AM-01', 'AM-02', 'AM-03', 'F3-01', 'F5-01', 'F7-01'])
        self.assertEqual(sum(s.health_class == HealthClass.FAULTY for s in specs), 3)
        self.assertEqual({s.excitation for s in specs}, {BearingSpec('AM-09').excitation})
        self.assertEqual({d.severity for s in specs for d in s.defects}, {1.0})

    def test_grid_cells(self):
        grid = ConditionGrid(speeds_rpm=(1000, 2000), loads_nm=(0, 5), cells=((1000, 0), (2000, 5)))
        self.assertEqual(grid.conditions(), [(1000.0, 0.0), (2000.0, 5.0)])
        self.assertEqual(len(ConditionGrid(speeds_rpm=(1000, 2000), loads_nm=(0, 5)).conditions()), 4)

    def test_held_out_outside_grid(self):
        with self.assertRaises(InvalidArgumentError):
            ConditionGrid(speeds_rpm=(1000,), loads_nm=(0,), held_out=((2000, 0),))

    def test_grid_from_config(self):
        grid = grid_from_config(load_run_config())
        self.assertEqual(len(grid.conditions()), 15)
        self.assertTrue(grid.is_held_out(3000, 5))
        self.assertFalse(grid.is_held_out(3000, 10))


class RecordingTests(SimpleTestCase):

    def test_shape(self):
        data = generate_recording(BearingSpec('AM-01'), 1000, 0, 1, GRID)
        self.assertEqual(data.shape, (2, GRID.n_samples))

    def test_same_seed_same_signal(self):
        spec = default_bearings()[3]
        first = generate_recording(spec, 3000, 5, cell_seed(7, spec.id, 3000, 5, 1), GRID)
        again = generate_recording(spec, 3000, 5, cell_seed(7, spec.id, 3000, 5, 1), GRID)
        other = generate_recording(spec, 3000, 5, cell_seed(8, spec.id, 3000, 5, 1), GRID)
        assert_array_equal(first, again)
        self.assertFalse(np.array_equal(first, other))

    def test_zero_severity_matches_healthy_twin(self):
        spec = BearingSpec('F3-09', HealthClass.FAULTY, (Defect(OUTER_RACE_ORDER, 0.0),))
        faulty = generate_recording(spec, 2000, 10, 5, GRID)
        healthy = generate_recording(twin(spec), 2000, 10, 5, GRID)
        assert_array_equal(faulty, healthy)

    def test_impulse_spacing_halves_with_double_rate(self):
        slow = np.diff(impulse_indices(10.0, 1000.0, 1000))
        fast = np.diff(impulse_indices(20.0, 1000.0, 1000))
        assert_array_equal(slow, 100)
        assert_array_equal(fast, 50)

    def test_impulse_offset(self):
        self.assertEqual(impulse_indices(10.0, 1000.0, 1000, offset_s=0.025)[0], 25)

    def test_defect_lines_stand_out_at_every_speed(self):
        cfg = HarmonicConfig()
        grid = replace(GRID, duration_s=2.0)
        for spec in default_bearings():
            if spec.health_class != HealthClass.FAULTY:
                continue
            for speed in (1000, 3000, 6000):
                seed = cell_seed(3, spec.id, speed, 5, 1)
                faulty = harmonic_features(generate_recording(spec, speed, 5, seed, grid), speed / 60.0, cfg)
                healthy = harmonic_features(generate_recording(twin(spec), speed, 5, seed, grid), speed / 60.0, cfg)
                for defect in spec.defects:
                    # Feature j holds bin j + 1
                    columns = [round(cfg.d * defect.order * j) - 1 for j in (1, 2)]
                    difference = (faulty[:, columns] - healthy[:, columns]).mean()
                    with self.subTest(bearing=spec.id, speed=speed, order=defect.order):
                        self.assertGreater(difference, 6.0)

    def test_defect_power_does_not_depend_on_speed(self):
        spec = default_bearings()[3]
        model = SignalModel()
        grid = replace(GRID, duration_s=2.0, channels=1)
        power = []
        for speed in (1000, 6000):
            fault = generate_recording(spec, speed, 0, 11, grid) - generate_recording(twin(spec), speed, 0, 11, grid)
            power.append(fault.var() / model.trend(speed / 60.0, 0) ** 2)
        self.assertAlmostEqual(power[0] / power[1], 1.0, delta=0.2)

    def test_trend_sign_is_recovered(self):
        spec = BearingSpec('AM-01')
        cfg = HarmonicConfig(use_hilbert=False)
        grid = ConditionGrid(
            speeds_rpm=(1000, 2000, 3000, 4000, 5000, 6000), loads_nm=(0, 5, 10, 20), duration_s=0.5
        )
        rows, fo, to = [], [], []
        for speed, load in grid.conditions():
            data = generate_recording(spec, speed, load, cell_seed(1, spec.id, speed, load, 1), grid)
            # Fundamental only: feature d - 1
            fundamental = harmonic_features(data, speed / 60.0, cfg)[:, cfg.d - 1]
            rows.extend(fundamental)
            fo.extend([speed / 60.0] * fundamental.size)
            to.extend([load] * fundamental.size)

        model = fit_adjustment(np.array(rows)[:, None], fo, to)
        low, high_load, high_speed = model.predict([50.0, 50.0, 90.0], [0.0, 20.0, 0.0])[:, 0]
        self.assertGreater(high_load, low)
        self.assertGreater(high_speed, low)


class DatasetTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def config(self, **overrides):
        values = {'paths_data_dir': str(self.root / 'data'), 'synth_duration_s': 0.1}
        values.update(overrides)
        return load_run_config(overrides=values)

    def test_default_manifest(self):
        manifest, path = synthesize(self.config())
        self.assertEqual(len(manifest), 90)
        self.assertEqual(int(manifest['held_out'].sum()), 18)
        self.assertEqual(set(manifest['channel']), {'A1+A2'})

        loaded = read_manifest(path)
        self.assertEqual(loaded['path'].tolist(), manifest['path'].tolist())
        self.assertEqual(loaded['held_out'].tolist(), manifest['held_out'].tolist())
        data, fs = read_recording(loaded['resolved_path'][0])
        self.assertEqual(data.shape, (2, 4800))
        self.assertEqual(fs, 48000.0)

    def test_worker_count_does_not_change_files(self):
        specs = default_bearings()[:2]
        grid = ConditionGrid(speeds_rpm=(1000, 3000), loads_nm=(0, 5), duration_s=0.1)
        generate_dataset(specs, grid, 2, 9, self.root / 'one', workers=1)
        manifest, _ = generate_dataset(specs, grid, 2, 9, self.root / 'many', workers=4)
        for relative in manifest['path']:
            self.assertEqual((self.root / 'one' / relative).read_bytes(),
                             (self.root / 'many' / relative).read_bytes())

    def test_campaign_runs(self):
        grid = ConditionGrid(speeds_rpm=(1000,), loads_nm=(0,), duration_s=0.05)
        manifest, _ = generate_dataset(bearings_for(campaign_runs=True), grid, 1, 1, self.root / 'campaign')
        self.assertEqual(manifest.groupby('bearing_id').size().to_dict(), CAMPAIGN_RUNS)

    def test_nothing_to_generate(self):
        with self.assertRaises(InvalidArgumentError):
            generate_dataset([], GRID, 1, 1, self.root)
        with self.assertRaises(InvalidArgumentError):
            generate_dataset(default_bearings(), GRID, 0, 1, self.root)

    def test_synth_command(self):
        config_file = self.root / 'run.env'
        config_file.write_text('SYNTH_DURATION_S=0.1\nSYNTH_CHANNELS=1\n')
        out = io.StringIO()
        call_command('synth', config=str(config_file), data=str(self.root / 'cmd'), seed=4, stdout=out)
        manifest = read_manifest(self.root / 'cmd' / 'manifest.csv')
        self.assertEqual(set(manifest['channel']), {'A1'})
        self.assertIn('90 recordings from 6 bearings, 18 at held-out conditions', out.getvalue())
