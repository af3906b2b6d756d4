import io
import json
import tempfile
from collections import Counter
from fractions import Fraction
from pathlib import Path

import numpy as np
import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from core.exceptions import DataError, InvalidArgumentError, InvalidSplitError
from core.models import Reweighting
from core.run_config import load_run_config
from evaluation.metrics import classification_accuracy, operating_condition_id_error
from evaluation.neighbors import (
    knn_predict,
    knn_predict_many,
    loo_prediction_table,
    reweighted_error,
    select_k_star,
)
from evaluation.projection import fit_projection, project
from evaluation.reports import CellResult, Comparison, EvalReport, aggregate, load_summary
from evaluation.services import EvaluationService, k_max_for
from evaluation.splits import make_splits
from features.matrix import ROLE_TRAIN, FeatureMatrix
from features.services import FeatureService
from synthetic.services import synthesize

BEARINGS = ['AM-01', 'AM-02', 'AM-03', 'F3-01', 'F5-01', 'F7-01']
HELD_OUT = [(2000.0, 5.0), (3000.0, 5.0), (4000.0, 5.0)]
CELLS = [
    (1000, 0), (2000, 0), (3000, 0), (4000, 0), (5000, 0), (6000, 0),
    (2000, 5), (3000, 5), (4000, 5),
    (1000, 10), (3000, 10), (5000, 10),
    (2000, 20), (4000, 20), (6000, 20),
]


def manifest_rows(bearings=BEARINGS, cells=CELLS):
    return pd.DataFrame(
        [(b, float(s), float(t)) for b in bearings for s, t in cells],
        columns=['bearing_id', 'speed_rpm', 'load_nm'],
    )


def train_matrix(values, role=ROLE_TRAIN):
    n = len(values)
    matrix = FeatureMatrix(
        values=values,
        bearing_id=np.array(['AM-01'] * n, dtype=object),
        label=np.array(['healthy'] * n, dtype=object),
        speed_rpm=np.full(n, 1000.0),
        load_nm=np.zeros(n),
        run=np.ones(n, dtype=int),
        segment=np.arange(n),
    )
    return matrix.subset(np.arange(n), role=role)


def brute_knn(points, labels, query, k, skip=None):
    """Plain-Python kNN: squared distance then index, ties to the nearest tied class."""
    candidates = sorted(
        (sum((q - p) ** 2 for q, p in zip(query, point)), j)
        for j, point in enumerate(points) if j != skip
    )
    nearest = [labels[j] for _, j in candidates[:k]]
    counts = Counter(nearest)
    best = max(counts.values())
    return next(label for label in nearest if counts[label] == best)


def brute_error(predicted, actual):
    rates = []
    for c in sorted(set(actual)):
        idx = [i for i, a in enumerate(actual) if a == c]
        rates.append(Fraction(sum(predicted[i] != c for i in idx), len(idx)))
    return sum(rates) / len(rates)


class SplitTests(SimpleTestCase):

    def test_one_plan_per_bearing_and_condition(self):
        plans = make_splits(manifest_rows(), HELD_OUT)
        self.assertEqual(len(plans), 18)
        self.assertEqual(len({p.key for p in plans}), 18)

    def test_training_side_never_sees_test_data(self):
        rows = manifest_rows()
        for plan in make_splits(rows, HELD_OUT):
            train = rows.iloc[plan.train_rows]
            test = rows.iloc[plan.test_rows]
            self.assertNotIn(plan.test_bearing, set(train.bearing_id))
            conditions = set(zip(train.speed_rpm, train.load_nm))
            self.assertFalse(conditions & set(HELD_OUT))
            self.assertEqual(set(test.bearing_id), {plan.test_bearing})
            self.assertEqual(set(zip(test.speed_rpm, test.load_nm)), {plan.test_condition})

    def test_feature_matrix_rows(self):
        rows = manifest_rows(bearings=['AM-01', 'F3-01'])
        matrix = FeatureMatrix(
            values=np.zeros((len(rows), 2)),
            bearing_id=rows.bearing_id.to_numpy(dtype=object),
            label=np.array(['healthy'] * len(rows), dtype=object),
            speed_rpm=rows.speed_rpm,
            load_nm=rows.load_nm,
            run=np.ones(len(rows), dtype=int),
            segment=np.zeros(len(rows), dtype=int),
        )
        plans = make_splits(matrix, HELD_OUT[:1])
        self.assertEqual([p.test_bearing for p in plans], ['AM-01', 'F3-01'])
        self.assertEqual(plans[0].label, 'AM-01 @ 2000 RPM / 5 Nm')

    def test_single_bearing(self):
        with self.assertRaises(InvalidSplitError):
            make_splits(manifest_rows(bearings=['AM-01']), HELD_OUT)

    def test_condition_not_in_data(self):
        with self.assertRaisesMessage(InvalidSplitError, '2500 RPM'):
            make_splits(manifest_rows(), [(2500.0, 5.0)])

    def test_bearing_missing_a_held_out_condition(self):
        rows = manifest_rows()
        rows = rows[~((rows.bearing_id == 'F7-01') & (rows.speed_rpm == 3000) & (rows.load_nm == 5))]
        with self.assertRaisesMessage(InvalidSplitError, 'no test rows'):
            make_splits(rows, HELD_OUT)


class ProjectionTests(SimpleTestCase):

    def setUp(self):
        rng = np.random.default_rng(21)
        self.values = rng.normal(size=(50, 2)) @ rng.normal(size=(2, 6)) * 3 + rng.normal(size=6) * 10

    def test_rank_two_data_is_reconstructed(self):
        p = fit_projection(train_matrix(self.values))
        z = p.standardize(self.values)
        assert_allclose(project(p, self.values) @ p.components, z, atol=1e-9)

    def test_components_are_orthonormal(self):
        p = fit_projection(train_matrix(self.values))
        assert_allclose(p.components @ p.components.T, np.eye(2), atol=1e-12)

    def test_training_mean_projects_to_origin(self):
        p = fit_projection(train_matrix(self.values))
        assert_allclose(project(p, self.values.mean(axis=0, keepdims=True)), 0.0, atol=1e-9)

    def test_constant_feature_is_ignored(self):
        values = self.values.copy()
        values[:, 3] = 7.0
        p = fit_projection(train_matrix(values))
        self.assertTrue(p.constant_features[3])
        assert_array_equal(p.components[:, 3], 0.0)

        moved = values[:5].copy()
        moved[:, 3] = 1000.0
        assert_allclose(project(p, moved), project(p, values[:5]))
        self.assertTrue(np.all(np.isfinite(project(p, moved))))

    def test_isotropic_data_has_no_preferred_direction(self):
        values = np.random.default_rng(25).normal(size=(1000, 4))
        p = fit_projection(train_matrix(values))
        first, second = p.explained_variance
        self.assertLessEqual(first / second, 1.2)

    def test_projection_is_affine(self):
        rng = np.random.default_rng(26)
        p = fit_projection(train_matrix(self.values))
        x, y = rng.normal(size=(2, 5, 6)) * 10
        for a in (-1.5, 0.0, 0.3, 2.0):
            assert_allclose(
                project(p, a * x + (1 - a) * y),
                a * project(p, x) + (1 - a) * project(p, y),
                atol=1e-9,
            )

    def test_needs_training_rows(self):
        with self.assertRaises(InvalidArgumentError):
            fit_projection(train_matrix(self.values, role='test'))

    def test_needs_three_rows(self):
        with self.assertRaises(InvalidArgumentError):
            fit_projection(train_matrix(self.values[:2]))

    def test_feature_count_mismatch(self):
        p = fit_projection(train_matrix(self.values))
        with self.assertRaises(InvalidArgumentError):
            project(p, np.ones((2, 5)))


class NeighborTests(SimpleTestCase):

    def test_examples(self):
        train = [[0, 0], [1, 0], [10, 0]]
        labels = ['healthy', 'healthy', 'faulty']
        self.assertEqual(knn_predict(train, labels, [0.4, 0], 1), 'healthy')
        self.assertEqual(knn_predict(train, labels, [0.4, 0], 3), 'healthy')
        self.assertEqual(knn_predict(train, labels, [9, 0], 1), 'faulty')

    def test_vote_tie_goes_to_nearest(self):
        train = [[0, 0], [2, 0]]
        labels = ['healthy', 'faulty']
        self.assertEqual(knn_predict(train, labels, [0.9, 0], 2), 'healthy')
        self.assertEqual(knn_predict(train, labels, [1.1, 0], 2), 'faulty')

    def test_distance_tie_goes_to_lower_index(self):
        train = [[1, 0], [-1, 0]]
        self.assertEqual(knn_predict(train, ['faulty', 'healthy'], [0, 0], 1), 'faulty')
        self.assertEqual(knn_predict(train, ['healthy', 'faulty'], [0, 0], 1), 'healthy')

    def test_k_out_of_range(self):
        with self.assertRaises(InvalidArgumentError):
            knn_predict_many([[0, 0]], ['healthy'], [[1, 1]], 2)
        with self.assertRaises(InvalidArgumentError):
            knn_predict_many([[0, 0]], ['healthy'], [[1, 1]], 0)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(22)
        for _ in range(200):
            n = int(rng.integers(3, 13))
            points = rng.integers(0, 5, size=(n, 2)).astype(float)
            labels = [str(v) for v in rng.choice(['faulty', 'healthy', 'other'], size=n)]
            queries = rng.integers(0, 5, size=(4, 2)).astype(float)
            k = int(rng.integers(1, n + 1))
            expected = [brute_knn(points.tolist(), labels, q.tolist(), k) for q in queries]
            self.assertEqual(knn_predict_many(points, labels, queries, k).tolist(), expected)

    def test_leave_one_out_matches_brute_force(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            n = int(rng.integers(3, 13))
            points = rng.integers(0, 5, size=(n, 2)).astype(float)
            labels = [str(v) for v in rng.choice(['faulty', 'healthy'], size=n)]
            table = loo_prediction_table(points, labels, n - 1)
            for k in range(1, n):
                expected = [brute_knn(points.tolist(), labels, points[i].tolist(), k, skip=i)
                            for i in range(n)]
                self.assertEqual(table[:, k - 1].tolist(), expected)

    def test_k_star_matches_brute_force(self):
        rng = np.random.default_rng(24)
        for _ in range(200):
            n = int(rng.integers(4, 13))
            points = rng.integers(0, 5, size=(n, 2)).astype(float)
            labels = ['healthy', 'faulty'] + [str(v) for v in rng.choice(['faulty', 'healthy'], size=n - 2)]
            k_max = int(rng.integers(1, n))
            errors = []
            for k in range(1, k_max + 1):
                predicted = [brute_knn(points.tolist(), labels, points[i].tolist(), k, skip=i)
                             for i in range(n)]
                errors.append(brute_error(predicted, labels))
            expected = errors.index(min(errors)) + 1
            self.assertEqual(select_k_star(points, labels, k_max), expected)

    def test_k_equal_to_n_is_the_majority(self):
        rng = np.random.default_rng(27)
        checked = 0
        while checked < 50:
            n = int(rng.integers(3, 30))
            labels = [str(v) for v in rng.choice(['faulty', 'healthy', 'other'], size=n)]
            (top, top_count), *rest = Counter(labels).most_common()
            if rest and rest[0][1] == top_count:
                continue
            points = rng.normal(size=(n, 2))
            self.assertEqual(knn_predict(points, labels, rng.normal(size=2), n), top)
            checked += 1

    def test_k_star_ignores_class_names_and_rigid_motion(self):
        rng = np.random.default_rng(28)
        rename = {'healthy': 'a-class', 'faulty': 'b-class'}
        for _ in range(20):
            n = int(rng.integers(10, 40))
            points = rng.normal(size=(n, 2))
            labels = ['healthy', 'faulty'] + [str(v) for v in rng.choice(['faulty', 'healthy'], size=n - 2)]
            angle = rng.uniform(0, 2 * np.pi)
            rotation = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
            moved = points @ rotation.T + rng.normal(size=2) * 100
            k_max = n - 1
            k_star = select_k_star(points, labels, k_max)
            self.assertEqual(select_k_star(points, [rename[v] for v in labels], k_max), k_star)
            self.assertEqual(select_k_star(moved, labels, k_max), k_star)

    def test_k_star_clamps_k_max(self):
        points = np.arange(10.0).reshape(5, 2)
        labels = ['healthy', 'healthy', 'faulty', 'faulty', 'faulty']
        _, errors = select_k_star(points, labels, 100, return_errors=True)
        self.assertEqual(errors.size, 4)

    def test_k_star_prefers_smallest_k(self):
        # Two far-apart pure clusters: every k up to the cluster size is perfect
        points = [[0, 0], [0, 1], [0, 2], [50, 0], [50, 1], [50, 2]]
        labels = ['healthy'] * 3 + ['faulty'] * 3
        self.assertEqual(select_k_star(points, labels, 2), 1)

    def test_reweighted_error(self):
        actual = ['healthy'] * 8 + ['faulty'] * 2
        predicted = ['healthy'] * 10
        self.assertAlmostEqual(reweighted_error(predicted, actual, Reweighting.NONE), 0.2)
        self.assertAlmostEqual(reweighted_error(predicted, actual), 0.5)

    def test_reweighted_error_empty(self):
        with self.assertRaises(InvalidArgumentError):
            reweighted_error([], [])


class MetricTests(SimpleTestCase):

    def test_accuracy(self):
        train = [[0, 0], [0, 1], [10, 0], [10, 1]]
        labels = ['healthy', 'healthy', 'faulty', 'faulty']
        self.assertEqual(classification_accuracy(train, labels, [[0, 0.5], [1, 0]], ['healthy'] * 2, 1), 1.0)
        self.assertEqual(classification_accuracy(train, labels, [[0, 0.5], [9, 0]], ['healthy'] * 2, 1), 0.5)

    def test_shuffled_labels_score_the_class_prior(self):
        rng = np.random.default_rng(29)
        train = rng.uniform(size=(2000, 2))
        labels = rng.permutation(['healthy'] * 1400 + ['faulty'] * 600)
        test = rng.uniform(size=(1000, 2))
        accuracy = classification_accuracy(train, labels, test, ['healthy'] * 1000, 1)
        self.assertAlmostEqual(accuracy, 0.7, delta=0.07)

    def test_separated_test_set_is_always_identified(self):
        train = [[x, y] for x in range(5) for y in range(4)]
        test = [[100, 100], [100, 101], [101, 100], [101, 101], [100.5, 100.5]]
        error = operating_condition_id_error(
            train, ['faulty'] * len(train), test, ['faulty'] * len(test), 3
        )
        self.assertEqual(error, 0.0)

    def test_interleaved_test_set_is_never_identified(self):
        train = [[x, y] for x in range(6) for y in range(6)]
        test = [[0.5, 0.5], [2.5, 2.5], [4.5, 0.5], [0.5, 4.5]]
        error = operating_condition_id_error(
            train, ['healthy'] * len(train), test, ['healthy'] * len(test), 1
        )
        self.assertEqual(error, 1.0)

    def test_other_class_rows_are_ignored(self):
        train = [[100, 100], [100, 101], [101, 100], [101, 101], [0, 0.5]]
        labels = ['healthy'] * 4 + ['faulty']
        # The faulty point sits between the two test points
        error = operating_condition_id_error(train, labels, [[0, 0], [0, 1]], ['healthy'] * 2, 1)
        self.assertEqual(error, 0.0)

    def test_mixed_test_classes(self):
        with self.assertRaises(InvalidSplitError):
            operating_condition_id_error([[0, 0]], ['healthy'], [[1, 1], [2, 2]], ['healthy', 'faulty'], 1)

    def test_no_same_class_training_rows(self):
        with self.assertRaises(InvalidSplitError):
            operating_condition_id_error([[0, 0], [1, 1]], ['healthy'] * 2, [[1, 1]], ['faulty'], 1)


def cell(bearing, speed, load, accuracy, ocid_error, label='healthy'):
    return CellResult(bearing, label, float(speed), float(load), accuracy, ocid_error, 3, 8, 100, 10)


def example_report(method='HARH', channel_set='A1+A2', seed=1, scale=1.0):
    cells = [
        cell(b, s, t, scale * (i + 1) / 20, scale * (j + 1) / 10)
        for i, b in enumerate(BEARINGS) for j, (s, t) in enumerate(HELD_OUT)
    ]
    return EvalReport(method, channel_set, seed, 'abc', 'inverse_class_frequency', cells)


class ReportTests(SimpleTestCase):

    def test_aggregate_weights_bearings_equally(self):
        cells = [cell('A', 1000, 0, 1.0, 0), cell('A', 2000, 0, 1.0, 0),
                 cell('A', 3000, 0, 1.0, 0), cell('B', 1000, 0, 0.0, 0)]
        self.assertEqual(aggregate(cells, 'accuracy'), 0.5)

    def test_aggregate_empty(self):
        with self.assertRaises(InvalidArgumentError):
            aggregate([], 'accuracy')

    def test_metric_table(self):
        report = example_report()
        table = report.metric_table('accuracy')
        self.assertEqual(list(table.index), ['2000', '3000', '4000', 'reweighted'])
        self.assertEqual(list(table.columns), BEARINGS + ['reweighted'])
        assert_allclose(table.loc['reweighted', 'AM-02'], 0.1)
        self.assertAlmostEqual(table.loc['reweighted', 'reweighted'], report.accuracy)

    def test_single_load_labels(self):
        cells = [cell('A', 1000, 0, 1.0, 0), cell('B', 2000, 0, 0.5, 0)]
        table = EvalReport('FFT', 'A1', 1, 'h', 'none', cells).metric_table('ocid_error')
        self.assertEqual(list(table.index), ['1000', '2000', 'reweighted'])

    def test_write(self):
        report = example_report()
        with tempfile.TemporaryDirectory() as tmp:
            run_dir = report.write(Path(tmp) / 'HARH_A1-A2')
            for name in ('accuracy.csv', 'ocid_error.csv', 'report.md', 'run_log.jsonl', 'summary.json'):
                self.assertTrue((run_dir / name).exists(), name)
            summary = load_summary(run_dir)
            lines = (run_dir / 'run_log.jsonl').read_text().splitlines()
            markdown = (run_dir / 'report.md').read_text()
        self.assertEqual(summary['n_cells'], 18)
        self.assertAlmostEqual(summary['accuracy'], report.accuracy)
        self.assertEqual(len(lines), 19)
        self.assertEqual(json.loads(lines[-1])['event'], 'aggregate')
        self.assertIn('Config hash: `abc`', markdown)

    def test_missing_summary(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaisesMessage(DataError, 'did eval finish'):
                load_summary(tmp)


class ComparisonTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def write_runs(self, seeds=None):
        dirs = []
        for i, method in enumerate(['HARH', 'HAR', 'HFFT', 'FFT']):
            for channel_set in ['A1', 'A2', 'A1+A2']:
                seed = (seeds or {}).get((method, channel_set), 1)
                report = example_report(method, channel_set, seed, scale=1 - i / 10)
                dirs.append(report.write(self.root / f"{method}_{channel_set.replace('+', '-')}"))
        return dirs

    def test_twelve_cell_table(self):
        dirs = self.write_runs()
        comparison = Comparison([load_summary(d) for d in dirs])
        table = comparison.table('accuracy')
        self.assertEqual(list(table.index), ['FFT', 'HFFT', 'HAR', 'HARH'])
        self.assertEqual(list(table.columns), ['A1', 'A2', 'A1+A2'])
        self.assertFalse(table.isna().any().any())
        self.assertFalse(comparison.mixed_seeds)

    def test_report_command(self):
        dirs = self.write_runs()
        out = io.StringIO()
        call_command('report', *[str(d) for d in dirs], pdf=True, stdout=out)
        self.assertTrue((self.root / 'comparison_accuracy.csv').exists())
        self.assertTrue((self.root / 'comparison.md').exists())
        self.assertEqual((self.root / 'comparison.pdf').read_bytes()[:4], b'%PDF')
        self.assertNotIn('WARNING', out.getvalue())

    def test_mixed_seeds_are_flagged(self):
        dirs = self.write_runs(seeds={('FFT', 'A1'): 2})
        out = io.StringIO()
        call_command('report', *[str(d) for d in dirs], out=str(self.root / 'cmp'), stdout=out)
        self.assertIn('different seeds (1, 2)', out.getvalue())
        self.assertIn('WARNING', (self.root / 'cmp' / 'comparison.md').read_text())

    def test_missing_run(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('report', str(self.root / 'nothing'), stdout=io.StringIO())
        self.assertEqual(ctx.exception.returncode, 3)


def run_pipeline(data_dir, out_dir, methods, **overrides):
    values = {'paths_data_dir': str(data_dir), 'paths_out_dir': str(out_dir)}
    values.update(overrides)
    config = load_run_config(overrides=values)
    synthesize(config)
    reports = {}
    for method in methods:
        scoped = config.with_method(method, 'A1+A2')
        FeatureService(scoped).run()
        reports[method] = EvaluationService(scoped).run()
    return config, reports


class EvaluationServiceTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.tmp = tempfile.TemporaryDirectory()
        root = Path(cls.tmp.name)
        cls.config, cls.reports = run_pipeline(
            root / 'data', root / 'runs', ['HARH', 'FFT'], synth_duration_s=0.5, workers=1,
        )

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()
        super().tearDownClass()

    def test_every_split_is_scored(self):
        report = self.reports['HARH']
        self.assertEqual(len(report.cells), 18)
        for c in report.cells:
            self.assertTrue(0.0 <= c.accuracy <= 1.0)
            self.assertTrue(0.0 <= c.ocid_error <= 1.0)
            self.assertTrue(1 <= c.k_star <= c.k_max)

    def test_k_max_is_smallest_bearing(self):
        matrix = FeatureService(self.config.with_method('HARH', 'A1+A2')).load()
        bearing_id = matrix.bearing_id.astype(str)
        rows = np.concatenate([np.flatnonzero(bearing_id == 'AM-01'), np.flatnonzero(bearing_id == 'F3-01')[:5]])
        self.assertEqual(k_max_for(matrix.subset(rows)), 5)

    def test_rerun_is_byte_identical(self):
        config = load_run_config(overrides={
            'paths_data_dir': str(self.config.data_dir),
            'paths_out_dir': str(self.config.out_dir),
            'synth_duration_s': 0.5,
            'workers': 4,
        }).with_method('HARH', 'A1+A2')
        self.assertEqual(config.config_hash, self.reports['HARH'].config_hash)

        service = EvaluationService(config)
        report = service.evaluate(FeatureService(config).load())
        first = service.run_dir
        with tempfile.TemporaryDirectory() as tmp:
            second = report.write(Path(tmp) / 'HARH_A1-A2')
            for name in ('accuracy.csv', 'ocid_error.csv', 'report.md', 'run_log.jsonl', 'summary.json'):
                self.assertEqual((first / name).read_bytes(), (second / name).read_bytes(), name)

    def test_eval_command(self):
        out = io.StringIO()
        call_command('eval', data=str(self.config.data_dir), out=str(self.config.out_dir),
                     method='FFT', channels='A1+A2', stdout=out)
        self.assertIn('FFT A1+A2: accuracy', out.getvalue())

    def test_eval_command_without_store(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('eval', out=str(self.config.out_dir), method='HAR', channels='A1',
                         stdout=io.StringIO())
        self.assertEqual(ctx.exception.returncode, 3)


class MethodComparisonTests(SimpleTestCase):
    """The full default dataset: condition-normalised envelope features against plain FFT."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.tmp = tempfile.TemporaryDirectory()
        root = Path(cls.tmp.name)
        _, cls.reports = run_pipeline(root / 'data', root / 'runs', ['HARH', 'FFT'])

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()
        super().tearDownClass()

    def test_harh_classifies_held_out_conditions(self):
        self.assertGreaterEqual(self.reports['HARH'].accuracy, 0.90)

    def test_harh_beats_fft(self):
        harh, fft = self.reports['HARH'], self.reports['FFT']
        self.assertGreaterEqual(harh.accuracy - fft.accuracy, 0.15)
        self.assertGreaterEqual(harh.ocid_error - fft.ocid_error, 0.15)
