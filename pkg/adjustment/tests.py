import io
import tempfile
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from adjustment.regression import (
    MONOMIAL_NAMES,
    AdjustmentModel,
    adjust_matrix,
    apply_adjustment,
    fit_adjustment,
    make_condition_monomials,
)
from adjustment.services import AdjustmentRun, AdjustmentService, condition_mask
from core.exceptions import DataError, IllConditionedDesignError, InvalidArgumentError
from core.run_config import load_run_config
from features.matrix import FeatureMatrix, read_store, write_store

CELLS = [
    (1000, 0), (2000, 0), (3000, 0), (4000, 0), (5000, 0), (6000, 0),
    (2000, 5), (3000, 5), (4000, 5),
    (1000, 10), (3000, 10), (5000, 10),
    (2000, 20), (4000, 20), (6000, 20),
]


def random_conditions(rng, n):
    cells = np.array(CELLS, dtype=float)
    picked = cells[rng.integers(0, len(cells), size=n)]
    return picked[:, 0] / 60.0, picked[:, 1]


def trend_matrix(rng, bearings, m=5, offsets=None, noise=0.01):
    """Rows over CELLS whose features follow a known quadratic trend."""
    true = rng.normal(size=(m, 6))
    base = rng.normal(size=m) * 10
    offsets = offsets or {}
    rows, meta = [], []
    for bearing, label in bearings:
        for speed, load in CELLS:
            for seg in range(2):
                x = make_condition_monomials([speed / 60.0], [load])[0]
                rows.append(base + offsets.get(bearing, 0.0) + true[:, 1:] @ x[1:]
                            + noise * rng.normal(size=m))
                meta.append((bearing, label, speed, load, seg))
    bearing_id, label, speed, load, seg = zip(*meta)
    matrix = FeatureMatrix(
        values=np.array(rows),
        bearing_id=np.array(bearing_id, dtype=object),
        label=np.array(label, dtype=object),
        speed_rpm=speed,
        load_nm=load,
        run=np.ones(len(rows), dtype=int),
        segment=np.array(seg),
        columns=tuple(f"h{j + 1}" for j in range(m)),
    )
    return matrix, true, base


class MonomialTests(SimpleTestCase):

    def test_values(self):
        assert_array_equal(make_condition_monomials([50.0], [10.0]), [[1, 50, 10, 2500, 500, 100]])
        assert_array_equal(make_condition_monomials([0.0], [0.0]), [[1, 0, 0, 0, 0, 0]])

    def test_length_mismatch(self):
        with self.assertRaises(InvalidArgumentError):
            make_condition_monomials([1.0, 2.0], [1.0])

    def test_non_finite(self):
        with self.assertRaises(InvalidArgumentError):
            make_condition_monomials([np.nan], [1.0])


class FitTests(SimpleTestCase):

    def test_recovers_noiseless_trend(self):
        rng = np.random.default_rng(3)
        fo, to = random_conditions(rng, 60)
        true = rng.normal(size=(4, 6))
        H = make_condition_monomials(fo, to) @ true.T
        model = fit_adjustment(H, fo, to)
        assert_allclose(model.coeffs[:, 1:], true[:, 1:], rtol=1e-6, atol=1e-9)
        assert_array_equal(model.coeffs[:, 0], 0.0)

    def test_matches_normal_equations(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            fo, to = random_conditions(rng, 80)
            H = rng.normal(size=(80, 7)) * 5
            X = make_condition_monomials(fo, to)
            scale = np.abs(X).max(axis=0)
            Xs = X / scale
            oracle = (np.linalg.solve(Xs.T @ Xs, Xs.T @ H) / scale[:, None]).T
            oracle[:, 0] = 0.0
            model = fit_adjustment(H, fo, to)
            assert_allclose(model.coeffs, oracle, rtol=1e-8, atol=1e-10)

    def test_adjusted_healthy_rows_keep_their_level(self):
        rng = np.random.default_rng(5)
        fo, to = random_conditions(rng, 50)
        true = rng.normal(size=(3, 6))
        H = make_condition_monomials(fo, to) @ true.T
        adjusted = apply_adjustment(H, fo, to, fit_adjustment(H, fo, to))
        assert_allclose(adjusted, np.tile(true[:, 0], (50, 1)), atol=1e-8)

    def test_same_condition_differences_survive(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            fo, to = random_conditions(rng, 40)
            H = rng.normal(size=(40, 4)) * 20
            model = fit_adjustment(H, fo, to)
            i = int(rng.integers(40))
            j = int(rng.integers(40))
            fo[j], to[j] = fo[i], to[i]
            adjusted = apply_adjustment(H, fo, to, model)
            assert_allclose(adjusted[i] - adjusted[j], H[i] - H[j], atol=1e-9)

    def test_added_offsets_pass_through(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            fo, to = random_conditions(rng, 30)
            H = rng.normal(size=(30, 3)) * 20
            delta = rng.normal(size=(30, 3))
            model = fit_adjustment(H, fo, to)
            shifted = apply_adjustment(H + delta, fo, to, model) - apply_adjustment(H, fo, to, model)
            assert_allclose(shifted, delta, rtol=0, atol=1e-12)

    def test_adjustment_shrinks_healthy_variance(self):
        rng = np.random.default_rng(15)
        fo, to = random_conditions(rng, 3000)
        sigma = 0.5
        true = rng.normal(size=(4, 6)) * 20
        H = make_condition_monomials(fo, to) @ true.T + sigma * rng.normal(size=(3000, 4))
        adjusted = apply_adjustment(H, fo, to, fit_adjustment(H, fo, to))
        self.assertTrue(np.all(adjusted.var(axis=0) <= H.var(axis=0)))
        self.assertTrue(np.all(adjusted.var(axis=0) <= 1.1 * sigma ** 2))

    def test_refit_on_adjusted_rows_finds_no_trend(self):
        rng = np.random.default_rng(16)
        fo, to = random_conditions(rng, 200)
        H = make_condition_monomials(fo, to) @ rng.normal(size=(3, 6)).T + rng.normal(size=(200, 3))
        first = fit_adjustment(H, fo, to)
        again = fit_adjustment(apply_adjustment(H, fo, to, first), fo, to)
        self.assertLessEqual(np.linalg.norm(again.coeffs), 1e-6 * np.linalg.norm(first.coeffs))

    def test_single_load_names_missing_monomials(self):
        fo = np.repeat([1000, 2000, 3000, 4000], 3) / 60.0
        to = np.zeros_like(fo)
        with self.assertRaises(IllConditionedDesignError) as ctx:
            fit_adjustment(np.ones((fo.size, 2)), fo, to)
        self.assertEqual(set(ctx.exception.monomials), {'b', 'ab', 'b^2'})
        self.assertIn('b^2', str(ctx.exception))

    def test_two_speeds_is_rank_deficient(self):
        fo = np.repeat([1000, 2000], 6) / 60.0
        to = np.tile([0, 5, 10], 4).astype(float)
        with self.assertRaises(IllConditionedDesignError):
            fit_adjustment(np.ones((fo.size, 2)), fo, to)

    def test_too_few_rows(self):
        with self.assertRaises(IllConditionedDesignError) as ctx:
            fit_adjustment(np.ones((4, 2)), [10, 20, 30, 40], [0, 5, 10, 20])
        self.assertEqual(ctx.exception.monomials, MONOMIAL_NAMES[4:])

    def test_apply_shape_mismatch(self):
        with self.assertRaises(InvalidArgumentError):
            apply_adjustment(np.ones((3, 4)), [1, 2, 3], [0, 0, 0], AdjustmentModel.zeros(5))

    def test_zero_model_is_identity(self):
        H = np.arange(12.0).reshape(3, 4)
        assert_array_equal(apply_adjustment(H, [1, 2, 3], [0, 1, 2], AdjustmentModel.zeros(4)), H)


class ModelFileTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.path = Path(self.tmp.name) / 'models' / 'HARH.adj'

    def test_save_and_load_exactly(self):
        rng = np.random.default_rng(7)
        coeffs = rng.normal(size=(6, 6)) * 10.0 ** rng.integers(-8, 8, size=(6, 6))
        model = AdjustmentModel(coeffs, trained_on='abc123', healthy_only=False)
        loaded = AdjustmentModel.load(model.save(self.path))
        assert_array_equal(loaded.coeffs, coeffs)
        self.assertEqual(loaded.trained_on, 'abc123')
        self.assertFalse(loaded.healthy_only)

    def test_header(self):
        AdjustmentModel.zeros(2).save(self.path)
        first = self.path.read_text().splitlines()[0]
        self.assertEqual(
            first,
            '# harmspace-adjustment m=2 monomials=1,a,b,a^2,ab,b^2 trained_on= healthy_only=true',
        )

    def test_bad_header(self):
        self.path.parent.mkdir(parents=True)
        self.path.write_text('0 0 0 0 0 0\n')
        with self.assertRaisesMessage(DataError, 'bad header'):
            AdjustmentModel.load(self.path)

    def test_wrong_row_count(self):
        AdjustmentModel.zeros(3).save(self.path)
        lines = self.path.read_text().splitlines()
        self.path.write_text('\n'.join(lines[:-1]) + '\n')
        with self.assertRaises(DataError):
            AdjustmentModel.load(self.path)

    def test_missing_file(self):
        with self.assertRaises(DataError):
            AdjustmentModel.load(self.path)


class AdjustmentServiceTests(SimpleTestCase):

    bearings = [('AM-01', 'healthy'), ('AM-02', 'healthy'), ('F3-01', 'faulty')]

    def test_faulty_rows_stay_out_of_the_fit(self):
        rng = np.random.default_rng(8)
        matrix, _, _ = trend_matrix(rng, self.bearings, offsets={'F3-01': 6.0}, noise=0.0)
        model = AdjustmentService().fit(matrix)
        self.assertTrue(model.healthy_only)

        adjusted = adjust_matrix(matrix, model)
        healthy = adjusted.values[matrix.is_healthy]
        faulty = adjusted.values[~matrix.is_healthy]
        # Trend gone, fault offset kept
        assert_allclose(healthy.std(axis=0), 0.0, atol=1e-8)
        assert_allclose(faulty.mean(axis=0) - healthy.mean(axis=0), 6.0, atol=1e-8)

    def test_mixed_training_is_flagged(self):
        rng = np.random.default_rng(9)
        matrix, _, _ = trend_matrix(rng, self.bearings, offsets={'F3-01': 6.0})
        model = AdjustmentService(allow_mixed_training=True).fit(matrix)
        self.assertFalse(model.healthy_only)

    def test_faulty_only_training_is_refused(self):
        rng = np.random.default_rng(10)
        matrix, _, _ = trend_matrix(rng, [('F3-01', 'faulty'), ('F5-01', 'faulty')])
        for mixed in (False, True):
            with self.subTest(mixed=mixed):
                with self.assertRaisesMessage(DataError, 'no healthy rows'):
                    AdjustmentService(allow_mixed_training=mixed).fit(matrix)

    def test_condition_mask(self):
        rng = np.random.default_rng(11)
        matrix, _, _ = trend_matrix(rng, self.bearings[:1])
        mask = condition_mask(matrix, [(2000, 5), (3000, 5)])
        self.assertEqual(mask.sum(), 4)
        self.assertTrue(np.all(matrix.load_nm[mask] == 5))


class AdjustCommandTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.out = Path(self.tmp.name)
        self.matrix, _, _ = trend_matrix(
            np.random.default_rng(12),
            [('AM-01', 'healthy'), ('AM-02', 'healthy'), ('F3-01', 'faulty')],
        )
        write_store(self.matrix, self.out / 'features' / 'HARH_A1-A2.csv')

    def test_held_out_conditions_and_bearings_leave_training(self):
        config = load_run_config(overrides={'paths_out_dir': str(self.out)})
        train = AdjustmentRun(config, exclude_bearings=['AM-02']).select_training(self.matrix)
        self.assertNotIn('AM-02', set(train.bearing_id))
        self.assertFalse(condition_mask(train, config.eval.test_conditions).any())

    def test_adjust_command_writes_model_and_store(self):
        out = io.StringIO()
        call_command('adjust', out=str(self.out), stdout=out)
        model = AdjustmentModel.load(self.out / 'features' / 'models' / 'HARH_A1-A2.adj')
        self.assertTrue(model.healthy_only)
        self.assertEqual(len(model.trained_on), 64)

        adjusted = read_store(self.out / 'features' / 'adjusted' / 'HARH_A1-A2.csv')
        self.assertEqual(adjusted.n_rows, self.matrix.n_rows)
        assert_array_equal(adjusted.bearing_id, self.matrix.bearing_id)
        self.assertIn('Wrote model', out.getvalue())

    def test_saved_model(self):
        path = AdjustmentModel.zeros(5).save(self.out / 'zero.adj')
        call_command('adjust', out=str(self.out), model=str(path), stdout=io.StringIO())
        adjusted = read_store(self.out / 'features' / 'adjusted' / 'HARH_A1-A2.csv')
        assert_allclose(adjusted.values, self.matrix.values)

    def test_missing_store(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('adjust', out=str(self.out), method='HAR', stdout=io.StringIO())
        self.assertEqual(ctx.exception.returncode, 3)
