"""
The evaluation protocol over one feature store.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from adjustment.regression import adjust_matrix
from adjustment.services import AdjustmentService
from core.models import ChannelSet, Method
from evaluation.metrics import classification_accuracy, operating_condition_id_error
from evaluation.neighbors import select_k_star
from evaluation.projection import fit_projection, project
from evaluation.reports import CellResult, EvalReport
from evaluation.splits import make_splits
from features.matrix import ROLE_TEST, ROLE_TRAIN, read_store, store_filename

logger = logging.getLogger(__name__)


def k_max_for(train):
    """Smallest per-bearing row count in the training set, capped at n - 1."""
    _, counts = np.unique(np.asarray(train.bearing_id, dtype=str), return_counts=True)
    return max(1, min(int(counts.min()), train.n_rows - 1))


class EvaluationService:
    """
    Splits, (adjusts), projects, picks k* and scores every split.

    Splits run in parallel; each one builds its own adjustment model and
    projection from its training rows and shares nothing with the others.
    """

    def __init__(self, config, allow_mixed_training=False):
        self.config = config
        self.adjustment = AdjustmentService(allow_mixed_training)

    @property
    def method(self):
        return Method(self.config.method)

    @property
    def store_path(self):
        return self.config.features_dir / store_filename(self.config.method, self.config.channel_set)

    @property
    def run_dir(self):
        return Path(self.config.out_dir) / f"{self.config.method}_{ChannelSet(self.config.channel_set).file_slug}"

    def evaluate_split(self, matrix, plan):
        train = matrix.subset(plan.train_rows, role=ROLE_TRAIN)
        test = matrix.subset(plan.test_rows, role=ROLE_TEST)

        if self.method.is_harmonic:
            model = self.adjustment.fit(train)
            train = adjust_matrix(train, model)
            test = adjust_matrix(test, model)

        projection = fit_projection(train, self.config.eval.pca_components)
        train_pts = project(projection, train)
        test_pts = project(projection, test)

        k_max = k_max_for(train)
        k_star = select_k_star(train_pts, train.label, k_max, self.config.eval.reweighting)

        accuracy = classification_accuracy(train_pts, train.label, test_pts, test.label, k_star)
        ocid_error = operating_condition_id_error(train_pts, train.label, test_pts, test.label, k_star)

        logger.debug(
            f"{plan.label}: k*={k_star}/{k_max} accuracy={accuracy:.3f} ocid={ocid_error:.3f}"
        )
        return CellResult(
            bearing_id=plan.test_bearing,
            label=str(test.label[0]),
            speed_rpm=float(plan.test_condition[0]),
            load_nm=float(plan.test_condition[1]),
            accuracy=accuracy,
            ocid_error=ocid_error,
            k_star=k_star,
            k_max=k_max,
            n_train=int(train.n_rows),
            n_test=int(test.n_rows),
        )

    def evaluate(self, matrix):
        plans = make_splits(matrix, self.config.eval.test_conditions)
        logger.info(
            f"Evaluating {self.config.method} ({self.config.channel_set}) over {len(plans)} splits"
        )
        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            cells = list(pool.map(lambda plan: self.evaluate_split(matrix, plan), plans))

        return EvalReport(
            method=self.config.method,
            channel_set=self.config.channel_set,
            seed=self.config.seed,
            config_hash=self.config.config_hash,
            reweighting=self.config.eval.reweighting,
            cells=cells,
        )

    def run(self):
        matrix = read_store(self.store_path)
        report = self.evaluate(matrix)
        report.write(self.run_dir)
        return report
