"""
Train/test splits keyed on bearing and operating condition.

A split tests one bearing at one held-out condition. Its training side
holds no row of that bearing and no row at any held-out condition.
"""
from dataclasses import dataclass

import numpy as np

from core.exceptions import InvalidSplitError


@dataclass(frozen=True, eq=False)
class SplitPlan:
    test_bearing: str
    test_condition: tuple
    train_rows: np.ndarray
    test_rows: np.ndarray

    @property
    def key(self):
        return (self.test_bearing, self.test_condition)

    @property
    def label(self):
        speed, load = self.test_condition
        return f"{self.test_bearing} @ {speed:g} RPM / {load:g} Nm"


def condition_rows(speed_rpm, load_nm, condition):
    speed, load = condition
    return np.isclose(speed_rpm, speed) & np.isclose(load_nm, load)


def make_splits(rows, test_conditions):
    """
    One SplitPlan per (bearing, held-out condition).

    Args:
        rows: Anything with ``bearing_id``, ``speed_rpm`` and ``load_nm``
            columns, such as a FeatureMatrix or a manifest DataFrame
        test_conditions: (rpm, Nm) pairs held out from training

    Raises:
        InvalidSplitError: Fewer than two bearings, a held-out condition
            absent from the data, or an empty side in any split
    """
    bearing_id = np.asarray(rows.bearing_id, dtype=str)
    speed_rpm = np.asarray(rows.speed_rpm, dtype=float)
    load_nm = np.asarray(rows.load_nm, dtype=float)

    bearings = sorted(set(bearing_id.tolist()))
    if len(bearings) < 2:
        raise InvalidSplitError(
            f"Need at least two bearings to split, found {len(bearings)}"
        )
    if not test_conditions:
        raise InvalidSplitError("No held-out test conditions configured")

    held_out = np.zeros(bearing_id.size, dtype=bool)
    at_condition = {}
    for condition in test_conditions:
        condition = (float(condition[0]), float(condition[1]))
        mask = condition_rows(speed_rpm, load_nm, condition)
        if not mask.any():
            raise InvalidSplitError(
                f"Held-out condition {condition[0]:g} RPM / {condition[1]:g} Nm is not in the data"
            )
        at_condition[condition] = mask
        held_out |= mask

    plans = []
    for bearing in bearings:
        of_bearing = bearing_id == bearing
        train_rows = np.flatnonzero(~of_bearing & ~held_out)
        for condition, mask in at_condition.items():
            plan = SplitPlan(
                test_bearing=bearing,
                test_condition=condition,
                train_rows=train_rows,
                test_rows=np.flatnonzero(of_bearing & mask),
            )
            if plan.train_rows.size == 0:
                raise InvalidSplitError(f"Split {plan.label} has no training rows")
            if plan.test_rows.size == 0:
                raise InvalidSplitError(f"Split {plan.label} has no test rows")
            plans.append(plan)
    return plans
