import csv
import logging

import numpy as np

logger = logging.getLogger(__name__)


class SimulationException(Exception):
    pass


class GridResolutionException(SimulationException):
    pass


class ConvergenceException(SimulationException):

    def __init__(self, message, residuals):
        super().__init__(message)
        self.residuals = residuals


class AnnealSchedule:
    """s(t) ramps to s_p, holds for t_p, then ramps to 1 in total t_a + t_p.

    A(s) and B(s) are tabulated on [0, 1] and linearly interpolated; the
    default table is A = 1 - s, B = s. Times are in microseconds.
    """

    def __init__(self, t_a=1.0, s_p=None, t_p=0.0, table=None):
        if t_a <= 0:
            raise SimulationException("Anneal time must be positive")
        if t_p < 0:
            raise SimulationException("Pause duration cannot be negative")
        if s_p is not None and not 0 <= s_p <= 1:
            raise SimulationException("Pause location must lie in [0, 1]")
        self.t_a = float(t_a)
        self.s_p = s_p
        self.t_p = float(t_p) if s_p is not None else 0.0
        if table is None:
            table = ([0.0, 1.0], [1.0, 0.0], [0.0, 1.0])
        self.s_table, self.a_table, self.b_table = (
            np.asarray(column, dtype=float) for column in table)
        self._check_table()

    def _check_table(self):
        s = self.s_table
        if len(s) < 2 or s[0] != 0.0 or s[-1] != 1.0 or np.any(np.diff(s) <= 0):
            raise SimulationException(
                "Schedule table must cover [0, 1] with increasing s")
        if np.any(np.diff(self.a_table) > 0) or np.any(np.diff(self.b_table) < 0):
            raise SimulationException("A(s) must decrease and B(s) increase")

    @property
    def total_time(self) -> float:
        return self.t_a + self.t_p

    def A(self, s):
        return np.interp(s, self.s_table, self.a_table)

    def B(self, s):
        return np.interp(s, self.s_table, self.b_table)

    def s_of_t(self, t):
        t = np.asarray(t, dtype=float)
        if self.s_p is None:
            return np.clip(t / self.t_a, 0.0, 1.0)
        ramp_end = self.s_p * self.t_a
        s = np.where(t <= ramp_end, t / self.t_a,
                     np.where(t <= ramp_end + self.t_p, self.s_p,
                              (t - self.t_p) / self.t_a))
        return np.clip(s, 0.0, 1.0)

    def with_pause(self, s_p, t_p) -> 'AnnealSchedule':
        return AnnealSchedule(self.t_a, s_p, t_p,
                              (self.s_table, self.a_table, self.b_table))

    def describe(self):
        return {'t_a': self.t_a, 's_p': self.s_p, 't_p': self.t_p}

    def __repr__(self):
        return "<AnnealSchedule t_a={t_a} s_p={s_p} t_p={t_p}>".format(
            **self.describe())


def open_schedule(path, t_a=1.0, s_p=None, t_p=0.0) -> AnnealSchedule:
    """Load a CSV with columns s, A, B."""
    try:
        with open(path, 'r', newline='') as schedule_file:
            rows = list(csv.DictReader(schedule_file))
        table = ([float(row['s']) for row in rows],
                 [float(row['A']) for row in rows],
                 [float(row['B']) for row in rows])
    except (OSError, KeyError, ValueError) as error:
        raise SimulationException(
            "Cannot read schedule {path}: {error}".format(path=path, error=error))
    logger.debug("Loaded %d schedule points from %s", len(rows), path)
    return AnnealSchedule(t_a, s_p, t_p, table)
