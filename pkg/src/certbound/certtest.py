"""A working identity test with calibrated thresholds, plus an empirical
sample-complexity harness.

The test statistic mirrors the decomposition that governs optimal sample
complexity: a 2/3-power-weighted chi-square term over the bulk (the support
of the truncated core at tail parameter eps/16), an excess-count term over
the removed tail, and a deviation term on the removed largest outcome.
Thresholds are set by parametric calibration under the null (the certifier
has unlimited computational power, so resampling the target is allowed).

Behavior in the gap region 0 < ||P - Q||_1 <= eps is unspecified and the
tester may answer either way there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .distvec import ProbVec, l1_distance, truncated_core
from .errors import InvalidParameterError
from .rng import stream_rng

CALIBRATION_MARGIN = 0.05  # absorbs Monte-Carlo noise on top of the 2/3 target


@dataclass(frozen=True)
class TesterConfig:
    __test__ = False  # not a test case despite the name

    eps: float
    samples: int
    calibration_runs: int = 300
    threshold: float | None = None
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise InvalidParameterError("eps must be in (0, 1)")
        if self.samples < 1:
            raise InvalidParameterError("samples must be >= 1")
        if self.calibration_runs < 100:
            raise InvalidParameterError("calibration_runs must be >= 100")


@dataclass(frozen=True)
class TestVerdict:
    __test__ = False  # not a test case despite the name

    accept: bool
    statistic: float
    threshold: float
    samples_used: int


class CertificationTester:
    """Calibrated identity tester for a fixed target distribution and sample size."""

    def __init__(self, p: ProbVec, cfg: TesterConfig):
        if not p.normalized:
            raise InvalidParameterError("target distribution must be normalized")
        self.p = p
        self.cfg = cfg
        core = truncated_core(p, cfg.eps / 16.0)
        self.bulk = np.flatnonzero(core.entries > 0)
        self.max_index = int(np.argmax(p.entries))
        mask = np.ones(p.dim, dtype=bool)
        mask[self.bulk] = False
        mask[self.max_index] = False
        self.tail = np.flatnonzero(mask)
        self.tail_weight = float(p.entries[self.tail].sum())
        self._cdf = np.cumsum(p.entries)
        self._cdf[-1] = 1.0
        self._calibrate()

    # -- statistics ------------------------------------------------------

    def _components(self, counts: np.ndarray) -> np.ndarray:
        """Raw statistic components for a (trials, dim) count matrix."""
        counts = np.atleast_2d(counts).astype(np.float64)
        s = float(self.cfg.samples)
        p = self.p.entries
        if self.bulk.size:
            pb = p[self.bulk]
            xb = counts[:, self.bulk]
            bulk = np.sum(((xb - s * pb) ** 2 - xb) / pb ** (2.0 / 3.0), axis=1)
        else:
            bulk = np.zeros(counts.shape[0])
        tail = counts[:, self.tail].sum(axis=1) - s * self.tail_weight
        mx = np.abs(counts[:, self.max_index] - s * p[self.max_index])
        return np.column_stack([bulk, tail, mx])

    def _sample_counts(self, rng: np.random.Generator, trials: int) -> np.ndarray:
        u = rng.random((trials, self.cfg.samples))
        idx = np.searchsorted(self._cdf, u, side="right")
        offset = np.arange(trials)[:, None] * self.p.dim
        flat = (idx + offset).ravel()
        return np.bincount(flat, minlength=trials * self.p.dim).reshape(trials, self.p.dim)

    def _calibrate(self):
        rng = stream_rng(self.cfg.seed, 0xCA11B)
        comps = self._components(self._sample_counts(rng, self.cfg.calibration_runs))
        self._centers = np.median(comps, axis=0)
        hi = np.quantile(comps, 0.9, axis=0)
        self._scales = np.where(hi > self._centers, hi - self._centers, 1.0)
        combined = self._combined(comps)
        level = 2.0 / 3.0 + CALIBRATION_MARGIN
        self.threshold = float(np.quantile(combined, level))

    def _combined(self, comps: np.ndarray) -> np.ndarray:
        return np.max((comps - self._centers) / self._scales, axis=1)

    # -- public API ------------------------------------------------------

    def statistic(self, samples) -> float:
        samples = np.asarray(samples, dtype=np.int64)
        if samples.size and (samples.min() < 0 or samples.max() >= self.p.dim):
            raise InvalidParameterError("sample index out of range")
        if samples.size != self.cfg.samples:
            raise InvalidParameterError("sample count does not match the calibrated size")
        counts = np.bincount(samples, minlength=self.p.dim)
        return float(self._combined(self._components(counts))[0])

    def test(self, samples) -> TestVerdict:
        stat = self.statistic(samples)
        thr = self.cfg.threshold if self.cfg.threshold is not None else self.threshold
        return TestVerdict(accept=stat <= thr, statistic=stat, threshold=thr, samples_used=self.cfg.samples)

    def accept_rate(self, q: ProbVec, trials: int, stream: int) -> float:
        """Monte-Carlo acceptance rate on i.i.d. sample sets drawn from q."""
        if q.dim != self.p.dim:
            raise InvalidParameterError("dimension mismatch")
        rng = stream_rng(self.cfg.seed, 0x7E57, stream)
        cdf = np.cumsum(q.entries)
        cdf[-1] = 1.0
        u = rng.random((trials, self.cfg.samples))
        idx = np.searchsorted(cdf, u, side="right")
        offset = np.arange(trials)[:, None] * self.p.dim
        counts = np.bincount((idx + offset).ravel(), minlength=trials * self.p.dim).reshape(trials, self.p.dim)
        combined = self._combined(self._components(counts))
        thr = self.cfg.threshold if self.cfg.threshold is not None else self.threshold
        return float(np.mean(combined <= thr))


def calibrate_threshold(p: ProbVec, cfg: TesterConfig) -> float:
    """Empirical quantile of the null statistic giving acceptance >= 2/3 + margin."""
    return CertificationTester(p, cfg).threshold


def identity_test(p: ProbVec, samples, cfg: TesterConfig) -> TestVerdict:
    """Run the calibrated three-part test on one sequence of outcome indices."""
    return CertificationTester(p, cfg).test(samples)


# -- adversary library ----------------------------------------------------


def pairwise_shift_adversary(p: ProbVec, distance: float) -> ProbVec:
    """Move mass between consecutive index pairs until the l1 distance is reached."""
    q = p.entries.copy()
    remaining = distance / 2.0
    for i in range(0, p.dim - 1, 2):
        if remaining <= 0:
            break
        t = min(q[i], remaining)
        q[i] -= t
        q[i + 1] += t
        remaining -= t
    if remaining > 1e-12:
        raise InvalidParameterError("target distance not reachable by pairwise shifts")
    return ProbVec(q / q.sum())


def tail_deletion_adversary(p: ProbVec, distance: float) -> ProbVec:
    """Delete exactly distance/2 of weight from the smallest entries and renormalize."""
    w = distance / 2.0
    if w >= 1.0:
        raise InvalidParameterError("cannot delete a full unit of weight")
    q = p.entries.copy()
    order = np.argsort(q, kind="stable")
    remaining = w
    for i in order:
        if remaining <= 0:
            break
        if q[i] == 0:
            continue
        t = min(q[i], remaining)
        q[i] -= t
        remaining -= t
    if remaining > 1e-12:
        raise InvalidParameterError("target distance not reachable by tail deletion")
    return ProbVec(q / q.sum())


def max_inflation_adversary(p: ProbVec, distance: float) -> ProbVec:
    """Add distance/2 to the largest outcome, scaling all others down."""
    t = distance / 2.0
    q = p.entries.copy()
    imax = int(np.argmax(q))
    rest = q.sum() - q[imax]
    if t > rest:
        raise InvalidParameterError("target distance not reachable by max inflation")
    scale = (rest - t) / rest
    q *= scale
    q[imax] = p.entries[imax] + t
    return ProbVec(q / q.sum())


ADVERSARIES = {
    "pairwise_shift": pairwise_shift_adversary,
    "tail_deletion": tail_deletion_adversary,
    "max_inflation": max_inflation_adversary,
}


def empirical_sample_complexity(
    p: ProbVec,
    adversary: ProbVec,
    cfg: TesterConfig,
    trials: int = 300,
    s_start: int = 8,
    s_max: int = 1 << 20,
    refine_steps: int = 3,
) -> int:
    """Smallest sample size (up to refinement granularity) at which the calibrated
    test is simultaneously complete (accept rate >= 2/3 on the target) and sound
    (accept rate < 1/3 on the adversary), each estimated from `trials` runs.
    """
    if trials < 300:
        raise InvalidParameterError("need at least 300 trials per point")
    if l1_distance(p, adversary) <= cfg.eps:
        raise InvalidParameterError("adversary not eps-far from the target")

    def passes(s: int) -> bool:
        tester = CertificationTester(p, replace(cfg, samples=s, threshold=None))
        if tester.accept_rate(p, trials, stream=1) < 2.0 / 3.0:
            return False
        return tester.accept_rate(adversary, trials, stream=2) < 1.0 / 3.0

    s = s_start
    while not passes(s):
        s *= 2
        if s > s_max:
            raise InvalidParameterError(f"no passing sample size found below {s_max}")
    lo, hi = s // 2, s
    for _ in range(refine_steps):
        if hi - lo <= 1:
            break
        mid = (lo + hi) // 2
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return hi
