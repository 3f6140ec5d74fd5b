"""Thresholding estimators of differential correlation and covariance
structure, the comparison baselines, and per-variable support ranking.

Every estimator accepts a fixed thresholding constant tau; passing tau=None
selects it by cross-validation (see crossval). Diagonal conventions:

- the correlation-difference estimate has an exactly zero diagonal,
- a single thresholded correlation matrix keeps its unit diagonal,
- covariance thresholding never thresholds the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .crossval import CvConfig, CvResult, cv_select_tau, cv_select_tau_single
from .dataset import SampleMatrix, TwoGroupDataset
from .errors import DegenerateVariableError, ValidationError
from .moments import moment_set, sample_correlation
from .thresholding import (
    ThresholdMatrix,
    ThresholdRule,
    apply_rule,
    apply_threshold,
    diff_corr_thresholds,
    diff_cov_thresholds,
    single_corr_thresholds,
    unit_cov_thresholds,
)

DEFAULT_RULE = ThresholdRule("adaptive-lasso", 4.0)


@dataclass(frozen=True)
class DifferentialEstimate:
    """A thresholded matrix estimate plus the thresholds that produced it.

    thresholds is None for baselines assembled from separately thresholded
    per-group matrices, where no single threshold matrix applies. tau is the
    constant used, or a per-group pair for those baselines.
    """

    estimate: np.ndarray
    thresholds: ThresholdMatrix | None
    tau: float | tuple[float, float] | None
    rule: ThresholdRule | None
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    cv: CvResult | tuple[CvResult, CvResult] | None = None

    def __post_init__(self):
        est = np.array(self.estimate, dtype=float)
        if est.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValidationError(
                f"estimate shape {est.shape} does not match labels"
            )
        est.flags.writeable = False
        object.__setattr__(self, "estimate", est)

    @property
    def is_square(self) -> bool:
        return self.row_labels == self.col_labels

    @property
    def support_count(self) -> np.ndarray:
        """Per-row count of nonzero entries, excluding the diagonal when square.
        Thresholded entries are literal zeros, so an exact comparison is used."""
        nonzero = self.estimate != 0.0
        if self.is_square:
            nonzero = nonzero.copy()
            np.fill_diagonal(nonzero, False)
        return nonzero.sum(axis=1)

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.estimate))


def _resolve(rule: ThresholdRule | None, cv: CvConfig | None) -> tuple[ThresholdRule, CvConfig]:
    rule = rule or DEFAULT_RULE
    cfg = replace(cv or CvConfig(), rule=rule)
    return rule, cfg


def estimate_diff_corr(
    ds: TwoGroupDataset,
    tau: float | None = None,
    rule: ThresholdRule | None = None,
    cv: CvConfig | None = None,
) -> DifferentialEstimate:
    """Adaptive entrywise thresholding of the sample correlation difference.

    The per-entry threshold is the sum over groups of
    tau * sqrt(log p / n_t) * (sqrt(corr_noise) + |corr|/2 * (diagonal noise terms)).
    """
    rule, cfg = _resolve(rule, cv)
    cv_result = None
    if tau is None:
        cv_result = cv_select_tau(ds, cfg, "diff-corr")
        tau = cv_result.tau_hat
    m1, m2 = moment_set(ds.group1), moment_set(ds.group2)
    thresholds = diff_corr_thresholds(m1, m2, tau)
    estimate = apply_threshold(m1.corr - m2.corr, thresholds, rule)
    return DifferentialEstimate(
        estimate, thresholds, tau, rule, ds.names, ds.names, cv_result
    )


def estimate_single_corr(
    x: SampleMatrix,
    tau: float | None = None,
    rule: ThresholdRule | None = None,
    cv: CvConfig | None = None,
) -> DifferentialEstimate:
    """Thresholding estimate of a single sparse correlation matrix; the unit
    diagonal is kept as is."""
    rule, cfg = _resolve(rule, cv)
    cv_result = None
    if tau is None:
        cv_result = cv_select_tau_single(x, cfg, "single-corr")
        tau = cv_result.tau_hat
    m = moment_set(x)
    thresholds = single_corr_thresholds(m, tau)
    estimate = apply_threshold(m.corr, thresholds, rule)
    np.fill_diagonal(estimate, 1.0)
    return DifferentialEstimate(
        estimate, thresholds, tau, rule, x.names, x.names, cv_result
    )


def estimate_diff_cov(
    ds: TwoGroupDataset,
    tau: float | None = None,
    rule: ThresholdRule | None = None,
    cv: CvConfig | None = None,
) -> DifferentialEstimate:
    """Adaptive entrywise thresholding of the sample covariance difference."""
    rule, cfg = _resolve(rule, cv)
    cv_result = None
    if tau is None:
        cv_result = cv_select_tau(ds, cfg, "diff-cov")
        tau = cv_result.tau_hat
    m1, m2 = moment_set(ds.group1), moment_set(ds.group2)
    thresholds = diff_cov_thresholds(m1, m2, tau)
    estimate = apply_threshold(m1.cov - m2.cov, thresholds, rule)
    return DifferentialEstimate(
        estimate, thresholds, tau, rule, ds.names, ds.names, cv_result
    )


def estimate_cross_corr(
    ds: TwoGroupDataset,
    split: int,
    tau: float | None = None,
    rule: ThresholdRule | None = None,
    cv: CvConfig | None = None,
) -> DifferentialEstimate:
    """Thresholded cross block of the correlation difference: variables
    [0, split) against [split, p). Equals the corresponding block of
    estimate_diff_corr for the same tau."""
    if not (1 <= split < ds.p):
        raise ValidationError(
            f"split must lie in [1, {ds.p - 1}], got {split}"
        )
    rule, cfg = _resolve(rule, cv)
    cv_result = None
    if tau is None:
        cv_result = cv_select_tau(ds, cfg, "cross-corr", split=split)
        tau = cv_result.tau_hat
    m1, m2 = moment_set(ds.group1), moment_set(ds.group2)
    full = diff_corr_thresholds(m1, m2, tau)
    block = ThresholdMatrix(full.values[:split, split:], tau)
    raw = (m1.corr - m2.corr)[:split, split:]
    estimate = apply_threshold(raw, block, rule)
    return DifferentialEstimate(
        estimate, block, tau, rule, ds.names[:split], ds.names[split:], cv_result
    )


def _thresholded_correlation_via_cov(
    x: SampleMatrix, tau: float | None, rule: ThresholdRule, cfg: CvConfig
) -> tuple[np.ndarray, float, CvResult | None]:
    """Threshold the sample covariance (diagonal exempt), then normalize."""
    cv_result = None
    if tau is None:
        cv_result = cv_select_tau_single(x, cfg, "cov-threshold")
        tau = cv_result.tau_hat
    m = moment_set(x)
    cov_star = apply_rule(rule, m.cov, tau * unit_cov_thresholds(m))
    np.fill_diagonal(cov_star, np.diag(m.cov))
    bad = np.flatnonzero(np.diag(cov_star) <= 0.0)
    if bad.size:
        raise DegenerateVariableError(int(bad[0]), x.names[int(bad[0])])
    return sample_correlation(cov_star), tau, cv_result


def baseline_cov_then_normalize(
    ds: TwoGroupDataset,
    tau: float | None = None,
    rule: ThresholdRule | None = None,
    cv: CvConfig | None = None,
) -> DifferentialEstimate:
    """Baseline: threshold each group's covariance adaptively, normalize each
    to a correlation matrix, and take the difference. With tau=None each group
    selects its own constant by cross-validation."""
    rule, cfg = _resolve(rule, cv)
    r1, tau1, cv1 = _thresholded_correlation_via_cov(ds.group1, tau, rule, cfg)
    r2, tau2, cv2 = _thresholded_correlation_via_cov(ds.group2, tau, rule, cfg)
    taus = tau1 if tau is not None else (tau1, tau2)
    cv_res = None if tau is not None else (cv1, cv2)
    return DifferentialEstimate(r1 - r2, None, taus, rule, ds.names, ds.names, cv_res)


def baseline_separate_corr(
    ds: TwoGroupDataset,
    tau: float | None = None,
    rule: ThresholdRule | None = None,
    cv: CvConfig | None = None,
) -> DifferentialEstimate:
    """Baseline: threshold each group's correlation matrix separately and take
    the difference."""
    rule, _ = _resolve(rule, cv)
    e1 = estimate_single_corr(ds.group1, tau, rule, cv)
    e2 = estimate_single_corr(ds.group2, tau, rule, cv)
    taus = tau if tau is not None else (e1.tau, e2.tau)
    cv_res = None if tau is not None else (e1.cv, e2.cv)
    return DifferentialEstimate(
        e1.estimate - e2.estimate, None, taus, rule, ds.names, ds.names, cv_res
    )


def baseline_sample_difference(ds: TwoGroupDataset) -> DifferentialEstimate:
    """Baseline: the raw difference of the sample correlation matrices."""
    m1, m2 = moment_set(ds.group1), moment_set(ds.group2)
    zeros = ThresholdMatrix(np.zeros((ds.p, ds.p)), 0.0)
    return DifferentialEstimate(
        m1.corr - m2.corr, zeros, 0.0, None, ds.names, ds.names, None
    )


def support_ranking(est: DifferentialEstimate) -> list[tuple[str, int]]:
    """Rank variables by the number of nonzero off-diagonal entries in their
    row of a square estimate; ties keep the original variable order."""
    if not est.is_square:
        raise ValidationError("support ranking needs a square estimate")
    counts = est.support_count
    order = sorted(range(len(counts)), key=lambda i: (-int(counts[i]), i))
    return [(est.row_labels[i], int(counts[i])) for i in order]
