"""Entrywise thresholding rules and the data-driven threshold matrices.

The three rules share the same contract on a scalar z at level lam >= 0:
they return 0 whenever |z| <= lam, and never move z by more than lam. The
hard rule uses a strict inequality |z| > lam so the boundary |z| = lam is
killed as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

from .errors import ValidationError
from .moments import MomentSet

RULE_NAMES = ("hard", "soft", "adaptive-lasso")


@dataclass(frozen=True)
class ThresholdRule:
    """A named thresholding rule; eta is used only by adaptive-lasso."""

    kind: str
    eta: float = 4.0

    def __post_init__(self):
        kind = self.kind.replace("_", "-").lower()
        if kind not in RULE_NAMES:
            raise ValidationError(
                f"unknown thresholding rule {self.kind!r}; choose from {RULE_NAMES}"
            )
        if self.eta < 1.0:
            raise ValidationError(f"adaptive-lasso exponent must be >= 1, got {self.eta}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "eta", float(self.eta))


@dataclass(frozen=True)
class ThresholdMatrix:
    """Per-entry nonnegative threshold levels and the constant tau they scale with."""

    values: np.ndarray
    tau: float

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if not np.all(np.isfinite(values)) or np.any(values < 0.0):
            raise ValidationError("threshold matrix entries must be finite and >= 0")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "tau", float(self.tau))


def apply_rule(rule: ThresholdRule, z, lam):
    """Apply a thresholding rule entrywise; z and lam may be scalars or
    broadcastable arrays. Zero input maps to zero for every rule."""
    z = np.asarray(z, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0.0):
        raise ValidationError("threshold level must be >= 0")
    if rule.kind == "hard":
        out = np.where(np.abs(z) > lam, z, 0.0)
    elif rule.kind == "soft":
        out = np.sign(z) * np.maximum(np.abs(z) - lam, 0.0)
    else:  # adaptive-lasso; 0/0 at z = 0 resolved to 0
        absz = np.abs(z)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            ratio = np.where(absz > 0.0, lam / np.where(absz > 0.0, absz, 1.0), np.inf)
            shrink = np.maximum(1.0 - ratio**rule.eta, 0.0)
        out = z * shrink
    if out.ndim == 0:
        return float(out)
    return out


def apply_threshold(m: np.ndarray, thresholds, rule: ThresholdRule) -> np.ndarray:
    """Threshold a matrix entrywise with per-entry levels."""
    m = np.asarray(m, dtype=float)
    values = thresholds.values if isinstance(thresholds, ThresholdMatrix) else np.asarray(thresholds, dtype=float)
    if m.shape != values.shape:
        raise ValidationError(
            f"matrix shape {m.shape} does not match threshold shape {values.shape}"
        )
    return apply_rule(rule, m, values)


def _log_dim(p: int) -> float:
    if p < 1:
        raise ValidationError(f"dimension must be >= 1, got {p}")
    return log(p)


def _corr_unit_term(m: MomentSet, p: int) -> np.ndarray:
    """Per-group term of the correlation threshold at tau = 1:
    sqrt(log p / n) * (sqrt(corr_noise_ij)
                       + |corr_ij| / 2 * (sqrt(corr_noise_ii) + sqrt(corr_noise_jj)))."""
    root_diag = np.sqrt(np.diag(m.corr_noise))
    base = np.sqrt(m.corr_noise) + 0.5 * np.abs(m.corr) * (
        root_diag[:, None] + root_diag[None, :]
    )
    return np.sqrt(_log_dim(p) / m.n) * base


def unit_diff_corr_thresholds(m1: MomentSet, m2: MomentSet, p: int | None = None) -> np.ndarray:
    """Thresholds for the correlation difference at tau = 1 (scale by tau)."""
    if m1.p != m2.p:
        raise ValidationError(f"moment sets disagree on dimension: {m1.p} vs {m2.p}")
    if p is None:
        p = m1.p
    return _corr_unit_term(m1, p) + _corr_unit_term(m2, p)


def diff_corr_thresholds(m1: MomentSet, m2: MomentSet, tau: float, p: int | None = None) -> ThresholdMatrix:
    """Per-entry threshold levels for the difference of two sample correlations."""
    _check_tau(tau)
    return ThresholdMatrix(tau * unit_diff_corr_thresholds(m1, m2, p), tau)


def unit_single_corr_thresholds(m: MomentSet, p: int | None = None) -> np.ndarray:
    if p is None:
        p = m.p
    return _corr_unit_term(m, p)


def single_corr_thresholds(m: MomentSet, tau: float, p: int | None = None) -> ThresholdMatrix:
    """Single-sample analogue of diff_corr_thresholds."""
    _check_tau(tau)
    return ThresholdMatrix(tau * unit_single_corr_thresholds(m, p), tau)


def unit_diff_cov_thresholds(m1: MomentSet, m2: MomentSet, p: int | None = None) -> np.ndarray:
    if m1.p != m2.p:
        raise ValidationError(f"moment sets disagree on dimension: {m1.p} vs {m2.p}")
    if p is None:
        p = m1.p
    logp = _log_dim(p)
    return np.sqrt(logp / m1.n * m1.cov_noise) + np.sqrt(logp / m2.n * m2.cov_noise)


def diff_cov_thresholds(m1: MomentSet, m2: MomentSet, tau: float, p: int | None = None) -> ThresholdMatrix:
    """Per-entry threshold levels for the difference of two sample covariances."""
    _check_tau(tau)
    return ThresholdMatrix(tau * unit_diff_cov_thresholds(m1, m2, p), tau)


def unit_cov_thresholds(m: MomentSet, p: int | None = None) -> np.ndarray:
    """Single-sample covariance thresholds at tau = 1: sqrt(cov_noise * log p / n)."""
    if p is None:
        p = m.p
    return np.sqrt(m.cov_noise * _log_dim(p) / m.n)


def _check_tau(tau: float) -> None:
    if not np.isfinite(tau) or tau < 0.0:
        raise ValidationError(f"tau must be finite and >= 0, got {tau}")
