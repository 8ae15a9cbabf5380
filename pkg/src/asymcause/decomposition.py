"""Signed cumulative-sum decomposition of integrated series.

An integrated series with drift/trend is split into a positive and a negative
component: each component carries half of the deterministic part and the
initial value, plus the running sum of the positive (resp. negative) fitted
innovations.  The two components add back to the original series exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DataError, SingularityError

DETERMINISTIC_KINDS = ("none", "drift", "drift_and_trend")


@dataclass(frozen=True)
class DeterministicSpec:
    """Which deterministic terms the increments carry.

    kind is one of "none" (pure random walk), "drift" (constant increment
    mean) or "drift_and_trend" (increment mean linear in t).
    """

    kind: str = "drift"

    def __post_init__(self):
        if self.kind not in DETERMINISTIC_KINDS:
            raise ValueError(
                f"unknown deterministic kind {self.kind!r}; "
                f"expected one of {DETERMINISTIC_KINDS}"
            )


@dataclass(frozen=True)
class Series:
    """A raw observed time series.

    values are levels (possibly already log-transformed by the caller);
    timestamps are opaque ordered labels used only for reporting.
    """

    values: np.ndarray
    timestamps: Optional[tuple[str, ...]] = None
    name: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise DataError(f"series {self.name!r}: values must be one-dimensional")
        if values.size < 3:
            raise DataError(
                f"series {self.name!r}: need at least 3 observations, got {values.size}"
            )
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise DataError(f"series {self.name!r}: non-finite value at index {bad}")
        object.__setattr__(self, "values", values)
        if self.timestamps is not None:
            stamps = tuple(self.timestamps)
            if len(stamps) != values.size:
                raise DataError(
                    f"series {self.name!r}: {len(stamps)} timestamps for "
                    f"{values.size} values"
                )
            object.__setattr__(self, "timestamps", stamps)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class SignedComponents:
    """Positive/negative partial cumulative sums of one variable.

    positive[t] and negative[t] are defined at every observation index,
    including t=0 where both equal initial_value/2 (empty partial sum).
    innovations_pos/innovations_neg have one entry per increment (length
    len(positive) - 1).
    """

    positive: np.ndarray
    negative: np.ndarray
    innovations_pos: np.ndarray
    innovations_neg: np.ndarray
    fitted_drift: float
    fitted_trend: float
    initial_value: float
    name: str = ""
    degenerate_warning: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        pos = np.asarray(self.positive, dtype=float)
        neg = np.asarray(self.negative, dtype=float)
        e_pos = np.asarray(self.innovations_pos, dtype=float)
        e_neg = np.asarray(self.innovations_neg, dtype=float)
        if pos.shape != neg.shape or pos.ndim != 1:
            raise DataError("positive/negative components must be 1-d and equal length")
        if e_pos.shape != e_neg.shape or e_pos.size != pos.size - 1:
            raise DataError("innovation vectors must have one entry per increment")
        if np.any(e_pos < 0) or np.any(e_neg > 0):
            raise DataError("signed innovations violate their sign constraint")
        if np.any(e_pos * e_neg != 0):
            raise DataError("positive and negative innovations must not overlap")
        for attr, arr in (
            ("positive", pos),
            ("negative", neg),
            ("innovations_pos", e_pos),
            ("innovations_neg", e_neg),
        ):
            object.__setattr__(self, attr, arr)

    def __len__(self) -> int:
        return self.positive.size


def fit_deterministic(series: Series, spec: DeterministicSpec) -> tuple[float, float]:
    """Estimate the drift and trend coefficients of the increments.

    Returns (drift, trend).  kind="none" fixes both at zero; "drift" uses the
    mean first difference; "drift_and_trend" regresses the first differences
    on a constant and the time index t = 1..T by least squares.
    """
    diffs = np.diff(series.values)
    if spec.kind == "none":
        return 0.0, 0.0
    if spec.kind == "drift":
        return float(diffs.mean()), 0.0
    # drift_and_trend
    if np.ptp(series.values) == 0.0:
        raise SingularityError(
            f"series {series.name!r}: constant series, trend fit is rank-deficient"
        )
    t = np.arange(1, diffs.size + 1, dtype=float)
    design = np.column_stack([np.ones_like(t), t])
    coef, *_ = np.linalg.lstsq(design, diffs, rcond=None)
    return float(coef[0]), float(coef[1])


def _deterministic_half(
    n: int, drift: float, trend: float, initial_value: float
) -> np.ndarray:
    t = np.arange(n, dtype=float)
    return (drift * t + trend * t * (t + 1.0) / 2.0 + initial_value) / 2.0


def decompose(series: Series, spec: DeterministicSpec) -> SignedComponents:
    """Split a series into its positive and negative partial cumulative sums.

    Fitted innovations e_t = dZ_t - drift - trend*t are separated into their
    nonnegative and nonpositive parts; each component is half the
    deterministic path plus the running sum of one signed part.
    """
    drift, trend = fit_deterministic(series, spec)
    values = series.values
    t = np.arange(1, values.size, dtype=float)
    innovations = np.diff(values) - drift - trend * t
    e_pos = np.maximum(innovations, 0.0)
    e_neg = np.minimum(innovations, 0.0)

    half = _deterministic_half(values.size, drift, trend, float(values[0]))
    positive = half.copy()
    positive[1:] += np.cumsum(e_pos)
    negative = half.copy()
    negative[1:] += np.cumsum(e_neg)

    warning = None
    if not np.any(e_pos > 0):
        warning = (
            f"series {series.name!r}: no positive innovations; the positive "
            "component has zero stochastic variation"
        )
    elif not np.any(e_neg < 0):
        warning = (
            f"series {series.name!r}: no negative innovations; the negative "
            "component has zero stochastic variation"
        )

    return SignedComponents(
        positive=positive,
        negative=negative,
        innovations_pos=e_pos,
        innovations_neg=e_neg,
        fitted_drift=drift,
        fitted_trend=trend,
        initial_value=float(values[0]),
        name=series.name,
        degenerate_warning=warning,
    )


def recompose(components: SignedComponents) -> np.ndarray:
    """Elementwise sum of the two components; recovers the original series."""
    if components.positive.shape != components.negative.shape:
        raise DataError("component length mismatch")
    return components.positive + components.negative
