"""Method-comparison agreement analysis.

The classic difference-vs-mean analysis assumes the two measurement methods
have equal precision. When they do not, the plot acquires a spurious trend:
the difference correlates with the mean purely because the noisier method
dominates both. This module implements the fix of plotting differences
against an inverse-variance weighted average of the two methods, alongside
the classic analysis, within-subject variance estimation from replicates,
and the closed-form covariance predictor that quantifies the artifact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .numerics import (
    DegenerateDataError,
    RegressionFit,
    linear_fit,
    mean,
    variance,
)

__all__ = [
    "Direction",
    "AxisKind",
    "PairedSample",
    "ReplicateRecord",
    "ReplicatedSample",
    "WithinSubjectVariance",
    "WeightPair",
    "AgreementResult",
    "LOA_MULTIPLIER",
    "within_subject_variance",
    "estimate_variances",
    "paired_from_replicates",
    "weighted_average",
    "predicted_covariance",
    "general_covariance_identity",
    "analyze",
]

#: Limits of agreement are bias +- this multiple of the difference SD.
LOA_MULTIPLIER = 1.96

METHOD_LABELS = ("A", "B")


class Direction(Enum):
    """Orientation of the plotted difference."""

    A_MINUS_B = "a-b"
    B_MINUS_A = "b-a"


class AxisKind(Enum):
    """What goes on the horizontal axis."""

    ARITHMETIC_MEAN = "mean"
    WEIGHTED_AVERAGE = "weighted"


def _coerce(enum_cls, value):
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(repr(m.value) for m in enum_cls)
        raise ValueError(f"expected one of {allowed}, got {value!r}") from None


@dataclass(frozen=True)
class PairedSample:
    """Per-subject measurement pairs from methods A and B."""

    a: np.ndarray
    b: np.ndarray
    subject_ids: tuple[str, ...] = ()

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.ndim != 1 or b.ndim != 1:
            raise ValueError("measurements must be one-dimensional")
        if a.size != b.size:
            raise ValueError(f"length mismatch: {a.size} vs {b.size} measurements")
        if a.size < 3:
            raise ValueError(f"need at least 3 subjects, got {a.size}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("measurements contain non-finite values")
        ids = tuple(self.subject_ids) or tuple(str(i + 1) for i in range(a.size))
        if len(ids) != a.size:
            raise ValueError(f"{len(ids)} subject ids for {a.size} measurement pairs")
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate subject ids")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "subject_ids", ids)

    @property
    def n(self) -> int:
        return self.a.size


@dataclass(frozen=True)
class ReplicateRecord:
    subject_id: str
    method: str
    replicate: int
    value: float


@dataclass(frozen=True)
class ReplicatedSample:
    """Long-format replicate measurements for within-subject variance work.

    Every (subject, method) group must hold at least two replicates and both
    methods must cover the same subjects.
    """

    records: tuple[ReplicateRecord, ...]

    def __post_init__(self):
        records = tuple(self.records)
        if not records:
            raise ValueError("no replicate records")
        by_method_subject: dict[str, dict[str, list[float]]] = {m: {} for m in METHOD_LABELS}
        order: list[str] = []
        for rec in records:
            if rec.method not in METHOD_LABELS:
                raise ValueError(
                    f"unknown method label {rec.method!r}; expected one of {METHOD_LABELS}"
                )
            v = float(rec.value)
            if not np.isfinite(v):
                raise ValueError(f"non-finite value for subject {rec.subject_id!r}")
            if rec.subject_id not in by_method_subject["A"] and rec.subject_id not in by_method_subject["B"]:
                order.append(rec.subject_id)
            by_method_subject[rec.method].setdefault(rec.subject_id, []).append(v)
        subjects_a = set(by_method_subject["A"])
        subjects_b = set(by_method_subject["B"])
        if subjects_a != subjects_b:
            odd = sorted(subjects_a.symmetric_difference(subjects_b))
            raise ValueError(f"subjects not covered by both methods: {odd}")
        for method in METHOD_LABELS:
            for subject, values in by_method_subject[method].items():
                if len(values) < 2:
                    raise ValueError(
                        f"subject {subject!r} has {len(values)} replicate(s) for "
                        f"method {method}; need at least 2"
                    )
        object.__setattr__(self, "records", records)
        object.__setattr__(self, "_groups", by_method_subject)
        object.__setattr__(self, "_subjects", tuple(order))

    @property
    def subjects(self) -> tuple[str, ...]:
        return self._subjects

    def values(self, subject_id: str, method: str) -> np.ndarray:
        return np.asarray(self._groups[method][subject_id], dtype=float)


@dataclass(frozen=True)
class WithinSubjectVariance:
    """Within-subject (measurement-error) variances of the two methods."""

    s_wa2: float
    s_wb2: float

    def __post_init__(self):
        if self.s_wa2 < 0.0 or self.s_wb2 < 0.0:
            raise ValueError("within-subject variances must be nonnegative")
        if self.s_wa2 == 0.0 and self.s_wb2 == 0.0:
            raise ValueError("degenerate weights: both within-subject variances are zero")


@dataclass(frozen=True)
class WeightPair:
    """Weights (alpha on method A, beta on method B) for a weighted average."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha < 0.0 or self.beta < 0.0:
            raise ValueError("weights must be nonnegative")
        if self.alpha + self.beta <= 0.0:
            raise ValueError("degenerate weights: alpha + beta must be positive")

    @classmethod
    def from_variances(cls, v: WithinSubjectVariance) -> "WeightPair":
        """Inverse-variance weights: each method weighted by the other's variance."""
        return cls(alpha=v.s_wb2, beta=v.s_wa2)


@dataclass(frozen=True)
class AgreementResult:
    """Bias, limits of agreement and trend fit of a difference plot."""

    direction: Direction
    axis: AxisKind
    weights: WeightPair | None
    bias: float
    loa_low: float
    loa_high: float
    fit: RegressionFit
    axis_values: np.ndarray = field(repr=False)
    differences: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.axis_values.size

    @property
    def points(self) -> np.ndarray:
        """(n, 2) array of (axis value, difference) pairs."""
        return np.column_stack([self.axis_values, self.differences])


def within_subject_variance(reps: ReplicatedSample, method: str) -> float:
    """Pooled within-subject variance of one method.

    Per-subject squared deviations from the subject's own replicate mean are
    summed and divided by the pooled degrees of freedom sum(m_i - 1).
    """
    if method not in METHOD_LABELS:
        raise ValueError(f"unknown method label {method!r}; expected one of {METHOD_LABELS}")
    ss = 0.0
    dof = 0
    for subject in reps.subjects:
        values = reps.values(subject, method)
        if values.size < 2:
            raise ValueError(f"subject {subject!r} has fewer than 2 replicates")
        ss += float(np.sum((values - values.mean()) ** 2))
        dof += values.size - 1
    return ss / dof


def estimate_variances(reps: ReplicatedSample) -> WithinSubjectVariance:
    """Pooled within-subject variances for both methods."""
    return WithinSubjectVariance(
        s_wa2=within_subject_variance(reps, "A"),
        s_wb2=within_subject_variance(reps, "B"),
    )


def paired_from_replicates(reps: ReplicatedSample) -> PairedSample:
    """Collapse replicates to one pair per subject using replicate means."""
    a = np.array([reps.values(s, "A").mean() for s in reps.subjects])
    b = np.array([reps.values(s, "B").mean() for s in reps.subjects])
    return PairedSample(a=a, b=b, subject_ids=reps.subjects)


def weighted_average(a, b, v: WithinSubjectVariance):
    """Inverse-variance weighted average of paired measurements.

    Each method is weighted by the *other* method's within-subject variance:
    (s_wb2 * a + s_wa2 * b) / (s_wa2 + s_wb2). With equal variances this is
    the arithmetic mean; with one variance zero it returns the error-free
    method's values unchanged. Scaling both variances by a common positive
    factor leaves the result unchanged. Accepts scalars or arrays.
    """
    return (v.s_wb2 * np.asarray(a) + v.s_wa2 * np.asarray(b)) / (v.s_wa2 + v.s_wb2)


def predicted_covariance(
    w: WeightPair,
    v: WithinSubjectVariance,
    direction: Direction | str = Direction.A_MINUS_B,
) -> float:
    """Covariance between the difference and a weighted average when the
    true difference does not depend on the magnitude of measurement.

    For direction a-b this is (alpha * s_wa2 - beta * s_wb2) / (alpha + beta);
    the sign flips for b-a. Choosing alpha = s_wb2 and beta = s_wa2 makes it
    vanish, which is exactly the weighted-axis construction. With alpha = 0
    the axis collapses to method B and the value becomes -s_wb2.
    """
    direction = _coerce(Direction, direction)
    value = (w.alpha * v.s_wa2 - w.beta * v.s_wb2) / (w.alpha + w.beta)
    return value if direction is Direction.A_MINUS_B else -value


def general_covariance_identity(
    w: WeightPair, var_a: float, var_b: float, cov_ab: float
) -> float:
    """cov(A - B, (alpha*A + beta*B)/(alpha + beta)) from raw moments.

    Pure algebra, valid for any joint distribution:
    (alpha*var_a - beta*var_b + (beta - alpha)*cov_ab) / (alpha + beta).
    """
    if var_a < 0.0 or var_b < 0.0:
        raise ValueError("variances must be nonnegative")
    return (w.alpha * var_a - w.beta * var_b + (w.beta - w.alpha) * cov_ab) / (
        w.alpha + w.beta
    )


def analyze(
    sample: PairedSample,
    *,
    axis: AxisKind | str = AxisKind.ARITHMETIC_MEAN,
    direction: Direction | str = Direction.B_MINUS_A,
    confidence: float = 0.95,
    variances: WithinSubjectVariance | None = None,
) -> AgreementResult:
    """Run the difference-plot analysis on a paired sample.

    Parameters
    ----------
    sample:
        Paired measurements from methods A and B.
    axis:
        ``"mean"`` for the classic difference-vs-mean analysis, or
        ``"weighted"`` to plot against the inverse-variance weighted
        average (requires ``variances``).
    direction:
        ``"b-a"`` (default) or ``"a-b"``; which way the difference is taken.
    confidence:
        Confidence level for the trend-slope interval.
    variances:
        Within-subject variances used to build the weighted axis. They may
        come from :func:`estimate_variances` or from external knowledge of
        the methods' precisions.

    Returns
    -------
    AgreementResult
        Bias, limits of agreement at ``bias +- 1.96 * sd(difference)``, the
        trend fit of the differences on the axis values, and the plotted
        points.
    """
    axis = _coerce(AxisKind, axis)
    direction = _coerce(Direction, direction)
    a, b = sample.a, sample.b

    if direction is Direction.A_MINUS_B:
        diffs = a - b
    else:
        diffs = b - a

    if axis is AxisKind.WEIGHTED_AVERAGE:
        if variances is None:
            raise ValueError("weighted-average axis requires within-subject variances")
        axis_values = weighted_average(a, b, variances)
        weights = WeightPair.from_variances(variances)
    else:
        axis_values = (a + b) / 2.0
        weights = None

    if variance(axis_values) <= 0.0:
        raise DegenerateDataError("axis values are constant; nothing to plot against")

    bias = mean(diffs)
    sd = float(np.sqrt(variance(diffs)))
    fit = linear_fit(axis_values, diffs, confidence=confidence)
    return AgreementResult(
        direction=direction,
        axis=axis,
        weights=weights,
        bias=bias,
        loa_low=bias - LOA_MULTIPLIER * sd,
        loa_high=bias + LOA_MULTIPLIER * sd,
        fit=fit,
        axis_values=axis_values,
        differences=diffs,
    )
