"""Wald tests of the ten causality/asymmetry hypotheses.

The catalog covers, for a two-variable system: individual no-causality nulls
for each signed direction, their joint versions, equality of the positive and
negative causal parameters (symmetry), and the fully joint variants.  Each
null is a set of linear restrictions on the stacked coefficient vector,
tested with the quadratic-form statistic against a chi-square reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SingularityError
from .sure import CoefficientEstimate, LayoutEntry

HYPOTHESIS_IDS = tuple(f"H{i}" for i in range(1, 11))


@dataclass(frozen=True)
class HypothesisSpec:
    """A testable null: restriction matrix over the coefficient layout."""

    id: str
    restriction: np.ndarray  # q x K matrix of 0/+1/-1 entries
    dof: int
    label: str
    null: str = ""  # human-readable form of the restrictions

    def __post_init__(self):
        r = np.asarray(self.restriction, dtype=float)
        if r.ndim != 2:
            raise ValueError("restriction must be a matrix")
        if r.shape[0] != self.dof:
            raise ValueError("dof must equal the restriction row count")
        if np.linalg.matrix_rank(r) != r.shape[0]:
            raise ValueError(f"{self.id}: restriction matrix is not full row rank")
        object.__setattr__(self, "restriction", r)


@dataclass(frozen=True)
class WaldResult:
    statistic: float
    dof: int
    p_value: float
    hypothesis: HypothesisSpec
    estimate_provenance: str


def _gamma_p_series(a: float, x: float, eps: float = 1e-15, max_iter: int = 800) -> float:
    """Lower regularized incomplete gamma P(a, x) by its power series."""
    term = 1.0 / a
    total = term
    denom = a
    for _ in range(max_iter):
        denom += 1.0
        term *= x / denom
        total += term
        if abs(term) < abs(total) * eps:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_contfrac(a: float, x: float, eps: float = 1e-15, max_iter: int = 800) -> float:
    """Upper regularized incomplete gamma Q(a, x) by modified Lentz continued fraction."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0.0 else 1.0 / tiny
    h = d
    for i in range(1, max_iter + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def chisq_sf(x: float, q: int) -> float:
    """Survival function P(chi2_q > x) via the regularized incomplete gamma."""
    if q < 1 or int(q) != q:
        raise ValueError("degrees of freedom must be a positive integer")
    if not np.isfinite(x) or x < 0:
        raise ValueError("statistic must be finite and nonnegative")
    if x == 0.0:
        return 1.0
    a = q / 2.0
    half = x / 2.0
    if half < a + 1.0:
        p = 1.0 - _gamma_p_series(a, half)
    else:
        p = _gamma_q_contfrac(a, half)
    return float(min(1.0, max(0.0, p)))


def _causal_entries(
    layout: Sequence[LayoutEntry], eq_var: int, sign: str
) -> list[tuple[int, LayoutEntry]]:
    """Positions of the restricted cross-variable lag coefficients.

    eq_var is the equation's variable; the causal regressor is the other one.
    """
    reg_var = 2 if eq_var == 1 else 1
    found = [
        (k, entry)
        for k, entry in enumerate(layout)
        if entry.eq_var == eq_var
        and entry.eq_sign == sign
        and entry.reg_var == reg_var
        and entry.restricted
    ]
    if not found:
        raise ValueError(
            f"layout has no restricted lag of variable {reg_var} in the "
            f"{sign} equation of variable {eq_var}; is this a 2-variable system?"
        )
    return found


def _zero_rows(
    entries: list[tuple[int, LayoutEntry]], k_total: int, collapse: bool
) -> tuple[np.ndarray, list[str]]:
    if collapse:
        row = np.zeros((1, k_total))
        for pos, _ in entries:
            row[0, pos] = 1.0
        text = " + ".join(entry.name for _, entry in entries) + " = 0"
        return row, [text]
    rows = np.zeros((len(entries), k_total))
    texts = []
    for i, (pos, entry) in enumerate(entries):
        rows[i, pos] = 1.0
        texts.append(f"{entry.name} = 0")
    return rows, texts


def _difference_row(
    plus: list[tuple[int, LayoutEntry]],
    minus: list[tuple[int, LayoutEntry]],
    k_total: int,
) -> tuple[np.ndarray, list[str]]:
    row = np.zeros((1, k_total))
    for pos, _ in plus:
        row[0, pos] = 1.0
    for pos, _ in minus:
        row[0, pos] = -1.0
    text = (
        " + ".join(e.name for _, e in plus)
        + " - "
        + " - ".join(e.name for _, e in minus)
        + " = 0"
    )
    return row, [text]


def _labels(v1: str, v2: str) -> dict[str, str]:
    return {
        "H1": f"A rising {v2} does not cause a rising {v1}.",
        "H2": f"A falling {v2} does not cause a falling {v1}.",
        "H3": f"Neither rising nor falling {v2} causes rising or falling {v1}.",
        "H4": f"The impact of rising and falling {v2} on {v1} is the same "
        "(symmetric causality).",
        "H5": f"A rising {v1} does not cause a rising {v2}.",
        "H6": f"A falling {v1} does not cause a falling {v2}.",
        "H7": f"Neither rising nor falling {v1} causes rising or falling {v2}.",
        "H8": f"The impact of rising and falling {v1} on {v2} is the same "
        "(symmetric causality).",
        "H9": f"{v1} and {v2} are not causing each other for either rising "
        "or falling components.",
        "H10": f"The joint causal impacts of {v1} and {v2} on each other are "
        "symmetric.",
    }


def restriction_for(
    hypothesis_id: str,
    layout: Sequence[LayoutEntry],
    variable_names: Sequence[str] | None = None,
    sum_restrictions: bool = False,
) -> HypothesisSpec:
    """Build the restriction matrix for one catalog hypothesis.

    With sum_restrictions=False (default) each no-causality null zeroes every
    restricted lag coefficient individually; with True it restricts only the
    sum across lags, one row per coefficient group.  The symmetry nulls (H4,
    H8, H10) always compare sums, which stays well defined when the positive
    and negative lag orders differ.
    """
    if hypothesis_id not in HYPOTHESIS_IDS:
        raise ValueError(f"unknown hypothesis id {hypothesis_id!r}")
    layout = tuple(layout)
    k_total = len(layout)
    v1, v2 = "variable 1", "variable 2"
    if variable_names:
        v1 = variable_names[0] or v1
        if len(variable_names) > 1:
            v2 = variable_names[1] or v2
    labels = _labels(v1, v2)

    beta_plus = _causal_entries(layout, 1, "+")
    beta_minus = _causal_entries(layout, 1, "-")
    gamma_plus = _causal_entries(layout, 2, "+")
    gamma_minus = _causal_entries(layout, 2, "-")

    blocks: list[tuple[np.ndarray, list[str]]] = []
    if hypothesis_id in ("H1", "H3", "H9"):
        blocks.append(_zero_rows(beta_plus, k_total, sum_restrictions))
    if hypothesis_id in ("H2", "H3", "H9"):
        blocks.append(_zero_rows(beta_minus, k_total, sum_restrictions))
    if hypothesis_id in ("H5", "H7", "H9"):
        blocks.append(_zero_rows(gamma_plus, k_total, sum_restrictions))
    if hypothesis_id in ("H6", "H7", "H9"):
        blocks.append(_zero_rows(gamma_minus, k_total, sum_restrictions))
    if hypothesis_id in ("H4", "H10"):
        blocks.append(_difference_row(beta_plus, beta_minus, k_total))
    if hypothesis_id in ("H8", "H10"):
        blocks.append(_difference_row(gamma_plus, gamma_minus, k_total))

    restriction = np.vstack([rows for rows, _ in blocks])
    null = " and ".join(text for _, texts in blocks for text in texts)
    return HypothesisSpec(
        id=hypothesis_id,
        restriction=restriction,
        dof=restriction.shape[0],
        label=labels[hypothesis_id],
        null=null,
    )


def wald_test(estimate: CoefficientEstimate, spec: HypothesisSpec) -> WaldResult:
    """Quadratic-form test of R c = 0 with chi-square reference distribution."""
    r = spec.restriction
    c = estimate.coefficients
    if r.shape[1] != c.size:
        raise ValueError(
            f"{spec.id}: restriction has {r.shape[1]} columns for "
            f"{c.size} coefficients"
        )
    rc = r @ c
    s = r @ estimate.covariance @ r.T
    s = (s + s.T) / 2.0
    try:
        chol = np.linalg.cholesky(s)
    except np.linalg.LinAlgError:
        raise SingularityError(
            f"{spec.id}: R Var(C) R' is not positive definite "
            "(degenerate restriction set)"
        ) from None
    half = np.linalg.solve(chol, rc)
    statistic = float(half @ half)
    return WaldResult(
        statistic=statistic,
        dof=spec.dof,
        p_value=chisq_sf(statistic, spec.dof),
        hypothesis=spec,
        estimate_provenance=estimate.estimator,
    )


def run_catalog(
    estimate: CoefficientEstimate,
    layout: Sequence[LayoutEntry],
    variable_names: Sequence[str] | None = None,
    sum_restrictions: bool = False,
) -> list[WaldResult]:
    """All ten hypotheses in catalog order."""
    return [
        wald_test(
            estimate,
            restriction_for(hid, layout, variable_names, sum_restrictions),
        )
        for hid in HYPOTHESIS_IDS
    ]
