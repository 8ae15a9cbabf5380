"""Block seemingly-unrelated-regression system for signed components.

Positive components are regressed only on lagged positive components and
negative components only on lagged negative ones (the zero blocks of the
system matrix), with an intercept per equation.  Unit roots are handled by
appending extra unrestricted lags; estimation is per-equation OLS or iterated
feasible GLS exploiting the cross-equation error covariance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .decomposition import SignedComponents
from .errors import InsufficientDataError, NotPositiveDefiniteError, SingularityError

CRITERIA = ("aic", "sbc", "hq")
ESTIMATORS = ("ols", "fgls", "garch_t_ml")


def _slope_symbol(eq_var: int) -> str:
    # Variable 1's equations carry beta coefficients, variable 2's gamma;
    # higher dimensions get a generic theta<i>.
    if eq_var == 1:
        return "beta"
    if eq_var == 2:
        return "gamma"
    return f"theta{eq_var}"


@dataclass(frozen=True)
class LayoutEntry:
    """One coefficient slot: which equation, which regressor, which lag."""

    name: str
    equation: int  # 0-based equation index
    eq_var: int  # 1-based variable of the dependent component
    eq_sign: str  # "+" or "-"
    reg_var: int | None  # 1-based regressor variable, None for the intercept
    lag: int  # 0 for the intercept
    restricted: bool  # True for lags 1..P, False for intercept and extra lags

    @property
    def is_intercept(self) -> bool:
        return self.reg_var is None


@dataclass(frozen=True)
class SureSystem:
    """Stacked block design: regressand and design matrix per equation."""

    regressands: tuple[np.ndarray, ...]
    regressors: tuple[np.ndarray, ...]
    layout: tuple[LayoutEntry, ...]
    lag_orders: tuple[int, int]
    extra_lags: int
    effective_sample: int
    variable_names: tuple[str, ...] = ()

    def __post_init__(self):
        ys = tuple(np.asarray(y, dtype=float) for y in self.regressands)
        xs = tuple(np.asarray(x, dtype=float) for x in self.regressors)
        if len(ys) != len(xs):
            raise ValueError("regressands and regressors count mismatch")
        for i, (y, x) in enumerate(zip(ys, xs)):
            if y.shape != (self.effective_sample,):
                raise ValueError(f"equation {i}: regressand length != effective sample")
            if x.shape[0] != self.effective_sample:
                raise ValueError(f"equation {i}: design rows != effective sample")
        if sum(x.shape[1] for x in xs) != len(self.layout):
            raise ValueError("layout size does not match total coefficient count")
        object.__setattr__(self, "regressands", ys)
        object.__setattr__(self, "regressors", xs)
        object.__setattr__(self, "layout", tuple(self.layout))

    @property
    def n_equations(self) -> int:
        return len(self.regressands)

    @property
    def n_coefficients(self) -> int:
        return len(self.layout)

    def coefficient_slices(self) -> list[slice]:
        """Slice of the stacked coefficient vector belonging to each equation."""
        out, start = [], 0
        for x in self.regressors:
            out.append(slice(start, start + x.shape[1]))
            start += x.shape[1]
        return out

    def equation_labels(self) -> list[str]:
        labels = []
        for i in range(self.n_equations):
            entry = next(e for e in self.layout if e.equation == i)
            name = ""
            if self.variable_names and entry.eq_var <= len(self.variable_names):
                name = f" ({self.variable_names[entry.eq_var - 1]})"
            labels.append(f"Z{entry.eq_sign}{entry.eq_var}{name}")
        return labels


@dataclass(frozen=True)
class CoefficientEstimate:
    """Stacked coefficient vector with its covariance and residual moments."""

    coefficients: np.ndarray
    covariance: np.ndarray
    omega: np.ndarray
    residuals: tuple[np.ndarray, ...]
    estimator: str
    iterations: int = 1
    converged: bool = True

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=float)
        cov = np.asarray(self.covariance, dtype=float)
        omega = np.asarray(self.omega, dtype=float)
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"unknown estimator tag {self.estimator!r}")
        if cov.shape != (coef.size, coef.size):
            raise ValueError("covariance shape does not match coefficient count")
        if omega.shape != (len(self.residuals), len(self.residuals)):
            raise ValueError("omega shape does not match equation count")
        object.__setattr__(self, "coefficients", coef)
        object.__setattr__(self, "covariance", (cov + cov.T) / 2.0)
        object.__setattr__(self, "omega", (omega + omega.T) / 2.0)
        object.__setattr__(
            self,
            "residuals",
            tuple(np.asarray(r, dtype=float) for r in self.residuals),
        )


def build_design(
    components: Sequence[SignedComponents],
    p_pos: int,
    p_neg: int,
    extra_lags: int = 1,
) -> SureSystem:
    """Assemble the 2m-equation block system from m decomposed variables.

    Equations 1..m regress each positive component on lags 1..p_pos+extra_lags
    of all positive components; equations m+1..2m do the same for the negative
    components with p_neg.  Lags beyond the selected order are the unrestricted
    augmentation lags and are excluded from causality restrictions.
    """
    if p_pos < 1 or p_neg < 1:
        raise ValueError("lag orders must be >= 1")
    if extra_lags < 0:
        raise ValueError("extra_lags must be >= 0")
    m = len(components)
    if m < 1:
        raise ValueError("need at least one decomposed variable")
    n_obs = len(components[0])
    if any(len(c) != n_obs for c in components):
        raise ValueError("all components must have equal length")

    start = max(p_pos, p_neg) + extra_lags
    t_eff = n_obs - start
    names = tuple(c.name or f"var{i + 1}" for i, c in enumerate(components))

    regressands: list[np.ndarray] = []
    regressors: list[np.ndarray] = []
    layout: list[LayoutEntry] = []
    equation = 0
    for sign, depth, order in (("+", p_pos + extra_lags, p_pos),
                               ("-", p_neg + extra_lags, p_neg)):
        k_eq = 1 + m * depth
        if t_eff <= k_eq:
            raise InsufficientDataError(
                f"effective sample {t_eff} <= {k_eq} per-equation parameters "
                f"(length {n_obs}, lags {max(p_pos, p_neg)}+{extra_lags})"
            )
        data = [c.positive if sign == "+" else c.negative for c in components]
        for i in range(m):
            eq_var = i + 1
            symbol = _slope_symbol(eq_var)
            regressands.append(data[i][start:])
            cols = [np.ones(t_eff)]
            layout.append(
                LayoutEntry(
                    name=f"lambda{sign}_{eq_var}",
                    equation=equation,
                    eq_var=eq_var,
                    eq_sign=sign,
                    reg_var=None,
                    lag=0,
                    restricted=False,
                )
            )
            for lag in range(1, depth + 1):
                for j in range(m):
                    cols.append(data[j][start - lag : n_obs - lag])
                    layout.append(
                        LayoutEntry(
                            name=f"{symbol}{sign}_{j + 1},{lag}",
                            equation=equation,
                            eq_var=eq_var,
                            eq_sign=sign,
                            reg_var=j + 1,
                            lag=lag,
                            restricted=lag <= order,
                        )
                    )
            regressors.append(np.column_stack(cols))
            equation += 1

    return SureSystem(
        regressands=tuple(regressands),
        regressors=tuple(regressors),
        layout=tuple(layout),
        lag_orders=(p_pos, p_neg),
        extra_lags=extra_lags,
        effective_sample=t_eff,
        variable_names=names,
    )


def _block_criterion_values(
    block: np.ndarray, p_max: int, criterion: str
) -> np.ndarray:
    """Information-criterion value of a VAR(p) on one sign block, p=1..p_max.

    All candidates are estimated on the sample aligned at p_max so the values
    are comparable; the criterion is the log-determinant of the residual
    covariance plus the standard per-parameter penalty.
    """
    n_obs, m = block.shape
    t_c = n_obs - p_max
    if t_c <= 1 + m * p_max:
        raise InsufficientDataError(
            f"p_max={p_max} leaves {t_c} observations for up to "
            f"{1 + m * p_max} parameters per equation"
        )
    y = block[p_max:]
    values = np.empty(p_max)
    for p in range(1, p_max + 1):
        cols = [np.ones(t_c)]
        for lag in range(1, p + 1):
            cols.append(block[p_max - lag : n_obs - lag])
        x = np.column_stack(cols)
        coef, *_ = np.linalg.lstsq(x, y, rcond=None)
        resid = y - x @ coef
        sigma = resid.T @ resid / t_c
        sign, logdet = np.linalg.slogdet(np.atleast_2d(sigma))
        if sign <= 0:
            raise SingularityError(
                "degenerate residual covariance in lag selection "
                "(a component may have zero stochastic variation)"
            )
        n_params = m * (1 + m * p)
        if criterion == "aic":
            penalty = 2.0
        elif criterion == "sbc":
            penalty = np.log(t_c)
        else:  # hq
            penalty = 2.0 * np.log(np.log(t_c))
        values[p - 1] = logdet + penalty * n_params / t_c
    return values


def lag_order_table(
    components: Sequence[SignedComponents], p_max: int, criterion: str = "sbc"
) -> dict:
    """Criterion values per candidate order for both sign blocks."""
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    pos = np.column_stack([c.positive for c in components])
    neg = np.column_stack([c.negative for c in components])
    return {
        "criterion": criterion,
        "positive": _block_criterion_values(pos, p_max, criterion),
        "negative": _block_criterion_values(neg, p_max, criterion),
    }


def select_lags(
    components: Sequence[SignedComponents], p_max: int, criterion: str = "sbc"
) -> tuple[int, int]:
    """Pick (P+, P-) by minimizing the criterion independently per sign block."""
    table = lag_order_table(components, p_max, criterion)
    p_pos = int(np.argmin(table["positive"])) + 1
    p_neg = int(np.argmin(table["negative"])) + 1
    return p_pos, p_neg


def _cross_products(system: SureSystem):
    xs, ys = system.regressors, system.regressands
    n = system.n_equations
    gram = [[xs[i].T @ xs[j] for j in range(n)] for i in range(n)]
    zx = [[xs[i].T @ ys[j] for j in range(n)] for i in range(n)]
    return gram, zx


def ols_fit(system: SureSystem) -> CoefficientEstimate:
    """Equation-by-equation least squares; consistent but not efficient."""
    labels = system.equation_labels()
    t_eff = system.effective_sample
    coefs, resids, gram_invs = [], [], []
    for i, (y, x) in enumerate(zip(system.regressands, system.regressors)):
        gram = x.T @ x
        try:
            chol = np.linalg.cholesky(gram)
        except np.linalg.LinAlgError:
            raise SingularityError(
                f"equation {labels[i]}: design matrix is rank-deficient"
            ) from None
        c = np.linalg.solve(gram, x.T @ y)
        coefs.append(c)
        resids.append(y - x @ c)
        inv_chol = np.linalg.solve(chol, np.eye(chol.shape[0]))
        gram_invs.append(inv_chol.T @ inv_chol)
    u = np.column_stack(resids)
    omega = u.T @ u / t_eff
    k = sum(c.size for c in coefs)
    covariance = np.zeros((k, k))
    for i, sl in enumerate(system.coefficient_slices()):
        covariance[sl, sl] = omega[i, i] * gram_invs[i]
    return CoefficientEstimate(
        coefficients=np.concatenate(coefs),
        covariance=covariance,
        omega=omega,
        residuals=tuple(resids),
        estimator="ols",
    )


def gls_solve(
    system: SureSystem, omega: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """One generalized least squares solve for a given error covariance.

    Returns the stacked coefficient vector and its covariance
    [Z'(omega^-1 (x) I)Z]^-1 exploiting the block-diagonal design.
    """
    omega = np.asarray(omega, dtype=float)
    n = system.n_equations
    if omega.shape != (n, n):
        raise ValueError("omega shape does not match equation count")
    try:
        weight = np.linalg.inv(np.linalg.cholesky(omega))
        weight = weight.T @ weight  # omega^-1 via its Cholesky factor
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(
            "residual covariance is not positive definite"
        ) from None
    gram, zx = _cross_products(system)
    slices = system.coefficient_slices()
    k = system.n_coefficients
    a = np.zeros((k, k))
    b = np.zeros(k)
    for i in range(n):
        for j in range(n):
            a[slices[i], slices[j]] = weight[i, j] * gram[i][j]
        b[slices[i]] = sum(weight[i, j] * zx[i][j] for j in range(n))
    try:
        coef = np.linalg.solve(a, b)
        cov = np.linalg.inv(a)
    except np.linalg.LinAlgError:
        raise SingularityError("stacked GLS system is singular") from None
    return coef, (cov + cov.T) / 2.0


def fgls_fit(
    system: SureSystem, tol: float = 1e-8, max_iter: int = 100
) -> CoefficientEstimate:
    """Iterated feasible GLS: alternate the error covariance and the GLS solve.

    Starts from OLS residuals and stops when the largest coefficient change
    drops below tol; the reported covariance uses the covariance matrix from
    the final solve.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    t_eff = system.effective_sample
    slices = system.coefficient_slices()

    def system_residuals(coef: np.ndarray) -> list[np.ndarray]:
        return [
            y - x @ coef[sl]
            for y, x, sl in zip(system.regressands, system.regressors, slices)
        ]

    previous = ols_fit(system).coefficients
    resids = system_residuals(previous)
    converged = False
    iterations = 0
    coef = previous
    cov = None
    omega = None
    while iterations < max_iter:
        iterations += 1
        u = np.column_stack(resids)
        omega = u.T @ u / t_eff
        coef, cov = gls_solve(system, omega)
        resids = system_residuals(coef)
        if np.max(np.abs(coef - previous)) < tol:
            converged = True
            break
        previous = coef
    return CoefficientEstimate(
        coefficients=coef,
        covariance=cov,
        omega=omega,
        residuals=tuple(resids),
        estimator="fgls",
        iterations=iterations,
        converged=converged,
    )
