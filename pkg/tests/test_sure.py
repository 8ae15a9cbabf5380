"""Design builder, lag selection, OLS and iterated FGLS."""

import numpy as np
import pytest

from asymcause import (
    DeterministicSpec,
    DgpConfig,
    InsufficientDataError,
    LayoutEntry,
    NotPositiveDefiniteError,
    Series,
    SignedComponents,
    SingularityError,
    build_design,
    decompose,
    fgls_fit,
    gls_solve,
    ols_fit,
    select_lags,
    simulate_dgp,
)
from asymcause.sure import SureSystem

from conftest import exog_two_equation_system, identical_regressor_system

DRIFT = DeterministicSpec("drift")


def components_from_walks(seed, t_obs=300, m=2, drift=(0.2, 0.1)):
    series = simulate_dgp(DgpConfig(m=m, drift=drift[:m], trend=(0.0,) * m,
                                    initial=(0.0,) * m, t_obs=t_obs, seed=seed))
    return [decompose(s, DRIFT) for s in series]


def var_components(data: np.ndarray, name: str) -> SignedComponents:
    """Wrap simulated component-level data; innovations are placeholders
    (the design builder only reads the component levels)."""
    n = data.shape[0]
    return SignedComponents(
        positive=data,
        negative=np.zeros(n),
        innovations_pos=np.zeros(n - 1),
        innovations_neg=np.zeros(n - 1),
        fitted_drift=0.0,
        fitted_trend=0.0,
        initial_value=0.0,
        name=name,
    )


class TestBuildDesign:
    def test_counts_with_augmentation(self):
        comps = components_from_walks(seed=1, t_obs=303)
        system = build_design(comps, 1, 1, extra_lags=1)
        assert system.n_equations == 4
        assert system.effective_sample == 301
        assert all(x.shape == (301, 5) for x in system.regressors)
        assert system.n_coefficients == 20
        restricted = [e for e in system.layout if e.restricted]
        assert len(restricted) == 8  # 4 equations x 2 regressors x 1 restricted lag
        augmented = [
            e for e in system.layout if not e.restricted and e.reg_var is not None
        ]
        assert all(e.lag == 2 for e in augmented)

    def test_asymmetric_orders(self):
        comps = components_from_walks(seed=2, t_obs=200)
        system = build_design(comps, 2, 1, extra_lags=0)
        assert system.effective_sample == 198
        widths = [x.shape[1] for x in system.regressors]
        assert widths == [5, 5, 3, 3]

    def test_no_augmentation_means_all_slopes_restricted(self):
        comps = components_from_walks(seed=3)
        system = build_design(comps, 1, 1, extra_lags=0)
        slope_entries = [e for e in system.layout if e.reg_var is not None]
        assert all(e.restricted for e in slope_entries)

    def test_blocks_do_not_mix_signs(self):
        comps = components_from_walks(seed=4, t_obs=120)
        system = build_design(comps, 1, 1, extra_lags=1)
        start = 2
        for eq in range(2):  # positive equations: columns are lagged positives
            design = system.regressors[eq]
            for lag in (1, 2):
                for j in range(2):
                    col = design[:, 1 + (lag - 1) * 2 + j]
                    np.testing.assert_array_equal(
                        col, comps[j].positive[start - lag : 120 - lag]
                    )
        for eq in range(2, 4):  # negative equations: lagged negatives
            design = system.regressors[eq]
            for lag in (1, 2):
                for j in range(2):
                    col = design[:, 1 + (lag - 1) * 2 + j]
                    np.testing.assert_array_equal(
                        col, comps[j].negative[start - lag : 120 - lag]
                    )

    def test_layout_names_unique_and_complete(self):
        comps = components_from_walks(seed=5)
        system = build_design(comps, 1, 1, extra_lags=1)
        names = [e.name for e in system.layout]
        assert len(set(names)) == len(names)
        for expected in ("lambda+_1", "lambda-_2", "beta+_2,1", "beta-_1,2",
                         "gamma+_1,1", "gamma-_2,2"):
            assert expected in names

    def test_insufficient_observations(self):
        comps = components_from_walks(seed=6, t_obs=60)
        with pytest.raises(InsufficientDataError):
            build_design(comps, 20, 20, extra_lags=1)

    def test_bad_arguments(self):
        comps = components_from_walks(seed=7, t_obs=80)
        with pytest.raises(ValueError):
            build_design(comps, 0, 1)
        with pytest.raises(ValueError):
            build_design(comps, 1, 1, extra_lags=-1)


class TestSelectLags:
    def test_lag_one_system_recovered(self):
        hits = 0
        seeds = 25
        for r in range(seeds):
            comps = components_from_walks(seed=(400, r), t_obs=500)
            if select_lags(comps, 6, "sbc") == (1, 1):
                hits += 1
        assert hits >= 0.9 * seeds

    def test_p_max_one_is_trivial(self):
        comps = components_from_walks(seed=8)
        assert select_lags(comps, 1, "sbc") == (1, 1)

    def test_p_max_too_large(self):
        comps = components_from_walks(seed=9, t_obs=60)
        with pytest.raises(InsufficientDataError):
            select_lags(comps, 25, "sbc")

    def test_unknown_criterion(self):
        comps = components_from_walks(seed=10)
        with pytest.raises(ValueError, match="criterion"):
            select_lags(comps, 2, "cp")

    @pytest.mark.parametrize("criterion", ["aic", "sbc", "hq"])
    def test_all_criteria_run(self, criterion):
        comps = components_from_walks(seed=11, t_obs=400)
        p_pos, p_neg = select_lags(comps, 4, criterion)
        assert 1 <= p_pos <= 4 and 1 <= p_neg <= 4


class TestOls:
    def test_noiseless_single_regressor(self):
        x = np.linspace(1.0, 5.0, 40)[:, None]
        system = SureSystem(
            regressands=(2.0 * x[:, 0],),
            regressors=(x,),
            layout=(LayoutEntry("beta+_1,1", 0, 1, "+", 1, 1, True),),
            lag_orders=(1, 1),
            extra_lags=0,
            effective_sample=40,
        )
        fit = ols_fit(system)
        assert fit.coefficients[0] == pytest.approx(2.0, abs=1e-12)
        np.testing.assert_allclose(fit.residuals[0], 0.0, atol=1e-12)

    def test_matches_fgls_with_identical_regressors(self, rng):
        system = identical_regressor_system(rng)
        ols = ols_fit(system)
        fgls = fgls_fit(system)
        np.testing.assert_allclose(
            ols.coefficients, fgls.coefficients, rtol=0, atol=1e-8
        )

    def test_recovers_truth_within_three_standard_errors(self):
        # stationary VAR(1) blocks with known coefficients, stacked like the
        # signed-component system
        rng = np.random.default_rng(77)
        t_obs = 10_000
        a_pos = np.array([[0.5, 0.2], [0.1, 0.4]])
        a_neg = np.array([[0.3, 0.0], [0.25, 0.5]])
        pos = np.zeros((t_obs, 2))
        neg = np.zeros((t_obs, 2))
        for t in range(1, t_obs):
            pos[t] = 0.5 + a_pos @ pos[t - 1] + rng.standard_normal(2)
            neg[t] = -0.2 + a_neg @ neg[t - 1] + rng.standard_normal(2)
        comps = [
            SignedComponents(
                positive=pos[:, i],
                negative=neg[:, i],
                innovations_pos=np.zeros(t_obs - 1),
                innovations_neg=np.zeros(t_obs - 1),
                fitted_drift=0.0,
                fitted_trend=0.0,
                initial_value=0.0,
                name=f"v{i + 1}",
            )
            for i in range(2)
        ]
        system = build_design(comps, 1, 1, extra_lags=0)
        fit = ols_fit(system)
        truth = np.concatenate(
            [
                [0.5, a_pos[0, 0], a_pos[0, 1]],
                [0.5, a_pos[1, 0], a_pos[1, 1]],
                [-0.2, a_neg[0, 0], a_neg[0, 1]],
                [-0.2, a_neg[1, 0], a_neg[1, 1]],
            ]
        )
        std_errors = np.sqrt(np.diag(fit.covariance))
        assert np.all(np.abs(fit.coefficients - truth) <= 3.0 * std_errors)

    def test_rank_deficiency_names_equation(self):
        # a strictly increasing series with kind=none has a deterministic
        # negative component, which is collinear with the intercept
        values = np.linspace(0.0, 30.0, 120) + 0.01
        up = decompose(Series(values=values + np.abs(
            np.random.default_rng(3).standard_normal(120)).cumsum(), name="up"),
            DeterministicSpec("none"))
        other = components_from_walks(seed=12, t_obs=120)[0]
        with pytest.raises(SingularityError, match="Z-"):
            ols_fit(build_design([up, other], 1, 1, extra_lags=1))


class TestFgls:
    def test_identity_omega_reproduces_ols(self, rng):
        system, _ = exog_two_equation_system(rng)
        ols = ols_fit(system)
        coef, _ = gls_solve(system, np.eye(2))
        np.testing.assert_allclose(coef, ols.coefficients, rtol=0, atol=1e-12)

    def test_any_diagonal_omega_reproduces_ols(self, rng):
        # no cross-equation information flows when the weight matrix is
        # diagonal, whatever the variances are
        system, _ = exog_two_equation_system(rng)
        ols = ols_fit(system)
        coef, _ = gls_solve(system, np.diag([0.3, 4.2]))
        np.testing.assert_allclose(coef, ols.coefficients, rtol=0, atol=1e-12)

    def test_kruskal_identical_regressors(self, rng):
        system = identical_regressor_system(rng)
        fgls = fgls_fit(system)
        ols = ols_fit(system)
        np.testing.assert_allclose(
            fgls.coefficients, ols.coefficients, rtol=0, atol=1e-8
        )

    def test_efficiency_gain_under_cross_correlation(self):
        se_ols = se_fgls = 0.0
        for rep in range(200):
            rng = np.random.default_rng((81, rep))
            system, truth = exog_two_equation_system(rng, t_obs=100, rho=0.8)
            se_ols += np.sum((ols_fit(system).coefficients - truth) ** 2)
            se_fgls += np.sum((fgls_fit(system).coefficients - truth) ** 2)
        assert se_fgls / se_ols < 0.95

    def test_estimate_shapes_and_properties(self):
        comps = components_from_walks(seed=13)
        system = build_design(comps, 1, 1, extra_lags=1)
        fit = fgls_fit(system)
        assert fit.estimator == "fgls"
        assert fit.converged
        assert fit.coefficients.size == system.n_coefficients
        np.testing.assert_allclose(fit.omega, fit.omega.T, atol=1e-14)
        scale = np.sqrt(np.diag(fit.omega))
        corr = fit.omega / np.outer(scale, scale)
        np.testing.assert_allclose(np.diag(corr), 1.0, atol=1e-12)
        assert np.min(np.linalg.eigvalsh(fit.covariance)) >= -1e-10
        ols = ols_fit(system)
        assert np.min(np.linalg.eigvalsh(ols.covariance)) >= -1e-10

    def test_equation_reordering_permutes_coefficients(self, rng):
        system, _ = exog_two_equation_system(rng)
        swapped = SureSystem(
            regressands=system.regressands[::-1],
            regressors=system.regressors[::-1],
            layout=tuple(
                type(e)(e.name, 1 - e.equation, e.eq_var, e.eq_sign, e.reg_var,
                        e.lag, e.restricted)
                for e in system.layout[2:] + system.layout[:2]
            ),
            lag_orders=system.lag_orders,
            extra_lags=system.extra_lags,
            effective_sample=system.effective_sample,
        )
        original = fgls_fit(system).coefficients
        permuted = fgls_fit(swapped).coefficients
        np.testing.assert_allclose(
            permuted, np.concatenate([original[2:], original[:2]]), atol=1e-9
        )

    def test_degenerate_component_raises(self):
        flat = var_components(np.full(100, 2.5), "flat")
        other = var_components(
            np.random.default_rng(5).standard_normal(100).cumsum(), "walk"
        )
        with pytest.raises((SingularityError, NotPositiveDefiniteError)):
            fgls_fit(build_design([flat, other], 1, 1, extra_lags=0))

    def test_invalid_tol(self, rng):
        system, _ = exog_two_equation_system(rng)
        with pytest.raises(ValueError):
            fgls_fit(system, tol=0.0)
