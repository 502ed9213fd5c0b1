from dataclasses import replace

import numpy as np
import pytest

from spincavity import (DomainError, FitProblem, FringeModel, ModelKind,
                        ScanConfig, SchemaError, Spectrum, SystemParams,
                        derive_report, dit_spectrum, fit, fit_thermal_pup,
                        free_param, goodness_profile, lorentzian_spectrum,
                        mixed_spectrum, synthesize_noisy,
                        two_transition_spectrum)
from spincavity.fitkit import (seed_lorentzian, seed_mixed,
                               seed_single_transition)
from conftest import (DELTA_H, G4, G_TOTAL, GAMMA_D3, GAMMA_D4,
                      GAMMA_PERP_0T, KAPPA)

SCALE = (np.pi * KAPPA) ** 2   # bare peak close to 1
BACKGROUND = 0.05


def lorentzian_data(noise=0.0, fringe=FringeModel(0.0, 1.0), seed=0,
                    kappa=KAPPA):
    cfg = ScanConfig(-100, 100, 201, scale=SCALE, background=BACKGROUND)
    clean = lorentzian_spectrum(kappa, 0.0, cfg)
    return synthesize_noisy(clean, noise, fringe, seed=seed)


def single_data(noise=0.0, seed=0, fringe=FringeModel(0.0, 1.0)):
    cfg = ScanConfig(-80, 80, 241, scale=SCALE, background=BACKGROUND)
    clean = dit_spectrum(G_TOTAL, KAPPA, GAMMA_PERP_0T, 0.0, 0.0, cfg)
    return synthesize_noisy(clean, noise, fringe, seed=seed)


def mixed_params(p_up):
    del p_up  # occupancy handled by the mixture, kept for clarity
    return SystemParams(kappa=KAPPA, g3=np.sqrt(G_TOTAL**2 - G4**2), g4=G4,
                        gamma_d3=GAMMA_D3, gamma_d4=GAMMA_D4,
                        omega_c=0.0, omega_x=DELTA_H, delta_h=DELTA_H)


def mixed_data(p_up, noise=0.0, seed=0):
    cfg = ScanConfig(-60, 60, 301, scale=SCALE, background=BACKGROUND)
    params = mixed_params(p_up)
    up = lorentzian_spectrum(KAPPA, 0.0, cfg)
    down = two_transition_spectrum(params, cfg)
    clean = mixed_spectrum(p_up, up, down)
    return synthesize_noisy(clean, noise, FringeModel(0.0, 1.0), seed=seed)


def lorentzian_problem(data, center_weight=None):
    seeds = seed_lorentzian(data)
    return FitProblem(
        data=data, model=ModelKind.LORENTZIAN,
        free={k: free_param(k, v) for k, v in seeds.items()},
        center_weight=center_weight)


def single_problem(data):
    seeds = seed_single_transition(data, KAPPA)
    free = {k: free_param(k, seeds[k])
            for k in ("g", "gamma", "delta", "scale", "background")}
    return FitProblem(data=data, model=ModelKind.SINGLE_TRANSITION,
                      free=free, fixed={"kappa": KAPPA, "omega_c": 0.0})


def mixed_problem(data, center_weight=(3, 10.0)):
    seeds = seed_mixed(data, KAPPA, DELTA_H, G_TOTAL)
    # dephasing beyond the cavity linewidth is spectroscopically
    # unresolvable here, so bound it by kappa
    free = {"p_up": free_param("p_up", seeds["p_up"]),
            "g4": free_param("g4", seeds["g4"]),
            "gamma_d3": free_param("gamma_d3", seeds["gamma_d3"], upper=KAPPA),
            "gamma_d4": free_param("gamma_d4", seeds["gamma_d4"], upper=KAPPA),
            "omega_x": free_param("omega_x", seeds["omega_x"],
                                  lower=float(data.freq_ghz[0]),
                                  upper=float(data.freq_ghz[-1])),
            "scale": free_param("scale", seeds["scale"]),
            "background": free_param("background", seeds["background"])}
    fixed = {"kappa": KAPPA, "omega_c": 0.0, "delta_h": DELTA_H,
             "gamma3": 0.1, "gamma4": 0.1}
    return FitProblem(data=data, model=ModelKind.MIXED_TWO_TRANSITION,
                      free=free, fixed=fixed, g_total=G_TOTAL,
                      center_weight=center_weight)


class TestProblemValidation:
    def test_every_parameter_assigned_once(self):
        data = lorentzian_data()
        with pytest.raises(DomainError):
            FitProblem(data=data, model=ModelKind.LORENTZIAN,
                       free={"kappa": free_param("kappa", 30.0)})
        with pytest.raises(DomainError):
            FitProblem(data=data, model=ModelKind.LORENTZIAN,
                       free={"kappa": free_param("kappa", 30.0)},
                       fixed={"kappa": 30.0, "omega_c": 0, "scale": 1,
                              "background": 0})
        with pytest.raises(DomainError):
            FitProblem(data=data, model=ModelKind.LORENTZIAN,
                       free={"kappa": free_param("kappa", 30.0),
                             "bogus": free_param("scale", 1.0)},
                       fixed={"omega_c": 0, "scale": 1, "background": 0})

    def test_init_inside_bounds(self):
        with pytest.raises(DomainError):
            free_param("p_up", 1.5)

    def test_infeasible_constraint(self):
        data = mixed_data(0.0)
        problem = mixed_problem(data)
        bad_free = dict(problem.free)
        bad_free["g4"] = free_param("g4", G_TOTAL + 1.0)
        with pytest.raises(DomainError):
            FitProblem(data=data, model=problem.model, free=bad_free,
                       fixed=problem.fixed, g_total=G_TOTAL)

    def test_needs_enough_points(self):
        tiny = Spectrum([0, 1, 2], [1.0, 2.0, 1.0])
        with pytest.raises(DomainError):
            FitProblem(data=tiny, model=ModelKind.LORENTZIAN,
                       free={k: free_param(k, 1.0)
                             for k in ("kappa", "omega_c", "scale", "background")})


class TestNoiselessRoundTrips:
    def test_lorentzian_exact(self):
        result = fit(lorentzian_problem(lorentzian_data()))
        assert result.converged
        assert result.params["kappa"] == pytest.approx(KAPPA, rel=1e-6)
        assert result.params["omega_c"] == pytest.approx(0.0, abs=1e-6)
        assert result.residual_rms < 1e-8

    def test_single_transition_exact(self):
        result = fit(single_problem(single_data()))
        assert result.converged
        # identifiability contract is 1e-4 relative; actual recovery is
        # far tighter on noiseless data
        assert result.params["g"] == pytest.approx(G_TOTAL, rel=1e-6)
        assert result.params["gamma"] == pytest.approx(GAMMA_PERP_0T, rel=1e-6)
        assert result.params["delta"] == pytest.approx(0.0, abs=1e-6)
        assert result.params["scale"] == pytest.approx(SCALE, rel=1e-6)
        assert result.params["background"] == pytest.approx(BACKGROUND, rel=1e-6)

    def test_mixed_exact(self):
        result = fit(mixed_problem(mixed_data(0.3)))
        assert result.converged
        assert result.params["p_up"] == pytest.approx(0.3, abs=1e-6)
        assert result.params["g4"] == pytest.approx(G4, rel=1e-6)
        assert result.params["gamma_d3"] == pytest.approx(GAMMA_D3, rel=1e-6)
        assert result.params["gamma_d4"] == pytest.approx(GAMMA_D4, rel=1e-6)
        assert result.params["omega_x"] == pytest.approx(DELTA_H, abs=1e-6)

    def test_constraint_consistency(self):
        result = fit(mixed_problem(mixed_data(0.1)))
        g3, g4 = result.params["g3"], result.params["g4"]
        assert g3**2 + g4**2 == pytest.approx(G_TOTAL**2, abs=1e-10)


class TestNoisyRecovery:
    def test_single_transition_quoted_intervals(self):
        hits = 0
        for seed in range(10):
            result = fit(single_problem(single_data(noise=0.01, seed=seed)))
            if abs(result.params["g"] - G_TOTAL) <= 0.35 and \
               abs(result.params["gamma"] - GAMMA_PERP_0T) <= 0.70:
                hits += 1
        assert hits >= 9

    def test_single_transition_with_fringe(self):
        fr = FringeModel(0.02, 60.0, 0.7)
        hits = 0
        for seed in range(10):
            result = fit(single_problem(single_data(noise=0.01, seed=seed,
                                                    fringe=fr)))
            if abs(result.params["g"] - G_TOTAL) <= 0.35 and \
               abs(result.params["gamma"] - GAMMA_PERP_0T) <= 0.70:
                hits += 1
        assert hits >= 8

    def test_ci_grows_with_noise(self):
        medians = []
        for noise in (0.005, 0.01, 0.02):
            widths = []
            for seed in range(30):
                result = fit(lorentzian_problem(
                    lorentzian_data(noise=noise, seed=1000 + seed)))
                widths.append(result.ci95["kappa"])
            medians.append(float(np.median(widths)))
        assert medians[0] < medians[1] < medians[2]

    def test_determinism(self):
        data = lorentzian_data(noise=0.01, seed=5)
        a = fit(lorentzian_problem(data))
        b = fit(lorentzian_problem(data))
        assert a.params == b.params
        assert a.ci95 == b.ci95
        assert a.n_iterations == b.n_iterations


class TestCenterWeighting:
    def test_weighted_fit_tracks_the_dip(self):
        # a fringe-distorted shoulder pulls the plain fit away from the
        # dip; boosting the three central points restores it
        cfg = ScanConfig(-80, 80, 241, scale=SCALE, background=BACKGROUND)
        clean = dit_spectrum(G_TOTAL, KAPPA, GAMMA_PERP_0T, 0.0, 0.0, cfg)
        data = synthesize_noisy(clean, 0.01, FringeModel(0.05, 90.0, 0.9),
                                seed=21)
        dip = int(np.argmin(data.reflectivity))
        window = slice(max(dip - 1, 0), dip + 2)

        def dip_residual(result):
            from spincavity.fitkit import MODEL_FUNCS
            values = {"kappa": KAPPA, "omega_c": 0.0}
            values.update(result.params)
            model = MODEL_FUNCS[ModelKind.SINGLE_TRANSITION](
                data.freq_ghz, values)
            return float(np.sum((model[window] - data.reflectivity[window]) ** 2))

        plain = fit(single_problem(data))
        problem = single_problem(data)
        weighted = fit(replace(problem, center_weight=(3, 10.0)))
        assert dip_residual(weighted) < dip_residual(plain)


class TestConfidenceBounds:
    def test_profile_at_boundary_optimum(self):
        data = mixed_data(0.0, noise=0.01, seed=4)
        problem = mixed_problem(data)
        result = fit(problem)
        assert result.params["p_up"] <= 1e-3
        assert result.ci_method["p_up"] == "profile"
        assert result.params["p_up"] + result.ci95["p_up"] <= 0.03

    def test_interior_uses_covariance(self):
        result = fit(lorentzian_problem(lorentzian_data(noise=0.01, seed=9)))
        assert all(m == "covariance" for m in result.ci_method.values())

    def test_unbounded_ci_for_unidentifiable_parameter(self):
        # with g4 fixed at zero the transition-4 dephasing has no effect
        data = mixed_data(0.0, noise=0.0)
        free = {"gamma_d4": free_param("gamma_d4", 1.0),
                "scale": free_param("scale", SCALE),
                "background": free_param("background", BACKGROUND)}
        fixed = {"p_up": 0.0, "g3": 7.26, "g4": 0.0, "gamma3": 0.1,
                 "gamma4": 0.1, "gamma_d3": GAMMA_D3, "kappa": KAPPA,
                 "omega_c": 0.0, "omega_x": DELTA_H, "delta_h": DELTA_H}
        result = fit(FitProblem(data=data, model=ModelKind.MIXED_TWO_TRANSITION,
                                free=free, fixed=fixed))
        assert not np.isfinite(result.ci95["gamma_d4"])


class TestGoodnessProfile:
    def test_minimum_at_truth_noiseless(self):
        data = lorentzian_data()
        problem = lorentzian_problem(data)
        grid = np.linspace(KAPPA - 4, KAPPA + 4, 9)
        prof = goodness_profile(problem, "kappa", grid)
        values = [v for v, _ in prof]
        rms = [r for _, r in prof]
        assert values[int(np.argmin(rms))] == pytest.approx(KAPPA, abs=0.5)

    def test_monotone_away_from_boundary_truth(self):
        data = mixed_data(0.0, noise=0.01, seed=13)
        problem = mixed_problem(data)
        prof = goodness_profile(problem, "p_up", np.linspace(0.0, 0.05, 6))
        rms = [r for _, r in prof]
        assert all(a <= b + 1e-12 for a, b in zip(rms, rms[1:]))

    def test_locally_quadratic_near_interior_optimum(self):
        data = lorentzian_data()
        problem = lorentzian_problem(data)
        h = 0.05
        prof = goodness_profile(problem, "kappa",
                                [KAPPA - h, KAPPA, KAPPA + h])
        ssr = [r**2 for _, r in prof]
        assert ssr[0] == pytest.approx(ssr[2], rel=0.05)
        assert ssr[1] < ssr[0]

    def test_requires_free_parameter(self):
        problem = lorentzian_problem(lorentzian_data())
        with pytest.raises(DomainError):
            goodness_profile(problem, "nope", [1.0])


class TestThermalStage:
    def test_recovers_thermal_occupation(self):
        params = mixed_params(0.52)
        hits = 0
        for seed in range(10):
            data = mixed_data(0.52, noise=0.01, seed=300 + seed)
            result = fit_thermal_pup(data, params)
            if abs(result.params["p_up"] - 0.52) <= 0.04:
                hits += 1
        assert hits >= 9

    def test_pure_limits_noiseless(self):
        params = mixed_params(0.0)
        res0 = fit_thermal_pup(mixed_data(0.0), params)
        assert res0.params["p_up"] == pytest.approx(0.0, abs=1e-6)
        res1 = fit_thermal_pup(mixed_data(1.0), params)
        assert res1.params["p_up"] == pytest.approx(1.0, abs=1e-6)
        assert res1.residual_rms < 1e-8


class TestDeriveReport:
    def test_reference_values(self):
        out = derive_report({"g_total": 18.67, "g4": 17.2, "kappa": 31.79,
                             "gamma": 1.78, "omega_x": 12.0, "delta_h": 12.0,
                             "omega_c": 0.0})
        assert out["g3"] == pytest.approx(7.26, abs=0.01)
        assert out["cooperativity"] == pytest.approx(12.32, abs=0.05)
        assert out["strong_coupling"] is True
        assert out["detuning_sigma4_cavity"] == pytest.approx(0.0, abs=1e-12)

    def test_cooperativity_only(self):
        out = derive_report({"g": 18.67, "kappa": 31.79, "gamma": 1.78})
        assert out["cooperativity"] == pytest.approx(12.32, abs=0.05)
        assert "g3" not in out

    def test_missing_inputs(self):
        with pytest.raises(SchemaError):
            derive_report({"g": 18.67})

    def test_infeasible_constraint(self):
        with pytest.raises(DomainError):
            derive_report({"g_total": 10.0, "g4": 12.0})

    def test_fit_result_carries_derived(self):
        result = fit(single_problem(single_data()))
        assert result.derived["cooperativity"] == pytest.approx(12.32, abs=0.2)
        assert result.derived["strong_coupling"] is True

    def test_mixed_fit_reports_detuning(self):
        result = fit(mixed_problem(mixed_data(0.1)))
        assert result.derived["detuning_sigma4_cavity"] <= 0.5
        assert result.derived["g3"] == pytest.approx(7.26, abs=0.05)
