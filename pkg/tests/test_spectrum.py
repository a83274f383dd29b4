import cmath

import numpy as np
import pytest

from bandedge.errors import (
    BranchCutError,
    DegenerateNormalizationError,
    DomainError,
)
from bandedge.model import ModelParams
from bandedge.spectrum import (
    ExpansionKind,
    StateClass,
    classify_state,
    discrete_spectrum,
    eigenstate_profile,
    lambda_quartic_coeffs,
    near_edge_triplet,
    normalize_state,
    puiseux_energy,
    puiseux_lambda,
    puiseux_norm_d,
    solve_energy_quartic,
    solve_lambda_quartic,
    spectrum_scan,
    threshold_labels,
)

# 40-digit quartic roots at eps_d = -2
LAM_B_G05 = 0.612536054729476
E_B_G05 = -2.24509301570974979
E_BPLUS_G05 = 2.00097584811608654
LAM_RES_G05 = 1.17835474564125342 + 0.543910452169355029j
LAM_B_G01 = 0.843172475069006183
E_B_G01 = -2.0291694443345872
PSID2_B_G01 = 2.30077263875894599

# frozen evaluations of the threshold expansions at g = 0.1
PUISEUX_E_B_G01 = -2.02916892838435046
PUISEUX_LAM_B_G01 = 0.843170202857838867
PUISEUX_NORMD_B_G01 = 2.3016782248827629


def quartic_residual(params, lam):
    return abs(np.polyval(lambda_quartic_coeffs(params.epsilon_d, params.g), lam))


class TestLambdaQuartic:
    def test_decoupled_at_threshold(self):
        # f(lam) = -(lam-1)^3 (lam+1): triple root at the lower edge
        p = ModelParams(epsilon_d=-2.0, g=0.0)
        lams = sorted(s.lam.real for s in solve_lambda_quartic(p))
        assert lams[0] == pytest.approx(-1.0, abs=1e-10)
        for lam in lams[1:]:
            assert lam == pytest.approx(1.0, abs=1e-4)

    def test_decoupled_detuned(self):
        p = ModelParams(epsilon_d=-3.0, g=0.0)
        lams = sorted((s.lam for s in solve_lambda_quartic(p)), key=lambda z: z.real)
        golden = sorted(
            [-1.0, 1.0, (3 - np.sqrt(5)) / 2, (3 + np.sqrt(5)) / 2]
        )
        for lam, want in zip(lams, golden):
            assert lam == pytest.approx(want, abs=1e-9)
        energies = sorted(s.energy.real for s in solve_lambda_quartic(p))
        assert energies == pytest.approx([-3.0, -3.0, -2.0, 2.0], abs=1e-8)

    def test_reference_point(self):
        p = ModelParams(epsilon_d=-2.0, g=0.5)
        states = solve_lambda_quartic(p)
        reals = sorted(s.lam.real for s in states if abs(s.lam.imag) < 1e-12)
        assert len(reals) == 2
        assert reals[0] == pytest.approx(-0.969245546011982848, abs=1e-12)
        assert reals[1] == pytest.approx(LAM_B_G05, abs=1e-12)
        cplx = [s.lam for s in states if abs(s.lam.imag) > 1e-12]
        assert len(cplx) == 2
        assert cplx[0] == pytest.approx(cplx[1].conjugate(), abs=1e-12)
        assert all(abs(z) > 1 for z in cplx)

    def test_residuals_random_params(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            p = ModelParams(
                epsilon_d=float(rng.uniform(-3.5, 3.5)), g=float(rng.uniform(0, 1.2))
            )
            for s in solve_lambda_quartic(p):
                assert quartic_residual(p, s.lam) < 1e-10
                assert s.energy == pytest.approx(
                    -s.lam - 1 / s.lam, abs=1e-10
                )

    def test_vieta(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            p = ModelParams(
                epsilon_d=float(rng.uniform(-3, 3)), g=float(rng.uniform(0.01, 1))
            )
            lams = [s.lam for s in solve_lambda_quartic(p)]
            # f normalized: lam^4 + eps lam^3 + g^2 lam^2 - eps lam - 1
            assert sum(lams) == pytest.approx(-p.epsilon_d, abs=1e-9)
            assert np.prod(lams) == pytest.approx(-1.0, abs=1e-9)

    def test_complex_detuning_residuals(self):
        from bandedge.spectrum import solve_quartic_lambda_raw

        rng = np.random.default_rng(17)
        for polish in ("mp", "fast"):
            for _ in range(10):
                eps = complex(rng.uniform(-2.5, -1.5), rng.uniform(-0.1, 0.1))
                g = float(rng.uniform(0.02, 0.3))
                roots = solve_quartic_lambda_raw(eps, g, polish=polish)
                co = lambda_quartic_coeffs(eps, g)
                assert np.max(np.abs(np.polyval(co, roots))) < 1e-10
                assert sum(roots) == pytest.approx(-eps, abs=1e-9)


class TestEnergyQuartic:
    def test_triple_root_at_threshold(self):
        p = ModelParams(epsilon_d=-2.0, g=0.0)
        Es = sorted(E.real for E in solve_energy_quartic(p))
        assert Es[3] == pytest.approx(2.0, abs=1e-10)
        for E in Es[:3]:
            assert E == pytest.approx(-2.0, abs=1e-4)

    def test_reference_point(self):
        p = ModelParams(epsilon_d=-2.0, g=0.5)
        Es = solve_energy_quartic(p)
        reals = sorted(E.real for E in Es if abs(E.imag) < 1e-10)
        assert reals[0] == pytest.approx(E_B_G05, abs=1e-10)
        assert reals[1] == pytest.approx(E_BPLUS_G05, abs=1e-10)

    def test_upper_bound_leading_balance(self):
        # (E - 2) * 64 ~ g^4 just above the upper edge
        p = ModelParams(epsilon_d=-2.0, g=0.5)
        Es = solve_energy_quartic(p)
        eb = max(E.real for E in Es if abs(E.imag) < 1e-10)
        assert (eb - 2.0) * 64.0 == pytest.approx(p.g**4, rel=2e-3)

    def test_matches_lambda_route(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            p = ModelParams(
                epsilon_d=float(rng.uniform(-3, 3)), g=float(rng.uniform(0.01, 1))
            )
            from_e = np.sort_complex(solve_energy_quartic(p))
            from_l = np.sort_complex(
                np.array([s.energy for s in solve_lambda_quartic(p)])
            )
            assert np.allclose(from_e, from_l, atol=1e-9)

    def test_vieta_sum(self):
        for eps in (-2.5, -2.0, 0.0, 1.3):
            p = ModelParams(epsilon_d=eps, g=0.4)
            assert sum(solve_energy_quartic(p)) == pytest.approx(
                2 * eps, abs=1e-9
            )

    def test_conjugate_pairing(self):
        p = ModelParams(epsilon_d=-1.97, g=0.1)
        Es = [E for E in solve_energy_quartic(p) if abs(E.imag) > 1e-10]
        assert len(Es) == 2
        assert Es[0] == pytest.approx(Es[1].conjugate(), abs=1e-10)


class TestClassification:
    def test_bound_states(self):
        assert classify_state(0.5, -2.5) is StateClass.BOUND_LOWER
        assert classify_state(-0.5, 2.5) is StateClass.BOUND_UPPER

    def test_virtual_pair_below_ep(self):
        # below the real exceptional point (~ -2.055 at g = 0.1) the
        # second-sheet pair is real: two virtual states
        p = ModelParams(epsilon_d=-2.1, g=0.1)
        classes = [s.state_class for s in near_edge_triplet(p)]
        assert classes.count(StateClass.VIRTUAL) == 2
        assert classes.count(StateClass.BOUND_LOWER) == 1

    def test_resonance_pair_above_ep(self):
        p = ModelParams(epsilon_d=-2.0, g=0.1)
        classes = {s.state_class for s in near_edge_triplet(p)}
        assert classes == {
            StateClass.BOUND_LOWER,
            StateClass.RESONANCE,
            StateClass.ANTI_RESONANCE,
        }

    def test_cut_rejected(self):
        with pytest.raises(BranchCutError):
            classify_state(cmath.exp(0.3j), -2 * np.cos(0.3))


class TestNormalization:
    def test_decoupled_dot_state(self):
        # g = 0, E = -3: all weight on the dot up to the bound-state factor
        lam = (3 - np.sqrt(5)) / 2
        p = ModelParams(epsilon_d=-3.0, g=0.0)
        psi0_sq, psid_sq = normalize_state(p, lam)
        assert psi0_sq == 0.0
        assert psid_sq == pytest.approx(1.0 / (1.0 - lam**2), abs=1e-12)

    def test_normalization_identity(self):
        p = ModelParams(epsilon_d=-2.0, g=0.5)
        for s in solve_lambda_quartic(p):
            psi0_sq, psid_sq = normalize_state(p, s.lam)
            val = (1 + s.lam**2) * psi0_sq + (1 - s.lam**2) * psid_sq
            assert val == pytest.approx(1.0, abs=1e-12)

    def test_coupled_equation_residual(self):
        # (1 - lam^2) <0|psi> = g lam <d|psi> holds in squared form
        rng = np.random.default_rng(21)
        for _ in range(10):
            p = ModelParams(
                epsilon_d=float(rng.uniform(-3, 0)), g=float(rng.uniform(0.05, 0.8))
            )
            for s in solve_lambda_quartic(p):
                psi0_sq, psid_sq = normalize_state(p, s.lam)
                lhs = (1 - s.lam**2) ** 2 * psi0_sq
                rhs = p.g**2 * s.lam**2 * psid_sq
                assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_degenerate_denominator(self):
        p = ModelParams(epsilon_d=-2.0, g=0.0)
        with pytest.raises(DegenerateNormalizationError):
            normalize_state(p, 1.0)

    def test_norm_divergence_scaling(self):
        # g^{2/3} <d|psi_B>^2 -> 2^{1/3}/3 ~ 0.41997
        target = 2.0 ** (1.0 / 3.0) / 3.0
        prev_err = None
        for g in (0.05, 0.02, 0.005):
            p = ModelParams(epsilon_d=-2.0, g=g)
            bound = next(
                s
                for s in near_edge_triplet(p)
                if s.state_class is StateClass.BOUND_LOWER
            )
            err = abs(bound.psid_sq.real * g ** (2.0 / 3.0) - target)
            if prev_err is not None:
                assert err < prev_err
            prev_err = err
        assert prev_err < 0.01

    def test_reference_value(self):
        p = ModelParams(epsilon_d=-2.0, g=0.1)
        bound = next(
            s for s in near_edge_triplet(p) if s.state_class is StateClass.BOUND_LOWER
        )
        assert bound.psid_sq.real == pytest.approx(PSID2_B_G01, abs=1e-10)

    def test_residue_sum_rule(self):
        # the four squared d-components sum to exactly one
        for eps, g in [(-2.0, 0.5), (-2.0, 0.02), (-1.3, 0.3), (0.0, 0.1)]:
            p = ModelParams(epsilon_d=eps, g=g)
            total = sum(s.psid_sq for s in discrete_spectrum(p))
            assert total == pytest.approx(1.0, abs=1e-9)


class TestEigenstateProfile:
    def test_bound_state_decay(self):
        p = ModelParams(epsilon_d=-2.0, g=0.5)
        bound = next(
            s for s in discrete_spectrum(p) if s.state_class is StateClass.BOUND_LOWER
        )
        vals = [abs(eigenstate_profile(bound, x)) for x in range(0, 30)]
        ratios = np.array(vals[1:]) / np.array(vals[:-1])
        assert np.allclose(ratios, abs(bound.lam), atol=1e-12)

    def test_resonance_growth(self):
        p = ModelParams(epsilon_d=-2.0, g=0.5)
        res = next(
            s for s in discrete_spectrum(p) if s.state_class is StateClass.RESONANCE
        )
        assert abs(eigenstate_profile(res, 40)) > abs(eigenstate_profile(res, 4))

    def test_geometric_series_convergence(self):
        p = ModelParams(epsilon_d=-2.0, g=0.5)
        bound = next(
            s for s in discrete_spectrum(p) if s.state_class is StateClass.BOUND_LOWER
        )
        # chain weight sum_x |<x|psi>|^2 converges to the closed geometric form
        direct = sum(
            abs(eigenstate_profile(bound, x)) ** 2 for x in range(-300, 301)
        )
        q = abs(bound.lam) ** 2
        closed = abs(bound.psi0_sq) * (1 + q) / (1 - q)
        assert direct == pytest.approx(closed, rel=1e-12)


class TestPuiseux:
    def test_zero_coupling_limits(self):
        assert puiseux_energy(0.0, ExpansionKind.ENERGY_BOUND) == -2.0
        for a in (-1, 1):
            assert puiseux_energy(0.0, ExpansionKind.ENERGY_RES_ANTI, alpha=a) == -2.0
        assert puiseux_lambda(0.0, ExpansionKind.LAMBDA_BOUND) == 1.0

    def test_frozen_bound_values(self):
        assert puiseux_energy(0.1, ExpansionKind.ENERGY_BOUND) == pytest.approx(
            PUISEUX_E_B_G01, abs=1e-14
        )
        assert puiseux_lambda(0.1, ExpansionKind.LAMBDA_BOUND) == pytest.approx(
            PUISEUX_LAM_B_G01, abs=1e-14
        )
        assert puiseux_norm_d(0.1, ExpansionKind.NORM_D_BOUND) == pytest.approx(
            PUISEUX_NORMD_B_G01, abs=1e-14
        )

    def test_norm_divergence_guard(self):
        with pytest.raises(DomainError):
            puiseux_norm_d(0.0, ExpansionKind.NORM_D_BOUND)

    def test_leading_norm_phases_cancel(self):
        # the three g^{-2/3} leading coefficients are cube-root phases of a
        # common magnitude and sum to zero
        total = 0.0
        for kind, alphas in [
            (ExpansionKind.NORM_D_BOUND, (0,)),
            (ExpansionKind.NORM_D_RES_ANTI, (-1, 1)),
        ]:
            for a in alphas:
                from bandedge.spectrum import puiseux_expansion

                total += puiseux_expansion(kind, a, 0.1).terms[0]
        assert abs(total) < 1e-14

    def test_energy_error_scales_as_g4(self):
        # |E_exact - three-term| / g^4 stays in a narrow stable band
        ratios = []
        for g in (0.1, 0.05, 0.02, 0.01):
            p = ModelParams(epsilon_d=-2.0, g=g)
            bound = next(
                s
                for s in near_edge_triplet(p)
                if s.state_class is StateClass.BOUND_LOWER
            )
            series = puiseux_energy(g, ExpansionKind.ENERGY_BOUND)
            ratios.append(abs(bound.energy - series) / g**4)
        assert max(ratios) < 2.0 * min(ratios)
        assert 0.004 < min(ratios) < max(ratios) < 0.007

    def test_lambda_error_scales_as_g_10_3(self):
        ratios = []
        for g in (0.1, 0.05, 0.02, 0.01):
            p = ModelParams(epsilon_d=-2.0, g=g)
            bound = next(
                s
                for s in near_edge_triplet(p)
                if s.state_class is StateClass.BOUND_LOWER
            )
            series = puiseux_lambda(g, ExpansionKind.LAMBDA_BOUND)
            ratios.append(abs(bound.lam - series) / g ** (10.0 / 3.0))
        assert max(ratios) < 2.0 * min(ratios)
        assert 0.003 < min(ratios) < max(ratios) < 0.007

    def test_resonance_branch_tracks_exact_root(self):
        g = 0.02
        p = ModelParams(epsilon_d=-2.0, g=g)
        labeled = threshold_labels(near_edge_triplet(p))
        for alpha in (-1, 1):
            series_E = puiseux_energy(g, ExpansionKind.ENERGY_RES_ANTI, alpha=alpha)
            series_l = puiseux_lambda(g, ExpansionKind.LAMBDA_RES_ANTI, alpha=alpha)
            series_n = puiseux_norm_d(g, ExpansionKind.NORM_D_RES_ANTI, alpha=alpha)
            s = labeled[alpha]
            assert series_E == pytest.approx(s.energy, abs=5 * g**4)
            assert series_l == pytest.approx(s.lam, abs=5 * g ** (10.0 / 3.0))
            assert series_n == pytest.approx(s.psid_sq, rel=2 * g ** (4.0 / 3.0))

    def test_norm_expansion_converges_to_exact(self):
        rel_errs = []
        for g in (0.05, 0.01, 0.002):
            p = ModelParams(epsilon_d=-2.0, g=g)
            bound = next(
                s
                for s in near_edge_triplet(p)
                if s.state_class is StateClass.BOUND_LOWER
            )
            series = puiseux_norm_d(g, ExpansionKind.NORM_D_BOUND)
            rel_errs.append(abs(series - bound.psid_sq) / abs(bound.psid_sq))
        assert rel_errs[0] > rel_errs[1] > rel_errs[2]
        assert rel_errs[-1] < 1e-4


class TestThresholdLabels:
    def test_bijection_small_and_moderate_g(self):
        for g in (1e-4, 0.02, 0.5):
            p = ModelParams(epsilon_d=-2.0, g=g)
            labeled = threshold_labels(near_edge_triplet(p))
            assert set(labeled) == {0, -1, 1}
            assert labeled[0].state_class is StateClass.BOUND_LOWER
            assert labeled[-1].state_class is StateClass.RESONANCE
            assert labeled[1].state_class is StateClass.ANTI_RESONANCE


class TestSpectrumScan:
    def test_virtual_region(self):
        rows = spectrum_scan(0.1, -2.15, -2.15, 1.0)
        classes = [r.state.state_class for r in rows]
        assert classes.count(StateClass.VIRTUAL) == 2
        assert classes.count(StateClass.BOUND_LOWER) == 1

    def test_resonance_region(self):
        rows = spectrum_scan(0.1, -1.9, -1.9, 1.0)
        classes = {r.state.state_class for r in rows}
        assert classes == {
            StateClass.BOUND_LOWER,
            StateClass.RESONANCE,
            StateClass.ANTI_RESONANCE,
        }

    def test_bound_state_stuck_below_edge(self):
        rows = spectrum_scan(0.1, -2.15, -1.85, 0.01)
        bound_energies = [
            r.state.energy.real
            for r in rows
            if r.state.state_class is StateClass.BOUND_LOWER
        ]
        assert len(bound_energies) == 31
        assert all(E < -2.0 for E in bound_energies)

    def test_deterministic_ordering(self):
        a = spectrum_scan(0.1, -2.05, -1.95, 0.05)
        b = spectrum_scan(0.1, -2.05, -1.95, 0.05)
        assert [(r.eps_d, r.state.lam) for r in a] == [
            (r.eps_d, r.state.lam) for r in b
        ]

    def test_step_validation(self):
        with pytest.raises(DomainError):
            spectrum_scan(0.1, -2.1, -1.9, 0.0)
