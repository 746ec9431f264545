import numpy as np
import pytest

from risloc import (
    EstimatorParams,
    ScenePolicy,
    generate_zc,
    pair_targets,
    random_scene,
    run_trial,
)
from risloc.channel import (
    apply_ris_reflection,
    draw_path_gains,
    synthesize_pr_signal,
    synthesize_ris_signal,
)
from risloc.harness import default_scenario
from risloc.pipeline import _scenario_frames, capture_beamformed_phase
from risloc.ris_control import initial_reflection_matrix


def well_separated_scenario(snr_db, seed, k=2, m=64):
    sc = default_scenario(snr_db=snr_db, num_ris_elements=m)
    rng = np.random.default_rng(seed)
    targets = random_scene(
        rng, k, sc.layout, ScenePolicy(min_sin_sep=0.12, max_draws=100000), sc.f_samp, sc.zc_length
    )
    return sc.with_targets(targets)


class TestRunTrial:
    def test_noiseless_two_targets_recovered(self):
        sc = well_separated_scenario(None, seed=1)
        out = run_trial(sc, seed=11)
        assert out.k_hat == 2
        assert out.mapping_failures == 0
        pairs = pair_targets(out.true_positions, out.estimated_positions)
        for i, j in pairs:
            p, q = out.true_positions[i], out.estimated_positions[j]
            assert np.hypot(p[0] - q[0], p[1] - q[1]) <= 0.5

    def test_empty_scene_detects_nothing(self):
        sc = default_scenario(snr_db=30.0)
        out = run_trial(sc, seed=5)
        assert out.k_hat == 0
        assert out.k_theta == 0
        assert out.estimated_positions == ()

    def test_deterministic_given_seed(self):
        sc = well_separated_scenario(-10.0, seed=2)
        a = run_trial(sc, seed=21)
        b = run_trial(sc, seed=21)
        assert a == b

    def test_different_seed_changes_noise_outcome(self):
        sc = well_separated_scenario(-45.0, seed=3)
        a = run_trial(sc, seed=1)
        b = run_trial(sc, seed=2)
        assert a.sensing_pairs != b.sensing_pairs or a.estimated_positions != b.estimated_positions

    def test_phase_count_tracks_directions(self):
        sc = well_separated_scenario(None, seed=4, k=3)
        out = run_trial(sc, seed=31)
        assert out.n_phases == 1 + out.k_theta

    def test_positions_plus_failures_account_for_detections(self):
        sc = well_separated_scenario(-30.0, seed=6)
        out = run_trial(sc, seed=41)
        assert len(out.estimated_positions) + out.mapping_failures == out.k_hat
        assert len(out.sensing_pairs) == len(out.estimated_positions)

    def test_noiseless_completeness_seven_targets(self):
        sc = default_scenario(snr_db=None, num_ris_elements=64)
        rng = np.random.default_rng(17)
        targets = random_scene(
            rng, 7, sc.layout,
            ScenePolicy(min_sin_sep=0.0625, max_draws=200000),
            sc.f_samp, sc.zc_length,
        )
        out = run_trial(sc.with_targets(targets), seed=51)
        assert out.k_hat == 7

    def test_uses_scenario_seed_when_unset(self):
        sc = well_separated_scenario(-10.0, seed=7)
        from dataclasses import replace

        sc = replace(sc, seed=99)
        a = run_trial(sc)
        b = run_trial(sc, seed=99)
        assert a == b


class TestBeamformedFastPath:
    def test_matches_composed_channel_operations_noiseless(self):
        sc = well_separated_scenario(None, seed=8)
        zc = generate_zc(sc.zc_length, sc.zc_root)
        rng = np.random.default_rng(3)
        gains = draw_path_gains(sc, rng)
        theta_ap, phi_pr, weights = _scenario_frames(sc)
        probing = initial_reflection_matrix(theta_ap, phi_pr, sc.num_ris_elements, 6, rng)

        fast = capture_beamformed_phase(sc, zc, gains, probing, weights, None).data

        surface = synthesize_ris_signal(sc, zc, gains)
        composed = np.empty_like(fast)
        for n in range(6):
            x = apply_ris_reflection(surface, probing.entries[:, n], phi_pr)
            y = synthesize_pr_signal(sc, x, zc, gains).data
            composed[n] = weights.w.conj() @ y
        np.testing.assert_allclose(fast, composed, atol=1e-9)

    def test_matches_composed_route_with_blocked_paths(self):
        sc = default_scenario(snr_db=None, blockage_ap=1)
        sc = sc.with_targets([(430.0, 250.0), (620.0, 180.0)], blockage=[1, 0])
        zc = generate_zc(sc.zc_length, sc.zc_root)
        rng = np.random.default_rng(4)
        gains = draw_path_gains(sc, rng)
        theta_ap, phi_pr, weights = _scenario_frames(sc)
        probing = initial_reflection_matrix(theta_ap, phi_pr, sc.num_ris_elements, 4, rng)

        fast = capture_beamformed_phase(sc, zc, gains, probing, weights, None).data

        surface = synthesize_ris_signal(sc, zc, gains)
        composed = np.empty_like(fast)
        for n in range(4):
            x = apply_ris_reflection(surface, probing.entries[:, n], phi_pr)
            y = synthesize_pr_signal(sc, x, zc, gains).data
            composed[n] = weights.w.conj() @ y
        np.testing.assert_allclose(fast, composed, atol=1e-9)

    def test_gain_scaling_scales_capture_linearly(self):
        from risloc.channel import PathGains

        sc = well_separated_scenario(None, seed=9)
        zc = generate_zc(sc.zc_length, sc.zc_root)
        rng = np.random.default_rng(5)
        gains = draw_path_gains(sc, rng)
        scaled = PathGains(
            alpha_0=2.0 * gains.alpha_0,
            alpha_targets=tuple(2.0 * a for a in gains.alpha_targets),
            rho_ris_pr=gains.rho_ris_pr,
            rho_ap_pr=gains.rho_ap_pr,
            rho_targets=gains.rho_targets,
        )
        theta_ap, phi_pr, weights = _scenario_frames(sc)
        probing = initial_reflection_matrix(theta_ap, phi_pr, sc.num_ris_elements, 4, rng)
        base = capture_beamformed_phase(sc, zc, gains, probing, weights, None).data
        doubled = capture_beamformed_phase(sc, zc, scaled, probing, weights, None).data
        np.testing.assert_allclose(doubled, 2.0 * base, rtol=1e-12)


class TestFractionalDelayMode:
    def test_trial_runs_and_recovers_targets(self):
        from dataclasses import replace

        sc = well_separated_scenario(None, seed=10)
        sc = replace(sc, use_fractional_delay=True)
        out = run_trial(sc, seed=61)
        assert out.k_hat == 2
        pairs = pair_targets(out.true_positions, out.estimated_positions)
        for i, j in pairs:
            p, q = out.true_positions[i], out.estimated_positions[j]
            assert np.hypot(p[0] - q[0], p[1] - q[1]) <= 1.0


class TestSurfaceStageNoise:
    def test_optional_noise_enters_the_capture(self):
        from dataclasses import replace

        sc = well_separated_scenario(None, seed=12)
        noisy = replace(sc, ris_snr_db=10.0)
        zc = generate_zc(sc.zc_length, sc.zc_root)
        rng = np.random.default_rng(6)
        gains = draw_path_gains(sc, rng)
        theta_ap, phi_pr, weights = _scenario_frames(sc)
        probing = initial_reflection_matrix(theta_ap, phi_pr, sc.num_ris_elements, 32, rng)
        clean = capture_beamformed_phase(sc, zc, gains, probing, weights, None).data
        withnoise = capture_beamformed_phase(
            noisy, zc, gains, probing, weights, np.random.default_rng(1)
        ).data
        extra = np.mean(np.abs(withnoise - clean) ** 2)
        # cascaded surface noise variance: sigma^2 * M
        assert extra == pytest.approx(0.1 * sc.num_ris_elements, rel=0.05)

    def test_detection_survives_mild_surface_noise(self):
        from dataclasses import replace

        sc = well_separated_scenario(None, seed=12)
        noisy = replace(sc, ris_snr_db=10.0)
        out = run_trial(noisy, seed=71)
        assert out.k_hat == 2
