import math

import numpy as np
import pytest

import mwlines as m


def rot_z(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def test_cayley_examples():
    assert np.allclose(m.cayley_from_rotation(np.eye(3)), 0.0)
    assert np.allclose(m.cayley_from_rotation(rot_z(math.pi / 2)), [0, 0, 1])
    assert np.allclose(m.rotation_from_cayley([0, 0, 1]), rot_z(math.pi / 2))
    with pytest.raises(m.MwlError, match="SingularRotation"):
        m.cayley_from_rotation(np.diag([-1.0, -1.0, 1.0]))


def test_cayley_round_trip_random():
    rng = np.random.default_rng(0)
    for _ in range(100):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        angle = rng.uniform(0, 3.0)
        k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
        r = np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * k @ k
        back = m.rotation_from_cayley(m.cayley_from_rotation(r))
        assert np.abs(back - r).max() < 1e-9


def test_moments_and_lines():
    assert np.allclose(m.project_moment(np.eye(3), [1, 0, 0], 2), [1, 0])
    assert np.allclose(m.reconstruct_moment([1, 0], 2, np.eye(3)), [1, 0, 0])
    with pytest.raises(m.MwlError, match="AxisMismatch"):
        m.project_moment(np.eye(3), [0.6, 0.8, 0.0], 1)
    line = m.line_from_point_direction([1, 0, 0], [0, 0, 1])
    assert np.allclose(line["moment"], [0, -1, 0])
    assert line["depth"] == pytest.approx(1.0)


def test_observer_helpers():
    assert np.allclose(m.mw_Q([0, 0, 0]), -0.5 * np.eye(3))
    assert np.allclose(m.mw_X([1, 0], 3, [0, 0, 0]), [0, -1, 0])
    nu = np.array([0.3, -0.2, 0.9])
    assert np.allclose(m.mw_T([1, 0], 3, [0, 0, 0]).T @ nu, [0, -nu[0]])
    assert m.direction_error([1, 0, 0], [0, 1, 0]) == pytest.approx(math.pi / 2)
    assert m.depth_error(4.0, 5.0) == 1.0


def test_scene_is_deterministic():
    a = m.random_scene(42)
    b = m.random_scene(42)
    assert a["text"] == b["text"]
    assert len(a["axes"]) == 6


def test_presets_and_trial():
    assert set(m.preset_names()) == {"mwlest-noiseless", "mwlest-noise", "cascade-vib"}
    cfg = m.preset("mwlest-noiseless")
    assert cfg.k_chi == 100.0
    cfg.duration = 2.0
    cfg.record_series = True
    r1 = m.run_trial(cfg)
    r2 = m.run_trial(cfg)
    assert r1.final_error == r2.final_error
    assert r1.verdict in ("converged", "diverged", "timeout")
    series = r1.series
    assert len(series["t"]) == len(series["state_error"]) > 10
    assert len(series["eps_d"][0]) == 6


def test_zero_error_trial():
    cfg = m.preset("mwlest-noiseless")
    cfg.duration = 1.0
    cfg.start_at_truth = True
    r = m.run_trial(cfg)
    assert r.verdict == "converged"
    assert r.t_converged == 0.0


def test_monte_carlo_and_csv():
    cfg = m.preset("mwlest-noiseless")
    cfg.duration = 1.0
    a = m.run_monte_carlo(cfg, 4, workers=1)
    b = m.run_monte_carlo(cfg, 4, workers=2)
    assert a.n_trials == 4
    assert m.trials_csv(a.trials) == m.trials_csv(b.trials)
    assert m.trials_csv(a.trials).startswith("trial,seed,mode,verdict")


def test_invalid_config_raises():
    cfg = m.TrialConfig()
    cfg.duration = -1.0
    with pytest.raises(m.MwlError, match="duration"):
        m.run_trial(cfg)
    with pytest.raises(m.MwlError):
        cfg.mode = "sideways"
