import math

import numpy as np
import pytest

import kinplume as kp


KIN = kp.KineticsParams(lambda_=1.0, mu=1.0)
TP = kp.TransportParams(v=1.0, d_l=0.1, d_t=0.1)


def test_derived_quantities():
    dq = kp.derive(kp.KineticsParams(lambda_=0.2, mu=0.2), kp.TransportParams(v=1.0))
    assert dq.d_star == pytest.approx(0.625, abs=1e-14)
    assert dq.pi_f + dq.pi_a == pytest.approx(1.0)
    assert dq.retardation == pytest.approx(2.0)


def test_invalid_kinetics_raise():
    with pytest.raises(kp.Error):
        kp.derive(kp.KineticsParams(lambda_=0.0, mu=0.0), TP)


def test_occupancy_sums_to_one():
    total = sum(kp.occupancy(kp.Initial.Free, p, 0.7, KIN) for p in (kp.Phase.Free, kp.Phase.Adsorbed))
    assert total == pytest.approx(1.0, abs=1e-14)


def test_ensemble_against_moments():
    r = kp.simulate(KIN, TP, t=5.0, count=20000, seed=3, threads=1)
    m = kp.moments(KIN, TP, 5.0)
    assert abs(r["centroid"] - m.mean) <= 4 * r["centroid_se"]
    assert r["x"].shape == (20000,)
    again = kp.simulate(KIN, TP, t=5.0, count=20000, seed=3, threads=2)
    assert np.array_equal(r["x"], again["x"])


def test_lattice_conserves_mass():
    out = kp.lattice(KIN, TP, dt=0.01, t=1.0)
    assert out["p_f"].sum() + out["p_a"].sum() == pytest.approx(1.0, abs=1e-12)
    assert out["beta"] + out["delta"] + out["alpha"] == pytest.approx(1.0)


def test_profile_and_field_mass():
    x = np.linspace(-0.5, 2.5, 301)
    p = kp.profile_1d(2.0, KIN, 1.0, x)
    dx = x[1] - x[0]
    mass = p["n_tot"].sum() * dx + p["atom_x0"] + p["atom_vt"]
    assert mass == pytest.approx(1.0, abs=2e-2)
    f = kp.full_2d(kp.Initial.Free, kp.Phase.Free, 2.0, KIN, TP, nx=80, ny=40, threads=1)
    assert f["values"].shape == (40, 80)
    expected = kp.occupancy(kp.Initial.Free, kp.Phase.Free, 2.0, KIN)
    assert f["grid_mass"] == pytest.approx(expected, abs=1e-4)


def test_stehfest_with_python_callable():
    assert kp.stehfest_invert(lambda s: 1.0 / (s + 1.0), 1.0, 16) == pytest.approx(math.exp(-1), rel=1e-6)


def test_tailing_minimum_at_centre():
    y = np.linspace(-2.0, 2.0, 41)
    kin = kp.KineticsParams(lambda_=0.05, mu=0.05)
    tp = kp.TransportParams(v=0.3, d_l=0.3, d_t=0.03)
    values, _ = kp.x_moments_given_y(1, kp.Phase.Free, y, 10.0, kin, tp, normalized=True)
    assert y[np.argmin(values)] == pytest.approx(0.0, abs=1e-12)
