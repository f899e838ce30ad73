import numpy as np
import pytest

from ncsimo.channel import (ChannelRealization, FixedDistance, RadioParams, UniformDisk, apply_channel,
                            complex_normal, db_to_linear, dbm_to_watts, draw_large_scale,
                            draw_realization, linear_to_db, noise_power, path_loss_db, stream)
from ncsimo.errors import OutOfModelRange

# frozen from an independent evaluation of the link-budget formulas
PL_100 = -81.98419728044193
PL_1000 = -119.08419728044194
SIGMA2_DEFAULT = 3.186449793110192e-13
BETA_100 = 6.332573977646099e-09


def test_unit_conversions():
    assert dbm_to_watts(30.0) == pytest.approx(1.0)
    assert dbm_to_watts(25.0) == pytest.approx(0.31622776601683794)
    assert db_to_linear(-30.0) == pytest.approx(1e-3)
    assert linear_to_db(100.0) == pytest.approx(20.0)


def test_wavelength():
    assert RadioParams().wavelength == pytest.approx(0.1)


def test_path_loss_examples():
    assert path_loss_db(100.0) == pytest.approx(PL_100, rel=1e-12)
    assert path_loss_db(1000.0) == pytest.approx(PL_1000, rel=1e-12)
    assert path_loss_db(1000.0) - path_loss_db(100.0) == pytest.approx(-37.1)
    assert path_loss_db(100.0, psi=3.0) == pytest.approx(PL_100 - 3.0)
    with pytest.raises(OutOfModelRange):
        path_loss_db(50.0)


def test_noise_power():
    assert noise_power() == pytest.approx(SIGMA2_DEFAULT, rel=1e-12)
    assert noise_power(RadioParams(F0=0.0)) == pytest.approx(1.38e-23 * 290 * 2e7, rel=1e-12)
    assert noise_power(RadioParams(B_w=4e7)) == pytest.approx(2 * SIGMA2_DEFAULT, rel=1e-12)


def test_fixed_distance_no_shadowing():
    params = RadioParams(sigma_psi=0.0)
    beta = draw_large_scale(4, FixedDistance(100.0), params, stream(0, "placement"))
    np.testing.assert_allclose(beta, BETA_100, rtol=1e-12)
    assert BETA_100 == pytest.approx(6.34e-9, rel=2e-3)
    with pytest.raises(OutOfModelRange):
        draw_large_scale(1, FixedDistance(10.0), params, stream(0, "placement"))


def test_area_uniform_annulus():
    R, d0 = 1000.0, 100.0
    params = RadioParams(sigma_psi=0.0)
    beta = draw_large_scale(1, UniformDisk(R), params, stream(1, "placement"), batch=(100_000,))
    pl = linear_to_db(beta[:, 0])
    dist = d0 * 10.0 ** ((PL_100 - pl) / (10 * params.gamma))
    assert dist.min() >= d0 * (1 - 1e-9) and dist.max() <= R * (1 + 1e-9)
    exact = 2.0 / 3.0 * (R ** 3 - d0 ** 3) / (R ** 2 - d0 ** 2)
    assert dist.mean() == pytest.approx(exact, rel=0.01)
    assert dist.mean() == pytest.approx(2 * R / 3, rel=0.01)
    # more mass near the rim: the outer half-radius ring holds > 3/4 of the users
    assert np.mean(dist > R / 2) > 0.75


def test_shadowing_spread():
    params = RadioParams()
    beta = draw_large_scale(1, FixedDistance(300.0), params, stream(2, "placement"),
                            shadow_rng=stream(2, "shadowing"), batch=(100_000,))
    resid = np.log10(beta[:, 0]) - path_loss_db(300.0) / 10
    assert np.std(resid) == pytest.approx(0.316, rel=0.02)
    assert abs(np.mean(resid)) < 0.01


def test_streams_deterministic_and_independent():
    a = stream(5, "noise", 16, 3).standard_normal(100_000)
    b = stream(5, "noise", 16, 3).standard_normal(100_000)
    np.testing.assert_array_equal(a, b)
    others = [stream(5, "fading", 16, 3), stream(5, "noise", 16, 4), stream(5, "noise", 32, 3),
              stream(6, "noise", 16, 3)]
    for rng in others:
        c = rng.standard_normal(100_000)
        assert abs(np.corrcoef(a, c)[0, 1]) < 0.01
    with pytest.raises(ValueError):
        stream(0, "bogus")


def test_complex_normal_circular():
    z = complex_normal(stream(0, "noise"), 200_000, var=3.0)
    assert np.var(z.real) == pytest.approx(1.5, rel=0.02)
    assert np.var(z.imag) == pytest.approx(1.5, rel=0.02)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(3.0, rel=0.02)


def test_apply_channel_deterministic_example():
    M = 5
    real = ChannelRealization(G=np.ones((M, 1), complex), beta=np.array([1.0]))
    Y = apply_channel(np.array([[1.0, 1.0]]), real, 0.0)
    np.testing.assert_array_equal(Y, np.ones((M, 2)))


def test_apply_channel_mismatch():
    real = ChannelRealization(G=np.ones((4, 2), complex), beta=np.ones(2))
    with pytest.raises(ValueError):
        apply_channel(np.ones((3, 2)), real, 0.0)
    with pytest.raises(ValueError):
        apply_channel(np.ones((2, 2)), real, 1.0, noise=np.ones((4, 3)))


def test_received_energy_law_of_large_numbers():
    n, M, K = 10_000, 8, 3
    beta = np.array([0.5, 1.0, 2.0])
    X = np.array([[1.0, 1j], [0.5, -2.0], [2.0, 0.3 + 0.4j]])
    real = draw_realization(M, np.broadcast_to(beta, (n, K)), stream(0, "fading"))
    Y = apply_channel(np.broadcast_to(X, (n, K, 2)), real, 0.0)
    emp = np.mean(np.sum(np.abs(Y) ** 2, axis=1), axis=0) / M
    np.testing.assert_allclose(emp, np.sum(beta[:, None] * np.abs(X) ** 2, axis=0), rtol=0.02)


def test_noise_only_block():
    n, M, sigma2 = 10_000, 8, 0.7
    real = draw_realization(M, np.ones((n, 2)), stream(0, "fading"))
    Y = apply_channel(np.zeros((n, 2, 2)), real, sigma2, rng=stream(0, "noise"))
    energy = np.mean(np.sum(np.abs(Y) ** 2, axis=(1, 2)))
    assert energy == pytest.approx(2 * M * sigma2, rel=0.02)
    assert np.var(Y.real) == pytest.approx(np.var(Y.imag), rel=0.02)
