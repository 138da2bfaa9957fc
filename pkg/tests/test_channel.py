import numpy as np
import pytest
from scipy import stats

from mwmaxlink.channel import (
    CsiErrorModel,
    Topology,
    apply_csi_error,
    draw_channel,
    draw_slot_channels,
)


def test_draw_channel_per_entry_variance(rng):
    # 1e5 matrix draws at the documented (2, 2) signature.
    samples = np.stack([draw_channel(2, 2, 1.0, rng) for _ in range(25_000)])
    var = np.mean(np.abs(samples) ** 2)
    assert abs(var - 1.0) < 0.02
    # symmetric split between real and imaginary parts
    assert abs(np.mean(samples.real**2) - 0.5) < 0.01
    assert abs(np.mean(samples.imag**2) - 0.5) < 0.01


def test_draw_channel_magnitude_exponential(rng):
    h = np.concatenate([draw_channel(1, 1, 1.0, rng).ravel() for _ in range(5)] +
                       [draw_channel(500, 40, 1.0, rng).ravel() for _ in range(5)])
    power = np.abs(h) ** 2
    result = stats.kstest(power, "expon")
    assert result.pvalue > 0.01, f"|h|^2 not Exp(1): KS p={result.pvalue}"


def test_draw_channel_rejects_bad_variance(rng):
    with pytest.raises(ValueError):
        draw_channel(2, 2, 0.0, rng)
    with pytest.raises(ValueError):
        draw_channel(2, 2, -1.0, rng)
    with pytest.raises(ValueError):
        draw_channel(0, 2, 1.0, rng)


def test_csi_error_model_validation():
    with pytest.raises(ValueError):
        CsiErrorModel(beta=-0.1, alpha=0.5)
    with pytest.raises(ValueError):
        CsiErrorModel(beta=0.5, alpha=1.5)
    assert CsiErrorModel(beta=0.5, alpha=1.0).error_variance(10.0) == pytest.approx(0.05)
    assert CsiErrorModel(beta=0.5, alpha=1.0).error_variance(1.0) == pytest.approx(0.5)


def test_apply_csi_error_beta_zero_is_identity(rng):
    h = draw_channel(4, 4, 1.0, rng)
    h_est = apply_csi_error(h, CsiErrorModel(beta=0.0, alpha=0.0), energy=5.0, rng=rng)
    np.testing.assert_array_equal(h_est, h)


def test_apply_csi_error_variance(rng):
    h = draw_channel(200, 500, 1.0, rng)
    model = CsiErrorModel(beta=0.5, alpha=1.0)
    err = apply_csi_error(h, model, energy=1.0, rng=rng) - h
    assert abs(np.mean(np.abs(err) ** 2) - 0.5) < 0.01  # sigma_e^2 = 0.5 at E=1
    assert np.shares_memory(h, h) and not np.shares_memory(err, h)


@pytest.mark.parametrize("beta,alpha", [(0.5, 1.0), (0.2, 0.5)])
def test_csi_error_scaling_tracks_model(rng, beta, alpha):
    energy = 4.0
    model = CsiErrorModel(beta=beta, alpha=alpha)
    h = draw_channel(250, 400, 1.0, rng)
    err = apply_csi_error(h, model, energy, rng) - h
    target = beta * energy ** (-alpha)
    assert abs(np.mean(np.abs(err) ** 2) / target - 1.0) < 0.03


@pytest.mark.parametrize(
    "topo,ur_shape,ru_shape",
    [
        (Topology(1, 1, 1), (1, 1, 2, 2), (1, 1, 2, 1, 1)),
        (Topology(5, 10, 2), (5, 10, 4, 4), (5, 10, 2, 2, 2)),
    ],
)
def test_draw_slot_channels_shapes(rng, topo, ur_shape, ru_shape):
    real = draw_slot_channels(topo, 1.0, CsiErrorModel(), 1.0, rng, rng)
    assert real.ur_true.shape == ur_shape
    assert real.ru_true.shape == ru_shape
    assert real.ur_est.shape == ur_shape
    assert real.ru_est.shape == ru_shape
    assert np.all(np.isfinite(real.ur_true)) and np.all(np.isfinite(real.ru_true))


def test_draw_slot_channels_perfect_csi_estimates_equal_truth(rng):
    real = draw_slot_channels(Topology(2, 3, 2), 1.0, CsiErrorModel(), 1.0, rng, rng)
    np.testing.assert_array_equal(real.ur_est, real.ur_true)
    np.testing.assert_array_equal(real.ru_est, real.ru_true)


def test_draw_slot_channels_deterministic():
    topo = Topology(2, 3, 2)
    model = CsiErrorModel(beta=0.5, alpha=1.0)
    a = draw_slot_channels(topo, 1.0, model, 2.0,
                           np.random.default_rng(5), np.random.default_rng(6))
    b = draw_slot_channels(topo, 1.0, model, 2.0,
                           np.random.default_rng(5), np.random.default_rng(6))
    np.testing.assert_array_equal(a.ur_true, b.ur_true)
    np.testing.assert_array_equal(a.ur_est, b.ur_est)
    np.testing.assert_array_equal(a.ru_est, b.ru_est)


def test_distinct_links_uncorrelated(rng):
    slots = 10_000
    topo = Topology(1, 2, 1)
    a = np.empty(slots, dtype=complex)
    b = np.empty(slots, dtype=complex)
    c = np.empty(slots, dtype=complex)
    for i in range(slots):
        real = draw_slot_channels(topo, 1.0, CsiErrorModel(), 1.0, rng, rng)
        a[i] = real.ur_true[0, 0, 0, 0]
        b[i] = real.ur_true[0, 1, 0, 0]
        c[i] = real.ru_true[0, 0, 1, 0, 0]
    for x, y in ((a, b), (a, c), (b, c)):
        corr = np.corrcoef(np.abs(x), np.abs(y))[0, 1]
        assert abs(corr) < 0.05, f"link samples correlate: {corr}"
