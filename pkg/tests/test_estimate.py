import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from config.settings import EstimateConfig
from degrade.model import EPS_T, DegradationMatrices, apply_model, invert_model
from degrade.simulate import DegradationKind, SimParams, simulate
from degrade.scenes import generate_clean
from estimate.classify import atmospheric_light, classify, dark_channel, directional_energy_ratio
from estimate.initial import estimate_initial, init_state
from metrics.report import classifier_accuracy


def striped(height=64, width=64, spacing=6):
    img = np.full((height, width, 3), 0.5)
    img[:, ::spacing] = 0.8
    return img


def test_dark_image_is_lowlight():
    assert classify(np.full((32, 32, 3), 0.05)) is DegradationKind.LOWLIGHT


def test_vertical_streaks_are_rain():
    img = striped()
    assert directional_energy_ratio(img) > 1.5
    assert classify(img) is DegradationKind.RAIN


def test_flat_bright_image_is_haze():
    img = np.full((32, 32, 3), 0.8)
    assert directional_energy_ratio(img) == 0.0
    assert classify(img) is DegradationKind.HAZE


def test_thresholds_come_from_config():
    img = np.full((32, 32, 3), 0.3)
    assert classify(img) is DegradationKind.HAZE
    assert classify(img, EstimateConfig(lowlight_luminance=0.5)) is DegradationKind.LOWLIGHT


def test_dark_channel_of_constant_colour():
    img = np.broadcast_to([0.7, 0.2, 0.9], (10, 10, 3))
    np.testing.assert_allclose(dark_channel(img, 3), 0.2)


def test_atmospheric_light_picks_haziest_pixels():
    img = np.full((40, 40, 3), 0.1)
    img[:5, :5] = [0.9, 0.85, 0.8]
    np.testing.assert_allclose(atmospheric_light(img, EstimateConfig(dark_channel_patch=3)), [0.9, 0.85, 0.8])


def test_initial_estimates_respect_the_model(kind):
    O, _ = simulate(generate_clean(32, 32, 1), SimParams(kind=kind, seed=1))
    M0 = estimate_initial(O, kind)
    assert M0.shape == O.shape
    assert M0.T.min() >= EPS_T and M0.T.max() <= 1.0
    if kind is DegradationKind.RAIN:
        np.testing.assert_array_equal(M0.T, 1.0)
        assert M0.D.min() >= 0.0
    elif kind is DegradationKind.HAZE:
        hazy = M0.T[..., 0] < 0.99
        assert hazy.any()
        airlight = (M0.D / np.maximum(1.0 - M0.T, 1e-12))[hazy]
        assert np.all(airlight.std(axis=0) < 1e-9)
    else:
        np.testing.assert_array_equal(M0.D, 0.0)


def test_init_state_defaults_and_cursory(case):
    kind, O, _, _, M = case
    state = init_state(O, M)
    np.testing.assert_array_equal(state.B, O.data)
    np.testing.assert_array_equal(state.Z, state.B)
    np.testing.assert_array_equal(state.P, M.T)
    np.testing.assert_array_equal(state.Q, M.D)
    assert state.k == 0
    cursory = init_state(O, M, cursory=True)
    np.testing.assert_array_equal(cursory.B, invert_model(O, M).data)


@pytest.mark.slow
def test_classifier_accuracy_on_simulated_images():
    true, predicted = [], []
    for kind in DegradationKind:
        for seed in range(100):
            O, _ = simulate(generate_clean(64, 64, seed), SimParams(kind=kind, seed=seed))
            true.append(kind)
            predicted.append(classify(O))
    accuracy, recall, _ = classifier_accuracy(true, predicted)
    assert accuracy >= 0.95, recall


def test_lowlight_illumination_tracks_a_uniform_exposure():
    for seed in range(10):
        B = generate_clean(64, 64, seed)
        O = apply_model(B, DegradationMatrices(np.full(B.shape, 0.25), np.zeros(B.shape)))
        T0 = estimate_initial(O, DegradationKind.LOWLIGHT).T
        assert abs(T0.mean() - 0.25) <= 0.1, seed


def test_haze_transmission_correlates_with_ground_truth():
    correlated = 0
    for seed in range(50):
        O, M = simulate(generate_clean(64, 64, seed), SimParams(kind="haze", seed=seed))
        T0 = estimate_initial(O, DegradationKind.HAZE).T
        r = np.corrcoef(T0[..., 0].ravel(), M.T[..., 0].ravel())[0, 1]
        correlated += r >= 0.5
    assert correlated >= 45


@settings(max_examples=30, deadline=None)
@given(value=st.floats(0.0, 1.0), height=st.integers(8, 40), width=st.integers(8, 40))
def test_constant_images_classify_the_same_transposed(value, height, width):
    img = np.full((height, width, 3), value)
    assert classify(img) is classify(img.transpose(1, 0, 2))
