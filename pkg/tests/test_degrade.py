import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from degrade.model import EPS_T, DegradationMatrices, apply_model, invert_model
from degrade.scenes import generate_clean
from degrade.sidecar import decode_matrices, encode_matrices, read_matrices, write_matrices
from degrade.simulate import LOWLIGHT_RANGE, DegradationKind, SimParams, simulate, simulate_matrices, synthetic_case
from errors import InvalidArgumentError, ShapeMismatchError, UnsupportedFormatError


def test_matrices_validate_ranges():
    with pytest.raises(InvalidArgumentError):
        DegradationMatrices(np.zeros((2, 2, 3)), np.zeros((2, 2, 3)))
    with pytest.raises(InvalidArgumentError):
        DegradationMatrices(np.ones((2, 2, 3)), np.full((2, 2, 3), 1.5))
    with pytest.raises(ShapeMismatchError):
        DegradationMatrices(np.ones((2, 2, 3)), np.zeros((2, 3, 3)))


def test_apply_model_clamps(clean_image):
    M = DegradationMatrices(np.ones(clean_image.shape), np.full(clean_image.shape, 0.9))
    O = apply_model(clean_image, M)
    assert O.data.max() <= 1.0
    assert O.data.min() >= 0.0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_invert_recovers_where_unclamped(seed):
    rng = np.random.default_rng(seed)
    shape = (8, 8, 3)
    T = rng.uniform(0.1, 1.0, shape)
    D = rng.uniform(0.0, 0.3, shape)
    B = rng.uniform(0.0, 0.6, shape)
    M = DegradationMatrices(T, D)
    recovered = invert_model(apply_model(B, M), M)
    assert np.max(np.abs(recovered.data - B)) <= 1e-3


def test_invert_requires_positive_eps(clean_image):
    M = DegradationMatrices.identity(clean_image.shape)
    with pytest.raises(InvalidArgumentError):
        invert_model(clean_image, M, eps=0.0)


def test_apply_model_shape_mismatch(clean_image):
    with pytest.raises(ShapeMismatchError):
        apply_model(clean_image, DegradationMatrices.identity((4, 4, 3)))


def test_generate_clean_is_seeded():
    a = generate_clean(24, 32, 5)
    b = generate_clean(24, 32, 5)
    c = generate_clean(24, 32, 6)
    assert a.shape == (24, 32, 3)
    np.testing.assert_array_equal(a.data, b.data)
    assert not np.array_equal(a.data, c.data)
    assert 0.0 <= a.data.min() and a.data.max() <= 1.0


def test_simulate_is_deterministic(kind):
    B = generate_clean(32, 32, 0)
    O1, M1 = simulate(B, SimParams(kind=kind, seed=11))
    O2, M2 = simulate(B, {"kind": kind.value, "seed": 11})
    np.testing.assert_array_equal(O1.data, O2.data)
    np.testing.assert_array_equal(M1.T, M2.T)


def test_rain_matrices_are_sparse_additive():
    M = simulate(generate_clean(64, 64, 0), SimParams(kind="rain", seed=0))[1]
    np.testing.assert_array_equal(M.T, 1.0)
    assert M.D.max() <= 0.6
    assert M.D.max() > 0.0


@pytest.mark.parametrize("size", [32, 48, 64, 128])
def test_rain_sparsity_holds_at_every_size(size):
    p = SimParams(kind="rain")
    for seed in range(20):
        M = simulate_matrices(size, size, p.with_seed(seed))
        assert np.mean(M.D[..., 0] == 0.0) >= 0.9, seed


def test_streak_count_scales_with_area_unless_fixed():
    density = SimParams(kind="rain").rain
    assert density.count_for(64, 64) == 10
    assert density.count_for(128, 128) == 4 * density.count_for(64, 64)
    fixed = SimParams.from_dict({"kind": "rain", "rain": {"streak_count": 3}}).rain
    assert fixed.count_for(128, 128) == 3
    assert np.all(simulate_matrices(32, 32, SimParams(kind="rain", rain={"streak_count": 0})).D == 0.0)


def test_haze_airlight_term():
    p = SimParams(kind="haze", seed=2)
    M = simulate(generate_clean(32, 32, 0), p)[1]
    np.testing.assert_allclose(M.D, (1.0 - M.T) * p.haze.atmospheric_light)
    assert M.T.min() >= EPS_T


def test_lowlight_illumination_range():
    M = simulate(generate_clean(32, 32, 0), SimParams(kind="lowlight", seed=2))[1]
    lo, hi = LOWLIGHT_RANGE
    assert lo - 1e-12 <= M.T.min() and M.T.max() <= hi + 1e-12
    np.testing.assert_array_equal(M.D, 0.0)


def test_sim_params_reject_unknown_keys():
    with pytest.raises(InvalidArgumentError):
        SimParams.from_dict({"kind": "rain", "rain": {"streaks": 3}})
    with pytest.raises(InvalidArgumentError):
        SimParams.from_dict({"kind": "snow"})


def test_synthetic_case_shares_matrices(kind):
    O, B, (O_ref, B_ref), M = synthetic_case(kind, 4, 32)
    np.testing.assert_array_equal(O.data, apply_model(B, M).data)
    np.testing.assert_array_equal(O_ref.data, apply_model(B_ref, M).data)
    assert not np.array_equal(B.data, B_ref.data)


def test_sidecar_file_round_trip(tmp_path, case):
    _, _, _, _, M = case
    path = write_matrices(tmp_path / "m.drmtd", M)
    loaded = read_matrices(path)
    np.testing.assert_array_equal(loaded.T, M.T)
    np.testing.assert_array_equal(loaded.D, M.D)
    assert path.read_bytes()[:6] == b"DRMTD1"


def test_sidecar_rejects_bad_payloads():
    payload = encode_matrices(DegradationMatrices.identity((2, 3, 3)))
    with pytest.raises(UnsupportedFormatError):
        decode_matrices(payload[:-8])
    with pytest.raises(UnsupportedFormatError):
        decode_matrices(b"XXXXXX" + payload[6:])
    assert decode_matrices(payload).shape == (2, 3, 3)
