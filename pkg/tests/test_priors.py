import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from degrade.model import EPS_T
from errors import ConvergenceError, InvalidArgumentError
from oracle.suite import check_tikhonov_dense
from priors.operators import TV, BoxClamp, Identity, SoftThreshold, Tikhonov, prox, total_variation
from priors.profiles import PriorTable, TaskPriorProfile, apply_prior_B, apply_prior_TD

finite = st.floats(-2.0, 2.0, allow_nan=False)


def test_identity_returns_a_copy():
    z = np.array([0.1, 0.2])
    out = Identity().prox(z, 1.0)
    out[0] = 5.0
    assert z[0] == 0.1


def test_box_clamp_projects():
    np.testing.assert_array_equal(BoxClamp(lo=0.2, hi=0.8).prox(np.array([0.0, 0.5, 1.0]), 1.0), [0.2, 0.5, 0.8])
    with pytest.raises(ValidationError):
        BoxClamp(lo=1.0, hi=0.0)


def test_soft_threshold_values():
    out = SoftThreshold(lam=0.1).prox(np.array([0.3, -0.3, 0.01]), 1.0)
    np.testing.assert_allclose(out, [0.2, -0.2, 0.0])


@settings(max_examples=200)
@given(z=finite, lam=st.floats(0.0, 1.0), gamma=st.floats(0.1, 2.0), delta=st.floats(-0.5, 0.5))
def test_soft_threshold_minimises_its_objective(z, lam, gamma, delta):
    op = SoftThreshold(lam=lam)
    z = np.array([z])
    x = op.prox(z, gamma)
    assert op.objective(x, z, gamma) <= op.objective(x + delta, z, gamma) + 1e-12


@settings(max_examples=100)
@given(a=finite, b=finite, lam=st.floats(0.0, 1.0), gamma=st.floats(0.1, 2.0))
def test_soft_threshold_is_non_expansive(a, b, lam, gamma):
    op = SoftThreshold(lam=lam)
    xa, xb = op.prox(np.array([a]), gamma), op.prox(np.array([b]), gamma)
    assert abs(xa[0] - xb[0]) <= abs(a - b) + 1e-12


@pytest.mark.parametrize("op", [Identity(), BoxClamp(), Tikhonov(lam=0.7), TV(lam=0.1)], ids=lambda op: op.kind)
def test_constants_are_fixed_points(op):
    z = np.full((9, 7, 3), 0.35)
    np.testing.assert_allclose(op.prox(z, 0.8), z, atol=1e-9)


def test_soft_threshold_shrinks_constants():
    z = np.full((4, 4), 0.35)
    np.testing.assert_allclose(SoftThreshold(lam=0.1).prox(z, 0.5), 0.15)


def test_tikhonov_matches_dense_solve(rng):
    assert check_tikhonov_dense(rng) <= 1e-8


def test_tikhonov_output_is_a_local_average(rng):
    z = rng.uniform(0.2, 0.7, (12, 10, 3))
    x = Tikhonov(lam=2.0).prox(z, 0.5)
    assert x.min() >= 0.2 - 1e-9 and x.max() <= 0.7 + 1e-9
    op = Tikhonov(lam=2.0)
    assert op.objective(x, z, 0.5) <= op.objective(z, z, 0.5)


def test_tikhonov_zero_lambda_and_zero_input():
    z = np.zeros((5, 5))
    np.testing.assert_array_equal(Tikhonov(lam=0.5).prox(z, 1.0), z)
    y = np.full((5, 5), 0.3)
    np.testing.assert_array_equal(Tikhonov(lam=0.0).prox(y, 1.0), y)


def test_tv_decreases_objective_on_noisy_blocks(rng):
    z = np.zeros((24, 24, 3))
    z[6:18, 6:18] = 0.8
    impulses = rng.random(z.shape[:2]) < 0.05
    z[impulses] = 1.0
    op = TV(lam=0.1, inner_iters=100)
    x = op.prox(z, 1.0)
    assert op.objective(x, z, 1.0) < op.objective(z, z, 1.0)
    assert total_variation(x) < total_variation(z)


def test_prox_validates_inputs():
    with pytest.raises(InvalidArgumentError):
        prox(Identity(), np.zeros(3), 0.0)
    with pytest.raises(InvalidArgumentError):
        prox(Identity(), np.array([np.nan]), 1.0)


def test_profile_parses_discriminated_union():
    profile = TaskPriorProfile.model_validate({
        "B": {"kind": "tv", "lambda": 0.1},
        "T": {"kind": "box_clamp", "lo": 1.0, "hi": 1.0},
        "D": {"kind": "soft_threshold", "lambda": 0.2},
    })
    assert isinstance(profile.B, TV) and profile.B.lam == 0.1
    assert isinstance(profile.D, SoftThreshold) and profile.D.lam == 0.2
    assert not profile.exact
    with pytest.raises(ValidationError):
        TaskPriorProfile.model_validate({"B": {"kind": "median"}, "T": {"kind": "identity"}, "D": {"kind": "identity"}})
    with pytest.raises(ValidationError):
        TaskPriorProfile.model_validate({"B": {"kind": "tv", "strength": 1}, "T": {"kind": "identity"},
                                         "D": {"kind": "identity"}})


def test_prior_table_dump_reloads():
    table = PriorTable()
    reloaded = PriorTable.model_validate(table.model_dump(mode="json", by_alias=True))
    assert reloaded == table
    assert isinstance(table.for_kind("rain").T, BoxClamp)


def test_apply_priors_clamp(rng):
    profile = TaskPriorProfile(B=Identity(), T=Identity(), D=Identity())
    B = apply_prior_B(profile, np.array([-0.5, 0.5, 1.5]), 1.0)
    np.testing.assert_array_equal(B, [0.0, 0.5, 1.0])
    T, D = apply_prior_TD(profile, np.array([0.0, 2.0]), np.array([-3.0, 3.0]), 0.5, 0.5)
    np.testing.assert_array_equal(T, [EPS_T, 1.0])
    np.testing.assert_array_equal(D, [-1.0, 1.0])
    with pytest.raises(InvalidArgumentError):
        apply_prior_TD(profile, T, D, 0.0, 0.5)


@settings(max_examples=100)
@given(z=finite, gamma=st.floats(0.1, 2.0), delta=st.floats(-0.5, 0.5), lo=st.floats(-1.0, 0.5), width=st.floats(0.0, 1.0))
def test_box_clamp_and_identity_minimise_their_objectives(z, gamma, delta, lo, width):
    z = np.array([z])
    box = BoxClamp(lo=lo, hi=lo + width)
    x = box.prox(z, gamma)
    candidate = np.clip(x + delta, box.lo, box.hi)
    assert box.objective(x, z, gamma) <= box.objective(candidate, z, gamma) + 1e-12
    x = Identity().prox(z, gamma)
    assert Identity().objective(x, z, gamma) <= Identity().objective(x + delta, z, gamma)


@settings(max_examples=100)
@given(a=finite, b=finite, gamma=st.floats(0.1, 2.0))
def test_box_clamp_and_identity_are_non_expansive(a, b, gamma):
    for op in (BoxClamp(lo=-0.3, hi=0.6), Identity()):
        xa, xb = op.prox(np.array([a]), gamma), op.prox(np.array([b]), gamma)
        assert abs(xa[0] - xb[0]) <= abs(a - b) + 1e-12


def test_tikhonov_reports_cg_non_convergence():
    z = np.random.default_rng(3).uniform(size=(16, 16, 3))
    with pytest.raises(ConvergenceError) as info:
        Tikhonov(lam=5.0, cg_max_iter=1).prox(z, 1.0)
    assert info.value.exit_code == 4
    assert info.value.iterations == 1
    assert info.value.residual > info.value.tolerance
