import numpy as np
import pytest

from sinir.errors import ShapeError
from sinir.optim import AdamState, adam_step


def test_zero_gradient_leaves_params_unchanged():
    p = {"w": np.array([1.0, -2.0, 3.0])}
    before = p["w"].copy()
    adam_step(p, {"w": np.zeros(3)}, AdamState(lr=0.1))
    assert np.array_equal(p["w"], before)


@pytest.mark.parametrize("g", [1e-3, -0.5, 7.0])
def test_first_step_moves_by_lr(g):
    p = {"w": np.array([0.0])}
    adam_step(p, {"w": np.array([g])}, AdamState(lr=1e-3))
    # m_hat / sqrt(v_hat) = g / |g| on the first step
    assert p["w"][0] == pytest.approx(-np.sign(g) * 1e-3 * abs(g) / (abs(g) + 1e-8), rel=1e-12)


def test_matches_hand_rolled_reference(nprng):
    grads = nprng.normal(size=(5, 4))
    p = {"w": np.ones(4)}
    st = AdamState(lr=0.01)
    ref, m, v = np.ones(4), np.zeros(4), np.zeros(4)
    for t, g in enumerate(grads, 1):
        adam_step(p, {"w": g}, st)
        m = 0.5 * m + 0.5 * g
        v = 0.999 * v + 0.001 * g * g
        ref = ref - 0.01 * (m / (1 - 0.5 ** t)) / (np.sqrt(v / (1 - 0.999 ** t)) + 1e-8)
    np.testing.assert_allclose(p["w"], ref, rtol=1e-14)
    assert st.t == 5


def test_identical_sequences_identical_trajectories(nprng):
    grads = nprng.normal(size=(10, 3))
    runs = []
    for _ in range(2):
        p, st = {"w": np.zeros(3)}, AdamState(lr=1e-2)
        for g in grads:
            adam_step(p, {"w": g.copy()}, st)
        runs.append(p["w"])
    assert np.array_equal(*runs)


def test_state_dict_round_trip(nprng):
    p, st = {"w": np.zeros(3)}, AdamState(lr=1e-2)
    adam_step(p, {"w": nprng.normal(size=3)}, st)
    clone = AdamState.from_state_dict(st.state_dict())
    q = {"w": p["w"].copy()}
    g = nprng.normal(size=3)
    adam_step(p, {"w": g}, st)
    adam_step(q, {"w": g}, clone)
    assert np.array_equal(p["w"], q["w"])


def test_shape_and_name_mismatch():
    with pytest.raises(ShapeError):
        adam_step({"w": np.zeros(3)}, {"w": np.zeros(4)}, AdamState())
    with pytest.raises(ShapeError):
        adam_step({"w": np.zeros(3)}, {"v": np.zeros(3)}, AdamState())


def test_minimises_quadratic():
    p, st = {"w": np.array([3.0, -4.0])}, AdamState(lr=0.05)
    for _ in range(2000):
        adam_step(p, {"w": 2 * p["w"]}, st)
    assert np.abs(p["w"]).max() < 0.05
