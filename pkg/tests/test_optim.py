import numpy as np

from sem_a2c.nn import Parameter
from sem_a2c.training import RMSProp


def test_zero_gradient_leaves_parameters_unchanged():
    p = Parameter(np.array([1.0, -2.0, 3.0]))
    before = p.value.copy()
    opt = RMSProp({"p": p}, learning_rate=0.1)
    opt.step({"p": p})
    np.testing.assert_array_equal(p.value, before)


def test_frozen_parameter_bit_identical_despite_gradient():
    p = Parameter(np.array([1.0, -2.0]), frozen=True)
    before = p.value.tobytes()
    opt = RMSProp({"p": p}, learning_rate=0.1)
    for _ in range(10):
        p.grad[...] = 5.0
        opt.step({"p": p})
    assert p.value.tobytes() == before


def test_matches_hand_computed_recurrence_three_steps():
    # s_k = 0.99 s_{k-1} + 0.01 g^2; x_k = x_{k-1} - lr g / (sqrt(s_k) + eps)
    lr, decay, eps, g = 0.05, 0.99, 1e-5, 2.0
    x, s = 1.0, 0.0
    expected = []
    for _ in range(3):
        s = decay * s + (1.0 - decay) * g * g
        x = x - lr * g / (np.sqrt(s) + eps)
        expected.append(x)

    p = Parameter(np.array([1.0]))
    opt = RMSProp({"p": p}, learning_rate=lr, decay=decay, eps=eps, clip_norm=0.0)
    got = []
    for _ in range(3):
        p.grad[...] = g
        opt.step({"p": p})
        got.append(float(p.value[0]))
    np.testing.assert_allclose(got, expected, rtol=1e-12)


def test_global_norm_clipping_applied_before_update():
    pa = Parameter(np.array([0.0]))
    pb = Parameter(np.array([0.0]))
    params = {"a": pa, "b": pb}
    opt = RMSProp(params, learning_rate=1.0, decay=0.0, eps=0.0, clip_norm=1.0)
    pa.grad[...] = 3.0
    pb.grad[...] = 4.0
    norm = opt.step(params)  # norm 5 -> scale 1/5
    assert norm == 5.0
    # with decay 0, s = g_clipped^2 so the step is exactly lr * sign(g)
    np.testing.assert_allclose(pa.value, [-1.0])
    np.testing.assert_allclose(pb.value, [-1.0])
    # accumulators saw the clipped gradients
    np.testing.assert_allclose(opt._sq["a"], [(3 / 5) ** 2])


def test_frozen_excluded_from_global_norm():
    pa = Parameter(np.array([0.0]))
    pf = Parameter(np.array([0.0]), frozen=True)
    params = {"a": pa, "f": pf}
    opt = RMSProp(params, learning_rate=1.0, clip_norm=0.0)
    pa.grad[...] = 3.0
    pf.grad[...] = 4.0
    assert opt.step(params) == 3.0
