import numpy as np
import pytest

from sem_a2c.nn import (
    Parameter,
    affine_backward,
    affine_forward,
    flstm_backward,
    flstm_forward,
    grad_check,
    lstm_backward,
    lstm_forward,
)


def make_affine_loss(rng, n_in=4, n_out=3):
    x = rng.normal(size=n_in)
    target = rng.normal(size=n_out)

    def loss(p):
        for q in p.values():
            q.zero_grad()
        y, cache = affine_forward(x, p["w"], p["b"])
        r = y - target
        affine_backward(2.0 * r, cache, p["w"], p["b"])
        return float(r @ r)

    return loss


def test_affine_squared_loss_under_1e_6():
    rng = np.random.default_rng(50)
    params = {
        "w": Parameter(rng.normal(size=(3, 4))),
        "b": Parameter(rng.normal(size=3)),
    }
    report = grad_check(make_affine_loss(rng), params, eps=1e-5)
    assert report.max_rel_error < 1e-6, report.format()


def test_frozen_parameter_still_checked_and_flagged():
    rng = np.random.default_rng(51)
    params = {
        "w": Parameter(rng.normal(size=(3, 4)), frozen=True),
        "b": Parameter(rng.normal(size=3)),
    }
    report = grad_check(make_affine_loss(rng), params, eps=1e-5)
    by_name = {c.name: c for c in report.checks}
    assert by_name["w"].frozen and not by_name["b"].frozen
    assert by_name["w"].max_rel_error < 1e-6  # analytic grad still reported
    assert "frozen" in report.format()


def test_non_finite_loss_names_parameter():
    params = {"w": Parameter(np.array([1.0]))}

    def bad(p):
        p["w"].zero_grad()
        if p["w"].value[0] > 1.0:
            return float("nan")
        return float(p["w"].value[0])

    with pytest.raises(FloatingPointError, match="w"):
        grad_check(bad, params, eps=1e-5)


def test_grads_left_intact_after_check():
    rng = np.random.default_rng(52)
    params = {
        "w": Parameter(rng.normal(size=(3, 4))),
        "b": Parameter(rng.normal(size=3)),
    }
    loss = make_affine_loss(rng)
    grad_check(loss, params, eps=1e-5)
    saved = {k: p.grad.copy() for k, p in params.items()}
    for q in params.values():
        q.zero_grad()
    loss(params)
    for k in params:
        np.testing.assert_array_equal(saved[k], params[k].grad)


def every_layer_fd_cases(seed):
    """One fd-checkable scalar function per layer type, randomly sized."""
    rng = np.random.default_rng(seed)
    cases = []

    w = Parameter(rng.normal(size=(3, 4)))
    b = Parameter(rng.normal(size=3))
    cases.append(({"w": w, "b": b}, make_affine_loss(rng)))

    hdim, in_dim = 3, 4
    wl = Parameter(rng.normal(size=(4 * hdim, in_dim + hdim)))
    bl = Parameter(rng.normal(size=4 * hdim))
    x = rng.normal(size=in_dim)
    h0, c0 = rng.normal(size=hdim), rng.normal(size=hdim)
    ph, pc = rng.normal(size=hdim), rng.normal(size=hdim)

    def lstm_loss(p):
        for q in p.values():
            q.zero_grad()
        (h, c), cache = lstm_forward(x, h0, c0, p["w"], p["b"])
        lstm_backward(ph, pc, cache, p["w"], p["b"])
        return float(ph @ h + pc @ c)

    cases.append(({"w": wl, "b": bl}, lstm_loss))

    rank = 3
    w1 = Parameter(rng.normal(size=(4 * hdim, rank)))
    w2 = Parameter(rng.normal(size=(rank, in_dim + hdim)))
    bf = Parameter(rng.normal(size=4 * hdim))
    vf = Parameter(rng.normal(size=rank))

    def flstm_loss(p):
        for q in p.values():
            q.zero_grad()
        (h, c), cache = flstm_forward(x, h0, c0, p["v"].value, p["w1"], p["w2"], p["b"])
        _, _, _, dv = flstm_backward(ph, pc, cache, p["w1"], p["w2"], p["b"])
        p["v"].grad += dv
        return float(ph @ h + pc @ c)

    cases.append(({"w1": w1, "w2": w2, "b": bf, "v": vf}, flstm_loss))
    return cases


@pytest.mark.parametrize("seed", range(20))
def test_every_layer_fd_over_seeds(seed):
    for params, loss in every_layer_fd_cases(seed):
        report = grad_check(loss, params, eps=1e-5)
        assert report.max_rel_error < 1e-4, report.format()
