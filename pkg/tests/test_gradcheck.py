from __future__ import annotations

from typing import Any

import numpy as np
import pytest

from fusion_gan.engine import (
    GRADCHECK_REGISTRY,
    GradTape,
    ParamSet,
    Tensor,
    adam_step,
    mean_sq,
    numerical_gradient,
    relative_error,
    run_gradcheck,
)
from fusion_gan.engine import ops
from fusion_gan.errors import ContractError
from fusion_gan.nets import NetConfig, generator_forward, init_params

DIFFERENTIABLE_OPS = {
    "conv2d",
    "transposed_conv2d",
    "leaky_relu",
    "relu",
    "tanh_unit",
    "instance_norm",
    "min_pool2d",
    "concat_channels",
    "slice_channels",
    "add",
    "scale",
    "sum_all",
    "weighted_sum",
    "mean_l1",
    "mean_sq",
}


def test_registry_covers_every_op() -> None:
    assert set(GRADCHECK_REGISTRY) == DIFFERENTIABLE_OPS


def test_full_suite_passes() -> None:
    results = run_gradcheck(seed=0)
    assert [r.op for r in results] == list(GRADCHECK_REGISTRY)
    for r in results:
        assert r.instances == 5
        assert r.passed, f"{r.op}: {r.max_rel_error:.3e}"


def test_filter_runs_only_named_op() -> None:
    results = run_gradcheck(seed=0, ops_filter=["conv2d"])
    assert [r.op for r in results] == ["conv2d"]
    assert results[0].max_rel_error < 1e-6


def test_filter_does_not_change_cases() -> None:
    alone = run_gradcheck(seed=4, ops_filter=["instance_norm"], instances=2)[0]
    together = {r.op: r for r in run_gradcheck(seed=4, ops_filter=["add", "instance_norm"], instances=2)}
    assert alone.max_rel_error == together["instance_norm"].max_rel_error


def test_unknown_op_is_rejected() -> None:
    with pytest.raises(ContractError):
        run_gradcheck(ops_filter=["conv3d"])


def test_corrupted_backward_rule_is_detected(monkeypatch: Any) -> None:
    def bad_backward(self: Any, grad: np.ndarray) -> Any:
        return (grad * self.factor * 1.5,)

    monkeypatch.setattr(ops.Scale, "backward", bad_backward)
    results = {r.op: r for r in run_gradcheck(seed=0, ops_filter=["scale", "add"])}
    assert not results["scale"].passed
    assert results["add"].passed


def test_relative_error_is_absolute_below_the_floor() -> None:
    assert relative_error(np.array([1e-3]), np.array([0.0])) == pytest.approx(1e-3)
    assert relative_error(np.array([200.0]), np.array([202.0])) == pytest.approx(2.0 / 202.0)
    small_a, small_n = np.array([2e-6]), np.array([1e-6])
    assert relative_error(small_a, small_n) == pytest.approx(1e-6)
    assert relative_error(small_a, small_n, floor=1e-8) == pytest.approx(0.5)
    with pytest.raises(ContractError):
        relative_error(small_a, small_n, floor=0.0)


def test_numerical_gradient_restores_input() -> None:
    t = Tensor([1.0, -2.0])
    before = t.numpy()
    g = numerical_gradient(lambda: float((t.data**2).sum()), t)
    np.testing.assert_array_equal(t.data, before)
    np.testing.assert_allclose(g, [2.0, -4.0], atol=1e-8)


def test_generator_gradient_matches_finite_differences() -> None:
    cfg = NetConfig(res=16, width=2)
    g, _ = init_params(3, cfg)
    rng = np.random.default_rng(8)
    x = Tensor(rng.uniform(size=(3, 16, 16)))
    y = Tensor(rng.uniform(size=(3, 16, 16)))

    def loss() -> Tensor:
        return mean_sq(generator_forward(g, x, y), 0.3)

    with GradTape() as tape:
        tape.backward(loss())
    names = g.names()
    picks = rng.choice(len(names), size=5, replace=False)
    for idx in picks:
        t = g[names[int(idx)]]
        flat = int(rng.integers(t.size))
        analytic = t.grad.reshape(-1)[flat]  # type: ignore[union-attr]
        orig = t.data.reshape(-1)[flat]
        t.data.reshape(-1)[flat] = orig + 1e-5
        plus = loss().item()
        t.data.reshape(-1)[flat] = orig - 1e-5
        minus = loss().item()
        t.data.reshape(-1)[flat] = orig
        numeric = (plus - minus) / 2e-5
        assert relative_error(np.array([analytic]), np.array([numeric])) < 1e-4


def _scalar_params(value: float) -> ParamSet:
    p = ParamSet()
    p.add("w", np.array([value]))
    return p


def test_adam_zero_gradient_keeps_params_and_counts_step() -> None:
    p = _scalar_params(1.5)
    p["w"].grad = np.zeros(1)
    adam_step(p)
    assert p["w"].data[0] == 1.5
    assert p.step == 1
    assert p["w"].grad is None


def test_adam_first_step_closed_form() -> None:
    p = _scalar_params(0.0)
    p["w"].grad = np.ones(1)
    adam_step(p, lr=0.1)
    assert p["w"].data[0] == pytest.approx(-0.1, abs=1e-8)


def test_adam_converges_on_quadratic() -> None:
    p = _scalar_params(0.0)
    for _ in range(100):
        with GradTape() as tape:
            tape.backward(mean_sq(p["w"], 3.0))
        adam_step(p, lr=0.1)
    assert abs(p["w"].data[0] - 3.0) < 0.05


def test_adam_missing_gradient() -> None:
    p = _scalar_params(0.0)
    p.add("v", np.zeros(2))
    p["w"].grad = np.ones(1)
    with pytest.raises(ContractError, match="v"):
        adam_step(p)


def test_param_set_frozen_and_duplicates() -> None:
    p = _scalar_params(1.0)
    with pytest.raises(ContractError):
        p.add("w", np.zeros(1))
    with p.frozen():
        assert not p["w"].requires_grad
    assert p["w"].requires_grad
