from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fusion_gan.engine import (
    GradTape,
    Tensor,
    add,
    backward,
    concat_channels,
    conv2d,
    instance_norm,
    leaky_relu,
    mean_l1,
    mean_sq,
    min_pool2d,
    relu,
    slice_channels,
    sum_all,
    tanh_unit,
    transposed_conv2d,
    weighted_sum,
)
from fusion_gan.errors import ContractError, DimensionError


def test_conv2d_zero_input_gives_bias_per_channel() -> None:
    rng = np.random.default_rng(1)
    x = Tensor(np.zeros((1, 4, 4)))
    k = Tensor(rng.normal(size=(2, 1, 3, 3)))
    b = Tensor([0.5, -1.0])
    out = conv2d(x, k, b)
    assert out.shape == (2, 2, 2)
    assert np.all(out.data[0] == 0.5)
    assert np.all(out.data[1] == -1.0)


def test_conv2d_sum_of_ones() -> None:
    out = conv2d(Tensor(np.ones((1, 3, 3))), Tensor(np.ones((1, 1, 3, 3))), Tensor([0.0]))
    assert out.shape == (1, 1, 1)
    assert out.data[0, 0, 0] == 9.0


def test_conv2d_output_size_with_stride_and_pad() -> None:
    out = conv2d(Tensor(np.ones((2, 7, 5))), Tensor(np.ones((3, 2, 3, 3))), Tensor(np.zeros(3)), stride=2, pad=1)
    assert out.shape == (3, 4, 3)


def test_conv2d_channel_mismatch_names_axis() -> None:
    with pytest.raises(DimensionError) as ei:
        conv2d(Tensor(np.ones((2, 4, 4))), Tensor(np.ones((1, 3, 3, 3))), Tensor([0.0]))
    assert ei.value.axis == "channels"


def test_conv2d_kernel_larger_than_input() -> None:
    with pytest.raises(DimensionError) as ei:
        conv2d(Tensor(np.ones((1, 2, 5))), Tensor(np.ones((1, 1, 3, 3))), Tensor([0.0]))
    assert ei.value.axis == "height"


def test_transposed_conv2d_single_pixel_broadcast() -> None:
    out = transposed_conv2d(
        Tensor(np.full((1, 1, 1), 0.7)), Tensor(np.ones((1, 1, 2, 2))), Tensor([0.0]), stride=2
    )
    assert out.shape == (1, 2, 2)
    assert np.all(out.data == 0.7)


def test_transposed_conv2d_zero_kernel_is_bias() -> None:
    out = transposed_conv2d(
        Tensor(np.ones((2, 3, 3))), Tensor(np.zeros((2, 2, 4, 4))), Tensor([0.25, -0.5]), stride=2, pad=1
    )
    assert out.shape == (2, 6, 6)
    assert np.all(out.data[0] == 0.25)
    assert np.all(out.data[1] == -0.5)


def test_transposed_conv2d_input_grad_is_conv2d_of_output_grad() -> None:
    rng = np.random.default_rng(3)
    x = Tensor(rng.normal(size=(2, 3, 3)), requires_grad=True)
    k = rng.normal(size=(2, 3, 4, 4))
    out_grad = rng.normal(size=(3, 6, 6))
    with GradTape() as tape:
        tape.backward(weighted_sum(transposed_conv2d(x, Tensor(k), Tensor(np.zeros(3)), stride=2, pad=1), out_grad))
    # conv2d with an (F=2, C=3) kernel is the same array viewed as (C_in=2, F_out=3)
    expected = conv2d(Tensor(out_grad), Tensor(k), Tensor(np.zeros(2)), stride=2, pad=1)
    assert x.grad is not None
    np.testing.assert_allclose(x.grad, expected.data, atol=1e-12)


def test_leaky_relu_values() -> None:
    np.testing.assert_array_equal(leaky_relu(Tensor([-1.0, 0.0, 2.0]), 0.2).data, [-0.2, 0.0, 2.0])
    np.testing.assert_array_equal(relu(Tensor([-3.0, 5.0])).data, [0.0, 5.0])


def test_leaky_relu_rejects_slope_outside_unit_interval() -> None:
    with pytest.raises(ContractError):
        leaky_relu(Tensor([1.0]), 1.0)


def test_tanh_unit_range() -> None:
    out = tanh_unit(Tensor(np.linspace(-50, 50, 11)))
    assert out.data.min() >= 0.0 and out.data.max() <= 1.0
    assert tanh_unit(Tensor([0.0])).data[0] == 0.5


def test_instance_norm_constant_channel_gives_shift() -> None:
    x = Tensor(np.full((2, 4, 4), 3.0))
    out = instance_norm(x, Tensor([2.0, 1.0]), Tensor([0.3, -0.7]))
    np.testing.assert_allclose(out.data[0], 0.3, atol=1e-12)
    np.testing.assert_allclose(out.data[1], -0.7, atol=1e-12)


def test_instance_norm_standardises() -> None:
    rng = np.random.default_rng(5)
    x = Tensor(rng.normal(2.0, 3.0, size=(3, 8, 8)))
    out = instance_norm(x, Tensor(np.ones(3)), Tensor(np.zeros(3)))
    assert np.all(np.abs(out.data.mean(axis=(1, 2))) < 1e-9)
    np.testing.assert_allclose(out.data.var(axis=(1, 2)), 1.0, atol=1e-5)


def test_instance_norm_needs_two_spatial_elements() -> None:
    with pytest.raises(ContractError):
        instance_norm(Tensor(np.ones((1, 1, 1))), Tensor([1.0]), Tensor([0.0]))


def test_min_pool2d_worked_example() -> None:
    out = min_pool2d(Tensor([[[0.2, 0.9], [0.5, 0.1]]]), 2)
    assert out.shape == (1, 1, 1)
    assert out.data[0, 0, 0] == 0.1


def test_min_pool2d_matches_brute_force() -> None:
    rng = np.random.default_rng(11)
    x = rng.uniform(size=(1, 32, 32))
    out = min_pool2d(Tensor(x), 8)
    assert out.shape == (1, 4, 4)
    for i in range(4):
        for j in range(4):
            assert out.data[0, i, j] == x[0, 8 * i : 8 * i + 8, 8 * j : 8 * j + 8].min()
    assert out.data.min() == x.min()
    assert out.data.mean() <= x.mean()


def test_min_pool2d_constant_map() -> None:
    out = min_pool2d(Tensor(np.full((2, 4, 6), 0.4)), 2)
    assert out.shape == (2, 2, 3)
    assert np.all(out.data == 0.4)


def test_min_pool2d_not_divisible() -> None:
    with pytest.raises(DimensionError) as ei:
        min_pool2d(Tensor(np.ones((1, 6, 8))), 4)
    assert ei.value.axis == "height"


def test_min_pool2d_tie_routes_gradient_to_first_element() -> None:
    x = Tensor(np.zeros((1, 2, 2)), requires_grad=True)
    with GradTape() as tape:
        tape.backward(sum_all(min_pool2d(x, 2)))
    assert x.grad is not None
    np.testing.assert_array_equal(x.grad, [[[1.0, 0.0], [0.0, 0.0]]])


def test_concat_block_copy_and_spatial_mismatch() -> None:
    a = np.arange(4.0).reshape(1, 2, 2)
    b = -np.arange(4.0).reshape(1, 2, 2)
    out = concat_channels(Tensor(a), Tensor(b))
    assert out.shape == (2, 2, 2)
    np.testing.assert_array_equal(out.data[0], a[0])
    np.testing.assert_array_equal(out.data[1], b[0])
    with pytest.raises(DimensionError) as ei:
        concat_channels(Tensor(np.ones((1, 2, 2))), Tensor(np.ones((1, 2, 3))))
    assert ei.value.axis == "width"


@settings(max_examples=30, deadline=None)
@given(
    ca=st.integers(min_value=1, max_value=4),
    cb=st.integers(min_value=1, max_value=4),
    h=st.integers(min_value=1, max_value=5),
    seed=st.integers(min_value=0, max_value=2**16),
)
def test_concat_then_slice_is_identity(ca: int, cb: int, h: int, seed: int) -> None:
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(ca, h, h + 1))
    b = rng.normal(size=(cb, h, h + 1))
    joined = concat_channels(Tensor(a), Tensor(b))
    np.testing.assert_array_equal(slice_channels(joined, 0, ca).data, a)
    np.testing.assert_array_equal(slice_channels(joined, ca, ca + cb).data, b)


def test_mean_l1_and_mean_sq_values() -> None:
    assert mean_l1(Tensor([0.0, 0.0]), Tensor([1.0, 3.0])).item() == 2.0
    assert mean_l1(Tensor([1.5, 2.0]), Tensor([1.5, 2.0])).item() == 0.0
    assert mean_sq(Tensor(np.full((2, 3), 0.5)), 1.0).item() == 0.25
    assert mean_sq(Tensor(np.full(4, 0.7)), 0.7).item() == 0.0
    with pytest.raises(DimensionError):
        mean_l1(Tensor([1.0]), Tensor([1.0, 2.0]))


def test_backward_sum_gives_ones() -> None:
    w = Tensor(np.arange(6.0).reshape(2, 3), requires_grad=True)
    with GradTape():
        backward(sum_all(w))
    assert w.grad is not None
    np.testing.assert_array_equal(w.grad, np.ones((2, 3)))


def test_backward_square() -> None:
    w = Tensor([2.0], requires_grad=True)
    with GradTape() as tape:
        tape.backward(mean_sq(w, 0.0))
    assert w.grad is not None
    np.testing.assert_array_equal(w.grad, [4.0])


def test_backward_accumulates_over_reuse_and_is_additive() -> None:
    rng = np.random.default_rng(2)
    w = Tensor(rng.normal(size=(4,)), requires_grad=True)
    with GradTape() as tape:
        tape.backward(add(mean_sq(w, 1.0), mean_l1(w, Tensor(np.zeros(4)))))
    combined = w.grad.copy()  # type: ignore[union-attr]
    separate = np.zeros(4)
    for make in (lambda: mean_sq(w, 1.0), lambda: mean_l1(w, Tensor(np.zeros(4)))):
        w.grad = None
        with GradTape() as tape:
            tape.backward(make())
        separate += w.grad  # type: ignore[operator]
    np.testing.assert_allclose(combined, separate, atol=1e-15)


def test_backward_rejects_non_scalar_and_untaped() -> None:
    w = Tensor([1.0, 2.0], requires_grad=True)
    with GradTape() as tape:
        with pytest.raises(ContractError):
            tape.backward(add(w, w))
    loss = mean_sq(w, 0.0)  # no tape active: plain arithmetic
    assert not loss.requires_grad
    with pytest.raises(ContractError):
        GradTape().backward(loss)


def test_tape_cleared_after_backward() -> None:
    w = Tensor([1.0], requires_grad=True)
    with GradTape() as tape:
        loss = mean_sq(w, 0.0)
        assert len(tape) == 1
        tape.backward(loss)
        assert len(tape) == 0


def test_tensor_rejects_empty_dimension() -> None:
    with pytest.raises(DimensionError):
        Tensor(np.zeros((0, 3)))
