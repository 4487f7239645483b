import math

import numpy as np
import pytest

from graphhist.exceptions import ShapeError
from graphhist.nn import (
    Affine,
    Conv1d,
    Dropout,
    FlattenConcat,
    MatMul,
    MaxPool1d,
    Relu,
    SoftmaxCrossEntropy,
    Tanh,
    Tape,
    affine,
    softmax_cross_entropy,
    tanh_act,
)
from graphhist.nn.gradcheck import grad_check, numeric_gradient, relative_error


class TestMatMul:
    def test_identity(self, rng):
        b = rng.standard_normal((3, 2))
        out, saved = MatMul().forward(np.eye(3), b)
        np.testing.assert_array_equal(out, b)
        grad = rng.standard_normal((3, 2))
        _, grad_b = MatMul().backward(saved, grad)
        np.testing.assert_array_equal(grad_b, grad)

    def test_scalar_product_rule(self):
        a, b = np.array([[3.0]]), np.array([[5.0]])
        _, saved = MatMul().forward(a, b)
        grad_a, grad_b = MatMul().backward(saved, np.array([[2.0]]))
        assert grad_a.item() == 10.0
        assert grad_b.item() == 6.0

    def test_finite_differences(self, rng):
        result = grad_check(MatMul(), [rng.standard_normal((3, 4)), rng.standard_normal((4, 2))])
        assert result.max_rel_error <= 1e-6

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            MatMul().forward(np.ones((2, 3)), np.ones((2, 3)))


class TestAffine:
    def test_zero_input_gives_bias_rows(self):
        b = np.array([1.0, -2.0, 0.5])
        out, _ = Affine().forward(np.zeros((4, 2)), np.ones((2, 3)), b)
        np.testing.assert_array_equal(out, np.tile(b, (4, 1)))

    def test_bias_gradient_is_column_sum(self):
        _, saved = Affine().forward(np.ones((5, 2)), np.ones((2, 3)), np.zeros(3))
        _, _, grad_b = Affine().backward(saved, np.ones((5, 3)))
        np.testing.assert_array_equal(grad_b, [5.0, 5.0, 5.0])

    def test_finite_differences(self, rng):
        inputs = [rng.standard_normal((4, 3)), rng.standard_normal((3, 2)), rng.standard_normal(2)]
        assert grad_check(Affine(), inputs).max_rel_error <= 1e-6


class TestActivations:
    def test_tanh_at_zero(self):
        out, saved = Tanh().forward(np.zeros(3))
        np.testing.assert_array_equal(out, 0.0)
        (grad,) = Tanh().backward(saved, np.ones(3))
        np.testing.assert_array_equal(grad, 1.0)

    def test_relu_negative(self):
        out, saved = Relu().forward(np.array([-2.0, 0.0, 3.0]))
        np.testing.assert_array_equal(out, [0.0, 0.0, 3.0])
        (grad,) = Relu().backward(saved, np.ones(3))
        np.testing.assert_array_equal(grad, [0.0, 0.0, 1.0])

    def test_tanh_finite_differences(self, rng):
        assert grad_check(Tanh(), [rng.standard_normal((3, 4))]).max_rel_error <= 1e-6

    def test_relu_finite_differences(self, rng):
        x = rng.standard_normal((3, 4))
        x = np.where(x >= 0, x + 0.1, x - 0.1)
        assert grad_check(Relu(), [x]).max_rel_error <= 1e-6


class TestDropout:
    def test_rate_zero_is_identity(self, rng):
        x = rng.standard_normal(10)
        out, _ = Dropout(0.0, train_mode=True, rng=rng).forward(x)
        np.testing.assert_array_equal(out, x)

    def test_eval_mode_is_identity(self, rng):
        x = rng.standard_normal(10)
        out, saved = Dropout(0.8, train_mode=False).forward(x)
        np.testing.assert_array_equal(out, x)
        (grad,) = Dropout(0.8, train_mode=False).backward(saved, np.ones(10))
        np.testing.assert_array_equal(grad, 1.0)

    def test_keep_fraction(self):
        rate = 0.3
        out, _ = Dropout(rate, train_mode=True, rng=np.random.default_rng(1)).forward(np.ones(1_000_000))
        kept = np.count_nonzero(out) / out.size
        assert abs(kept - (1 - rate)) <= 0.005
        np.testing.assert_allclose(out[out != 0], 1 / (1 - rate))

    def test_backward_reuses_mask(self, rng):
        kernel = Dropout(0.5, train_mode=True, rng=rng)
        out, saved = kernel.forward(np.ones(50))
        (grad,) = kernel.backward(saved, np.ones(50))
        np.testing.assert_array_equal(grad, out)

    @pytest.mark.parametrize("rate", [-0.1, 1.0])
    def test_invalid_rate(self, rate, rng):
        with pytest.raises(ValueError):
            Dropout(rate, train_mode=True, rng=rng)


class TestConv1d:
    def test_unit_kernel_is_identity(self):
        x = np.array([[1.0, 2.0, 3.0]])
        out, _ = Conv1d().forward(x, np.ones((1, 1, 1)), np.zeros(1))
        np.testing.assert_array_equal(out, x)

    def test_hand_sum(self):
        out, _ = Conv1d().forward(np.array([[1.0, 2.0, 3.0]]), np.ones((1, 1, 2)), np.zeros(1))
        np.testing.assert_array_equal(out, [[3.0, 5.0]])

    def test_finite_differences(self, rng):
        inputs = [rng.standard_normal((3, 25)), rng.standard_normal((4, 3, 5)), rng.standard_normal(4)]
        assert grad_check(Conv1d(), inputs).max_rel_error <= 1e-6

    def test_batched_matches_single(self, rng):
        x = rng.standard_normal((3, 2, 9))
        kernel, bias = rng.standard_normal((4, 2, 3)), rng.standard_normal(4)
        batched, _ = Conv1d().forward(x, kernel, bias)
        for b in range(3):
            single, _ = Conv1d().forward(x[b], kernel, bias)
            np.testing.assert_allclose(batched[b], single, rtol=1e-14, atol=1e-14)

    def test_filter_longer_than_input(self):
        with pytest.raises(ShapeError):
            Conv1d().forward(np.ones((1, 3)), np.ones((1, 1, 4)), np.zeros(1))


class TestMaxPool:
    def test_pairs(self):
        out, _ = MaxPool1d().forward(np.array([[1.0, 3.0, 2.0, 2.0]]))
        np.testing.assert_array_equal(out, [[3.0, 2.0]])

    def test_odd_length_drops_last(self):
        out, saved = MaxPool1d().forward(np.array([[1.0, 2.0, 3.0, 4.0, 9.0]]))
        assert out.shape == (1, 2)
        (grad,) = MaxPool1d().backward(saved, np.ones((1, 2)))
        np.testing.assert_array_equal(grad, [[0.0, 1.0, 0.0, 1.0, 0.0]])

    def test_tie_routes_to_first(self):
        _, saved = MaxPool1d().forward(np.array([[2.0, 2.0]]))
        (grad,) = MaxPool1d().backward(saved, np.array([[1.0]]))
        np.testing.assert_array_equal(grad, [[1.0, 0.0]])

    @pytest.mark.parametrize("length", [0, 1])
    def test_short_input_gives_empty_output(self, length):
        x = np.ones((3, length))
        out, saved = MaxPool1d().forward(x)
        assert out.shape == (3, 0)
        (grad,) = MaxPool1d().backward(saved, np.zeros((3, 0)))
        np.testing.assert_array_equal(grad, np.zeros((3, length)))


class TestFlattenConcat:
    def test_single_part(self, rng):
        x = rng.standard_normal((2, 3))
        out, _ = FlattenConcat().forward(x)
        np.testing.assert_array_equal(out, x.reshape(-1))

    def test_shapes_round_trip(self, rng):
        parts = [rng.standard_normal((2, 2)), rng.standard_normal(3)]
        out, saved = FlattenConcat().forward(*parts)
        assert out.shape == (7,)
        grads = FlattenConcat().backward(saved, out)
        for part, grad in zip(parts, grads):
            np.testing.assert_array_equal(grad, part)

    def test_batched(self, rng):
        parts = [rng.standard_normal((3, 2, 2)), rng.standard_normal((3, 4))]
        out, _ = FlattenConcat(batched=True).forward(*parts)
        assert out.shape == (3, 8)


class TestSoftmaxCrossEntropy:
    def test_symmetric_logits(self):
        kernel = SoftmaxCrossEntropy(0)
        loss, saved = kernel.forward(np.array([0.0, 0.0]))
        assert loss == pytest.approx(math.log(2), abs=1e-12)
        (grad,) = kernel.backward(saved, np.asarray(1.0))
        np.testing.assert_allclose(grad, [-0.5, 0.5])

    def test_large_logits_are_stable(self):
        loss, saved = SoftmaxCrossEntropy(0).forward(np.array([1000.0, 0.0]))
        assert np.isfinite(loss)
        assert loss == pytest.approx(0.0, abs=1e-12)

    def test_probabilities_sum_to_one(self, rng):
        loss, (probs, _) = SoftmaxCrossEntropy([0, 2, 1]).forward(rng.standard_normal((3, 4)) * 10)
        np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-12)
        assert loss >= 0

    def test_batch_loss_is_sum(self, rng):
        logits = rng.standard_normal((3, 2))
        total, _ = SoftmaxCrossEntropy([0, 1, 1]).forward(logits)
        parts = [SoftmaxCrossEntropy(t).forward(row)[0] for t, row in zip([0, 1, 1], logits)]
        assert total == pytest.approx(sum(parts), rel=1e-12)

    def test_finite_differences(self, rng):
        result = grad_check(SoftmaxCrossEntropy([1, 0]), [rng.standard_normal((2, 3))])
        assert result.max_rel_error <= 1e-6

    def test_class_out_of_range(self):
        with pytest.raises(ValueError):
            SoftmaxCrossEntropy(2).forward(np.zeros(2))


class TestTape:
    def test_chain_matches_finite_differences(self, rng):
        x = rng.standard_normal((3, 4))
        w = rng.standard_normal((4, 2))
        b = rng.standard_normal(2)
        targets = [0, 1, 1]

        def record():
            tape = Tape()
            w_var = tape.leaf(w)
            out = tanh_act(affine(tape.leaf(x), w_var, tape.leaf(b)))
            loss, _ = softmax_cross_entropy(out, targets)
            return tape, w_var, loss

        tape, w_var, loss = record()
        unused = tape.leaf(np.ones(2))
        grad_w, grad_unused = tape.backward({loss: np.asarray(1.0)}, [w_var, unused])
        assert grad_unused is None

        numeric = numeric_gradient(lambda: float(record()[2].value), w)
        assert relative_error(grad_w, numeric) <= 1e-6

    def test_shared_input_gradients_accumulate(self):
        tape = Tape()
        x = tape.leaf(np.array([[2.0]]))
        y = tape.apply(MatMul(), x, x)
        (grad,) = tape.backward({y: np.array([[1.0]])}, [x])
        np.testing.assert_array_equal(grad, [[4.0]])

    def test_foreign_variable_rejected(self):
        a, b = Tape(), Tape()
        with pytest.raises(ValueError):
            a.apply(Tanh(), b.leaf(np.zeros(2)))
