import math

import numpy as np
import pytest

from graphhist.exceptions import BinRangeError, ShapeError
from graphhist.nn import (
    HistogramBinning,
    Tape,
    bin_centers,
    histogram_backward,
    histogram_binning,
    histogram_forward,
    reference_histogram_backward,
)
from graphhist.nn.gradcheck import relative_error


class TestBinCenters:
    def test_two_bins(self):
        layout = bin_centers(2)
        np.testing.assert_allclose(layout.centers, [-0.5, 0.5])
        assert layout.width == 1.0

    def test_ten_bins_have_width_point_two(self):
        layout = bin_centers(10)
        assert layout.width == pytest.approx(0.2)
        assert len(layout.centers) == 10

    def test_four_bins(self):
        np.testing.assert_allclose(bin_centers(4).centers, [-0.75, -0.25, 0.25, 0.75])

    def test_edges_cover_the_range_exactly(self):
        layout = bin_centers(25)
        assert layout.edges[0] == -1.0
        assert layout.edges[-1] == 1.0

    def test_layout_is_read_only(self):
        with pytest.raises(ValueError):
            bin_centers(4).centers[0] = 0.0

    @pytest.mark.parametrize("k", [0, 1])
    def test_too_few_bins(self, k):
        with pytest.raises(ValueError):
            bin_centers(k)


class TestForward:
    def test_one_node_per_bin(self):
        c2 = np.array([[-0.9], [-0.1], [0.1], [0.95]])
        np.testing.assert_array_equal(histogram_forward(c2, bin_centers(4)), [[1], [1], [1], [1]])

    def test_zero_lands_in_upper_bin(self):
        counts = histogram_forward(np.zeros((7, 1)), bin_centers(2))
        np.testing.assert_array_equal(counts, [[0], [7]])

    def test_range_ends_are_counted(self):
        counts = histogram_forward(np.array([[-1.0], [1.0]]), bin_centers(5))
        np.testing.assert_array_equal(counts[:, 0], [1, 0, 0, 0, 1])

    def test_channels_are_independent(self):
        c2 = np.array([[-0.5, 0.5], [-0.5, 0.7]])
        np.testing.assert_array_equal(histogram_forward(c2, bin_centers(2)), [[2, 0], [0, 2]])

    def test_columns_sum_to_node_count(self, rng):
        for _ in range(1000):
            n, channels = int(rng.integers(1, 30)), int(rng.integers(1, 6))
            layout = bin_centers(int(rng.integers(2, 30)))
            counts = histogram_forward(rng.uniform(-1, 1, size=(n, channels)), layout)
            assert counts.shape == (layout.k, channels)
            np.testing.assert_array_equal(counts.sum(axis=0), n)

    def test_out_of_range(self):
        with pytest.raises(BinRangeError):
            histogram_forward(np.array([[1.5]]), bin_centers(4))

    @pytest.mark.parametrize("value", [math.nan, math.inf, -math.inf])
    def test_non_finite_input(self, value):
        with pytest.raises(BinRangeError, match="NaN or infinite"):
            histogram_forward(np.array([[0.1], [value]]), bin_centers(4))

    def test_rounding_slack_is_accepted(self):
        counts = histogram_forward(np.array([[1.0 + 1e-15]]), bin_centers(4))
        assert counts[-1, 0] == 1

    def test_requires_a_matrix(self):
        with pytest.raises(ShapeError):
            histogram_forward(np.zeros(3), bin_centers(4))


class TestBackward:
    def test_node_between_two_centers(self):
        grad = histogram_backward(np.array([[0.0]]), np.array([[1.0], [3.0]]), bin_centers(2))
        assert grad[0, 0] == pytest.approx(1.0, abs=1e-12)

    def test_node_on_a_center_is_nearly_stationary(self):
        grad = histogram_backward(np.array([[-0.5]]), np.array([[0.0], [1.0]]), bin_centers(2))
        expected = math.exp(-20) / (1 + math.exp(-20))
        assert grad[0, 0] == pytest.approx(expected, rel=1e-9)
        assert grad[0, 0] == pytest.approx(2.061e-9, rel=1e-3)

    def test_zero_upstream_gradient(self, rng):
        c2 = rng.uniform(-1, 1, size=(6, 3))
        grad = histogram_backward(c2, np.zeros((10, 3)), bin_centers(10))
        np.testing.assert_array_equal(grad, 0.0)

    def test_matches_reference(self, rng):
        worst = 0.0
        for _ in range(200):
            n, channels = int(rng.integers(1, 51)), int(rng.integers(1, 17))
            layout = bin_centers(int(rng.choice([2, 10, 25])))
            c2 = rng.uniform(-1, 1, size=(n, channels))
            grad_h = rng.standard_normal((layout.k, channels))
            fast = histogram_backward(c2, grad_h, layout)
            slow = reference_histogram_backward(c2, grad_h, layout)
            worst = max(worst, relative_error(fast, slow))
        assert worst <= 1e-12

    def test_large_alpha_stays_finite(self, rng):
        c2 = rng.uniform(-1, 1, size=(5, 2))
        grad = histogram_backward(c2, rng.standard_normal((25, 2)), bin_centers(25), alpha=5000.0)
        assert np.all(np.isfinite(grad))

    def test_pull_towards_bins_with_positive_gradient(self):
        # every bin above the node has gradient +1, every bin below -1
        layout = bin_centers(10)
        c2 = np.array([[0.05]])
        grad_h = np.where(layout.centers > 0.05, 1.0, -1.0)[:, None]
        assert histogram_backward(c2, grad_h, layout)[0, 0] > 0

    def test_gradient_shape_mismatch(self):
        with pytest.raises(ShapeError):
            histogram_backward(np.zeros((3, 2)), np.zeros((4, 3)), bin_centers(4))


class TestHistogramKernel:
    def test_node_order_does_not_matter(self, rng):
        layout = bin_centers(10)
        c2 = rng.uniform(-1, 1, size=(9, 4))
        perm = rng.permutation(9)
        np.testing.assert_array_equal(
            histogram_forward(c2, layout), histogram_forward(c2[perm], layout)
        )
        grad_h = rng.standard_normal((10, 4))
        np.testing.assert_array_equal(
            histogram_backward(c2, grad_h, layout)[perm],
            histogram_backward(c2[perm], grad_h, layout),
        )

    def test_normalized_counts_and_gradient(self, rng):
        layout = bin_centers(4)
        c2 = rng.uniform(-1, 1, size=(8, 2))
        grad_h = rng.standard_normal((4, 2))
        kernel = HistogramBinning(layout, normalize=True)
        counts, saved = kernel.forward(c2)
        np.testing.assert_allclose(counts.sum(axis=0), 1.0)
        (grad,) = kernel.backward(saved, grad_h)
        np.testing.assert_allclose(grad, histogram_backward(c2, grad_h, layout) / 8, rtol=1e-12)

    def test_on_a_tape(self, rng):
        tape = Tape()
        c2 = tape.leaf(rng.uniform(-1, 1, size=(5, 3)))
        hist = histogram_binning(c2, bin_centers(4), alpha=10.0)
        assert hist.value.shape == (4, 3)
        grad_h = rng.standard_normal((4, 3))
        (grad,) = tape.backward({hist: grad_h}, [c2])
        np.testing.assert_allclose(
            grad, histogram_backward(c2.value, grad_h, bin_centers(4), alpha=10.0), rtol=1e-12
        )
