import numpy as np
import pytest

from conftest import random_graph
from graphhist.data import (
    GraphDataset,
    make_batch,
    oversample,
    split_folds,
    split_validation,
    synth_dataset,
)
from graphhist.graph import Graph, degree_vector, normalized_laplacian, prepare_graph


def balanced_dataset(per_class: int) -> GraphDataset:
    graphs = [prepare_graph(Graph.from_edges(1, [])) for _ in range(2 * per_class)]
    labels = np.array([0] * per_class + [1] * per_class)
    return GraphDataset(graphs=graphs, labels=labels, num_classes=2, name="flat")


class TestGraphDataset:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            GraphDataset(
                graphs=[prepare_graph(Graph.from_edges(1, []))],
                labels=np.array([0, 1]),
                num_classes=2,
                name="x",
            )

    def test_every_class_must_occur(self):
        with pytest.raises(ValueError):
            GraphDataset(
                graphs=[prepare_graph(Graph.from_edges(1, []))],
                labels=np.array([0]),
                num_classes=2,
                name="x",
            )


class TestSynth:
    def test_stars_vs_cycles_counts(self):
        ds = synth_dataset("stars_vs_cycles", 40, (10, 30), seed=7)
        assert len(ds) == 40
        assert ds.class_counts().tolist() == [20, 20]
        assert all(10 <= g.n <= 30 for g in ds.graphs)

    def test_star_and_cycle_degrees(self):
        ds = synth_dataset("stars_vs_cycles", 10, (5, 12), seed=2)
        for g, label in zip(ds.graphs, ds.labels):
            degrees = np.sort(degree_vector(g))
            if label == 0:
                assert degrees[-1] == g.n
                np.testing.assert_array_equal(degrees[:-1], 2.0)
            else:
                np.testing.assert_array_equal(degrees, 3.0)

    def test_same_seed_same_dataset(self):
        a = synth_dataset("er_density_pair", 10, (5, 10), seed=4)
        b = synth_dataset("er_density_pair", 10, (5, 10), seed=4)
        assert a.labels.tolist() == b.labels.tolist()
        assert [sorted(g.edges) for g in a.graphs] == [sorted(g.edges) for g in b.graphs]

    def test_size_range_below_three(self):
        with pytest.raises(ValueError):
            synth_dataset("stars_vs_cycles", 10, (2, 5), seed=0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            synth_dataset("squares", 10, (3, 5), seed=0)


class TestFolds:
    def test_ten_folds_of_a_thousand(self):
        plan = split_folds(balanced_dataset(500), 10, seed=0)
        labels = balanced_dataset(500).labels
        assert len(plan) == 10
        for train, test in plan.folds:
            assert len(test) == 100
            assert np.bincount(labels[test]).tolist() == [50, 50]
            assert len(np.intersect1d(train, test)) == 0
            assert len(train) + len(test) == 1000

    def test_test_sets_partition_the_dataset(self, small_dataset):
        plan = split_folds(small_dataset, 5, seed=3)
        every = np.sort(np.concatenate([test for _, test in plan.folds]))
        np.testing.assert_array_equal(every, np.arange(len(small_dataset)))

    def test_same_seed_same_plan(self, small_dataset):
        a = split_folds(small_dataset, 4, seed=9)
        b = split_folds(small_dataset, 4, seed=9)
        for (train_a, test_a), (train_b, test_b) in zip(a.folds, b.folds):
            np.testing.assert_array_equal(train_a, train_b)
            np.testing.assert_array_equal(test_a, test_b)

    def test_fold_sizes_differ_by_at_most_one_per_class(self):
        ds = synth_dataset("stars_vs_cycles", 23, (3, 5), seed=0)
        plan = split_folds(ds, 4, seed=1)
        for label in range(2):
            sizes = [np.sum(ds.labels[test] == label) for _, test in plan.folds]
            assert max(sizes) - min(sizes) <= 1

    @pytest.mark.parametrize("n_folds", [1, 17])
    def test_invalid_fold_count(self, small_dataset, n_folds):
        with pytest.raises(ValueError):
            split_folds(small_dataset, n_folds, seed=0)

    def test_validation_carve_out(self):
        ds = balanced_dataset(50)
        train, _ = split_folds(ds, 10, seed=0)[0]
        remaining, held_out = split_validation(train, ds.labels, 0.1, seed=0)
        assert len(held_out) == 9
        assert len(np.intersect1d(remaining, held_out)) == 0
        np.testing.assert_array_equal(np.sort(np.concatenate([remaining, held_out])), train)
        assert set(ds.labels[held_out].tolist()) == {0, 1}


class TestOversample:
    def test_minority_repeated_to_majority(self):
        labels = np.array([0, 0, 0, 1])
        result = oversample([0, 1, 2, 3], labels, seed=0)
        assert np.bincount(labels[result]).tolist() == [3, 3]
        assert result.tolist().count(3) == 3

    def test_balanced_input_is_permuted(self):
        labels = np.array([0, 1, 0, 1])
        result = oversample([0, 1, 2, 3], labels, seed=5)
        assert sorted(result.tolist()) == [0, 1, 2, 3]

    def test_bot_counts(self):
        labels = np.array([1] * 8842 + [0] * 6120)
        result = oversample(np.arange(len(labels)), labels, seed=0)
        assert np.bincount(labels[result]).tolist() == [8842, 8842]
        assert set(result.tolist()) >= set(range(len(labels)))

    def test_empty_input(self):
        with pytest.raises(ValueError):
            oversample([], np.array([0, 1]), seed=0)


class TestBatching:
    def test_two_two_node_graphs(self, two_node_graph):
        batch = make_batch([two_node_graph, two_node_graph], [0, 1])
        dense = batch.laplacian.to_dense()
        assert dense.shape == (4, 4)
        assert batch.boundaries.tolist() == [0, 2, 4]
        assert batch.node_range(1) == slice(2, 4)
        np.testing.assert_array_equal(dense[:2, 2:], 0)
        assert batch.num_nodes == 4
        assert batch.features.shape == (4, 2)

    def test_single_graph(self, two_node_graph):
        batch = make_batch([two_node_graph], [1])
        np.testing.assert_array_equal(
            batch.laplacian.to_dense(), normalized_laplacian(two_node_graph).to_dense()
        )

    def test_no_entry_crosses_a_boundary(self, rng):
        for _ in range(20):
            graphs = [random_graph(rng, int(rng.integers(1, 8))) for _ in range(int(rng.integers(2, 6)))]
            batch = make_batch(graphs, [0] * len(graphs))
            coo = batch.laplacian.matrix.tocoo()
            owner = np.searchsorted(batch.boundaries, np.arange(batch.num_nodes), side="right") - 1
            assert np.all(owner[coo.row] == owner[coo.col])
            assert batch.num_nodes == sum(g.n for g in graphs)

    def test_empty_batch(self):
        with pytest.raises(ValueError):
            make_batch([], [])
