import numpy as np
import pytest

from adaptnn import Dataset, HyperParams, MetricMatrix, NeighborSets, validate


def test_valid_small_dataset():
    ds = Dataset([[0.0, 1.0], [1.0, 0.0], [2.0, 2.0]], [1, 2, 1])
    validate(ds)
    assert (ds.n_samples, ds.n_features, ds.n_classes) == (3, 2, 2)


def test_nan_feature_rejected():
    with pytest.raises(ValueError, match="non-finite"):
        Dataset([[0.0, np.nan], [1.0, 0.0]], [1, 2])


def test_single_class_rejected():
    with pytest.raises(ValueError, match="C >= 2"):
        Dataset([[0.0], [1.0]], [1, 1])


def test_empty_class_rejected():
    # labels {1, 3} leave class 2 without samples
    with pytest.raises(ValueError, match="class 2"):
        Dataset([[0.0], [1.0]], [1, 3])


def test_label_below_one_rejected():
    with pytest.raises(ValueError):
        Dataset([[0.0], [1.0]], [0, 1])


def test_too_few_samples_rejected():
    with pytest.raises(ValueError, match="N >= 2"):
        Dataset([[1.0]], [1])


def test_dataset_arrays_are_readonly():
    ds = Dataset([[0.0], [1.0]], [1, 2])
    with pytest.raises(ValueError):
        ds.features[0, 0] = 9.0
    with pytest.raises(ValueError):
        ds.labels[0] = 2


def test_metric_non_symmetric_rejected():
    m = np.array([[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(ValueError, match="not symmetric"):
        MetricMatrix(m)


def test_metric_negative_definite_rejected():
    with pytest.raises(ValueError, match="not PSD"):
        MetricMatrix(-np.eye(3))


def test_metric_symmetrizes_float_drift():
    drift = np.array([[1.0, 0.3 + 1e-12], [0.3, 1.0]])
    m = MetricMatrix(drift)
    assert np.array_equal(m.m, m.m.T)


def test_metric_scaled():
    m = MetricMatrix(np.diag([2.0, 1.0]))
    assert np.allclose(m.scaled(3.0).m, np.diag([6.0, 3.0]))
    with pytest.raises(ValueError):
        m.scaled(-1.0)


def test_neighbor_sets_validation():
    with pytest.raises(ValueError, match="own neighbor set"):
        NeighborSets([[0]], [[1]])
    with pytest.raises(ValueError, match="empty"):
        NeighborSets([[1], []], [[1], [0]])
    labels = [1, 1, 2]
    with pytest.raises(ValueError, match="different-class"):
        NeighborSets([[2], [0], [0]], [[2], [2], [0]], labels=labels)
    with pytest.raises(ValueError, match="same-class"):
        NeighborSets([[1], [0], [0]], [[1], [2], [0]], labels=labels)


def test_neighbor_sets_flat_arrays():
    ns = NeighborSets([[1, 2], [0], [0, 1]], [[3], [3], [3]])
    assert ns.sim_owner.tolist() == [0, 0, 1, 2, 2]
    assert ns.sim_nbr.tolist() == [1, 2, 0, 0, 1]
    assert ns.sim_ptr.tolist() == [0, 2, 3, 5]
    assert ns.dis_ptr.tolist() == [0, 1, 2, 3]


def test_hyperparams_validation():
    with pytest.raises(ValueError):
        HyperParams(alpha=0.0)
    with pytest.raises(ValueError):
        HyperParams(alpha=1.0, gamma=0.0)
    with pytest.raises(ValueError):
        HyperParams(alpha=1.0, lam=-0.1)
    with pytest.raises(ValueError):
        HyperParams(alpha=1.0, max_iters=0)
    with pytest.raises(ValueError):
        HyperParams(alpha=1.0, eta0=0.0)
    hp = HyperParams(alpha=-2.0)
    assert hp.loss is not None and hp.loss.margin == 1.0
