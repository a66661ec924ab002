"""Shared test fixtures: random labeled instances and PSD matrices."""

import numpy as np

from adaptnn import Dataset, build_neighbor_sets


def make_dataset(rng, n=15, d=4, classes=2, scale=1.0):
    """Random Gaussian dataset with every class guaranteed non-empty."""
    X = rng.normal(scale=scale, size=(n, d))
    y = rng.integers(1, classes + 1, size=n)
    y[:classes] = np.arange(1, classes + 1)  # every class present
    # bump tiny classes up to 2 members so neighbor sets exist
    for c in range(1, classes + 1):
        if (y == c).sum() < 2:
            y[np.flatnonzero(y != c)[-1]] = c
    return Dataset(X, y)


def make_instance(rng, n=15, d=4, classes=2, mode="all_same_class", k0=10):
    data = make_dataset(rng, n, d, classes)
    return data, build_neighbor_sets(data, mode=mode, k0=k0)


def random_psd(rng, d, jitter=0.0):
    a = rng.normal(size=(d, d))
    return a @ a.T + jitter * np.eye(d)
