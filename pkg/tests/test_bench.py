import numpy as np
import pytest

from adaptnn import (Dataset, emit_report, load_config, load_registry,
                     parse_report, run_experiment, smooth_over_k,
                     stratified_split, save)
from adaptnn.bench import AccuracyRecord, ExperimentConfig, cv_fold_ids
from helpers import make_dataset


def _write_synthetic(tmp_path, rng, n=40, d=3, classes=2):
    # two well-separated blobs so ANN converges quickly in tests
    ds = make_dataset(rng, n=n, d=d, classes=classes)
    X = ds.features + 4.0 * ds.labels[:, None]
    ds = Dataset(X, ds.labels)
    p = tmp_path / "synth.csv"
    save(ds, p)
    return ds, str(p)


def test_stratified_split_counts():
    labels = np.repeat([1, 2, 3], 50)
    rng = np.random.default_rng(0)
    tr, te = stratified_split(labels, 0.7, rng)
    assert tr.size == 105 and te.size == 45
    for c in (1, 2, 3):
        assert (labels[tr] == c).sum() == 35
        assert (labels[te] == c).sum() == 15
    assert np.intersect1d(tr, te).size == 0


def test_stratified_split_proportions_within_one():
    rng = np.random.default_rng(1)
    labels = np.array([1] * 13 + [2] * 7 + [3] * 29)
    tr, te = stratified_split(labels, 0.7, rng)
    for c, n_c in ((1, 13), (2, 7), (3, 29)):
        got = (labels[tr] == c).sum()
        assert abs(got - 0.7 * n_c) <= 1.0


def test_cv_folds_stratified():
    labels = np.repeat([1, 2], 25)
    ids = cv_fold_ids(labels, 5, np.random.default_rng(2))
    for f in range(5):
        assert (labels[ids == f] == 1).sum() == 5
        assert (labels[ids == f] == 2).sum() == 5


def test_run_experiment_deterministic(tmp_path):
    rng = np.random.default_rng(3)
    _, path = _write_synthetic(tmp_path, rng)
    cfg = ExperimentConfig(dataset="synth", path=path, method="ann_plus",
                           alpha_grid=(1.0, 4.0), gamma_grid=(1.0,),
                           k_grid=(1, 3), repetitions=2, cv_folds=2,
                           seed=11, max_iters=5)
    r1 = run_experiment(cfg)[0]
    r2 = run_experiment(cfg)[0]
    assert r1.accuracies == r2.accuracies
    assert (r1.alpha, r1.gamma, r1.k) == (r2.alpha, r2.gamma, r2.k)
    assert r1.acc_by_k == r2.acc_by_k


def test_euclidean_baseline_skips_training(tmp_path):
    rng = np.random.default_rng(4)
    _, path = _write_synthetic(tmp_path, rng)
    cfg = ExperimentConfig(dataset="synth", path=path,
                           method="euclidean_baseline",
                           alpha_grid=(1.0,), gamma_grid=(1.0,),
                           k_grid=(1, 3), repetitions=3, seed=5)
    rec = run_experiment(cfg)[0]
    assert rec.method == "euclidean_baseline"
    assert len(rec.accuracies) == 3
    assert all(a > 0.9 for a in rec.accuracies)  # blobs are separable


def test_pnca_report_records_objectives(tmp_path):
    rng = np.random.default_rng(5)
    _, path = _write_synthetic(tmp_path, rng)
    cfg = ExperimentConfig(dataset="synth", path=path, method="pnca_report",
                           alpha_grid=(0.5, 1.0, 2.0), gamma_grid=(1.0,),
                           k_grid=(1,), repetitions=2, seed=5)
    rec = run_experiment(cfg)[0]
    assert len(rec.extras["pnca_objective"]) == 2
    assert len(rec.extras["nca_objective"]) == 2
    assert rec.alpha in (0.5, 1.0, 2.0)


def test_mean_std_recomputable(tmp_path):
    rng = np.random.default_rng(6)
    _, path = _write_synthetic(tmp_path, rng)
    cfg = ExperimentConfig(dataset="synth", path=path,
                           method="euclidean_baseline",
                           alpha_grid=(1.0,), gamma_grid=(1.0,),
                           k_grid=(1,), repetitions=4, seed=9)
    rec = run_experiment(cfg)[0]
    assert rec.mean == pytest.approx(np.mean(rec.accuracies), abs=1e-12)
    assert rec.std == pytest.approx(np.std(rec.accuracies, ddof=1), abs=1e-12)


def test_no_test_leakage_into_preprocessing(tmp_path):
    # poisoning the would-be test rows must not change the fitted statistics
    from adaptnn.bench import _preprocess, _subset
    rng = np.random.default_rng(7)
    ds, _ = _write_synthetic(tmp_path, rng, n=30)
    tr_idx, te_idx = stratified_split(ds.labels, 0.7, np.random.default_rng(0))
    train1, _ = _preprocess(_subset(ds, tr_idx), _subset(ds, te_idx))
    poisoned = ds.features.copy()
    poisoned[te_idx] = 1e9
    ds2 = Dataset(poisoned, ds.labels)
    train2, test2 = _preprocess(_subset(ds2, tr_idx), _subset(ds2, te_idx))
    assert np.array_equal(train1.features, train2.features)
    assert np.all(np.abs(test2.features) > 1e3)  # poison scaled by train stats only


def test_smooth_over_k_example():
    acc = {0: 0.5, 1: 0.8, 2: 0.9, 3: 1.0, 4: 0.7, 5: 0.6}
    out = smooth_over_k(acc)
    assert out == {0: pytest.approx(0.8)}  # mean of K+1..K+5; others lack windows


def test_smooth_over_k_constant_curve():
    acc = {k: 0.75 for k in range(1, 12)}
    out = smooth_over_k(acc)
    assert all(v == pytest.approx(0.75) for v in out.values())
    assert sorted(out) == list(range(1, 7))  # 7..11 lack complete windows


def test_smooth_over_k_matches_sliding_oracle():
    rng = np.random.default_rng(8)
    ks = list(range(1, 30, 3))
    acc = {k: float(rng.uniform(0.5, 1.0)) for k in ks}
    out = smooth_over_k(acc)
    for k in ks:
        window = [acc[k + i] for i in range(1, 6) if (k + i) in acc]
        if len(window) == 5:
            assert out[k] == pytest.approx(np.mean(window))
        else:
            assert k not in out


def test_report_roundtrip(tmp_path):
    rec = AccuracyRecord(method="ann_plus", dataset="synth", alpha=4.0,
                         gamma=0.5, k=7, accuracies=[0.9, 1.0, 0.95],
                         mean=0.95, std=0.05, wall_time_seconds=1.25,
                         acc_by_k={1: 0.9, 4: 0.95}, extras={"note": [1.0]})
    out = tmp_path / "report.jsonl"
    emit_report([rec], out)
    back = parse_report(out)
    assert len(back) == 1
    assert back[0] == rec
    curves = (tmp_path / "report.jsonl.curves").read_text()
    assert "curve=raw" in curves and "curve=smoothed" in curves


def test_emit_report_empty(tmp_path):
    out = tmp_path / "empty.jsonl"
    emit_report([], out)
    assert parse_report(out) == []


def test_full_run_report_consistency(tmp_path):
    rng = np.random.default_rng(9)
    _, path = _write_synthetic(tmp_path, rng)
    cfg = ExperimentConfig(dataset="synth", path=path,
                           method="euclidean_baseline", alpha_grid=(1.0,),
                           gamma_grid=(1.0,), k_grid=(1, 3, 5),
                           repetitions=3, seed=2)
    records = run_experiment(cfg)
    out = tmp_path / "r.jsonl"
    emit_report(records, out)
    back = parse_report(out)[0]
    assert back.mean == pytest.approx(np.mean(back.accuracies), abs=1e-12)
    assert back.std == pytest.approx(np.std(back.accuracies, ddof=1), abs=1e-12)


def test_load_config_and_registry(tmp_path):
    data_dir = tmp_path / "data"
    data_dir.mkdir()
    ds = make_dataset(np.random.default_rng(10), n=12, d=2, classes=2)
    save(ds, data_dir / "toy.csv")
    (data_dir / "registry.cfg").write_text("toy = toy.csv delimited\n")
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text(
        "# comment\n"
        "dataset = toy\n"
        "registry = data/registry.cfg\n"
        "method = ann_minus\n"
        "alpha_grid = -1, -4\n"
        "gamma_grid = 0.5 2\n"
        "k_grid = 1 4 7\n"
        "repetitions = 3\n"
        "split_fraction = 0.7\n"
        "cv_folds = 2\n"
        "seed = 42\n"
        "max_iters = 15\n"
        "eta0 = 5e-4\n")
    cfg = load_config(cfg_file)
    assert cfg.dataset == "toy"
    assert cfg.format == "delimited"
    assert cfg.alpha_grid == (-1.0, -4.0)
    assert cfg.k_grid == (1, 4, 7)
    assert cfg.seed == 42 and cfg.eta0 == 5e-4
    reg = load_registry(data_dir / "registry.cfg")
    assert reg["toy"][1] == "delimited"


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        ExperimentConfig(dataset="x", path="p", method="nope")
    with pytest.raises(ValueError):
        ExperimentConfig(dataset="x", path="p", method="ann_plus",
                         alpha_grid=(-1.0,))
    with pytest.raises(ValueError):
        ExperimentConfig(dataset="x", path="p", method="ann_minus",
                         alpha_grid=(1.0,))
    with pytest.raises(ValueError):
        ExperimentConfig(dataset="x", path="p", split_fraction=1.5)
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("dataset = toy\n")
    with pytest.raises(ValueError, match="dataset_path or registry"):
        load_config(cfg_file)


def test_sparse_format_through_harness(tmp_path):
    rng = np.random.default_rng(12)
    ds = make_dataset(rng, n=24, d=3, classes=2)
    shifted = Dataset(ds.features + 3.0 * ds.labels[:, None], ds.labels)
    p = tmp_path / "synth.sparse"
    save(shifted, p, format="sparse_index_value")
    cfg = ExperimentConfig(dataset="synth", path=str(p),
                           format="sparse_index_value",
                           method="euclidean_baseline", alpha_grid=(1.0,),
                           gamma_grid=(1.0,), k_grid=(1, 3), repetitions=2,
                           seed=1)
    rec = run_experiment(cfg)[0]
    assert len(rec.accuracies) == 2
    assert all(0.0 <= a <= 1.0 for a in rec.accuracies)


def test_full_grids():
    from adaptnn.bench import (FULL_K_GRID, FULL_NEGATIVE_POWER_GRID,
                               FULL_POWER_GRID)
    assert FULL_POWER_GRID[0] == 2.0 ** -9
    assert FULL_POWER_GRID[-1] == 2.0 ** 10
    assert len(FULL_POWER_GRID) == 20
    assert FULL_NEGATIVE_POWER_GRID == tuple(-g for g in FULL_POWER_GRID)
    assert FULL_K_GRID == (1, 4, 7, 10, 13, 16, 19, 22, 25, 28, 31, 34, 37,
                           40, 43, 46)
    # the full grids are valid configurations for their matching methods
    ExperimentConfig(dataset="x", path="p", method="ann_plus",
                     alpha_grid=FULL_POWER_GRID, gamma_grid=FULL_POWER_GRID)
    ExperimentConfig(dataset="x", path="p", method="ann_minus",
                     alpha_grid=FULL_NEGATIVE_POWER_GRID,
                     gamma_grid=FULL_POWER_GRID)


def test_shipped_configs_parse():
    import pathlib
    root = pathlib.Path(__file__).resolve().parent.parent
    for name in ("iris_ann_plus", "wine_ann_minus", "iris_euclidean",
                 "wine_euclidean", "iris_pnca_report"):
        cfg = load_config(root / "configs" / ("%s.cfg" % name))
        assert cfg.repetitions >= 1
