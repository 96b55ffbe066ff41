import numpy as np
import pytest

from seedsynth.benchmarks import qft
from seedsynth.linalg import random_unitary
from seedsynth.recommend import (
    LabeledUnitary,
    Mlp,
    TrainConfig,
    benchmark_suite,
    generate_dataset,
    new_model,
    pca_explained_variance,
    rank_templates,
    read_dataset,
    recommend_seeds,
    split_holdout,
    topk_accuracy,
    train,
    write_dataset,
)
from seedsynth.canonical import canonicalize, feature_vector


def small_model(seed=1):
    rng = np.random.default_rng(0)
    mask = rng.random((3, 20)) < 0.6
    mask[:, 0] = True
    return Mlp(10, 3, 20, mask, hidden=8, bottleneck=5, seed=seed)


def finite_difference_error(model, loss, skip):
    _, grads = loss(with_grad=True)
    rng = np.random.default_rng(1)
    worst = 0.0
    for name, w in model.params.items():
        if name.startswith(skip):
            continue
        for _ in range(5):
            idx = tuple(int(rng.integers(s)) for s in w.shape)
            old = w[idx]
            w[idx] = old + 1e-6
            up = loss()
            w[idx] = old - 1e-6
            down = loss()
            w[idx] = old
            worst = max(worst, abs((up - down) / 2e-6 - grads[name][idx]))
    return worst


def test_classification_gradient():
    m = small_model()
    rng = np.random.default_rng(2)
    tags = np.array([0, 1, 2, 0, 1, 2])
    x = m.inputs(rng.normal(size=(6, 10)), tags)
    labels = np.zeros(6, dtype=int)
    err = finite_difference_error(m, lambda with_grad=False: m.classification_loss(x, tags, labels, with_grad),
                                  "dec")
    assert err < 1e-7


def test_reconstruction_gradient():
    m = small_model()
    x = m.inputs(np.random.default_rng(3).normal(size=(5, 10)), [0, 1, 2, 0, 1])
    err = finite_difference_error(m, lambda with_grad=False: m.reconstruction_loss(x + 0.1, x, with_grad), "head")
    assert err < 1e-7


def test_logits_masked_outside_topology():
    m = small_model()
    x = m.inputs(np.ones((3, 10)), [0, 1, 2])
    p = m.predict_proba(x, [0, 1, 2])
    assert np.all(p[~m.tag_mask] == 0)
    assert np.allclose(p.sum(axis=1), 1)


def test_label_outside_mask_rejected():
    m = small_model()
    bad = int(np.flatnonzero(~m.tag_mask[0])[0])
    with pytest.raises(ValueError):
        m.classification_loss(m.inputs(np.ones((1, 10)), [0]), [0], [bad])


def toy_set(catalog, n=24):
    data = []
    for i in range(n):
        tag = i % 3
        pool = catalog.ids_for_tag(tag)
        f = feature_vector(canonicalize(random_unitary(3, i)))
        data.append(LabeledUnitary(f, pool[(i * 7) % 30], tag, "toy", 3))
    return data


def test_memorizes_toy_set(catalog):
    data = toy_set(catalog)
    m = new_model(catalog)
    hist = train(m, data, TrainConfig(epochs=400, batch_size=8, learning_rate=0.1))
    assert hist["finetune"][-1] < hist["finetune"][0]
    assert topk_accuracy(m, data, 1) == 1.0


def test_training_is_deterministic(catalog):
    data = toy_set(catalog, 9)
    a, b = new_model(catalog), new_model(catalog)
    cfg = TrainConfig(epochs=5)
    train(a, data, cfg)
    train(b, data, cfg)
    assert all(np.array_equal(a.params[k], b.params[k]) for k in a.params)


def test_recommend_requires_training(catalog):
    with pytest.raises(ValueError):
        recommend_seeds(new_model(catalog), np.eye(8), 0)


def test_recommendations_within_topology(catalog):
    data = toy_set(catalog, 9)
    m = new_model(catalog)
    train(m, data, TrainConfig(epochs=3))
    seeds = recommend_seeds(m, random_unitary(3, 0), 1, k=5)
    assert len(seeds) == 5 and all(1 in catalog[s].tags for s in seeds)
    ranked = rank_templates(m, np.array([d.features for d in data[:2]]), [0, 0], 3)
    assert all(len(r) == 3 for r in ranked)


def test_model_round_trip(tmp_path, catalog):
    m = new_model(catalog)
    train(m, toy_set(catalog, 6), TrainConfig(epochs=2))
    m.save(tmp_path / "m.json")
    back = Mlp.load(tmp_path / "m.json")
    x = m.inputs(np.ones((2, 128)), [0, 2])
    assert np.array_equal(back.predict_proba(x, [0, 2]), m.predict_proba(x, [0, 2]))
    assert back.trained and back.layer_sizes == [131, 64, 32, 64, len(catalog)]


def test_model_version_checked():
    d = small_model().to_dict()
    d["version"] = 99
    with pytest.raises(ValueError):
        Mlp.from_dict(d)


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(epochs=0)
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0)


def test_pca_rank_one():
    rng = np.random.default_rng(0)
    x = np.outer(rng.normal(size=50), rng.normal(size=6))
    rep = pca_explained_variance(x)
    assert rep.at(1) == pytest.approx(1.0)
    assert not rep.degenerate


def test_pca_isotropic_and_degenerate():
    x = np.random.default_rng(1).normal(size=(20000, 4))
    assert pca_explained_variance(x).at(2) == pytest.approx(0.5, abs=0.02)
    assert pca_explained_variance(np.ones((5, 3))).degenerate
    with pytest.raises(ValueError):
        pca_explained_variance(np.ones((1, 3)))


def test_dataset_round_trip_and_holdout(tmp_path, catalog):
    data = toy_set(catalog, 6)
    for i, d in enumerate(data):
        d.circuit_family = "qft" if i % 2 else "tfim"
        d.circuit_width = 3 + i % 3
    p = tmp_path / "d.jsonl"
    write_dataset(p, data, 3)
    back = read_dataset(p, 3)
    assert [d.template_id for d in back] == [d.template_id for d in data]
    assert np.array_equal(back[0].features, data[0].features)
    tr, te = split_holdout(back, {"qft": [4]})
    assert len(te) == sum(d.circuit_family == "qft" and d.circuit_width == 4 for d in data)
    assert len(tr) + len(te) == len(data)


def test_labeled_unitary_reconstructs_matrix():
    c = canonicalize(random_unitary(3, 2))
    assert np.array_equal(LabeledUnitary(feature_vector(c), 0, 0).unitary(), c.matrix)


def test_generate_dataset_on_qft3(catalog):
    data, failures = generate_dataset([qft(3)], catalog, families=["qft"], widths=[3])
    assert failures == 0 and len(data) == 1
    assert data[0].circuit_family == "qft" and data[0].root_calls >= 1
    assert data[0].root_cnots <= catalog.K


def test_benchmark_suite_shape():
    suite = benchmark_suite(widths=(3, 4), instances=2)
    fams = [s.family for s in suite]
    assert fams.count("qft") == 2 and fams.count("tfim") == 4


def test_pretraining_memorizes_single_sample(catalog):
    from seedsynth.recommend import pretrain_denoise

    m = new_model(catalog)
    f = feature_vector(canonicalize(random_unitary(3, 1)))
    x = m.inputs(np.tile(f, (16, 1)), [0] * 16)
    pretrain_denoise(m, x, TrainConfig(epochs=300, batch_size=16, learning_rate=0.1, noise_std=0.01))
    assert m.reconstruction_loss(x, x) < 1e-3


def test_two_class_toy_separable(catalog):
    data = []
    for i in range(10):
        f = feature_vector(canonicalize(random_unitary(3, i)))
        data.append(LabeledUnitary(f, 1 if i % 2 else 4, 0))
    m = new_model(catalog)
    train(m, data, TrainConfig(epochs=300, batch_size=10, learning_rate=0.1))
    assert topk_accuracy(m, data, 1) == 1.0
    assert recommend_seeds(m, data[3].unitary(), 0, 1) == [1]


def test_softmax_and_full_ranking(catalog):
    data = toy_set(catalog, 6)
    m = new_model(catalog)
    train(m, data, TrainConfig(epochs=2))
    x = m.inputs(np.array([d.features for d in data]), [d.topology_tag for d in data])
    p = m.predict_proba(x, [d.topology_tag for d in data])
    assert np.allclose(p.sum(axis=1), 1, atol=1e-9) and np.all((p >= 0) & (p <= 1))
    pool = catalog.ids_for_tag(2)
    full = recommend_seeds(m, random_unitary(3, 3), 2, k=len(pool))
    assert sorted(full) == pool


def test_pca_ratio_properties():
    x = np.random.default_rng(4).normal(size=(300, 12)) * np.arange(1, 13)
    rep = pca_explained_variance(x)
    assert np.all(rep.ratios >= 0)
    assert np.all(np.diff(rep.ratios) <= 1e-15)
    assert rep.cumulative[-1] == pytest.approx(1.0, abs=1e-9)


def test_identity_blocks_label_root(catalog):
    from seedsynth.circuit import Circuit, cx

    c = Circuit.skeleton(4, [cx(0, 1), cx(0, 1), cx(2, 3), cx(2, 3)])
    data, failures = generate_dataset([c], catalog)
    assert failures == 0 and data and all(d.template_id == 0 for d in data)


def test_single_cnot_blocks_get_one_cnot_labels(catalog):
    from seedsynth.circuit import Circuit, cx
    from seedsynth.partition import partition

    c = Circuit.skeleton(6, [cx(0, 1), cx(4, 5)])
    data, failures = generate_dataset([c], catalog)
    assert len(data) + failures == len(partition(c).blocks)
    assert all(catalog[d.template_id].cnot_count == 1 for d in data)
