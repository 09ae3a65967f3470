import numpy as np
import pytest
from sklearn.base import clone

from oracles import random_disc_map
from qanet.corruption import corrupt
from qanet.estimators import QANetRegressor, SegmentationCorruptor

TINY = dict(input_size=8, n_blocks=2, features_per_block=(3, 4), fc_widths=(5,))


def _tiny_pairs(n=6, seed=0):
    rng = np.random.default_rng(seed)
    pairs = []
    y = []
    for _ in range(n):
        img = rng.random((8, 8)).astype(np.float64)
        seg = random_disc_map(rng, 8, 8, 2)
        pairs.append((img, seg))
        y.append(float(rng.random()))
    return pairs, np.array(y)


def test_get_params_roundtrip_through_clone():
    est = QANetRegressor(variant="siamese", epochs=2, learning_rate=5e-3)
    dup = clone(est)
    assert dup.get_params() == est.get_params()
    assert dup.variant == "siamese"
    assert dup.epochs == 2


def test_set_params_updates_nested_training_config():
    est = QANetRegressor()
    est.set_params(optimizer="sgd", batch_size=4)
    assert est._train_config().optimizer == "sgd"
    assert est._train_config().batch_size == 4


def test_fit_predict_returns_scores_in_unit_interval():
    pairs, y = _tiny_pairs()
    est = QANetRegressor(epochs=2, batch_size=3, **TINY)
    est.fit(pairs, y)
    pred = est.predict(pairs)
    assert pred.shape == (len(pairs),)
    assert np.all(pred >= 0.0) and np.all(pred <= 1.0)
    assert len(est.history_) == 2


def test_fit_is_deterministic_for_a_fixed_seed():
    pairs, y = _tiny_pairs()
    a = QANetRegressor(epochs=2, batch_size=3, seed=11, **TINY).fit(pairs, y).predict(pairs)
    b = QANetRegressor(epochs=2, batch_size=3, seed=11, **TINY).fit(pairs, y).predict(pairs)
    assert np.array_equal(a, b)


def test_predict_before_fit_raises():
    pairs, _ = _tiny_pairs(n=1)
    with pytest.raises(ValueError, match="not fitted"):
        QANetRegressor().predict(pairs)


def test_save_load_roundtrip_predicts_identically(tmp_path):
    pairs, y = _tiny_pairs()
    est = QANetRegressor(epochs=1, batch_size=3, **TINY)
    est.fit(pairs, y)
    path = str(tmp_path / "model.qant")
    est.save(path)
    loaded = QANetRegressor.load(path)
    assert np.array_equal(loaded.predict(pairs), est.predict(pairs))
    assert loaded.get_params()["input_size"] == 8


def test_save_before_fit_raises(tmp_path):
    with pytest.raises(ValueError, match="fit"):
        QANetRegressor().save(str(tmp_path / "model.qant"))


def test_validation_split_adds_history_columns():
    pairs, y = _tiny_pairs(n=8)
    est = QANetRegressor(epochs=1, batch_size=4, **TINY)
    est.fit(pairs[:5], y[:5], validation=(pairs[5:], y[5:]))
    row = est.history_[0]
    assert "val_mse" in row and "val_auc" in row


def test_corruptor_is_deterministic_per_instance():
    rng = np.random.default_rng(4)
    maps = [random_disc_map(rng, 24, 24, 4) for _ in range(5)]
    out_a = SegmentationCorruptor(seed=9).transform(maps)
    out_b = SegmentationCorruptor(seed=9).transform(maps)
    for a, b in zip(out_a, out_b):
        assert np.array_equal(a, b)


def test_corruptor_elements_get_independent_draws():
    rng = np.random.default_rng(5)
    maps = [random_disc_map(rng, 24, 24, 4)] * 4
    out = SegmentationCorruptor(seed=2).transform(maps)
    assert any(not np.array_equal(out[0], m) for m in out[1:])


def test_transform_scored_matches_direct_recompute():
    rng = np.random.default_rng(6)
    maps = [random_disc_map(rng, 24, 24, 4) for _ in range(4)]
    corr = SegmentationCorruptor(domain="cells", measure="seg", seed=3)
    out, scores, params = corr.transform_scored(maps)
    assert scores.shape == (4,)
    for m, corrupted, q, p in zip(maps, out, scores, params):
        redo = corrupt(m, p, "seg")
        assert np.array_equal(redo.corrupted, corrupted)
        assert redo.true_q == q


def test_corruptor_rejects_unknown_domain_and_measure():
    with pytest.raises(ValueError, match="domain"):
        SegmentationCorruptor(domain="plants").fit()
    with pytest.raises(ValueError, match="measure"):
        SegmentationCorruptor(measure="f1").fit()
