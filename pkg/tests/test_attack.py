import numpy as np
import pytest

from risecure.attack import (MODES, CrpDataset, evaluate, generate_crps,
                             read_csv, run_attack, train_logreg, write_csv)
from risecure.extractor import get_code
from risecure.puf import ArbiterPuf


def _arbiter(seed=0):
    return ArbiterPuf(seed, stages=64, sigma=0.0)


def test_generate_crps_raw_mode_labels_are_true_responses():
    puf = _arbiter(1)
    data = generate_crps(puf, "raw_arbiter", 500, seed=0)
    assert data.challenges.shape == (500, 64)
    assert np.array_equal(data.responses, puf.eval_bits(data.challenges, None))
    again = generate_crps(puf, "raw_arbiter", 500, seed=0)
    assert np.array_equal(data.challenges, again.challenges)
    other = generate_crps(puf, "raw_arbiter", 500, seed=1)
    assert not np.array_equal(data.challenges, other.challenges)


def test_generate_crps_validation():
    puf = _arbiter(2)
    with pytest.raises(ValueError):
        generate_crps(puf, "raw_arbiter", 50, seed=0)
    with pytest.raises(ValueError):
        generate_crps(puf, "sidechannel", 500, seed=0)
    with pytest.raises(ValueError):
        generate_crps(puf, "hashed_bit", 500, seed=0)  # code missing


def test_hashed_mode_labels_are_roughly_balanced():
    data = generate_crps(_arbiter(3), "hashed_bit", 1000, seed=0, code=get_code("bch"))
    assert data.challenges.shape == (1000, 128)
    assert 0.4 < data.responses.mean() < 0.6


def test_training_loss_never_increases():
    puf = _arbiter(4)
    for mode, code in (("raw_arbiter", None), ("hashed_bit", get_code("bch"))):
        data = generate_crps(puf, mode, 1000, seed=0, code=code)
        model = train_logreg(data, epochs=120, seed=0)
        losses = np.array(model.loss_history)
        assert len(losses) == 120
        assert np.all(np.diff(losses) <= 1e-12)


def test_training_input_validation():
    data = generate_crps(_arbiter(5), "raw_arbiter", 150, seed=0)
    with pytest.raises(ValueError):
        train_logreg(data)
    flat = CrpDataset(np.zeros((300, 64), dtype=np.uint8),
                      np.zeros(300, dtype=np.uint8), "raw_arbiter")
    with pytest.raises(ValueError):
        train_logreg(flat)


def test_raw_mode_is_learnable_and_hashed_mode_is_not():
    # scaled-down run; the full-size figures live in the acceptance suite
    puf = _arbiter(6)
    raw = generate_crps(puf, "raw_arbiter", 2500, seed=0)
    raw_train = CrpDataset(raw.challenges[:2000], raw.responses[:2000], raw.mode)
    raw_test = CrpDataset(raw.challenges[2000:], raw.responses[2000:], raw.mode)
    model = train_logreg(raw_train, epochs=200, seed=0)
    assert evaluate(model, raw_test) >= 0.90

    hashed = generate_crps(puf, "hashed_bit", 2500, seed=0, code=get_code("bch"))
    h_train = CrpDataset(hashed.challenges[:2000], hashed.responses[:2000], hashed.mode)
    h_test = CrpDataset(hashed.challenges[2000:], hashed.responses[2000:], hashed.mode)
    h_model = train_logreg(h_train, epochs=200, seed=0)
    assert 0.38 <= evaluate(h_model, h_test) <= 0.62


def test_evaluate_rejects_mismatched_model_and_data():
    raw = generate_crps(_arbiter(7), "raw_arbiter", 500, seed=0)
    hashed = generate_crps(_arbiter(7), "hashed_bit", 500, seed=0, code=get_code("bch"))
    model = train_logreg(raw, epochs=20, seed=0)
    with pytest.raises(ValueError):
        evaluate(model, hashed)
    short = CrpDataset(raw.challenges[:, :32], raw.responses, "raw_arbiter")
    with pytest.raises(ValueError):
        evaluate(model, short)


def test_csv_roundtrip(tmp_path):
    data = generate_crps(_arbiter(8), "raw_arbiter", 300, seed=0)
    path = tmp_path / "crps.csv"
    write_csv(data, path)
    back = read_csv(path, "raw_arbiter", 64)
    assert np.array_equal(back.challenges, data.challenges)
    assert np.array_equal(back.responses, data.responses)

    bad = tmp_path / "bad.csv"
    bad.write_text("challenge,bit\nff,1\n")
    with pytest.raises(ValueError):
        read_csv(bad, "raw_arbiter", 64)


def test_run_attack_report_shape_and_determinism():
    kw = dict(seed=3, train_count=1500, test_count=500, epochs=100)
    a = run_attack(**kw)
    b = run_attack(**kw)
    for mode in MODES:
        assert a[mode]["test_accuracy"] == b[mode]["test_accuracy"]
        assert 0.0 <= a[mode]["test_accuracy"] <= 1.0
    assert a["accuracy_gap"] == pytest.approx(
        a["raw_arbiter"]["test_accuracy"] - a["hashed_bit"]["test_accuracy"])
