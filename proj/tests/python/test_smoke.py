import json
from pathlib import Path

import pytest

import textpecker as tp

DATA = Path(__file__).resolve().parents[2] / "data"
FIXTURE = Path(__file__).resolve().parents[1] / "data" / "tsap_fixture.jsonl"


def test_scores():
    assert tp.structural_score(1, 10, 5) == 0.5
    assert tp.structural_score(2, 8, 1) == 0.75
    r = tp.composite_reward("cat", "c[[a]]t")
    assert r["reward"] == pytest.approx(1 / 3, abs=1e-12)
    assert (r["n_anomalous"], r["n_total"]) == (1, 3)
    assert tp.composite_reward("hello", "hello")["reward"] == 1.0
    assert tp.ned("kitten", "sitting") == pytest.approx(3 / 7, abs=1e-12)
    assert tp.levenshtein("文本", "文字") == 1
    assert tp.anomaly_counts("文[[本]]", "zh") == (1, 2)
    assert tp.normalize_marked("a   [[b]]c") == "a [[b]]c"


def test_errors():
    with pytest.raises(tp.ParseError) as err:
        tp.composite_reward("x", "ab[[x")
    assert err.value.offset == 2
    assert isinstance(err.value, tp.Error)
    with pytest.raises(tp.ContractError):
        tp.composite_reward("x", "x", w_semantic=0.9)
    with pytest.raises(tp.SchemaError):
        tp.composite_reward("x", "x", language="fr")


def test_service():
    svc = tp.RewardService()
    assert svc.health()["omega"] == 5.0
    status, body = svc.score({"target": "cat", "prediction": "c[[a]]t", "language": "en"})
    assert status == 200
    assert body["reward"] == pytest.approx(1 / 3, abs=1e-12)
    status, body = svc.score({"target": "cat", "language": "en"})
    assert status == 400 and body["error"]["field"] == "prediction"
    status, body = svc.batch({"requests": [{"target": "a", "prediction": "a", "language": "en"}] * 257})
    assert status == 413 and body["error"]["limit"] == 256


def test_metrics():
    report = tp.evaluate_dataset(FIXTURE)
    assert report["tsap"]["precision"] == pytest.approx(1 / 3, abs=1e-15)
    assert report["delta"] == 0.7
    assert tp.tsap_match(10, 7, 0.7)
    assert not tp.tsap_match(10, 6, 0.7)


def test_synthesis_round_trip(tmp_path):
    cfg = tp.default_engine_config()
    assert cfg["anomaly_prob"] == 0.5
    manifest = tp.synthesize_dataset(tmp_path, 3, DATA / "strokes.jsonl", DATA / "corpus_zh.txt", seed=5)
    assert manifest["complete"] and manifest["counts"]["images"] == 3
    again = tp.synthesize_dataset(tmp_path / "again", 3, DATA / "strokes.jsonl", DATA / "corpus_zh.txt", seed=5)
    assert again["images"] == manifest["images"]
    labels = tmp_path / "labels.jsonl"
    assert len([json.loads(line) for line in labels.read_text().splitlines()]) == manifest["counts"]["images"] + manifest["counts"]["boxes"]
    report = tp.evaluate_dataset(labels, level="box", predictions=labels)
    assert report["ctr"]["recall"] == 1.0 and report["ctr"]["ned"] == 0.0
    with pytest.raises(tp.SchemaError):
        tp.synthesize_dataset(tmp_path, 1, DATA / "strokes.jsonl", DATA / "corpus_zh.txt", config={"no_such_field": 1})
