import json

import pytest
from fastapi.testclient import TestClient

from topicsum.service.app import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def run_offline_pipeline(client, java_tree, tmp_path, epochs=3):
    """Drive extract -> topic model -> corpus -> train through the API."""
    classes = tmp_path / "classes.jsonl"
    lda = tmp_path / "lda.json"
    corpus = tmp_path / "corpus"
    ckpt = tmp_path / "ckpt"
    r = client.post(
        "/extract", json={"source_dir": str(java_tree), "out_path": str(classes)}
    )
    assert r.status_code == 200, r.text
    r = client.post(
        "/lda/train",
        json={
            "classes_path": str(classes),
            "model_path": str(lda),
            "k": 2,
            "iterations": 40,
            "seed": 1,
        },
    )
    assert r.status_code == 200, r.text
    r = client.post(
        "/build",
        json={
            "classes_path": str(classes),
            "lda_model_path": str(lda),
            "out_dir": str(corpus),
            "n_topics": 2,
            "max_code_len": 30,
            "max_sum_len": 12,
        },
    )
    assert r.status_code == 200, r.text
    build_report = r.json()
    r = client.post(
        "/train",
        json={
            "instances_path": str(corpus),
            "checkpoint_dir": str(ckpt),
            "model": {"embed_dim": 8, "topic_embed_dim": 4, "hidden_dim": 10},
            "training": {"epochs": epochs, "batch_size": 2, "seed": 3},
        },
    )
    assert r.status_code == 200, r.text
    return classes, lda, corpus, ckpt, build_report, r.json()


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json()["status"] == "ok"


def test_extract_reports_counts_and_parse_errors(client, java_tree, tmp_path):
    out = tmp_path / "classes.jsonl"
    r = client.post(
        "/extract", json={"source_dir": str(java_tree), "out_path": str(out)}
    )
    assert r.status_code == 200
    report = r.json()
    assert report["files"] == 4
    assert report["classes"] == 3
    assert report["methods"] == 6
    assert len(report["errors"]) == 1
    assert "Broken.java" in report["errors"][0]
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 3
    # Deterministic sorted-by-path order.
    assert [json.loads(l)["class"] for l in lines] == [
        "Audio",
        "JsonArray",
        "JsonValue",
    ]


def test_extract_missing_directory_is_a_data_error(client, tmp_path):
    r = client.post(
        "/extract",
        json={"source_dir": str(tmp_path / "nope"), "out_path": str(tmp_path / "o")},
    )
    assert r.status_code == 400
    assert r.json()["detail"]["kind"] == "data"


def test_lda_train_validates_k(client, tmp_path):
    r = client.post(
        "/lda/train",
        json={"classes_path": "x", "model_path": "y", "k": 0},
    )
    assert r.status_code == 422


def test_summarize_requires_exactly_one_source(client):
    r = client.post(
        "/summarize", json={"checkpoint": "a", "lda_model": "b", "beam": 1}
    )
    assert r.status_code == 422


def test_eval_length_mismatch_is_a_data_error(client, tmp_path):
    hyp = tmp_path / "hyp.jsonl"
    ref = tmp_path / "ref.jsonl"
    hyp.write_text('{"summary": "a b"}\n{"summary": "c"}\n', encoding="utf-8")
    ref.write_text('{"summary": "a b"}\n', encoding="utf-8")
    r = client.post(
        "/eval",
        json={"hypotheses_path": str(hyp), "references_path": str(ref)},
    )
    assert r.status_code == 400
    assert r.json()["detail"]["kind"] == "data"


def test_full_pipeline_round_trip(client, java_tree, tmp_path):
    classes, lda, corpus, ckpt, build_report, train_report = run_offline_pipeline(
        client, java_tree, tmp_path
    )
    assert build_report["instances"] == 5
    assert build_report["skipped_no_summary"] == 1
    assert (ckpt / "manifest.json").exists()
    assert (ckpt / "params.bin").exists()
    assert (ckpt / "loss_log.csv").exists()
    assert (ckpt / "code_vocab.json").exists()
    assert train_report["instances"] == 5

    source = (java_tree / "json" / "JsonValue.java").read_text()
    r = client.post(
        "/summarize",
        json={
            "checkpoint": str(ckpt),
            "lda_model": str(lda),
            "source": source,
            "beam": 2,
        },
    )
    assert r.status_code == 200, r.text
    summaries = r.json()["summaries"]
    assert [s["method"] for s in summaries] == ["writeTo", "size"]
    assert all(s["class_name"] == "JsonValue" for s in summaries)

    hyp = tmp_path / "hyp.jsonl"
    ref = tmp_path / "ref.jsonl"
    records = [{"summary": ["writes", "the", "json"]}, {"summary": ["returns", "size"]}]
    for path in (hyp, ref):
        path.write_text(
            "\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8"
        )
    r = client.post(
        "/eval", json={"hypotheses_path": str(hyp), "references_path": str(ref)}
    )
    assert r.status_code == 200
    report = r.json()
    assert report["corpus_bleu4"] == pytest.approx(1.0, abs=1e-12)
    assert report["exact_match_rate"] == 1.0
    assert report["n"] == 2


def test_summarize_with_source_path(client, java_tree, tmp_path):
    classes, lda, corpus, ckpt, _, _ = run_offline_pipeline(
        client, java_tree, tmp_path, epochs=1
    )
    r = client.post(
        "/summarize",
        json={
            "checkpoint": str(ckpt),
            "lda_model": str(lda),
            "source_path": str(java_tree / "audio" / "Audio.java"),
        },
    )
    assert r.status_code == 200
    assert [s["method"] for s in r.json()["summaries"]] == ["create", "sampleRate"]
