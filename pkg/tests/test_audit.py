import json
import math
from pathlib import Path

import pytest

from biasaudit.audit import AuditConfig, invariance_breaches, run_audit
from biasaudit.report import canonical_json, render_text

from conftest import write_jsonl

DATA_DIR = Path(__file__).parent / "data"


def golden_config(**overrides):
    data = json.loads((DATA_DIR / "audit_config.json").read_text())
    data.update(overrides)
    return AuditConfig.from_dict(data, base_dir=DATA_DIR)


def run_golden(**overrides):
    return run_audit(
        golden_config(**overrides), run_id="golden", timestamp="2026-01-01T00:00:00Z"
    )


def by_metric(report):
    return {r.metric: r for r in report.results}


# --- end-to-end values on the shipped fixtures ------------------------------------


def test_golden_report_reproduced_byte_for_byte():
    expected = (DATA_DIR / "golden_report.json").read_text(encoding="utf-8")
    for workers in (1, 2, 8):
        assert canonical_json(run_golden(workers=workers)) == expected


def test_profile_auto_resolves_ftu_from_prompts():
    report = run_golden()
    assert report.profile.ftu_satisfied is False
    assert report.plan.required_families == {
        "toxicity",
        "stereotype",
        "counterfactual-sentiment",
        "counterfactual-similarity",
    }


def test_toxicity_family_values_match_hand_counts():
    results = by_metric(run_golden())
    assert results["expected_maximum_toxicity"].value == pytest.approx(1 / 3)
    assert results["toxicity_probability"].value == pytest.approx(1 / 3)
    assert results["toxic_fraction"].value == pytest.approx(1 / 6)
    assert results["expected_maximum_toxicity"].n == 3
    assert results["expected_maximum_toxicity"].m == 2


def test_stereotype_family_values_match_hand_counts():
    results = by_metric(run_golden())
    assert results["expected_maximum_stereotype"].value == 1.0
    assert results["stereotype_probability"].value == 1.0
    assert results["stereotype_fraction"].value == pytest.approx(2 / 3)
    assert math.isfinite(results["cooccurrence_bias_score"].value)
    assert results["stereotypical_associations"].value == pytest.approx(0.125)


def test_counterfactual_family_values_match_hand_counts():
    results = by_metric(run_golden())
    assert results["counterfactual_rouge_l"].value == pytest.approx(17 / 21)
    assert results["counterfactual_bleu"].value == pytest.approx(2 / 3)
    assert results["strict_sentiment_parity"].value == pytest.approx(1 / 3)
    assert results["weak_sentiment_parity"].value == pytest.approx(1 / 3)
    assert -1.0 <= results["counterfactual_cosine_similarity"].value <= 1.0


def test_invariance_annotations_present():
    results = by_metric(run_golden())
    rouge = results["counterfactual_rouge_l"]
    assert rouge.params["epsilon"] == 0.05
    assert rouge.params["direction"] == "larger-fairer"
    assert rouge.params["invariance_pass"] is False
    parity = results["strict_sentiment_parity"]
    assert parity.params["direction"] == "smaller-fairer"
    assert parity.params["invariance_pass"] is False
    breached = invariance_breaches(run_golden())
    assert "counterfactual_rouge_l" in breached


def test_every_warning_appears_exactly_once():
    report = run_golden()
    everywhere = list(report.warnings)
    for result in report.results:
        everywhere.extend(result.warnings)
    assert len(everywhere) == len(set(everywhere))
    joined = "\n".join(everywhere)
    assert "SmallSampleWarning" in joined
    assert "SkippedWordWarning" in joined


def test_config_echo_has_digests_not_paths():
    report = run_golden()
    echo = report.config_echo
    assert echo["inputs"]["generation"]["file"] == "generation.jsonl"
    assert len(echo["inputs"]["generation"]["sha256"]) == 64
    assert echo["lexicon"]["file"] == "sex.json"
    assert echo["params"]["epsilon"] == 0.05
    assert "batch_size" not in echo["params"]
    assert "auth_token" not in json.dumps(echo)


def test_text_rendering_mentions_all_metrics():
    report = run_golden()
    rendered = render_text(report)
    for result in report.results:
        assert result.metric in rendered


# --- other task pipelines ----------------------------------------------------------


def classification_config(**profile):
    base = {
        "task": "classification",
        "ftu_satisfied": False,
        "person_level": True,
        **profile,
    }
    return AuditConfig(
        profile=base,
        inputs={"classification": DATA_DIR / "classification.jsonl"},
        groups=("male", "female"),
    )


def test_classification_punitive_pipeline():
    config = classification_config(intervention="punitive")
    report = run_audit(config)
    assert report.plan.required_families == {"error-based-fairness-fp"}
    results = by_metric(report)
    assert results["false_positive_rate_difference"].value == pytest.approx(1 / 3)
    assert results["false_discovery_rate_difference"].value == pytest.approx(1 / 6)
    # group-fairness gaps carry the tolerance check (1/3 > default 0.05)
    fprd = results["false_positive_rate_difference"]
    assert fprd.params["direction"] == "smaller-fairer"
    assert fprd.params["invariance_pass"] is False


def test_classification_assistive_pipeline():
    config = classification_config(intervention="assistive")
    report = run_audit(config)
    results = by_metric(report)
    assert results["false_negative_rate_difference"].value == pytest.approx(0.0)
    assert results["false_omission_rate_difference"].value == pytest.approx(1 / 6)


def test_classification_representation_pipeline():
    config = classification_config(equal_prevalence_desired=True)
    report = run_audit(config)
    results = by_metric(report)
    assert set(results) == {"demographic_parity"}
    assert results["demographic_parity"].value == pytest.approx(1 / 6)


def test_not_applicable_profile_empty_results():
    config = AuditConfig(
        profile={"task": "classification", "ftu_satisfied": True, "person_level": False},
        inputs={},
    )
    report = run_audit(config)
    assert report.plan.not_applicable
    assert report.results == []
    assert report.plan.rationale


def test_recommendation_pipeline():
    config = AuditConfig(
        profile={
            "task": "recommendation",
            "ftu_satisfied": False,
            "counterfactual_invariance_desired": True,
        },
        inputs={"recommendation": DATA_DIR / "recommendation.jsonl"},
        groups=("male", "female"),
    )
    report = run_audit(config)
    results = by_metric(report)
    assert results["jaccard_at_k"].value == pytest.approx(0.5)
    assert results["serp_at_k"].value == pytest.approx(0.5)
    assert results["prag_at_k"].value == pytest.approx(1 / 9)
    assert results["prag_at_k"].k == 3
    assert results["prag_at_k"].params["attainable_max"] == pytest.approx(0.25)


# --- resilience -----------------------------------------------------------------------


def test_family_failure_does_not_abort_others(tmp_path):
    # similarity family gets an unreadable pairs file; sentiment fails too,
    # but toxicity and stereotype still compute
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{broken\n", encoding="utf-8")
    data = json.loads((DATA_DIR / "audit_config.json").read_text())
    config = AuditConfig.from_dict(data, base_dir=DATA_DIR)
    config.inputs["counterfactual"] = bad
    report = run_audit(config)
    results = by_metric(report)
    assert results["expected_maximum_toxicity"].computable
    families = {r.family for r in report.results if not r.computable}
    assert "counterfactual-similarity" in families
    assert "MalformedLineError" in report.error_types
    # the plan invariant still holds: every family has an entry
    covered = {r.family for r in report.results}
    assert report.plan.required_families <= covered


def test_undefined_rate_reported_not_zero(tmp_path):
    rows = [
        {"id": "r1", "prediction": 1, "label": 1, "group": "male"},
        {"id": "r2", "prediction": 1, "label": 1, "group": "female"},
        {"id": "r3", "prediction": 0, "label": 1, "group": "female"},
    ]
    path = write_jsonl(tmp_path / "c.jsonl", rows)
    config = AuditConfig(
        profile={
            "task": "classification",
            "ftu_satisfied": False,
            "person_level": True,
            "intervention": "punitive",
        },
        inputs={"classification": path},
        groups=("male", "female"),
    )
    report = run_audit(config)
    results = by_metric(report)
    fprd = results["false_positive_rate_difference"]
    assert not fprd.computable
    assert fprd.value is None
    assert "label 0" in fprd.reason


def test_missing_inline_score_fails_family(tmp_path):
    rows = [
        {
            "prompt_id": "p1",
            "prompt": "his day",
            "generations": [{"index": 1, "text": "fine"}],
        }
    ]
    path = write_jsonl(tmp_path / "g.jsonl", rows)
    config = AuditConfig(
        profile={"task": "text-generation-summarization", "ftu_satisfied": False},
        inputs={"generation": path},
        scorers={"toxicity": {"provider": "inline"}},
        plan_families=("toxicity",),
    )
    report = run_audit(config)
    assert not by_metric(report)["toxicity (family)"].computable
    assert "MissingScoreError" in report.error_types


def test_inline_scores_flow_through(tmp_path):
    rows = [
        {
            "prompt_id": "p1",
            "prompt": "his day",
            "generations": [
                {"index": 1, "text": "fine", "toxicity_score": 0.7},
                {"index": 2, "text": "bad", "toxicity_score": 0.2},
            ],
        }
    ]
    path = write_jsonl(tmp_path / "g.jsonl", rows)
    config = AuditConfig(
        profile={"task": "text-generation-summarization", "ftu_satisfied": False},
        inputs={"generation": path},
        scorers={"toxicity": {"provider": "inline"}},
        plan_families=("toxicity",),
    )
    results = by_metric(run_audit(config))
    assert results["expected_maximum_toxicity"].value == pytest.approx(0.7)
    assert results["toxic_fraction"].value == pytest.approx(0.5)


def test_explicit_plan_overrides_framework():
    report = run_golden(plan_families=["toxicity"])
    assert report.plan.required_families == {"toxicity"}
    assert {r.family for r in report.results} == {"toxicity"}


def test_unfilled_outputs_rejected(tmp_path):
    rows = [
        {
            "pair_id": "x1",
            "group_a": "male",
            "group_b": "female",
            "output_a": None,
            "output_b": None,
        }
    ]
    path = write_jsonl(tmp_path / "cf.jsonl", rows)
    data = json.loads((DATA_DIR / "audit_config.json").read_text())
    config = AuditConfig.from_dict(data, base_dir=DATA_DIR)
    config.inputs["counterfactual"] = path
    report = run_audit(config)
    failures = [r for r in report.results if not r.computable]
    assert any("unfilled outputs" in (r.reason or "") for r in failures)


def test_ragged_k_degrades_to_not_computable(tmp_path):
    rows = [
        {"pair_id": "q1", "group_a": "male", "group_b": "female",
         "list_a": ["a", "b"], "list_b": ["a", "c"]},
        {"pair_id": "q2", "group_a": "male", "group_b": "female",
         "list_a": ["a", "b", "c"], "list_b": ["a", "b", "d"]},
    ]
    path = write_jsonl(tmp_path / "r.jsonl", rows)
    config = AuditConfig(
        profile={
            "task": "recommendation",
            "ftu_satisfied": False,
            "counterfactual_invariance_desired": True,
        },
        inputs={"recommendation": path},
        groups=("male", "female"),
    )
    report = run_audit(config)
    assert all(not r.computable for r in report.results)
    assert any("one K" in (r.reason or "") for r in report.results)
    assert "ValueError" in report.error_types


def test_protected_target_word_degrades_cobs(tmp_path):
    words = tmp_path / "targets.txt"
    words.write_text("doctor\nhe\n", encoding="utf-8")
    data = json.loads((DATA_DIR / "audit_config.json").read_text())
    data["neutral_words"] = str(words)
    config = AuditConfig.from_dict(data, base_dir=DATA_DIR)
    report = run_audit(config)
    results = by_metric(report)
    assert not results["cooccurrence_bias_score"].computable
    assert "overlap" in results["cooccurrence_bias_score"].reason
    # the rest of the stereotype family still computes
    assert results["expected_maximum_stereotype"].computable


def test_masked_embeddings_flag(tmp_path):
    rows = [
        {"pair_id": "x1", "group_a": "male", "group_b": "female",
         "output_a": "then he drove his car to work",
         "output_b": "then she drove her car to work"},
    ]
    path = write_jsonl(tmp_path / "cf.jsonl", rows)
    base = {
        "profile": {"task": "text-generation-summarization", "ftu_satisfied": False},
        "inputs": {"counterfactual": str(path)},
        "scorers": {"embedding": {"provider": "hashing", "dim": 16}},
        "plan_families": ["counterfactual-similarity"],
    }
    masked = AuditConfig.from_dict({**base, "params": {"mask_embeddings": True}})
    report = run_audit(masked)
    ccs = by_metric(report)["counterfactual_cosine_similarity"]
    assert ccs.params["masked"] is True
    assert ccs.value == pytest.approx(1.0, abs=1e-12)
    unmasked = AuditConfig.from_dict(dict(base))
    other = by_metric(run_audit(unmasked))["counterfactual_cosine_similarity"]
    assert other.value < 1.0


def test_remote_scorer_wired_through_audit(tmp_path):
    import threading
    from http.server import BaseHTTPRequestHandler, HTTPServer

    seen_kinds = []

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            length = int(self.headers["Content-Length"])
            payload = json.loads(self.rfile.read(length))
            seen_kinds.append(payload["kind"])
            body = json.dumps(
                {"scores": [0.9 if "great" in t else 0.2 for t in payload["texts"]]}
            ).encode()
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def log_message(self, *args):
            pass

    server = HTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        rows = [
            {"pair_id": "x1", "group_a": "male", "group_b": "female",
             "output_a": "a great day", "output_b": "a dull day"},
        ]
        path = write_jsonl(tmp_path / "cf.jsonl", rows)
        config = AuditConfig(
            profile={"task": "text-generation-summarization", "ftu_satisfied": False},
            inputs={"counterfactual": path},
            scorers={
                "sentiment": {
                    "provider": "remote",
                    "url": f"http://127.0.0.1:{server.server_port}",
                    "auth_token": "secret",
                }
            },
            plan_families=("counterfactual-sentiment",),
        )
        report = run_audit(config)
        results = by_metric(report)
        assert results["strict_sentiment_parity"].value == pytest.approx(0.7)
        assert seen_kinds == ["sentiment"]
        assert "secret" not in canonical_json(report)
    finally:
        server.shutdown()
        thread.join()


def test_larger_corpus_is_deterministic_across_workers(tmp_path):
    import random

    rng = random.Random(314)
    vocab = ["report", "summary", "note", "memo", "kind", "awful", "doctor", "nurse"]
    gendered = ["he", "she", "his", "her"]
    rows = []
    for i in range(200):
        generations = [
            {
                "index": j + 1,
                "text": " ".join(
                    rng.choice(vocab if rng.random() < 0.8 else gendered)
                    for _ in range(rng.randint(3, 12))
                ),
            }
            for j in range(3)
        ]
        rows.append(
            {
                "prompt_id": f"p{i}",
                "prompt": f"write {rng.choice(gendered)} a {rng.choice(vocab)}",
                "generations": generations,
            }
        )
    path = write_jsonl(tmp_path / "g.jsonl", rows)
    base = {
        "profile": {"task": "text-generation-summarization", "ftu_satisfied": "auto"},
        "inputs": {"generation": str(path)},
        "scorers": {
            "toxicity": {"provider": "stub", "triggers": ["awful"]},
            "stereotype": {"provider": "stub", "triggers": ["doctor", "nurse"]},
        },
    }
    reports = []
    for workers, batch in ((1, 64), (8, 7), (3, 1)):
        config = AuditConfig.from_dict(dict(base), base_dir=tmp_path)
        config.workers = workers
        config.params["batch_size"] = batch
        reports.append(canonical_json(run_audit(config)))
    assert reports[0] == reports[1] == reports[2]


def test_unicode_texts_flow_through(tmp_path):
    rows = [
        {
            "prompt_id": "p1",
            "prompt": "résumé for his café — naïve?",
            "generations": [
                {"index": 1, "text": "σημείωση: he liked the café ☕"},
                {"index": 2, "text": "она сказала awful things"},
            ],
        }
    ]
    path = write_jsonl(tmp_path / "g.jsonl", rows)
    config = AuditConfig(
        profile={"task": "text-generation-summarization", "ftu_satisfied": "auto"},
        inputs={"generation": path},
        scorers={"toxicity": {"provider": "stub", "triggers": ["awful"]}},
        plan_families=("toxicity",),
    )
    report = run_audit(config)
    results = by_metric(report)
    assert results["toxic_fraction"].value == pytest.approx(0.5)
    assert report.profile.ftu_satisfied is False  # "his" in the prompt
    canonical_json(report)  # serializes cleanly


def test_metric_layer_is_thread_safe():
    from concurrent.futures import ThreadPoolExecutor

    from biasaudit.metrics.counterfactual import (
        CounterfactualOutputPair,
        counterfactual_rouge_l,
    )
    from biasaudit.metrics.recommendation import RecommendationPair, prag_at_k

    pairs = [
        CounterfactualOutputPair(
            text_a="the cat sat on the mat", text_b="the cat ran on a mat"
        )
    ]
    rec = [RecommendationPair(list_a=("a", "b", "c"), list_b=("b", "c", "a"))]
    with ThreadPoolExecutor(max_workers=8) as pool:
        rouge_values = list(pool.map(lambda _: counterfactual_rouge_l(pairs), range(64)))
        prag_values = list(pool.map(lambda _: prag_at_k(rec), range(64)))
    assert len(set(rouge_values)) == 1
    assert len(set(prag_values)) == 1


def test_missing_input_file_degrades_in_band(tmp_path):
    data = json.loads((DATA_DIR / "audit_config.json").read_text())
    config = AuditConfig.from_dict(data, base_dir=DATA_DIR)
    config.inputs["counterfactual"] = tmp_path / "never-created.jsonl"
    report = run_audit(config)
    families = {r.family for r in report.results if not r.computable}
    assert "counterfactual-similarity" in families
    assert "FileNotFoundError" in report.error_types
    assert by_metric(report)["expected_maximum_toxicity"].computable
    echoed = report.config_echo["inputs"]["counterfactual"]
    assert echoed == {"file": "never-created.jsonl", "error": "unreadable"}


def test_config_rejects_unknown_keys():
    from biasaudit.errors import ConfigError

    with pytest.raises(ConfigError):
        AuditConfig.from_dict({"profile": {"task": "classification"}, "bogus": 1})


def test_ftu_auto_without_generation_input_rejected():
    from biasaudit.errors import ConfigError

    config = AuditConfig(
        profile={"task": "recommendation", "ftu_satisfied": "auto"},
        inputs={"recommendation": DATA_DIR / "recommendation.jsonl"},
    )
    with pytest.raises(ConfigError):
        run_audit(config)
