"""Experiment harness: configs, persistence, integrity, claim matrix."""

import json
import os

import numpy as np
import pytest

from wavecorr.experiments import (
    ExperimentConfig,
    KINDS,
    born_rule_setup,
    canonical_json,
    config_hash,
    load_summary,
    run_experiment,
    verify_claims,
    write_run,
)

# === configuration ===


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        ExperimentConfig.build("teleportation")


def test_unknown_option_rejected():
    with pytest.raises(ValueError):
        ExperimentConfig.build("measure_dominance", {"spacing": 0.2, "typo": 1})


def test_defaults_complete_for_every_kind():
    for kind in KINDS:
        cfg = ExperimentConfig.build(kind)
        assert cfg.kind == kind
        assert cfg.options


def test_config_hash_stable_and_sensitive():
    base = {"kind": "x", "options": {"a": 1, "b": [1.5, 2.0]}, "seed": 3}
    reordered = {"seed": 3, "options": {"b": [1.5, 2.0], "a": 1}, "kind": "x"}
    assert config_hash(base) == config_hash(reordered)
    assert len(config_hash(base)) == 64
    changed = {**base, "seed": 4}
    assert config_hash(changed) != config_hash(base)


def test_canonical_json_handles_numpy_scalars():
    text = canonical_json(
        {"f": np.float64(0.5), "i": np.int64(3), "b": np.bool_(True)}
    )
    assert json.loads(text) == {"f": 0.5, "i": 3, "b": True}


# === measurement setup ===


def test_born_setup_single_branch_is_trivial():
    setup = born_rule_setup([1.0], pointer_sites=2, coupling=1.0)
    assert setup.trivial
    assert len(setup.pairs) == 1
    assert setup.branch_sites == (0,)
    # the frozen particle factor reduces the coupled H to one matched well
    assert setup.hamiltonian.kind == "pinning"
    assert np.argmax(setup.pairs[0].psi2.site_probabilities) == 0


def test_born_setup_two_branches():
    setup = born_rule_setup([0.5, 0.5], pointer_sites=2, coupling=1.0)
    assert not setup.trivial
    assert len(setup.pairs) == 2
    assert setup.lattice.sites == 4
    assert setup.hamiltonian.kind == "composite_detector"
    assert setup.branch_sites == (0, 3)  # matched wells k*P + k
    for pair, well in zip(setup.pairs, setup.branch_sites):
        assert np.argmax(pair.psi2.site_probabilities) == well


def test_born_setup_validation():
    with pytest.raises(ValueError):
        born_rule_setup([], pointer_sites=2, coupling=1.0)
    with pytest.raises(ValueError):
        born_rule_setup([0.7, 0.2], pointer_sites=2, coupling=1.0)  # sum != 1
    with pytest.raises(ValueError):
        born_rule_setup([0.99, 0.01], pointer_sites=2, coupling=1.0, prob_quanta=16)
    with pytest.raises(ValueError):
        born_rule_setup([0.5, 0.5], pointer_sites=1, coupling=1.0)


# === running and persistence ===


def _run(kind, tmp_path, seed=11, overrides=None):
    cfg = ExperimentConfig.build(kind, overrides, seed=seed, out_dir=str(tmp_path))
    record, manifest = run_experiment(cfg)
    return record, manifest


def test_fast_kinds_pass(tmp_path):
    for kind in ("ratios_sweep", "measure_dominance", "nonlinearity"):
        record, manifest = _run(kind, tmp_path / kind)
        assert record.kind == kind
        assert record.checks, kind
        for name, check in record.checks.items():
            assert check.passed, f"{kind}:{name}: {check.detail}"
        assert manifest.config_hash == config_hash(record.config)


def test_metrics_deterministic_for_seed(tmp_path):
    a, _ = _run("time_symmetry", tmp_path / "a", seed=7)
    b, _ = _run("time_symmetry", tmp_path / "b", seed=7)
    assert a.metrics == b.metrics
    c, _ = _run("time_symmetry", tmp_path / "c", seed=8)
    assert c.metrics != a.metrics


def test_write_run_layout_and_roundtrip(tmp_path):
    record, manifest = _run("nonlinearity", tmp_path)
    write_run(record, manifest, str(tmp_path), 11)
    names = sorted(os.listdir(tmp_path))
    assert "manifest.json" in names
    assert "summary.json" in names
    series_files = [n for n in names if n.startswith("series_") and n.endswith(".csv")]
    assert len(series_files) == len(record.series)
    summary = load_summary(str(tmp_path))
    assert summary["_integrity_issues"] == []
    assert summary["kind"] == "nonlinearity"
    assert config_hash(summary["config"]) == manifest.config_hash
    for key, value in record.metrics.items():
        np.testing.assert_allclose(summary["metrics"][key], value, rtol=1e-15)


def test_series_floats_have_full_precision(tmp_path):
    record, manifest = _run("nonlinearity", tmp_path)
    write_run(record, manifest, str(tmp_path), 11)
    name = [n for n in os.listdir(tmp_path) if n.startswith("series_families")][0]
    with open(tmp_path / name) as f:
        header = f.readline().strip().split(",")
        row = f.readline().strip().split(",")
    cell = dict(zip(header, row))["log_contribution"]
    # 17 significant digits survive the round trip exactly
    assert "%.17g" % float(cell) == cell


def test_rewrite_is_byte_identical(tmp_path):
    record, manifest = _run("nonlinearity", tmp_path)
    dir_a, dir_b = tmp_path / "a", tmp_path / "b"
    write_run(record, manifest, str(dir_a), 11)
    write_run(record, manifest, str(dir_b), 11)
    for name in sorted(os.listdir(dir_a)):
        if name == "manifest.json":
            continue  # carries wall-clock timestamps
        with open(dir_a / name, "rb") as f:
            blob_a = f.read()
        with open(dir_b / name, "rb") as f:
            blob_b = f.read()
        assert blob_a == blob_b, name


def test_tampered_summary_is_reported(tmp_path):
    record, manifest = _run("nonlinearity", tmp_path)
    write_run(record, manifest, str(tmp_path), 11)
    path = tmp_path / "summary.json"
    with open(path) as f:
        summary = json.load(f)
    summary["metrics"]["suppression_ratio"] = 1e-12  # doctor one number
    with open(path, "w") as f:
        json.dump(summary, f)
    loaded = load_summary(str(tmp_path))
    assert any("checksum" in issue for issue in loaded["_integrity_issues"])


def test_tampered_series_is_reported(tmp_path):
    record, manifest = _run("nonlinearity", tmp_path)
    write_run(record, manifest, str(tmp_path), 11)
    name = [n for n in os.listdir(tmp_path) if n.startswith("series_")][0]
    with open(tmp_path / name, "a") as f:
        f.write("extra,row,here\n")
    loaded = load_summary(str(tmp_path))
    assert any("does not match its hash" in issue for issue in loaded["_integrity_issues"])


def test_unknown_schema_version_refused(tmp_path):
    record, manifest = _run("nonlinearity", tmp_path)
    write_run(record, manifest, str(tmp_path), 11)
    path = tmp_path / "summary.json"
    with open(path) as f:
        summary = json.load(f)
    summary["schema_version"] = "99"
    with open(path, "w") as f:
        json.dump(summary, f)
    with pytest.raises(ValueError):
        load_summary(str(tmp_path))


# === claim matrix ===


def test_claim_matrix_covers_all_claims(tmp_path):
    record, manifest = _run("nonlinearity", tmp_path)
    write_run(record, manifest, str(tmp_path), 11)
    rows = verify_claims([load_summary(str(tmp_path))])
    assert len(rows) == 8
    ran = [r for r in rows if r.status != "not_run"]
    assert {r.source_kind for r in ran} == {"nonlinearity"}
    assert all(r.status == "pass" for r in ran)
    assert len([r for r in rows if r.status == "not_run"]) == 7
    empty = verify_claims([])
    assert empty and all(r.status == "not_run" for r in empty)


def test_claim_matrix_flags_tampering(tmp_path):
    record, manifest = _run("nonlinearity", tmp_path)
    write_run(record, manifest, str(tmp_path), 11)
    path = tmp_path / "summary.json"
    with open(path) as f:
        summary = json.load(f)
    summary["metrics"]["suppression_ratio"] = 1e-12
    with open(path, "w") as f:
        json.dump(summary, f)
    rows = verify_claims([load_summary(str(tmp_path))])
    row = [r for r in rows if r.source_kind == "nonlinearity" and r.status != "not run"]
    assert row and row[0].status == "fail"
    assert "checksum" in row[0].detail or "integrity" in row[0].detail
