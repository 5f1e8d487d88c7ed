import json

import numpy as np
import pytest

from relucell import modelio
from relucell.generators import random_mlp
from relucell.geometry import unit_box
from relucell.engine import layerwise_serial
from relucell.reporting import (canonical_report_json,
                                canonical_signvectors_text, layer_prefix_counts,
                                read_report)
from relucell.network import NetworkSignVector


def test_weights_json_round_trip(tmp_path):
    mlp = random_mlp([3, 4, 2, 2], seed=101)
    path = tmp_path / "m.json"
    modelio.save_weights(mlp, str(path))
    loaded = modelio.load_weights(str(path))
    for a, b in zip(mlp.weights, loaded.weights):
        assert np.array_equal(a, b)
    for a, b in zip(mlp.biases, loaded.biases):
        assert np.array_equal(a, b)


def test_weights_npz_round_trip_same_hash(tmp_path):
    mlp = random_mlp([4, 5, 3, 2], seed=103)
    json_path = tmp_path / "m.json"
    npz_path = tmp_path / "m.npz"
    modelio.save_weights(mlp, str(json_path))
    modelio.save_weights(mlp, str(npz_path))
    from_json = modelio.load_weights(str(json_path))
    from_npz = modelio.load_weights(str(npz_path))
    assert modelio.model_hash(from_npz) == modelio.model_hash(mlp)
    # JSON text round-trips float64 exactly via repr
    assert modelio.model_hash(from_json) == modelio.model_hash(mlp)


def test_declared_width_mismatch_rejected(tmp_path):
    mlp = random_mlp([3, 4, 2, 2], seed=105)
    path = tmp_path / "m.json"
    modelio.save_weights(mlp, str(path))
    doc = json.load(open(path))
    doc["widths"][1] = 7
    json.dump(doc, open(path, "w"))
    with pytest.raises(ValueError, match="declared widths"):
        modelio.load_weights(str(path))


def test_transposed_matrix_rejected(tmp_path):
    mlp = random_mlp([3, 4, 2, 2], seed=107)
    path = tmp_path / "m.json"
    modelio.save_weights(mlp, str(path))
    doc = json.load(open(path))
    doc["layers"][0]["weights"] = np.array(doc["layers"][0]["weights"]).T.tolist()
    json.dump(doc, open(path, "w"))
    with pytest.raises(ValueError):
        modelio.load_weights(str(path))


def test_missing_file_and_bad_format(tmp_path):
    with pytest.raises(ValueError, match="not found"):
        modelio.load_weights(str(tmp_path / "nope.json"))
    bad = tmp_path / "bad.json"
    bad.write_text('{"format": "something-else"}')
    with pytest.raises(ValueError, match="not a"):
        modelio.load_weights(str(bad))


def test_domain_round_trip(tmp_path):
    dom = unit_box(3)
    path = tmp_path / "d.json"
    modelio.save_domain(dom, str(path))
    loaded = modelio.load_domain(str(path))
    a, b = dom.matrices()
    c, d = loaded.matrices()
    assert np.array_equal(a, c) and np.array_equal(b, d)


def test_resolve_domain(tmp_path):
    mlp = random_mlp([2, 3, 2], seed=109)
    box = modelio.resolve_domain(None, 2)
    assert box.d == 2 and len(box) == 4
    path = tmp_path / "d.json"
    modelio.save_domain(unit_box(3), str(path))
    with pytest.raises(ValueError, match="dimension"):
        modelio.resolve_domain(str(path), 2)


def test_dataset_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.random((20, 4))
    y = rng.integers(0, 3, size=20)
    path = tmp_path / "data.npz"
    modelio.save_dataset(str(path), x, y)
    x2, y2 = modelio.load_dataset(str(path))
    assert np.array_equal(x, x2) and np.array_equal(y, y2)


def test_report_round_trip(tmp_path):
    mlp = random_mlp([3, 3, 3, 2], seed=111)
    run_dir = str(tmp_path / "run")
    report = layerwise_serial(mlp, unit_box(3), run_dir=run_dir)
    loaded = read_report(run_dir)
    assert [v.to_string() for v in loaded.sign_vectors] == \
        [v.to_string() for v in report.sign_vectors]
    assert loaded.layer_counts == report.layer_counts
    assert canonical_report_json(loaded) == canonical_report_json(report)
    assert canonical_signvectors_text(loaded) == canonical_signvectors_text(report)


def test_layer_prefix_counts():
    vectors = [NetworkSignVector.from_string(s)
               for s in ("+-|++", "+-|+-", "-+|++")]
    assert layer_prefix_counts(vectors) == [2, 3]
    assert layer_prefix_counts([]) == []


def test_task_record_prefix_validation():
    from relucell.reporting import TaskRecord
    from relucell.geometry import SignVector
    with pytest.raises(ValueError, match="does not extend"):
        TaskRecord(0, SignVector.from_string("+-"),
                   [NetworkSignVector.from_string("++|++")], 0.1, [1, 1], 3)
