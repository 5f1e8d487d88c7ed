"""Run artifacts: task results, enumeration reports, and their files.

A run directory looks like

    run_dir/
      tasks/task_<id>.json   one file per completed task
      manifest.txt           acknowledged task ids, append-only (resume)
      signvectors.txt        canonical: one network sign vector per line,
                             layers joined by '|', lines sorted
      report.json            canonical: model/domain identity + counts
      run.json               non-canonical: mode, workers, timings, LP calls

The two canonical files are a pure function of (model, domain): identical
bytes for any mode, worker count, or scheduling. Everything that can vary
between runs (timings, worker count, task attribution) stays in run.json.
"""

import hashlib
import json
import os

import numpy as np

from .network import NetworkSignVector

REPORT_FORMAT = "relucell-report"
REPORT_VERSION = 1


class TaskRecord:
    """Everything one task produced: the completions of one layer-1 sign
    vector, with timing and per-layer counts."""

    __slots__ = ("task_id", "s1", "sign_vectors", "wall_time", "layer_counts",
                 "lp_calls")

    def __init__(self, task_id, s1, sign_vectors, wall_time, layer_counts, lp_calls):
        self.task_id = int(task_id)
        self.s1 = s1
        self.sign_vectors = sorted(sign_vectors)
        self.wall_time = float(wall_time)
        self.layer_counts = [int(c) for c in layer_counts]
        self.lp_calls = int(lp_calls)
        for v in self.sign_vectors:
            if len(v) and v[0] != s1:
                raise ValueError(f"task {task_id}: sign vector {v.to_string()} "
                                 f"does not extend prefix {s1.to_string()}")

    @property
    def n_found(self):
        return len(self.sign_vectors)

    def to_json_dict(self):
        return {
            "id": self.task_id,
            "s1": self.s1.to_string(),
            "sign_vectors": [v.to_string() for v in self.sign_vectors],
            "wall_time": self.wall_time,
            "layer_counts": self.layer_counts,
            "lp_calls": self.lp_calls,
        }

    @classmethod
    def from_json_dict(cls, data):
        from .geometry import SignVector
        return cls(
            task_id=data["id"],
            s1=SignVector.from_string(data["s1"]),
            sign_vectors=[NetworkSignVector.from_string(s) for s in data["sign_vectors"]],
            wall_time=data["wall_time"],
            layer_counts=data["layer_counts"],
            lp_calls=data["lp_calls"],
        )


class EnumerationReport:
    """Complete output of one enumeration: every network sign vector, the
    per-layer cell totals, per-task records, and a configuration echo."""

    __slots__ = ("sign_vectors", "layer_counts", "tasks", "config")

    def __init__(self, sign_vectors, tasks, config):
        self.sign_vectors = sorted(set(sign_vectors))
        self.tasks = sorted(tasks, key=lambda t: t.task_id)
        self.config = dict(config)
        self.layer_counts = layer_prefix_counts(self.sign_vectors)

    @property
    def total_cells(self):
        return len(self.sign_vectors)

    def task_times(self):
        return [t.wall_time for t in self.tasks]


def layer_prefix_counts(sign_vectors):
    """|C^l| for each layer: distinct prefixes of the full sign vectors."""
    if not sign_vectors:
        return []
    depth = len(sign_vectors[0])
    counts = []
    for l in range(1, depth + 1):
        counts.append(len({v.prefix(l) for v in sign_vectors}))
    return counts


def domain_fingerprint(domain):
    """Stable identity of a bounded domain: dimension, size, matrix hash."""
    normals, offsets = domain.matrices()
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(normals).tobytes())
    digest.update(np.ascontiguousarray(offsets).tobytes())
    return {
        "d": domain.d,
        "halfspace_count": len(domain),
        "hash": digest.hexdigest(),
    }


def _atomic_write(path, text):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def task_file_path(run_dir, task_id):
    return os.path.join(run_dir, "tasks", f"task_{task_id:06d}.json")


def write_task_file(run_dir, record):
    os.makedirs(os.path.join(run_dir, "tasks"), exist_ok=True)
    payload = json.dumps(record.to_json_dict(), sort_keys=True)
    _atomic_write(task_file_path(run_dir, record.task_id), payload + "\n")


def read_task_file(run_dir, task_id):
    with open(task_file_path(run_dir, task_id)) as fh:
        return TaskRecord.from_json_dict(json.load(fh))


def manifest_path(run_dir):
    return os.path.join(run_dir, "manifest.txt")


def append_manifest(run_dir, task_id):
    with open(manifest_path(run_dir), "a") as fh:
        fh.write(f"{task_id}\n")
        fh.flush()


def read_manifest(run_dir):
    """Acknowledged task ids; ids whose result file vanished are dropped."""
    path = manifest_path(run_dir)
    if not os.path.exists(path):
        return set()
    acked = set()
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                acked.add(int(line))
    return {t for t in acked if os.path.exists(task_file_path(run_dir, t))}


def canonical_report_json(report):
    body = {
        "format": REPORT_FORMAT,
        "version": REPORT_VERSION,
        "model_hash": report.config.get("model_hash"),
        "domain": report.config.get("domain"),
        "hidden_layers": report.config.get("hidden_layers"),
        "widths": report.config.get("widths"),
        "layer_counts": report.layer_counts,
        "total_cells": report.total_cells,
    }
    return json.dumps(body, sort_keys=True, separators=(",", ":")) + "\n"


def canonical_signvectors_text(report):
    return "".join(v.to_string() + "\n" for v in report.sign_vectors)


def write_run_outputs(run_dir, report):
    """Write canonical report files plus the non-canonical run metadata."""
    os.makedirs(run_dir, exist_ok=True)
    _atomic_write(os.path.join(run_dir, "report.json"), canonical_report_json(report))
    _atomic_write(os.path.join(run_dir, "signvectors.txt"),
                  canonical_signvectors_text(report))
    run_meta = {
        "config": report.config,
        "tasks": [t.to_json_dict() for t in report.tasks],
        "total_cells": report.total_cells,
        "layer_counts": report.layer_counts,
    }
    _atomic_write(os.path.join(run_dir, "run.json"),
                  json.dumps(run_meta, sort_keys=True, indent=1) + "\n")


def read_report(run_dir):
    """Rebuild an EnumerationReport from a completed run directory."""
    with open(os.path.join(run_dir, "run.json")) as fh:
        run_meta = json.load(fh)
    with open(os.path.join(run_dir, "signvectors.txt")) as fh:
        vectors = [NetworkSignVector.from_string(line.strip())
                   for line in fh if line.strip()]
    tasks = [TaskRecord.from_json_dict(d) for d in run_meta.get("tasks", [])]
    return EnumerationReport(vectors, tasks, run_meta["config"])
