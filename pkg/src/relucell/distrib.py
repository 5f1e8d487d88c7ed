"""Distributed work pool: the same dispatch/ack contract over TCP.

Messages are one JSON object per line (UTF-8, '\n' terminated). Three
message types make up the whole protocol:

    master -> worker  {"type": "TASK", "id": <int>, "s1": "<+-..>",
                       "model_hash": "<hex>"}
    worker -> master  {"type": "RESULT-ACK", "id": <int>, "s1": "<+-..>",
                       "sign_vectors": ["s1|s2|..", ...],
                       "wall_time": <float>, "layer_counts": [..],
                       "lp_calls": <int>}
    master -> worker  {"type": "TERMINATE"}

A worker connects, receives a TASK, expands it locally, and replies with
the full result in-band; the master persists the per-task file (workers
need not share a filesystem), acknowledges it in the manifest, and sends
the next TASK. Workers idle silently when nothing is pending and exit on
TERMINATE. A dropped connection re-enqueues the worker's in-flight task,
as does a visibility timeout, and duplicate completions are idempotent,
mirroring the in-process pool.
"""

import json
import socket
import statistics
import threading
import time

from .engine import (VISIBILITY_FLOOR_SECONDS, VISIBILITY_MEDIAN_FACTOR,
                     Task, expand_task, task_sign_vector, _layer1)
from .geometry import SignVector
from .modelio import model_hash
from .network import NetworkSignVector
from .reporting import (EnumerationReport, TaskRecord, append_manifest,
                        domain_fingerprint, read_manifest, read_task_file,
                        write_run_outputs, write_task_file)

from collections import deque
import os


def _send_line(sock, payload):
    sock.sendall((json.dumps(payload, sort_keys=True) + "\n").encode())


class MasterServer:
    """Accepts workers, feeds them tasks, persists acknowledged results."""

    def __init__(self, mlp, domain, run_dir, host="127.0.0.1", port=0,
                 resume=False, visibility_timeout=None):
        self.mlp = mlp
        self.domain = domain
        self.run_dir = run_dir
        os.makedirs(run_dir, exist_ok=True)
        self.n1 = mlp.hidden_width(1)
        self.total = 1 << self.n1
        self.model_hash = model_hash(mlp)
        self.visibility_timeout = visibility_timeout

        self.lock = threading.Lock()
        self.acked = read_manifest(run_dir) if resume else set()
        self.pending = deque(t for t in range(self.total) if t not in self.acked)
        self.queued = set(self.pending)
        self.inflight = {}   # client key -> (task id, monotonic start)
        self.clients = {}    # client key -> socket
        self.idle = set()
        self.done_times = []
        self.all_done = threading.Event()
        if not self.pending and len(self.acked) == self.total:
            self.all_done.set()

        self.listener = socket.create_server((host, port))
        self.port = self.listener.getsockname()[1]
        self.host = self.listener.getsockname()[0]
        self._threads = []

    # -- pool state (lock held) ------------------------------------------

    def _dispatch(self, key):
        while self.pending:
            task_id = self.pending.popleft()
            self.queued.discard(task_id)
            if task_id in self.acked:
                continue
            self.inflight[key] = (task_id, time.monotonic())
            self.idle.discard(key)
            _send_line(self.clients[key], {
                "type": "TASK",
                "id": task_id,
                "s1": task_sign_vector(task_id, self.n1).to_string(),
                "model_hash": self.model_hash,
            })
            return
        self.idle.add(key)

    def _requeue(self, task_id):
        if task_id not in self.acked and task_id not in self.queued:
            self.pending.append(task_id)
            self.queued.add(task_id)

    def _ack(self, key, record):
        self.inflight.pop(key, None)
        if record.task_id not in self.acked:
            write_task_file(self.run_dir, record)
            append_manifest(self.run_dir, record.task_id)
            self.acked.add(record.task_id)
            self.done_times.append(record.wall_time)
            if len(self.acked) == self.total:
                self.all_done.set()

    def _visibility(self):
        if self.visibility_timeout is not None:
            return self.visibility_timeout
        if self.done_times:
            return max(VISIBILITY_FLOOR_SECONDS,
                       VISIBILITY_MEDIAN_FACTOR * statistics.median(self.done_times))
        return VISIBILITY_FLOOR_SECONDS

    # -- connection handling ---------------------------------------------

    def _handle(self, sock, key):
        reader = sock.makefile("r", encoding="utf-8")
        try:
            with self.lock:
                self.clients[key] = sock
                self._dispatch(key)
            for line in reader:
                line = line.strip()
                if not line:
                    continue
                msg = json.loads(line)
                if msg.get("type") != "RESULT-ACK":
                    continue
                record = TaskRecord(
                    task_id=msg["id"],
                    s1=SignVector.from_string(msg["s1"]),
                    sign_vectors=[NetworkSignVector.from_string(s)
                                  for s in msg["sign_vectors"]],
                    wall_time=msg["wall_time"],
                    layer_counts=msg["layer_counts"],
                    lp_calls=msg["lp_calls"],
                )
                with self.lock:
                    self._ack(key, record)
                    if not self.all_done.is_set():
                        self._dispatch(key)
        except (ConnectionError, OSError, json.JSONDecodeError, ValueError):
            pass
        finally:
            with self.lock:
                self.clients.pop(key, None)
                self.idle.discard(key)
                owned = self.inflight.pop(key, None)
                if owned is not None:
                    self._requeue(owned[0])
                    for idle_key in list(self.idle):
                        self._dispatch(idle_key)
            try:
                sock.close()
            except OSError:
                pass

    def _accept_loop(self):
        while not self.all_done.is_set():
            try:
                self.listener.settimeout(0.2)
                sock, addr = self.listener.accept()
            except socket.timeout:
                continue
            except OSError:
                return
            key = (addr, time.monotonic())
            t = threading.Thread(target=self._handle, args=(sock, key), daemon=True)
            t.start()
            self._threads.append(t)

    def _sweep_loop(self):
        while not self.all_done.is_set():
            time.sleep(0.2)
            with self.lock:
                now = time.monotonic()
                vis = self._visibility()
                for key in list(self.inflight):
                    task_id, started = self.inflight[key]
                    if now - started > vis:
                        self._requeue(task_id)
                        self.inflight[key] = (task_id, now)
                for idle_key in list(self.idle):
                    self._dispatch(idle_key)

    def serve(self):
        """Block until every task is acknowledged; returns the report."""
        t_start = time.perf_counter()
        acceptor = threading.Thread(target=self._accept_loop, daemon=True)
        sweeper = threading.Thread(target=self._sweep_loop, daemon=True)
        acceptor.start()
        sweeper.start()
        self.all_done.wait()
        with self.lock:
            for sock in self.clients.values():
                try:
                    _send_line(sock, {"type": "TERMINATE"})
                except OSError:
                    pass
        self.listener.close()
        acceptor.join(timeout=2.0)

        tasks = [read_task_file(self.run_dir, tid) for tid in range(self.total)]
        config = {
            "model_hash": self.model_hash,
            "widths": self.mlp.widths,
            "hidden_layers": self.mlp.hidden_layers,
            "domain": domain_fingerprint(self.domain),
            "mode": "master",
            "workers": None,
            "layer1": "exh",
            "wall_time": time.perf_counter() - t_start,
            "lp_calls": sum(t.lp_calls for t in tasks),
        }
        report = EnumerationReport([v for t in tasks for v in t.sign_vectors],
                                   tasks, config)
        write_run_outputs(self.run_dir, report)
        return report


def serve_master(mlp, domain, run_dir, host="127.0.0.1", port=0,
                 resume=False, visibility_timeout=None):
    server = MasterServer(mlp, domain, run_dir, host, port, resume,
                          visibility_timeout)
    return server.serve()


def run_worker(mlp, domain, host, port, max_tasks=None):
    """Connect to a master and process tasks until TERMINATE.

    Validates that the master is enumerating the same model. Returns the
    number of tasks completed. max_tasks, when given, stops the worker
    early (used to exercise crash recovery).
    """
    expected_hash = model_hash(mlp)
    layer1_cache = _layer1(mlp)
    completed = 0
    with socket.create_connection((host, port)) as sock:
        reader = sock.makefile("r", encoding="utf-8")
        for line in reader:
            line = line.strip()
            if not line:
                continue
            msg = json.loads(line)
            if msg.get("type") == "TERMINATE":
                break
            if msg.get("type") != "TASK":
                continue
            if msg.get("model_hash") != expected_hash:
                raise ValueError("master is enumerating a different model "
                                 f"(hash {msg.get('model_hash')!r} != local {expected_hash!r})")
            task = Task(msg["id"], SignVector.from_string(msg["s1"]))
            record = expand_task(mlp, domain, task, _layer1_cache=layer1_cache)
            _send_line(sock, {
                "type": "RESULT-ACK",
                "id": record.task_id,
                "s1": record.s1.to_string(),
                "sign_vectors": [v.to_string() for v in record.sign_vectors],
                "wall_time": record.wall_time,
                "layer_counts": record.layer_counts,
                "lp_calls": record.lp_calls,
            })
            completed += 1
            if max_tasks is not None and completed >= max_tasks:
                break
    return completed
