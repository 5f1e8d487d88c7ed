"""Layerwise activation-region enumeration: serial framework and the
embarrassingly parallel work-pool algorithm.

The serial framework enumerates layer-1 cells over the bounded input
domain, then for each region prefix enumerates the cells its conditioned
layer-l arrangement cuts inside it, extending prefixes until the last
hidden layer.

The parallel algorithm fixes task granularity at one layer-1 sign vector:
the master enqueues all 2^{n1} candidates, workers dequeue, expand each
candidate through the deep layers, persist one result file per task, and
acknowledge. After all acknowledgements the master enqueues one terminate
sentinel per worker and merges the per-task files. Task times vary wildly
between regions, which is exactly why the pool balances dynamically
instead of statically splitting the id range.

Fault model: a crashed worker's in-flight task is re-enqueued (on death or
after a visibility timeout) and a replacement is spawned; task expansion
is a pure function of (model, domain, s1), so duplicate completions write
identical bytes and acknowledgements are idempotent. The manifest is
appended only after the task file hits disk, so an interrupted run can
resume from the manifest without recomputing finished tasks.
"""

import os
import statistics
import time
import warnings
import multiprocessing as mp
from collections import deque
from multiprocessing import connection as mp_connection
from tempfile import TemporaryDirectory

from .cellenum import bound_cell_enum, bound_inc_enum, signed_constraints_for
from .geometry import NEG, POS, SignVector
from .modelio import model_hash
from .network import (EMPTY_PREFIX, NetworkSignVector, arrangement_from_affine,
                      effective_affine, extend_affine)
from .reporting import (EnumerationReport, TaskRecord, append_manifest,
                        domain_fingerprint, read_manifest, read_task_file,
                        write_run_outputs, write_task_file)
from .witness import LPCounter, SignedConstraint, find_witness

TERMINATE_ID = -1

# A silent in-flight task is re-enqueued after max(floor, factor * median
# completed-task time).
VISIBILITY_FLOOR_SECONDS = 30.0
VISIBILITY_MEDIAN_FACTOR = 10.0

# A task that keeps failing delivery stops the run instead of crash-looping
# replacement workers.
MAX_TASK_REQUEUES = 5


class Task:
    """One unit of pool work: a candidate layer-1 sign vector."""

    __slots__ = ("id", "s1")

    def __init__(self, task_id, s1):
        self.id = int(task_id)
        self.s1 = s1
        if self.id < 0 and s1 is not None:
            raise ValueError("negative ids are reserved for the terminate sentinel")

    @classmethod
    def terminate(cls):
        return cls(TERMINATE_ID, None)

    @property
    def is_terminate(self):
        return self.id == TERMINATE_ID

    def __repr__(self):
        if self.is_terminate:
            return "Task(terminate)"
        return f"Task({self.id}, '{self.s1.to_string()}')"


def task_sign_vector(task_id, n1):
    """Layer-1 candidate for a task id, in binary-counting order: bit
    n1-1-j of the id gives hyperplane j's sign (0 -> -, 1 -> +)."""
    if not 0 <= task_id < (1 << n1):
        raise ValueError(f"task id {task_id} out of range for width {n1}")
    return SignVector([POS if (task_id >> (n1 - 1 - j)) & 1 else NEG
                       for j in range(n1)])


def task_id_of(s1):
    """Inverse of task_sign_vector."""
    tid = 0
    n = len(s1)
    for j, s in enumerate(s1):
        if s == POS:
            tid |= 1 << (n - 1 - j)
    return tid


def _layer1(mlp):
    eff1 = effective_affine(mlp, EMPTY_PREFIX, 1)
    return eff1, arrangement_from_affine(eff1)


def _layer1_constraints(arr1, s1):
    """Signed constraints for a layer-1 candidate, or None when the
    candidate contradicts a degenerate (constant-sign) neuron."""
    if len(s1) != len(arr1):
        raise ValueError(f"sign vector length {len(s1)} != layer width {len(arr1)}")
    constraints = []
    for i, h in enumerate(arr1):
        if h.degenerate:
            if h.constant_sign() != s1[i]:
                return None
        else:
            constraints.append(SignedConstraint(h, s1[i]))
    return constraints


def _complete_from_layer1(mlp, domain, s1, eff1, witness, constraints, counter):
    """All full network sign vectors extending a feasible layer-1 cell.

    Walks layers 2..L, enumerating each prefix's conditioned arrangement
    inside that prefix's region (its accumulated strict constraints plus
    the domain), seeding each enumeration with the prefix's own witness.
    Returns (vectors, per-layer prefix counts).
    """
    records = [(NetworkSignVector((s1,)), eff1, witness, constraints)]
    counts = [1]
    for l in range(2, mlp.hidden_layers + 1):
        extended = []
        for prefix, eff_prev, w, cons in records:
            eff_l = extend_affine(mlp, eff_prev, prefix[l - 2], l)
            arr_l = arrangement_from_affine(eff_l)
            cells = bound_inc_enum(arr_l, domain, base_constraints=cons,
                                   initial_witness=w, counter=counter)
            for s_l in sorted(cells.sign_vectors, key=lambda s: s.to_string()):
                extended.append((prefix.append_layer(s_l), eff_l,
                                 cells.witnesses[s_l],
                                 cons + signed_constraints_for(arr_l, s_l)))
        records = extended
        counts.append(len(records))
    return [rec[0] for rec in records], counts


def expand_task(mlp, domain, task, counter=None, _layer1_cache=None):
    """Expand one layer-1 candidate into all of its network sign vectors.

    An infeasible candidate (no strict witness of its cell within the
    domain, or a sign contradicting a constant neuron) yields an empty
    result. Timing covers the whole expansion including the feasibility
    check.
    """
    t0 = time.perf_counter()
    counter = counter if counter is not None else LPCounter()
    lp0 = counter.calls
    eff1, arr1 = _layer1_cache if _layer1_cache is not None else _layer1(mlp)
    L = mlp.hidden_layers

    constraints = _layer1_constraints(arr1, task.s1)
    if constraints is not None:
        res = find_witness(constraints, domain, counter=counter)
    else:
        res = None
    if res is None or not res.feasible:
        return TaskRecord(task.id, task.s1, [], time.perf_counter() - t0,
                          [0] * L, counter.calls - lp0)

    vectors, counts = _complete_from_layer1(mlp, domain, task.s1, eff1,
                                            res.point, constraints, counter)
    return TaskRecord(task.id, task.s1, vectors, time.perf_counter() - t0,
                      counts, counter.calls - lp0)


def _base_config(mlp, domain, mode, workers, layer1):
    return {
        "model_hash": model_hash(mlp),
        "widths": mlp.widths,
        "hidden_layers": mlp.hidden_layers,
        "domain": domain_fingerprint(domain),
        "mode": mode,
        "workers": workers,
        "layer1": layer1,
    }


def layerwise_serial(mlp, domain, layer1_subroutine="exh", run_dir=None,
                     resume=False):
    """Enumerate every activation region of the network within the domain.

    Layer-1 cells come from the chosen subroutine ('exh' or 'inc'); deeper
    layers always use the incremental subroutine, one enumeration per
    region prefix. When run_dir is given, per-task files and the manifest
    are written as expansions finish, so an aborted run resumes without
    redoing completed layer-1 cells.
    """
    if mlp.input_dim != domain.d:
        raise ValueError(f"model input dimension {mlp.input_dim} != domain dimension {domain.d}")
    t_start = time.perf_counter()
    counter = LPCounter()
    eff1, arr1 = _layer1(mlp)
    n1 = len(arr1)

    acked = read_manifest(run_dir) if (run_dir and resume) else set()

    cells1 = bound_cell_enum(arr1, domain, method=layer1_subroutine, counter=counter)
    tasks = []
    for s1 in sorted(cells1.sign_vectors, key=lambda s: s.to_string()):
        tid = task_id_of(s1)
        if tid in acked:
            tasks.append(read_task_file(run_dir, tid))
            continue
        t0 = time.perf_counter()
        lp0 = counter.calls
        constraints = signed_constraints_for(arr1, s1)
        vectors, counts = _complete_from_layer1(mlp, domain, s1, eff1,
                                                cells1.witnesses[s1],
                                                constraints, counter)
        record = TaskRecord(tid, s1, vectors, time.perf_counter() - t0,
                            counts, counter.calls - lp0)
        if run_dir:
            write_task_file(run_dir, record)
            append_manifest(run_dir, tid)
        tasks.append(record)

    config = _base_config(mlp, domain, "serial", 1, layer1_subroutine)
    config["wall_time"] = time.perf_counter() - t_start
    config["lp_calls"] = counter.calls
    report = EnumerationReport([v for t in tasks for v in t.sign_vectors],
                               tasks, config)
    if run_dir:
        write_run_outputs(run_dir, report)
    return report


def _pool_worker(conn, mlp, domain, run_dir, fault_after):
    """Worker loop: receive a task, expand it, persist, acknowledge.

    fault_after is a test hook: after completing that many tasks the
    worker dies on receipt of its next task without any cleanup,
    simulating a mid-task crash.
    """
    layer1_cache = _layer1(mlp)
    completed = 0
    while True:
        msg = conn.recv()
        if msg[0] == "terminate":
            conn.close()
            return
        _, task_id, s1_text = msg
        if fault_after is not None and completed >= fault_after:
            os._exit(1)
        task = Task(task_id, SignVector.from_string(s1_text))
        record = expand_task(mlp, domain, task, _layer1_cache=layer1_cache)
        write_task_file(run_dir, record)
        conn.send(("done", task_id, record.wall_time))
        completed += 1


class _WorkPool:
    """Master-side pool state: pending tasks, per-worker assignments, acks.

    Dispatch is master-driven: the master records the assignment before
    the task leaves, so a worker crash can never lose a task (the classic
    gap of a bare consumer-pull queue). Semantically each send is a
    dequeue by the receiving worker and each 'done' message is its
    acknowledgement.
    """

    def __init__(self, mlp, domain, run_dir, n1, acked, visibility_timeout):
        self.mlp = mlp
        self.domain = domain
        self.run_dir = run_dir
        self.n1 = n1
        self.total = 1 << n1
        self.acked = set(acked)
        self.pending = deque(tid for tid in range(self.total)
                             if tid not in self.acked)
        self.queued = set(self.pending)
        self.visibility_timeout = visibility_timeout
        self.ctx = mp.get_context("fork")
        self.workers = {}    # idx -> (Process, master Connection)
        self.inflight = {}   # idx -> (task id, monotonic start)
        self.done_times = []
        self.next_idx = 0
        self.faults = {}
        self.requeues = {}   # task id -> count, to catch poison tasks

    def spawn(self):
        idx = self.next_idx
        self.next_idx += 1
        master_conn, worker_conn = self.ctx.Pipe()
        proc = self.ctx.Process(
            target=_pool_worker,
            args=(worker_conn, self.mlp, self.domain, self.run_dir,
                  self.faults.pop(idx, None)),
            daemon=True)
        proc.start()
        worker_conn.close()
        self.workers[idx] = (proc, master_conn)
        self.dispatch(idx)

    def dispatch(self, idx):
        """Hand the next pending task to an idle worker, if any is left."""
        if idx in self.inflight or not self.pending:
            return
        task_id = self.pending.popleft()
        self.queued.discard(task_id)
        if task_id in self.acked:
            return self.dispatch(idx)
        self.inflight[idx] = (task_id, time.monotonic())
        _, conn = self.workers[idx]
        conn.send(("task", task_id, task_sign_vector(task_id, self.n1).to_string()))

    def requeue(self, task_id):
        if task_id in self.acked or task_id in self.queued:
            return
        count = self.requeues.get(task_id, 0) + 1
        if count > MAX_TASK_REQUEUES:
            raise RuntimeError(
                f"task {task_id} failed {count} deliveries; giving up rather "
                "than respawning workers forever (deterministic task failure?)")
        self.requeues[task_id] = count
        self.pending.append(task_id)
        self.queued.add(task_id)

    def ack(self, idx, task_id, wall):
        self.inflight.pop(idx, None)
        if task_id not in self.acked:
            self.acked.add(task_id)
            append_manifest(self.run_dir, task_id)
            self.done_times.append(wall)

    def visibility(self):
        if self.visibility_timeout is not None:
            return self.visibility_timeout
        if self.done_times:
            return max(VISIBILITY_FLOOR_SECONDS,
                       VISIBILITY_MEDIAN_FACTOR * statistics.median(self.done_times))
        return VISIBILITY_FLOOR_SECONDS

    def drop_worker(self, idx, replace=True):
        proc, conn = self.workers.pop(idx)
        owned = self.inflight.pop(idx, None)
        conn.close()
        if proc.is_alive():
            proc.terminate()
        proc.join()
        if owned is not None:
            self.requeue(owned[0])
        if replace and len(self.acked) < self.total:
            self.spawn()

    def sweep(self):
        """Liveness and visibility pass: reclaim tasks from dead workers,
        re-enqueue tasks that have been silent too long, keep idle workers
        fed (requeues can arrive after a worker went idle)."""
        now = time.monotonic()
        vis = self.visibility()
        for idx in list(self.workers):
            proc, _ = self.workers[idx]
            if not proc.is_alive():
                self.drop_worker(idx)
            elif idx in self.inflight and now - self.inflight[idx][1] > vis:
                task_id, _ = self.inflight[idx]
                self.requeue(task_id)  # duplicate completion is idempotent
                self.inflight[idx] = (task_id, now)
        for idx in list(self.workers):
            if idx not in self.inflight:
                self.dispatch(idx)

    def run(self):
        while len(self.acked) < self.total:
            conns = {conn: idx for idx, (_, conn) in self.workers.items()}
            ready = mp_connection.wait(list(conns), timeout=0.2)
            for conn in ready:
                idx = conns[conn]
                try:
                    msg = conn.recv()
                except (EOFError, OSError):
                    self.drop_worker(idx)
                    continue
                if msg[0] == "done":
                    self.ack(idx, msg[1], msg[2])
                    self.dispatch(idx)
            self.sweep()

    def shutdown(self):
        for idx, (proc, conn) in list(self.workers.items()):
            try:
                conn.send(("terminate",))
            except (BrokenPipeError, OSError):
                pass
        for proc, conn in self.workers.values():
            proc.join(timeout=10.0)
            if proc.is_alive():
                proc.terminate()
                proc.join()
            conn.close()


def par_layerwise1(mlp, domain, workers, run_dir=None, resume=False,
                   visibility_timeout=None, _fault_after=None):
    """Work-pool enumeration for problem setting 1 (n1 <= n0).

    The master enqueues all 2^{n1} layer-1 candidates in binary-counting
    order; workers repeatedly take one, expand it through the deep layers,
    persist the result file, and acknowledge. After the final
    acknowledgement each worker receives a terminate sentinel and the
    per-task files are merged. The union over tasks equals the serial
    output, so canonical artifacts are byte-identical for any worker
    count.
    """
    if mlp.input_dim != domain.d:
        raise ValueError(f"model input dimension {mlp.input_dim} != domain dimension {domain.d}")
    if workers < 1:
        raise ValueError("need at least one worker")
    n1 = mlp.hidden_width(1)
    if n1 > mlp.input_dim:
        warnings.warn(f"n1 = {n1} > n0 = {mlp.input_dim}: exhaustive layer-1 "
                      "task generation is intended for n1 <= n0", stacklevel=2)

    tmp = None
    if run_dir is None:
        tmp = TemporaryDirectory(prefix="relucell-run-")
        run_dir = tmp.name
    os.makedirs(run_dir, exist_ok=True)

    t_start = time.perf_counter()
    acked = read_manifest(run_dir) if resume else set()
    pool = _WorkPool(mlp, domain, run_dir, n1, acked, visibility_timeout)
    pool.faults = dict(_fault_after or {})
    try:
        for _ in range(workers):
            pool.spawn()
        pool.run()
    finally:
        pool.shutdown()

    tasks = [read_task_file(run_dir, tid) for tid in range(pool.total)]
    config = _base_config(mlp, domain, "parallel", workers, "exh")
    config["wall_time"] = time.perf_counter() - t_start
    config["lp_calls"] = sum(t.lp_calls for t in tasks)
    report = EnumerationReport([v for t in tasks for v in t.sign_vectors],
                               tasks, config)
    write_run_outputs(run_dir, report)
    if tmp is not None:
        tmp.cleanup()
    return report
