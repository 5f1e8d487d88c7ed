#!/usr/bin/env python3
"""The work pool: dynamic load balancing, crash recovery, resume.

Each of the 2^{n1} layer-1 sign vectors is one task; workers pull tasks as
they free up, because task times vary wildly between regions. Results land
in per-task files with an append-only manifest, so killed workers are
recovered and an aborted run resumes where it stopped -- always to the
byte-identical canonical report.
"""

import os
import tempfile
import time

from relucell import layerwise_serial, par_layerwise1, unit_box
from relucell.generators import concurrent_first_layer_mlp
from relucell.reporting import read_manifest

mlp = concurrent_first_layer_mlp(6, 6, seed=3, deep_widths=(6,))
box = unit_box(6)

with tempfile.TemporaryDirectory() as td:
    t0 = time.perf_counter()
    serial = layerwise_serial(mlp, box, run_dir=os.path.join(td, "serial"))
    print(f"serial: {serial.total_cells} cells in {time.perf_counter() - t0:.1f}s")

    t0 = time.perf_counter()
    par = par_layerwise1(mlp, box, workers=2, run_dir=os.path.join(td, "par"))
    print(f"2-worker pool: {par.total_cells} cells in {time.perf_counter() - t0:.1f}s "
          f"({len(par.tasks)} tasks)")

    same = (open(os.path.join(td, "serial", "signvectors.txt")).read()
            == open(os.path.join(td, "par", "signvectors.txt")).read())
    print(f"canonical outputs byte-identical: {same}")

    # Crash recovery: worker 0 dies after 5 tasks, the master requeues its
    # in-flight task and spawns a replacement.
    crash_dir = os.path.join(td, "crash")
    par_layerwise1(mlp, box, workers=2, run_dir=crash_dir,
                   _fault_after={0: 5}, visibility_timeout=5.0)
    same = (open(os.path.join(td, "serial", "signvectors.txt")).read()
            == open(os.path.join(crash_dir, "signvectors.txt")).read())
    print(f"after a worker crash, still byte-identical: {same}")

    # Resume: wipe half the task files, keep the manifest consistent, rerun.
    resume_dir = os.path.join(td, "crash")
    acked = sorted(read_manifest(resume_dir))
    for tid in acked[len(acked) // 2:]:
        os.remove(os.path.join(resume_dir, "tasks", f"task_{tid:06d}.json"))
    with open(os.path.join(resume_dir, "manifest.txt"), "w") as fh:
        fh.writelines(f"{t}\n" for t in acked[:len(acked) // 2])
    resumed = par_layerwise1(mlp, box, workers=2, run_dir=resume_dir, resume=True)
    same = (open(os.path.join(td, "serial", "signvectors.txt")).read()
            == open(os.path.join(resume_dir, "signvectors.txt")).read())
    print(f"resumed run ({len(acked) // 2} tasks reused): byte-identical: {same}")
