"""Produce the long training runs the acceptance suite reads.

Trains and evaluates cases 1 and 2 (16 nodes) for seeds 0-2 at the desk
profile, 2000 episodes each, and records wall-clock and CPU time per run. Runs that
already have eval/metrics.json are skipped, so the script can be resumed.

    python scripts/acceptance_runs.py [OUT_DIR]
"""
import json
import logging
import sys
import time
from pathlib import Path

from wsnrl.harness import desk_hyper, run_case

EPISODES = 2000
SEEDS = (0, 1, 2)


def main(out_root="acceptance_runs"):
    out = Path(out_root)
    out.mkdir(parents=True, exist_ok=True)
    timing_path = out / "timings.json"
    timings = json.loads(timing_path.read_text()) if timing_path.exists() else {}
    hyper = desk_hyper()
    for seed in SEEDS:
        for case in (1, 2):
            name = f"case{case}_seed{seed}"
            if (out / name / "eval" / "metrics.json").exists():
                continue
            t0, c0 = time.time(), time.process_time()
            run_case(case, EPISODES, [seed], out, hyper=hyper)
            # CPU time is the fair cost measure when other jobs share the core
            timings[name] = {"wall_s": time.time() - t0, "cpu_s": time.process_time() - c0}
            timing_path.write_text(json.dumps(timings, indent=2, sort_keys=True) + "\n")
            logging.info("%s done: %s", name, timings[name])


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s %(message)s")
    main(*sys.argv[1:])
