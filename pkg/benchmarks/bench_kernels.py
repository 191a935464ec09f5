"""Throughput of the sampling kernels, compiled vs pure Python.

    python3 benchmarks/bench_kernels.py [--paths N]

Each mode runs in its own interpreter because the JIT switch is read at
import time.
"""

import argparse
import json
import os
import subprocess
import sys
import time

WORKLOADS = {
    # name: (family, goal label or None for mean payoff)
    "reach fig1:3": ("fig1:3", "goal"),
    "reach fig3:10": ("fig3:10", "goal"),
    "mp fig4:10,2": ("fig4:10,2", None),
}


def measure(paths):
    from smcchain import _jit
    from smcchain.chain import parse_family
    from smcchain.meanpayoff import mp_sampler
    from smcchain.reach import reach_sampler

    out = {"jit": _jit.JIT_ENABLED}
    for name, (family, goal) in WORKLOADS.items():
        chain = parse_family(family)
        if goal is None:
            task = mp_sampler(chain, None, 0.5, 0.08, 0.011, 0)
        else:
            task = reach_sampler(chain, goal, chain.declared_pmin, 0.01, 0)
        task(0)  # compile outside the timer
        steps, t0 = 0, time.perf_counter()
        for i in range(1, paths + 1):
            steps += task(i).path_length
        dt = time.perf_counter() - t0
        out[name] = {"paths": paths, "steps": steps, "seconds": dt}
    return out


def child(disable, paths):
    env = dict(os.environ, SMCCHAIN_DISABLE_JIT="1" if disable else "0")
    proc = subprocess.run([sys.executable, __file__, "--child", "--paths", str(paths)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--paths", type=int, default=20)
    ap.add_argument("--child", action="store_true")
    args = ap.parse_args()
    if args.child:
        print(json.dumps(measure(args.paths)))
        return
    fast = child(False, args.paths)
    slow = child(True, max(1, args.paths // 10))
    print(f"{'workload':<16}{'jit steps/s':>14}{'python steps/s':>16}{'speedup':>10}")
    for name in WORKLOADS:
        f = fast[name]["steps"] / fast[name]["seconds"]
        s = slow[name]["steps"] / slow[name]["seconds"]
        print(f"{name:<16}{f:>14.3g}{s:>16.3g}{f / s:>10.0f}x")


if __name__ == "__main__":
    main()
