"""Compare the compiled and pure-Python integration kernels.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json]

Both backends run the same compiled programs; the script also checks that
their trajectories agree bit for bit.
"""
import argparse
import json
import time

import numpy as np

from sfreg import _core_py
from sfreg.psvf import PSVF
from sfreg.regularize import SlowFastSystem, blowup_linear
from sfreg.simulate import STIFF_COUNT
from sfreg.simulate.program import ProgramBuilder
from sfreg.transition import TransitionConstraintSet, synthesize

try:
    from sfreg import _core
except ImportError:
    _core = None


def cases():
    cusp = blowup_linear(PSVF.from_strings(["-y^2", "1"], ["1", "1"]),
                         synthesize(TransitionConstraintSet(values=[(0, 1)], derivs=[(0, 0)])))
    return [
        ("canonical fold", SlowFastSystem.from_strings("-(y + x^2)", "-1"), (0.5, 0.0), 1e-3, 0.5),
        ("cusp blow-up", cusp, (-0.55, -0.5), 1e-3, 1.0),
    ]


def compile_case(sfs):
    b = ProgramBuilder()
    p1, p2 = b.compile(sfs.f), b.compile(sfs.g)
    return p1, p2, b.constants()


def run_integrate(mod, sfs, start, eps, t_end):
    p1, p2, consts = compile_case(sfs)
    return mod.integrate(p1.ops, p1.args, p2.ops, p2.args, consts, eps, 1.0 / eps, 1.0,
                         start[0], start[1], t_end, 1e-10, 1e-12, 0.0, 10_000_000,
                         0, 0.0, 0.0, 0.0, 0, 0.0, 0.0, 1e-3 * eps, STIFF_COUNT, 1)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def bench_eval(mod, sfs, n):
    p1, _, consts = compile_case(sfs)
    pts = np.random.default_rng(0).uniform(-1, 1, size=(n, 2))

    def go():
        for px, py in pts:
            mod.eval_program(p1.ops, p1.args, consts, px, py, 1e-3)
    return go


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--evals", type=int, default=20_000)
    ap.add_argument("--json", action="store_true", help="print results as JSON")
    args = ap.parse_args(argv)

    backends = [("python", _core_py)] + ([("cython", _core)] if _core is not None else [])
    rows = []
    for name, sfs, start, eps, t_end in cases():
        res = {}
        for label, mod in backends:
            t_int, traj = best_of(lambda: run_integrate(mod, sfs, start, eps, t_end), args.repeat)
            t_ev, _ = best_of(bench_eval(mod, sfs, args.evals), args.repeat)
            res[label] = {"integrate_s": t_int, "steps": traj[4], "eval_s": t_ev, "traj": traj}
        row = {"case": name, "evals": args.evals}
        for label in res:
            row[label] = {k: v for k, v in res[label].items() if k != "traj"}
        if "cython" in res:
            a, b = res["python"]["traj"], res["cython"]["traj"]
            row["identical"] = all(np.array_equal(np.asarray(u), np.asarray(v)) for u, v in zip(a[:3], b[:3]))
            row["speedup_integrate"] = res["python"]["integrate_s"] / res["cython"]["integrate_s"]
            row["speedup_eval"] = res["python"]["eval_s"] / res["cython"]["eval_s"]
        rows.append(row)

    if args.json:
        print(json.dumps(rows, indent=2))
        return
    for row in rows:
        print(f"{row['case']}:")
        for label, _ in backends:
            r = row[label]
            print(f"  {label:7s} integrate {r['integrate_s'] * 1e3:9.2f} ms ({r['steps']} steps)"
                  f"   eval x{row['evals']} {r['eval_s'] * 1e3:9.2f} ms")
        if "speedup_integrate" in row:
            print(f"  speedup integrate {row['speedup_integrate']:.1f}x, eval {row['speedup_eval']:.1f}x, "
                  f"identical trajectories: {row['identical']}")


if __name__ == "__main__":
    main()
