"""Time the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_backends.py [--repeat N] [--json]

Each workload runs once per backend with identical inputs; outputs are
compared so a speedup never comes from doing different work.
"""
import argparse
import json
import time

from kpump import kernels
from kpump.congen import congen
from kpump.graphgen import build_pebble_graph, sample_pumped
from kpump.roadmap import PlannerParams, plan
from kpump.scenario import load_bundled, save_plan, stream


def workloads():
    sc = load_bundled("e_four_rooms")
    w = sc.workspace
    colors = sc.colors
    A = sample_pumped(colors, w, 40, stream(0, "bench", 0))
    B = sample_pumped(colors, w, 40, stream(0, "bench", 1))

    def sampling():
        return sample_pumped(colors, w, 60, stream(1, "bench")).per_color

    def edge_planner():
        return build_pebble_graph(A, w).motions

    def connections():
        return congen(A, B, 200, w, stream(2, "bench"))

    def full_plan():
        p, _ = plan(load_bundled("b_two_color_swap"), PlannerParams(g=20, q=30, mu=24, seed=0))
        return save_plan(p)

    return {"sample_pumped mu=60": sampling,
            "edge planner mu=40": edge_planner,
            "congen q=200": connections,
            "plan b_two_color_swap": full_plan}


def best_time(fn, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    rows = []
    for name, fn in workloads().items():
        row = {"workload": name}
        results = []
        for be in backends:
            with kernels.use_backend(be):
                row[be], res = best_time(fn, args.repeat)
            results.append(res)
        row["identical"] = all(r == results[0] for r in results)
        if "compiled" in row:
            row["speedup"] = row["python"] / row["compiled"]
        rows.append(row)
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    if "compiled" not in backends:
        print("compiled kernels not built; timing the Python fallback only")
    print(f"{'workload':<24}{'python s':>10}{'compiled s':>12}{'speedup':>9}  same output")
    for r in rows:
        comp = f"{r['compiled']:.3f}" if "compiled" in r else "-"
        speed = f"{r['speedup']:.1f}x" if "speedup" in r else "-"
        print(f"{r['workload']:<24}{r['python']:>10.3f}{comp:>12}{speed:>9}  {r['identical']}")


if __name__ == "__main__":
    main()
