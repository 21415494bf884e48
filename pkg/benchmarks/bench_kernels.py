#!/usr/bin/env python3
"""Timing comparison of the compiled and pure-Python kernel backends.

Each hot kernel runs on identical inputs through every available backend;
the end-to-end row times an exhaustive completeness sweep through the
public API with the backend pinned on the Field. Reported numbers are
medians over --repeat trials after one warmup call (the pure backend
builds multiplication tables lazily for small k).
"""

import argparse
import random
import statistics
import time

from qipsim._kernels import backends, purepy
from qipsim.gf2k import Field
from qipsim.qbf import compile_matrix, parse_qbf
from qipsim.sumcheck import build_schedule, honest_always_accepts


def timed(fn, repeat: int) -> float:
    fn()
    trials = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        trials.append(time.perf_counter() - t0)
    return statistics.median(trials)


def kernel_suite(ops, k: int, batch: int, formula: str):
    rng = random.Random(99)
    field = Field(k)
    g = field.g
    pairs = [(rng.getrandbits(k), rng.getrandbits(k)) for _ in range(batch)]
    nonzero = [a or 1 for a, _ in pairs]
    coeffs = tuple(rng.getrandbits(k) for _ in range(4))
    zs = [rng.getrandbits(k) for _ in range(max(1, batch // 4))]
    xs = list(range(min(8, 1 << k)))
    ys = [purepy.gf_mul(x, x ^ 3, g, k) ^ 1 for x in xs]
    q = parse_qbf(formula)
    prog = compile_matrix(q.matrix)
    assigns = [
        [rng.getrandbits(k) for _ in range(q.n)] for _ in range(max(1, batch // 4))
    ]
    return {
        "gf_mul": lambda: [ops.gf_mul(a, b, g, k) for a, b in pairs],
        "gf_inv": lambda: [ops.gf_inv(a, g, k) for a in nonzero],
        "poly_eval": lambda: [ops.poly_eval(coeffs, z, g, k) for z in zs],
        "interpolate": lambda: [ops.interpolate(xs, ys, g, k) for _ in range(64)],
        "eval_formula": lambda: [ops.eval_formula(prog, a, g, k) for a in assigns],
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--k", type=int, nargs="+", default=[8, 32],
                    help="field widths for the kernel rows")
    ap.add_argument("--batch", type=int, default=10_000,
                    help="operations per timed call")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--formula", default="A x1 E x2 : (x1 | ~x2) & (~x1 | x2)")
    ap.add_argument("--sweep-k", type=int, default=3,
                    help="field width for the end-to-end sweep row")
    args = ap.parse_args()

    kits = backends()
    names = list(kits)
    print(f"backends: {', '.join(names)}")
    if "fast" not in kits:
        print("compiled extension not built; timing the pure backend only")

    for k in args.k:
        print(f"\nGF(2^{k}), batch={args.batch}")
        rows = {
            name: {
                kern: timed(fn, args.repeat)
                for kern, fn in kernel_suite(ops, k, args.batch, args.formula).items()
            }
            for name, ops in kits.items()
        }
        for kern in rows[names[0]]:
            line = f"  {kern:13s}"
            for name in names:
                line += f"  {name} {rows[name][kern] * 1e3:9.3f} ms"
            if "fast" in rows:
                line += f"  x{rows['pure'][kern] / rows['fast'][kern]:6.1f}"
            print(line)

    q = parse_qbf(args.formula)
    schedule = build_schedule(q)
    total = sum(
        (1 << args.sweep_k) ** j for j in range(1, schedule.n_rounds + 1)
    )
    print(f"\nexhaustive sweep of {args.formula!r} at k={args.sweep_k}"
          f" ({total} prefix nodes)")
    for name, ops in kits.items():
        field = Field(args.sweep_k, backend=ops)
        t = timed(lambda: honest_always_accepts(q, field, schedule), args.repeat)
        print(f"  honest_sweep   {name} {t * 1e3:9.3f} ms")


if __name__ == "__main__":
    main()
