"""Seeded ER/HIO retrieval runs on a scene fixture, written as JSON and CSV reports.

Usage: python3 scripts/hio_bench.py [--fixture scene_compact.json] [--runs 20] [--iters 2000] [--out report.json]
"""
import argparse
import json
from pathlib import Path

from prambig import liftnd, scene
from prambig import retrieval_bench as rb

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixture", default="scene_compact.json")
    ap.add_argument("--algo", type=str.upper, choices=[rb.ER, rb.HIO], default=rb.HIO)
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--iters", type=int, default=2000)
    ap.add_argument("--beta", type=float, default=0.9)
    ap.add_argument("--out", default="report.json")
    args = ap.parse_args(argv)

    raw = json.loads((FIXTURES / args.fixture).read_text())
    sp = scene.build_scene_pair(liftnd.PairSpec.from_json(raw["pair"]), scene.SceneSpec.from_json(raw["scene"]))
    prob = rb.make_problem(sp.v_f, sp.spec, sp.margin)
    print(f"residual(v_f) = {rb.residual(sp.v_f, prob):.2e}, residual(v_g) = {rb.residual(sp.v_g, prob):.2e}")
    seeds = range(args.seed, args.seed + args.runs)
    report = rb.bench(prob, seeds, args.algo, sp.v_f, sp.v_g, max_iters=args.iters, beta=args.beta)
    out = Path(args.out)
    rb.write_report(report, out, out.with_suffix(".csv"))
    for k, v in report["summary"].items():
        print(f"{k:>16}: {v}")


if __name__ == "__main__":
    main()
