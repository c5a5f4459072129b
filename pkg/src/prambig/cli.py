"""Command-line front end.

Exit codes: 0 all checks pass, 1 a verification check failed, 2 usage or
schema error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, liftnd, retrieval_bench, scene
from .certificate import certify_pair, certify_scene
from .errors import PrambigError
from .grid_fft import FREQUENCY, GridSpec, SampledField, write_field
from .schemas import COMPONENTS_FILE, PAIR_SPEC, SCENE_FILE, SchemaError, load_json, validate

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _dump(obj, path):
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=1, allow_nan=False) + "\n")


def _override_grid(grid: GridSpec, m: int | None) -> GridSpec:
    return grid if m is None else GridSpec(grid.dim, grid.box_half_width, m)


def cmd_generate(args) -> int:
    if args.factors < 1:
        raise UsageError("--factors must be >= 1")
    if args.dim < 1:
        raise UsageError("--dim must be >= 1")
    if args.atoms < 2:
        raise UsageError("--atoms (polynomial degree m) must be >= 2")
    spec = liftnd.random_pair_spec(args.dim, args.factors, args.atoms, args.seed, smoothing_order=args.smooth,
                                   samples_per_axis=args.grid, dx=args.dx)
    _dump(spec.to_json(), args.out)
    return EXIT_OK


def _load_spec_file(path):
    raw = load_json(path, {"type": "object"})
    if "scene" in raw or "components" in raw:
        validate(raw, SCENE_FILE, str(path))
        return "scene", raw
    validate(raw, PAIR_SPEC, str(path))
    return "pair", raw


def _scene_from(raw, m=None):
    pair = liftnd.PairSpec.from_json(raw["pair"])
    scene_obj = dict(raw["scene"])
    if m is not None:
        scene_obj["grid"] = dict(scene_obj["grid"], samples_per_axis=m)
    try:
        sc = scene.SceneSpec.from_json(scene_obj)
    except scene.SceneSpecError as exc:
        raise SchemaError(f"scene rejected: {exc}") from None
    return pair, sc, {"pair": raw["pair"], "scene": scene_obj}


def cmd_verify(args) -> int:
    kind, raw = _load_spec_file(args.spec)
    if kind == "pair":
        spec = liftnd.PairSpec.from_json(raw)
        spec = spec.with_grid(_override_grid(spec.grid, args.grid))
        cert = certify_pair(spec, spec.to_json())
    else:
        pair, sc, obj = _scene_from(raw, args.grid)
        cert = certify_scene(pair, sc, obj)
    text = cert.dumps()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if not cert.overall_pass:
        print("verification failed: " + ", ".join(cert.failed()), file=sys.stderr)
    return EXIT_OK if cert.overall_pass else EXIT_FAIL


def _components_from(args, pair: liftnd.PairSpec):
    if args.components:
        obj = load_json(args.components, COMPONENTS_FILE)
        comps = tuple(scene.Component.from_json(c) for c in obj["components"])
        delta = float(obj.get("kernel_radius", pair.declared_radius))
        grid = GridSpec.from_json(obj["grid"]) if "grid" in obj else scene.scene_grid_for(pair, comps, delta)
        return scene.SceneSpec(pair.dim, comps, float(obj["separation"]), delta, grid)
    return scene.random_scene(pair, args.random_components, args.seed)


def cmd_scene(args) -> int:
    if not args.components and not args.random_components:
        raise UsageError("give --components FILE or --random-components N")
    pair_obj = load_json(args.pair, PAIR_SPEC)
    pair = liftnd.PairSpec.from_json(pair_obj)
    try:
        sc = _components_from(args, pair)
    except scene.SceneSpecError as exc:
        raise SchemaError(f"scene rejected: {exc}") from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    scene_obj = {"pair": pair.to_json(), "scene": sc.to_json()}
    _dump(scene_obj, out / "scene.json")
    sp = scene.build_scene_pair(pair, sc, validate=False)
    write_field(out / "v.bin", sp.v)
    write_field(out / "v_f.bin", sp.v_f)
    write_field(out / "v_g.bin", sp.v_g)
    problem = retrieval_bench.make_problem(sp.v_f, sc, sp.margin)
    write_field(out / "v_f_hat_modulus.bin", SampledField(sc.grid, problem.modulus_data, FREQUENCY))
    g_mod = np.abs((2 * np.pi) ** sc.dim * sp.pair.g_hat.values * _hat(sp.v))
    write_field(out / "v_g_hat_modulus.bin", SampledField(sc.grid, g_mod, FREQUENCY))
    problem.save(out / "problem.npz")
    cert = certify_scene(pair, sc, scene_obj, sp)
    (out / "certificate.json").write_text(cert.dumps())
    _dump({"scene": "scene.json", "v": "v.bin", "v_f": "v_f.bin", "v_g": "v_g.bin",
           "v_f_hat_modulus": "v_f_hat_modulus.bin", "v_g_hat_modulus": "v_g_hat_modulus.bin",
           "problem": "problem.npz", "certificate": "certificate.json",
           "declared_radius": pair.declared_radius, "margin": sp.margin}, out / "manifest.json")
    return EXIT_OK if cert.overall_pass else EXIT_FAIL


def _hat(v):
    from .grid_fft import forward_transform
    return forward_transform(v).values


def cmd_bench(args) -> int:
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    d = Path(args.problem)
    raw = load_json(d / "scene.json", SCENE_FILE)
    pair, sc, _ = _scene_from(raw)
    sp = scene.build_scene_pair(pair, sc, validate=False)
    problem = retrieval_bench.RetrievalProblem.load(d / "problem.npz")
    seeds = [args.seed + k for k in range(args.runs)]
    report = retrieval_bench.bench(problem, seeds, args.algo, reference_f=sp.v_f, reference_g=sp.v_g,
                                   max_iters=args.iters, beta=args.beta)
    report["summary"].update(residual_v_f=retrieval_bench.residual(sp.v_f, problem),
                             residual_v_g=retrieval_bench.residual(sp.v_g, problem),
                             base_seed=args.seed, max_iters=args.iters, beta=args.beta)
    out = Path(args.out) if args.out else d / "report.json"
    retrieval_bench.write_report(report, out, out.with_suffix(".csv"))
    return EXIT_OK


def cmd_export(args) -> int:
    spec = liftnd.PairSpec.from_json(load_json(args.spec, PAIR_SPEC))
    spec = spec.with_grid(_override_grid(spec.grid, args.grid))
    pair = liftnd.build(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    names = {"f": "f.bin", "g": "g.bin", "f_hat": "f_hat.bin", "g_hat": "g_hat.bin"}
    for key, name in names.items():
        write_field(out / name, getattr(pair, key))
    _dump({**names, "declared_radius": pair.declared_radius, "grid": spec.grid.to_json()}, out / "manifest.json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prambig", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded pair spec")
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--factors", type=int, required=True, help="number N of 1D factors")
    g.add_argument("--atoms", type=int, default=3, help="polynomial degree m of each factor (m + 1 atoms)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--smooth", type=int, default=0, help="B-spline smoothing order q")
    g.add_argument("--grid", type=int, default=None, help="minimum samples per axis, doubled until the box holds the support (default 256, or 64 for d >= 3)")
    g.add_argument("--dx", type=float, default=1.0 / 16, help="grid step")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="certify a pair or scene spec")
    v.add_argument("spec")
    v.add_argument("--grid", type=int, default=None, help="override samples per axis")
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scene", help="build and certify a scene pair")
    s.add_argument("--pair", required=True)
    s.add_argument("--components", default=None)
    s.add_argument("--random-components", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_scene)

    b = sub.add_parser("bench", help="run seeded ER/HIO retrievals on a scene directory")
    b.add_argument("--problem", required=True, help="directory written by `scene`")
    b.add_argument("--algo", type=str.upper, choices=["ER", "HIO"], default="HIO")
    b.add_argument("--runs", type=int, default=20)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--iters", type=int, default=2000)
    b.add_argument("--beta", type=float, default=0.9)
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_bench)

    e = sub.add_parser("export", help="write f, g and their transforms in binary field format")
    e.add_argument("spec")
    e.add_argument("--grid", type=int, default=None)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"prambig: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SchemaError, PrambigError, OSError) as exc:
        print(f"prambig: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
