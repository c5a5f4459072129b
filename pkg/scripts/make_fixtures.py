"""Regenerate the JSON fixtures under tests/fixtures.

Usage: python3 scripts/make_fixtures.py [--out tests/fixtures]
"""
import argparse
import json
from pathlib import Path

import numpy as np

from prambig import liftnd, scene
from prambig.grid_fft import GridSpec
from prambig.spectrum1d import PairConstraints, Sequence1D, flip, match_roots, random_pair, roots_of

DX = 1.0 / 16


def quadratic_factor(omega, epsilon=0.5, q=0):
    """The (2, 2, 1) profile with root -1+i flipped."""
    f = Sequence1D(epsilon, [2, 2, 1], smoothing_order=q)
    sel = match_roots(roots_of(f), [-1 + 1j])
    return liftnd.Factor(f, flip(f, sel), sel, liftnd.Direction.of(omega))


def axes_pair(q=0, m=256, dx=DX):
    factors = (quadratic_factor([1, 0], q=q), quadratic_factor([0, 1], q=q))
    return liftnd.PairSpec(2, factors, GridSpec(2, m * dx / 2, m))


def hex_pair(seed=3):
    rng = np.random.default_rng(seed)
    cons = PairConstraints(epsilon=0.5, smoothing_order=2)
    factors = []
    for angle in (0.0, 60.0, 120.0):
        f, g, sel = random_pair(3, rng.integers(2**63), cons)
        t = np.deg2rad(angle)
        factors.append(liftnd.Factor(f, g, sel, liftnd.Direction.of([np.cos(t), np.sin(t)])))
    r = sum(fa.f.effective_epsilon for fa in factors)
    return liftnd.PairSpec(2, tuple(factors), GridSpec(2, 2 * r, 256))


def delta_scene(pair):
    comps = [scene.Component([-1.5, 0.0], 1.0), scene.Component([1.5, 0.0], 0.5 - 0.75j),
             scene.Component([0.0, 2.0], -0.8j)]
    delta = pair.declared_radius
    return scene.SceneSpec(2, comps, 2.5, delta, scene.scene_grid_for(pair, comps, delta))


def mixed_scene(pair):
    comps = [scene.Component([-2.0, -1.0], 1.0 + 0.5j, scene.BALL_BUMP, 0.5, 2),
             scene.Component([1.5, 1.0], -1.0),
             scene.Component([2.0, -2.0], 0.7j, scene.BALL_BUMP, 0.3, 3)]
    delta = pair.declared_radius
    return scene.SceneSpec(2, comps, 2.5, delta, scene.scene_grid_for(pair, comps, delta))


def compact_scene(pair):
    """Two deltas on a coarse grid, small enough for full-length retrieval benches."""
    comps = [scene.Component([-1.25, 0.0], 1.0), scene.Component([1.25, 0.0], 0.6 + 0.6j)]
    delta = pair.declared_radius
    return scene.SceneSpec(2, comps, 2.5, delta, scene.scene_grid_for(pair, comps, delta))


def near_boundary_scene(pair):
    delta = pair.declared_radius
    sep = 2 * delta + 0.01
    x = 0.25 + sep / 2
    comps = [scene.Component([-x, 0.0], 1.0, scene.BALL_BUMP, 0.25, 2),
             scene.Component([x, 0.0], 1.0j, scene.BALL_BUMP, 0.25, 2)]
    return scene.SceneSpec(2, comps, sep, delta, scene.scene_grid_for(pair, comps, delta))


def dump(obj, path):
    path.write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")
    print("wrote", path)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests" / "fixtures"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    axes = axes_pair()
    dump(axes.to_json(), out / "pair_d2_axes.json")
    dump(axes_pair(q=2, m=128).to_json(), out / "pair_d2_axes_q2.json")
    dump(hex_pair().to_json(), out / "pair_d2_hex_q2.json")

    bad = axes.to_json()
    bad["factors"][0]["selection"]["selected"] = []
    dump(bad, out / "pair_empty_selection.json")

    for name, build in [("scene_delta", delta_scene), ("scene_mixed", mixed_scene),
                        ("scene_near_boundary", near_boundary_scene)]:
        dump({"pair": axes.to_json(), "scene": build(axes).to_json()}, out / f"{name}.json")

    coarse = axes_pair(m=32, dx=1.0 / 8)
    dump({"pair": coarse.to_json(), "scene": compact_scene(coarse).to_json()}, out / "scene_compact.json")

    bad_scene = {"pair": axes.to_json(), "scene": delta_scene(axes).to_json()}
    bad_scene["scene"]["separation"] = 2 * axes.declared_radius
    dump(bad_scene, out / "scene_r_equals_2delta.json")


if __name__ == "__main__":
    main()
