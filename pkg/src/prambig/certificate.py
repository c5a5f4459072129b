"""Machine-readable certificates for pair and scene constructions."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__, assoc, liftnd, scene
from .errors import PrambigError
from .spectrum1d import circle_modulus_gap, roots_of, validate_selection


def canonical_json(obj) -> str:
    """Sorted keys, no whitespace, shortest round-trip floats."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def spec_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def _num(x):
    if x is None:
        return None
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    if isinstance(x, str):
        return x
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass
class Certificate:
    kind: str
    spec_hash: str
    grid: dict
    checks: list = field(default_factory=list)
    not_applicable: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def add(self, name, measured, tolerance, passed):
        self.checks.append({"name": name, "measured_value": _num(measured),
                            "tolerance": _num(tolerance), "pass": bool(passed)})

    def skip(self, name, reason):
        self.not_applicable.append({"name": name, "reason": reason})

    @property
    def overall_pass(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def failed(self) -> list:
        return [c["name"] for c in self.checks if not c["pass"]]

    def to_json(self) -> dict:
        return {"kind": self.kind, "spec_hash": self.spec_hash, "tool_version": __version__,
                "grid": self.grid, "checks": self.checks, "not_applicable": self.not_applicable,
                "overall_pass": self.overall_pass, **self.extras}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1, allow_nan=False) + "\n"


def _factor_checks(cert: Certificate, spec: liftnd.PairSpec, prefix: str):
    for j, fa in enumerate(spec.factors):
        try:
            viol = validate_selection(roots_of(fa.f), fa.selection)
        except PrambigError as exc:
            viol = [str(exc)]
        cert.add(f"{prefix}factor[{j}].selection_admissible", viol or "ok", None, not viol)
        gap = circle_modulus_gap(fa.f.coeffs, fa.g.coeffs)
        cert.add(f"{prefix}factor[{j}].modulus_1d", gap, 1e-10, gap <= 1e-10)
    pg = liftnd.parallel_gap(spec)
    cert.add(f"{prefix}directions_not_parallel", pg, liftnd.PARALLEL_TOL, pg > liftnd.PARALLEL_TOL)


def _verdict_check(cert: Certificate, name: str, verdict: assoc.AssocVerdict):
    worst = max(verdict.peak_ratio_translate, verdict.peak_ratio_flip)
    cert.add(name, worst, verdict.threshold_used, verdict.kind == assoc.NOT_ASSOCIATED)


def _pair_checks(cert: Certificate, pair: liftnd.SampledFieldPair, prefix: str, l2: bool = True):
    sup = liftnd.verify_support(pair)
    cert.add(f"{prefix}support.outside_energy", sup.radius_energy_fraction, sup.tolerance, sup.passed)
    mod = liftnd.verify_modulus(pair)
    cert.add(f"{prefix}modulus.max_rel_deviation", mod.max_rel_dev, mod.tolerance, mod.max_rel_dev <= mod.tolerance)
    cert.add(f"{prefix}modulus.nonzero_peak", mod.peak, 0.0, mod.peak > 0)
    verdict = liftnd.verify_distinct_and_nonassociated(pair)
    _verdict_check(cert, f"{prefix}association.not_associated", verdict)
    cert.extras[f"{prefix}association"] = verdict.to_json()
    if l2:
        res = liftnd.verify_square_integrable(pair)
        name = f"{prefix}l2.refinement_and_decay"
        if res.status in ("not-applicable", "precondition-unmet"):
            cert.skip(name, f"{res.status}: {res.detail}")
        else:
            cert.add(name, [res.tail_decay_exponent, res.norm_change], [-pair.spec.dim / 2 - 0.1, 0.05], res.passed)


def certify_pair(spec: liftnd.PairSpec, spec_obj: dict) -> Certificate:
    cert = Certificate("pair", spec_hash(spec_obj), spec.grid.to_json())
    cert.extras["declared_radius"] = spec.declared_radius
    _factor_checks(cert, spec, "")
    need = 2 * spec.declared_radius
    cert.add("box_holds_ball", spec.grid.box_half_width, need, spec.grid.box_half_width >= need)
    _pair_checks(cert, liftnd.build(spec, validate=False), "")
    return cert


def certify_scene(pair_spec: liftnd.PairSpec, scene_spec: scene.SceneSpec, spec_obj: dict,
                  sp: scene.ScenePair | None = None) -> Certificate:
    cert = Certificate("scene", spec_hash(spec_obj), scene_spec.grid.to_json())
    _factor_checks(cert, pair_spec, "pair.")
    cert.add("scene.separation_exceeds_twice_kernel_radius", scene_spec.separation, 2 * scene_spec.kernel_radius,
             scene_spec.separation > 2 * scene_spec.kernel_radius)
    if sp is None:
        sp = scene.build_scene_pair(pair_spec, scene_spec, validate=False)
    _pair_checks(cert, sp.pair, "pair.", l2=False)

    comp = scene.verify_components(sp)
    cert.add("scene.localization_outside_energy", comp.outside_fraction, comp.tolerance,
             comp.outside_fraction <= comp.tolerance)
    cert.add("scene.min_component_gap", comp.min_gap, comp.required_gap, comp.min_gap >= comp.required_gap)
    mod = scene.verify_scene_modulus(sp.v_f, sp.v_g)
    cert.add("scene.modulus_max_rel_deviation", mod.max_rel_dev, mod.tolerance, mod.max_rel_dev <= mod.tolerance)
    cert.add("scene.modulus_nonzero_peak", mod.peak, 0.0, mod.peak > 0)
    verdict = scene.verify_scene_nonassociated(sp.v_f, sp.v_g)
    _verdict_check(cert, "scene.not_associated", verdict)
    cert.extras["association"] = verdict.to_json()

    a, _ = scene.convolve_pair_direct(sp.pair, sp.v)
    rel = float(np.abs(a.values - sp.v_f.values).max() / np.abs(sp.v_f.values).max())
    cert.add("convolution.two_path_agreement", rel, 1e-10, rel <= 1e-10)
    if all(c.profile == scene.DELTA for c in scene_spec.components):
        s = scene.shift_and_add(sp.pair.f, scene_spec)
        rel = float(np.abs(s.values - sp.v_f.values).max() / np.abs(sp.v_f.values).max())
        cert.add("convolution.shift_and_add_agreement", rel, 1e-10, rel <= 1e-10)
    else:
        cert.skip("convolution.shift_and_add_agreement", "scene has non-delta components")
    return cert
