"""Disconnected scenes and their convolution pairs ``v_f = f * v``, ``v_g = g * v``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import assoc, liftnd
from .errors import SceneSpecError, SpecMismatchError
from .grid_fft import (
    SPATIAL,
    GridSpec,
    SampledField,
    convolve,
    forward_transform,
    inverse_transform,
    required_half_width,
)
from .spectrum1d import decode_complex, encode_complex

DELTA = "delta"
BALL_BUMP = "ball_bump"
DIST_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Component:
    center: np.ndarray
    weight: complex
    profile: str = DELTA
    radius: float = 0.0
    order: int = 2
    domain_radius: float | None = None

    def __post_init__(self):
        c = np.array(self.center, dtype=float).ravel()
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "weight", complex(self.weight))
        if self.weight == 0:
            raise SceneSpecError("component weight must be nonzero")
        if self.profile not in (DELTA, BALL_BUMP):
            raise SceneSpecError(f"unknown profile {self.profile!r}")
        if self.profile == BALL_BUMP and not self.radius > 0:
            raise SceneSpecError("ball_bump needs a positive radius")
        if self.domain_radius is None:
            object.__setattr__(self, "domain_radius", float(self.radius if self.profile == BALL_BUMP else 0.0))
        if self.domain_radius < (self.radius if self.profile == BALL_BUMP else 0.0):
            raise SceneSpecError("domain_radius must cover the profile")

    def to_json(self) -> dict:
        out = {"center": [float(x) for x in self.center], "weight": encode_complex(self.weight),
               "profile": self.profile, "domain_radius": float(self.domain_radius)}
        if self.profile == BALL_BUMP:
            out.update(radius=float(self.radius), order=int(self.order))
        return out

    @classmethod
    def from_json(cls, obj) -> "Component":
        return cls(obj["center"], decode_complex(obj["weight"]), obj.get("profile", DELTA),
                   float(obj.get("radius", 0.0)), int(obj.get("order", 2)),
                   None if obj.get("domain_radius") is None else float(obj["domain_radius"]))


@dataclass(frozen=True)
class SceneSpec:
    dim: int
    components: tuple
    separation: float
    kernel_radius: float
    grid: GridSpec

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        problems = scene_problems(self)
        if problems:
            raise SceneSpecError("; ".join(problems))

    @property
    def extent(self) -> float:
        """Radius of a centered ball holding every inflated domain ``N_delta(D_k)``."""
        return max(float(np.linalg.norm(c.center)) + c.domain_radius for c in self.components) + self.kernel_radius

    def to_json(self) -> dict:
        return {"dim": self.dim, "components": [c.to_json() for c in self.components],
                "separation": float(self.separation), "kernel_radius": float(self.kernel_radius),
                "grid": self.grid.to_json()}

    @classmethod
    def from_json(cls, obj) -> "SceneSpec":
        return cls(int(obj["dim"]), tuple(Component.from_json(c) for c in obj["components"]),
                   float(obj["separation"]), float(obj["kernel_radius"]), GridSpec.from_json(obj["grid"]))


def domain_distance(a: Component, b: Component) -> float:
    return float(np.linalg.norm(a.center - b.center)) - a.domain_radius - b.domain_radius


def scene_problems(spec: SceneSpec) -> list:
    problems = []
    if not spec.components:
        problems.append("a scene needs at least one component")
    if not spec.separation > 2 * spec.kernel_radius:
        problems.append(f"requires r > 2δ (r={spec.separation}, δ={spec.kernel_radius})")
    if spec.grid.dim != spec.dim or any(c.center.size != spec.dim for c in spec.components):
        problems.append("component or grid dimension mismatch")
        return problems
    comps = spec.components
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            dist = domain_distance(comps[i], comps[j])
            if dist < spec.separation * (1 - DIST_TOL):
                problems.append(f"dist(D_{i}, D_{j}) = {dist:.6g} < r = {spec.separation}")
    if comps and spec.grid.box_half_width < required_half_width(spec.extent, "convolution", 2 * spec.grid.dx):
        problems.append(f"box half-width {spec.grid.box_half_width} cannot hold the inflated scene "
                        f"(extent {spec.extent:.6g})")
    return problems


def build_scene(spec: SceneSpec) -> SampledField:
    grid = spec.grid
    vals = np.zeros(grid.shape, dtype=complex)
    for c in spec.components:
        if c.profile == DELTA:
            vals[grid.index_of(c.center)] += c.weight / grid.dx ** grid.dim
        else:
            s = np.clip(1.0 - grid.radius_squared(c.center) / c.radius ** 2, 0.0, None)
            vals += c.weight * s ** c.order
    return SampledField(grid, vals, SPATIAL)


@dataclass(frozen=True, eq=False)
class ScenePair:
    spec: SceneSpec
    pair: liftnd.SampledFieldPair
    v: SampledField
    v_f: SampledField
    v_g: SampledField

    @property
    def margin(self) -> float:
        return self.pair.margin


def pair_on_scene_grid(pair_spec: liftnd.PairSpec, scene_spec: SceneSpec, validate: bool = True):
    if pair_spec.declared_radius > scene_spec.kernel_radius * (1 + 1e-12):
        raise SceneSpecError(f"pair radius {pair_spec.declared_radius:.6g} exceeds kernel radius δ="
                             f"{scene_spec.kernel_radius}")
    spec = pair_spec.with_grid(scene_spec.grid)
    if validate:
        problems = liftnd.check_pair_spec(spec)
        if problems:
            raise liftnd.PairSpecError(problems)
    return liftnd.build(spec, validate=False)


def convolve_pair(pair: liftnd.SampledFieldPair, scene: SampledField):
    """``v_f, v_g`` via the frequency route ``v_f_hat = (2 pi)^d f_hat v_hat``."""
    if pair.f_hat.spec != scene.spec:
        raise SpecMismatchError("pair and scene live on different grids")
    d = scene.spec.dim
    v_hat = forward_transform(scene)
    scale = (2 * np.pi) ** d
    v_f = inverse_transform(v_hat.replace(scale * pair.f_hat.values * v_hat.values))
    v_g = inverse_transform(v_hat.replace(scale * pair.g_hat.values * v_hat.values))
    return v_f, v_g


def convolve_pair_direct(pair: liftnd.SampledFieldPair, scene: SampledField):
    """Same fields via spatial-domain circular convolution of the rendered f, g."""
    return convolve(pair.f, scene), convolve(pair.g, scene)


def build_scene_pair(pair_spec: liftnd.PairSpec, scene_spec: SceneSpec, validate: bool = True) -> ScenePair:
    pair = pair_on_scene_grid(pair_spec, scene_spec, validate)
    v = build_scene(scene_spec)
    v_f, v_g = convolve_pair(pair, v)
    return ScenePair(scene_spec, pair, v, v_f, v_g)


@dataclass(frozen=True)
class ComponentCheck:
    outside_fraction: float
    per_component_energy: tuple
    min_gap: float
    required_gap: float
    margin: float
    tolerance: float
    passed: bool


def inflated_radii(spec: SceneSpec, margin: float) -> list:
    return [c.domain_radius + spec.kernel_radius + margin for c in spec.components]


def verify_components(sp: ScenePair, tol: float = 1e-6, floor: float = 1e-12) -> ComponentCheck:
    """Energy localization in ``N_{delta+margin}(D_k)`` and the measured gap between components.

    The gap is the smallest distance between grid points carrying
    relative energy above ``floor`` that belong to different components.
    """
    spec, margin = sp.spec, sp.margin
    centers = [c.center for c in spec.components]
    radii = inflated_radii(spec, margin)
    outside = max(liftnd.outside_energy_fraction(sp.v_f, centers, radii),
                  liftnd.outside_energy_fraction(sp.v_g, centers, radii))
    grid = spec.grid
    pts = np.stack([np.broadcast_to(ax, grid.shape).ravel() for ax in grid.spatial_axes()], axis=1)
    shares, clouds = [], [[] for _ in centers]
    for v in (sp.v_f, sp.v_g):
        energy = np.abs(v.values.ravel()) ** 2
        total = energy.sum()
        owner = np.full(energy.size, -1)
        for k, (c, r) in enumerate(zip(centers, radii)):
            inside = (grid.radius_squared(c).ravel() <= r * r) & (owner < 0)
            owner[inside] = k
        shares.append(tuple(float(energy[owner == k].sum() / total) for k in range(len(centers))))
        strong = energy > floor * energy.max()
        for k in range(len(centers)):
            clouds[k].append(pts[strong & (owner == k)])
    clouds = [np.concatenate(c) for c in clouds]
    gap = float("inf")
    for i in range(len(clouds)):
        if not len(clouds[i]):
            continue
        tree = cKDTree(clouds[i])
        for j in range(i + 1, len(clouds)):
            if len(clouds[j]):
                gap = min(gap, float(tree.query(clouds[j])[0].min()))
    required = spec.separation - 2 * spec.kernel_radius - 2 * margin
    return ComponentCheck(outside, tuple(shares[0]), gap, required, margin, tol,
                          outside <= tol and gap >= required)


def verify_scene_modulus(v_f: SampledField, v_g: SampledField, tol: float = 1e-10) -> liftnd.ModulusCheck:
    """Modulus equality recomputed from the spatial fields (not inherited from f, g)."""
    return liftnd.modulus_deviation(forward_transform(v_f), forward_transform(v_g), tol)


def verify_scene_nonassociated(v_f: SampledField, v_g: SampledField,
                               threshold: float = assoc.DEFAULT_THRESHOLD) -> assoc.AssocVerdict:
    return assoc.test_association(v_f, v_g, threshold)


def scene_grid_for(pair_spec: liftnd.PairSpec, components, kernel_radius: float) -> GridSpec:
    """Grid with the pair's sample step and the smallest power-of-two size holding the scene."""
    dx = pair_spec.grid.dx
    extent = max(float(np.linalg.norm(c.center)) + c.domain_radius for c in components) + kernel_radius
    m = pair_spec.grid.samples_per_axis
    while m * dx / 2 < required_half_width(extent, "convolution", 2 * dx):
        m *= 2
    return GridSpec(pair_spec.dim, m * dx / 2, m)


def random_scene(pair_spec: liftnd.PairSpec, n: int, seed, gap_factor: float = 2.5,
                 bump_fraction: float = 0.5) -> SceneSpec:
    """Seeded scene of ``n`` grid-centered components spaced for ``r = gap_factor * delta``.

    Components mix deltas and ball bumps (probability ``bump_fraction``);
    centers are snapped to grid nodes so delta components render exactly.
    """
    rng = np.random.default_rng(seed)
    d, dx = pair_spec.dim, pair_spec.grid.dx
    delta = pair_spec.declared_radius
    sep = max(gap_factor * delta, 2 * delta + 4 * dx)
    comps = []
    attempts = 0
    while len(comps) < n:
        attempts += 1
        if attempts > 10000:
            raise SceneSpecError("could not place components")
        bump = rng.random() < bump_fraction
        rmax = 1.5 * max(delta, 4 * dx)
        rad = float(rng.uniform(1 / 3, 1) * rmax) if bump else 0.0
        spread = 0.5 * (sep + 2 * rmax) * max(1, int(np.ceil(n ** (1 / d)))) * (1 + attempts / 2000)
        center = np.round(rng.uniform(-spread, spread, d) / dx) * dx
        weight = complex(rng.standard_normal(), rng.standard_normal())
        cand = Component(center, weight, BALL_BUMP if bump else DELTA, rad, int(rng.integers(1, 4)))
        if all(domain_distance(cand, c) >= sep for c in comps):
            comps.append(cand)
    grid = scene_grid_for(pair_spec, comps, delta)
    return SceneSpec(d, tuple(comps), sep, delta, grid)


def shift_and_add(f: SampledField, spec: SceneSpec) -> SampledField:
    """``sum_k C_k f(x - y_k)`` by integer grid shifts; only for all-delta scenes."""
    if any(c.profile != DELTA for c in spec.components):
        raise SceneSpecError("shift-and-add needs an all-delta scene")
    half = spec.grid.samples_per_axis // 2
    out = np.zeros(spec.grid.shape, dtype=complex)
    for c in spec.components:
        shift = tuple(i - half for i in spec.grid.index_of(c.center))
        out += c.weight * np.roll(f.values, shift, axis=tuple(range(spec.dim)))
    return SampledField(spec.grid, out, SPATIAL)
