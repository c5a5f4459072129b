"""Sampled complex fields on centered uniform grids.

Forward transform convention::

    v_hat(p) = (2 pi)^{-d} \\int exp(i p.x) v(x) dx

discretized as a Riemann sum on the grid ``x_n = -L/2 + n dx``, with
frequencies ``p_k = (k - M/2) dp``, ``dx = L/M`` and ``dp = 2 pi / L``.
The centering is applied with explicit (-1)^n phase ramps rather than
``fftshift`` so the sign convention stays exact for even ``M``.
"""
from __future__ import annotations

import csv
import os
import struct
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.fft

from .errors import InvalidFieldError, OffGridError, SpecMismatchError

SPATIAL = "spatial"
FREQUENCY = "frequency"
_DOMAIN_CODES = {SPATIAL: 0, FREQUENCY: 1}

MAGIC = b"PRAMBIG1".ljust(16, b"\x00")
_HEADER = struct.Struct("<16sIIdB")


def _workers():
    raw = os.environ.get("PRAMBIG_THREADS")
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on ``[-L/2, L/2)^d`` with ``M`` samples per axis."""

    dim: int
    box_half_width: float
    samples_per_axis: int

    def __post_init__(self):
        m = self.samples_per_axis
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if m < 2 or m & (m - 1):
            raise ValueError(f"samples_per_axis must be a power of two >= 2, got {m}")
        if not (self.box_half_width > 0 and np.isfinite(self.box_half_width)):
            raise ValueError(f"box_half_width must be positive, got {self.box_half_width}")

    @property
    def length(self) -> float:
        return 2.0 * self.box_half_width

    @property
    def dx(self) -> float:
        return self.length / self.samples_per_axis

    @property
    def dp(self) -> float:
        return 2.0 * np.pi / self.length

    @property
    def shape(self) -> tuple:
        return (self.samples_per_axis,) * self.dim

    def coords(self) -> np.ndarray:
        """Spatial sample positions along one axis."""
        return -self.box_half_width + self.dx * np.arange(self.samples_per_axis)

    def freqs(self) -> np.ndarray:
        """Frequency sample positions along one axis."""
        m = self.samples_per_axis
        return (np.arange(m) - m // 2) * self.dp

    def spatial_axes(self):
        """Broadcastable per-axis coordinate arrays (sparse meshgrid)."""
        return np.meshgrid(*([self.coords()] * self.dim), indexing="ij", sparse=True)

    def frequency_axes(self):
        return np.meshgrid(*([self.freqs()] * self.dim), indexing="ij", sparse=True)

    def dot_frequency(self, direction) -> np.ndarray:
        """``direction . p`` evaluated on the full frequency grid."""
        direction = np.asarray(direction, dtype=float)
        out = np.zeros(self.shape)
        for w, ax in zip(direction, self.frequency_axes()):
            out = out + w * ax
        return out

    def radius_squared(self, center=None, domain=SPATIAL) -> np.ndarray:
        axes = self.spatial_axes() if domain == SPATIAL else self.frequency_axes()
        center = np.zeros(self.dim) if center is None else np.asarray(center, float)
        out = np.zeros(self.shape)
        for c, ax in zip(center, axes):
            out = out + (ax - c) ** 2
        return out

    def index_of(self, point, tol=1e-9) -> tuple:
        """Grid index of ``point``; raises OffGridError if it is not a node."""
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dim,):
            raise OffGridError(f"point {point} has wrong dimension for d={self.dim}")
        raw = (point + self.box_half_width) / self.dx
        idx = np.rint(raw)
        if np.any(np.abs(raw - idx) > tol) or np.any(idx < 0) or np.any(idx >= self.samples_per_axis):
            raise OffGridError(f"point {point.tolist()} is not a grid node")
        return tuple(int(i) for i in idx)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "box_half_width": float(self.box_half_width),
            "samples_per_axis": self.samples_per_axis,
        }

    @classmethod
    def from_json(cls, obj) -> "GridSpec":
        return cls(int(obj["dim"]), float(obj["box_half_width"]), int(obj["samples_per_axis"]))

    @cached_property
    def _ramp(self) -> np.ndarray:
        # (-1)^(n_1 + ... + n_d), exact for even M
        sign = 1.0 - 2.0 * (np.arange(self.samples_per_axis) % 2)
        out = np.ones(())
        for _ in range(self.dim):
            out = np.multiply.outer(out, sign)
        return out

    @property
    def _global_sign(self) -> float:
        return -1.0 if (self.dim * (self.samples_per_axis // 2)) % 2 else 1.0


def required_half_width(radius: float, kind: str = "single", margin: float = 0.0) -> float:
    """Smallest box half-width for a field supported in a ball of ``radius``.

    ``single``: L >= 4 r, so circular correlations of two such fields do
    not wrap. ``convolution``: the (already summed) radius plus margin
    must fit inside the box.
    """
    if kind == "single":
        return 2.0 * radius + margin / 2.0
    if kind == "convolution":
        return radius + margin / 2.0
    raise ValueError(f"unknown sizing kind {kind!r}")


@dataclass(frozen=True, eq=False)
class SampledField:
    spec: GridSpec
    values: np.ndarray = field(repr=False)
    domain: str = SPATIAL

    def __post_init__(self):
        if self.domain not in _DOMAIN_CODES:
            raise InvalidFieldError(f"unknown domain tag {self.domain!r}")
        vals = np.array(self.values, dtype=complex)
        if vals.shape != self.spec.shape:
            raise InvalidFieldError(f"values have shape {vals.shape}, expected {self.spec.shape}")
        if not np.all(np.isfinite(vals)):
            raise InvalidFieldError("field contains non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def weight(self) -> float:
        step = self.spec.dx if self.domain == SPATIAL else self.spec.dp
        return step ** self.spec.dim

    def replace(self, values) -> "SampledField":
        return SampledField(self.spec, values, self.domain)

    def __mul__(self, scalar):
        return self.replace(self.values * scalar)

    __rmul__ = __mul__


def _require(f: SampledField, domain: str):
    if f.domain != domain:
        raise InvalidFieldError(f"expected a {domain} field, got {f.domain}")
    if not np.all(np.isfinite(f.values)):
        raise InvalidFieldError("field contains non-finite values")


def forward_transform(v: SampledField) -> SampledField:
    _require(v, SPATIAL)
    spec = v.spec
    d, m = spec.dim, spec.samples_per_axis
    scale = spec._global_sign * (spec.dx / (2 * np.pi)) ** d * m ** d
    out = scipy.fft.ifftn(v.values * spec._ramp, workers=_workers())
    return SampledField(spec, scale * spec._ramp * out, FREQUENCY)


def inverse_transform(vh: SampledField) -> SampledField:
    _require(vh, FREQUENCY)
    spec = vh.spec
    scale = spec._global_sign * spec.dp ** spec.dim
    out = scipy.fft.fftn(vh.values * spec._ramp, workers=_workers())
    return SampledField(spec, scale * spec._ramp * out, SPATIAL)


def convolve(a: SampledField, b: SampledField) -> SampledField:
    """Circular convolution ``sum_m a(x_n - x_m) b(x_m) dx^d`` on the grid.

    Equals the continuum convolution whenever supp(a) + supp(b) stays
    inside the box. Uses uncentered FFTs directly (independent of the
    centered transforms above).
    """
    if a.spec != b.spec:
        raise SpecMismatchError(f"grid mismatch: {a.spec} vs {b.spec}")
    _require(a, SPATIAL)
    _require(b, SPATIAL)
    spec = a.spec
    w = _workers()
    prod = scipy.fft.fftn(a.values, workers=w) * scipy.fft.fftn(b.values, workers=w)
    # index offset of M/2 per axis: x_n - x_m lives at n - m + M/2
    c = scipy.fft.ifftn(prod * spec._ramp, workers=w)
    return SampledField(spec, c * spec.dx ** spec.dim, SPATIAL)


def l2_norm(v: SampledField) -> float:
    return float(np.sqrt(np.sum(np.abs(v.values) ** 2) * v.weight))


def modulus_field(v: SampledField) -> np.ndarray:
    return np.abs(v.values)


def render_atoms(spec: GridSpec, positions, weights) -> SampledField:
    """Point masses as single-sample columns of height ``w / dx^d``."""
    vals = np.zeros(spec.shape, dtype=complex)
    for pos, w in zip(np.atleast_2d(np.asarray(positions, float)), np.atleast_1d(weights)):
        vals[spec.index_of(pos)] += w / spec.dx ** spec.dim
    return SampledField(spec, vals, SPATIAL)


def write_field(path, v: SampledField) -> None:
    spec = v.spec
    header = _HEADER.pack(MAGIC, spec.dim, spec.samples_per_axis, spec.length, _DOMAIN_CODES[v.domain])
    body = np.ascontiguousarray(v.values, dtype="<c16").tobytes(order="C")
    Path(path).write_bytes(header + body)


def read_field(path) -> SampledField:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise InvalidFieldError(f"{path}: truncated header")
    magic, d, m, length, code = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise InvalidFieldError(f"{path}: bad magic {magic!r}")
    domains = {v: k for k, v in _DOMAIN_CODES.items()}
    if code not in domains:
        raise InvalidFieldError(f"{path}: unknown domain code {code}")
    spec = GridSpec(d, length / 2.0, m)
    expected = _HEADER.size + 16 * m ** d
    if len(raw) != expected:
        raise InvalidFieldError(f"{path}: expected {expected} bytes, found {len(raw)}")
    vals = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size).reshape(spec.shape)
    return SampledField(spec, vals.copy(), domains[code])


def write_csv(path, v: SampledField) -> None:
    if v.spec.dim != 1:
        raise InvalidFieldError("CSV export is only defined for d = 1")
    coords = v.spec.coords() if v.domain == SPATIAL else v.spec.freqs()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["coordinate", "re", "im"])
        for c, z in zip(coords, v.values):
            w.writerow([repr(float(c)), repr(float(z.real)), repr(float(z.imag))])
