"""One-dimensional building blocks: atomic profiles, their zero sets, and zero flips.

A profile on ``[-eps, eps]`` is a row of ``m + 1`` weighted atoms at
``x_k = -eps + k h`` (``h = 2 eps / m``), optionally smoothed by a centered
``q``-fold box convolution of width ``h_b``. Its transform is

    f_hat(p) = (2 pi)^{-1} b_q(p) exp(-i p eps) A(exp(i p h)),
    A(w) = sum_k a_k w^k,   b_q(p) = sinc(p h_b / 2)^q.

Every root ``w`` of ``A`` off the unit circle stands for one periodic
family of non-real zeros of ``f_hat``; flipping it to ``1 / conj(w)``
conjugates the whole family and leaves ``|f_hat|`` unchanged on the real
line.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import GenerationFailedError, NoRootsError, RootFindingError, SelectionError

UNIT_TOL = 1e-8
# relative distance under which two root values are the same element
MATCH_TOL = 1e-6
# eigenvalues this close are treated as one multiple root
CLUSTER_TOL = 1e-4
RESIDUAL_TOL = 1e-8

NONEMPTY = "I' nonempty"
NOT_ALL = "I' != I"
NO_CONJUGATE_PAIR = "I' ∩ conj(I') = ∅"
NOT_UNPAIRED_SET = "I' != I \\ conj(I)"
NOT_NONREAL = "not-a-nonreal-zero"


def encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(pair) -> complex:
    re, im = pair
    return complex(float(re), float(im))


@dataclass(frozen=True, eq=False)
class Sequence1D:
    epsilon: float
    coeffs: np.ndarray = field(repr=False)
    smoothing_order: int = 2
    bump_width: float | None = None

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size < 2:
            raise ValueError("a profile needs at least two atoms")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        if c[0] == 0 or c[-1] == 0:
            raise ValueError("end coefficients a_0 and a_m must be nonzero")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.smoothing_order < 0:
            raise ValueError("smoothing_order must be >= 0")
        if self.bump_width is not None and not self.bump_width > 0:
            raise ValueError("bump_width must be positive")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def atom_count(self) -> int:
        return self.coeffs.size

    @property
    def spacing(self) -> float:
        return 2.0 * self.epsilon / self.degree

    @property
    def positions(self) -> np.ndarray:
        return -self.epsilon + self.spacing * np.arange(self.atom_count)

    @property
    def bump_cell(self) -> float:
        return self.spacing if self.bump_width is None else self.bump_width

    @property
    def bump_extent(self) -> float:
        """Full width of the smoothing bump (0 for pure atoms)."""
        return self.smoothing_order * self.bump_cell

    @property
    def effective_epsilon(self) -> float:
        return self.epsilon + self.bump_extent / 2.0

    def with_coeffs(self, coeffs) -> "Sequence1D":
        return Sequence1D(self.epsilon, coeffs, self.smoothing_order, self.bump_width)

    def to_json(self) -> dict:
        return {
            "epsilon": float(self.epsilon),
            "atom_count": self.atom_count,
            "spacing": float(self.spacing),
            "coeffs": [encode_complex(z) for z in self.coeffs],
            "smoothing_order": self.smoothing_order,
            "bump_width": None if self.bump_width is None else float(self.bump_width),
        }

    @classmethod
    def from_json(cls, obj) -> "Sequence1D":
        coeffs = [decode_complex(z) for z in obj["coeffs"]]
        if "atom_count" in obj and int(obj["atom_count"]) != len(coeffs):
            raise ValueError(f"atom_count {obj['atom_count']} does not match {len(coeffs)} coefficients")
        bw = obj.get("bump_width")
        return cls(float(obj["epsilon"]), coeffs, int(obj.get("smoothing_order", 2)),
                   None if bw is None else float(bw))


def poly_eval(coeffs, w):
    """Horner evaluation of ``sum_k a_k w^k`` (coefficients in ascending order)."""
    w = np.asarray(w, dtype=complex)
    acc = np.zeros_like(w) + coeffs[-1]
    for a in coeffs[-2::-1]:
        acc = acc * w + a
    return acc


def bump_hat(seq: Sequence1D, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if seq.smoothing_order == 0:
        return np.ones_like(p)
    return np.sinc(p * seq.bump_cell / (2 * np.pi)) ** seq.smoothing_order


def eval_hat(seq: Sequence1D, p) -> np.ndarray:
    """Closed-form transform of the profile at real frequencies ``p``."""
    p = np.asarray(p, dtype=float)
    poly = poly_eval(seq.coeffs, np.exp(1j * p * seq.spacing))
    return bump_hat(seq, p) * np.exp(-1j * p * seq.epsilon) * poly / (2 * np.pi)


def circle_values(coeffs, n: int = 4096) -> np.ndarray:
    theta = 2 * np.pi * np.arange(n) / n
    return poly_eval(np.asarray(coeffs, complex), np.exp(1j * theta))


def circle_modulus_gap(a_coeffs, b_coeffs, n: int = 4096) -> float:
    """``sup ||A| - |B||`` over ``n`` unit-circle samples, relative to ``max |A|``."""
    a = np.abs(circle_values(a_coeffs, n))
    b = np.abs(circle_values(b_coeffs, n))
    return float(np.max(np.abs(a - b)) / np.max(a))


@dataclass(frozen=True, eq=False)
class RootSet:
    leading_coeff: complex
    roots: np.ndarray = field(repr=False)
    spacing: float
    epsilon: float

    def __post_init__(self):
        r = np.array(self.roots, dtype=complex).ravel()
        r.setflags(write=False)
        object.__setattr__(self, "roots", r)

    def __len__(self):
        return self.roots.size

    def is_unit(self, tol: float = UNIT_TOL) -> np.ndarray:
        return np.abs(np.abs(self.roots) - 1.0) <= tol

    def nonunit_indices(self, tol: float = UNIT_TOL) -> list:
        return [int(i) for i in np.flatnonzero(~self.is_unit(tol))]

    def synthesize(self) -> np.ndarray:
        """Ascending coefficients of ``leading * prod(w - w_i)``."""
        return self.leading_coeff * np.poly(self.roots)[::-1]

    def to_json(self) -> dict:
        return {
            "leading_coeff": encode_complex(self.leading_coeff),
            "roots": [encode_complex(z) for z in self.roots],
            "spacing": float(self.spacing),
            "epsilon": float(self.epsilon),
        }

    @classmethod
    def from_json(cls, obj) -> "RootSet":
        return cls(decode_complex(obj["leading_coeff"]), [decode_complex(z) for z in obj["roots"]],
                   float(obj["spacing"]), float(obj["epsilon"]))


@dataclass(frozen=True)
class FlipSelection:
    selected: tuple

    def __post_init__(self):
        object.__setattr__(self, "selected", tuple(sorted(int(i) for i in self.selected)))

    def to_json(self) -> dict:
        return {"selected": list(self.selected)}

    @classmethod
    def from_json(cls, obj) -> "FlipSelection":
        return cls(tuple(obj["selected"]))


def _backward_error(coeffs, w) -> float:
    scale = np.sum(np.abs(coeffs) * np.abs(w) ** np.arange(coeffs.size))
    return float(abs(poly_eval(coeffs, w)) / scale)


def _clusters(roots: np.ndarray, tol: float = CLUSTER_TOL) -> list:
    """Index groups of nearly equal roots (singletons included)."""
    seen = np.zeros(len(roots), dtype=bool)
    groups = []
    for i in range(len(roots)):
        if seen[i]:
            continue
        near = (np.abs(roots - roots[i]) <= tol * max(1.0, abs(roots[i]))) & ~seen
        seen |= near
        groups.append(np.flatnonzero(near))
    return groups


def roots_of(seq: Sequence1D) -> RootSet:
    """All roots of ``A`` (with multiplicity) via companion-matrix eigenvalues.

    Simple roots get one Newton step, kept only if it lowers the residual;
    clusters of nearly equal eigenvalues are replaced by their mean.
    Raises RootFindingError if any relative backward error exceeds 1e-8.
    """
    c = seq.coeffs
    m = c.size - 1
    if m < 1:
        raise NoRootsError("degree-0 polynomial has no roots")
    companion = np.zeros((m, m), dtype=complex)
    companion[1:, :-1] = np.eye(m - 1)
    companion[:, -1] = -c[:-1] / c[-1]
    roots = np.linalg.eigvals(companion)
    deriv = c[1:] * np.arange(1, m + 1)
    polished = roots.copy()
    for group in _clusters(roots):
        if len(group) > 1:
            # a k-fold root splits by ~eps^(1/k); the cluster mean is accurate to ~eps
            polished[group] = roots[group].mean()
            continue
        i = group[0]
        w = roots[i]
        dw = poly_eval(deriv, w)
        if dw != 0:
            cand = w - poly_eval(c, w) / dw
            if np.isfinite(cand) and _backward_error(c, cand) < _backward_error(c, w):
                polished[i] = cand
    residuals = np.array([_backward_error(c, w) for w in polished])
    if np.any(residuals > RESIDUAL_TOL):
        raise RootFindingError(f"root residuals too large: max {residuals.max():.3e}", residuals)
    return RootSet(complex(c[-1]), polished, seq.spacing, seq.epsilon)


def _close(a, b, tol=MATCH_TOL) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def reflect(w):
    """The conjugate-reciprocal partner ``1 / conj(w)``."""
    return 1.0 / np.conj(w)


def _multiset_equal(xs, ys, tol=MATCH_TOL) -> bool:
    ys = list(ys)
    if len(xs) != len(ys):
        return False
    for x in xs:
        for j, y in enumerate(ys):
            if _close(x, y, tol):
                del ys[j]
                break
        else:
            return False
    return True


def unpaired_roots(rs: RootSet, tol: float = UNIT_TOL) -> list:
    """Multiset ``I \\ conj(I)`` among off-circle roots, as root values."""
    pool = [rs.roots[i] for i in rs.nonunit_indices(tol)]
    partners = [reflect(w) for w in pool]
    used = [False] * len(pool)
    out = []
    for w in pool:
        for j, z in enumerate(partners):
            if not used[j] and _close(w, z):
                used[j] = True
                break
        else:
            out.append(w)
    return out


def validate_selection(rs: RootSet, sel: FlipSelection, unit_tol: float = UNIT_TOL) -> list:
    """Names of the admissibility clauses ``sel`` violates (empty list = ok)."""
    idx = list(sel.selected)
    if len(set(idx)) != len(idx):
        raise SelectionError(["duplicate index"], f"duplicate indices in {idx}")
    bad = [i for i in idx if not 0 <= i < len(rs)]
    if bad:
        raise SelectionError(["index out of range"], f"indices {bad} out of range for {len(rs)} roots")

    violations = []
    nonunit = set(rs.nonunit_indices(unit_tol))
    if any(i not in nonunit for i in idx):
        violations.append(NOT_NONREAL)
    if not idx:
        violations.append(NONEMPTY)
    if nonunit and set(idx) == nonunit:
        violations.append(NOT_ALL)
    vals = [rs.roots[i] for i in idx]
    if any(_close(vals[a], reflect(vals[b])) for a in range(len(vals)) for b in range(len(vals)) if a != b):
        violations.append(NO_CONJUGATE_PAIR)
    if idx and _multiset_equal(vals, unpaired_roots(rs, unit_tol)):
        violations.append(NOT_UNPAIRED_SET)
    return violations


def flip_roots(rs: RootSet, sel: FlipSelection, alpha: float = 0.0) -> RootSet:
    """Root set after replacing each selected ``w`` by ``1 / conj(w)``.

    The leading coefficient absorbs ``prod |w_i|`` and ``exp(i alpha)`` so
    that the modulus on the unit circle is preserved.
    """
    violations = validate_selection(rs, sel)
    if violations:
        raise SelectionError(violations)
    roots = rs.roots.copy()
    scale = 1.0
    for i in sel.selected:
        scale *= abs(roots[i])
        roots[i] = reflect(roots[i])
    lead = rs.leading_coeff * scale * np.exp(1j * alpha)
    return RootSet(lead, roots, rs.spacing, rs.epsilon)


def flip(seq: Sequence1D, sel: FlipSelection, alpha: float = 0.0) -> Sequence1D:
    return seq.with_coeffs(flip_roots(roots_of(seq), sel, alpha).synthesize())


def match_roots(rs: RootSet, values) -> FlipSelection:
    """Indices in ``rs`` of the given root values (multiset-aware)."""
    free = list(range(len(rs)))
    picked = []
    for v in values:
        best = min(free, key=lambda i: abs(rs.roots[i] - v))
        if not abs(rs.roots[best] - v) <= 1e-6 * max(1.0, abs(v)):
            raise ValueError(f"root {v} not found in root set")
        free.remove(best)
        picked.append(best)
    return FlipSelection(tuple(picked))


def admissible_selections(rs: RootSet, candidates=None) -> list:
    """All admissible selections drawn from ``candidates`` (default: off-circle roots)."""
    pool = rs.nonunit_indices() if candidates is None else list(candidates)
    out = []
    for k in range(1, len(pool) + 1):
        for combo in combinations(pool, k):
            sel = FlipSelection(combo)
            if not validate_selection(rs, sel):
                out.append(sel)
    return out


@dataclass(frozen=True)
class PairConstraints:
    epsilon: float = 1.0
    smoothing_order: int = 2
    bump_width: float | None = None
    # selected roots must sit at least this far from the unit circle
    min_unit_distance: float = 0.1
    alpha: float = 0.0
    max_retries: int = 200
    selection_draws: int = 2000


def random_pair(m: int, seed, constraints: PairConstraints | None = None):
    """Seeded draw of an admissible flipped pair ``(f, g, selection)`` of degree ``m``."""
    if m < 2:
        raise ValueError("random_pair needs degree m >= 2")
    cons = constraints or PairConstraints()
    rng = np.random.default_rng(seed)
    for _ in range(cons.max_retries):
        coeffs = rng.standard_normal(m + 1) + 1j * rng.standard_normal(m + 1)
        if abs(coeffs[0]) < 1e-3 or abs(coeffs[-1]) < 1e-3:
            continue
        f = Sequence1D(cons.epsilon, coeffs, cons.smoothing_order, cons.bump_width)
        try:
            rs = roots_of(f)
        except RootFindingError:
            continue
        pool = [i for i in rs.nonunit_indices() if abs(abs(rs.roots[i]) - 1) >= cons.min_unit_distance]
        if not pool:
            continue
        for _ in range(cons.selection_draws):
            mask = rng.random(len(pool)) < 0.5
            sel = FlipSelection(tuple(i for i, keep in zip(pool, mask) if keep))
            if not validate_selection(rs, sel):
                g = f.with_coeffs(flip_roots(rs, sel, cons.alpha).synthesize())
                return f, g, sel
    raise GenerationFailedError(f"no admissible selection found for m={m} after {cons.max_retries} draws")
