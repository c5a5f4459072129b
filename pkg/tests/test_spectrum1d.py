import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from cases import brute_force_cases, random_coeffs
from prambig.errors import GenerationFailedError, NoRootsError, SelectionError
from prambig.grid_fft import GridSpec, forward_transform, render_atoms
from prambig.spectrum1d import (
    NO_CONJUGATE_PAIR,
    NONEMPTY,
    NOT_ALL,
    NOT_NONREAL,
    NOT_UNPAIRED_SET,
    FlipSelection,
    PairConstraints,
    RootSet,
    Sequence1D,
    admissible_selections,
    circle_modulus_gap,
    eval_hat,
    flip,
    flip_roots,
    match_roots,
    random_pair,
    roots_of,
    validate_selection,
)


def seq_from_roots(roots, lead=1.0, epsilon=1.0, q=0):
    return Sequence1D(epsilon, lead * np.poly(roots)[::-1], smoothing_order=q)


class TestSequence1D:
    def test_geometry(self):
        s = Sequence1D(0.75, [1, 2, 3, 4], smoothing_order=2)
        assert s.degree == 3 and s.atom_count == 4
        assert s.spacing == pytest.approx(0.5)
        np.testing.assert_allclose(s.positions, [-0.75, -0.25, 0.25, 0.75])
        assert s.bump_extent == pytest.approx(1.0)
        assert s.effective_epsilon == pytest.approx(1.25)

    @pytest.mark.parametrize("coeffs", [[0, 1, 1], [1, 1, 0], [1], [1, np.inf]])
    def test_rejects_bad_coefficients(self, coeffs):
        with pytest.raises(ValueError):
            Sequence1D(1.0, coeffs)

    def test_json_round_trip(self):
        s = Sequence1D(0.5, [1 + 2j, -0.5, 3j], smoothing_order=3, bump_width=0.1)
        back = Sequence1D.from_json(s.to_json())
        assert back.epsilon == s.epsilon and back.smoothing_order == 3 and back.bump_width == 0.1
        assert back.coeffs.tobytes() == s.coeffs.tobytes()
        assert s.to_json()["atom_count"] == 3

    def test_json_atom_count_mismatch(self):
        obj = Sequence1D(0.5, [1, 2, 3]).to_json()
        obj["atom_count"] = 4
        with pytest.raises(ValueError):
            Sequence1D.from_json(obj)


class TestEvalHat:
    def test_single_atom_is_flat(self):
        # the end atoms are negligible, leaving one unit atom at x = 0
        s = Sequence1D(1.0, [1e-300, 1.0, 1e-300], smoothing_order=0)
        p = np.linspace(-5, 5, 11)
        np.testing.assert_allclose(eval_hat(s, p), 1 / (2 * np.pi), rtol=1e-12)

    def test_dc_value(self):
        s = Sequence1D(0.5, [1 + 1j, 2, -0.5j], smoothing_order=2)
        assert eval_hat(s, np.array([0.0]))[0] == pytest.approx(s.coeffs.sum() / (2 * np.pi))

    def test_matches_grid_transform_of_rendered_atoms(self):
        g = GridSpec(1, 8.0, 1024)
        # degree 4 on [-1, 1] puts the atoms on nodes of the dx = 1/64 grid
        s = Sequence1D(1.0, [1, -2j, 0.5, 1 + 1j, 2], smoothing_order=0)
        v = render_atoms(g, s.positions[:, None], s.coeffs)
        err = np.abs(forward_transform(v).values - eval_hat(s, g.freqs()))
        assert err.max() <= 1e-9

    def test_bump_factor_is_a_box_power(self):
        s = Sequence1D(0.5, [1, 1], smoothing_order=3, bump_width=0.2)
        p = np.array([0.0, 1.0, 7.0])
        box = np.sinc(p * 0.2 / (2 * np.pi))
        ratio = eval_hat(s, p) / eval_hat(Sequence1D(0.5, [1, 1], smoothing_order=0), p)
        np.testing.assert_allclose(ratio, box ** 3, rtol=1e-12)


class TestRoots:
    def test_quadratic_example(self):
        rs = roots_of(Sequence1D(1.0, [2, 2, 1]))
        expect = oracles.quadratic_roots(2, 2, 1)
        got = sorted(rs.roots, key=lambda z: (z.real, z.imag))
        np.testing.assert_allclose(got, expect, atol=1e-14)
        np.testing.assert_allclose(np.abs(rs.roots), np.sqrt(2))
        assert not rs.is_unit().any()

    def test_unit_circle_root(self):
        rs = roots_of(Sequence1D(1.0, [1, 1]))
        np.testing.assert_allclose(rs.roots, [-1.0])
        assert rs.is_unit().all() and rs.nonunit_indices() == []
        assert admissible_selections(rs) == []

    def test_degree_zero(self):
        with pytest.raises(NoRootsError):
            roots_of(_constant())

    @pytest.mark.parametrize("m", [2, 5, 12, 24])
    def test_reconstruction(self, m):
        rng = np.random.default_rng(m)
        for _ in range(5):
            s = Sequence1D(1.0, random_coeffs(rng, m))
            back = roots_of(s).synthesize()
            assert np.max(np.abs(back - s.coeffs)) <= 1e-8 * np.max(np.abs(s.coeffs))

    def test_residuals_small(self):
        rng = np.random.default_rng(3)
        s = Sequence1D(1.0, random_coeffs(rng, 12))
        rs = roots_of(s)
        res = np.abs(np.polyval(s.coeffs[::-1], rs.roots))
        assert res.max() <= 1e-8 * np.abs(s.coeffs).max()

    def test_json_round_trip(self):
        rs = roots_of(Sequence1D(1.0, [2, 2, 1]))
        back = RootSet.from_json(rs.to_json())
        np.testing.assert_array_equal(back.roots, rs.roots)
        assert back.leading_coeff == rs.leading_coeff


def _constant():
    # Sequence1D refuses a single atom, so feed roots_of a duck-typed stand-in
    class Stub:
        coeffs = np.array([1.0 + 0j])
        spacing = 1.0
        epsilon = 1.0
    return Stub()


class TestValidateSelection:
    rs = roots_of(Sequence1D(1.0, [2, 2, 1]))

    def idx(self, value):
        return match_roots(self.rs, [value]).selected

    def test_worked_example_is_admissible(self):
        assert validate_selection(self.rs, FlipSelection(self.idx(-1 + 1j))) == []
        clauses = oracles.eq5_clauses(self.rs.roots, self.idx(-1 + 1j), 1.0)
        assert all(clauses.values())

    def test_empty(self):
        assert NONEMPTY in validate_selection(self.rs, FlipSelection(()))

    def test_all_roots(self):
        assert NOT_ALL in validate_selection(self.rs, FlipSelection((0, 1)))

    def test_conjugate_pair(self):
        w = 0.5 + 0.8j
        rs = roots_of(seq_from_roots([w, 1 / np.conj(w), 2.0 - 1j]))
        sel = match_roots(rs, [w, 1 / np.conj(w)])
        assert NO_CONJUGATE_PAIR in validate_selection(rs, sel)

    def test_unpaired_set(self):
        # roots {w, 1/conj(w), z}: I \ conj(I) = {z}, so selecting z alone is excluded
        w, z = 0.5 + 0.8j, 2.0 - 1j
        rs = roots_of(seq_from_roots([w, 1 / np.conj(w), z]))
        assert validate_selection(rs, match_roots(rs, [z])) == [NOT_UNPAIRED_SET]
        assert validate_selection(rs, match_roots(rs, [w])) == []
        assert validate_selection(rs, match_roots(rs, [w, z])) == []

    def test_unit_root(self):
        rs = roots_of(seq_from_roots([1j, 2.0 + 1j, 0.3]))
        sel = match_roots(rs, [1j])
        assert NOT_NONREAL in validate_selection(rs, sel)

    def test_index_errors(self):
        with pytest.raises(SelectionError):
            validate_selection(self.rs, FlipSelection((0, 0)))
        with pytest.raises(SelectionError):
            validate_selection(self.rs, FlipSelection((5,)))

    def test_repeated_root_multiplicity(self):
        # I = {w, w, z}: selecting one copy of w is fine, both copies differs from I too
        w, z = 2.0 + 1j, -0.3 + 0.2j
        rs = roots_of(seq_from_roots([w, w, z]))
        one = FlipSelection((int(np.argmin(np.abs(rs.roots - w))),))
        assert validate_selection(rs, one) == []

    @pytest.mark.parametrize("k", [2, 3])
    def test_flipping_one_copy_of_a_multiple_root(self, k):
        # {w, u^k, z} with u = 1/conj(w): I \ conj(I) = {u^(k-1), z}
        w, z = 0.5 + 0.3j, 2.0 - 1j
        u = 1 / np.conj(w)
        s = seq_from_roots([w] + [u] * k + [z])
        rs = roots_of(s)
        sel = match_roots(rs, [u])
        assert validate_selection(rs, sel) == []
        assert oracles.circle_sup_gap(s.coeffs, flip(s, sel).coeffs) <= 1e-12
        if k == 2:
            assert NOT_UNPAIRED_SET in validate_selection(rs, match_roots(rs, [u, z]))


class TestFlip:
    f = Sequence1D(1.0, [2, 2, 1], smoothing_order=0)

    def test_worked_example(self):
        rs = roots_of(self.f)
        g = flip(self.f, match_roots(rs, [-1 + 1j]))
        expect = oracles.flipped_coeffs([2, 2, 1], [-1 + 1j])
        np.testing.assert_allclose(g.coeffs, expect, atol=1e-12)
        # (w - (-1-i)) (w - (-1+i)/2), leading coefficient sqrt(2)
        np.testing.assert_allclose(g.coeffs, np.sqrt(2) * np.poly([-1 - 1j, (-1 + 1j) / 2])[::-1], atol=1e-12)
        assert oracles.circle_sup_gap(self.f.coeffs, g.coeffs) <= 1e-12

    def test_not_trivially_related(self):
        g = flip(self.f, match_roots(roots_of(self.f), [-1 + 1j]))
        assert not oracles.trivially_related_1d(self.f.coeffs, g.coeffs)
        assert oracles.trivially_related_1d(self.f.coeffs, 1j * np.conj(self.f.coeffs[::-1]))

    def test_involution_up_to_phase(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            f, g, sel = random_pair(6, rng.integers(2**32), PairConstraints(alpha=0.7))
            image = match_roots(roots_of(g), [1 / np.conj(roots_of(f).roots[i]) for i in sel.selected])
            back = flip(g, image)
            assert oracles.best_unimodular_fit(f.coeffs, back.coeffs) <= 1e-10

    def test_alpha_is_a_global_phase(self):
        rs = roots_of(self.f)
        sel = match_roots(rs, [-1 + 1j])
        a = flip_roots(rs, sel).synthesize()
        b = flip_roots(rs, sel, alpha=1.2).synthesize()
        np.testing.assert_allclose(b, np.exp(1.2j) * a, atol=1e-14)

    def test_invalid_selection_raises(self):
        with pytest.raises(SelectionError) as exc:
            flip(self.f, FlipSelection(()))
        assert NONEMPTY in exc.value.violations

    def test_modulus_equality_on_real_line(self):
        rng = np.random.default_rng(5)
        f, g, _ = random_pair(5, 9, PairConstraints(smoothing_order=2))
        p = rng.uniform(-40, 40, 500)
        np.testing.assert_allclose(np.abs(eval_hat(g, p)), np.abs(eval_hat(f, p)),
                                   rtol=0, atol=1e-10 * np.abs(eval_hat(f, p)).max())


class TestZeroFlipProduct:
    """The family flip equals the infinite zero-flip product up to a unimodular constant."""

    @pytest.mark.parametrize("w,h", [(-1 + 1j, 1.0), (0.3 - 0.4j, 0.5), (2.5 + 0.1j, 0.25)])
    def test_matches_truncated_product(self, w, h):
        z = np.array([0.3, -1.7, 2.2, 5.1])
        family = oracles.family_blaschke(w, z, h)
        product = oracles.truncated_zero_flip_product(w, z, h, terms=4000)
        ratio = family / product
        assert np.allclose(np.abs(family), 1, atol=1e-12)
        assert np.max(np.abs(ratio / ratio[0] - 1)) <= 1e-3


class TestRandomPair:
    def test_deterministic(self):
        a = random_pair(6, 123)
        b = random_pair(6, 123)
        assert a[0].coeffs.tobytes() == b[0].coeffs.tobytes()
        assert a[1].coeffs.tobytes() == b[1].coeffs.tobytes()
        assert a[2] == b[2]

    def test_generation_failure(self):
        with pytest.raises(GenerationFailedError):
            random_pair(3, 0, PairConstraints(min_unit_distance=1e6, max_retries=5))

    def test_degree_bound(self):
        with pytest.raises(ValueError):
            random_pair(1, 0)

    @given(st.integers(2, 12), st.integers(0, 2**32 - 1))
    def test_generated_pairs_are_valid(self, m, seed):
        f, g, sel = random_pair(m, seed)
        rs = roots_of(f)
        assert validate_selection(rs, sel) == []
        assert oracles.admissible_by_oracle(rs.roots, sel.selected, f.spacing)
        assert circle_modulus_gap(f.coeffs, g.coeffs) <= 1e-10
        assert oracles.circle_sup_gap(f.coeffs, g.coeffs) <= 1e-10


def test_brute_force_subsets_match_oracle():
    for s in brute_force_cases(50, 2024):
        rs = roots_of(s)
        for subset in oracles.all_subsets(len(rs)):
            ok = validate_selection(rs, FlipSelection(subset)) == []
            assert ok == oracles.admissible_by_oracle(rs.roots, subset, s.spacing), (s.coeffs, subset)
            if ok:
                g = flip(s, FlipSelection(subset))
                assert oracles.circle_sup_gap(s.coeffs, g.coeffs) <= 1e-10
