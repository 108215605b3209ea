import math

import numpy as np
import pytest

from msdweak.codes import StabilizerCode, builtin, loads
from msdweak.distill import (
    GroupSizeError,
    PostSelectionError,
    build_map,
    enumerate_group,
    evaluate,
    evaluate_heterogeneous,
    logical_labels,
)
from msdweak.measurement import MeasurementModel
from msdweak.oracle import oracle_distill
from msdweak.pauli import PauliError, PauliOperator, commutes

S2 = 1 / math.sqrt(2)
T = (S2, S2, 0.0)


class TestEnumeration:
    def test_element_count_and_identity(self, maps):
        seen = list(enumerate_group(builtin("15-1-3-canonical")))
        assert len(seen) == 2 ** 14
        identities = [s for g, s in seen if s.is_identity]
        assert len(identities) == 1
        gamma0 = [g for g, s in seen if s.is_identity]
        assert gamma0 == [0]

    def test_422_elements(self):
        elems = {s.to_string() for _, s in enumerate_group(builtin("4-2-2"))}
        assert elems == {"IIII", "XXXX", "ZZZZ", "YYYY"}

    def test_elements_commute_with_logicals(self):
        code = builtin("14-2-2-canonical")
        for _, s in enumerate_group(code):
            assert commutes(s, code.logical_x[0])
            assert commutes(s, code.logical_z[0])

    def test_imaginary_phase_aborts(self):
        bad = StabilizerCode(
            n=2, k=0,
            generators=(PauliOperator.from_string("XI"),
                        PauliOperator.from_string("ZI")),
            logical_x=(), logical_z=(), name="invalid")
        with pytest.raises(PauliError):
            list(enumerate_group(bad))

    def test_size_guard(self):
        big = StabilizerCode(
            n=30, k=1,
            generators=tuple(PauliOperator(30, 0, 1 << i, 0) for i in range(29)),
            logical_x=(PauliOperator(30, 1 << 29, 0, 0),),
            logical_z=(PauliOperator(30, 0, 1 << 29, 0),),
            name="big")
        with pytest.raises(GroupSizeError):
            list(enumerate_group(big))


class TestBuildMap:
    def test_tracked_label_count(self, maps):
        assert len(maps("15-1-3-canonical").labels) == 3
        assert len(maps("14-2-2-canonical").labels) == 15

    def test_gamma_zero_denominator_term(self, maps):
        den = maps("15-1-3-canonical").denominator
        mask = (den.g == 0)
        assert mask.sum() == 1
        i = int(np.nonzero(mask)[0][0])
        assert (den.ex[i], den.ey[i], den.ez[i], den.coef[i]) == (0, 0, 0, 1)

    def test_lam_zero_closed_form(self, maps):
        # only the identity element survives: numerators are the monomials of
        # the logical representatives themselves, X^15, -Y^15, Z^15
        dmap = maps("15-1-3-canonical")
        for r in [(0.3, -0.2, 0.5), (0.9, 0.1, -0.3)]:
            state, p = evaluate(dmap, r, 0.0)
            x, y, z = r
            assert state.expectation("X") == pytest.approx(x ** 15, abs=1e-15)
            assert state.expectation("Y") == pytest.approx(-(y ** 15), abs=1e-15)
            assert state.expectation("Z") == pytest.approx(z ** 15, abs=1e-15)
            assert p == pytest.approx(2.0 ** -14)


class TestEvaluate:
    def test_maximally_mixed_input(self, maps):
        for name in ("15-1-3-canonical", "14-2-2-canonical", "4-2-2"):
            dmap = maps(name)
            for lam in (0.0, 0.4, 1.0):
                state, p = evaluate(dmap, (0, 0, 0), lam)
                assert np.max(np.abs(state.expectations)) == 0.0
                assert p == pytest.approx(2.0 ** -(dmap.code.n - dmap.code.k))

    def test_outside_ball_rejected(self, maps):
        with pytest.raises(ValueError):
            evaluate(maps("4-2-2"), (1.0, 1.0, 0.0), 0.5)

    def test_lambda_range(self, maps):
        with pytest.raises(ValueError):
            evaluate(maps("4-2-2"), (0.1, 0, 0), 1.2)

    def test_success_probability_in_unit_interval(self, maps):
        rng = np.random.default_rng(1)
        dmap = maps("steane-7-1-3")
        for _ in range(25):
            r = rng.normal(size=3)
            r = tuple(0.9 * r / max(1.0, np.linalg.norm(r)))
            _, p = evaluate(dmap, r, float(rng.uniform(0, 1)))
            assert 0.0 < p <= 1.0

    def test_positivity_small_codes(self, maps):
        rng = np.random.default_rng(2)
        for name in ("4-2-2", "5-1-3", "steane-7-1-3"):
            dmap = maps(name)
            for _ in range(10):
                r = rng.normal(size=3)
                r = tuple(0.95 * r / max(1.0, np.linalg.norm(r)))
                state, _ = evaluate(dmap, r, float(rng.uniform(0, 1)))
                if state.k == 1:
                    assert float(np.dot(state.expectations, state.expectations)) <= 1 + 1e-12
                eigs = np.linalg.eigvalsh(state.density_matrix())
                assert eigs.min() > -1e-12

    def test_ideal_reduces_to_projector(self, maps):
        # lam = 1: success = Tr[P rho], via the dense oracle's projective limit
        dmap = maps("4-2-2")
        r = (0.5, -0.3, 0.2)
        _, p = evaluate(dmap, r, 1.0)
        exps, p_oracle = oracle_distill(dmap.code, [r] * 4,
                                        MeasurementModel.raw_lambda(1.0))
        assert p == pytest.approx(p_oracle, abs=1e-14)

    def test_generator_choice_matters_below_ideal(self, maps):
        r = (0.6, 0.58, 0.0)
        can, std = maps("15-1-3-canonical"), maps("15-1-3-standard")
        s1, _ = evaluate(can, r, 1.0)
        s2, _ = evaluate(std, r, 1.0)
        assert np.allclose(s1.expectations, s2.expectations, atol=1e-12)
        s1, _ = evaluate(can, r, 0.5)
        s2, _ = evaluate(std, r, 0.5)
        assert np.max(np.abs(s1.expectations - s2.expectations)) > 1e-3


class TestOracleAgreement:
    STATES = [(0.0, 0.0, 0.0), T, (0.3, -0.4, 0.5), (-0.2, 0.1, 0.7), (0.6, 0.0, 0.0)]

    @pytest.mark.parametrize("name", ["4-2-2", "5-1-3", "steane-7-1-3"])
    @pytest.mark.parametrize("lam", [0.0, 0.3, 0.7, 1.0])
    def test_full_matrix(self, maps, name, lam):
        dmap = maps(name)
        code = dmap.code
        for r in self.STATES:
            state, p = evaluate(dmap, r, lam)
            exps, p_oracle = oracle_distill(code, [r] * code.n,
                                            MeasurementModel.raw_lambda(lam))
            for lb in state.labels:
                assert state.expectation(lb) == pytest.approx(exps[lb], abs=1e-10)
            assert p == pytest.approx(p_oracle, abs=1e-10)


class TestHeterogeneous:
    def test_equal_copies_match_evaluate(self, maps):
        dmap = maps("steane-7-1-3")
        r = (0.4, -0.1, 0.3)
        for lam in (0.0, 0.5, 1.0):
            s1, p1 = evaluate(dmap, r, lam)
            s2, p2 = evaluate_heterogeneous(dmap.code, [r] * 7, lam)
            assert np.allclose(s1.expectations, s2.expectations, atol=1e-14)
            assert p1 == pytest.approx(p2, abs=1e-14)

    def test_single_x_conjugated_copy_vs_oracle(self, maps):
        code = builtin("4-2-2")
        base = (0.5, 0.2, -0.3)
        flipped = (0.5, -0.2, 0.3)
        inputs = [base, flipped, base, base]
        for lam in (1.0, 0.6):
            state, p = evaluate_heterogeneous(code, inputs, lam)
            exps, p_oracle = oracle_distill(code, inputs,
                                            MeasurementModel.raw_lambda(lam))
            for lb in state.labels:
                assert state.expectation(lb) == pytest.approx(exps[lb], abs=1e-12)
            assert p == pytest.approx(p_oracle, abs=1e-12)

    def test_one_maximally_mixed_copy_vs_oracle(self):
        code = builtin("4-2-2")
        inputs = [T, T, (0.0, 0.0, 0.0), T]
        state, p = evaluate_heterogeneous(code, inputs, 1.0)
        exps, p_oracle = oracle_distill(code, inputs, MeasurementModel.raw_lambda(1.0))
        for lb in state.labels:
            assert state.expectation(lb) == pytest.approx(exps[lb], abs=1e-12)
        assert p == pytest.approx(p_oracle, abs=1e-12)

    def test_permutation_covariance(self):
        code = builtin("steane-7-1-3")
        rng = np.random.default_rng(4)
        inputs = []
        for _ in range(7):
            v = rng.normal(size=3)
            v = 0.8 * v / max(1.0, float(np.linalg.norm(v)))
            inputs.append(tuple(v))
        perm = list(rng.permutation(7))
        from msdweak.symplectic import permute_pauli
        permuted_code = StabilizerCode(
            n=7, k=1,
            generators=tuple(permute_pauli(g, perm) for g in code.generators),
            logical_x=tuple(permute_pauli(p, perm) for p in code.logical_x),
            logical_z=tuple(permute_pauli(p, perm) for p in code.logical_z),
            name="permuted-steane")
        # permuted qubit j acts like original qubit perm[j], so the original
        # code must see input j at position perm[j]
        orig_inputs = [None] * 7
        for j in range(7):
            orig_inputs[perm[j]] = inputs[j]
        s1, p1 = evaluate_heterogeneous(code, orig_inputs, 0.7)
        s2, p2 = evaluate_heterogeneous(permuted_code, inputs, 0.7)
        assert np.allclose(s1.expectations, s2.expectations, atol=1e-12)
        assert p1 == pytest.approx(p2, abs=1e-14)

    def test_post_selection_error(self):
        code = loads("2 1 yy\nYY\nLX XX\nLZ YI\n")
        with pytest.raises(PostSelectionError):
            evaluate_heterogeneous(code, [(0, 1, 0), (0, -1, 0)], 1.0)


class TestMarginals:
    def test_k1_identity(self, maps):
        state, _ = evaluate(maps("steane-7-1-3"), (0.2, 0.1, -0.4), 0.8)
        assert state.marginal(0) == (state.expectation("X"),
                                     state.expectation("Y"),
                                     state.expectation("Z"))

    def test_product_state_marginals(self):
        from msdweak.distill import LogicalState
        r = (0.3, -0.5, 0.1)
        labels = logical_labels(2)
        singles = {"I": 1.0, "X": r[0], "Y": r[1], "Z": r[2]}
        exps = np.array([singles[a] * singles[b] for a, b in labels])
        state = LogicalState(2, labels, exps)
        assert state.marginal(0) == pytest.approx(r)
        assert state.marginal(1) == pytest.approx(r)

    def test_14_2_2_symmetric_marginals_at_ideal(self, maps):
        state, _ = evaluate(maps("14-2-2-canonical"), T, 1.0)
        m0, m1 = state.marginal(0), state.marginal(1)
        assert np.allclose(m0, m1, atol=1e-12)
        state, _ = evaluate(maps("14-2-2-canonical"), (0.5, 0.4, 0.1), 1.0)
        assert np.allclose(state.marginal(0), state.marginal(1), atol=1e-12)

    def test_14_2_2_asymmetry_is_reported_below_ideal(self, maps):
        # under imperfect measurements the two logical marginals genuinely
        # drift apart; the iteration reports the spread instead of averaging
        from msdweak.dynamics import RoundMap, iterate
        rmap = RoundMap.create(maps("14-2-2-canonical"), 0.8)
        traj = iterate(rmap, (0.5, 0.4, 0.1), max_iter=5, tol=0)
        assert traj.marginal_asymmetry > 1e-3

    def test_marginal_out_of_range(self, maps):
        state, _ = evaluate(maps("4-2-2"), (0.1, 0.1, 0.1), 0.5)
        with pytest.raises(IndexError):
            state.marginal(2)
