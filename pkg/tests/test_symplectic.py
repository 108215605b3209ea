import numpy as np
import pytest

from msdweak.codes import builtin, make_random_css
from msdweak.pauli import PauliOperator, commutes
from msdweak.symplectic import (
    ParityCheckError,
    ParityCheckMatrix,
    _permute_columns,
    binary_to_rows,
    find_qubit_permutation,
    gf2_nullspace,
    gf2_rank,
    gf2_rowspaces_equal,
    gf2_rref,
    rows_to_binary,
    standard_form,
)


def P(s):
    return PauliOperator.from_string(s)


def assert_block_structure(res):
    """Identity blocks in place, zero blocks zero, in the permuted frame."""
    mat = res.matrix.binary()
    m, nn = mat.shape
    n = nn // 2
    r = res.rank_r
    k = n - m
    # X part: [I A1 A2; 0 0 0]
    assert np.array_equal(mat[:r, :r], np.eye(r, dtype=np.uint8))
    assert not mat[r:, :n].any()
    # Z part: [B 0 C; D I E]
    assert not mat[:r, n + r:n + m].any()
    assert np.array_equal(mat[r:, n + r:n + m], np.eye(m - r, dtype=np.uint8))


class TestGF2:
    def test_rref_rank(self):
        mat = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]], dtype=np.uint8)
        assert gf2_rank(mat) == 2

    def test_transform_reproduces(self):
        rng = np.random.default_rng(5)
        mat = rng.integers(0, 2, size=(4, 7)).astype(np.uint8)
        rref, _, t = gf2_rref(mat)
        assert np.array_equal((t @ mat) % 2, rref)

    def test_nullspace(self):
        mat = np.array([[1, 1, 0, 0], [0, 0, 1, 1]], dtype=np.uint8)
        ns = gf2_nullspace(mat)
        assert ns.shape[0] == 2
        assert not ((mat @ ns.T) % 2).any()


class TestParityCheckMatrix:
    def test_rejects_anticommuting(self):
        with pytest.raises(ParityCheckError):
            ParityCheckMatrix((P("XI"), P("ZI")))

    def test_rejects_dependent(self):
        with pytest.raises(ParityCheckError):
            ParityCheckMatrix((P("XX"), P("XX")))

    def test_rejects_phased(self):
        with pytest.raises(ParityCheckError):
            ParityCheckMatrix((PauliOperator.from_string("-XX"),))


class TestStandardForm:
    @pytest.mark.parametrize("name", ["15-1-3-canonical", "14-2-2-canonical",
                                      "15-1-3-standard", "14-2-2-standard",
                                      "4-2-2", "steane-7-1-3", "5-1-3"])
    def test_builtin_block_structure(self, name):
        code = builtin(name)
        res = standard_form(code.parity_check())
        assert_block_structure(res)

    @pytest.mark.parametrize("name", ["15-1-3-standard", "14-2-2-standard"])
    def test_already_standard_identity_permutation(self, name):
        code = builtin(name)
        res = standard_form(code.parity_check())
        assert res.qubit_permutation == tuple(range(code.n))
        assert np.array_equal(res.matrix.binary(), code.parity_check().binary())

    def test_row_transform_reproduces_output(self):
        code = builtin("15-1-3-canonical")
        res = standard_form(code.parity_check())
        permuted = _permute_columns(code.parity_check().binary(),
                                    list(res.qubit_permutation))
        assert np.array_equal((res.row_transform @ permuted) % 2,
                              res.matrix.binary())
        assert gf2_rowspaces_equal(permuted, res.matrix.binary())

    def test_logicals_and_destabilizers(self):
        for name in ["15-1-3-canonical", "14-2-2-canonical", "steane-7-1-3"]:
            code = builtin(name)
            res = standard_form(code.parity_check())
            k = code.k
            gens = res.matrix.rows
            for i, lx in enumerate(res.logical_x):
                assert all(commutes(lx, g) for g in gens)
                for j, lz in enumerate(res.logical_z):
                    assert commutes(lx, lz) == (i != j)
            for lz in res.logical_z:
                assert all(commutes(lz, g) for g in gens)
            # Destabilizers: weight one, distinct supports, anticommute with
            # exactly their own generator, commute with every logical.
            supports = set()
            for i, d in enumerate(res.destabilizers):
                assert d.weight() == 1
                supports.add(d.x_mask | d.z_mask)
                for j, g in enumerate(gens):
                    assert commutes(d, g) == (i != j)
                for L in list(res.logical_x) + list(res.logical_z):
                    assert commutes(d, L)
            assert len(supports) == len(res.destabilizers)

    def test_destabilizers_avoid_conjugate_logical_support(self):
        # Z-type destabilizers sit where no logical has X/Y support and
        # X-type destabilizers where no logical has Z/Y support.
        for name in ["15-1-3-canonical", "14-2-2-canonical"]:
            code = builtin(name)
            res = standard_form(code.parity_check())
            logicals = list(res.logical_x) + list(res.logical_z)
            for d in res.destabilizers:
                if d.z_mask:  # pure Z destabilizer
                    assert all(L.x_mask & d.z_mask == 0 for L in logicals)
                else:
                    assert all(L.z_mask & d.x_mask == 0 for L in logicals)

    def test_rank_deficient_layouts(self):
        # pure-Z code: r = 0
        res = standard_form(ParityCheckMatrix((P("ZZI"), P("IZZ"))))
        assert res.rank_r == 0
        assert_block_structure(res)
        # pure-X code: r = m
        res = standard_form(ParityCheckMatrix((P("XXI"), P("IXX"))))
        assert res.rank_r == 2
        assert_block_structure(res)

    def test_seeded_random_css(self):
        rng = np.random.default_rng(2024)
        for _ in range(25):
            n = int(rng.integers(5, 13))
            code = make_random_css(rng, n)
            res = standard_form(code.parity_check())
            assert_block_structure(res)
            for i, d in enumerate(res.destabilizers):
                assert d.weight() == 1
                for j, g in enumerate(res.matrix.rows):
                    assert commutes(d, g) == (i != j)


class TestPermutationSearch:
    def test_identity_when_equal(self):
        code = builtin("4-2-2")
        perm = find_qubit_permutation(code.parity_check(), code.parity_check())
        assert perm == tuple(range(4))

    def test_recovers_planted_permutation(self):
        code = builtin("steane-7-1-3")
        pcm = code.parity_check()
        rng = np.random.default_rng(9)
        planted = list(rng.permutation(7))
        moved = ParityCheckMatrix(tuple(binary_to_rows(
            _permute_columns(pcm.binary(), planted))))
        perm = find_qubit_permutation(pcm, moved)
        assert perm is not None
        assert gf2_rowspaces_equal(
            _permute_columns(pcm.binary(), list(perm)), moved.binary())

    def test_none_for_different_groups(self):
        a = builtin("4-2-2").parity_check()
        b = ParityCheckMatrix((P("XXII"), P("ZZII")))
        assert find_qubit_permutation(a, b) is None
