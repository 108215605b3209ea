import numpy as np
import pytest

import msdweak.codes as C
from msdweak.pauli import PauliOperator, commutes
from msdweak.symplectic import (
    ParityCheckMatrix,
    _permute_columns,
    find_qubit_permutation,
    gf2_rowspaces_equal,
)


# Second, independent transcription of the built-in matrices, kept as raw 0/1
# text so a slip in the packaged Pauli strings cannot hide.  Row order: X-type
# then Z-type.

SECOND_TRANSCRIPTION = {
    "15-1-3-canonical": {
        "hx": """101010101010101
                 011001100110011
                 000111100001111
                 000000011111111""",
        "hz": """101010101010101
                 011001100110011
                 000111100001111
                 000000011111111
                 001000100010001
                 000010100000101
                 000001100000011
                 000000000110011
                 000000000001111
                 000000001010101""",
        "lx": ["111111111111111"], "lz": ["111111111111111"],
    },
    "15-1-3-standard": {
        "hx": """100010111011001
                 010001101110011
                 001011100001111
                 000100010111111""",
        "hz": """010110000000001
                 100101000000001
                 111000100000000
                 011000010000001
                 001100001000001
                 101000000100001
                 110100000010000
                 101100000001000
                 110000000000101
                 011100000000010""",
        "lx": ["000011011100101"], "lz": ["111100000000001"],
    },
    "14-2-2-canonical": {
        "hx": """10101011010101
                 01100110110011
                 00011110001111""",
        "hz": """01111000000000
                 10110100000000
                 11010010000000
                 11000001100000
                 10100001010000
                 10010001001000
                 01100000001100
                 00110001000010
                 01010001000001""",
        "lx": ["11111110000000", "00000001111111"],
        "lz": ["11111110000000", "00000001111111"],
    },
    "14-2-2-standard": {
        "hx": """10011110011001
                 01010101110011
                 00101101001111""",
        "hz": """01010000000011
                 00101000000011
                 11100100000000
                 01100010000001
                 11100001000011
                 10100000100001
                 10100000010010
                 11000000001010
                 11000000000101""",
        "lx": ["00000010111111", "00011011100101"],
        "lz": ["01100000000010", "10000000000011"],
    },
}


def _bits(block: str) -> np.ndarray:
    rows = [r.strip() for r in block.strip().splitlines()]
    return np.array([[int(c) for c in r] for r in rows], dtype=np.uint8)


def _support(p: PauliOperator, part: str) -> np.ndarray:
    mask = p.x_mask if part == "x" else p.z_mask
    return np.array([(mask >> q) & 1 for q in range(p.n)], dtype=np.uint8)


class TestTranscription:
    @pytest.mark.parametrize("name", sorted(SECOND_TRANSCRIPTION))
    def test_matches_second_transcription(self, name):
        code = C.builtin(name)
        ref = SECOND_TRANSCRIPTION[name]
        hx, hz = _bits(ref["hx"]), _bits(ref["hz"])
        x_rows = [g for g in code.generators if g.x_mask]
        z_rows = [g for g in code.generators if g.z_mask and not g.x_mask]
        assert len(x_rows) == hx.shape[0] and len(z_rows) == hz.shape[0]
        for row, g in zip(hx, x_rows):
            assert np.array_equal(_support(g, "x"), row), f"{name} X row mismatch"
            assert g.z_mask == 0
        for row, g in zip(hz, z_rows):
            assert np.array_equal(_support(g, "z"), row), f"{name} Z row mismatch"
        for ref_row, op in zip(ref["lx"], code.logical_x):
            assert np.array_equal(_support(op, "x"), _bits(ref_row)[0])
            assert op.z_mask == 0
        for ref_row, op in zip(ref["lz"], code.logical_z):
            assert np.array_equal(_support(op, "z"), _bits(ref_row)[0])
            assert op.x_mask == 0

    def test_15_canonical_z_block_contains_x_block(self):
        code = C.builtin("15-1-3-canonical")
        x_rows = [g for g in code.generators if g.x_mask]
        z_rows = [g for g in code.generators if g.z_mask]
        for xr, zr in zip(x_rows, z_rows[:4]):
            assert xr.x_mask == zr.z_mask


class TestCatalog:
    @pytest.mark.parametrize("name", C.BUILTIN_NAMES)
    def test_builtin_validates(self, name):
        code = C.builtin(name)
        diag = C.validate_code(code)
        assert diag.ok, diag.violations

    def test_unknown_name(self):
        with pytest.raises(C.CodeFormatError):
            C.builtin("12-3-4")

    @pytest.mark.parametrize("name,expected", [
        ("15-1-3-canonical", 3), ("15-1-3-standard", 3),
        ("14-2-2-canonical", 2), ("14-2-2-standard", 2),
        ("4-2-2", 2), ("steane-7-1-3", 3),
    ])
    def test_css_distance(self, name, expected):
        dx, dz, d = C.css_distance(C.builtin(name))
        assert d == expected

    def test_distance_rejects_non_css(self):
        with pytest.raises(C.CodeFormatError):
            C.css_distance(C.builtin("5-1-3"))

    @pytest.mark.parametrize("pair", [
        ("15-1-3-canonical", "15-1-3-standard"),
        ("14-2-2-canonical", "14-2-2-standard"),
    ])
    def test_canonical_standard_group_equality(self, pair):
        a = C.builtin(pair[0]).parity_check()
        b = C.builtin(pair[1]).parity_check()
        perm = find_qubit_permutation(a, b)
        assert perm is not None, f"{pair}: no qubit permutation links the groups"
        assert gf2_rowspaces_equal(
            _permute_columns(a.binary(), list(perm)), b.binary())


class TestFileFormat:
    def test_round_trip(self):
        for name in ("15-1-3-canonical", "4-2-2", "5-1-3"):
            code = C.builtin(name)
            again = C.loads(C.serialize(code))
            assert again.n == code.n and again.k == code.k
            assert again.generators == code.generators
            assert again.logical_x == code.logical_x
            assert again.logical_z == code.logical_z

    def test_load_from_path(self, tmp_path):
        path = tmp_path / "code.txt"
        path.write_text(C.serialize(C.builtin("4-2-2")))
        code = C.load(str(path))
        assert code.n == 4 and code.k == 2

    def test_whitespace_and_comments(self):
        text = """# a comment
        2 1 tiny
        X X            # generator
        LX  XI
        LZ  ZZ
        """
        code = C.loads(text)
        assert code.n == 2 and code.generators[0].x_mask == 0b11

    def test_anticommuting_rows_error(self):
        text = "2 0 bad\nXI\nZI\n"
        with pytest.raises(C.CodeFormatError) as err:
            C.loads(text)
        assert "anticommute" in str(err.value)

    def test_swapped_logicals_pairing_violation(self):
        code = C.builtin("14-2-2-canonical")
        swapped = C.StabilizerCode(
            n=code.n, k=code.k, generators=code.generators,
            logical_x=code.logical_x,
            logical_z=(code.logical_z[1], code.logical_z[0]),
            name="swapped")
        diag = C.validate_code(swapped)
        assert any(v.kind == "logical-pairing" for v in diag.violations)

    def test_logical_replaced_by_stabilizer(self):
        code = C.builtin("steane-7-1-3")
        bad = C.StabilizerCode(
            n=code.n, k=code.k, generators=code.generators,
            logical_x=(code.generators[0],), logical_z=code.logical_z,
            name="bad")
        diag = C.validate_code(bad)
        assert any(v.kind == "logical-pairing" for v in diag.violations)

    def test_duplicate_generator_independence_violation(self):
        code = C.StabilizerCode(
            n=4, k=2,
            generators=(PauliOperator.from_string("XXXX"),
                        PauliOperator.from_string("XXXX")),
            logical_x=(PauliOperator.from_string("XIXI"),
                       PauliOperator.from_string("XXII")),
            logical_z=(PauliOperator.from_string("ZZII"),
                       PauliOperator.from_string("ZIZI")),
            name="dup")
        diag = C.validate_code(code)
        assert any(v.kind == "independence" for v in diag.violations)

    def test_parse_error_carries_line_number(self):
        with pytest.raises(C.CodeFormatError) as err:
            C.loads("2 1 oops\nXQ\nLX XI\nLZ ZZ\n")
        assert "line 2" in str(err.value)

    def test_wrong_counts(self):
        with pytest.raises(C.CodeFormatError):
            C.loads("3 1 short\nXXX\nLX XII\nLZ ZZZ\n")
