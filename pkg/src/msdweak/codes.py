"""Stabilizer-code definitions: built-in catalog, validation, CSS distance,
and the plain-text code file format.

Code file format (whitespace-insensitive, ``#`` comments allowed)::

    n k name
    <one generator Pauli string per line, n-k lines>
    LX <Pauli string>     (k lines)
    LZ <Pauli string>     (k lines)
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliOperator, PauliError, commutes
from .symplectic import (
    ParityCheckMatrix,
    gf2_rank,
    rows_to_binary,
    standard_form,
)


class CodeFormatError(ValueError):
    """Unparseable or invalid code definition text."""


@dataclass(frozen=True)
class CodeViolation:
    kind: str
    message: str


@dataclass(frozen=True)
class CodeDiagnostics:
    violations: tuple[CodeViolation, ...]
    is_css: bool

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class StabilizerCode:
    n: int
    k: int
    generators: tuple[PauliOperator, ...]
    logical_x: tuple[PauliOperator, ...]
    logical_z: tuple[PauliOperator, ...]
    name: str = "custom"
    convention_tag: str = "custom"

    def __post_init__(self):
        if len(self.generators) != self.n - self.k:
            raise CodeFormatError(
                f"{self.name}: expected {self.n - self.k} generators, got {len(self.generators)}")
        if len(self.logical_x) != self.k or len(self.logical_z) != self.k:
            raise CodeFormatError(f"{self.name}: expected {self.k} logical X and Z operators")

    @property
    def num_generators(self) -> int:
        return self.n - self.k

    def parity_check(self) -> ParityCheckMatrix:
        return ParityCheckMatrix(self.generators)


def validate_code(code: StabilizerCode) -> CodeDiagnostics:
    """Structural diagnostics; collects violations instead of raising."""
    v: list[CodeViolation] = []
    gens = code.generators
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if not commutes(gens[i], gens[j]):
                v.append(CodeViolation("commutation", f"generators {i} and {j} anticommute"))
    if gens:
        if gf2_rank(rows_to_binary(list(gens))) != len(gens):
            v.append(CodeViolation("independence", "generator rows are GF(2)-dependent"))
    for tag, ops in (("LX", code.logical_x), ("LZ", code.logical_z)):
        for i, op in enumerate(ops):
            for j, g in enumerate(gens):
                if not commutes(op, g):
                    v.append(CodeViolation(
                        "logical-stabilizer", f"{tag}{i} anticommutes with generator {j}"))
    for i, lx in enumerate(code.logical_x):
        for j, lz in enumerate(code.logical_z):
            anti = not commutes(lx, lz)
            if anti != (i == j):
                want = "anticommute" if i == j else "commute"
                v.append(CodeViolation("logical-pairing", f"LX{i} and LZ{j} should {want}"))
    for i in range(len(code.logical_x)):
        for j in range(i + 1, len(code.logical_x)):
            if not commutes(code.logical_x[i], code.logical_x[j]):
                v.append(CodeViolation("logical-pairing", f"LX{i} and LX{j} anticommute"))
            if not commutes(code.logical_z[i], code.logical_z[j]):
                v.append(CodeViolation("logical-pairing", f"LZ{i} and LZ{j} anticommute"))
    is_css = all(p.x_mask == 0 or p.z_mask == 0 for p in gens)
    return CodeDiagnostics(tuple(v), is_css)


def css_distance(code: StabilizerCode, rank_guard: int = 24) -> tuple[int, int, int]:
    """(d_X, d_Z, d) by exhaustive coset enumeration; CSS codes only."""
    diag = validate_code(code)
    if not diag.is_css:
        raise CodeFormatError(f"{code.name}: css_distance requires a CSS code")

    def min_coset_weight(check_masks: list[int], logical_masks: list[int]) -> int:
        rank = len(check_masks)
        if rank > rank_guard:
            raise CodeFormatError(
                f"{code.name}: rank {rank} exceeds enumeration guard {rank_guard}")
        span = [0]
        for g in check_masks:
            span += [s ^ g for s in span]
        best = code.n + 1
        k = len(logical_masks)
        for v in range(1, 1 << k):
            lmask = 0
            for i in range(k):
                if (v >> i) & 1:
                    lmask ^= logical_masks[i]
            for s in span:
                w = bin(s ^ lmask).count("1")
                if w < best:
                    best = w
        return best

    hx = [g.x_mask for g in code.generators if g.x_mask]
    hz = [g.z_mask for g in code.generators if g.z_mask]
    for tag, ops, pure in (("LX", code.logical_x, "x"), ("LZ", code.logical_z, "z")):
        for op in ops:
            if (op.z_mask if pure == "x" else op.x_mask):
                raise CodeFormatError(
                    f"{code.name}: {tag} representative is not pure-{pure.upper()}")
    d_x = min_coset_weight(hx, [p.x_mask for p in code.logical_x])
    d_z = min_coset_weight(hz, [p.z_mask for p in code.logical_z])
    return d_x, d_z, min(d_x, d_z)


def loads(text: str) -> StabilizerCode:
    """Parse a code definition; errors carry line numbers."""
    lines = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((ln, body))
    if not lines:
        raise CodeFormatError("empty code definition")
    ln, header = lines[0]
    parts = header.split(None, 2)
    if len(parts) < 2:
        raise CodeFormatError(f"line {ln}: header must be 'n k name'")
    try:
        n, k = int(parts[0]), int(parts[1])
    except ValueError:
        raise CodeFormatError(f"line {ln}: n and k must be integers") from None
    name = parts[2].strip() if len(parts) == 3 else "custom"
    gens: list[PauliOperator] = []
    lx: list[PauliOperator] = []
    lz: list[PauliOperator] = []

    def parse_op(ln, s):
        try:
            op = PauliOperator.from_string(s, n)
            if op.sign() != 1:
                raise CodeFormatError(
                    f"line {ln}: signed operators are not allowed in code files")
        except PauliError as exc:
            raise CodeFormatError(f"line {ln}: {exc}") from None
        return op

    for ln, body in lines[1:]:
        upper = body.upper()
        if upper.startswith("LX"):
            lx.append(parse_op(ln, body[2:]))
        elif upper.startswith("LZ"):
            lz.append(parse_op(ln, body[2:]))
        else:
            gens.append(parse_op(ln, body))
    if len(gens) != n - k:
        raise CodeFormatError(f"expected {n - k} generator lines, found {len(gens)}")
    if len(lx) != k or len(lz) != k:
        raise CodeFormatError(f"expected {k} LX and {k} LZ lines, found {len(lx)}/{len(lz)}")
    code = StabilizerCode(n, k, tuple(gens), tuple(lx), tuple(lz), name=name)
    diag = validate_code(code)
    if not diag.ok:
        first = diag.violations[0]
        raise CodeFormatError(f"{name}: validation failed: [{first.kind}] {first.message}"
                              + (f" (+{len(diag.violations) - 1} more)"
                                 if len(diag.violations) > 1 else ""))
    return code


def load(path: str) -> StabilizerCode:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def serialize(code: StabilizerCode) -> str:
    out = [f"{code.n} {code.k} {code.name}"]
    out += [g.to_string(with_sign=False) for g in code.generators]
    out += [f"LX {p.to_string(with_sign=False)}" for p in code.logical_x]
    out += [f"LZ {p.to_string(with_sign=False)}" for p in code.logical_z]
    return "\n".join(out) + "\n"


# --- built-in catalog -------------------------------------------------------
# X/Z support patterns for the two 15-qubit and two 14-qubit protocol code
# variants, plus small codes used by the dense oracle.

def _x(bits: str) -> str:
    return "".join("X" if b == "1" else "I" for b in bits.replace(" ", ""))


def _z(bits: str) -> str:
    return "".join("Z" if b == "1" else "I" for b in bits.replace(" ", ""))


_BUILTINS: dict[str, dict] = {
    "15-1-3-canonical": dict(
        n=15, k=1, tag="canonical",
        gens=[_x("101010101010101"),
              _x("011001100110011"),
              _x("000111100001111"),
              _x("000000011111111"),
              _z("101010101010101"),
              _z("011001100110011"),
              _z("000111100001111"),
              _z("000000011111111"),
              _z("001000100010001"),
              _z("000010100000101"),
              _z("000001100000011"),
              _z("000000000110011"),
              _z("000000000001111"),
              _z("000000001010101")],
        lx=["XXXXXXXXXXXXXXX"],
        lz=["ZZZZZZZZZZZZZZZ"],
    ),
    "15-1-3-standard": dict(
        n=15, k=1, tag="standard",
        gens=[_x("100010111011001"),
              _x("010001101110011"),
              _x("001011100001111"),
              _x("000100010111111"),
              _z("010110000000001"),
              _z("100101000000001"),
              _z("111000100000000"),
              _z("011000010000001"),
              _z("001100001000001"),
              _z("101000000100001"),
              _z("110100000010000"),
              _z("101100000001000"),
              _z("110000000000101"),
              _z("011100000000010")],
        lx=["IIIIXXIXXXIIXIX"],
        lz=["ZZZZIIIIIIIIIIZ"],
    ),
    "14-2-2-canonical": dict(
        n=14, k=2, tag="canonical",
        gens=[_x("10101011010101"),
              _x("01100110110011"),
              _x("00011110001111"),
              _z("01111000000000"),
              _z("10110100000000"),
              _z("11010010000000"),
              _z("11000001100000"),
              _z("10100001010000"),
              _z("10010001001000"),
              _z("01100000001100"),
              _z("00110001000010"),
              _z("01010001000001")],
        lx=["XXXXXXXIIIIIII", "IIIIIIIXXXXXXX"],
        lz=["ZZZZZZZIIIIIII", "IIIIIIIZZZZZZZ"],
    ),
    "14-2-2-standard": dict(
        n=14, k=2, tag="standard",
        gens=[_x("10011110011001"),
              _x("01010101110011"),
              _x("00101101001111"),
              _z("01010000000011"),
              _z("00101000000011"),
              _z("11100100000000"),
              _z("01100010000001"),
              _z("11100001000011"),
              _z("10100000100001"),
              _z("10100000010010"),
              _z("11000000001010"),
              _z("11000000000101")],
        lx=["IIIIIIXIXXXXXX", "IIIXXIXXXIIXIX"],
        lz=["IZZIIIIIIIIIZI", "ZIIIIIIIIIIIZZ"],
    ),
    "4-2-2": dict(
        n=4, k=2, tag="canonical",
        gens=["XXXX", "ZZZZ"],
        lx=["XIXI", "XXII"],
        lz=["ZZII", "ZIZI"],
    ),
    "5-1-3": dict(
        n=5, k=1, tag="canonical",
        gens=["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"],
        lx=["XXXXX"],
        lz=["ZZZZZ"],
    ),
    "steane-7-1-3": dict(
        n=7, k=1, tag="canonical",
        gens=[_x("0001111"),
              _x("0110011"),
              _x("1010101"),
              _z("0001111"),
              _z("0110011"),
              _z("1010101")],
        lx=["XXXXXXX"],
        lz=["ZZZZZZZ"],
    ),
}

BUILTIN_NAMES = tuple(sorted(_BUILTINS))


@functools.lru_cache(maxsize=None)
def builtin(name: str) -> StabilizerCode:
    try:
        spec = _BUILTINS[name]
    except KeyError:
        raise CodeFormatError(
            f"unknown built-in code {name!r}; available: {', '.join(BUILTIN_NAMES)}") from None
    code = StabilizerCode(
        n=spec["n"], k=spec["k"],
        generators=tuple(PauliOperator.from_string(s, spec["n"]) for s in spec["gens"]),
        logical_x=tuple(PauliOperator.from_string(s, spec["n"]) for s in spec["lx"]),
        logical_z=tuple(PauliOperator.from_string(s, spec["n"]) for s in spec["lz"]),
        name=name, convention_tag=spec["tag"],
    )
    diag = validate_code(code)
    if not diag.ok:
        raise CodeFormatError(f"built-in {name} failed validation: {diag.violations}")
    return code


def resolve_code(selector: str) -> StabilizerCode:
    """Accept a built-in name or a path to a code file."""
    if selector in _BUILTINS:
        return builtin(selector)
    import os
    if os.path.exists(selector):
        return load(selector)
    raise CodeFormatError(f"{selector!r} is neither a built-in name nor an existing file")


def standardized(code: StabilizerCode) -> tuple[StabilizerCode, "object"]:
    """Re-derive a code in standard form (own qubit ordering).

    Returns the standard-form code plus the raw StandardFormResult (which
    carries the qubit permutation and destabilizers).
    """
    res = standard_form(code.parity_check())
    new = StabilizerCode(
        n=code.n, k=code.k,
        generators=res.matrix.rows,
        logical_x=res.logical_x,
        logical_z=res.logical_z,
        name=f"{code.name}-standardized",
        convention_tag="standard",
    )
    return new, res


def make_random_css(rng: np.random.Generator, n: int, max_tries: int = 200) -> StabilizerCode:
    """Random valid CSS code with k >= 1; logicals from the standard form."""
    from .symplectic import gf2_nullspace, binary_to_rows

    for _ in range(max_tries):
        rx = int(rng.integers(1, max(2, n - 2)))
        hx = (rng.integers(0, 2, size=(rx, n))).astype(np.uint8)
        if gf2_rank(hx) != rx:
            continue
        null = gf2_nullspace(hx)
        avail = null.shape[0]
        if avail < 2:
            continue
        rz = int(rng.integers(1, avail))
        if n - rx - rz < 1:
            rz = avail - 1
            if n - rx - rz < 1 or rz < 1:
                continue
        combo = rng.integers(0, 2, size=(rz, avail)).astype(np.uint8)
        hz = (combo @ null) % 2
        if gf2_rank(hz) != rz or any(not r.any() for r in hz):
            continue
        full = np.zeros((rx + rz, 2 * n), dtype=np.uint8)
        full[:rx, :n] = hx
        full[rx:, n:] = hz
        try:
            pcm = ParityCheckMatrix(tuple(binary_to_rows(full)))
        except Exception:
            continue
        res = standard_form(pcm)
        code = StabilizerCode(
            n=n, k=n - rx - rz,
            generators=res.matrix.rows,
            logical_x=res.logical_x,
            logical_z=res.logical_z,
            name=f"random-css-{n}", convention_tag="standard",
        )
        if validate_code(code).ok:
            return code
    raise RuntimeError("failed to sample a valid random CSS code")
