"""Bit-packed n-qubit Pauli operators with exact phase tracking.

An operator is stored as ``i**phase * prod_q X_q**x_q * Z_q**z_q`` where
``x`` and ``z`` are n-bit integers (qubit 0 = least significant bit) and
the per-qubit convention is X-before-Z, i.e. the qubit with both bits set
contributes the matrix X@Z = -iY.  All products, commutators and weights
are computed on the bitmasks; the dense-matrix oracle uses the same
convention so phases can be compared bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

_CHAR_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_CHAR = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


class PauliError(ValueError):
    """Malformed Pauli input or size mismatch."""


@dataclass(frozen=True)
class PauliOperator:
    """Immutable n-qubit Pauli: i**phase * X^x_mask * Z^z_mask."""

    n: int
    x_mask: int
    z_mask: int
    phase: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise PauliError(f"qubit count must be positive, got {self.n}")
        mask = (1 << self.n) - 1
        if self.x_mask & ~mask or self.z_mask & ~mask:
            raise PauliError("mask has support outside the declared qubit count")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n, 0, 0, 0)

    @classmethod
    def from_string(cls, s: str, n: int | None = None) -> "PauliOperator":
        """Parse e.g. 'XIZ', '-YY', 'iXZ'.  Leftmost letter is qubit 0."""
        s = "".join(s.split())
        phase = 0
        if s.startswith("+"):
            s = s[1:]
        if s.startswith("-"):
            phase = 2
            s = s[1:]
        if s.startswith("i"):
            phase += 1
            s = s[1:]
        if not s:
            raise PauliError("empty Pauli string")
        if n is not None and len(s) != n:
            raise PauliError(f"expected {n} qubits, got {len(s)}")
        x = z = 0
        for q, ch in enumerate(s):
            try:
                bx, bz = _CHAR_TO_BITS[ch]
            except KeyError:
                raise PauliError(f"invalid Pauli letter {ch!r} at position {q}") from None
            x |= bx << q
            z |= bz << q
            # letter Y stands for i*XZ: fold the i into the phase exponent
            phase += bx & bz
        return cls(len(s), x, z, phase % 4)

    def to_string(self, with_sign: bool = True) -> str:
        letters = []
        y_count = 0
        for q in range(self.n):
            bx = (self.x_mask >> q) & 1
            bz = (self.z_mask >> q) & 1
            y_count += bx & bz
            letters.append(_BITS_TO_CHAR[(bx, bz)])
        body = "".join(letters)
        if not with_sign:
            return body
        return ["", "i", "-", "-i"][(self.phase - y_count) % 4] + body

    def __str__(self) -> str:
        return self.to_string()

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0 and self.phase == 0

    @property
    def is_hermitian(self) -> bool:
        # i^phase X^x Z^z is Hermitian iff phase parity matches the XZ overlap
        return (self.phase - bin(self.x_mask & self.z_mask).count("1")) % 2 == 0

    def sign(self) -> int:
        """+1 or -1 prefactor relative to the {I,X,Y,Z} letter string.

        Raises for non-Hermitian operators (imaginary prefactor).
        """
        k = (self.phase - bin(self.x_mask & self.z_mask).count("1")) % 4
        if k == 0:
            return 1
        if k == 2:
            return -1
        raise PauliError(f"operator {self.n}-qubit (x={self.x_mask:#x}, z={self.z_mask:#x}, "
                         f"phase={self.phase}) has imaginary prefactor")

    def weight(self) -> int:
        return bin(self.x_mask | self.z_mask).count("1")

    def weight_profile(self) -> tuple[int, int, int]:
        """(wX, wY, wZ): counts of qubits with X-only, X-and-Z, Z-only support."""
        both = self.x_mask & self.z_mask
        wx = bin(self.x_mask & ~both).count("1")
        wy = bin(both).count("1")
        wz = bin(self.z_mask & ~both).count("1")
        return wx, wy, wz

    def negate(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x_mask, self.z_mask, self.phase + 2)

    def times_i(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x_mask, self.z_mask, self.phase + 1)

    def restrict_letter(self, q: int) -> str:
        """Single-qubit letter at position q (sign ignored)."""
        bx = (self.x_mask >> q) & 1
        bz = (self.z_mask >> q) & 1
        return _BITS_TO_CHAR[(bx, bz)]


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Exact operator product a*b (phase included)."""
    if a.n != b.n:
        raise PauliError(f"size mismatch: {a.n} vs {b.n} qubits")
    # moving Z^za past X^xb costs (-1) per overlapping qubit
    swaps = bin(a.z_mask & b.x_mask).count("1")
    return PauliOperator(
        a.n,
        a.x_mask ^ b.x_mask,
        a.z_mask ^ b.z_mask,
        (a.phase + b.phase + 2 * swaps) % 4,
    )


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    """True iff the symplectic product <a.x,b.z> + <a.z,b.x> vanishes mod 2."""
    if a.n != b.n:
        raise PauliError(f"size mismatch: {a.n} vs {b.n} qubits")
    t = bin(a.x_mask & b.z_mask).count("1") + bin(a.z_mask & b.x_mask).count("1")
    return t % 2 == 0


def weight_profile(p: PauliOperator) -> tuple[int, int, int]:
    return p.weight_profile()


def pauli_y_product(logical_x: PauliOperator, logical_z: PauliOperator) -> PauliOperator:
    """Logical Y representative: i * X_L * Z_L (phase folded into the operator)."""
    return multiply(logical_x, logical_z).times_i()
