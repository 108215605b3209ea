"""Dense density-matrix verifier for small codes (n <= 10).

Everything here is deliberately brute force: explicit 2^n x 2^n complex
matrices, sequential application of the noisy measurement operators, and
direct traces for the logical expectations.  This path shares nothing with
the merged-monomial map evaluation and is the ground truth for it.
"""

from __future__ import annotations

import itertools

import numpy as np

from .codes import StabilizerCode
from .measurement import MeasurementModel, amplitudes
from .pauli import PauliOperator, multiply, pauli_y_product

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

MAX_ORACLE_QUBITS = 10


class OracleSizeError(ValueError):
    """Dense-oracle size guard exceeded."""


def _guard(n: int):
    if n > MAX_ORACLE_QUBITS:
        raise OracleSizeError(f"dense oracle limited to {MAX_ORACLE_QUBITS} qubits, got {n}")


def dense_pauli(p: PauliOperator) -> np.ndarray:
    """Kronecker-product matrix of i^phase * prod X^x Z^z."""
    _guard(p.n)
    m = np.array([[1.0 + 0j]])
    for q in range(p.n):
        local = np.eye(2, dtype=complex)
        if (p.x_mask >> q) & 1:
            local = _SINGLE["X"] @ local
        if (p.z_mask >> q) & 1:
            local = local @ _SINGLE["Z"]
        m = np.kron(m, local)
    return (1j ** p.phase) * m


def bloch_density(r: tuple[float, float, float]) -> np.ndarray:
    x, y, z = r
    return 0.5 * (_SINGLE["I"] + x * _SINGLE["X"] + y * _SINGLE["Y"] + z * _SINGLE["Z"])


def product_state(bloch_vectors: list[tuple[float, float, float]]) -> np.ndarray:
    rho = np.array([[1.0 + 0j]])
    for r in bloch_vectors:
        rho = np.kron(rho, bloch_density(r))
    return rho


def measurement_operator(g: PauliOperator, model: MeasurementModel, sign: int = +1) -> np.ndarray:
    """Dense M_sign(g) = f1 P_sign + f2 P_-sign."""
    gm = dense_pauli(g)
    dim = gm.shape[0]
    eye = np.eye(dim, dtype=complex)
    p_plus = (eye + gm) / 2
    p_minus = (eye - gm) / 2
    f1, f2 = amplitudes(model, +1)
    if sign == +1:
        return f1 * p_plus + f2 * p_minus
    return f1 * p_minus + f2 * p_plus


def povm_completeness_defect(g: PauliOperator, model: MeasurementModel) -> float:
    mp = measurement_operator(g, model, +1)
    mm = measurement_operator(g, model, -1)
    dim = mp.shape[0]
    defect = mp.conj().T @ mp + mm.conj().T @ mm - np.eye(dim)
    return float(np.max(np.abs(defect)))


def tracked_logicals(code: StabilizerCode) -> list[tuple[str, PauliOperator]]:
    """All 4^k - 1 nontrivial logical Pauli products, with exact signs.

    Y on a logical qubit is i * X_L * Z_L.  Labels are k-letter strings over
    {I, X, Y, Z}, ordered lexicographically in (qubit0, qubit1, ...) with the
    all-identity label skipped.
    """
    n, k = code.n, code.k
    singles = []
    for i in range(k):
        lx, lz = code.logical_x[i], code.logical_z[i]
        singles.append({
            "I": PauliOperator.identity(n),
            "X": lx,
            "Z": lz,
            "Y": pauli_y_product(lx, lz),
        })
    out = []
    for letters in itertools.product("IXYZ", repeat=k):
        if all(c == "I" for c in letters):
            continue
        op = PauliOperator.identity(n)
        for i, c in enumerate(letters):
            op = multiply(op, singles[i][c])
        out.append(("".join(letters), op))
    return out


def oracle_distill(
    code: StabilizerCode,
    bloch_inputs: list[tuple[float, float, float]],
    model: MeasurementModel,
) -> tuple[dict[str, float], float]:
    """Literal simulation: apply M+(g_i) for every generator, post-select.

    Returns ({logical label: expectation}, success probability).
    """
    _guard(code.n)
    if len(bloch_inputs) != code.n:
        raise ValueError(f"need {code.n} Bloch vectors, got {len(bloch_inputs)}")
    rho = product_state(bloch_inputs)
    for g in code.generators:
        m = measurement_operator(g, model, +1)
        rho = m @ rho @ m
    success = float(np.real(np.trace(rho)))
    if success <= 1e-14:
        raise ZeroDivisionError("post-selection probability vanished in the dense oracle")
    expectations = {}
    for label, op in tracked_logicals(code):
        expectations[label] = float(np.real(np.trace(rho @ dense_pauli(op)))) / success
    return expectations, success


def subspace_projector(code: StabilizerCode, syndrome: tuple[int, ...]) -> np.ndarray:
    """prod_i (I + (-1)^{x_i} g_i) / 2 for the given syndrome bit vector."""
    _guard(code.n)
    if len(syndrome) != code.num_generators:
        raise ValueError("syndrome length must equal the generator count")
    dim = 1 << code.n
    proj = np.eye(dim, dtype=complex)
    for bit, g in zip(syndrome, code.generators):
        sgn = -1.0 if bit else 1.0
        proj = proj @ ((np.eye(dim) + sgn * dense_pauli(g)) / 2)
    return proj


def measurement_operator_decomposition_defect(code: StabilizerCode,
                                              model: MeasurementModel) -> float:
    """Check prod_i M+(g_i) == sum_x f1^(m-|x|) f2^|x| P_x, densely."""
    _guard(code.n)
    m = code.num_generators
    f1, f2 = amplitudes(model, +1)
    prod = np.eye(1 << code.n, dtype=complex)
    for g in code.generators:
        prod = prod @ measurement_operator(g, model, +1)
    acc = np.zeros_like(prod)
    for bits in itertools.product((0, 1), repeat=m):
        w = sum(bits)
        acc += (f1 ** (m - w)) * (f2 ** w) * subspace_projector(code, bits)
    return float(np.max(np.abs(prod - acc)))


def theorem_probe_single_flips(
    code: StabilizerCode,
    theta: float,
    model: MeasurementModel,
) -> dict:
    """Single-corrupted-measurement structure probe on an ideal product input.

    Input is |theta> = R_Z(theta)|+> on every qubit.  For each generator the
    weight-one-flipped syndrome subspace is examined: X-type flips must
    annihilate the input; Z-type flips must leave the decoded state equal to
    the input or its logical-X image, classified by whether the flip's
    destabilizer anticommutes with logical Z.  Requires a CSS code whose
    transversal R_Z(theta) preserves the codespace (checked numerically).
    """
    _guard(code.n)
    r = (float(np.cos(theta)), float(np.sin(theta)), 0.0)
    rho_in = product_state([r] * code.n)
    p0 = subspace_projector(code, tuple([0] * code.num_generators))
    commutes_defect = float(np.max(np.abs(
        p0 @ _rz_transversal(code.n, theta) - _rz_transversal(code.n, theta) @ p0)))

    destabs = _generator_destabilizers(code)

    records = []
    for i, g in enumerate(code.generators):
        syndrome = tuple(1 if j == i else 0 for j in range(code.num_generators))
        proj = subspace_projector(code, syndrome)
        sigma = proj @ rho_in @ proj
        weight = float(np.real(np.trace(sigma)))
        gtype = "X" if g.x_mask else "Z"
        rec = {"index": i, "type": gtype, "weight": weight}
        if gtype == "X":
            rec["expected_zero"] = True
        else:
            c = destabs[i]
            cd = dense_pauli(c)
            back = cd @ sigma @ cd
            tr = float(np.real(np.trace(back)))
            bloch = []
            for op in (code.logical_x[0],
                       pauli_y_product(code.logical_x[0], code.logical_z[0]),
                       code.logical_z[0]):
                bloch.append(float(np.real(np.trace(back @ dense_pauli(op)))) / tr)
            from .pauli import commutes as _comm
            rec["logical_flip"] = not _comm(c, code.logical_z[0])
            rec["restored_bloch"] = tuple(bloch)
        records.append(rec)
    return {
        "theta": theta,
        "input_bloch": r,
        "codespace_weight": float(np.real(np.trace(p0 @ rho_in @ p0))),
        "rz_commutation_defect": commutes_defect,
        "flips": records,
    }


def _rz_transversal(n: int, theta: float) -> np.ndarray:
    local = np.diag([np.exp(-1j * theta / 2), np.exp(1j * theta / 2)])
    m = np.array([[1.0 + 0j]])
    for _ in range(n):
        m = np.kron(m, local)
    return m


def _generator_destabilizers(code: StabilizerCode) -> list[PauliOperator]:
    """Per-generator correction operators: anticommute with exactly their own
    generator and commute with every logical operator."""
    from .pauli import commutes as _comm

    out = []
    m = code.num_generators
    logicals = list(code.logical_x) + list(code.logical_z)
    for i, g in enumerate(code.generators):
        found = None
        # search single-qubit then two-qubit pure-type candidates
        for support in _small_supports(code.n):
            for letter in ("Z", "X"):
                x = z = 0
                for q in support:
                    if letter == "X":
                        x |= 1 << q
                    else:
                        z |= 1 << q
                cand = PauliOperator(code.n, x, z, 0)
                sig = [not _comm(cand, gg) for gg in code.generators]
                if sig != [j == i for j in range(m)]:
                    continue
                if all(_comm(cand, L) for L in logicals):
                    found = cand
                    break
            if found:
                break
        if found is None:
            raise ValueError(f"no low-weight destabilizer found for generator {i}; "
                             "use a standard-form generator set")
        out.append(found)
    return out


def _small_supports(n: int, max_weight: int = 3):
    for w in range(1, max_weight + 1):
        yield from itertools.combinations(range(n), w)
