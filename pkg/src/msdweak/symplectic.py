"""GF(2) parity-check matrices and the standard-form reduction.

A parity-check matrix is the sign-free binary view [H_X | H_Z] of a set of
commuting, independent stabilizer generators.  Row operations are generator
products at the binary level; column operations are qubit relabelings.  The
standard form is the row-reduced, column-permuted layout

    [ I A1 A2 | B 0 C ]      (r rows,   r = rank of H_X)
    [ 0 0  0  | D I E ]      (m-r rows, column blocks r / m-r / k)

from which logical operators and weight-one destabilizers read off directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliOperator, PauliError, commutes


class ParityCheckError(ValueError):
    """Rows fail the parity-check contract (dependence, non-commutation)."""


def rows_to_binary(rows: list[PauliOperator]) -> np.ndarray:
    """Stack rows as an m x 2n binary matrix [X | Z]."""
    n = rows[0].n
    out = np.zeros((len(rows), 2 * n), dtype=np.uint8)
    for i, p in enumerate(rows):
        for q in range(n):
            out[i, q] = (p.x_mask >> q) & 1
            out[i, n + q] = (p.z_mask >> q) & 1
    return out


def binary_to_rows(mat: np.ndarray) -> list[PauliOperator]:
    """Rows as +1 Hermitian operators (phase exponent = Y-letter count)."""
    m, nn = mat.shape
    n = nn // 2
    rows = []
    for i in range(m):
        x = z = 0
        for q in range(n):
            x |= int(mat[i, q]) << q
            z |= int(mat[i, n + q]) << q
        rows.append(PauliOperator(n, x, z, bin(x & z).count("1") % 4))
    return rows


def gf2_rref(mat: np.ndarray, cols: range | None = None) -> tuple[np.ndarray, list[int], np.ndarray]:
    """Reduced row echelon form over GF(2).

    Pivots are chosen leftmost-first within `cols` (all columns by default).
    Returns (rref, pivot_columns, transform) with transform @ mat == rref
    over GF(2).
    """
    a = mat.copy() % 2
    m = a.shape[0]
    t = np.eye(m, dtype=np.uint8)
    pivots: list[int] = []
    row = 0
    for c in cols if cols is not None else range(a.shape[1]):
        hit = np.nonzero(a[row:, c])[0]
        if hit.size == 0:
            continue
        pr = row + hit[0]
        if pr != row:
            a[[row, pr]] = a[[pr, row]]
            t[[row, pr]] = t[[pr, row]]
        others = np.nonzero(a[:, c])[0]
        for r in others:
            if r != row:
                a[r] ^= a[row]
                t[r] ^= t[row]
        pivots.append(c)
        row += 1
        if row == m:
            break
    return a, pivots, t


def gf2_rank(mat: np.ndarray) -> int:
    if mat.size == 0:
        return 0
    return len(gf2_rref(mat)[1])


def gf2_rowspace_contains(basis: np.ndarray, v: np.ndarray) -> bool:
    if basis.size == 0:
        return not v.any()
    stacked = np.vstack([basis, v % 2])
    return gf2_rank(stacked) == gf2_rank(basis)


def gf2_rowspaces_equal(a: np.ndarray, b: np.ndarray) -> bool:
    ra, rb = gf2_rank(a), gf2_rank(b)
    if ra != rb:
        return False
    return gf2_rank(np.vstack([a, b])) == ra


def gf2_solve(mat: np.ndarray, rhs: np.ndarray) -> np.ndarray | None:
    """One particular solution of mat @ v = rhs over GF(2), or None."""
    m, n = mat.shape
    aug = np.concatenate([mat % 2, (rhs % 2).reshape(-1, 1)], axis=1)
    rref, pivots, _ = gf2_rref(aug)
    if n in pivots:
        return None  # inconsistent system
    v = np.zeros(n, dtype=np.uint8)
    for row, c in enumerate(pivots):
        v[c] = rref[row, n]
    return v


def gf2_nullspace(mat: np.ndarray) -> np.ndarray:
    """Basis (rows) of {v : mat @ v = 0 mod 2}."""
    m, n = mat.shape
    rref, pivots, _ = gf2_rref(mat)
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for prow, pc in enumerate(pivots):
            if rref[prow, fc]:
                basis[i, pc] = 1
    return basis


@dataclass(frozen=True)
class ParityCheckMatrix:
    """Commuting, GF(2)-independent generator rows (all with + sign)."""

    rows: tuple[PauliOperator, ...]

    def __post_init__(self):
        if not self.rows:
            raise ParityCheckError("no rows")
        n = self.rows[0].n
        for i, p in enumerate(self.rows):
            if p.n != n:
                raise ParityCheckError(f"row {i} acts on {p.n} qubits, expected {n}")
            try:
                sign = p.sign()
            except PauliError:
                raise ParityCheckError(f"row {i} has an imaginary prefactor") from None
            if sign != 1:
                raise ParityCheckError(f"row {i} carries a sign; rows must be +1 operators")
        for i in range(len(self.rows)):
            for j in range(i + 1, len(self.rows)):
                if not commutes(self.rows[i], self.rows[j]):
                    raise ParityCheckError(f"rows {i} and {j} anticommute")
        if gf2_rank(rows_to_binary(list(self.rows))) != len(self.rows):
            raise ParityCheckError("rows are GF(2)-dependent")

    @property
    def n(self) -> int:
        return self.rows[0].n

    @property
    def m(self) -> int:
        return len(self.rows)

    def binary(self) -> np.ndarray:
        return rows_to_binary(list(self.rows))


@dataclass(frozen=True)
class StandardFormResult:
    matrix: ParityCheckMatrix
    qubit_permutation: tuple[int, ...]   # new position j holds original qubit qubit_permutation[j]
    rank_r: int
    logical_x: tuple[PauliOperator, ...]
    logical_z: tuple[PauliOperator, ...]
    destabilizers: tuple[PauliOperator, ...]
    row_transform: np.ndarray = field(repr=False)  # transform @ permuted(input) == output over GF(2)

    @property
    def k(self) -> int:
        return self.matrix.n - self.matrix.m


def _permute_columns(mat: np.ndarray, perm: list[int]) -> np.ndarray:
    """Apply qubit permutation to an [X|Z] matrix: new col j <- old col perm[j]."""
    n = mat.shape[1] // 2
    idx = list(perm) + [n + p for p in perm]
    return mat[:, idx]


def standard_form(H: ParityCheckMatrix) -> StandardFormResult:
    """Row-reduce to standard form; extract logicals and destabilizers.

    Pivoting uses the leftmost available column and records the qubit
    permutation explicitly.  Rank-deficient H_X (r = 0 or r = m) degenerates
    to empty identity blocks.
    """
    n, m = H.n, H.m
    k = n - m
    a = H.binary()

    # phase 1: RREF the X block, pivot columns move to the front
    _, xpivots, _ = gf2_rref(a[:, :n])
    r = len(xpivots)
    perm = list(xpivots) + [c for c in range(n) if c not in xpivots]
    a = _permute_columns(a, perm)
    a, _, t1 = gf2_rref(a, cols=range(r))  # re-run on permuted matrix to track transform
    # rows with nonzero X part are now the top r rows in RREF form [I A1 A2]

    # phase 2: RREF the Z part of the bottom rows within columns r..n-1
    t2 = np.eye(m, dtype=np.uint8)
    if m - r > 0:
        sub = a[r:, :]
        _, zpivots, _ = gf2_rref(sub[:, n + r:2 * n])
        zpivots = [n + r + c for c in zpivots]
        if len(zpivots) != m - r:
            raise ParityCheckError("bottom rows dependent within allowed pivot columns")
        mid = [c - n for c in zpivots]
        perm2 = list(range(r)) + mid + [c for c in range(r, n) if c not in mid]
        a = _permute_columns(a, perm2)
        perm = [perm[p] for p in perm2]
        a2, _, tsub = gf2_rref(a[r:, :], cols=range(n + r, n + m))
        a = np.vstack([a[:r], a2]) if r > 0 else a2
        t2[r:, r:] = tsub

    # phase 3: clear the middle Z block of the top rows using bottom rows
    t3 = np.eye(m, dtype=np.uint8)
    for i in range(r):
        for j in range(m - r):
            if a[i, n + r + j]:
                a[i] ^= a[r + j]
                t3[i] ^= t3[r + j]

    transform = (t3 @ (t2 @ t1 % 2)) % 2
    out = ParityCheckMatrix(tuple(binary_to_rows(a)))

    # block views (columns r | m-r | k, X part then Z part)
    a1 = a[:r, r:m]
    a2 = a[:r, m:n]
    c_blk = a[:r, n + m:2 * n]
    e_blk = a[r:, n + m:2 * n]

    # logicals: L_X = [0 E^T I | C^T 0 0], L_Z = [0 0 0 | A2^T 0 I]
    lx = np.zeros((k, 2 * n), dtype=np.uint8)
    lz = np.zeros((k, 2 * n), dtype=np.uint8)
    for i in range(k):
        lx[i, r:m] = e_blk[:, i] if m - r > 0 else 0
        lx[i, m + i] = 1
        lx[i, n:n + r] = c_blk[:, i] if r > 0 else 0
        lz[i, n:n + r] = a2[:, i] if r > 0 else 0
        lz[i, n + m + i] = 1
    logical_x = tuple(binary_to_rows(lx))
    logical_z = tuple(binary_to_rows(lz))

    # destabilizers: Z_i for the X-block rows, X_i for the Z-block rows
    destabs = []
    for i in range(m):
        if i < r:
            destabs.append(PauliOperator(n, 0, 1 << i, 0))
        else:
            destabs.append(PauliOperator(n, 1 << i, 0, 0))

    return StandardFormResult(
        matrix=out,
        qubit_permutation=tuple(perm),
        rank_r=r,
        logical_x=logical_x,
        logical_z=logical_z,
        destabilizers=tuple(destabs),
        row_transform=transform,
    )


def permute_pauli(p: PauliOperator, perm: list[int] | tuple[int, ...]) -> PauliOperator:
    """Relabel qubits: new qubit j carries the letter of original qubit perm[j]."""
    x = z = 0
    for j, old in enumerate(perm):
        x |= ((p.x_mask >> old) & 1) << j
        z |= ((p.z_mask >> old) & 1) << j
    return PauliOperator(p.n, x, z, p.phase)


def _gl2_matrices(r: int):
    """All invertible r x r matrices over GF(2) (guarded to r <= 4)."""
    if r > 4:
        raise ValueError("GL enumeration guarded to rank <= 4")
    total = 1 << (r * r)
    for bits in range(total):
        mat = np.array([[(bits >> (i * r + j)) & 1 for j in range(r)] for i in range(r)],
                       dtype=np.uint8)
        if gf2_rank(mat) == r:
            yield mat


def find_qubit_permutation(pcm_a: ParityCheckMatrix, pcm_b: ParityCheckMatrix,
                           assignment_budget: int = 10 ** 6) -> tuple[int, ...] | None:
    """Qubit permutation mapping the group of pcm_a onto the group of pcm_b.

    Column-matching search: for each basis change T of the X row space of a,
    columns of T@H_X(a) are matched by value against H_X(b)'s columns; the
    induced permutations (enumerated within equal-value groups) are accepted
    when the full symplectic row spaces coincide.  Returns the permutation in
    the convention of permute_pauli (new qubit j <- old qubit perm[j]), or
    None if no permutation links the two groups.
    """
    n = pcm_a.n
    if pcm_b.n != n or pcm_a.m != pcm_b.m:
        return None
    ba, bb = pcm_a.binary(), pcm_b.binary()
    if gf2_rowspaces_equal(ba, bb):
        return tuple(range(n))

    ax, _, _ = gf2_rref(ba[:, :n])
    bx, _, _ = gf2_rref(bb[:, :n])
    r = gf2_rank(ax)
    if gf2_rank(bx) != r or r > 4:
        return None
    ax, bx = ax[:r], bx[:r]

    def col_key(mat, j):
        return tuple(int(v) for v in mat[:, j])

    b_groups: dict[tuple, list[int]] = {}
    for j in range(n):
        b_groups.setdefault(col_key(bx, j), []).append(j)

    from itertools import permutations as _perms

    for t in _gl2_matrices(r):
        tax = (t @ ax) % 2
        a_groups: dict[tuple, list[int]] = {}
        for j in range(n):
            a_groups.setdefault(col_key(tax, j), []).append(j)
        if set(a_groups) != set(b_groups):
            continue
        if any(len(a_groups[kk]) != len(b_groups[kk]) for kk in a_groups):
            continue
        combos = 1
        for kk in a_groups:
            f = 1
            for v in range(2, len(a_groups[kk]) + 1):
                f *= v
            combos *= f
        if combos > assignment_budget:
            continue
        keys = sorted(a_groups)
        group_perms = [list(_perms(a_groups[kk])) for kk in keys]

        def assemble(choice):
            perm = [0] * n
            for kk, order in zip(keys, choice):
                for src, dst in zip(order, b_groups[kk]):
                    perm[dst] = src
            return perm

        from itertools import product as _product
        for choice in _product(*group_perms):
            perm = assemble(choice)
            moved = _permute_columns(ba, perm)
            if gf2_rowspaces_equal(moved, bb):
                return tuple(perm)
    return None
