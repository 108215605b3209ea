"""Compile a stabilizer code into its exact distillation map and evaluate it.

The post-selected update of the logical Pauli expectations is a ratio of
polynomials in the per-copy Bloch coordinates (x, y, z) and the measurement
coefficient lam:

    <P_L>_out = N_P(x,y,z; lam) / D(x,y,z; lam)

    D   = sum_j  sign(s_j)       * lam^gamma_j * x^wX_j  y^wY_j  z^wZ_j
    N_P = sum_j  sign(s_j * P_L) * lam^gamma_j * x^w~X_j y^w~Y_j z^w~Z_j

where the sum runs over all 2^(n-k) stabilizer elements s_j, gamma_j counts
the generators composing s_j, the weights are the X/Y/Z letter counts of the
element (numerator: of s_j * P_L), and every sign is the exact Hermitian
prefactor from the bit-level Pauli product.  Terms with equal exponents are
merged into integer coefficients at build time, so evaluation and the
analytic derivatives stay exact-arithmetic shaped.  The success probability
of post-selecting all +1 outcomes is D / 2^(n-k).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .codes import StabilizerCode
from .pauli import PauliOperator, PauliError, multiply, pauli_y_product

MAX_GROUP_GENERATORS = 28


class GroupSizeError(ValueError):
    """2^(n-k) enumeration guard exceeded."""


class PostSelectionError(ArithmeticError):
    """Post-selection denominator vanished (success probability ~ 0)."""


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Integer-coefficient monomials  coef * lam^g * x^ex * y^ey * z^ez."""

    g: np.ndarray
    ex: np.ndarray
    ey: np.ndarray
    ez: np.ndarray
    coef: np.ndarray

    @classmethod
    def from_terms(cls, terms: dict[tuple[int, int, int, int], int]) -> "Polynomial":
        items = sorted((k, v) for k, v in terms.items() if v != 0)
        if not items:
            return cls(*(np.zeros(0, dtype=np.int64) for _ in range(5)))
        keys = np.array([k for k, _ in items], dtype=np.int64)
        coef = np.array([v for _, v in items], dtype=np.int64)
        return cls(keys[:, 0], keys[:, 1], keys[:, 2], keys[:, 3], coef)

    def eval_tables(self, lt: np.ndarray, xt: np.ndarray, yt: np.ndarray,
                    zt: np.ndarray) -> float:
        if self.coef.size == 0:
            return 0.0
        return float(np.dot(self.coef,
                            lt[self.g] * xt[self.ex] * yt[self.ey] * zt[self.ez]))

    def derivative(self, axis: int) -> "Polynomial":
        """Exact partial derivative; axis 0/1/2 = x/y/z."""
        exp = (self.ex, self.ey, self.ez)[axis]
        keep = exp > 0
        if not keep.any():
            return Polynomial.from_terms({})
        es = [self.ex[keep].copy(), self.ey[keep].copy(), self.ez[keep].copy()]
        coef = self.coef[keep] * es[axis]
        es[axis] = es[axis] - 1
        return Polynomial(self.g[keep].copy(), es[0], es[1], es[2], coef)

    @property
    def max_exponent(self) -> int:
        if self.coef.size == 0:
            return 0
        return int(max(self.ex.max(), self.ey.max(), self.ez.max()))

    @property
    def max_gamma(self) -> int:
        return 0 if self.coef.size == 0 else int(self.g.max())


@dataclass(frozen=True, eq=False)
class LogicalState:
    """Expectations of all nontrivial logical Pauli products.

    Labels are k-letter strings over {I,X,Y,Z} in lexicographic product
    order with the all-identity label omitted (length 4^k - 1)."""

    k: int
    labels: tuple[str, ...]
    expectations: np.ndarray

    def expectation(self, label: str) -> float:
        return float(self.expectations[self.labels.index(label)])

    def marginal(self, which: int = 0) -> tuple[float, float, float]:
        if not 0 <= which < self.k:
            raise IndexError(f"logical qubit {which} out of range for k={self.k}")
        out = []
        for letter in "XYZ":
            label = "".join(letter if i == which else "I" for i in range(self.k))
            out.append(self.expectation(label))
        return tuple(out)

    def density_matrix(self) -> np.ndarray:
        """Dense k-qubit state (k <= 3); for positivity checks in tests."""
        if self.k > 3:
            raise ValueError("density_matrix limited to k <= 3")
        from .oracle import _SINGLE
        dim = 1 << self.k
        rho = np.eye(dim, dtype=complex)
        for label, e in zip(self.labels, self.expectations):
            op = np.array([[1.0 + 0j]])
            for c in label:
                op = np.kron(op, _SINGLE[c])
            rho = rho + e * op
        return rho / dim


def logical_labels(k: int) -> tuple[str, ...]:
    return tuple("".join(p) for p in itertools.product("IXYZ", repeat=k)
                 if any(c != "I" for c in p))


def logical_product_operators(code: StabilizerCode) -> dict[str, PauliOperator]:
    """n-qubit representatives of every tracked logical product, exact signs."""
    singles = []
    for i in range(code.k):
        lx, lz = code.logical_x[i], code.logical_z[i]
        singles.append({"I": PauliOperator.identity(code.n), "X": lx, "Z": lz,
                        "Y": pauli_y_product(lx, lz)})
    ops = {}
    for label in logical_labels(code.k):
        op = PauliOperator.identity(code.n)
        for i, c in enumerate(label):
            op = multiply(op, singles[i][c])
        ops[label] = op
    return ops


def enumerate_group(code: StabilizerCode):
    """Yield (gamma_j, element) over all 2^(n-k) stabilizer elements.

    Subsets of the (independent) generators are walked in Gray-code order so
    each step is a single Pauli multiplication.  Raises if any element
    acquires an imaginary phase, which would mean the generator set is not a
    valid stabilizer group.
    """
    m = code.num_generators
    if m > MAX_GROUP_GENERATORS:
        raise GroupSizeError(f"2^{m} stabilizer elements exceed the enumeration guard")
    current = PauliOperator.identity(code.n)
    yield 0, current
    prev_gray = 0
    for idx in range(1, 1 << m):
        gray = idx ^ (idx >> 1)
        flip = (gray ^ prev_gray).bit_length() - 1
        prev_gray = gray
        current = multiply(current, code.generators[flip])
        if not current.is_hermitian:
            raise PauliError(
                f"stabilizer element {gray:#x} of {code.name} has imaginary phase; "
                "the generator set does not define a valid code")
        yield bin(gray).count("1"), current


@dataclass(frozen=True, eq=False)
class DistillationMap:
    code: StabilizerCode
    labels: tuple[str, ...]
    denominator: Polynomial
    numerators: dict[str, Polynomial]
    denominator_derivs: tuple[Polynomial, Polynomial, Polynomial] = field(repr=False)
    numerator_derivs: dict[str, tuple[Polynomial, Polynomial, Polynomial]] = field(repr=False)

    @property
    def k(self) -> int:
        return self.code.k

    @property
    def num_generators(self) -> int:
        return self.code.num_generators

    def power_tables(self, r, lam):
        x, y, z = (float(v) for v in r)
        me = self.code.n + 1
        mg = self.num_generators + 1
        lt = np.power(float(lam), np.arange(mg))
        xt = np.power(x, np.arange(me))
        yt = np.power(y, np.arange(me))
        zt = np.power(z, np.arange(me))
        return lt, xt, yt, zt


def build_map(code: StabilizerCode) -> DistillationMap:
    """Enumerate the group once; merge terms into lam-independent tables."""
    label_ops = logical_product_operators(code)
    labels = logical_labels(code.k)
    d_terms: dict[tuple[int, int, int, int], int] = {}
    n_terms: dict[str, dict[tuple[int, int, int, int], int]] = {lb: {} for lb in labels}
    for gamma, s in enumerate_group(code):
        wx, wy, wz = s.weight_profile()
        key = (gamma, wx, wy, wz)
        d_terms[key] = d_terms.get(key, 0) + s.sign()
        for lb in labels:
            prod = multiply(s, label_ops[lb])
            pwx, pwy, pwz = prod.weight_profile()
            pkey = (gamma, pwx, pwy, pwz)
            n_terms[lb][pkey] = n_terms[lb].get(pkey, 0) + prod.sign()
    den = Polynomial.from_terms(d_terms)
    nums = {lb: Polynomial.from_terms(t) for lb, t in n_terms.items()}
    return DistillationMap(
        code=code,
        labels=labels,
        denominator=den,
        numerators=nums,
        denominator_derivs=tuple(den.derivative(a) for a in range(3)),
        numerator_derivs={lb: tuple(p.derivative(a) for a in range(3))
                          for lb, p in nums.items()},
    )


def _check_inputs(r, lam):
    x, y, z = r
    if x * x + y * y + z * z > 1.0 + 1e-9:
        raise ValueError(f"Bloch vector {r} lies outside the unit ball")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")


def evaluate(dmap: DistillationMap, r, lam: float) -> tuple[LogicalState, float]:
    """One distillation round on n identical copies with Bloch vector r."""
    _check_inputs(r, lam)
    lt, xt, yt, zt = dmap.power_tables(r, lam)
    den = dmap.denominator.eval_tables(lt, xt, yt, zt)
    if den <= 1e-14:
        raise PostSelectionError(
            f"post-selection undefined: denominator {den:.3e} at r={tuple(r)}, lam={lam}")
    exps = np.array([dmap.numerators[lb].eval_tables(lt, xt, yt, zt) / den
                     for lb in dmap.labels])
    success = den / float(2 ** dmap.num_generators)
    return LogicalState(dmap.k, dmap.labels, exps), success


def evaluate_heterogeneous(
    code: StabilizerCode,
    bloch_inputs,
    lam: float,
    labels: tuple[str, ...] | None = None,
) -> tuple[LogicalState, float]:
    """Map-free evaluation with one Bloch vector per physical qubit.

    Each term's monomial becomes a per-qubit product of letter expectations
    (<I>=1, <X>=x_q, <Y>=y_q, <Z>=z_q), which covers single-copy
    perturbation probes.  Independent of the merged-monomial tables.
    """
    if len(bloch_inputs) != code.n:
        raise ValueError(f"need {code.n} Bloch vectors, got {len(bloch_inputs)}")
    for r in bloch_inputs:
        _check_inputs(r, lam)
    if labels is None:
        labels = logical_labels(code.k)
    label_ops = logical_product_operators(code)

    # column index bx + 2*bz: 0 = I, 1 = X, 2 = Z, 3 = Y
    exp_table = np.ones((code.n, 4))
    for q, (x, y, z) in enumerate(bloch_inputs):
        exp_table[q, 1] = x
        exp_table[q, 2] = z
        exp_table[q, 3] = y

    def string_expectation(p: PauliOperator) -> float:
        acc = 1.0
        for q in range(code.n):
            bx = (p.x_mask >> q) & 1
            bz = (p.z_mask >> q) & 1
            if bx or bz:
                acc *= exp_table[q, bx + 2 * bz]
        return acc

    den = 0.0
    nums = {lb: 0.0 for lb in labels}
    for gamma, s in enumerate_group(code):
        w = lam ** gamma
        den += w * s.sign() * string_expectation(s)
        for lb in labels:
            prod = multiply(s, label_ops[lb])
            nums[lb] += w * prod.sign() * string_expectation(prod)
    if den <= 1e-14:
        raise PostSelectionError(f"post-selection undefined: denominator {den:.3e}")
    exps = np.array([nums[lb] / den for lb in labels])
    success = den / float(2 ** code.num_generators)
    return LogicalState(code.k, tuple(labels), exps), success


def marginal(state: LogicalState, which: int = 0) -> tuple[float, float, float]:
    return state.marginal(which)
