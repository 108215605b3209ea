"""The distillation round as a discrete dynamical system on the Bloch ball.

A *round* is one application of the compiled map followed by (for k > 1)
feedback of the first logical qubit's marginal and by the protocol's
orientation correction: the transversal non-Clifford gate of the T-state
protocol codes implements the inverse logical rotation, so the raw decoded
output of an ideal input is the conjugate target state and the physical
protocol applies a logical Pauli fix-up each round.  The correction is
detected automatically from the map's exact lam = 1 action on the target
state and amounts to sign flips of Bloch components; `orientation="none"`
gives the raw decoded map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distill import DistillationMap, PostSelectionError, evaluate
from .measurement import MeasurementModel, lambda_of

SQ2 = 1.0 / math.sqrt(2.0)
T_BLOCH = (SQ2, SQ2, 0.0)

# Bloch-vector action of conjugation by a single-qubit Pauli
_PAULI_SIGNS = {
    "I": (1.0, 1.0, 1.0),
    "X": (1.0, -1.0, -1.0),
    "Y": (-1.0, 1.0, -1.0),
    "Z": (-1.0, -1.0, 1.0),
}

TRIVIAL_RADIUS = 1e-6


class BracketError(ValueError):
    """threshold() precondition violated (no fixed point at the upper end)."""


def detect_orientation(dmap: DistillationMap, target=T_BLOCH) -> tuple[str, bool]:
    """Pauli letter whose Bloch action returns the lam=1 image of the target
    to the target; ('I', False) when no letter does (map left unoriented)."""
    try:
        state, _ = evaluate(dmap, target, 1.0)
    except PostSelectionError:
        return "I", False
    m = np.array(state.marginal(0))
    t = np.array(target)
    for letter, signs in _PAULI_SIGNS.items():
        if np.max(np.abs(np.array(signs) * m - t)) < 1e-9:
            return letter, True
    return "I", False


@dataclass(frozen=True, eq=False)
class RoundMap:
    """evaluate -> marginal feedback -> orientation fix, as an R^3 map."""

    dmap: DistillationMap
    lam: float
    fix_letter: str = "I"
    oriented: bool = True
    feedback_qubit: int = 0

    @classmethod
    def create(cls, dmap: DistillationMap, lam: float,
               orientation: str = "auto", target=T_BLOCH) -> "RoundMap":
        if orientation == "auto":
            letter, ok = detect_orientation(dmap, target)
            return cls(dmap, float(lam), letter, ok)
        if orientation == "none":
            return cls(dmap, float(lam), "I", False)
        if orientation in _PAULI_SIGNS:
            return cls(dmap, float(lam), orientation, True)
        raise ValueError(f"orientation must be 'auto', 'none' or a Pauli letter, "
                         f"got {orientation!r}")

    def _marginal_labels(self) -> tuple[str, str, str]:
        k, q = self.dmap.k, self.feedback_qubit
        return tuple("".join(c if i == q else "I" for i in range(k)) for c in "XYZ")

    def apply(self, r) -> tuple[tuple[float, float, float], float]:
        state, p = evaluate(self.dmap, r, self.lam)
        m = state.marginal(self.feedback_qubit)
        s = _PAULI_SIGNS[self.fix_letter]
        return (s[0] * m[0], s[1] * m[1], s[2] * m[2]), p

    def apply_full(self, r):
        """(next r, success, worst marginal asymmetry across logical qubits).

        For k > 1 the marginals of the other logical qubits can genuinely
        drift from the fed-back one under imperfect measurements; the
        asymmetry is reported, never averaged away."""
        state, p = evaluate(self.dmap, r, self.lam)
        m = state.marginal(self.feedback_qubit)
        asym = 0.0
        for q in range(self.dmap.k):
            if q != self.feedback_qubit:
                other = state.marginal(q)
                asym = max(asym, max(abs(a - b) for a, b in zip(m, other)))
        s = _PAULI_SIGNS[self.fix_letter]
        return (s[0] * m[0], s[1] * m[1], s[2] * m[2]), p, asym

    def state(self, r):
        return evaluate(self.dmap, r, self.lam)

    def jacobian(self, r) -> np.ndarray:
        """Analytic 3x3 Jacobian of the round via the quotient rule on the
        merged-monomial tables (exact polynomial derivatives)."""
        lt, xt, yt, zt = self.dmap.power_tables(r, self.lam)
        den = self.dmap.denominator.eval_tables(lt, xt, yt, zt)
        if den <= 1e-14:
            raise PostSelectionError(f"denominator {den:.3e} at r={tuple(r)}")
        dden = [p.eval_tables(lt, xt, yt, zt) for p in self.dmap.denominator_derivs]
        jac = np.zeros((3, 3))
        signs = _PAULI_SIGNS[self.fix_letter]
        for i, label in enumerate(self._marginal_labels()):
            num = self.dmap.numerators[label].eval_tables(lt, xt, yt, zt)
            for a in range(3):
                dnum = self.dmap.numerator_derivs[label][a].eval_tables(lt, xt, yt, zt)
                jac[i, a] = signs[i] * (dnum * den - num * dden[a]) / (den * den)
        return jac


def finite_difference_jacobian(rmap: RoundMap, r, h: float = 1e-6) -> np.ndarray:
    """Central-difference cross-check for the analytic Jacobian."""
    r = np.asarray(r, dtype=float)
    jac = np.zeros((3, 3))
    for a in range(3):
        e = np.zeros(3)
        e[a] = h / 2
        fp, _ = rmap.apply(tuple(r + e))
        fm, _ = rmap.apply(tuple(r - e))
        jac[:, a] = (np.array(fp) - np.array(fm)) / h
    return jac


def dominant_eigenvalue(mat: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(np.asarray(mat, dtype=float)))))


@dataclass(frozen=True, eq=False)
class Trajectory:
    points: list
    success_probs: list
    classification: str  # nontrivial-fixed-point | trivial-fixed-point | max-iterations | domain-error
    marginal_asymmetry: float = 0.0  # worst cross-logical-qubit marginal spread seen (k > 1)

    @property
    def terminal(self) -> tuple[float, float, float]:
        return self.points[-1]

    @property
    def steps(self) -> int:
        return len(self.success_probs)


def iterate(rmap: RoundMap, r0, tol: float = 1e-12, max_iter: int = 100_000,
            keep_path: bool = True) -> Trajectory:
    r = (float(r0[0]), float(r0[1]), float(r0[2]))
    points = [r]
    probs: list[float] = []
    multi = rmap.dmap.k > 1
    asym = 0.0
    for _ in range(max_iter):
        try:
            if multi:
                nxt, p, a = rmap.apply_full(r)
                asym = max(asym, a)
            else:
                nxt, p = rmap.apply(r)
        except PostSelectionError:
            return Trajectory(points if keep_path else [points[0], r], probs,
                              "domain-error", asym)
        probs.append(p)
        if keep_path:
            points.append(nxt)
        disp = math.dist(nxt, r)
        r = nxt
        if disp < tol:
            cls = ("trivial-fixed-point" if math.sqrt(sum(v * v for v in r)) < TRIVIAL_RADIUS
                   else "nontrivial-fixed-point")
            return Trajectory(points if keep_path else [points[0], r], probs, cls, asym)
    return Trajectory(points if keep_path else [points[0], r], probs, "max-iterations", asym)


@dataclass(frozen=True, eq=False)
class FixedPointReport:
    location: tuple[float, float, float]
    residual: float
    jacobian: np.ndarray
    eigenvalues: np.ndarray
    dominant_modulus: float
    stable: bool
    converged: bool

    @property
    def nontrivial(self) -> bool:
        return math.sqrt(sum(v * v for v in self.location)) >= TRIVIAL_RADIUS


def _round_residual(rmap: RoundMap, r) -> np.ndarray:
    out, _ = rmap.apply(r)
    return np.array(out) - np.asarray(r, dtype=float)


def find_fixed_point(rmap: RoundMap, seed, tol: float = 1e-12,
                     iter_budget: int = 5000, newton_budget: int = 50) -> FixedPointReport:
    """Plain iteration to rough tolerance, then damped Newton polish."""
    traj = iterate(rmap, seed, tol=1e-8, max_iter=iter_budget, keep_path=False)
    r = np.array(traj.terminal if traj.classification != "domain-error" else seed, dtype=float)

    # Newton keeps polishing past `tol` while the residual still improves, so
    # downstream users (eigenvalue traces, convergence-rate fits) see fixed
    # points located to near machine precision.
    try:
        f = _round_residual(rmap, tuple(r))
        for _ in range(newton_budget):
            if np.max(np.abs(f)) < 1e-15:
                break
            jac = rmap.jacobian(tuple(r)) - np.eye(3)
            try:
                delta = np.linalg.solve(jac, -f)
            except np.linalg.LinAlgError:
                delta = np.linalg.lstsq(jac, -f, rcond=None)[0]
            if not np.all(np.isfinite(delta)):
                break
            step = 1.0
            improved = False
            for _ in range(12):
                cand = r + step * delta
                if np.dot(cand, cand) <= 1.0 + 1e-12:
                    try:
                        fc = _round_residual(rmap, tuple(cand))
                        if np.max(np.abs(fc)) < np.max(np.abs(f)):
                            r, f = cand, fc
                            improved = True
                            break
                    except PostSelectionError:
                        pass
                step /= 2
            if not improved:
                break
        converged = bool(np.max(np.abs(f)) <= tol)
    except PostSelectionError:
        f = np.full(3, np.inf)
        converged = False

    residual = float(np.max(np.abs(f)))
    try:
        jac = rmap.jacobian(tuple(r))
        eigs = np.linalg.eigvals(jac)
        dom = float(np.max(np.abs(eigs)))
    except PostSelectionError:
        jac = np.full((3, 3), np.nan)
        eigs = np.full(3, np.nan, dtype=complex)
        dom = float("nan")
    return FixedPointReport(
        location=tuple(float(v) for v in r),
        residual=residual,
        jacobian=jac,
        eigenvalues=eigs,
        dominant_modulus=dom,
        stable=bool(dom < 1.0),
        converged=bool(converged and residual <= tol),
    )


def halton_ball_seeds(count: int, radius: float = 0.99, skip: int = 1) -> list:
    """Deterministic low-discrepancy seeds in the Bloch ball.

    Halton sequence with bases (2, 3, 5) on [-1, 1]^3, rejecting points
    outside the unit sphere, scaled by `radius`."""
    def halton(i: int, base: int) -> float:
        f, x = 1.0, 0.0
        while i > 0:
            f /= base
            x += f * (i % base)
            i //= base
        return x

    out = []
    i = skip
    while len(out) < count:
        p = tuple(2.0 * halton(i, b) - 1.0 for b in (2, 3, 5))
        i += 1
        if sum(v * v for v in p) <= 1.0:
            out.append(tuple(radius * v for v in p))
    return out


def nontrivial_attractor_exists(rmap: RoundMap, num_seeds: int = 100,
                                include_target: bool = True,
                                tol: float = 1e-10, max_iter: int = 100_000):
    """Independent check via plain iteration from deterministic seeds."""
    seeds = halton_ball_seeds(num_seeds)
    if include_target:
        seeds = [T_BLOCH, tuple(0.9 * v for v in T_BLOCH)] + seeds[:max(0, num_seeds - 2)]
    hits = []
    for s in seeds:
        traj = iterate(rmap, s, tol=tol, max_iter=max_iter, keep_path=False)
        if traj.classification == "nontrivial-fixed-point":
            hits.append(traj.terminal)
    return bool(hits), hits


@dataclass(frozen=True, eq=False)
class ThresholdResult:
    beta_star: float
    lambda_star: float
    bracket: tuple[float, float]
    model_kind: str
    eigen_trace: list  # (beta, dominant modulus) along the tracked branch
    fixed_point_above: tuple[float, float, float]


def threshold(dmap: DistillationMap, beta_lo: float, beta_hi: float,
              tol_beta: float = 1e-3, model_kind: str = "gaussian",
              orientation: str = "auto", target=T_BLOCH) -> ThresholdResult:
    """Continuation + bisection for the critical measurement strength.

    The nontrivial fixed point located at beta_hi is tracked downward with
    warm Newton starts; a probe strength counts as "above threshold" when the
    warm-started search converges to a nontrivial point whose dominant
    Jacobian modulus is below 1.  Either losing the branch or crossing
    modulus 1 ends the bracket; the returned beta_star is the upper bracket
    end (conservative).
    """
    def lam_of_beta(b: float) -> float:
        return lambda_of(MeasurementModel(model_kind, b))

    def probe(beta: float, seed):
        rmap = RoundMap.create(dmap, lam_of_beta(beta), orientation, target)
        rep = find_fixed_point(rmap, seed)
        ok = rep.converged and rep.nontrivial and rep.dominant_modulus < 1.0
        return ok, rep

    ok_hi, rep_hi = probe(beta_hi, target)
    if not ok_hi:
        raise BracketError(
            f"no stable nontrivial fixed point at {model_kind} strength {beta_hi}")
    ok_lo, _ = probe(beta_lo, rep_hi.location)
    if ok_lo:
        raise BracketError(
            f"stable nontrivial fixed point persists at {model_kind} strength {beta_lo}; "
            "bracket does not contain the threshold")

    lo, hi = beta_lo, beta_hi
    warm = rep_hi.location
    trace = [(beta_hi, rep_hi.dominant_modulus)]
    while hi - lo > tol_beta:
        mid = 0.5 * (lo + hi)
        ok, rep = probe(mid, warm)
        if ok:
            hi, warm = mid, rep.location
            trace.append((mid, rep.dominant_modulus))
        else:
            lo = mid
    _, rep_star = probe(hi, warm)
    trace.sort(key=lambda t: t[0])
    return ThresholdResult(
        beta_star=hi,
        lambda_star=lam_of_beta(hi),
        bracket=(lo, hi),
        model_kind=model_kind,
        eigen_trace=trace,
        fixed_point_above=rep_star.location,
    )


def eigenvalue_trace(dmap: DistillationMap, betas, model_kind: str = "gaussian",
                     orientation: str = "auto", target=T_BLOCH) -> list:
    """(beta, dominant modulus, fixed point) along the branch, tracked from
    the largest strength downward with warm starts."""
    order = np.argsort(betas)[::-1]
    warm = target
    out = [None] * len(betas)
    for idx in order:
        beta = float(betas[idx])
        rmap = RoundMap.create(dmap, lambda_of(MeasurementModel(model_kind, beta)),
                               orientation, target)
        rep = find_fixed_point(rmap, warm)
        if rep.converged and rep.nontrivial:
            warm = rep.location
            out[idx] = (beta, rep.dominant_modulus, rep.location)
        else:
            out[idx] = (beta, float("nan"), rep.location)
    return out


@dataclass(frozen=True, eq=False)
class BiasDecomposition:
    """Pauli X/Y error weights of a target state near |T>.

    Exact inversion of r = (1-2*m_y, 1-2*m_x, 0)/sqrt(2):
    m_x = (1 - sqrt(2) r_y)/2, m_y = (1 - sqrt(2) r_x)/2."""
    beta: float
    lam: float
    location: tuple[float, float, float]
    m_x: float
    m_y: float
    z_residual: float
    dominant_modulus: float


def deviation_scan(dmap: DistillationMap, betas, model_kind: str = "gaussian",
                   orientation: str = "auto", target=T_BLOCH):
    """BiasDecomposition of the tracked nontrivial fixed point per strength.

    Strengths are processed in descending order with warm starts; if the
    branch is lost mid-scan the result is truncated and the failure strength
    reported.  Returned in the input order.
    """
    betas = [float(b) for b in betas]
    order = sorted(range(len(betas)), key=lambda i: -betas[i])
    out: dict[int, BiasDecomposition] = {}
    warm = target
    lost_at = None
    for idx in order:
        beta = betas[idx]
        lam = lambda_of(MeasurementModel(model_kind, beta))
        rmap = RoundMap.create(dmap, lam, orientation, target)
        rep = find_fixed_point(rmap, warm)
        if not (rep.converged and rep.nontrivial and rep.stable):
            lost_at = beta
            break
        warm = rep.location
        rx, ry, rz = rep.location
        out[idx] = BiasDecomposition(
            beta=beta, lam=lam, location=rep.location,
            m_x=(1.0 - math.sqrt(2.0) * ry) / 2.0,
            m_y=(1.0 - math.sqrt(2.0) * rx) / 2.0,
            z_residual=rz,
            dominant_modulus=rep.dominant_modulus,
        )
    points = [out[i] for i in sorted(out)]
    return points, lost_at


def fit_log_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against x."""
    xs = np.asarray(xs, dtype=float)
    ys = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(xs, ys, 1)[0])


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    k_prime: float
    k_jacobian: float
    k_trajectory: float
    agreement: float
    superlinear: bool
    fixed_point: tuple[float, float, float]


def convergence_rate(rmap: RoundMap, seed=T_BLOCH,
                     start_distance: float = 1e-3) -> ConvergenceReport:
    """Linear convergence prefactor, estimated two independent ways.

    (a) dominant Jacobian modulus at the fixed point; (b) decay of the
    distance to the fixed point along a trajectory launched a small step
    away (along the dominant eigenvector when it is real).  The trajectory
    estimate uses a log-linear slope fit inside a distance window where both
    the quadratic contamination (distance too large) and the fixed-point
    location noise (distance too small) are negligible; when the decay skips
    across the window in under four steps the last two clean step ratios are
    Richardson-extrapolated to distance zero instead.  Rates below 1e-3 are
    flagged superlinear: displacements collapse at order > 1 and the ratio
    fit degenerates.
    """
    rep = find_fixed_point(rmap, seed)
    if not (rep.converged and rep.stable):
        raise ValueError("no stable fixed point reachable from the seed")
    dom = rep.dominant_modulus
    fp = np.array(rep.location)

    eigs, vecs = np.linalg.eig(rep.jacobian)
    lead = int(np.argmax(np.abs(eigs)))
    v = np.real(vecs[:, lead])
    norm = np.linalg.norm(v)
    direction = v / norm if norm > 1e-12 else np.array([1.0, 0.0, 0.0])

    ladder = np.geomspace(min(start_distance, 1e-6), 3e-9, 12)
    # probe side fixed once at the largest rung so the ratio error stays an
    # odd function of a single displacement sign across the whole ladder
    if np.dot(fp + ladder[0] * direction, fp + ladder[0] * direction) > 1.0:
        direction = -direction

    def one_step_ratio(d: float) -> float:
        out, _ = rmap.apply(tuple(fp + d * direction))
        return float(np.linalg.norm(np.array(out) - fp)) / d

    if dom < 1e-4:
        # superlinear regime: displacements collapse at order > 1, the ratio
        # itself shrinks with the start distance instead of converging
        tail = one_step_ratio(1e-6)
        return ConvergenceReport(dom, dom, float(tail), abs(dom - tail),
                                 True, rep.location)

    # Walking a single trajectory down from `start_distance` leaves a memory
    # of sub-dominant eigenmodes in the step ratios, so the ratio fit instead
    # launches a fresh one-step trajectory from each rung of a distance
    # ladder: along the dominant eigendirection the ratio error is then
    # exactly linear in the distance, and the linear fit extrapolates it away.
    ratios = np.array([one_step_ratio(float(d)) for d in ladder])
    k_traj = float(np.polyfit(ladder, ratios, 1)[1])
    return ConvergenceReport(
        k_prime=dom,
        k_jacobian=dom,
        k_trajectory=k_traj,
        agreement=abs(dom - k_traj),
        superlinear=False,
        fixed_point=rep.location,
    )


@dataclass(frozen=True, eq=False)
class SuppressionFit:
    order: float
    prefactor: float
    eps_in: list
    eps_out: list
    reference: tuple[float, float, float]


def suppression_order_fit(dmap: DistillationMap, lam: float = 1.0,
                          eps_grid=None, orientation: str = "auto",
                          target=T_BLOCH) -> SuppressionFit:
    """Log-log slope of output vs input error for depolarized-target inputs.

    Error convention: eps = 1 - <target|rho|target> (Bloch shrink by 1-2*eps
    along the target ray).  At lam = 1 the reference is the pure target; for
    lam < 1 both errors are measured as distance to the lam fixed point, the
    only convention under which the linear-regime slope is meaningful.
    """
    if eps_grid is None:
        eps_grid = np.logspace(-4, -2, 9)
    eps_grid = np.asarray(eps_grid, dtype=float)
    if eps_grid.size < 2:
        raise ValueError("need at least two error values to fit a slope")
    rmap = RoundMap.create(dmap, lam, orientation, target)
    t = np.array(target)
    if lam >= 1.0:
        ref = t
    else:
        rep = find_fixed_point(rmap, target)
        if not (rep.converged and rep.nontrivial):
            raise ValueError("no nontrivial fixed point at this lambda")
        ref = np.array(rep.location)

    eps_in, eps_out = [], []
    for eps in eps_grid:
        r_in = tuple((1.0 - 2.0 * eps) * t)
        r_out, _ = rmap.apply(r_in)
        if lam >= 1.0:
            e_out = (1.0 - float(np.dot(r_out, t)) / float(np.dot(t, t))) / 2.0
            e_in = eps
        else:
            e_in = float(np.linalg.norm(np.array(r_in) - ref))
            e_out = float(np.linalg.norm(np.array(r_out) - ref))
        eps_in.append(float(e_in))
        eps_out.append(float(e_out))
    slope, intercept = np.polyfit(np.log(eps_in), np.log(eps_out), 1)
    return SuppressionFit(
        order=float(slope),
        prefactor=float(np.exp(intercept)),
        eps_in=eps_in,
        eps_out=eps_out,
        reference=tuple(float(v) for v in ref),
    )


@dataclass(frozen=True, eq=False)
class FlowPoint:
    x: float
    y: float
    z: float
    x1: float
    y1: float
    z1: float
    p_succ: float
    basin: str


def flow_grid(dmap: DistillationMap, lam: float, z: float = 0.0,
              extent: float = 1.0, resolution: int = 21,
              orientation: str = "auto", target=T_BLOCH,
              jobs: int = 1) -> list[FlowPoint]:
    """One-step image and basin label on an x-y grid at fixed z.

    Points outside the unit ball are emitted with basin='outside' and NaN
    images.  Rows are ordered by grid index regardless of worker count.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    rmap = RoundMap.create(dmap, lam, orientation, target)
    axis = np.linspace(-extent, extent, resolution)
    coords = [(float(x), float(y)) for y in axis for x in axis]

    def work(pt):
        x, y = pt
        if x * x + y * y + z * z > 1.0:
            return FlowPoint(x, y, z, math.nan, math.nan, math.nan, math.nan, "outside")
        try:
            (x1, y1, z1), p = rmap.apply((x, y, z))
        except PostSelectionError:
            return FlowPoint(x, y, z, math.nan, math.nan, math.nan, math.nan, "domain-error")
        traj = iterate(rmap, (x, y, z), tol=1e-10, max_iter=20_000, keep_path=False)
        return FlowPoint(x, y, z, x1, y1, z1, p, traj.classification)

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(work, coords))
    return [work(pt) for pt in coords]
