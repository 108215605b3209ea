"""Service-layer handlers: one function per endpoint, shared with the CLI.

Compiled distillation maps are cached per code (keyed by built-in name or by
the code text), so a long-running service pays the group enumeration once
and serves evaluations from the immutable tables afterwards.
"""

from __future__ import annotations

import functools
import hashlib
import math

from .. import codes as codes_mod
from .. import dynamics
from ..cost import CostQuery, levels_and_cost
from ..distill import DistillationMap, build_map, evaluate, logical_labels
from ..measurement import MeasurementModel, lambda_of
from ..oracle import oracle_distill
from ..symplectic import standard_form
from . import schemas as S

T = dynamics.T_BLOCH


class HandlerError(ValueError):
    """Domain-level failure mapped to HTTP 422 / CLI exit 2."""


@functools.lru_cache(maxsize=64)
def _map_for_name(name: str) -> DistillationMap:
    return build_map(codes_mod.builtin(name))


@functools.lru_cache(maxsize=64)
def _map_for_text(digest: str, text: str) -> DistillationMap:
    return build_map(codes_mod.loads(text))


def resolve_map(spec: S.CodeSpec) -> DistillationMap:
    try:
        if spec.name is not None:
            if spec.name in codes_mod.BUILTIN_NAMES:
                return _map_for_name(spec.name)
            code = codes_mod.resolve_code(spec.name)
            return _map_for_text(hashlib.sha256(
                codes_mod.serialize(code).encode()).hexdigest(), codes_mod.serialize(code))
        digest = hashlib.sha256(spec.text.encode()).hexdigest()
        return _map_for_text(digest, spec.text)
    except (codes_mod.CodeFormatError, FileNotFoundError) as exc:
        raise HandlerError(str(exc)) from exc


def model_of(spec: S.ModelSpec) -> MeasurementModel:
    kind, value = spec.kind_value
    try:
        return MeasurementModel(kind, value)
    except ValueError as exc:
        raise HandlerError(str(exc)) from exc


def input_bloch(spec: S.InputStateSpec) -> tuple[float, float, float]:
    if spec.kind == "t":
        return T
    if spec.kind == "bloch":
        return tuple(float(v) for v in spec.bloch)
    shrink = 1.0 - 2.0 * float(spec.error_rate)
    return tuple(shrink * v for v in T)


def iterate(req: S.IterateRequest) -> S.TrajectoryResponse:
    dmap = resolve_map(req.code)
    lam = lambda_of(model_of(req.model))
    rmap = dynamics.RoundMap.create(dmap, lam, req.orientation)
    traj = dynamics.iterate(rmap, input_bloch(req.input), tol=req.tol,
                            max_iter=req.max_iter)
    return S.TrajectoryResponse(
        code=dmap.code.name,
        lam=lam,
        classification=traj.classification,
        steps=traj.steps,
        points=[tuple(p) for p in traj.points],
        success_probs=list(traj.success_probs),
    )


def evaluate_once(req: S.EvaluateRequest) -> S.EvaluateResponse:
    dmap = resolve_map(req.code)
    lam = lambda_of(model_of(req.model))
    try:
        if req.per_qubit_bloch is not None:
            from ..distill import evaluate_heterogeneous
            state, p = evaluate_heterogeneous(dmap.code, req.per_qubit_bloch, lam)
        else:
            state, p = evaluate(dmap, input_bloch(req.input), lam)
    except (ValueError, ArithmeticError) as exc:
        raise HandlerError(str(exc)) from exc
    return S.EvaluateResponse(
        code=dmap.code.name,
        lam=lam,
        labels=list(state.labels),
        expectations=[float(v) for v in state.expectations],
        success_probability=p,
        marginals=[state.marginal(i) for i in range(state.k)],
    )


def flow(req: S.FlowRequest) -> S.FlowResponse:
    dmap = resolve_map(req.code)
    lam = lambda_of(model_of(req.model))
    rows = dynamics.flow_grid(dmap, lam, z=req.z, extent=req.extent,
                              resolution=req.resolution,
                              orientation=req.orientation, jobs=req.jobs)
    return S.FlowResponse(
        code=dmap.code.name,
        lam=lam,
        rows=[S.FlowRow(x=r.x, y=r.y, z=r.z, x1=r.x1, y1=r.y1, z1=r.z1,
                        p_succ=r.p_succ, basin=r.basin) for r in rows],
    )


def threshold(req: S.ThresholdRequest) -> S.ThresholdResponse:
    dmap = resolve_map(req.code)
    try:
        res = dynamics.threshold(dmap, req.lo, req.hi, tol_beta=req.tol_beta,
                                 model_kind=req.model_kind,
                                 orientation=req.orientation)
    except (dynamics.BracketError, ValueError) as exc:
        raise HandlerError(str(exc)) from exc
    return S.ThresholdResponse(
        code=dmap.code.name,
        model_kind=res.model_kind,
        beta_star=res.beta_star,
        lambda_star=res.lambda_star,
        bracket=res.bracket,
        eigen_trace=[(b, d) for b, d in res.eigen_trace],
        fixed_point_above=res.fixed_point_above,
    )


def deviation(req: S.ScanRequest) -> S.ScanResponse:
    dmap = resolve_map(req.code)
    points, lost = dynamics.deviation_scan(dmap, req.betas,
                                           model_kind=req.model_kind,
                                           orientation=req.orientation)
    rows = [S.ScanRow(beta=p.beta, lam=p.lam, rx=p.location[0], ry=p.location[1],
                      rz=p.location[2], mx=p.m_x, my=p.m_y, zres=p.z_residual,
                      dom_eig=p.dominant_modulus) for p in points]
    slope_mx = slope_my = None
    if req.fit and len(points) >= 2:
        betas = [p.beta for p in points]
        slope_mx = dynamics.fit_log_slope(betas, [abs(p.m_x) for p in points])
        slope_my = dynamics.fit_log_slope(betas, [abs(p.m_y) for p in points])
    return S.ScanResponse(code=dmap.code.name, model_kind=req.model_kind,
                          rows=rows, slope_mx=slope_mx, slope_my=slope_my,
                          truncated_at=lost)


def convergence(req: S.ScanRequest) -> S.ScanResponse:
    dmap = resolve_map(req.code)
    rows = []
    for beta in req.betas:
        lam = lambda_of(MeasurementModel(req.model_kind, float(beta)))
        rmap = dynamics.RoundMap.create(dmap, lam, req.orientation)
        try:
            rep = dynamics.convergence_rate(rmap)
        except ValueError:
            break
        rx, ry, rz = rep.fixed_point
        rows.append(S.ScanRow(
            beta=float(beta), lam=lam, rx=rx, ry=ry, rz=rz,
            mx=(1.0 - math.sqrt(2.0) * ry) / 2.0,
            my=(1.0 - math.sqrt(2.0) * rx) / 2.0,
            zres=rz,
            k_prime=rep.k_trajectory,
            dom_eig=rep.k_jacobian,
        ))
    truncated = req.betas[len(rows)] if len(rows) < len(req.betas) else None
    return S.ScanResponse(code=dmap.code.name, model_kind=req.model_kind,
                          rows=rows, truncated_at=truncated)


def cost(req: S.CostRequest) -> S.CostResponse:
    try:
        query = CostQuery(n=req.n, k=req.k, eps_raw=req.eps_raw,
                          eps_target=req.eps_target, d=req.d, c=req.c,
                          k_prime=req.k_prime)
        res = levels_and_cost(query, req.regime)
    except ValueError as exc:
        raise HandlerError(str(exc)) from exc
    return S.CostResponse(
        regime=res.regime, n=req.n, k=req.k, eps_raw=req.eps_raw,
        eps_target=req.eps_target, exponent=res.exponent, levels=res.levels,
        cost=res.cost, levels_smooth=res.levels_smooth,
        cost_smooth=res.cost_smooth,
    )


def standard_form_handler(req: S.StandardFormRequest) -> S.StandardFormResponse:
    dmap = resolve_map(req.code)
    code = dmap.code
    try:
        res = standard_form(code.parity_check())
    except ValueError as exc:
        raise HandlerError(str(exc)) from exc
    new_code = codes_mod.StabilizerCode(
        n=code.n, k=code.k, generators=res.matrix.rows,
        logical_x=res.logical_x, logical_z=res.logical_z,
        name=f"{code.name}-standard-form", convention_tag="standard")
    return S.StandardFormResponse(
        code=code.name,
        rank=res.rank_r,
        qubit_permutation=list(res.qubit_permutation),
        code_text=codes_mod.serialize(new_code),
        destabilizers=[d.to_string(with_sign=False) for d in res.destabilizers],
        destabilizer_weights=[d.weight() for d in res.destabilizers],
        logical_x=[p.to_string(with_sign=False) for p in res.logical_x],
        logical_z=[p.to_string(with_sign=False) for p in res.logical_z],
    )


_CHECK_STATES = [
    (0.0, 0.0, 0.0),
    T,
    (0.3, -0.4, 0.5),
    (-0.2, 0.1, 0.7),
    (0.6, 0.0, 0.0),
]


def oracle_check(req: S.OracleCheckRequest) -> S.OracleCheckResponse:
    entries = []
    all_passed = True
    for name in req.codes:
        dmap = resolve_map(S.CodeSpec(name=name))
        code = dmap.code
        for lam in req.lambdas:
            for r in _CHECK_STATES:
                exps, p_oracle = oracle_distill(code, [r] * code.n,
                                                MeasurementModel.raw_lambda(lam))
                state, p_map = evaluate(dmap, r, lam)
                dev = max(abs(state.expectation(lb) - exps[lb]) for lb in state.labels)
                pdev = abs(p_map - p_oracle)
                ok = dev <= req.tolerance and pdev <= req.tolerance
                all_passed &= ok
                entries.append(S.OracleCheckEntry(
                    code=name, model=f"lambda={lam}", state=r,
                    max_expectation_dev=dev, success_dev=pdev, passed=ok))

    # adjudicate the Gaussian-strength reading: the squared-operator
    # coefficient tanh(beta) must match the dense simulation, the literal
    # h^2 = tanh^2(beta/2) reading must not
    beta = req.gaussian_beta
    interp: dict[str, float] = {}
    verdict_ok = True
    for name in req.codes:
        dmap = resolve_map(S.CodeSpec(name=name))
        code = dmap.code
        r = (0.55, 0.1, -0.2)
        exps, p_oracle = oracle_distill(code, [r] * code.n,
                                        MeasurementModel.gaussian(beta))
        for tag, lam in (("tanh_beta", math.tanh(beta)),
                         ("tanh2_half_beta", math.tanh(beta / 2.0) ** 2)):
            state, p_map = evaluate(dmap, r, lam)
            dev = max(abs(state.expectation(lb) - exps[lb]) for lb in state.labels)
            key = f"{name}:{tag}"
            interp[key] = dev
            if tag == "tanh_beta":
                ok = dev <= req.tolerance
                all_passed &= ok
                verdict_ok &= ok
                entries.append(S.OracleCheckEntry(
                    code=name, model=f"gaussian(beta={beta})->lambda=tanh(beta)",
                    state=r, max_expectation_dev=dev,
                    success_dev=abs(p_map - p_oracle), passed=ok))
            else:
                verdict_ok &= dev > 1e-3  # literal reading must visibly fail
    verdict = ("lambda = tanh(beta) matches the dense oracle; "
               "lambda = tanh^2(beta/2) does not" if verdict_ok else
               "UNRESOLVED: see per-code deviations")
    return S.OracleCheckResponse(passed=all_passed, tolerance=req.tolerance,
                                 entries=entries,
                                 lambda_interpretation=interp,
                                 lambda_interpretation_verdict=verdict)


def list_codes() -> list[S.CodeInfo]:
    out = []
    for name in codes_mod.BUILTIN_NAMES:
        c = codes_mod.builtin(name)
        out.append(S.CodeInfo(name=name, n=c.n, k=c.k, convention=c.convention_tag))
    return out


def validate_text(req: S.ValidateRequest) -> S.ValidateResponse:
    try:
        code = codes_mod.loads(req.text)
    except codes_mod.CodeFormatError as exc:
        return S.ValidateResponse(ok=False, is_css=False,
                                  violations=[{"kind": "parse", "message": str(exc)}])
    diag = codes_mod.validate_code(code)
    return S.ValidateResponse(
        ok=diag.ok, is_css=diag.is_css,
        violations=[{"kind": v.kind, "message": v.message} for v in diag.violations],
        name=code.name)
