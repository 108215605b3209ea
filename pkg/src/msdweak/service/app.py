"""FastAPI application exposing the distillation analyses."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from . import handlers as H
from . import schemas as S


def create_app() -> FastAPI:
    app = FastAPI(
        title="msdweak",
        version=__version__,
        description="Magic-state distillation under imperfect stabilizer "
                    "measurements: exact expectation maps, fixed-point and "
                    "threshold analysis, dense-matrix oracle checks.",
    )

    def run(fn, *args):
        try:
            return fn(*args)
        except H.HandlerError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/codes", response_model=list[S.CodeInfo])
    def codes():
        return H.list_codes()

    @app.post("/codes/validate", response_model=S.ValidateResponse)
    def validate(req: S.ValidateRequest):
        return run(H.validate_text, req)

    @app.post("/evaluate", response_model=S.EvaluateResponse)
    def evaluate(req: S.EvaluateRequest):
        return run(H.evaluate_once, req)

    @app.post("/iterate", response_model=S.TrajectoryResponse)
    def iterate(req: S.IterateRequest):
        return run(H.iterate, req)

    @app.post("/flow", response_model=S.FlowResponse)
    def flow(req: S.FlowRequest):
        return run(H.flow, req)

    @app.post("/threshold", response_model=S.ThresholdResponse)
    def threshold(req: S.ThresholdRequest):
        return run(H.threshold, req)

    @app.post("/deviation", response_model=S.ScanResponse)
    def deviation(req: S.ScanRequest):
        return run(H.deviation, req)

    @app.post("/convergence", response_model=S.ScanResponse)
    def convergence(req: S.ScanRequest):
        return run(H.convergence, req)

    @app.post("/cost", response_model=S.CostResponse)
    def cost(req: S.CostRequest):
        return run(H.cost, req)

    @app.post("/standard-form", response_model=S.StandardFormResponse)
    def standard_form(req: S.StandardFormRequest):
        return run(H.standard_form_handler, req)

    @app.post("/oracle-check", response_model=S.OracleCheckResponse)
    def oracle_check(req: S.OracleCheckRequest):
        return run(H.oracle_check, req)

    return app


app = create_app()
