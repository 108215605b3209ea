"""Command-line client for the distillation service.

Every subcommand builds the same request model the REST endpoint consumes
and either calls the service layer in-process (default) or POSTs it to a
running server (``--server http://host:port``).  Tabular results are written
as CSV with a provenance comment line; scalar results as JSON.  Identical
invocations produce byte-identical output.

Exit codes: 0 success, 1 usage error, 2 numeric/domain failure,
3 oracle-check failure.
"""

from __future__ import annotations

import json
import os
import sys

import click

from . import __version__
from .service import handlers as H
from .service import schemas as S

_SERVER_ROUTES = {
    "iterate": ("/iterate", S.TrajectoryResponse),
    "evaluate": ("/evaluate", S.EvaluateResponse),
    "flow": ("/flow", S.FlowResponse),
    "threshold": ("/threshold", S.ThresholdResponse),
    "deviation": ("/deviation", S.ScanResponse),
    "convergence": ("/convergence", S.ScanResponse),
    "cost": ("/cost", S.CostResponse),
    "standard-form": ("/standard-form", S.StandardFormResponse),
    "oracle-check": ("/oracle-check", S.OracleCheckResponse),
}


class DomainFailure(click.ClickException):
    exit_code = 2


def _dispatch(name: str, req, server: str | None):
    path, resp_model = _SERVER_ROUTES[name]
    if server:
        import httpx
        resp = httpx.post(server.rstrip("/") + path,
                          json=json.loads(req.model_dump_json(by_alias=True)),
                          timeout=600.0)
        if resp.status_code != 200:
            raise DomainFailure(f"server returned {resp.status_code}: {resp.text}")
        return resp_model.model_validate(resp.json())
    fn = {
        "iterate": H.iterate,
        "evaluate": H.evaluate_once,
        "flow": H.flow,
        "threshold": H.threshold,
        "deviation": H.deviation,
        "convergence": H.convergence,
        "cost": H.cost,
        "standard-form": H.standard_form_handler,
        "oracle-check": H.oracle_check,
    }[name]
    try:
        return fn(req)
    except H.HandlerError as exc:
        raise DomainFailure(str(exc)) from exc
    except (ValueError, ArithmeticError) as exc:
        raise DomainFailure(str(exc)) from exc


def _provenance(ctx: click.Context) -> str:
    args = " ".join(sys.argv[1:])
    return f"# msdweak {__version__} {args}"


def _write(ctx: click.Context, text: str, output: str | None):
    if output is None:
        click.echo(text, nl=False)
        return
    if not os.path.isabs(output):
        base = os.environ.get("MSDWEAK_OUTPUT_DIR", "")
        if base:
            output = os.path.join(base, output)
    with open(output, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _fmt(v) -> str:
    if v is None:
        return "nan"
    return repr(float(v))


def _model_options(fn):
    for flag, name, help_text in reversed([
        ("--beta", "beta", "Gaussian measurement strength"),
        ("--h", "h", "linear measurement coefficient (I + h g)"),
        ("--eta", "eta", "binary-outcome measurement strength"),
        ("--lambda", "lam", "raw map coefficient"),
        ("--kappa", "kappa", "continuous Gaussian pointer strength"),
    ]):
        fn = click.option(flag, name, type=float, default=None, help=help_text)(fn)
    return fn


def _model_spec(beta, h, eta, lam, kappa) -> S.ModelSpec:
    try:
        return S.ModelSpec(beta=beta, h=h, eta=eta, **{"lambda": lam}, kappa=kappa)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def _code_spec(code: str) -> S.CodeSpec:
    from . import codes as codes_mod
    if code in codes_mod.BUILTIN_NAMES:
        return S.CodeSpec(name=code)
    if os.path.exists(code):
        with open(code, "r", encoding="utf-8") as fh:
            return S.CodeSpec(text=fh.read())
    raise click.UsageError(f"{code!r} is neither a built-in code nor a file; "
                           f"built-ins: {', '.join(codes_mod.BUILTIN_NAMES)}")


def _input_spec(text: str) -> S.InputStateSpec:
    low = text.strip().lower()
    if low == "t":
        return S.InputStateSpec(kind="t")
    if low.startswith("depolarized-t:"):
        return S.InputStateSpec(kind="depolarized-t",
                                error_rate=float(text.split(":", 1)[1]))
    if low.startswith("bloch:"):
        parts = [float(v) for v in text.split(":", 1)[1].split(",")]
        if len(parts) != 3:
            raise click.UsageError("bloch input needs three comma-separated values")
        return S.InputStateSpec(kind="bloch", bloch=tuple(parts))
    raise click.UsageError(
        f"unknown input state {text!r}; use 'T', 'depolarized-T:<rate>' or 'bloch:x,y,z'")


def _sweep(text: str) -> list[float]:
    """'start:stop:steps' or a single value."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise click.UsageError(f"sweep {text!r} must be start:stop:steps")
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
        if steps < 1:
            raise click.UsageError("sweep needs at least one step")
        if steps == 1:
            return [start]
        return [start + (stop - start) * i / (steps - 1) for i in range(steps)]
    return [float(text)]


def _json_out(ctx, resp, output):
    _write(ctx, json.dumps(resp.model_dump(), indent=2) + "\n", output)


@click.group()
@click.version_option(__version__, prog_name="msdweak")
@click.option("--server", default=None, envvar="MSDWEAK_SERVER",
              help="URL of a running msdweak service; default is in-process")
@click.pass_context
def cli(ctx, server):
    """Magic-state distillation under imperfect measurements."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@cli.command()
@click.pass_context
def codes(ctx):
    """List built-in codes."""
    for info in H.list_codes():
        click.echo(f"{info.name}  [[{info.n},{info.k}]]  {info.convention}")


@cli.command()
@click.argument("path", type=click.Path(exists=True))
@click.pass_context
def validate(ctx, path):
    """Validate a code-definition file."""
    with open(path, "r", encoding="utf-8") as fh:
        resp = H.validate_text(S.ValidateRequest(text=fh.read()))
    _json_out(ctx, resp, None)
    if not resp.ok:
        sys.exit(2)


@cli.command()
@click.option("--code", required=True, help="built-in name or code file path")
@_model_options
@click.option("--input", "input_state", default="T",
              help="T | depolarized-T:<rate> | bloch:x,y,z")
@click.option("--tol", type=float, default=1e-12, show_default=True)
@click.option("--max-iter", type=int, default=100_000, show_default=True)
@click.option("--orientation", default="auto", show_default=True,
              type=click.Choice(["auto", "none", "I", "X", "Y", "Z"]))
@click.option("--output", "-o", default=None, help="output file (default stdout)")
@click.pass_context
def iterate(ctx, code, beta, h, eta, lam, kappa, input_state, tol, max_iter,
            orientation, output):
    """Recursive distillation trajectory (CSV: step,x,y,z,p_succ)."""
    req = S.IterateRequest(code=_code_spec(code),
                           model=_model_spec(beta, h, eta, lam, kappa),
                           input=_input_spec(input_state), tol=tol,
                           max_iter=max_iter, orientation=orientation)
    resp = _dispatch("iterate", req, ctx.obj["server"])
    lines = [_provenance(ctx), f"# code={resp.code} lambda={_fmt(resp.lam)} "
             f"classification={resp.classification}", "step,x,y,z,p_succ"]
    for i, pt in enumerate(resp.points):
        p = resp.success_probs[i - 1] if i >= 1 else None
        lines.append(f"{i},{_fmt(pt[0])},{_fmt(pt[1])},{_fmt(pt[2])},{_fmt(p)}")
    _write(ctx, "\n".join(lines) + "\n", output)


@cli.command()
@click.option("--code", required=True)
@_model_options
@click.option("--z", type=float, default=0.0, show_default=True)
@click.option("--extent", type=float, default=1.0, show_default=True)
@click.option("--resolution", type=int, default=21, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--orientation", default="auto",
              type=click.Choice(["auto", "none", "I", "X", "Y", "Z"]))
@click.option("--output", "-o", default=None)
@click.pass_context
def flow(ctx, code, beta, h, eta, lam, kappa, z, extent, resolution, jobs,
         orientation, output):
    """Flow-field grid on the x-y plane (CSV: x,y,z,x1,y1,z1,p,basin)."""
    req = S.FlowRequest(code=_code_spec(code),
                        model=_model_spec(beta, h, eta, lam, kappa),
                        z=z, extent=extent, resolution=resolution, jobs=jobs,
                        orientation=orientation)
    resp = _dispatch("flow", req, ctx.obj["server"])
    lines = [_provenance(ctx), f"# code={resp.code} lambda={_fmt(resp.lam)}",
             "x,y,z,x1,y1,z1,p_succ,basin"]
    for r in resp.rows:
        lines.append(",".join([_fmt(r.x), _fmt(r.y), _fmt(r.z), _fmt(r.x1),
                               _fmt(r.y1), _fmt(r.z1), _fmt(r.p_succ), r.basin]))
    _write(ctx, "\n".join(lines) + "\n", output)


@cli.command()
@click.option("--code", required=True)
@click.option("--lo", type=float, default=1.0, show_default=True)
@click.option("--hi", type=float, default=2.5, show_default=True)
@click.option("--tol-beta", type=float, default=1e-3, show_default=True)
@click.option("--model-kind", default="gaussian", show_default=True,
              type=click.Choice(["gaussian", "h", "eta", "lambda", "kappa"]))
@click.option("--orientation", default="auto",
              type=click.Choice(["auto", "none", "I", "X", "Y", "Z"]))
@click.option("--output", "-o", default=None)
@click.pass_context
def threshold(ctx, code, lo, hi, tol_beta, model_kind, orientation, output):
    """Critical measurement strength via continuation + bisection (JSON)."""
    req = S.ThresholdRequest(code=_code_spec(code), lo=lo, hi=hi,
                             tol_beta=tol_beta, model_kind=model_kind,
                             orientation=orientation)
    resp = _dispatch("threshold", req, ctx.obj["server"])
    _json_out(ctx, resp, output)


def _scan_command(name: str, doc: str):
    @cli.command(name=name, help=doc)
    @click.option("--code", required=True)
    @click.option("--beta", "sweep", required=True,
                  help="single value or start:stop:steps")
    @click.option("--model-kind", default="gaussian", show_default=True,
                  type=click.Choice(["gaussian", "h", "eta", "lambda", "kappa"]))
    @click.option("--fit", is_flag=True, help="append log-linear slope fits")
    @click.option("--orientation", default="auto",
                  type=click.Choice(["auto", "none", "I", "X", "Y", "Z"]))
    @click.option("--output", "-o", default=None)
    @click.pass_context
    def _cmd(ctx, code, sweep, model_kind, fit, orientation, output):
        req = S.ScanRequest(code=_code_spec(code), betas=_sweep(sweep),
                            model_kind=model_kind, fit=fit,
                            orientation=orientation)
        resp = _dispatch(name, req, ctx.obj["server"])
        lines = [_provenance(ctx), f"# code={resp.code} model={resp.model_kind}"]
        if resp.slope_mx is not None:
            lines.append(f"# slope_mx={_fmt(resp.slope_mx)} slope_my={_fmt(resp.slope_my)}")
        if resp.truncated_at is not None:
            lines.append(f"# truncated_at={_fmt(resp.truncated_at)}")
        lines.append("beta,lambda,rx,ry,rz,mx,my,zres,k_prime,dom_eig")
        for r in resp.rows:
            lines.append(",".join([_fmt(r.beta), _fmt(r.lam), _fmt(r.rx),
                                   _fmt(r.ry), _fmt(r.rz), _fmt(r.mx),
                                   _fmt(r.my), _fmt(r.zres), _fmt(r.k_prime),
                                   _fmt(r.dom_eig)]))
        _write(ctx, "\n".join(lines) + "\n", output)
    return _cmd


_scan_command("deviation", "Target-state bias decomposition per measurement "
                           "strength (CSV scan schema).")
_scan_command("convergence", "Linear convergence prefactor per measurement "
                             "strength (CSV scan schema).")


@cli.command()
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--eps-raw", type=float, required=True)
@click.option("--eps", "eps_target", type=float, required=True)
@click.option("--regime", default=None,
              type=click.Choice(["ideal", "linear"]),
              help="inferred from --d / --k-prime when omitted")
@click.option("--d", type=float, default=None, help="ideal suppression order")
@click.option("--c", type=float, default=1.0, show_default=True,
              help="ideal recursion prefactor")
@click.option("--k-prime", type=float, default=None, help="linear prefactor")
@click.option("--output", "-o", default=None)
@click.pass_context
def cost(ctx, n, k, eps_raw, eps_target, regime, d, c, k_prime, output):
    """Distillation cost: levels and raw-state count (JSON)."""
    if regime is None:
        if (d is None) == (k_prime is None):
            raise click.UsageError("give --d (ideal) or --k-prime (linear), or --regime")
        regime = "ideal" if d is not None else "linear"
    req = S.CostRequest(n=n, k=k, eps_raw=eps_raw, eps_target=eps_target,
                        regime=regime, d=d, c=c, k_prime=k_prime)
    resp = _dispatch("cost", req, ctx.obj["server"])
    _json_out(ctx, resp, output)


@cli.command(name="standard-form")
@click.option("--code", required=True)
@click.option("--output", "-o", default=None)
@click.pass_context
def standard_form_cmd(ctx, code, output):
    """Standard-form conversion with destabilizer report (JSON)."""
    req = S.StandardFormRequest(code=_code_spec(code))
    resp = _dispatch("standard-form", req, ctx.obj["server"])
    _json_out(ctx, resp, output)


@cli.command(name="oracle-check")
@click.option("--codes", "code_names", default="4-2-2,5-1-3,steane-7-1-3",
              show_default=True, help="comma-separated small-code names")
@click.option("--tolerance", type=float, default=1e-10, show_default=True)
@click.option("--output", "-o", default=None)
@click.pass_context
def oracle_check(ctx, code_names, tolerance, output):
    """Map-vs-dense-oracle verification matrix (JSON; exit 3 on failure)."""
    req = S.OracleCheckRequest(codes=[c.strip() for c in code_names.split(",")],
                               tolerance=tolerance)
    resp = _dispatch("oracle-check", req, ctx.obj["server"])
    _json_out(ctx, resp, output)
    if not resp.passed:
        sys.exit(3)


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the REST service."""
    import uvicorn
    from .service.app import app
    uvicorn.run(app, host=host, port=port)


def main():
    try:
        cli(standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        sys.exit(1)
    except DomainFailure as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    except SystemExit:
        raise


if __name__ == "__main__":
    main()
