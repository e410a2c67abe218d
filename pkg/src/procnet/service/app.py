"""FastAPI service wrapping the benchmark harness.

Configuration problems come back as HTTP 400 with a field-named message;
runs that deadlock or fail verification still return 200 — the failure is
data, recorded in the reports and the exit_code hint.
"""

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..bench import (Config, UsageError, cmd_compare, cmd_run, cmd_sweep_k,
                     exit_code, sweep_exit_code)
from ..designs import DESIGN_IDS, DESIGN_LABELS, K_INDEPENDENT
from .schemas import (DesignInfo, HealthResponse, JobRequest, RunResponse,
                      SweepResponse)


def _config(req: JobRequest) -> Config:
    return Config(designs=list(req.designs),
                  dims=[tuple(t) for t in req.dims],
                  seed=req.seed, width=req.width,
                  max_cycles=req.max_cycles,
                  small_values=req.small_values)


def create_app() -> FastAPI:
    app = FastAPI(
        title="procnet benchmark service",
        version=__version__,
        description="Runs process-network matrix-multiply designs on a "
                    "deterministic cycle simulator and reports cycles, "
                    "traffic, area proxies and verification results.",
    )

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.get("/designs", response_model=list[DesignInfo])
    def designs():
        return [DesignInfo(id=d, label=DESIGN_LABELS[d],
                           k_independent=d in K_INDEPENDENT)
                for d in DESIGN_IDS]

    @app.post("/run", response_model=RunResponse)
    def run(req: JobRequest):
        reports = _guard(cmd_run, _config(req))
        return RunResponse(reports=[r.to_dict() for r in reports],
                           exit_code=exit_code(reports))

    @app.post("/compare", response_model=RunResponse)
    def compare(req: JobRequest):
        reports = _guard(cmd_compare, _config(req))
        return RunResponse(reports=[r.to_dict() for r in reports],
                           exit_code=exit_code(reports))

    @app.post("/sweep-k", response_model=SweepResponse)
    def sweep_k(req: JobRequest):
        series = _guard(cmd_sweep_k, _config(req))
        return SweepResponse(series=series, exit_code=sweep_exit_code(series))

    return app


def _guard(cmd, cfg):
    try:
        return cmd(cfg)
    except UsageError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


app = create_app()
