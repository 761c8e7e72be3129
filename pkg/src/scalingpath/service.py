"""FastAPI service wrapping the solvers and the sweep pipeline.

Endpoints execute on the server and persist artifacts under the requested
output directory on the server's filesystem; responses carry the summary
numbers and the directory written. The bundled CLI mounts this app
in-process through httpx's ASGITransport, so no running server is needed
for local use.
"""

from fastapi import FastAPI, HTTPException

from . import __version__
from .experiment import (
    SweepConfig,
    compare,
    eval_surface,
    gd_config_from,
    load_predictor,
    path_config_from,
    problem_setup,
    run_sweep,
    save_kernel_solution,
    save_solution,
    save_training_run,
    write_surface_csv,
)
from .ntk import gram, solve_interpolation
from .schemas import (
    CompareRequest,
    CompareResponse,
    EvalRequest,
    EvalResponse,
    HealthResponse,
    KernelRequest,
    KernelResponse,
    RichLimitRequest,
    SolvePathRequest,
    SolveResponse,
    SolveSettings,
    SweepRequest,
    SweepResponse,
    TrainRequest,
    TrainResponse,
)
from .solver import solve_rich_limit, solve_scaling_path
from .training import empirical_measure, init_from_grid, train

app = FastAPI(title="scalingpath service")


def _solution_meta(alpha, s: SolveSettings) -> dict:
    return {
        "alpha": alpha,
        "eps": s.eps,
        "n_f": s.n_f,
        "support": s.support,
        "debias": s.debias,
        "dataset_path": s.dataset_path,
    }


def _bad_request(exc) -> HTTPException:
    return HTTPException(status_code=400, detail=str(exc))


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/solve-path", response_model=SolveResponse)
def solve_path(req: SolvePathRequest) -> SolveResponse:
    s = req.settings
    try:
        setup = problem_setup(s.dataset_path, s.n_f, s.support)
        cfg = path_config_from(s.solver, req.alpha, s.eps, setup.support, setup.mu0, s.debias)
        sol = solve_scaling_path(cfg, setup.data)
        save_solution(req.output_dir, sol, _solution_meta(req.alpha, s))
    except (ValueError, FileNotFoundError) as exc:
        raise _bad_request(exc)
    except RuntimeError as exc:
        raise HTTPException(status_code=500, detail=str(exc))
    return SolveResponse(
        objective=sol.objective,
        constraint_residual=sol.constraint_residual,
        iterations=sol.iterations,
        status=sol.status,
        output_dir=req.output_dir,
    )


@app.post("/rich", response_model=SolveResponse)
def rich_limit(req: RichLimitRequest) -> SolveResponse:
    s = req.settings
    try:
        setup = problem_setup(s.dataset_path, s.n_f, s.support)
        cfg = path_config_from(s.solver, 0.0, s.eps, setup.support, setup.mu0, s.debias)
        sol = solve_rich_limit(setup.phi, setup.data.y, cfg)
        save_solution(req.output_dir, sol, _solution_meta(0.0, s))
    except (ValueError, FileNotFoundError) as exc:
        raise _bad_request(exc)
    except RuntimeError as exc:
        raise HTTPException(status_code=500, detail=str(exc))
    return SolveResponse(
        objective=sol.objective,
        constraint_residual=sol.constraint_residual,
        iterations=sol.iterations,
        status=sol.status,
        output_dir=req.output_dir,
    )


@app.post("/ntk", response_model=KernelResponse)
def kernel_limit(req: KernelRequest) -> KernelResponse:
    s = req.settings
    try:
        setup = problem_setup(s.dataset_path, s.n_f, s.support)
        k = gram(setup.data, setup.p)
        res = solve_interpolation(k, setup.data.y, ridge=req.ridge)
        meta = _solution_meta("inf", s)
        meta["ridge"] = req.ridge
        save_kernel_solution(req.output_dir, k, res, meta)
    except (ValueError, FileNotFoundError) as exc:
        raise _bad_request(exc)
    return KernelResponse(
        min_norm_value=res.min_norm_value, jitter=res.jitter, output_dir=req.output_dir
    )


@app.post("/train-gd", response_model=TrainResponse)
def train_gd(req: TrainRequest) -> TrainResponse:
    s = req.settings
    try:
        setup = problem_setup(s.dataset_path, s.n_f, s.support)
        cloud0 = init_from_grid(setup.p, req.beta)
        cloud, history = train(cloud0, setup.data, gd_config_from(s.trainer))
        meta = {
            "beta": req.beta,
            "n_f": s.n_f,
            "width": len(setup.p),
            "dataset_path": s.dataset_path,
        }
        save_training_run(req.output_dir, cloud, history, meta)
    except (ValueError, FileNotFoundError) as exc:
        raise _bad_request(exc)
    except RuntimeError as exc:
        raise HTTPException(status_code=500, detail=str(exc))
    return TrainResponse(
        beta=req.beta,
        final_loss=history[-1],
        iterations=len(history) - 1,
        output_dir=req.output_dir,
    )


@app.post("/sweep", response_model=SweepResponse)
def sweep(req: SweepRequest) -> SweepResponse:
    try:
        cfg = SweepConfig.from_dict(req.config)
        records = run_sweep(cfg)
    except (ValueError, FileNotFoundError, TypeError) as exc:
        raise _bad_request(exc)
    cells = [r for r in records if r.beta is not None]
    failed = [r for r in cells if r.status != "ok"]
    return SweepResponse(
        output_dir=cfg.output_dir,
        config_hash=cfg.config_hash(),
        cells=len(cells),
        failed_cells=len(failed),
    )


@app.post("/eval", response_model=EvalResponse)
def eval_solution(req: EvalRequest) -> EvalResponse:
    try:
        predictor, _ = load_predictor(req.solution)
        rows = eval_surface(predictor, req.resolution)
        write_surface_csv(rows, req.out)
    except (ValueError, FileNotFoundError) as exc:
        raise _bad_request(exc)
    return EvalResponse(path=req.out, rows=len(rows))


@app.post("/compare", response_model=CompareResponse)
def compare_runs(req: CompareRequest) -> CompareResponse:
    try:
        rec = compare(req.vp_dir, req.gd_dir)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        raise _bad_request(exc)
    return CompareResponse(
        alpha=rec.alpha,
        beta=rec.beta,
        vp_value=rec.vp_value,
        gd_value=rec.gd_value,
        gap=rec.gap,
        status=rec.status,
    )
