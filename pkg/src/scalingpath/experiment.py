"""Sweep orchestration and file-format contracts.

A sweep solves the variational path problem for every alpha (dispatching to
the rich LP at 0 and the tangent-kernel solve at infinity), trains gradient
descent once per beta, bins the trained clouds to the fine grid, and writes

* table.csv   one row per (alpha, beta) cell plus a per-alpha minimum row,
* heatmap.csv the (alpha, beta, gap) triples for plotting,
* meta.json   config hash, grid sizes, tolerances and per-cell statuses.

All reals are written with 17 significant digits and no timestamps or other
run-dependent content, so identical configs produce byte-identical files.
Infinity is encoded as the token "inf" in configs and CSV cells.
"""

from __future__ import annotations

import dataclasses
import hashlib
import importlib.resources
import json
import math
import os

import numpy as np

from .grids import SphereGrid, fibonacci_s2, lift_p, lift_q
from .measures import DiscreteMeasure, scale_mass, uniform_on
from .ntk import eval_kernel_predictor, gram, solve_interpolation
from .relu import Dataset, eval_network, feature_matrix, lift_inputs
from .solver import (
    DykstraConfig,
    FbsConfig,
    PathConfig,
    PathSolution,
    PolyhedronProjector,
    embed_measure,
    solve_rich_limit,
    solve_scaling_path,
)
from .training import GdConfig, empirical_measure, init_from_grid, train
from .uot import self_potential, sinkhorn_divergence

BUNDLED_DATASET = "bundled"


def _fmt(v) -> str:
    if v is None:
        return ""
    if math.isinf(v):
        return "inf"
    return "%.17g" % v


def load_dataset(path: str) -> Dataset:
    if path == BUNDLED_DATASET:
        ref = importlib.resources.files("scalingpath").joinpath("data/synthetic10.json")
        with importlib.resources.as_file(ref) as real:
            return Dataset.from_json(real)
    return Dataset.from_json(path)


@dataclasses.dataclass(frozen=True)
class SweepConfig:
    """Configuration of one alpha/beta comparison sweep."""

    alphas: tuple = (0.1, 0.33, 0.66, 1.0, 3.3, 6.6, 10.0, 16.0, 24.0, 42.0, 48.0, 66.0)
    betas: tuple = (0.1, 0.33, 0.66, 1.0, 3.3, 6.6, 10.0, 16.0, 24.0, 42.0, 48.0, 66.0)
    dataset_path: str = BUNDLED_DATASET
    n_f: int = 576
    width: int = 1152
    eps: float = 1e-2
    output_dir: str = "sweep_out"
    debias: bool = False
    support: str = "p"
    solver: dict = dataclasses.field(default_factory=dict)
    trainer: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        for name, vals in (("alphas", self.alphas), ("betas", self.betas)):
            if len(vals) == 0:
                raise ValueError(f"{name} must be nonempty")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ValueError(f"{name} must be strictly increasing")
        if any(a < 0 for a in self.alphas) or any(b <= 0 for b in self.betas):
            raise ValueError("alphas must be >= 0 and betas > 0")
        if self.support not in ("p", "q"):
            raise ValueError("support must be 'p' or 'q'")
        if self.width != 2 * self.n_f:
            # atoms are initialized exactly on the signed lift of F
            raise ValueError("width must be 2 * n_f")

    @staticmethod
    def from_dict(doc: dict) -> "SweepConfig":
        def parse_scale(v):
            return math.inf if v == "inf" else float(v)

        kw = {}
        for key in ("dataset_path", "n_f", "width", "eps", "output_dir", "debias",
                    "support", "solver", "trainer"):
            if key in doc:
                kw[key] = doc[key]
        if "alphas" in doc:
            kw["alphas"] = tuple(parse_scale(v) for v in doc["alphas"])
        if "betas" in doc:
            kw["betas"] = tuple(float(v) for v in doc["betas"])
        return SweepConfig(**kw)

    @staticmethod
    def from_json(path) -> "SweepConfig":
        with open(path) as fh:
            return SweepConfig.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        doc = dataclasses.asdict(self)
        doc["alphas"] = ["inf" if math.isinf(a) else a for a in self.alphas]
        doc["betas"] = list(self.betas)
        return doc

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def path_config(self, alpha: float, grid, mu0) -> PathConfig:
        return path_config_from(self.solver, alpha, self.eps, grid, mu0, self.debias)

    def gd_config(self) -> GdConfig:
        return gd_config_from(self.trainer)


def path_config_from(solver: dict, alpha, eps, grid, mu0, debias) -> PathConfig:
    """PathConfig from a plain solver-knob dict (missing keys defaulted)."""
    s = dict(solver)
    fbs = FbsConfig(
        max_outer=int(s.get("max_outer", 2000)),
        grad_tol=float(s.get("grad_tol", 1e-6)),
    )
    dyk = DykstraConfig(
        tol=float(s.get("dykstra_tol", 1e-9)),
        max_iter=int(s.get("dykstra_max_iter", 5000)),
    )
    return PathConfig(
        alpha=alpha,
        eps=eps,
        grid=grid,
        mu0=mu0,
        fbs=fbs,
        dykstra=dyk,
        debias=debias,
        feas_tol=float(s.get("feas_tol", 1e-4)),
        sinkhorn_tol=float(s.get("sinkhorn_tol", 1e-9)),
        sinkhorn_max_iter=int(s.get("sinkhorn_max_iter", 5000)),
    )


def gd_config_from(trainer: dict) -> GdConfig:
    t = dict(trainer)
    return GdConfig(
        step=float(t.get("step", 0.1)),
        loss_tol=float(t.get("loss_tol", 1e-8)),
        max_iter=int(t.get("max_iter", 500_000)),
    )


@dataclasses.dataclass(frozen=True)
class ComparisonRecord:
    alpha: float
    beta: float | None
    vp_value: float | None
    gd_value: float | None
    gap: float | None
    status: str


@dataclasses.dataclass(frozen=True)
class SweepSetup:
    """Shared objects of one sweep: grids, initialization and features."""

    data: Dataset
    f_grid: SphereGrid
    p: SphereGrid
    q: SphereGrid
    mu0: DiscreteMeasure
    support: SphereGrid
    phi: np.ndarray


def problem_setup(dataset_path: str, n_f: int, support: str = "p") -> SweepSetup:
    data = load_dataset(dataset_path)
    f_grid = fibonacci_s2(n_f)
    p = lift_p(f_grid)
    q = lift_q(f_grid)
    mu0 = uniform_on(p, 1.0)
    sup = p if support == "p" else q
    phi = feature_matrix(sup, data)
    return SweepSetup(
        data=data, f_grid=f_grid, p=p, q=q, mu0=mu0, support=sup, phi=phi
    )


def build_setup(cfg: SweepConfig) -> SweepSetup:
    return problem_setup(cfg.dataset_path, cfg.n_f, cfg.support)


def _divergence_value(mu, nu, eps, debias, self_nu=None) -> float:
    res = sinkhorn_divergence(mu, nu, eps, debias=debias, self_nu=self_nu)
    return res.value


def run_sweep(cfg: SweepConfig) -> list:
    """Execute the sweep and write table.csv, heatmap.csv and meta.json.

    Returns the list of ComparisonRecord rows (minimum rows included).
    Per-cell failures are recorded in the status column and the sweep
    continues.
    """
    setup = build_setup(cfg)
    data, mu0 = setup.data, setup.mu0
    gd_cfg = cfg.gd_config()

    clouds = {}
    cloud_errors = {}
    for beta in cfg.betas:
        try:
            trained, _ = train(init_from_grid(setup.p, beta), data, gd_cfg)
            clouds[beta] = empirical_measure(trained, setup.q)
        except Exception as exc:  # recorded per cell below
            cloud_errors[beta] = f"gd_failed: {exc}"

    records = []
    statuses = {}
    prev = None  # (alpha, weights) for continuation
    for alpha in cfg.alphas:
        min_value = None
        vp_measure = None
        alpha_status = "ok"
        try:
            if alpha == 0.0:
                sol = solve_rich_limit(
                    setup.phi, data.y, cfg.path_config(0.0, setup.support, mu0)
                )
                min_value = sol.objective
                vp_measure = sol.measure
            elif math.isinf(alpha):
                k = gram(data, setup.p)
                res = solve_interpolation(k, data.y)
                min_value = res.min_norm_value
            else:
                pc = cfg.path_config(alpha, setup.support, mu0)
                w0 = None
                if prev is not None:
                    base = embed_measure(scale_mass(mu0, alpha**2 - prev[0] ** 2), setup.support)
                    w0 = np.maximum(prev[1] + base, 0.0)
                sol = solve_scaling_path(pc, data, w0=w0)
                min_value = sol.objective
                vp_measure = sol.measure
                prev = (alpha, sol.measure.weights)
        except Exception as exc:
            alpha_status = f"vp_failed: {exc}"

        records.append(
            ComparisonRecord(
                alpha=alpha,
                beta=None,
                vp_value=min_value,
                gd_value=None,
                gap=None,
                status="min" if alpha_status == "ok" else alpha_status,
            )
        )
        if math.isinf(alpha):
            continue

        scaled0 = scale_mass(mu0, alpha**2)
        self_nu = None
        vp_value = None
        if alpha_status == "ok":
            if cfg.debias:
                self_nu = self_potential(scaled0, cfg.eps)
            vp_div = _divergence_value(vp_measure, scaled0, cfg.eps, cfg.debias, self_nu)
            vp_value = (1.0 + alpha**2) * vp_div

        for beta in cfg.betas:
            status = alpha_status
            gd_value = None
            gap = None
            if beta in cloud_errors:
                status = cloud_errors[beta]
            elif status == "ok":
                try:
                    gd_div = _divergence_value(
                        clouds[beta], scaled0, cfg.eps, cfg.debias, self_nu
                    )
                    gd_value = (1.0 + alpha**2) * gd_div
                    gap = gd_value - vp_value
                except Exception as exc:
                    status = f"eval_failed: {exc}"
            records.append(
                ComparisonRecord(
                    alpha=alpha,
                    beta=beta,
                    vp_value=vp_value,
                    gd_value=gd_value,
                    gap=gap,
                    status=status,
                )
            )
            statuses[f"{_fmt(alpha)},{_fmt(beta)}"] = status

    os.makedirs(cfg.output_dir, exist_ok=True)
    _write_table(os.path.join(cfg.output_dir, "table.csv"), records)
    _write_heatmap(os.path.join(cfg.output_dir, "heatmap.csv"), records)
    _write_meta(os.path.join(cfg.output_dir, "meta.json"), cfg, setup, statuses)
    return records


def _write_table(path, records) -> None:
    with open(path, "w") as fh:
        fh.write("alpha,beta,vp_value,gd_value,gap,status\n")
        for r in records:
            fh.write(
                ",".join(
                    [
                        _fmt(r.alpha),
                        _fmt(r.beta),
                        _fmt(r.vp_value),
                        _fmt(r.gd_value),
                        _fmt(r.gap),
                        r.status,
                    ]
                )
                + "\n"
            )


def _write_heatmap(path, records) -> None:
    with open(path, "w") as fh:
        fh.write("alpha,beta,gap\n")
        for r in records:
            if r.beta is None:
                continue
            fh.write(",".join([_fmt(r.alpha), _fmt(r.beta), _fmt(r.gap)]) + "\n")


def _write_meta(path, cfg: SweepConfig, setup: SweepSetup, statuses) -> None:
    doc = {
        "config": cfg.to_dict(),
        "config_hash": cfg.config_hash(),
        "grid_sizes": {
            "f": len(setup.f_grid),
            "p": len(setup.p),
            "q": len(setup.q),
            "support": len(setup.support),
        },
        "eps": cfg.eps,
        "solver_tolerances": {
            "grad_tol": float(cfg.solver.get("grad_tol", 1e-6)),
            "feas_tol": float(cfg.solver.get("feas_tol", 1e-4)),
            "sinkhorn_tol": float(cfg.solver.get("sinkhorn_tol", 1e-9)),
        },
        "dataset": {"name": setup.data.name, "synthetic": setup.data.synthetic},
        "cell_status": statuses,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def eval_surface(solution, resolution: int, grid: SphereGrid | None = None):
    """Predictor values on a uniform resolution^2 grid over [-1, 1]^2.

    `solution` is a DiscreteMeasure or a callable on lifted 3-d points.
    Returns rows (x, y, f_clipped, f_raw) with f clipped to [-2, 2].
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    axis = np.linspace(-1.0, 1.0, resolution)
    xv, yv = np.meshgrid(axis, axis, indexing="ij")
    planar = np.column_stack([xv.ravel(), yv.ravel()])
    lifted = lift_inputs(planar)
    if isinstance(solution, DiscreteMeasure):
        values = eval_network(solution, lifted)
    else:
        values = np.asarray(solution(lifted), dtype=float)
    clipped = np.clip(values, -2.0, 2.0)
    return np.column_stack([planar, clipped, values])


def write_surface_csv(rows, path) -> None:
    with open(path, "w") as fh:
        fh.write("x,y,f,f_raw\n")
        for row in rows:
            fh.write(",".join("%.17g" % v for v in row) + "\n")


def kernel_predictor(coeffs, data: Dataset, p: SphereGrid):
    """Closure evaluating the kernel-regime predictor on lifted points."""

    def predict(points):
        return eval_kernel_predictor(coeffs, data, p, points)

    return predict


def save_solution(out_dir: str, solution, meta: dict) -> dict:
    """Persist a path/rich solve: measure.csv + grid.csv + solution.json.

    `meta` must carry alpha ("inf" allowed as a token), eps, n_f, support
    and debias so the solution is reconstructible without the config.
    """
    if solution.measure is None:
        raise ValueError("solution has no measure attached; solve on a grid")
    os.makedirs(out_dir, exist_ok=True)
    solution.measure.grid.to_csv(os.path.join(out_dir, "grid.csv"))
    solution.measure.to_csv(os.path.join(out_dir, "measure.csv"))
    doc = dict(meta)
    doc.update(
        kind="path",
        objective=solution.objective,
        constraint_residual=solution.constraint_residual,
        iterations=solution.iterations,
        status=solution.status,
    )
    with open(os.path.join(out_dir, "solution.json"), "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return doc


def save_kernel_solution(out_dir: str, k, res, meta: dict) -> dict:
    """Persist a kernel solve: gram.csv + coeffs.csv + solution.json."""
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "gram.csv"), "w") as fh:
        for row in k.entries:
            fh.write(",".join("%.17g" % v for v in row) + "\n")
    with open(os.path.join(out_dir, "coeffs.csv"), "w") as fh:
        for v in res.coeffs:
            fh.write("%.17g\n" % v)
    doc = dict(meta)
    doc.update(
        kind="ntk",
        alpha="inf",
        min_norm_value=res.min_norm_value,
        jitter=res.jitter,
    )
    with open(os.path.join(out_dir, "solution.json"), "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return doc


def save_training_run(out_dir: str, cloud, history, meta: dict) -> dict:
    """Persist a training run: cloud.csv + history.csv + gd.json."""
    from .training import save_cloud, save_history

    os.makedirs(out_dir, exist_ok=True)
    save_cloud(cloud, os.path.join(out_dir, "cloud.csv"))
    save_history(history, os.path.join(out_dir, "history.csv"))
    doc = dict(meta)
    doc.update(kind="gd", final_loss=history[-1], iterations=len(history) - 1)
    with open(os.path.join(out_dir, "gd.json"), "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return doc


def load_predictor(solution_path: str):
    """Rebuild the predictor behind a persisted solution.

    Accepts the solution directory or any file inside it; dispatches on
    the sidecar's kind. Returns (predictor, sidecar dict) where predictor
    is a DiscreteMeasure or a callable on lifted points, either way
    accepted by eval_surface.
    """
    d = solution_path
    if os.path.isfile(d):
        d = os.path.dirname(d) or "."
    sidecar = os.path.join(d, "solution.json")
    if not os.path.isfile(sidecar):
        raise FileNotFoundError(f"no solution.json next to {solution_path}")
    with open(sidecar) as fh:
        meta = json.load(fh)
    kind = meta.get("kind", "path")
    if kind == "path":
        grid = SphereGrid.from_csv(
            os.path.join(d, "grid.csv"), label=meta.get("support", "custom")
        )
        measure = DiscreteMeasure.from_csv(os.path.join(d, "measure.csv"), grid)
        return measure, meta
    if kind == "ntk":
        coeffs = np.loadtxt(os.path.join(d, "coeffs.csv"), ndmin=1)
        data = load_dataset(meta["dataset_path"])
        p = lift_p(fibonacci_s2(int(meta["n_f"])))
        return kernel_predictor(coeffs, data, p), meta
    raise ValueError(f"unknown solution kind {kind!r}")


def compare(vp_dir: str, gd_dir: str) -> ComparisonRecord:
    """Recompute one comparison cell from persisted solve/train outputs."""
    with open(os.path.join(vp_dir, "solution.json")) as fh:
        vp_meta = json.load(fh)
    with open(os.path.join(gd_dir, "gd.json")) as fh:
        gd_meta = json.load(fh)
    if vp_meta["n_f"] != gd_meta["n_f"]:
        raise ValueError("solutions use different base grids")
    alpha = math.inf if vp_meta["alpha"] == "inf" else float(vp_meta["alpha"])
    if math.isinf(alpha):
        raise ValueError("compare needs a finite-alpha variational solution")
    eps = float(vp_meta["eps"])
    debias = bool(vp_meta.get("debias", False))
    n_f = int(vp_meta["n_f"])

    f_grid = fibonacci_s2(n_f)
    p = lift_p(f_grid)
    q = lift_q(f_grid)
    mu0 = uniform_on(p, 1.0)
    support = SphereGrid.from_csv(os.path.join(vp_dir, "grid.csv"), label=vp_meta.get("support", "p"))
    measure = DiscreteMeasure.from_csv(os.path.join(vp_dir, "measure.csv"), support)

    from .training import load_cloud

    cloud = load_cloud(os.path.join(gd_dir, "cloud.csv"), float(gd_meta["beta"]))
    nu_beta = empirical_measure(cloud, q)

    scaled0 = scale_mass(mu0, alpha**2)
    self_nu = self_potential(scaled0, eps) if debias else None
    vp_value = (1.0 + alpha**2) * _divergence_value(measure, scaled0, eps, debias, self_nu)
    gd_value = (1.0 + alpha**2) * _divergence_value(nu_beta, scaled0, eps, debias, self_nu)
    return ComparisonRecord(
        alpha=alpha,
        beta=float(gd_meta["beta"]),
        vp_value=vp_value,
        gd_value=gd_value,
        gap=gd_value - vp_value,
        status="ok",
    )
