"""Command-line client for the solve service.

Every subcommand is a thin HTTP call: by default the FastAPI app is
mounted in-process (no server needed), `--server URL` targets a running
instance instead. Successful responses are printed as JSON on stdout;
errors are printed as JSON on stderr with exit code 1; usage errors exit
with code 2.
"""

import json
import math
import sys

import click
import httpx

SETTINGS_KEYS = ("dataset_path", "n_f", "eps", "debias", "support", "solver", "trainer")


def _client(server):
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _settings(config_path) -> dict:
    if not config_path:
        return {}
    with open(config_path) as fh:
        doc = json.load(fh)
    return {k: v for k, v in doc.items() if k in SETTINGS_KEYS}


def _post(server, path, payload) -> None:
    with _client(server) as client:
        resp = client.post(path, json=payload)
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        click.echo(json.dumps({"error": detail}), err=True)
        sys.exit(1)
    click.echo(json.dumps(resp.json(), indent=2))


def _parse_alpha(ctx, param, value):
    if value == "inf":
        return math.inf
    try:
        alpha = float(value)
    except ValueError:
        raise click.BadParameter("alpha must be a number or 'inf'")
    if alpha < 0:
        raise click.BadParameter("alpha must be nonnegative")
    return alpha


@click.group()
@click.option("--server", default=None, help="Base URL of a running service; in-process if omitted.")
@click.pass_context
def main(ctx, server):
    """Scaling-path solves, training runs and sweeps."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@main.command("solve-path")
@click.option("--alpha", required=True, callback=_parse_alpha, help="Scale; 0 and 'inf' dispatch to the limit solvers.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", default="solve_out", show_default=True)
@click.pass_context
def solve_path(ctx, alpha, config_path, out):
    """Solve the constrained problem at one scale."""
    settings = _settings(config_path)
    if math.isinf(alpha):
        payload = {"output_dir": out, "settings": settings}
        _post(ctx.obj["server"], "/ntk", payload)
    elif alpha == 0.0:
        payload = {"output_dir": out, "settings": settings}
        _post(ctx.obj["server"], "/rich", payload)
    else:
        payload = {"alpha": alpha, "output_dir": out, "settings": settings}
        _post(ctx.obj["server"], "/solve-path", payload)


@main.command("rich")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", default="rich_out", show_default=True)
@click.pass_context
def rich(ctx, config_path, out):
    """Solve the mass-minimal interpolation (scale 0)."""
    _post(ctx.obj["server"], "/rich", {"output_dir": out, "settings": _settings(config_path)})


@main.command("ntk")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--ridge", type=float, default=0.0, show_default=True)
@click.option("--out", default="ntk_out", show_default=True)
@click.pass_context
def ntk(ctx, config_path, ridge, out):
    """Solve the tangent-kernel interpolation (scale infinity)."""
    payload = {"output_dir": out, "ridge": ridge, "settings": _settings(config_path)}
    _post(ctx.obj["server"], "/ntk", payload)


@main.command("train-gd")
@click.option("--beta", type=float, required=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", default="gd_out", show_default=True)
@click.pass_context
def train_gd(ctx, beta, config_path, out):
    """Train the finite-width network at one output scale."""
    if beta <= 0:
        raise click.BadParameter("beta must be positive")
    payload = {"beta": beta, "output_dir": out, "settings": _settings(config_path)}
    _post(ctx.obj["server"], "/train-gd", payload)


@main.command("sweep")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", default=None, help="Overrides the config's output_dir.")
@click.pass_context
def sweep(ctx, config_path, out):
    """Run the full alpha/beta comparison sweep."""
    doc = {}
    if config_path:
        with open(config_path) as fh:
            doc = json.load(fh)
    if out is not None:
        doc["output_dir"] = out
    _post(ctx.obj["server"], "/sweep", {"config": doc})


@main.command("eval")
@click.option("--solution", required=True, type=click.Path(exists=True))
@click.option("--resolution", type=int, default=50, show_default=True)
@click.option("--out", default="surface.csv", show_default=True)
@click.pass_context
def eval_cmd(ctx, solution, resolution, out):
    """Evaluate a persisted solution on a uniform grid."""
    if resolution < 2:
        raise click.BadParameter("resolution must be at least 2")
    payload = {"solution": solution, "resolution": resolution, "out": out}
    _post(ctx.obj["server"], "/eval", payload)


@main.command("compare")
@click.option("--vp", "vp_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--gd", "gd_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.pass_context
def compare_cmd(ctx, vp_dir, gd_dir):
    """Recompute one comparison cell from persisted outputs."""
    _post(ctx.obj["server"], "/compare", {"vp_dir": vp_dir, "gd_dir": gd_dir})


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the service with uvicorn."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
