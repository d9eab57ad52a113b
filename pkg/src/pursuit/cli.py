"""Command-line entry: single runs, campaigns, generation, replay, serving.

Exit codes: 0 ok, 1 input error, 2 bound or turn-cap failure,
3 generation failure.
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import click

from .engine import STATUS_CAPTURED, Trace, check_bound, replay as replay_trace, run_game
from .environment import (
    EnvironmentError,
    EnvironmentParseError,
    compute_metrics,
    load_environment,
    save_environment,
)
from .generator import GenerationError, generate_environment
from .strategy import POLICIES

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BOUND = 2
EXIT_GEN = 3

CAMPAIGN_K = (1, 2, 3, 5)
CAMPAIGN_POLICIES = ("greedy", "random", "adversarial")


def _load(env_path: str):
    try:
        return load_environment(Path(env_path).read_text())
    except (OSError, EnvironmentParseError, EnvironmentError) as exc:
        click.echo(f"error: cannot load environment {env_path}: {exc}", err=True)
        sys.exit(EXIT_INPUT)


@click.group()
def main() -> None:
    """Pursuit-evasion engine for polygonal domains with obstacles."""


@main.command()
@click.option("--env", "env_path", required=True, type=click.Path())
@click.option("--policy", default="greedy", type=click.Choice(sorted(POLICIES)))
@click.option("--seed", default=0, type=int)
@click.option("--out", "out_path", default=None, type=click.Path())
@click.option("--turn-cap", default=None, type=int)
@click.option("--bound-constant", default=25.0, type=float)
def run(env_path, policy, seed, out_path, turn_cap, bound_constant) -> None:
    """Play one game and write its trace."""
    env = _load(env_path)
    metrics = compute_metrics(env)
    trace = run_game(env, policy, seed, turn_cap=turn_cap, metrics=metrics)
    if out_path:
        Path(out_path).write_text(trace.to_jsonl())
    ok, budget, margin = check_bound(trace, metrics, bound_constant)
    if not trace.captured:
        click.echo(f"no capture: {trace.final.get('diagnostic', 'turn cap reached')}")
        sys.exit(EXIT_BOUND)
    click.echo(
        f"captured at turn {trace.capture_turn} by {trace.final['by']}; "
        f"budget {budget:.1f}, margin {margin:.3f}, hash {trace.state_hash()[:16]}"
    )
    sys.exit(EXIT_OK if ok else EXIT_BOUND)


@main.command()
@click.option("--trace", "trace_path", required=True, type=click.Path())
@click.option("--env", "env_path", required=True, type=click.Path())
def replay(trace_path, env_path) -> None:
    """Re-simulate a trace and verify it bit-for-bit."""
    env = _load(env_path)
    try:
        trace = Trace.from_jsonl(Path(trace_path).read_text())
    except (OSError, ValueError) as exc:
        click.echo(f"error: cannot read trace {trace_path}: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    report = replay_trace(trace, env)
    if report.ok:
        click.echo(f"replay ok; hash {trace.state_hash()[:16]}")
        sys.exit(EXIT_OK)
    click.echo(
        f"replay diverged at turn {report.divergence_turn}: {report.message}",
        err=True,
    )
    sys.exit(EXIT_BOUND)


@main.command()
@click.option("--k", default=3, type=int)
@click.option("--box", default=20.0, type=float)
@click.option("--d-min", "d_min", default=1.0, type=float)
@click.option("--seed", default=0, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
def gen(k, box, d_min, seed, out_path) -> None:
    """Generate a random validated environment file."""
    try:
        env = generate_environment(k=k, box=box, d_min=d_min, seed=seed)
    except (GenerationError, ValueError) as exc:
        click.echo(f"generation failed: {exc}", err=True)
        sys.exit(EXIT_GEN)
    Path(out_path).write_text(save_environment(env))
    click.echo(f"wrote {out_path} (k={k}, box={box}, d_min={d_min})")
    sys.exit(EXIT_OK)


def _campaign_game(args):
    k, seed, box, d_min, bound_constant, turn_cap = args
    env = generate_environment(k=k, box=box, d_min=d_min, seed=seed)
    metrics = compute_metrics(env)
    policy = CAMPAIGN_POLICIES[seed % len(CAMPAIGN_POLICIES)]
    trace = run_game(env, policy, seed, turn_cap=turn_cap, metrics=metrics)
    ok, budget, margin = check_bound(trace, metrics, bound_constant)
    status = "ok" if ok else ("no_capture" if not trace.captured else "bound_fail")
    return {
        "env": env.name,
        "k": metrics.k,
        "diam": f"{metrics.diameter:.4f}",
        "seed": seed,
        "capture_turn": trace.capture_turn if trace.captured else "",
        "budget": f"{budget:.1f}",
        "margin": f"{margin:.4f}",
        "status": status,
    }


@main.command()
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--seeds", default=100, type=int)
@click.option("--k-values", default="1,2,3,5")
@click.option("--box", default=14.0, type=float)
@click.option("--d-min", "d_min", default=1.0, type=float)
@click.option("--turn-cap", default=None, type=int)
@click.option("--bound-constant", default=25.0, type=float)
@click.option("--jobs", default=1, type=int)
def campaign(out_path, seeds, k_values, box, d_min, turn_cap, bound_constant, jobs) -> None:
    """Run a batch of generated games and emit a CSV summary."""
    try:
        ks = [int(s) for s in k_values.split(",") if s.strip()]
    except ValueError:
        click.echo("error: --k-values must be a comma-separated integer list", err=True)
        sys.exit(EXIT_INPUT)
    if not ks or seeds < 1:
        click.echo("error: no environments", err=True)
        sys.exit(EXIT_INPUT)
    tasks = [
        (k, seed, box, d_min, bound_constant, turn_cap)
        for k in ks
        for seed in range(seeds)
    ]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_campaign_game, tasks, chunksize=4))
    else:
        rows = [_campaign_game(t) for t in tasks]
    fields = ["env", "k", "diam", "seed", "capture_turn", "budget", "margin", "status"]
    with open(out_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    failures = [r for r in rows if r["status"] != "ok"]
    click.echo(f"{len(rows)} games, {len(failures)} failures -> {out_path}")
    sys.exit(EXIT_OK if not failures else EXIT_BOUND)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
@click.option("--env", "env_path", default=None, type=click.Path())
def serve(host, port, env_path) -> None:
    """Start the interactive game service."""
    import uvicorn

    from .service import create_app

    default_env = _load(env_path) if env_path else None
    uvicorn.run(create_app(default_env=default_env), host=host, port=port)


if __name__ == "__main__":
    main()
