"""Command-line interface.

Subcommands: sample-warps, degeneracy, distance, geodesic, align-dp,
align-sa, align-bayes.  Every command takes ``--seed`` and produces
byte-identical outputs for identical invocations; each run writes a
``manifest.json`` with the configuration, library versions and SHA-256
digests of the produced files.  ``WARPALIGN_THREADS`` caps worker
threads (used by the closed-curve seed search).

Exit codes: 0 success, 2 usage error, 3 data error.
"""

from __future__ import annotations

import functools
from pathlib import Path

import click
import numpy as np

from .align_bayes import BayesConfig, posterior_summary, sir_posterior
from .align_dp import DpConfig, dp_align, dp_align_closed
from .align_sa import SaConfig, align as sa_dispatch
from .io import (
    DataError,
    load_curve,
    load_landmarks,
    write_band,
    write_curve,
    write_json,
    write_manifest,
    write_table,
    write_trace,
    write_warp,
)
from .landmarks import constrained_align
from .shapeops import apply_seed, normalize_length, rotate
from .srvf import (
    from_srvf,
    geodesic as geodesic_path,
    l2_dist,
    resample,
    shape_dist,
    to_srvf,
    unit_normalize,
    warp_action,
    warp_curve,
)
from .warpdist import (
    SeedDistribution,
    WarpPrior,
    beta_cdf_warp,
    degeneracy_report,
    sample,
    sample_circular,
)
from .warpmap import PLWarp, identity


def _fmt(x: float) -> str:
    return repr(float(x))


def _guard(fn):
    """Map library ValueErrors raised on bad data to DataError (exit 3)."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValueError as exc:
            raise DataError(str(exc)) from None

    return wrapper


def _config(factory, **kwargs):
    """Build a config from flags; invalid flag combinations are usage errors."""
    try:
        return factory(**kwargs)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_pair(path1, path2, points):
    c1 = resample(load_curve(path1), points)
    c2 = resample(load_curve(path2), points)
    return c1, c2


def _as_shape_srvfs(c1, c2):
    q1 = unit_normalize(to_srvf(normalize_length(c1)))
    q2 = unit_normalize(to_srvf(normalize_length(c2)))
    return q1, q2


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise click.UsageError(f"expected a comma-separated integer list, got {text!r}")


def _parse_mean(text: str | None) -> PLWarp:
    if text is None or text == "uniform":
        return identity()
    if text.startswith("beta:"):
        try:
            a, b = (float(v) for v in text[len("beta:"):].split(","))
        except ValueError:
            raise click.UsageError(f"expected beta:A,B, got {text!r}")
        return beta_cdf_warp(a, b)
    raise click.UsageError(f"unknown mean warp {text!r}; use 'uniform' or 'beta:A,B'")


@click.group()
def cli():
    """Stochastic alignment of open and closed curves."""


@cli.command("sample-warps")
@click.option("--n", default=20, show_default=True, help="Partition size.")
@click.option("--theta", default=10.0, show_default=True, help="Concentration.")
@click.option("--count", default=100, show_default=True, help="Number of warps.")
@click.option("--mean", default="uniform", show_default=True,
              help="Mean warp: 'uniform' or 'beta:A,B'.")
@click.option("--circular", is_flag=True, help="Sample circle warps (uniform seed).")
@click.option("--seed", default=0, show_default=True, help="RNG seed.")
@click.option("--outdir", default="out", show_default=True)
@_guard
def sample_warps(n, theta, count, mean, circular, seed, outdir):
    """Draw warps and write them as JSON lines."""
    out = _outdir(outdir)
    prior = _config(WarpPrior, mean_warp=_parse_mean(mean), partition_size=n,
                    concentration=theta)
    rng = np.random.default_rng(seed)
    lines = []
    for _ in range(count):
        if circular:
            w = sample_circular(prior, SeedDistribution.uniform(), rng)
        else:
            w = sample(prior, rng)
        lines.append(w.to_json())
    target = out / "warps.jsonl"
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    write_manifest(out, "sample-warps",
                   {"n": n, "theta": theta, "count": count, "mean": mean,
                    "circular": circular, "seed": seed}, [target])
    click.echo(f"wrote {count} warps to {target.name}")


@cli.command("degeneracy")
@click.option("--alpha", default=1.2, show_default=True)
@click.option("--ns", default="20,100,300,500", show_default=True,
              help="Comma-separated partition sizes.")
@click.option("--samples", default=200, show_default=True)
@click.option("--partition", default="uniform", show_default=True,
              help="Partition-generating map: 'uniform' or 'beta:A,B'.")
@click.option("--seed", default=0, show_default=True)
@click.option("--outdir", default="out", show_default=True)
@_guard
def degeneracy(alpha, ns, samples, partition, seed, outdir):
    """Median sup-distance of fixed-partition samples to the limit map."""
    out = _outdir(outdir)
    n_list = _parse_ints(ns)
    cdf = _parse_mean(partition)
    rng = np.random.default_rng(seed)
    rows = degeneracy_report(n_list, alpha, cdf, samples, rng)
    target = write_table(out / "degeneracy.csv", "n,median_sup_distance", rows)
    write_manifest(out, "degeneracy",
                   {"alpha": alpha, "ns": ns, "samples": samples,
                    "partition": partition, "seed": seed}, [target])
    for n, d in rows:
        click.echo(f"n={n} median sup-distance {_fmt(d)}")


@cli.command("distance")
@click.argument("curve1", type=click.Path(exists=True))
@click.argument("curve2", type=click.Path(exists=True))
@click.option("--points", default=100, show_default=True)
@click.option("--shape", is_flag=True, help="Unit-norm shape distance instead of L2.")
@click.option("--outdir", default=None, help="Optionally record the run here.")
@_guard
def distance(curve1, curve2, points, shape, outdir):
    """Print the SRVF distance between two curves (no alignment)."""
    c1, c2 = _load_pair(curve1, curve2, points)
    if shape:
        q1, q2 = _as_shape_srvfs(c1, c2)
        d = shape_dist(q1, q2)
    else:
        d = l2_dist(to_srvf(c1), to_srvf(c2))
    click.echo(_fmt(d))
    if outdir is not None:
        out = _outdir(outdir)
        target = out / "distance.txt"
        target.write_text(_fmt(d) + "\n", encoding="utf-8")
        write_manifest(out, "distance",
                       {"curve1": str(curve1), "curve2": str(curve2),
                        "points": points, "shape": shape}, [target])


@cli.command("geodesic")
@click.argument("curve1", type=click.Path(exists=True))
@click.argument("curve2", type=click.Path(exists=True))
@click.option("--steps", default=5, show_default=True)
@click.option("--points", default=100, show_default=True)
@click.option("--shape", is_flag=True, help="Great-circle path between unit shapes.")
@click.option("--outdir", default="out", show_default=True)
@_guard
def geodesic(curve1, curve2, steps, points, shape, outdir):
    """Write the geodesic between two curves, one curve CSV per step."""
    out = _outdir(outdir)
    c1, c2 = _load_pair(curve1, curve2, points)
    if shape:
        q1, q2 = _as_shape_srvfs(c1, c2)
    else:
        q1, q2 = to_srvf(c1), to_srvf(c2)
    path = geodesic_path(q1, q2, steps)
    outputs = []
    for k, q in enumerate(path):
        outputs.append(write_curve(from_srvf(q), out / f"geodesic_{k:03d}.csv"))
    write_manifest(out, "geodesic",
                   {"curve1": str(curve1), "curve2": str(curve2), "steps": steps,
                    "points": points, "shape": shape}, outputs)
    click.echo(f"wrote {steps} geodesic steps")


@cli.command("align-dp")
@click.argument("curve1", type=click.Path(exists=True))
@click.argument("curve2", type=click.Path(exists=True))
@click.option("--points", default=100, show_default=True)
@click.option("--grid-size", default=100, show_default=True)
@click.option("--seed-stride", default=1, show_default=True,
              help="Closed curves: try every k-th grid point as the seed.")
@click.option("--shape", is_flag=True, help="Normalize to unit-length shapes first.")
@click.option("--outdir", default="out", show_default=True)
@_guard
def align_dp_cmd(curve1, curve2, points, grid_size, seed_stride, shape, outdir):
    """Dynamic-programming alignment (exhaustive seed search when closed)."""
    out = _outdir(outdir)
    c1, c2 = _load_pair(curve1, curve2, points)
    if shape:
        q1, q2 = _as_shape_srvfs(c1, c2)
    else:
        q1, q2 = to_srvf(c1), to_srvf(c2)
    cfg = _config(DpConfig, grid_size=grid_size, seed_stride=seed_stride)
    closed = q1.topology == "closed" and q2.topology == "closed"
    if closed:
        seed_val, warp, energy = dp_align_closed(q1, q2, cfg)
        q2_aligned = warp_action(apply_seed(q2, seed_val), warp)
    else:
        warp, energy = dp_align(q1, q2, cfg)
        seed_val = None
        q2_aligned = warp_action(q2, warp)
    rows = [
        ("distance_before", l2_dist(q1, q2)),
        ("distance_after", l2_dist(q1, q2_aligned)),
        ("energy", energy),
    ]
    if seed_val is not None:
        rows.append(("seed", seed_val))
    warp_path = write_warp(warp, out / "warp.json")
    energy_path = write_table(out / "energy.csv", "metric,value", rows)
    write_manifest(out, "align-dp",
                   {"curve1": str(curve1), "curve2": str(curve2), "points": points,
                    "grid_size": grid_size, "seed_stride": seed_stride,
                    "shape": shape}, [warp_path, energy_path])
    click.echo(f"energy {_fmt(energy)}")


@cli.command("align-sa")
@click.argument("curve1", type=click.Path(exists=True))
@click.argument("curve2", type=click.Path(exists=True))
@click.option("--n", default=20, show_default=True)
@click.option("--theta", default=100.0, show_default=True)
@click.option("--t0", default=10.0, show_default=True)
@click.option("--cooling", default=1.0001, show_default=True)
@click.option("--iters", default=20000, show_default=True)
@click.option("--blend", default=0.9, show_default=True)
@click.option("--mode", default="function", show_default=True,
              type=click.Choice(["function", "open_shape", "closed_shape"]))
@click.option("--kappa", default=50.0, show_default=True,
              help="Von Mises concentration for closed-curve seed proposals.")
@click.option("--points", default=100, show_default=True)
@click.option("--landmarks", default=None, type=click.Path(exists=True),
              help="CSV of matched positions a,b (function mode only).")
@click.option("--seed", default=0, show_default=True)
@click.option("--outdir", default="out", show_default=True)
@_guard
def align_sa_cmd(curve1, curve2, n, theta, t0, cooling, iters, blend, mode, kappa,
                 points, landmarks, seed, outdir):
    """Simulated-annealing alignment."""
    out = _outdir(outdir)
    cfg = _config(SaConfig, n=n, theta=theta, t0=t0, cooling=cooling,
                  max_iters=iters, blend=blend, mode=mode, von_mises_kappa=kappa)
    rng = np.random.default_rng(seed)
    c1, c2 = _load_pair(curve1, curve2, points)
    flags = {"n": n, "theta": theta, "t0": t0, "cooling": cooling, "iters": iters,
             "blend": blend, "mode": mode, "kappa": kappa, "points": points,
             "seed": seed, "landmarks": landmarks and str(landmarks)}

    if landmarks is not None:
        if mode != "function":
            raise click.UsageError("landmark constraints apply to function mode only")
        lm = load_landmarks(landmarks)
        res = constrained_align(c1, c2, lm, "sa", cfg, rng)
        payload = {
            "mode": mode,
            "warp": res.warp.to_dict(),
            "landmarks": [[float(a), float(b)] for a, b in res.prewarp.knots[1:-1]],
            "segments": [
                {"interval": list(seg.interval),
                 "theta": seg.config.theta,
                 "n": seg.config.n,
                 "initial_energy": float(seg.result.initial_energy),
                 "final_energy": float(seg.result.final_energy)}
                for seg in res.segments
            ],
        }
        traces = [list(map(float, seg.result.energy_trace)) for seg in res.segments]
        trace_path = write_trace(out / "trace.csv", traces,
                                 segment=list(range(len(traces))))
        aligned = warp_curve(c2, res.warp)
        final_warp = res.warp
    else:
        q1, q2 = (to_srvf(c1), to_srvf(c2)) if mode == "function" \
            else _as_shape_srvfs(c1, c2)
        res = sa_dispatch(q1, q2, cfg, rng)
        payload = {
            "mode": mode,
            "warp": res.warp.to_dict(),
            "initial_energy": float(res.initial_energy),
            "final_energy": float(res.final_energy),
            "iterations": int(res.energy_trace.size - 2),
        }
        if res.rotation is not None:
            payload["rotation"] = res.rotation.to_rows()
        if res.seed is not None:
            payload["seed_point"] = float(res.seed)
        trace_path = write_trace(out / "trace.csv", res.energy_trace)
        if mode == "function":
            aligned = warp_curve(c2, res.warp)
        else:
            q2w = apply_seed(q2, res.seed) if res.seed is not None else q2
            aligned = from_srvf(rotate(warp_action(q2w, res.warp), res.rotation))
        final_warp = res.warp

    result_path = write_json(out / "result.json", payload)
    warp_path = write_warp(final_warp, out / "warp.json")
    aligned_path = write_curve(aligned, out / "aligned.csv")
    write_manifest(out, "align-sa", flags,
                   [result_path, warp_path, trace_path, aligned_path])
    if "final_energy" in payload:
        click.echo(f"final energy {_fmt(payload['final_energy'])}")
    else:
        finals = [seg["final_energy"] for seg in payload["segments"]]
        click.echo(f"segment final energies {','.join(_fmt(e) for e in finals)}")


@cli.command("align-bayes")
@click.argument("curve1", type=click.Path(exists=True))
@click.argument("curve2", type=click.Path(exists=True))
@click.option("--n", default=20, show_default=True)
@click.option("--theta", default=10.0, show_default=True)
@click.option("--a0", default=0.01, show_default=True)
@click.option("--b0", default=0.01, show_default=True)
@click.option("--draws", default=20000, show_default=True)
@click.option("--resample", "resample_size", default=2000, show_default=True)
@click.option("--points", default=100, show_default=True)
@click.option("--landmarks", default=None, type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True)
@click.option("--outdir", default="out", show_default=True)
@_guard
def align_bayes_cmd(curve1, curve2, n, theta, a0, b0, draws, resample_size, points,
                    landmarks, seed, outdir):
    """Bayesian alignment: posterior mean warp and 95% credible band."""
    out = _outdir(outdir)
    prior = _config(WarpPrior, mean_warp=identity(), partition_size=n,
                    concentration=theta)
    cfg = _config(BayesConfig, prior=prior, a0=a0, b0=b0, prior_draws=draws,
                  resample_size=resample_size)
    rng = np.random.default_rng(seed)
    c1, c2 = _load_pair(curve1, curve2, points)
    summary_grid = c1.grid

    if landmarks is not None:
        lm = load_landmarks(landmarks)
        res = constrained_align(c1, c2, lm, "bayes", cfg, rng)
        if len(lm):
            summary_grid = np.union1d(summary_grid, lm.a)
        vals = np.stack([w(summary_grid) for w in res.posterior_warps])
        mean = np.maximum.accumulate(vals.mean(axis=0))
        mean[0], mean[-1] = 0.0, 1.0
        mean_warp = PLWarp.from_increments(summary_grid, np.diff(mean))
        lower = np.percentile(vals, 2.5, axis=0)
        upper = np.percentile(vals, 97.5, axis=0)
    else:
        q1, q2 = to_srvf(c1), to_srvf(c2)
        post = sir_posterior(q1, q2, cfg, rng)
        mean_warp, lower, upper = posterior_summary(post, summary_grid)
        mean = mean_warp(summary_grid)

    warp_path = write_warp(mean_warp, out / "mean_warp.json")
    band_path = write_band(out / "band.csv", summary_grid, lower, mean, upper)
    aligned_path = write_curve(warp_curve(c2, mean_warp), out / "aligned.csv")
    write_manifest(out, "align-bayes",
                   {"n": n, "theta": theta, "a0": a0, "b0": b0, "draws": draws,
                    "resample": resample_size, "points": points, "seed": seed,
                    "landmarks": landmarks and str(landmarks)},
                   [warp_path, band_path, aligned_path])
    click.echo(f"wrote posterior band to {band_path.name}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return 1
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
