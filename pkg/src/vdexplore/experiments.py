"""Multi-seed experiment runners writing CSV traces and summaries."""

from __future__ import annotations

import csv
import logging
import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, fields
from pathlib import Path

import numpy as np

from . import mdp_theory
from .bandit import BanditSchedule
from .config import ExperimentConfig
from .gauss_math import clipped_gaussian_entropy
from .learner import PolicyState, TraceRow, Variant, init_state, train_step
from .variance_theory import RewardInterval, optimal_sigma_closed

log = logging.getLogger(__name__)

TRACE_COLUMNS = [f.name for f in fields(TraceRow)]
SUMMARY_METRICS = ["mean_reward", "mu", "sigma", "w_hat", "v_hat", "clipped_entropy"]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: Path, header: list[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])
    return path


def _finite_state(state: PolicyState) -> bool:
    vals = [state.mu, state.sigma, state.value.v_hat]
    if state.w_hat is not None:
        vals.append(state.w_hat)
    return all(math.isfinite(v) for v in vals) and state.sigma > 0


def run_seed(
    state: PolicyState,
    schedule: BanditSchedule,
    iterations: int,
    batch_size: int,
    seed: int,
    bounds,
) -> list[TraceRow]:
    """Train one run from ``state``; a non-finite parameter ends it with a NaN row."""
    rng = np.random.default_rng(seed)
    rows = []
    for t in range(1, iterations + 1):
        try:
            state, row = train_step(state, schedule, t, batch_size, rng, seed, bounds)
        except (OverflowError, ValueError, ZeroDivisionError) as exc:
            log.warning("seed %d %s diverged at iteration %d: %s", seed, state.variant.value, t, exc)
            nan = math.nan
            rows.append(TraceRow(seed, t, state.variant.value, nan, nan, nan,
                                 nan if state.w_hat is not None else None, nan, nan))
            break
        rows.append(row)
        if not _finite_state(state):
            log.warning("seed %d %s diverged at iteration %d", seed, state.variant.value, t)
            break
    return rows


def _bandit_task(args) -> list[TraceRow]:
    config, variant, seed = args
    init = config.init
    state = init_state(
        variant, mu=init.mu, sigma=init.sigma, v_hat=init.v_hat, alpha=config.value_alpha,
        floor=config.value_floor, w_hat=init.w_hat, sigmoid=config.sigmoid_init.mapping(),
        adam=config.adam.state(),
    )
    return run_seed(state, config.schedule(), config.iterations, config.batch_size, seed, config.bounds())


def _run_tasks(fn, tasks, jobs: int) -> list:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def bandit_rows(config: ExperimentConfig) -> list[TraceRow]:
    """All trace rows, ordered by seed, then variant (config order), then iteration."""
    tasks = [(config, Variant(v), seed) for seed in sorted(config.seeds) for v in config.variants]
    return [row for rows in _run_tasks(_bandit_task, tasks, config.jobs) for row in rows]


def summarize(rows: list[TraceRow]) -> list[list]:
    """Cross-seed p25/p50/p75 of each metric per (variant, iteration)."""
    groups: dict[tuple[str, int], list[TraceRow]] = defaultdict(list)
    variants: list[str] = []
    for r in rows:
        if r.variant not in variants:
            variants.append(r.variant)
        groups[(r.variant, r.iteration)].append(r)
    out = []
    for variant, it in sorted(groups, key=lambda k: (variants.index(k[0]), k[1])):
        group = groups[(variant, it)]
        line = [variant, it, len(group)]
        for metric in SUMMARY_METRICS:
            vals = np.array([getattr(r, metric) for r in group if getattr(r, metric) is not None], dtype=float)
            if vals.size == 0:
                line += [None, None, None]
            else:
                line += [float(v) for v in np.percentile(vals, [25, 50, 75])]
        out.append(line)
    return out


def summary_header() -> list[str]:
    cols = ["variant", "iteration", "n_seeds"]
    for m in SUMMARY_METRICS:
        cols += [f"{m}_p25", f"{m}_p50", f"{m}_p75"]
    return cols


def run_bandit(config: ExperimentConfig, out_dir: str | Path) -> tuple[Path, Path]:
    """Run every (seed, variant) over the schedule; write the trace and the summary."""
    out_dir = Path(out_dir)
    rows = bandit_rows(config)
    trace = write_csv(out_dir / "bandit_trace.csv", TRACE_COLUMNS, (astuple(r) for r in rows))
    summary = write_csv(out_dir / "bandit_summary.csv", summary_header(), summarize(rows))
    return trace, summary


def _convergence_task(args) -> list[TraceRow]:
    config, d, seed = args
    conv = config.convergence
    lo = conv.mu + d
    schedule = BanditSchedule.stationary(lo, lo + conv.w_true, conv.iterations)
    state = init_state(
        Variant.VD_INVERSE, mu=conv.mu, v_hat=config.init.v_hat, alpha=config.value_alpha,
        floor=conv.value_floor, w_hat=conv.w_hat, adam=config.adam.state(), fixed_mu=True,
    )
    return run_seed(state, schedule, conv.iterations, conv.batch_size, seed, config.bounds())


def convergence_rows(config: ExperimentConfig, d: float | None = None) -> list[TraceRow]:
    """VD_INVERSE with the mean frozen and a stationary reward on [mu + d, mu + d + w]."""
    d = config.convergence.d if d is None else d
    if not d > 0:
        raise ValueError(f"d must be positive, got {d}")
    tasks = [(config, d, seed) for seed in sorted(config.seeds)]
    return [row for rows in _run_tasks(_convergence_task, tasks, config.jobs) for row in rows]


def run_convergence(config: ExperimentConfig, out_dir: str | Path, d: float | None = None) -> Path:
    d = config.convergence.d if d is None else d
    rows = convergence_rows(config, d)
    sigma_star = optimal_sigma_closed(RewardInterval(d, config.convergence.w_true))
    return write_csv(Path(out_dir) / "convergence_trace.csv", TRACE_COLUMNS + ["sigma_star"],
                     (astuple(r) + (sigma_star,) for r in rows))


def final_by_seed(rows: list[TraceRow]) -> list[TraceRow]:
    last: dict[int, TraceRow] = {}
    for r in rows:
        last[r.seed] = r
    return [last[s] for s in sorted(last)]


SWEEP_COLUMNS = ["d", "w_hat", "w_true", "sigma", "sigma_star", "n_seeds"]


def convergence_sweep_rows(config: ExperimentConfig, d_list=None) -> list[list]:
    """One row per d: cross-seed medians of the final w_hat and sigma."""
    conv = config.convergence
    d_list = conv.d_list if d_list is None else d_list
    out = []
    for d in d_list:
        finals = final_by_seed(convergence_rows(config, d))
        out.append([
            float(d),
            float(np.median([r.w_hat for r in finals])),
            conv.w_true,
            float(np.median([r.sigma for r in finals])),
            optimal_sigma_closed(RewardInterval(d, conv.w_true)),
            len(finals),
        ])
    return out


def run_convergence_sweep(config: ExperimentConfig, out_dir: str | Path, d_list=None) -> Path:
    return write_csv(Path(out_dir) / "convergence_sweep.csv", SWEEP_COLUMNS,
                     convergence_sweep_rows(config, d_list))


def load_profile(name: str, w: float, normalize: bool) -> mdp_theory.QProfile:
    builtin = {
        "boxcar": mdp_theory.QProfile.boxcar,
        "triangular": mdp_theory.QProfile.triangular,
        "gaussian_bump": mdp_theory.QProfile.gaussian_bump,
    }
    profile = builtin[name](w) if name in builtin else mdp_theory.QProfile.from_file(name)
    return profile.normalized() if normalize else profile


def run_mdp_sweep(config: ExperimentConfig, out_dir: str | Path) -> tuple[Path, Path]:
    """Monotonicity table and HDR-clipping gaps for every configured profile.

    The sweep uses the profiles as tabulated (sigma* and the orderings do not
    depend on scale); the HDR check uses the mass-normalized profile when
    ``mdp.normalize`` is set.
    """
    mdp = config.mdp
    sweep, hdr = [], []
    for name in mdp.profiles:
        profile = load_profile(name, mdp.w, normalize=False)
        rows = mdp_theory.monotonicity_sweep(profile, mdp.d_grid)
        for msg in mdp_theory.sweep_violations(rows):
            log.warning("%s: %s", name, msg)
        for r in rows:
            sweep.append([name, r.d, r.sigma_star, r.v_star, r.ratio_ok, r.d < r.sigma_star < r.d + profile.width])
        hdr_profile = profile.normalized() if mdp.normalize else profile
        for alpha in mdp.alphas:
            for d in mdp.hdr_d:
                v_star, v_hat, gap = mdp_theory.hdr_bound_check(hdr_profile, alpha, d)
                hdr.append([name, alpha, d, v_star, v_hat, gap, 1.0 - alpha, gap <= 1.0 - alpha])
    out_dir = Path(out_dir)
    p1 = write_csv(out_dir / "mdp_sweep.csv",
                   ["profile", "d", "sigma_star", "v_star", "ratio_ok", "in_bracket"], sweep)
    p2 = write_csv(out_dir / "hdr_bound.csv",
                   ["profile", "alpha", "d", "v_star", "v_hat_star", "gap", "bound", "ok"], hdr)
    return p1, p2


def run_entropy_table(config: ExperimentConfig, out_dir: str | Path) -> Path:
    bounds = config.bounds()
    rows = [[mu, s, clipped_gaussian_entropy(mu, s, bounds)]
            for mu in config.entropy_grid.mu for s in config.entropy_grid.sigma]
    return write_csv(Path(out_dir) / "entropy.csv", ["mu", "sigma", "clipped_entropy"], rows)

