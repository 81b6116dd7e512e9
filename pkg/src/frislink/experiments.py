"""Batch experiment commands: run pipelines and emit CSV curve artifacts.

Every artifact starts with #-prefixed provenance lines (config hash,
seed, tool version; never timestamps), then a column-header row, then
data rows with floats printed at 17 significant digits, so re-running
the same config byte-reproduces the file.
"""

from __future__ import annotations

import csv
import math

import numpy as np

from . import __version__
from .analysis import (
    ergodic_capacity_asymptotic,
    ergodic_capacity_bound,
    gamma_cdf,
    gamma_fit,
    gamma_pdf,
    gamma_quantile,
    outage_asymptotic,
    outage_probability,
)
from .channel import LinkBudget
from .config import ConfigError, ExperimentConfig, ModeSpec, db_to_linear
from .correlation import (
    SurfaceGeometry,
    build_correlation_matrix,
    principal_submatrix,
    uniform_grid_selection,
)
from .montecarlo import (
    AdaptiveFrisMode,
    RisBaselineMode,
    StaticMode,
    empirical_cdf,
    estimate_ergodic_capacity,
    estimate_outage,
    ks_statistic,
    run_trials,
)

__all__ = ["cmd_dist", "cmd_outage", "cmd_capacity", "cmd_sweep_m"]

_DIST_GRID_POINTS = 200
_DIST_QUANTILE = 0.999


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            raise ArithmeticError("non-finite value in output row")
        return format(v, ".17g")
    return str(v)


def _write_csv(path, meta: dict, columns: list, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        for key, value in meta.items():
            f.write(f"# {key}={value}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_value(v) for v in row])


def _base_meta(config: ExperimentConfig, command: str) -> dict:
    return {
        "artifact_version": 1,
        "tool_version": __version__,
        "command": command,
        "config_hash": config.config_hash,
        "seed": config.seed,
        "trials": config.trials,
        "kernel": config.kernel,
    }


def _budget(config: ExperimentConfig, snr_db: float) -> LinkBudget:
    return LinkBudget(
        gamma_bar=db_to_linear(snr_db),
        pathloss=config.pathloss,
        rate_target=config.rate_target,
    )


def _most_square_selection(geom: SurfaceGeometry, m_o: int) -> np.ndarray:
    """Uniform subgrid with m_o elements, factored as square as possible.

    Used for the analytical curves of the adaptive mode, whose actual
    per-realization selection has no fixed correlation block.
    """
    best = None
    for k_x in range(1, m_o + 1):
        if m_o % k_x:
            continue
        k_z = m_o // k_x
        if k_x <= geom.m_x and k_z <= geom.m_z:
            score = abs(k_x - k_z)
            if best is None or score < best[0]:
                best = (score, k_x, k_z)
    if best is None:
        raise ConfigError(
            f"m_o={m_o} admits no k_x*k_z factorization inside the "
            f"{geom.m_x}x{geom.m_z} grid"
        )
    return uniform_grid_selection(geom, best[1], best[2])


def _analytic_block(
    config: ExperimentConfig, spec: ModeSpec, j_full: np.ndarray
) -> np.ndarray:
    """Correlation block behind a mode's analytical curves."""
    mode = spec.mode
    if isinstance(mode, StaticMode):
        return principal_submatrix(j_full, mode.selection)
    if isinstance(mode, AdaptiveFrisMode):
        sel = _most_square_selection(config.geometry, mode.m_o)
        return principal_submatrix(j_full, sel)
    if isinstance(mode, RisBaselineMode):
        sub = SurfaceGeometry(
            m_x=mode.m_rx,
            m_z=mode.m_rz,
            w_x=config.geometry.w_x,
            w_z=config.geometry.w_z,
            wavelength=config.geometry.wavelength,
        )
        return build_correlation_matrix(sub, config.kernel)
    raise TypeError(f"unsupported mode {type(mode).__name__}")


def _run_mode(config: ExperimentConfig, spec: ModeSpec, workers: int) -> np.ndarray:
    return run_trials(
        config.geometry,
        config.kernel,
        spec.mode,
        config.trials,
        config.seed,
        workers=workers,
    )


def cmd_dist(config: ExperimentConfig, out_path, workers: int = 1) -> str:
    """Gain-distribution curves for a single static mode.

    Columns: g, analytical_pdf, analytical_cdf, empirical_cdf over 200
    gain points spanning [0, fit quantile 0.999]; the fit parameters and
    the KS distance land in the header.
    """
    statics = [s for s in config.modes if isinstance(s.mode, StaticMode)]
    if len(config.modes) != 1 or len(statics) != 1:
        raise ConfigError("dist: config must specify exactly one static mode")
    spec = statics[0]
    j_full = build_correlation_matrix(config.geometry, config.kernel)
    fit = gamma_fit(_analytic_block(config, spec, j_full))
    samples = _run_mode(config, spec, workers)
    ecdf = empirical_cdf(samples)
    ks = ks_statistic(samples, fit)
    grid = np.linspace(0.0, gamma_quantile(fit, _DIST_QUANTILE), _DIST_GRID_POINTS)
    meta = _base_meta(config, "dist")
    meta.update(
        {
            "mode": spec.label,
            "k": format(fit.shape_k, ".17g"),
            "theta": format(fit.scale_theta, ".17g"),
            "ks": format(ks, ".17g"),
        }
    )
    rows = [
        (
            float(g),
            gamma_pdf(fit, float(g)),
            gamma_cdf(fit, float(g)),
            float(ecdf.evaluate(float(g))),
        )
        for g in grid
    ]
    _write_csv(out_path, meta, ["g", "analytical_pdf", "analytical_cdf", "empirical_cdf"], rows)
    return str(out_path)


def cmd_outage(config: ExperimentConfig, out_path, workers: int = 1) -> str:
    """Outage-vs-SNR curves for every configured mode.

    Columns: snr_db, mode, analytical_po, asymptotic_po, mc_outage,
    mc_stderr, hits, reliable. Gains are sampled once per mode and
    reused across the SNR grid (only the threshold moves).
    """
    j_full = build_correlation_matrix(config.geometry, config.kernel)
    rows = []
    for spec in config.modes:
        fit = gamma_fit(_analytic_block(config, spec, j_full))
        samples = _run_mode(config, spec, workers)
        for snr_db in config.snr_grid_db:
            budget = _budget(config, snr_db)
            est = estimate_outage(samples, budget)
            rows.append(
                (
                    snr_db,
                    spec.label,
                    outage_probability(fit, budget),
                    outage_asymptotic(fit, budget),
                    est.probability,
                    est.stderr,
                    est.hits,
                    est.reliable,
                )
            )
    _write_csv(
        out_path,
        _base_meta(config, "outage"),
        [
            "snr_db",
            "mode",
            "analytical_po",
            "asymptotic_po",
            "mc_outage",
            "mc_stderr",
            "hits",
            "reliable",
        ],
        rows,
    )
    return str(out_path)


def cmd_capacity(config: ExperimentConfig, out_path, workers: int = 1) -> str:
    """Ergodic-capacity-vs-SNR curves for every configured mode.

    Columns: snr_db, mode, jensen_bound, asymptotic_bound, mc_capacity,
    mc_stderr.
    """
    j_full = build_correlation_matrix(config.geometry, config.kernel)
    rows = []
    for spec in config.modes:
        block = _analytic_block(config, spec, j_full)
        samples = _run_mode(config, spec, workers)
        for snr_db in config.snr_grid_db:
            budget = _budget(config, snr_db)
            est = estimate_ergodic_capacity(samples, budget)
            rows.append(
                (
                    snr_db,
                    spec.label,
                    ergodic_capacity_bound(block, budget),
                    ergodic_capacity_asymptotic(block, budget),
                    est.capacity,
                    est.stderr,
                )
            )
    _write_csv(
        out_path,
        _base_meta(config, "capacity"),
        ["snr_db", "mode", "jensen_bound", "asymptotic_bound", "mc_capacity", "mc_stderr"],
        rows,
    )
    return str(out_path)


def cmd_sweep_m(config: ExperimentConfig, out_path, workers: int = 1) -> str:
    """Capacity versus grid density at fixed aperture and fixed m_o.

    Requires m_grid, exactly one adaptive mode (supplying m_o), at most
    one baseline mode (the flat reference), and a single-point SNR grid.
    Columns: m_x, m_z, m, fris_capacity, fris_stderr, ris_capacity,
    ris_stderr; the baseline is run once and repeated (it does not
    depend on the sweep density).
    """
    if config.m_grid is None:
        raise ConfigError("sweep-m: config requires m_grid")
    adaptives = [s for s in config.modes if isinstance(s.mode, AdaptiveFrisMode)]
    baselines = [s for s in config.modes if isinstance(s.mode, RisBaselineMode)]
    if len(adaptives) != 1 or len(baselines) > 1:
        raise ConfigError(
            "sweep-m: config must specify exactly one adaptive_fris mode "
            "and at most one ris_baseline mode"
        )
    if len(config.snr_grid_db) != 1:
        raise ConfigError("sweep-m: snr_grid_db must contain exactly one point")
    m_o = adaptives[0].mode.m_o
    budget = _budget(config, config.snr_grid_db[0])
    if baselines:
        ris_mode = baselines[0].mode
    else:
        side = math.isqrt(m_o)
        if side * side != m_o:
            raise ConfigError(
                "sweep-m: ris_baseline mode required when m_o is not square"
            )
        ris_mode = RisBaselineMode(m_rx=side, m_rz=side)
    ris_samples = run_trials(
        config.geometry, config.kernel, ris_mode, config.trials, config.seed,
        workers=workers,
    )
    ris_est = estimate_ergodic_capacity(ris_samples, budget)
    rows = []
    for m_x, m_z in config.m_grid:
        if m_x * m_z < m_o:
            raise ConfigError(
                f"sweep-m: grid {m_x}x{m_z} has fewer than m_o={m_o} elements"
            )
        geom = SurfaceGeometry(
            m_x=m_x,
            m_z=m_z,
            w_x=config.geometry.w_x,
            w_z=config.geometry.w_z,
            wavelength=config.geometry.wavelength,
        )
        samples = run_trials(
            geom, config.kernel, AdaptiveFrisMode(m_o=m_o), config.trials,
            config.seed, workers=workers,
        )
        est = estimate_ergodic_capacity(samples, budget)
        rows.append(
            (
                m_x,
                m_z,
                m_x * m_z,
                est.capacity,
                est.stderr,
                ris_est.capacity,
                ris_est.stderr,
            )
        )
    meta = _base_meta(config, "sweep-m")
    meta.update({"m_o": m_o, "snr_db": format(config.snr_grid_db[0], ".17g")})
    _write_csv(
        out_path,
        meta,
        ["m_x", "m_z", "m", "fris_capacity", "fris_stderr", "ris_capacity", "ris_stderr"],
        rows,
    )
    return str(out_path)
