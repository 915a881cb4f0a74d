"""Preset grids that regenerate the datasets behind the four figures.

All presets write the generic sweep CSV. Figure 1 adds a per-state sidecar,
figure 4 a difference sidecar. Figure 3 is the closed-form ζ = θ surface and
involves no sampling.
"""

import csv
from pathlib import Path

import numpy as np

from .channels import NoiseModel
from .experiments import (
    Grid,
    SweepConfig,
    SweepResult,
    format_float,
    mc_state_average,
    sweep,
    write_results,
)
from .fidelity import analytic_cz_coherent_equal
from .gates import Kind, build_decomposition

PI = np.pi

FIGURES = (1, 2, 3, 4)


def fig1_config(reps=1000, seed=0):
    return SweepConfig(
        kinds=(Kind.CP,),
        gamma=Grid.point(0.0),
        sigma_theta=Grid(0.0, 0.06 * PI, 31),
        sigma_zeta=Grid.point(0.0),
        reps=reps,
        seed=seed,
    )


def fig2_config(reps=1000, seed=0):
    return SweepConfig(
        kinds=(Kind.CZ,),
        gamma=Grid(0.0, 2 * PI, 50),
        sigma_theta=Grid(0.0, 0.06 * PI, 30),
        reps=reps,
        seed=seed,
    )


def fig4_config(reps=1000, seed=0):
    return SweepConfig(
        kinds=(Kind.CP, Kind.CZ),
        gamma=Grid.point(0.01 * PI),
        sigma_theta=Grid(0.0, 0.06 * PI, 13),
        p=Grid(0.0, 0.001, 11),
        reps=reps,
        seed=seed,
    )


def fig3_surface(n_sigma=41, n_gamma=61, seed=0):
    """Closed-form ζ = θ surface over θ ∈ [-0.1π, 0.1π], γ ∈ [-1.5π, 1.5π]."""
    out = []
    for g in np.linspace(-1.5 * PI, 1.5 * PI, n_gamma):
        for t in np.linspace(-0.1 * PI, 0.1 * PI, n_sigma):
            f = float(analytic_cz_coherent_equal(g, t))
            out.append(SweepResult(Kind.CZ.value, float(g), float(t), float(t), 0.0, f, 0.0, 0, seed))
    return out


def fig1_state_rows(config):
    """Per-state Monte Carlo means for each σθ of the figure-1 grid."""
    rows = []
    for index, g, t, z, p in config.points():
        mean, se = mc_state_average(
            build_decomposition(Kind.CP, g), NoiseModel(t, z, p), config.reps, config.seed, index
        )
        for j in range(16):
            rows.append((t, j + 1, mean[j], se[j]))
    return rows


def _sidecar(path, suffix):
    path = Path(path)
    return path.with_name(path.stem + suffix)


def _write_rows(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([x if isinstance(x, (int, str)) else format_float(x) for x in row])


def run_figure(fig, output, reps=1000, seed=0, jobs=1):
    """Generate the dataset for ``fig`` and return the sweep records."""
    if fig not in FIGURES:
        raise ValueError(f"unknown figure {fig!r}; choose from {FIGURES}")
    output = Path(output)
    if fig == 3:
        results = fig3_surface(seed=seed)
        desc = {"figure": 3, "surface": "1 - theta^2 (0.3 + 0.04 sin gamma + 0.17 cos gamma)",
                "theta": [-0.1 * PI, 0.1 * PI, 41], "gamma": [-1.5 * PI, 1.5 * PI, 61]}
        write_results(results, output, desc)
        return results

    config = {1: fig1_config, 2: fig2_config, 4: fig4_config}[fig](reps, seed)
    results = sweep(config, jobs)
    extra = {"figure": fig}
    if fig == 1:
        side = _sidecar(output, ".states.csv")
        _write_rows(side, ("sigma_theta", "state", "fidelity_mean", "fidelity_std_error"), fig1_state_rows(config))
        extra["states_csv"] = side.name
    if fig == 4:
        half = len(results) // 2
        rows = [
            (a.gamma, a.sigma_theta, a.sigma_zeta, a.p, a.fidelity_mean - b.fidelity_mean)
            for a, b in zip(results[:half], results[half:])
        ]
        side = _sidecar(output, ".diff.csv")
        _write_rows(side, ("gamma", "sigma_theta", "sigma_zeta", "p", "delta_f"), rows)
        extra["diff_csv"] = side.name
    write_results(results, output, config.describe(), extra)
    return results
