"""The four artifact figures.

Layouts follow the usual presentation for this kind of study: potential
geometry and spectrum panels, correlator traces low and high in the
spectrum (log scale, with the stored exponential fits overlaid as
dashed lines), and the fitted rates against both local predictions.
Rendering is deterministic: fixed figure geometry, no timestamps, and
fits are drawn from sensitivity.json exactly as stored, never refit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import artifacts

FIGURE_IDS = ("potential_panels", "otoc_low", "otoc_high", "lambda_vs_n")

_SAVE_OPTS = {"dpi": 150, "metadata": {"Software": None}}


@dataclass(frozen=True)
class FigureSpec:
    artifact_dir: str
    figure_id: str
    out_path: str
    states: tuple[int, ...] | None = None


def _sensitive_entries(sensitivity):
    return [e for e in sensitivity
            if e.get("regime") == "sensitive" and e.get("lambda_otoc") is not None]


def build_potential_panels(directory: str):
    manifest = artifacts.load_manifest(directory)
    spectrum = artifacts.load_spectrum(directory)
    mass = manifest["config"]["reduced_mass_au"]

    n = [row["n"] for row in spectrum]
    e = [row["E_n"] for row in spectrum]
    r_c = [row["r_c"] for row in spectrum]
    r_nn = [row["r_nn"] for row in spectrum]
    # |V''(r_c)| reconstructed from the stored rate definition only
    curv = [mass * row["lambda_c"] ** 2 for row in spectrum]

    fig, axes = plt.subplots(1, 3, figsize=(12.0, 3.6))
    ax = axes[0]
    ax.plot(r_c, e, "-", color="tab:red", lw=1.5, label="V(r) at turning points")
    twin = ax.twinx()
    twin.plot(r_c, curv, "-", color="tab:blue", lw=1.2, label="|V''(r_c)|")
    twin.set_yscale("log")
    twin.set_ylabel("|V''(r_c)| (hartree/bohr$^2$)", color="tab:blue")
    ax.set_xlabel("r (bohr)")
    ax.set_ylabel("energy (hartree)", color="tab:red")
    ax.set_title("(a) potential sampled at outer turning points")

    axes[1].plot(n, e, ".", ms=4, color="black")
    axes[1].set_xlabel("n")
    axes[1].set_ylabel("E$_n$ (hartree)")
    axes[1].set_title("(b) bound spectrum")

    axes[2].plot(n, r_nn, ".", ms=4, color="tab:green")
    axes[2].set_xlabel("n")
    axes[2].set_ylabel(r"$\langle n|r|n\rangle$ (bohr)")
    axes[2].set_title("(c) mean separation")
    fig.tight_layout()
    return fig


def _pick_states(available, requested, count, spread=False):
    if requested:
        missing = [n for n in requested if n not in available]
        if missing:
            raise KeyError(f"states {missing} not present in otoc.csv")
        return list(requested)
    ordered = sorted(available)
    if not spread or len(ordered) <= count:
        return ordered[:count]
    idx = np.linspace(0, len(ordered) - 1, count).round().astype(int)
    return [ordered[i] for i in sorted(set(idx))]


def build_otoc_low(directory: str, states=None):
    series = artifacts.load_otoc(directory)
    chosen = _pick_states(set(series), states, count=4)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for n in chosen:
        t, c = series[n]
        ax.plot(t, c, lw=0.9, label=f"n = {n}")
    ax.set_yscale("log")
    ax.set_xlabel("t (a.u.)")
    ax.set_ylabel("C$_n$(t)")
    ax.set_title("correlators, low modes")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    return fig


def build_otoc_high(directory: str, states=None):
    series = artifacts.load_otoc(directory)
    sensitivity = {e["n"]: e for e in _sensitive_entries(
        artifacts.load_sensitivity(directory))}
    pool = sorted(set(series) & set(sensitivity)) or sorted(series)
    chosen = _pick_states(set(pool), states, count=4, spread=True)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for n in chosen:
        t, c = series[n]
        (line,) = ax.plot(t, c, lw=0.9, label=f"n = {n}")
        entry = sensitivity.get(n)
        if entry and entry.get("window"):
            w = entry["window"]
            span = np.linspace(w["t_start"], w["t_end"], 64)
            overlay = entry["alpha"] * np.exp(entry["lambda_otoc"] * span)
            ax.plot(span, overlay, "--", lw=1.6, color=line.get_color())
    ax.set_yscale("log")
    ax.set_xlabel("t (a.u.)")
    ax.set_ylabel("C$_n$(t)")
    ax.set_title("correlators, high modes, stored exponential fits dashed")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    return fig


def build_lambda_vs_n(directory: str, states=None):
    sensitivity = artifacts.load_sensitivity(directory)
    rated = [e for e in sensitivity if e.get("lambda_c") is not None]
    if states:
        rated = [e for e in rated if e["n"] in set(states)]
    fitted = [e for e in rated if e.get("regime") == "sensitive"]

    fig, (top, bottom) = plt.subplots(
        2, 1, figsize=(6.0, 6.0), sharex=True,
        gridspec_kw={"height_ratios": [2.0, 1.0]},
    )
    top.errorbar(
        [e["n"] for e in fitted],
        [e["lambda_otoc"] for e in fitted],
        yerr=[e["ci95"] for e in fitted],
        fmt="o", ms=4, color="tab:red", capsize=2.5, label="fitted rate",
    )
    top.plot([e["n"] for e in rated], [2.0 * e["lambda_c"] for e in rated],
             "s-", ms=3, lw=0.8, color="tab:cyan", label="2x turning-point rate")
    top.plot([e["n"] for e in rated], [2.0 * e["lambda_sc"] for e in rated],
             "^-", ms=3, lw=0.8, color="tab:blue", label="2x wavefunction-peak rate")
    top.set_ylabel(r"$\lambda$ (1/a.u.)")
    top.legend(fontsize=8)

    bottom.plot([e["n"] for e in fitted],
                [e["lambda_dt_product"] for e in fitted],
                "o", ms=4, color="black")
    bottom.axhline(1.0, color="gray", lw=0.8, ls=":")
    bottom.set_xlabel("n")
    bottom.set_ylabel(r"$\lambda\,\Delta t$")
    fig.tight_layout()
    return fig


_BUILDERS = {
    "potential_panels": lambda d, s: build_potential_panels(d),
    "otoc_low": build_otoc_low,
    "otoc_high": build_otoc_high,
    "lambda_vs_n": build_lambda_vs_n,
}


def render(spec: FigureSpec) -> str:
    """Render one figure id from the artifact directory to `out_path`."""
    if spec.figure_id not in _BUILDERS:
        raise KeyError(f"unknown figure id {spec.figure_id!r}; have {FIGURE_IDS}")
    artifacts.load_manifest(spec.artifact_dir)  # required for every figure
    builder = _BUILDERS[spec.figure_id]
    if spec.figure_id == "potential_panels":
        fig = builder(spec.artifact_dir, None)
    else:
        fig = builder(spec.artifact_dir, spec.states)
    try:
        fig.savefig(spec.out_path, **_SAVE_OPTS)
    finally:
        plt.close(fig)
    return spec.out_path
