"""Config-driven pipeline: solve -> matrix elements -> OTOC -> fit -> report.

Stages communicate through files in one artifact directory:

* ``spectrum.csv``     n, E_n, r_nn, r_c, lambda_c, lambda_sc
* ``otoc.csv``         long format n, t, C
* ``sensitivity.json`` array of per-state reports (window, rates, status)
* ``manifest.json``    config echo, grid, diagnostics, timings

The manifest is (re)written before the stage's result files are moved
into place, and every file write is atomic (temp file + rename). All
numbers are formatted with shortest-roundtrip ``repr``, so re-running a
stage on unchanged inputs reproduces files byte for byte; the manifest
is run metadata (it carries timings) and is exempt from that guarantee.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .dvr import (
    BoundStateBasis,
    RadialGrid,
    build_grid,
    confinement_energy,
    reported_indices,
    solve_bound_states,
)
from .errors import ConfigError, NoBoundStatesError, NoWindowError
from .potentials import PotentialModel, make_model, potential_minimum
from .sensitivity import (
    classical_sensitivity,
    detect_growth_window,
    fit_exponential,
    semiclassical_sensitivity,
)
from .spectral import (
    MatrixElements,
    OtocSeries,
    otoc_series,
    otoc_truncation_error,
    position_matrix,
)

SPECTRUM_FILE = "spectrum.csv"
OTOC_FILE = "otoc.csv"
SENSITIVITY_FILE = "sensitivity.json"
MANIFEST_FILE = "manifest.json"

#: probe grid size for the per-state truncation/normalization checks
N_PROBE_TIMES = 33
#: auto time-grid extent, in periods of the harmonic bottom of the well
AUTO_PERIODS = 50.0


# ---------------------------------------------------------------------------
# configuration


def _require(cond, field, message):
    if not cond:
        raise ConfigError(field, message)


def validate_config(raw: dict) -> dict:
    """Normalize a config mapping, raising ConfigError naming bad fields."""
    _require(isinstance(raw, dict), "config", "top level must be a JSON object")
    cfg = {}

    pot = raw.get("potential")
    _require(isinstance(pot, dict), "potential", "missing or not an object")
    kind = pot.get("kind")
    _require(
        kind in ("harmonic", "inverted_harmonic", "lennard_jones", "tabulated"),
        "potential.kind",
        f"unknown kind {kind!r}",
    )
    if kind == "lennard_jones":
        _require(float(pot.get("c6", 0)) > 0, "potential.c6", "must be positive")
        has_c12 = pot.get("c12") is not None
        has_depth = pot.get("depth") is not None
        _require(has_c12 or has_depth, "potential.c12", "need c12 or depth")
        if has_c12:
            _require(float(pot["c12"]) > 0, "potential.c12", "must be positive")
        if has_depth:
            _require(float(pot["depth"]) > 0, "potential.depth", "must be positive")
    elif kind == "tabulated":
        _require(bool(pot.get("path")), "potential.path", "missing table path")
    else:
        _require("center" in pot, "potential.center", "missing")
        _require("k" in pot, "potential.k", "missing")
    cfg["potential"] = dict(pot)

    mass = raw.get("reduced_mass_au")
    _require(isinstance(mass, (int, float)) and mass > 0,
             "reduced_mass_au", "must be a positive number")
    cfg["reduced_mass_au"] = float(mass)

    grid = raw.get("grid")
    _require(isinstance(grid, dict), "grid", "missing or not an object")
    policy = grid.get("policy", "auto")
    _require(policy in ("auto", "explicit"), "grid.policy", f"unknown policy {policy!r}")
    n = grid.get("n")
    _require(isinstance(n, int) and n >= 16, "grid.n", "must be an integer >= 16")
    if policy == "explicit":
        _require("a" in grid and "b" in grid, "grid.a", "explicit policy needs a and b")
    cfg["grid"] = {"policy": policy, "n": n}
    if policy == "explicit":
        cfg["grid"]["a"] = float(grid["a"])
        cfg["grid"]["b"] = float(grid["b"])

    otoc = dict(raw.get("otoc") or {})
    states = otoc.get("states", "all_reported")
    if states != "all_reported":
        _require(isinstance(states, list) and len(states) > 0,
                 "otoc.states", 'must be "all_reported" or a non-empty list')
        _require(all(isinstance(s, int) and s >= 0 for s in states),
                 "otoc.states", "state indices must be integers >= 0")
        _require(len(set(states)) == len(states), "otoc.states", "entries must be unique")
    t_points = otoc.get("t_points", 4000)
    _require(isinstance(t_points, int) and t_points >= 100,
             "otoc.t_points", "must be an integer >= 100")
    t_max = otoc.get("t_max")
    if t_max is not None:
        _require(float(t_max) > 0, "otoc.t_max", "must be positive")
        t_max = float(t_max)
    truncation = otoc.get("truncation")
    if truncation is not None:
        _require(isinstance(truncation, int) and truncation >= 2,
                 "otoc.truncation", "must be an integer >= 2")
    bound = float(otoc.get("convergence_bound", 0.01))
    _require(bound > 0, "otoc.convergence_bound", "must be positive")
    cfg["otoc"] = {"states": states, "t_max": t_max, "t_points": t_points,
                   "truncation": truncation, "convergence_bound": bound}

    fit = dict(raw.get("fit") or {})
    r2_min = float(fit.get("r2_min", 0.98))
    _require(0.0 < r2_min <= 1.0, "fit.r2_min", "must be in (0, 1]")
    min_points = fit.get("min_window_points", 20)
    _require(isinstance(min_points, int) and min_points >= 3,
             "fit.min_window_points", "must be an integer >= 3")
    cfg["fit"] = {"r2_min": r2_min, "min_window_points": min_points}

    out = dict(raw.get("output") or {})
    directory = out.get("directory")
    _require(bool(directory), "output.directory", "missing")
    formats = out.get("formats", ["csv", "json"])
    _require(isinstance(formats, list) and set(formats) <= {"csv", "json"},
             "output.formats", 'must be a subset of ["csv", "json"]')
    cfg["output"] = {"directory": str(directory), "formats": sorted(set(formats))}
    return cfg


def load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON: {exc}") from exc
    return validate_config(raw)


# ---------------------------------------------------------------------------
# file helpers


def _atomic_write(path: str, writer) -> None:
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        writer(fh)
    os.replace(tmp, path)


def _write_csv(path: str, header: list[str], rows) -> None:
    def write(fh):
        out = csv.writer(fh)
        out.writerow(header)
        for row in rows:
            out.writerow([x if isinstance(x, str) else repr(x) for x in row])

    _atomic_write(path, write)


def _json_safe(obj):
    """Replace non-finite floats with None; JSON has no inf/nan."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _write_json(path: str, payload) -> None:
    payload = _json_safe(payload)
    _atomic_write(path, lambda fh: json.dump(payload, fh, indent=2, sort_keys=True,
                                             allow_nan=False))


def _read_csv(path: str) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# the computation shared by solve/otoc


@dataclass
class Solution:
    model: PotentialModel
    grid: RadialGrid
    basis: BoundStateBasis
    elements: MatrixElements
    reported: np.ndarray
    threshold: float
    t_max: float
    times: np.ndarray


def _auto_t_max(model, mass) -> float:
    r_min, _ = potential_minimum(model)
    vpp = float(model.second_derivative(r_min))
    if vpp <= 0:
        raise ConfigError("otoc.t_max", "cannot infer a time scale; set t_max explicitly")
    omega = math.sqrt(vpp / mass)
    return AUTO_PERIODS * 2.0 * math.pi / omega


def compute_solution(cfg: dict) -> Solution:
    """Solve the configured system and prepare matrix elements."""
    pot = dict(cfg["potential"])
    kind = pot.pop("kind")
    model = make_model(kind, **pot)
    mass = cfg["reduced_mass_au"]
    gcfg = cfg["grid"]
    if gcfg["policy"] == "explicit":
        grid = build_grid(model, gcfg["n"], bounds=(gcfg["a"], gcfg["b"]))
    else:
        grid = build_grid(model, gcfg["n"])
    basis = solve_bound_states(model, grid, mass)
    reported = reported_indices(model, basis)
    elements = position_matrix(basis)
    t_max = cfg["otoc"]["t_max"]
    if t_max is None:
        t_max = _auto_t_max(model, mass)
    times = np.linspace(0.0, t_max, cfg["otoc"]["t_points"])
    return Solution(model=model, grid=grid, basis=basis, elements=elements,
                    reported=reported, threshold=basis.threshold, t_max=t_max,
                    times=times)


def _rate_entries(model, mass, energy):
    """lambda_c / lambda_sc block shared by spectrum.csv and the reports."""
    classical = classical_sensitivity(model, energy, mass)
    semi = semiclassical_sensitivity(model, energy, mass)
    return classical, semi


# ---------------------------------------------------------------------------
# stages


def stage_solve(cfg: dict, out_dir: str, manifest: dict) -> Solution:
    t0 = time.perf_counter()
    sol = compute_solution(cfg)
    rows = []
    for n in sol.reported:
        energy = float(sol.basis.energies[n])
        r_nn = float(sol.elements.r_mat[n, n])
        classical, semi = _rate_entries(sol.model, sol.basis.mass, energy)
        rows.append([int(n), energy, r_nn, classical.r_c, classical.lambda_c,
                     semi.lambda_sc])
    manifest["grid"] = {"policy": cfg["grid"]["policy"], "a": sol.grid.a,
                        "b": sol.grid.b, "n": sol.grid.n, "delta": sol.grid.delta}
    manifest["bound_count"] = int(sol.basis.n_states)
    manifest["threshold"] = sol.threshold
    manifest["confinement_energy"] = confinement_energy(sol.model, sol.grid)
    manifest["reported_states"] = [int(n) for n in sol.reported]
    manifest["timings_s"]["solve"] = time.perf_counter() - t0
    _write_json(os.path.join(out_dir, MANIFEST_FILE), manifest)
    if "csv" in cfg["output"]["formats"]:
        _write_csv(os.path.join(out_dir, SPECTRUM_FILE),
                   ["n", "E_n", "r_nn", "r_c", "lambda_c", "lambda_sc"], rows)
    return sol


def _select_states(cfg: dict, sol: Solution) -> tuple[list[int], dict]:
    """Requested states plus per-state exclusion bookkeeping."""
    requested = cfg["otoc"]["states"]
    diagnostics = {}
    if requested == "all_reported":
        candidates = [int(n) for n in sol.reported]
    else:
        candidates = []
        reported = set(int(n) for n in sol.reported)
        for n in requested:
            if n >= sol.basis.n_states:
                diagnostics[n] = {"included": False, "reason": "not_bound"}
            elif n not in reported:
                diagnostics[n] = {"included": False, "reason": "not_reported"}
            else:
                candidates.append(n)
    return candidates, diagnostics


def stage_otoc(cfg: dict, out_dir: str, manifest: dict, sol: Solution) -> list[int]:
    t0 = time.perf_counter()
    bound = cfg["otoc"]["convergence_bound"]
    truncation = cfg["otoc"]["truncation"]
    probe_times = np.linspace(0.0, sol.t_max, N_PROBE_TIMES)

    candidates, diagnostics = _select_states(cfg, sol)
    included: list[int] = []
    rows = []
    for n in candidates:
        estimate = otoc_truncation_error(sol.elements, n, probe_times)
        probe_c0 = otoc_series(sol.elements, n, probe_times[:1],
                               truncation=truncation).values[0]
        c0_dev = abs(probe_c0 - 1.0)
        entry = {"truncation_error": estimate if math.isfinite(estimate) else None,
                 "c0_deviation": c0_dev}
        if estimate > bound:
            entry.update(included=False, reason="truncation_error")
        elif c0_dev > bound:
            entry.update(included=False, reason="incomplete_basis")
        else:
            entry.update(included=True, reason=None)
            included.append(n)
        diagnostics[n] = entry

    if not included:
        raise NoBoundStatesError(
            "every requested state fails the convergence bound "
            f"{bound:g}; nothing to report"
        )

    for n in included:
        series = otoc_series(sol.elements, n, sol.times, truncation=truncation)
        for t, c in zip(series.times, series.values):
            rows.append([n, float(t), float(c)])

    manifest["t_max"] = sol.t_max
    manifest["t_points"] = cfg["otoc"]["t_points"]
    manifest["state_diagnostics"] = {str(k): diagnostics[k] for k in sorted(diagnostics)}
    manifest["otoc_states"] = included
    manifest["timings_s"]["otoc"] = time.perf_counter() - t0
    _write_json(os.path.join(out_dir, MANIFEST_FILE), manifest)
    if "csv" in cfg["output"]["formats"]:
        _write_csv(os.path.join(out_dir, OTOC_FILE), ["n", "t", "C"], rows)
    return included


def _report_entry(cfg, model, mass, n, energy, series=None, diagnostics=None):
    """One sensitivity.json entry; fit fields are null for regular states."""
    classical, semi = _rate_entries(model, mass, energy)
    entry = {
        "n": int(n),
        "E_n": energy,
        "lambda_c": classical.lambda_c,
        "lambda_sc": semi.lambda_sc,
        "r_c": classical.r_c,
        "r_m": semi.r_m,
        "curvature_sign": 1 if classical.curvature > 0 else (-1 if classical.curvature < 0 else 0),
        "lambda_otoc": None,
        "alpha": None,
        "ci95": None,
        "delta_t": None,
        "lambda_dt_product": None,
        "window": None,
        "regime": "regular",
        "error": None,
    }
    diag = (diagnostics or {}).get(str(n), {})
    entry["convergence_estimate"] = diag.get("truncation_error")
    entry["c0_deviation"] = diag.get("c0_deviation")
    if diag and not diag.get("included", True):
        entry["regime"] = "excluded"
        entry["error"] = diag.get("reason")
        return entry
    if series is None:
        return entry

    try:
        window = detect_growth_window(series, r2_min=cfg["fit"]["r2_min"],
                                      min_points=cfg["fit"]["min_window_points"])
    except NoWindowError:
        return entry
    fit = fit_exponential(series, window)
    entry.update(
        regime="sensitive",
        lambda_otoc=fit.lambda_otoc,
        alpha=fit.alpha,
        ci95=fit.ci95,
        delta_t=fit.delta_t,
        lambda_dt_product=fit.lambda_dt_product,
        window={"t_start": window.t_start, "t_end": window.t_end,
                "n_points": window.n_points, "r_squared": window.r_squared},
    )
    return entry


def stage_fit(cfg: dict, out_dir: str) -> list[dict]:
    """Re-run window detection and fitting from the on-disk artifacts."""
    spectrum_path = os.path.join(out_dir, SPECTRUM_FILE)
    otoc_path = os.path.join(out_dir, OTOC_FILE)
    for path in (spectrum_path, otoc_path):
        if not os.path.exists(path):
            raise FileNotFoundError(path)

    pot = dict(cfg["potential"])
    model = make_model(pot.pop("kind"), **pot)
    mass = cfg["reduced_mass_au"]

    energies = {int(row["n"]): float(row["E_n"]) for row in _read_csv(spectrum_path)}

    by_state: dict[int, list[tuple[float, float]]] = {}
    for row in _read_csv(otoc_path):
        by_state.setdefault(int(row["n"]), []).append((float(row["t"]), float(row["C"])))

    diagnostics = {}
    manifest_path = os.path.join(out_dir, MANIFEST_FILE)
    if os.path.exists(manifest_path):
        with open(manifest_path, "r", encoding="utf-8") as fh:
            diagnostics = json.load(fh).get("state_diagnostics", {})

    entries = []
    seen = set()
    for n, points in sorted(by_state.items()):
        ts = np.array([p[0] for p in points])
        cs = np.array([p[1] for p in points])
        series = OtocSeries(state_index=n, times=ts, values=cs, truncation=len(energies))
        entries.append(_report_entry(cfg, model, mass, n, energies[n],
                                     series=series, diagnostics=diagnostics))
        seen.add(n)
    # states the otoc stage excluded still get a status entry
    for key, diag in sorted(diagnostics.items(), key=lambda kv: int(kv[0])):
        n = int(key)
        if n in seen or diag.get("included", True):
            continue
        energy = energies.get(n)
        if energy is None:
            entries.append({"n": n, "E_n": None, "regime": "excluded",
                            "error": diag.get("reason"),
                            "convergence_estimate": diag.get("truncation_error"),
                            "c0_deviation": diag.get("c0_deviation")})
        else:
            entries.append(_report_entry(cfg, model, mass, n, energy,
                                         diagnostics=diagnostics))
    entries.sort(key=lambda e: e["n"])

    if "json" in cfg["output"]["formats"]:
        _write_json(os.path.join(out_dir, SENSITIVITY_FILE), entries)
    return entries


# ---------------------------------------------------------------------------
# entry points


def _new_manifest(cfg: dict) -> dict:
    return {
        "tool_version": __version__,
        "config": cfg,
        "timings_s": {},
        "threads": os.environ.get("VDW_OTOC_THREADS"),
    }


def run_solve(cfg: dict) -> str:
    out_dir = cfg["output"]["directory"]
    os.makedirs(out_dir, exist_ok=True)
    stage_solve(cfg, out_dir, _new_manifest(cfg))
    return out_dir


def run_otoc(cfg: dict, allow_recompute: bool = True) -> str:
    out_dir = cfg["output"]["directory"]
    spectrum_path = os.path.join(out_dir, SPECTRUM_FILE)
    if not os.path.exists(spectrum_path) and not allow_recompute:
        raise FileNotFoundError(spectrum_path)
    os.makedirs(out_dir, exist_ok=True)
    manifest = _new_manifest(cfg)
    sol = stage_solve(cfg, out_dir, manifest) if not os.path.exists(spectrum_path) \
        else compute_solution(cfg)
    if "grid" not in manifest:
        manifest["grid"] = {"policy": cfg["grid"]["policy"], "a": sol.grid.a,
                            "b": sol.grid.b, "n": sol.grid.n, "delta": sol.grid.delta}
        manifest["bound_count"] = int(sol.basis.n_states)
        manifest["threshold"] = sol.threshold
        manifest["confinement_energy"] = confinement_energy(sol.model, sol.grid)
        manifest["reported_states"] = [int(n) for n in sol.reported]
    stage_otoc(cfg, out_dir, manifest, sol)
    return out_dir


def run_fit(cfg: dict) -> str:
    out_dir = cfg["output"]["directory"]
    stage_fit(cfg, out_dir)
    return out_dir


def run_report(cfg: dict) -> str:
    """Full pipeline; equivalent to solve, otoc, fit in sequence."""
    out_dir = cfg["output"]["directory"]
    os.makedirs(out_dir, exist_ok=True)
    manifest = _new_manifest(cfg)
    sol = stage_solve(cfg, out_dir, manifest)
    stage_otoc(cfg, out_dir, manifest, sol)
    stage_fit(cfg, out_dir)
    return out_dir
