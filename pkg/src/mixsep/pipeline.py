"""Run orchestration and on-disk formats: CSV tables, manifests, plot data.

All files use experiment units (a0, G, nK, Hz, cm^-3, cm^6/s, s) with the
unit in every column header. Floats are written with %.12g so identical
runs produce byte-identical files; nothing time-dependent goes into a CSV.
Writes are atomic (temp file + rename). The manifest records the config
hash and a sha256 for every emitted file.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .abel import ColumnSlice, RadialProfile, center_and_symmetrize, forward_abel, inverse_abel
from .config import RunConfig, serialize_config
from .constants import A_BOHR, ATOMIC_MASS, joule_to_nk
from .errors import (
    MissingInput,
    MixsepError,
    OutputError,
    ParseError,
    ValidationError,
)
from .grid import DensityField, Grid2D
from .lossfit import DecaySeries, SmoothedCurve
from .overlap import OverlapReport, omega_eff_from_ground_state
from .physics import SpeciesParams, critical_scattering_length
from .profiles import bec_tf_profile, fermi_tf_profile, fra_peak_quantities, grid_for_scenario
from .scenario import MixtureScenario
from .solver import GroundState, SolverOptions, minimize

try:
    from importlib.metadata import PackageNotFoundError, version

    TOOL_VERSION = version("mixsep")
except PackageNotFoundError:  # running from a source tree
    TOOL_VERSION = "0.1.0"

FLOAT_FMT = ".12g"
M3_TO_CM3 = 1.0e-6        # density m^-3 -> cm^-3
M6_TO_CM6 = 1.0e-12       # overlap integral m^-6 -> cm^-6
M6S_TO_CM6S = 1.0e12      # rate coefficient m^6/s -> cm^6/s


def _f(v: float) -> str:
    return format(float(v), FLOAT_FMT)


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path


def _ensure_dir(path) -> Path:
    d = Path(path)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create directory {d}: {exc}") from exc
    return d


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


# ---------------------------------------------------------------------------
# generic CSV table with "# key = value" metadata lines


def write_table(path, header: list[str], rows, meta: dict | None = None) -> Path:
    buf = io.StringIO()
    for key, val in (meta or {}).items():
        buf.write(f"# {key} = {val if isinstance(val, str) else _f(val)}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join("nan" if v is None else _f(v) for v in row) + "\n")
    return atomic_write_text(path, buf.getvalue())


def read_table(path):
    """Returns (meta, header, rows ndarray). Inverse of write_table."""
    path = Path(path)
    if not path.exists():
        raise MissingInput(f"no such file: {path}")
    meta: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                body = s.lstrip("#").strip()
                if "=" in body:
                    k, _, v = body.partition("=")
                    meta[k.strip()] = v.strip()
                continue
            cells = next(csv.reader([s]))
            if header is None:
                header = [c.strip() for c in cells]
                continue
            try:
                rows.append([float(c) for c in cells])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad number ({exc})", line=lineno) from exc
    if header is None:
        raise ParseError(f"{path}: no header row found")
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(header)))
    if data.size and data.shape[1] != len(header):
        raise ParseError(f"{path}: row width does not match header")
    return meta, header, data


def _column(header: list[str], data: np.ndarray, name: str, path) -> np.ndarray:
    for i, h in enumerate(header):
        if h == name or h.split("[")[0] == name:
            return data[:, i]
    raise MissingInput(f"{path}: missing column {name!r}")


# ---------------------------------------------------------------------------
# density fields and ground states


def write_density_field(fld: DensityField, path) -> Path:
    g = fld.grid
    buf = io.StringIO()
    buf.write("# mixsep density-field\n")
    buf.write(f"# species = {fld.species}\n")
    buf.write(f"# n_rho = {g.n_rho}\n")
    buf.write(f"# n_z = {g.n_z}\n")
    buf.write(f"# d_rho_um = {_f(g.d_rho * 1e6)}\n")
    buf.write(f"# d_z_um = {_f(g.d_z * 1e6)}\n")
    buf.write("# units = cm^-3\n")
    for i in range(g.n_rho):
        buf.write(",".join(_f(v * M3_TO_CM3) for v in fld.values[i]) + "\n")
    return atomic_write_text(path, buf.getvalue())


def read_density_field(path) -> DensityField:
    path = Path(path)
    if not path.exists():
        raise MissingInput(f"no such file: {path}")
    meta: dict[str, str] = {}
    values: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                body = s.lstrip("#").strip()
                if "=" in body:
                    k, _, v = body.partition("=")
                    meta[k.strip()] = v.strip()
                continue
            values.append([float(c) for c in s.split(",")])
    try:
        n_rho, n_z = int(meta["n_rho"]), int(meta["n_z"])
        d_rho = float(meta["d_rho_um"]) * 1e-6
        d_z = float(meta["d_z_um"]) * 1e-6
        species = meta.get("species", "")
    except KeyError as exc:
        raise ParseError(f"{path}: missing header field {exc}") from exc
    arr = np.array(values, dtype=float) / M3_TO_CM3
    if arr.shape != (n_rho, n_z):
        raise ParseError(
            f"{path}: value block is {arr.shape}, header says {(n_rho, n_z)}"
        )
    return DensityField(Grid2D(n_rho, n_z, d_rho, d_z), arr, species)


def _species_meta(sp: SpeciesParams) -> dict:
    return {
        "name": sp.name,
        "mass_amu": sp.mass / ATOMIC_MASS,
        "nu_rho_hz": sp.omega_rho / (2.0 * math.pi),
        "nu_z_hz": sp.omega_z / (2.0 * math.pi),
        "a_intra_a0": sp.a_intra / A_BOHR,
    }


def _species_from_meta(d: dict) -> SpeciesParams:
    return SpeciesParams(
        name=d["name"],
        mass=d["mass_amu"] * ATOMIC_MASS,
        omega_rho=d["nu_rho_hz"] * 2.0 * math.pi,
        omega_z=d["nu_z_hz"] * 2.0 * math.pi,
        a_intra=d["a_intra_a0"] * A_BOHR,
    )


def save_ground_state(gs: GroundState, dirpath) -> Path:
    """Write n_b.csv, n_f.csv and meta.json into dirpath."""
    d = _ensure_dir(dirpath)
    write_density_field(gs.n_b, d / "n_b.csv")
    write_density_field(gs.n_f, d / "n_f.csv")
    sc = gs.scenario
    meta = {
        "tool": "mixsep",
        "version": TOOL_VERSION,
        "bosons": _species_meta(sc.bosons),
        "fermions": _species_meta(sc.fermions),
        "scenario": {
            "n_bosons": sc.n_bosons,
            "n_fermions": sc.n_fermions,
            "condensate_fraction": sc.condensate_fraction,
            "a_bf_a0": sc.a_bf / A_BOHR,
            "alpha": sc.alpha,
            "thermal_model": sc.thermal_model,
        },
        "results": {
            "mode": gs.mode,
            "converged": gs.converged,
            "iterations": gs.iterations,
            "energy_nk": joule_to_nk(gs.energy),
            "energy_breakdown_nk": {
                k: joule_to_nk(v) for k, v in gs.energy_breakdown.items()
            },
            "mu_b_nk": joule_to_nk(gs.mu_b),
            "mu_f_nk": joule_to_nk(gs.mu_f),
        },
    }
    atomic_write_text(d / "meta.json", json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return d


def load_ground_state(dirpath) -> GroundState:
    d = Path(dirpath)
    meta_path = d / "meta.json"
    if not meta_path.exists():
        raise MissingInput(f"no ground state at {d} (missing meta.json)")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    n_b = read_density_field(d / "n_b.csv")
    n_f = read_density_field(d / "n_f.csv")
    sc_meta = meta["scenario"]
    scenario = MixtureScenario(
        bosons=_species_from_meta(meta["bosons"]),
        fermions=_species_from_meta(meta["fermions"]),
        n_bosons=sc_meta["n_bosons"],
        n_fermions=sc_meta["n_fermions"],
        condensate_fraction=sc_meta["condensate_fraction"],
        a_bf=sc_meta["a_bf_a0"] * A_BOHR,
        alpha=sc_meta["alpha"],
        thermal_model=sc_meta["thermal_model"],
    )
    res = meta["results"]
    from .constants import nk_to_joule

    return GroundState(
        scenario=scenario,
        n_b=n_b,
        n_f=n_f,
        mu_b=nk_to_joule(res["mu_b_nk"]),
        mu_f=nk_to_joule(res["mu_f_nk"]),
        energy=nk_to_joule(res["energy_nk"]),
        energy_breakdown={
            k: nk_to_joule(v) for k, v in res["energy_breakdown_nk"].items()
        },
        energy_history=np.empty(0),
        iterations=res["iterations"],
        converged=res["converged"],
        mode=res["mode"],
    )


# ---------------------------------------------------------------------------
# manifest


@dataclass
class RunManifest:
    config_sha256: str
    created_utc: str = ""
    version: str = TOOL_VERSION
    files: list = field(default_factory=list)    # {"path", "sha256", "kind"}
    points: list = field(default_factory=list)   # per-point convergence records
    notes: list = field(default_factory=list)

    def add_file(self, base: Path, path: Path, kind: str) -> None:
        self.files.append(
            {
                "path": str(path.relative_to(base)),
                "sha256": sha256_file(path),
                "kind": kind,
            }
        )

    def write(self, path) -> Path:
        if not self.created_utc:
            self.created_utc = datetime.now(timezone.utc).isoformat(timespec="seconds")
        payload = {
            "tool": "mixsep",
            "version": self.version,
            "created_utc": self.created_utc,
            "config_sha256": self.config_sha256,
            "files": self.files,
            "points": self.points,
            "notes": self.notes,
        }
        return atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def verify_manifest(manifest_path) -> dict:
    """Check that every file the manifest lists exists with a matching hash."""
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise MissingInput(f"no such manifest: {manifest_path}")
    payload = json.loads(manifest_path.read_text(encoding="utf-8"))
    base = manifest_path.parent
    for entry in payload.get("files", []):
        p = base / entry["path"]
        if not p.exists():
            raise OutputError(f"manifest lists missing file {entry['path']}")
        actual = sha256_file(p)
        if actual != entry["sha256"]:
            raise OutputError(
                f"hash mismatch for {entry['path']}: "
                f"manifest {entry['sha256'][:12]}, file {actual[:12]}"
            )
    return payload


# ---------------------------------------------------------------------------
# sweeps


def _critical_a_bf(scenario: MixtureScenario) -> float:
    """Separation threshold in Bohr radii, from the reference peak density."""
    peaks = fra_peak_quantities(scenario)
    crit = critical_scattering_length(scenario.bosons.a_intra, peaks.n_f_peak)
    return crit / A_BOHR


def _sweep_states(config: RunConfig, mode: str, grid, progress=None):
    """Warm-started solve at every sweep point; failures yield (None, err)."""
    options = SolverOptions(
        mode=mode,
        tol_energy=config.solver.tol_energy,
        consecutive=config.solver.consecutive,
        max_iter=config.solver.max_iter,
        seed=config.solver.seed,
        warm_noise=config.solver.warm_noise,
    )
    out = []
    warm = None
    for idx, a_bf in enumerate(config.sweep_a_bf):
        point = config.scenario.with_a_bf(float(a_bf))
        start = None
        if warm is not None and options.warm_noise > 0.0:
            rng = np.random.default_rng(options.seed + 7919 * idx)
            start = tuple(
                np.abs(w * (1.0 + options.warm_noise * rng.standard_normal(w.shape)))
                for w in warm
            )
        try:
            gs = minimize(point, grid, options, warm_start=start)
        except MixsepError as exc:
            out.append((None, f"{type(exc).__name__}: {exc}"))
            warm = None
            if progress is not None:
                progress(mode, idx, float(a_bf), None)
            continue
        out.append((gs, None))
        warm = (np.sqrt(gs.n_b.values), np.sqrt(gs.n_f.values))
        if progress is not None:
            progress(mode, idx, float(a_bf), gs)
    return out


def _point_record(mode: str, a_bf: float, gs: GroundState | None, err: str | None) -> dict:
    rec = {"a_bf_a0": a_bf / A_BOHR, "mode": mode, "error": err}
    if gs is not None:
        rec.update(
            converged=gs.converged,
            iterations=gs.iterations,
            energy_nk=joule_to_nk(gs.energy),
        )
    return rec


def run_figure3_pipeline(config: RunConfig, out_dir, progress=None) -> tuple[Path, Path]:
    """Both solver modes over the sweep list; returns (csv_path, manifest_path).

    The CSV has one row per a_bf with the effective overlap from each mode
    and the zero-temperature overlap factor from the full mode; the
    predicted separation threshold rides along as metadata. Failed points
    get nan columns and an entry in the manifest.
    """
    out = _ensure_dir(out_dir)
    scenario = config.scenario
    grid = grid_for_scenario(scenario, config.n_rho, config.n_z, config.box_factor)
    config_text = serialize_config(config)
    snapshot = atomic_write_text(out / "config_snapshot.cfg", config_text)

    peaks = fra_peak_quantities(scenario)

    manifest = RunManifest(config_sha256=sha256_text(config_text))
    results: dict[str, list] = {}
    gamma_zero: dict[str, float] = {}
    for mode in ("full", "tf"):
        # Full-overlap reference: the same functional at a_bf = 0. Each
        # mode's curve is normalized by its own zero-interaction solution,
        # so the overlap columns start at exactly 1.
        opts = SolverOptions(
            mode=mode,
            tol_energy=config.solver.tol_energy,
            consecutive=config.solver.consecutive,
            max_iter=config.solver.max_iter,
            seed=config.solver.seed,
            warm_noise=config.solver.warm_noise,
        )
        gs0 = minimize(scenario.with_a_bf(0.0), grid, opts)
        reference = (gs0.n_f, gs0.n_b)
        rep0 = omega_eff_from_ground_state(
            gs0, l3=config.l3, reference=reference, peaks=peaks
        )
        gamma_zero[mode] = rep0.gamma_pred
        rec = _point_record(mode, 0.0, gs0, None)
        rec["role"] = "reference"
        manifest.points.append(rec)

        states = _sweep_states(config, mode, grid, progress)
        reports = []
        for (gs, err), a_bf in zip(states, config.sweep_a_bf):
            manifest.points.append(_point_record(mode, a_bf, gs, err))
            if gs is None:
                reports.append(None)
            else:
                reports.append(
                    omega_eff_from_ground_state(
                        gs, l3=config.l3, reference=reference, peaks=peaks
                    )
                )
        results[mode] = reports

    rows = []
    for i, a_bf in enumerate(config.sweep_a_bf):
        full: OverlapReport | None = results["full"][i]
        tf: OverlapReport | None = results["tf"][i]
        rows.append(
            [
                a_bf / A_BOHR,
                None if full is None else full.gamma_pred / gamma_zero["full"],
                None if tf is None else tf.gamma_pred / gamma_zero["tf"],
                None if full is None else full.omega,
            ]
        )
    csv_path = write_table(
        out / "sweep_omega_eff.csv",
        ["a_bf[a0]", "omega_eff_full", "omega_eff_tf", "omega_zero_T"],
        rows,
        meta={
            "critical_a_bf_a0": _critical_a_bf(scenario),
            "l3_cm6_per_s": config.l3 * M6S_TO_CM6S,
            "gamma_full_overlap_full[1/s]": gamma_zero["full"],
            "gamma_full_overlap_tf[1/s]": gamma_zero["tf"],
        },
    )
    manifest.add_file(out, csv_path, "sweep")
    manifest.add_file(out, snapshot, "config")
    manifest_path = manifest.write(out / "manifest.json")
    return csv_path, manifest_path


def run_overlap_sweep(
    config: RunConfig, out_dir, mode: str | None = None, progress=None
) -> tuple[Path, Path]:
    """One-mode sweep emitting the per-point overlap report columns."""
    out = _ensure_dir(out_dir)
    scenario = config.scenario
    mode = mode or config.solver.mode
    grid = grid_for_scenario(scenario, config.n_rho, config.n_z, config.box_factor)
    config_text = serialize_config(config)
    snapshot = atomic_write_text(out / "config_snapshot.cfg", config_text)

    peaks = fra_peak_quantities(scenario)
    ref_b, _ = bec_tf_profile(scenario.bosons, scenario.condensate_number, grid)
    ref_f, _ = fermi_tf_profile(scenario.fermions, scenario.n_fermions, grid)

    manifest = RunManifest(config_sha256=sha256_text(config_text))
    rows = []
    for (gs, err), a_bf in zip(_sweep_states(config, mode, grid, progress), config.sweep_a_bf):
        manifest.points.append(_point_record(mode, a_bf, gs, err))
        if gs is None:
            rows.append([a_bf / A_BOHR] + [None] * 9)
            continue
        rep = omega_eff_from_ground_state(
            gs, l3=config.l3, reference=(ref_f, ref_b), peaks=peaks
        )
        rows.append(
            [
                a_bf / A_BOHR,
                rep.omega,
                rep.omega_eff,
                rep.gamma_pred,
                rep.i_bb * M6_TO_CM6,
                rep.i_bt * M6_TO_CM6,
                rep.i_tt_fra * M6_TO_CM6,
                rep.n_f_peak * M3_TO_CM3,
                rep.n_b_peak * M3_TO_CM3,
                rep.n_t_peak * M3_TO_CM3,
            ]
        )
    csv_path = write_table(
        out / f"sweep_overlap_{mode}.csv",
        [
            "a_bf[a0]",
            "Omega",
            "Omega_eff",
            "gamma_pred[1/s]",
            "I_bb[cm^-6]",
            "I_bt[cm^-6]",
            "I_tt[cm^-6]",
            "n_f_peak[cm^-3]",
            "n_b_peak[cm^-3]",
            "n_t_peak[cm^-3]",
        ],
        rows,
        meta={
            "mode": mode,
            "critical_a_bf_a0": _critical_a_bf(scenario),
            "l3_cm6_per_s": config.l3 * M6S_TO_CM6S,
            "alpha": scenario.alpha,
        },
    )
    manifest.add_file(out, csv_path, "sweep")
    manifest.add_file(out, snapshot, "config")
    manifest_path = manifest.write(out / "manifest.json")
    return csv_path, manifest_path


# ---------------------------------------------------------------------------
# decay/L3 point files


def read_decay_csv(path) -> DecaySeries:
    """Columns t[s], N and optionally sigma_N."""
    meta, header, data = read_table(path)
    t = _column(header, data, "t", path)
    n = _column(header, data, "N", path)
    sigma = None
    if any(h.split("[")[0] == "sigma_N" for h in header):
        sigma = _column(header, data, "sigma_N", path)
    return DecaySeries(times=t, numbers=n, sigma=sigma)


def read_l3_points_csv(path):
    """Columns a_bf[a0], L3[cm^6/s], optional sigma[cm^6/s]; returns SI L3."""
    meta, header, data = read_table(path)
    a0 = _column(header, data, "a_bf", path)
    l3 = _column(header, data, "L3", path) / M6S_TO_CM6S
    sigma = None
    if any(h.split("[")[0] == "sigma" for h in header):
        sigma = _column(header, data, "sigma", path) / M6S_TO_CM6S
    return a0, l3, sigma


def write_smoothed_csv(curve: SmoothedCurve, path) -> Path:
    rows = [
        [a, l * M6S_TO_CM6S, lo * M6S_TO_CM6S, hi * M6S_TO_CM6S]
        for a, l, lo, hi in zip(curve.a_bf_a0, curve.l3, curve.band_lo, curve.band_hi)
    ]
    return write_table(
        path,
        ["a_bf[a0]", "L3[cm^6/s]", "band_lo[cm^6/s]", "band_hi[cm^6/s]"],
        rows,
        meta={"span": curve.span, "n_boot": curve.n_boot, "seed": curve.seed},
    )


def read_smoothed_csv(path) -> SmoothedCurve:
    meta, header, data = read_table(path)
    return SmoothedCurve(
        a_bf_a0=_column(header, data, "a_bf", path),
        l3=_column(header, data, "L3", path) / M6S_TO_CM6S,
        band_lo=_column(header, data, "band_lo", path) / M6S_TO_CM6S,
        band_hi=_column(header, data, "band_hi", path) / M6S_TO_CM6S,
        span=float(meta.get("span", "nan")),
        n_boot=int(float(meta.get("n_boot", "0"))),
        seed=int(float(meta.get("seed", "0"))),
    )


def read_profile_csv(path):
    """Two-column (x[um], value) file; returns x in meters plus values."""
    meta, header, data = read_table(path)
    if data.shape[1] < 2:
        raise ParseError(f"{path}: need two columns (x[um], value)")
    return data[:, 0] * 1e-6, data[:, 1]


def write_profile_csv(path, x_m, values, x_name: str, value_name: str = "value") -> Path:
    rows = [[x * 1e6, v] for x, v in zip(x_m, values)]
    return write_table(path, [x_name, value_name], rows)


# ---------------------------------------------------------------------------
# plot data


def emit_plot_data(kind: str, out_dir, **inputs) -> list[Path]:
    """Write plot-ready CSVs for one figure; returns the paths written.

    fig1b: ground_state + noise/seed -> projected column slice and its
    Abel reconstruction next to the true radial profile.
    fig2a: smoothed -> curve with confidence band.
    fig2b: gamma_records -> measured loss rates per set.
    fig3: pipeline_csv -> overlap curves reordered for plotting.
    """
    out = _ensure_dir(out_dir)
    if kind == "fig1b":
        return _emit_fig1b(out, **inputs)
    if kind == "fig2a":
        return _emit_fig2a(out, **inputs)
    if kind == "fig2b":
        return _emit_fig2b(out, **inputs)
    if kind == "fig3":
        return _emit_fig3(out, **inputs)
    raise ValidationError(f"unknown plot kind {kind!r}")


def _emit_fig1b(out: Path, ground_state=None, noise: float = 0.0, seed: int = 0, **_):
    if ground_state is None:
        raise MissingInput("fig1b needs ground_state")
    gs: GroundState = ground_state
    grid = gs.grid
    true_radial = RadialProfile(grid.rho.copy(), gs.n_f.axial_slice().copy())
    slc = forward_abel(true_radial)
    values = slc.values
    if noise > 0.0:
        rng = np.random.default_rng(seed)
        values = values + noise * float(np.max(values)) * rng.standard_normal(values.shape)
    noisy = ColumnSlice(slc.y, values)
    # The projection is symmetric about zero by construction; auto-detection
    # would lock onto one of the twin humps a depleted profile projects to.
    recon = inverse_abel(center_and_symmetrize(noisy, center=0.0))

    peak_col = float(np.max(slc.values))
    peak_rad = float(np.max(true_radial.values))
    col_rows = [
        [y * 1e6, t / peak_col, v / peak_col]
        for y, t, v in zip(slc.y, slc.values, noisy.values)
    ]
    p1 = write_table(
        out / "fig1b_column.csv",
        ["y[um]", "coldens_true_norm", "coldens_noisy_norm"],
        col_rows,
        meta={"noise": noise, "seed": seed, "species": gs.n_f.species},
    )
    true_on_recon = np.interp(recon.rho, true_radial.rho, true_radial.values)
    rad_rows = [
        [r * 1e6, t / peak_rad, v / peak_rad]
        for r, t, v in zip(recon.rho, true_on_recon, recon.values)
    ]
    p2 = write_table(
        out / "fig1b_radial.csv",
        ["rho[um]", "n_f_true_norm", "n_f_recon_norm"],
        rad_rows,
        meta={"noise": noise, "seed": seed, "species": gs.n_f.species},
    )
    return [p1, p2]


def _emit_fig2a(out: Path, smoothed=None, points=None, **_):
    if smoothed is None:
        raise MissingInput("fig2a needs smoothed")
    curve: SmoothedCurve = smoothed
    paths = [write_smoothed_csv(curve, out / "fig2a_curve.csv")]
    pts = points if points is not None else curve.points
    if pts:
        rows = [[a, l * M6S_TO_CM6S] for a, l in pts]
        paths.append(
            write_table(out / "fig2a_points.csv", ["a_bf[a0]", "L3[cm^6/s]"], rows)
        )
    return paths


def _emit_fig2b(out: Path, gamma_records=None, **_):
    if not gamma_records:
        raise MissingInput("fig2b needs gamma_records")
    rows = [
        [rec["a_bf_a0"], rec["gamma"], rec.get("gamma_stderr", 0.0)]
        for rec in gamma_records
    ]
    rows.sort(key=lambda r: r[0])
    return [
        write_table(
            out / "fig2b_gamma.csv",
            ["a_bf[a0]", "gamma[1/s]", "gamma_err[1/s]"],
            rows,
        )
    ]


def _emit_fig3(out: Path, pipeline_csv=None, **_):
    if pipeline_csv is None:
        raise MissingInput("fig3 needs pipeline_csv")
    meta, header, data = read_table(pipeline_csv)
    a = _column(header, data, "a_bf", pipeline_csv)
    order = np.argsort(a)
    cols = [
        _column(header, data, name, pipeline_csv)[order]
        for name in ("a_bf", "omega_zero_T", "omega_eff_tf", "omega_eff_full")
    ]
    rows = [list(r) for r in zip(*cols)]
    keep = {k: v for k, v in meta.items() if k == "critical_a_bf_a0"}
    return [
        write_table(
            out / "fig3_overlap.csv",
            ["a_bf[a0]", "omega_zero_T", "omega_eff_tf", "omega_eff_full"],
            rows,
            meta=keep,
        )
    ]
