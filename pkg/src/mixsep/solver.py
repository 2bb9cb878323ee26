"""Imaginary-time minimization of the mixture energy functional.

Gradient flow on the square-root fields with an explicit Euler step,
Rayleigh-quotient shift, exact renormalization to the target atom numbers
after every step, and step halving whenever a step would raise the energy.
Accepted energies are therefore non-increasing by construction; convergence
is declared when the relative decrease stays below tol_energy for a run of
consecutive accepted steps.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NotSeparated, NumericalBlowup, StepUnstable
from .functional import (
    EnergyFunctionalParams,
    KineticStencil,
    apply_hamiltonians,
    energy_terms,
    functional_params,
    local_scale_bound,
)
from .grid import DensityField, Grid2D
from .profiles import bec_tf_profile, fermi_tf_profile, grid_for_scenario
from .scenario import MixtureScenario

_ENERGY_FLOOR = 1.0e-300
_RISE_TOL = 1.0e-12


@dataclass(frozen=True)
class SolverOptions:
    mode: str = "full"
    tol_energy: float = 1.0e-10
    consecutive: int = 10
    max_iter: int = 60000
    dtau_safety: float = 0.85
    lambda_w: float = 1.0 / 9.0
    seed: int = 42
    warm_noise: float = 0.01
    max_halvings: int = 60


@dataclass(frozen=True)
class GroundState:
    scenario: MixtureScenario
    n_b: DensityField
    n_f: DensityField
    mu_b: float
    mu_f: float
    energy: float
    energy_breakdown: dict
    energy_history: np.ndarray
    iterations: int
    converged: bool
    mode: str

    @property
    def grid(self) -> Grid2D:
        return self.n_b.grid


def _renormalize(u: np.ndarray, target: float, weights: np.ndarray) -> np.ndarray:
    if target == 0.0:
        return np.zeros_like(u)
    norm = float(np.sum(u * u * weights))
    return u * math.sqrt(target / norm)


def minimize(
    scenario: MixtureScenario,
    grid: Grid2D | None = None,
    options: SolverOptions = SolverOptions(),
    warm_start: tuple[np.ndarray, np.ndarray] | None = None,
) -> GroundState:
    """Relax to the ground state of the functional at scenario.a_bf.

    warm_start, when given, is (psi, phi) from a nearby solution; otherwise
    the flow starts from the noninteracting TF profiles. A state is always
    returned; check .converged.
    """
    if grid is None:
        grid = grid_for_scenario(scenario)
    params = functional_params(scenario, grid, options.mode, options.lambda_w)
    stencil = KineticStencil(grid)
    w = grid.weights
    n_cond = scenario.condensate_number

    if warm_start is not None:
        psi = np.array(warm_start[0], dtype=float, copy=True)
        phi = np.array(warm_start[1], dtype=float, copy=True)
    else:
        bec, _ = bec_tf_profile(scenario.bosons, n_cond, grid)
        sea, _ = fermi_tf_profile(scenario.fermions, scenario.n_fermions, grid)
        psi = np.sqrt(bec.values)
        phi = np.sqrt(sea.values)
    psi = _renormalize(psi, n_cond, w)
    phi = _renormalize(phi, scenario.n_fermions, w)

    scale_b, scale_f = local_scale_bound(params, psi, phi)
    dtau_b0 = options.dtau_safety / scale_b if n_cond > 0.0 else 0.0
    dtau_f0 = options.dtau_safety / scale_f
    dtau_b, dtau_f = dtau_b0, dtau_f0

    energy_hist: list[float] = []
    e_prev = math.inf
    psi_best = psi
    phi_best = phi
    quiet = 0
    halvings = 0
    iterations = 0
    converged = False
    grow_every = 500
    since_growth = 0

    while iterations < options.max_iter:
        k_psi = stencil.apply(psi) if params.coef_kin_b != 0.0 else None
        k_phi = stencil.apply(phi) if params.coef_kin_f != 0.0 else None
        terms = energy_terms(params, psi, phi, stencil, k_psi, k_phi)
        e_now = sum(terms.values())

        if e_now > e_prev * (1.0 + _RISE_TOL) + _ENERGY_FLOOR:
            # The step that produced these fields raised the energy: retract.
            halvings += 1
            if halvings > options.max_halvings:
                raise StepUnstable(
                    f"energy still rising after {options.max_halvings} step halvings"
                )
            dtau_b *= 0.5
            dtau_f *= 0.5
            psi, phi = psi_best, phi_best
            since_growth = 0
            iterations += 1
            continue

        # Accepted.
        rel_dec = (e_prev - e_now) / max(abs(e_now), _ENERGY_FLOOR)
        e_prev = e_now
        psi_best, phi_best = psi, phi
        energy_hist.append(e_now)
        quiet = quiet + 1 if rel_dec < options.tol_energy else 0
        if quiet >= options.consecutive:
            converged = True
            break
        halvings = 0
        since_growth += 1
        if since_growth >= grow_every:
            dtau_b = min(dtau_b * 1.5, dtau_b0)
            dtau_f = min(dtau_f * 1.5, dtau_f0)
            since_growth = 0

        h_psi, h_phi = apply_hamiltonians(params, psi, phi, stencil, k_psi, k_phi)
        if n_cond > 0.0:
            nb_norm = float(np.sum(psi * psi * w))
            mu_b = float(np.sum(w * psi * h_psi)) / nb_norm
            psi = _renormalize(psi - dtau_b * (h_psi - mu_b * psi), n_cond, w)
        nf_norm = float(np.sum(phi * phi * w))
        mu_f = float(np.sum(w * phi * h_phi)) / nf_norm
        phi = _renormalize(phi - dtau_f * (h_phi - mu_f * phi), scenario.n_fermions, w)
        iterations += 1

    psi, phi = psi_best, phi_best
    k_psi = stencil.apply(psi) if params.coef_kin_b != 0.0 else None
    k_phi = stencil.apply(phi) if params.coef_kin_f != 0.0 else None
    terms = energy_terms(params, psi, phi, stencil, k_psi, k_phi)
    h_psi, h_phi = apply_hamiltonians(params, psi, phi, stencil, k_psi, k_phi)
    nb_norm = float(np.sum(psi * psi * w))
    mu_b = float(np.sum(w * psi * h_psi)) / nb_norm if n_cond > 0.0 else 0.0
    mu_f = float(np.sum(w * phi * h_phi)) / float(np.sum(phi * phi * w))

    return GroundState(
        scenario=scenario,
        n_b=DensityField(grid, psi * psi, "bosons"),
        n_f=DensityField(grid, phi * phi, "fermions"),
        mu_b=mu_b,
        mu_f=float(mu_f),
        energy=sum(terms.values()),
        energy_breakdown=terms,
        energy_history=np.array(energy_hist),
        iterations=iterations,
        converged=converged,
        mode=options.mode,
    )


def sweep_ground_states(
    scenario: MixtureScenario,
    a_bf_values,
    grid: Grid2D | None = None,
    options: SolverOptions = SolverOptions(),
    progress=None,
) -> list[GroundState]:
    """Solve at each a_bf, warm-starting each point from the previous one.

    The warm start is perturbed with seeded relative noise before relaxing,
    which keeps a point from inheriting the previous point's topology (a
    mixed state carried past the separation threshold, or the reverse).
    """
    if grid is None:
        grid = grid_for_scenario(scenario)
    states: list[GroundState] = []
    warm = None
    for idx, a_bf in enumerate(a_bf_values):
        point = scenario.with_a_bf(float(a_bf))
        if warm is not None and options.warm_noise > 0.0:
            rng = np.random.default_rng(options.seed + 7919 * idx)
            psi0 = np.abs(warm[0] * (1.0 + options.warm_noise * rng.standard_normal(warm[0].shape)))
            phi0 = np.abs(warm[1] * (1.0 + options.warm_noise * rng.standard_normal(warm[1].shape)))
            start = (psi0, phi0)
        else:
            start = warm
        gs = minimize(point, grid, options, warm_start=start)
        states.append(gs)
        warm = (np.sqrt(gs.n_b.values), np.sqrt(gs.n_f.values))
        if progress is not None:
            progress(idx, gs)
    return states


def interface_thickness(gs: GroundState) -> float:
    """Radial 10-to-90 rise distance of n_f across the depletion edge, m.

    Measured along the row nearest z = 0 against the rim value (the maximum
    of the row). Requires a hole at least 50% deep, else NotSeparated.
    """
    grid = gs.grid
    row = gs.n_f.axial_slice()
    ref = float(np.max(row))
    if ref <= 0.0 or row[0] > 0.5 * ref:
        raise NotSeparated(
            "no phase-separated hole: central n_f is above half the rim value"
        )
    rho = grid.rho

    def first_crossing(level: float) -> float:
        above = np.nonzero(row >= level)[0]
        k = above[0]
        if k == 0:
            return rho[0]
        # linear interpolation between the straddling cells
        f = (level - row[k - 1]) / (row[k] - row[k - 1])
        return rho[k - 1] + f * (rho[k] - rho[k - 1])

    r10 = first_crossing(0.1 * ref)
    r90 = first_crossing(0.9 * ref)
    return float(r90 - r10)
