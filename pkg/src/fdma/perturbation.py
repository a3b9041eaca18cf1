"""Closed-form nulling via small perturbations of the uniform baseline.

Writing element m's position as (m - (M+1)/2) dD + dx_m and its frequency
shift as (m - (M+1)/2) dF + df_m, a first-order expansion of the
beampattern at each adversary yields one linear equation per adversary.
Stacked over K adversaries this gives A dx = b (positions, with shifts at
their current values) and A df = b (shifts, with positions at their current
values); both are solved in ridge-regularized weighted least-squares form

    delta = (A^T Q A + ridge I)^{-1} A^T Q b,

where Q weights each adversary by its linear SNR prefactor.  Alternating
the two solves couples the blocks; each solve replaces the previous
perturbation of its own block outright.

An adversary sharing the intended receiver's direction contributes an
all-zero row to the position system (angle factor vanishes), and one
sharing its range contributes an all-zero row to the frequency system, so
each block can only null the adversaries its geometry reaches.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .model import ArrayDesign, Scenario
from .scenario import BaselineParams, centered_indices
from .annealing import cost

logger = logging.getLogger("fdma.perturbation")


class SingularSystemError(ValueError):
    "Unregularized normal matrix is rank-deficient."


@dataclass(frozen=True)
class PerturbConfig:
    """Ridge weights and alternation control.

    ridge None selects 1e-3 * trace(A^T Q A) / M per solve, which keeps the
    perturbations small enough for the first-order model to stay honest.
    """

    ridge_position: float | None = None
    ridge_frequency: float | None = None
    max_rounds: int = 20
    relative_tolerance: float = 1e-6

    def __post_init__(self):
        for ridge in (self.ridge_position, self.ridge_frequency):
            if ridge is not None and ridge < 0.0:
                raise ValueError("ridge weights must be non-negative")
        if self.max_rounds < 0:
            raise ValueError("max_rounds must be non-negative")
        if not self.relative_tolerance > 0.0:
            raise ValueError("relative_tolerance must be positive")


@dataclass(frozen=True)
class NullingSystem:
    """One linearized nulling block: K x M coefficients, K targets, K weights.

    q_diag holds the diagonal of the SNR weighting matrix,
    q_k = P L_k / (M sigma_k^2).
    """

    a: np.ndarray
    b: np.ndarray
    q_diag: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        b = np.asarray(self.b, dtype=float)
        q = np.asarray(self.q_diag, dtype=float)
        if a.shape[0] != b.size or a.shape[0] != q.size:
            raise ValueError("system dimensions are inconsistent")
        if np.any(q <= 0.0):
            raise ValueError("SNR weights must be strictly positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "q_diag", q)


@dataclass(frozen=True)
class RoundRecord:
    "One alternation step: which block was solved and where the cost landed."

    round: int
    subproblem: str
    cost: float
    clip_count: int


def _angle_deltas(scenario: Scenario) -> np.ndarray:
    cos_b = math.cos(scenario.bob.angle_rad)
    return np.array([math.cos(e.angle_rad) - cos_b for e in scenario.eves])


def _range_deltas(scenario: Scenario) -> np.ndarray:
    return np.array([scenario.bob.range_m - e.range_m for e in scenario.eves])


def _snr_weights(scenario: Scenario, num_antennas: int) -> np.ndarray:
    return scenario.tx_power_linear * np.array(
        [e.path_loss_linear / (num_antennas * e.noise_power_linear) for e in scenario.eves]
    )


def _position_phase_matrix(scenario: Scenario, params: BaselineParams,
                           freq_shifts: np.ndarray, f0: float) -> np.ndarray:
    "Phases of the uniform-grid beampattern terms, one row per adversary."
    c = scenario.speed_of_light
    idx = centered_indices(len(freq_shifts))
    return (2.0 * np.pi / c) * (
        f0 * params.uniform_spacing * np.outer(_angle_deltas(scenario), idx)
        + np.outer(_range_deltas(scenario), np.ones_like(idx)) * freq_shifts[None, :]
    )


def _frequency_phase_matrix(scenario: Scenario, params: BaselineParams,
                            positions: np.ndarray, f0: float) -> np.ndarray:
    "Phases of the linear-ramp beampattern terms, one row per adversary."
    c = scenario.speed_of_light
    idx = centered_indices(len(positions))
    return (2.0 * np.pi / c) * (
        f0 * np.outer(_angle_deltas(scenario), positions)
        + params.uniform_freq_step * np.outer(_range_deltas(scenario), idx)
    )


def position_phase(m: int, k: int, scenario: Scenario, params: BaselineParams,
                   freq_shifts: np.ndarray, f0: float) -> float:
    "Scalar entry of the position-system phase matrix (0-based m, k)."
    return float(_position_phase_matrix(scenario, params,
                                        np.asarray(freq_shifts, dtype=float), f0)[k, m])


def frequency_phase(m: int, k: int, scenario: Scenario, params: BaselineParams,
                    positions: np.ndarray, f0: float) -> float:
    "Scalar entry of the frequency-system phase matrix (0-based m, k)."
    return float(_frequency_phase_matrix(scenario, params,
                                         np.asarray(positions, dtype=float), f0)[k, m])


def build_position_system(scenario: Scenario, params: BaselineParams,
                          freq_shifts: np.ndarray, f0: float) -> NullingSystem:
    "Linear system whose solution perturbs element positions toward nulls."
    freq_shifts = np.asarray(freq_shifts, dtype=float)
    phases = _position_phase_matrix(scenario, params, freq_shifts, f0)
    factor = (2.0 * np.pi * f0 / scenario.speed_of_light) * _angle_deltas(scenario)
    return NullingSystem(
        a=factor[:, None] * np.sin(phases),
        b=np.cos(phases).sum(axis=1),
        q_diag=_snr_weights(scenario, freq_shifts.size),
    )


def build_frequency_system(scenario: Scenario, params: BaselineParams,
                           positions: np.ndarray, f0: float) -> NullingSystem:
    "Linear system whose solution perturbs frequency shifts toward nulls."
    positions = np.asarray(positions, dtype=float)
    phases = _frequency_phase_matrix(scenario, params, positions, f0)
    factor = (2.0 * np.pi / scenario.speed_of_light) * _range_deltas(scenario)
    return NullingSystem(
        a=factor[:, None] * np.sin(phases),
        b=np.cos(phases).sum(axis=1),
        q_diag=_snr_weights(scenario, positions.size),
    )


def default_ridge(system: NullingSystem) -> float:
    "Ridge weight 1e-3 * trace(A^T Q A) / M, floored to stay positive."
    num_cols = system.a.shape[1]
    trace = float(np.einsum("km,k,km->", system.a, system.q_diag, system.a))
    return 1e-3 * trace / num_cols if trace > 0.0 else 1.0


def solve_ridge(system: NullingSystem, ridge: float) -> np.ndarray:
    """Ridge-regularized weighted least-squares solution of the nulling system.

    Solves (A^T Q A + ridge I) delta = A^T Q b through a symmetric
    positive-definite factorization.  With ridge zero the normal matrix has
    rank at most K < M and the solve fails with SingularSystemError.
    """
    if ridge < 0.0:
        raise ValueError("ridge must be non-negative")
    a, q = system.a, system.q_diag
    normal = (a.T * q) @ a + ridge * np.eye(a.shape[1])
    rhs = a.T @ (q * system.b)
    try:
        return cho_solve(cho_factor(normal), rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError("normal matrix is singular; use a positive ridge") from exc


def apply_position_perturbation(design: ArrayDesign, delta_x: np.ndarray,
                                params: BaselineParams) -> tuple[ArrayDesign, int]:
    """Add a position perturbation to the given baseline design.

    Constraint violations are clipped rather than rejected, and the number
    of adjustments is returned so that non-minor perturbations stay
    visible.  Spacings below the minimum are pushed back up; if the span
    then overflows the aperture, the spacing excesses are shrunk affinely
    and the span is recentred; a span that merely sits off-centre past an
    aperture edge is translated back inside.
    """
    delta_x = np.asarray(delta_x, dtype=float)
    raw = design.positions + delta_x
    adjusted = raw.copy()
    clipped = 0
    for m in range(1, raw.size):
        floor = adjusted[m - 1] + params.min_spacing
        if raw[m] < floor:
            adjusted[m] = floor
            clipped += 1
    half_width = params.aperture_half_width
    span = adjusted[-1] - adjusted[0] if adjusted.size > 1 else 0.0
    if span > 2.0 * half_width:
        d = np.diff(adjusted)
        slack = 2.0 * half_width - (d.size * params.min_spacing)
        excess = np.maximum(d - params.min_spacing, 0.0)
        scale = slack / excess.sum() if excess.sum() > 0 else 0.0
        d = params.min_spacing + scale * excess
        clipped += int(np.count_nonzero(excess > 0))
        adjusted = -d.sum() / 2.0 + np.concatenate(([0.0], np.cumsum(d)))
    elif adjusted[-1] > half_width:
        adjusted -= adjusted[-1] - half_width
        clipped += 1
    elif adjusted[0] < -half_width:
        adjusted += -half_width - adjusted[0]
        clipped += 1
    return ArrayDesign(adjusted, design.f0, design.freq_shifts), clipped


def apply_frequency_perturbation(design: ArrayDesign, delta_f: np.ndarray,
                                 params: BaselineParams) -> tuple[ArrayDesign, int]:
    "Add a frequency perturbation to the given design, clipped to the shift box."
    delta_f = np.asarray(delta_f, dtype=float)
    raw = design.freq_shifts + delta_f
    lo, hi = params.freq_shift_bounds
    clipped = int(np.count_nonzero((raw < lo) | (raw > hi)))
    return ArrayDesign(design.positions, design.f0, np.clip(raw, lo, hi)), clipped


def first_order_beampattern(scenario: Scenario, params: BaselineParams,
                            freq_shifts: np.ndarray, delta_x: np.ndarray,
                            k: int, f0: float) -> complex:
    """First-order beampattern at adversary k for a small position perturbation.

    The exact pattern is approximated by Taylor-expanding the perturbation
    phase to first order around the uniform grid; the small cross phase
    between frequency shifts and position offsets is dropped.  The overall
    range phase is restored so the value is directly comparable with the
    exact beampattern.
    """
    freq_shifts = np.asarray(freq_shifts, dtype=float)
    delta_x = np.asarray(delta_x, dtype=float)
    phases = _position_phase_matrix(scenario, params, freq_shifts, f0)[k]
    terms = np.exp(-1j * phases)
    slope = (2.0 * np.pi * f0 / scenario.speed_of_light) * _angle_deltas(scenario)[k]
    approx = terms.sum() - 1j * slope * (delta_x @ terms)
    carrier = math.tau * f0 * _range_deltas(scenario)[k] / scenario.speed_of_light
    return complex(np.exp(-1j * carrier) * approx)


def alternate_perturb(scenario: Scenario, baseline: ArrayDesign,
                      params: BaselineParams, cfg: PerturbConfig,
                      trace: list | None = None,
                      phases: tuple[str, ...] = ("positions", "shifts")) -> ArrayDesign:
    """Alternate closed-form position and shift perturbations of a baseline.

    Each round rebuilds one block's system from the other block's current
    state, solves it, and re-applies the resulting perturbation to the
    baseline profile.  Stops when the relative cost change over a full
    round drops below the tolerance; returns the best design visited
    (never worse than the baseline).
    """
    if scenario.num_eves >= baseline.num_antennas:
        raise ValueError("need fewer eavesdroppers than antennas")
    if not phases or any(p not in ("positions", "shifts") for p in phases):
        raise ValueError("phases must be a non-empty subset of ('positions', 'shifts')")
    if scenario.num_eves == 0 or cfg.max_rounds == 0:
        return baseline

    f0 = baseline.f0
    design = baseline
    best_design, best_cost = baseline, cost(scenario, baseline)
    previous = best_cost
    for round_idx in range(1, cfg.max_rounds + 1):
        for phase in phases:
            if phase == "positions":
                system = build_position_system(scenario, params, design.freq_shifts, f0)
                ridge = cfg.ridge_position
                delta = solve_ridge(system, default_ridge(system) if ridge is None else ridge)
                perturbed, clipped = apply_position_perturbation(baseline, delta, params)
                design = ArrayDesign(perturbed.positions, f0, design.freq_shifts)
            else:
                system = build_frequency_system(scenario, params, design.positions, f0)
                ridge = cfg.ridge_frequency
                delta = solve_ridge(system, default_ridge(system) if ridge is None else ridge)
                perturbed, clipped = apply_frequency_perturbation(baseline, delta, params)
                design = ArrayDesign(design.positions, f0, perturbed.freq_shifts)
            current = cost(scenario, design)
            if trace is not None:
                trace.append(RoundRecord(round_idx, phase, current, clipped))
            if current < best_cost:
                best_design, best_cost = design, current
        change = abs(previous - current) / max(previous, 1e-300)
        logger.debug("perturbation round %d: cost %.6g (change %.3g)",
                     round_idx, current, change)
        if change < cfg.relative_tolerance:
            break
        previous = current
    return best_design
