"""Flat key/value run configuration.

Config files hold one `key = value` pair per line; `#` starts a comment.
`f0_hz` is the only required key, everything else defaults to the standard
scenario (see README for the full key table).  The intended receiver may be
given either in Cartesian form (bob_x_m / bob_y_m) or in polar form
(bob_range_m / bob_angle_deg), but not both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .annealing import AlternationConfig, AnnealerConfig
from .model import Placement, Scenario, SPEED_OF_LIGHT, wavelength
from .perturbation import PerturbConfig
from .scenario import BaselineParams, GridSpec, LinkBudgetConfig, PolarDomain, \
    make_placement


class ConfigError(ValueError):
    "Configuration problem, annotated with the offending key and line."

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        detail = message
        if key is not None:
            detail += f" (key: {key})"
        if line is not None:
            detail += f" (line {line})"
        super().__init__(detail)
        self.key = key
        self.line = line


@dataclass
class RunConfig:
    """Every tunable of the batch tool, with scenario defaults filled in."""

    # physics / link budget
    f0_hz: float = 0.0  # required; 0 sentinel trips the validation below
    speed_of_light: float = SPEED_OF_LIGHT
    tx_power_dbm: float = 5.0
    noise_power_dbm: float = -80.0
    ref_path_loss_db: float = 30.0
    path_loss_exponent_coeff: float = 25.0

    # geometry
    bob_x_m: float | None = None
    bob_y_m: float | None = None
    bob_range_m: float | None = None
    bob_angle_deg: float | None = None
    m: int = 21
    k: int = 3

    # baseline grid (spacings in wavelengths so they track f0)
    delta_f_hz: float = -1e6
    delta_d_over_lambda: float = 0.75
    min_spacing_over_lambda: float = 0.5
    aperture_over_lambda: float | None = None  # None -> m wavelengths
    delta_f_min_hz: float = -10e6
    delta_f_max_hz: float = 10e6

    # rng
    seed: int = 20240803

    # raster grid
    grid_x_min_m: float = -150.0
    grid_x_max_m: float = 150.0
    grid_y_min_m: float = 1.0
    grid_y_max_m: float = 300.0
    grid_resolution_m: float = 1.0

    # sweeps
    m_values: tuple[int, ...] = (11, 15, 21, 27, 31)
    k_values: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    sweep_k_m_values: tuple[int, ...] = (21, 31)
    trials: int = 20

    # adversary sampling domain
    eve_r_min_m: float = 20.0
    eve_r_max_m: float = 200.0
    eve_theta_min_deg: float = 10.0
    eve_theta_max_deg: float = 170.0

    # optimizer knobs
    sa_initial_temperature: float | None = None
    sa_cooling: float = 0.95
    sa_iterations: int = 5000
    sa_rounds: int = 4
    sa_round_tol: float = 1e-3
    ridge_position: float | None = None
    ridge_frequency: float | None = None
    perturb_rounds: int = 20
    perturb_tol: float = 1e-6

    def __post_init__(self):
        if not self.f0_hz > 0.0:
            raise ConfigError("missing or non-positive required key", key="f0_hz")
        cartesian = self.bob_x_m is not None or self.bob_y_m is not None
        polar = self.bob_range_m is not None or self.bob_angle_deg is not None
        if cartesian and polar:
            raise ConfigError("give the receiver either in Cartesian or polar form, not both",
                              key="bob_x_m")
        if not cartesian and not polar:
            self.bob_x_m, self.bob_y_m = 30.0, 90.0
        if self.m < 1:
            raise ConfigError("need at least one antenna", key="m")
        if self.k < 0:
            raise ConfigError("adversary count must be non-negative", key="k")

    # -- derived objects -------------------------------------------------

    def link_budget(self) -> LinkBudgetConfig:
        return LinkBudgetConfig(self.tx_power_dbm, self.noise_power_dbm,
                                self.ref_path_loss_db, self.path_loss_exponent_coeff)

    def bob_polar(self) -> tuple[float, float]:
        if self.bob_range_m is not None:
            return float(self.bob_range_m), math.radians(float(self.bob_angle_deg))
        x, y = float(self.bob_x_m), float(self.bob_y_m)
        return math.hypot(x, y), math.atan2(y, x)

    def bob(self) -> Placement:
        r, theta = self.bob_polar()
        return make_placement(r, theta, self.link_budget())

    def baseline_params(self, num_antennas: int | None = None) -> BaselineParams:
        m = self.m if num_antennas is None else num_antennas
        lam = wavelength(self.f0_hz, self.speed_of_light)
        aperture = self.aperture_over_lambda if self.aperture_over_lambda is not None else m
        return BaselineParams(
            uniform_spacing=self.delta_d_over_lambda * lam,
            uniform_freq_step=self.delta_f_hz,
            aperture_half_width=aperture * lam,
            min_spacing=self.min_spacing_over_lambda * lam,
            freq_shift_bounds=(self.delta_f_min_hz, self.delta_f_max_hz),
        )

    def base_scenario(self) -> Scenario:
        "Scenario shell with no adversaries; sweeps attach their own."
        cfg = self.link_budget()
        return Scenario(self.bob(), (), 10.0 ** (cfg.tx_power_dbm / 10.0),
                        self.speed_of_light)

    def grid(self) -> GridSpec:
        return GridSpec(self.grid_x_min_m, self.grid_x_max_m,
                        self.grid_y_min_m, self.grid_y_max_m, self.grid_resolution_m)

    def eve_domain(self) -> PolarDomain:
        return PolarDomain(self.eve_r_min_m, self.eve_r_max_m,
                           math.radians(self.eve_theta_min_deg),
                           math.radians(self.eve_theta_max_deg))

    def annealer(self) -> AnnealerConfig:
        return AnnealerConfig(self.sa_initial_temperature, self.sa_cooling,
                              self.sa_iterations, self.seed)

    def alternation(self) -> AlternationConfig:
        return AlternationConfig(self.sa_rounds, self.sa_round_tol)

    def perturber(self) -> PerturbConfig:
        return PerturbConfig(self.ridge_position, self.ridge_frequency,
                             self.perturb_rounds, self.perturb_tol)

    def snapshot(self) -> dict:
        "Fully resolved key/value view for the run manifest."
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out


_INT_KEYS = {"m", "k", "seed", "trials", "sa_iterations", "sa_rounds", "perturb_rounds"}
_INT_TUPLE_KEYS = {"m_values", "k_values", "sweep_k_m_values"}
_KEY_ALIASES = {"M": "m", "K": "k"}
_VALID_KEYS = {f.name for f in fields(RunConfig)}


def _parse_value(key: str, raw: str, line_no: int):
    try:
        if key in _INT_TUPLE_KEYS:
            return tuple(int(part.strip()) for part in raw.split(",") if part.strip())
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"cannot parse value {raw!r}", key=key, line=line_no) from exc


def parse_config_text(text: str) -> RunConfig:
    values: dict = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError("expected 'key = value'", line=line_no)
        key, raw = (part.strip() for part in stripped.split("=", 1))
        key = _KEY_ALIASES.get(key, key)
        if key not in _VALID_KEYS:
            raise ConfigError("unknown configuration key", key=key, line=line_no)
        if key in values:
            raise ConfigError("duplicate configuration key", key=key, line=line_no)
        values[key] = _parse_value(key, raw, line_no)
    if "f0_hz" not in values:
        raise ConfigError("missing required key", key="f0_hz")
    return RunConfig(**values)


def parse_config_file(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config_text(handle.read())
