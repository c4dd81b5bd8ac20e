"""Circuit parameters, defaults, validation and JSON (de)serialization."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

BOLTZMANN = 1.380649e-23  # J/K

HEADROOM_EPS = 0.10
SEED_MAX = 2**64 - 1


class ConfigError(ValueError):
    """Raised when a config document cannot be turned into CircuitParams."""


@dataclass(frozen=True)
class PolynomialDelay:
    t0: float
    alpha: float
    beta: float = 0.0
    gamma: float = 0.0

    variant = "polynomial"


@dataclass(frozen=True)
class PmosStarvedDelay:
    k_factor: float
    v_tp: float = 0.4
    c_load: float = 5e-15
    v_swing: float = 1.0
    stages: int = 8

    variant = "pmos_starved"


DelayModel = Union[PolynomialDelay, PmosStarvedDelay]

_DELAY_VARIANTS = {cls.variant: cls for cls in (PolynomialDelay, PmosStarvedDelay)}


@dataclass(frozen=True)
class DacNonideality:
    v_early: float | None = None
    mismatch_sigma: float = 0.0


@dataclass(frozen=True)
class DigitalPower:
    alpha_sw: float = 0.1
    c_dig: float = 0.4e-12


@dataclass(frozen=True)
class CircuitParams:
    """Every physical constant the simulator uses, in SI units."""

    i_lsb: float = 11.5e-9
    n_dac_bits: int = 4
    c_int: float = 200e-15
    v_dd: float = 1.0
    v_sat: float = 0.3
    t_clk_pulse: float = 20e-9
    t_clk_tdc: float = 1e-9
    temperature: float = 300.0
    delay_model: DelayModel = field(default_factory=lambda: default_delay_model())
    dac_nonideality: DacNonideality | None = None
    noise_enabled: bool = False
    t_meas: float = 32e-9
    t_ctrl: float = 4e-9
    p_digital: DigitalPower = field(default_factory=DigitalPower)
    seed: int = 0

    @property
    def max_code(self) -> int:
        return 2**self.n_dac_bits - 1

    @property
    def volts_per_product(self) -> float:
        """Ideal capacitor voltage for one weight LSB integrated over one pulse."""
        return self.i_lsb * self.t_clk_pulse / self.c_int

    @property
    def v_full_scale(self) -> float:
        """Ideal capacitor voltage at the largest input-weight product."""
        return self.max_code * self.i_lsb * self.max_code * self.t_clk_pulse / self.c_int

    def replace(self, **changes) -> "CircuitParams":
        return dataclasses.replace(self, **changes)


def default_delay_model(target_delay: float = 2e-9, v_dd: float = 1.0) -> PmosStarvedDelay:
    # k_factor calibrated so the cell delay at zero control voltage is target_delay
    proto = PmosStarvedDelay(k_factor=1.0)
    overdrive = v_dd - proto.v_tp
    charge = proto.stages * proto.c_load * proto.v_swing
    k = charge / (target_delay * overdrive**2)
    # step k down by ulps until the evaluated delay is not below the target,
    # so a counter reading of the zero-input delay lands exactly on target/T
    while charge / (k * overdrive * overdrive) < target_delay:
        k = math.nextafter(k, 0.0)
    return dataclasses.replace(proto, k_factor=k)


def default_params() -> CircuitParams:
    return CircuitParams()


def _positive(name: str, value, out: list[str]) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        out.append(f"{name} must be positive")


def validate(params: CircuitParams) -> list[str]:
    """Return every invariant violation found in ``params``.

    An empty list means the parameter set is usable. Violations are plain
    strings so they can be printed or compared in tests.
    """
    problems: list[str] = []
    scalars = ("i_lsb", "c_int", "v_dd", "v_sat", "t_clk_pulse", "t_clk_tdc",
               "temperature", "t_meas", "t_ctrl")
    typed = [(n, getattr(params, n)) for n in scalars]
    typed += [(f"p_digital.{f.name}", getattr(params.p_digital, f.name))
              for f in dataclasses.fields(params.p_digital)]
    model = params.delay_model
    if dataclasses.is_dataclass(model):
        typed += [(f"delay_model.{f.name}", getattr(model, f.name)) for f in dataclasses.fields(model)]
    bad = [n for n, v in typed if isinstance(v, bool) or not isinstance(v, (int, float))]
    if bad:
        return [f"{n} must be a number" for n in bad]
    if not isinstance(params.noise_enabled, bool):
        problems.append("noise_enabled must be true or false")

    for name in scalars:
        _positive(name, getattr(params, name), problems)

    if params.n_dac_bits != 4:
        problems.append("n_dac_bits must be 4")
    if not (isinstance(params.seed, int) and 0 <= params.seed <= SEED_MAX):
        problems.append("seed must be a 64-bit unsigned integer")

    pd = params.p_digital
    _positive("p_digital.c_dig", pd.c_dig, problems)
    if not 0.0 <= pd.alpha_sw <= 1.0:
        problems.append("p_digital.alpha_sw must be in [0, 1]")

    nonideal = params.dac_nonideality
    if nonideal is not None:
        if nonideal.v_early is not None:
            _positive("dac_nonideality.v_early", nonideal.v_early, problems)
        if not (math.isfinite(nonideal.mismatch_sigma) and nonideal.mismatch_sigma >= 0):
            problems.append("dac_nonideality.mismatch_sigma must be non-negative")

    if params.v_sat >= params.v_dd:
        problems.append("v_sat must be below v_dd")

    if not problems:
        v_fs = params.v_full_scale
        limit = params.v_sat * (1 + HEADROOM_EPS)
        if v_fs > limit:
            problems.append(
                f"full-scale integration {v_fs * 1e3:.2f} mV exceeds headroom "
                f"{limit * 1e3:.2f} mV (v_sat + {HEADROOM_EPS:.0%})"
            )

    model = params.delay_model
    if isinstance(model, PolynomialDelay):
        if not model.alpha > 0:
            problems.append("delay_model.alpha must be positive")
        if not model.t0 > 0:
            problems.append("delay_model.t0 must be positive")
    elif isinstance(model, PmosStarvedDelay):
        for name in ("k_factor", "v_tp", "c_load", "v_swing"):
            _positive(f"delay_model.{name}", getattr(model, name), problems)
        if not (isinstance(model.stages, int) and model.stages >= 1):
            problems.append("delay_model.stages must be >= 1")
        if params.v_dd - params.v_sat - model.v_tp <= 0:
            problems.append("delay_model: v_dd - v_sat - v_tp must be positive (device cuts off)")
    else:
        problems.append(f"unknown delay model {type(model).__name__}")

    if not problems:
        from .delay import CutoffError, cell_delay

        # every cell must finish inside its counter measurement window
        try:
            worst = max(cell_delay(0.0, params).t_d, cell_delay(params.v_sat, params).t_d)
        except CutoffError as exc:
            problems.append(f"delay_model invalid at the range ends: {exc}")
            return problems
        if worst > params.t_meas:
            problems.append(
                f"t_meas {params.t_meas:.3g} s is shorter than the slowest cell delay {worst:.3g} s"
            )
    return problems


def check_params(params: CircuitParams) -> CircuitParams:
    problems = validate(params)
    if problems:
        raise ConfigError("; ".join(problems))
    return params


# --- JSON ----------------------------------------------------------------

def params_to_dict(params: CircuitParams) -> dict[str, Any]:
    out = dataclasses.asdict(params)
    out["delay_model"] = {"variant": params.delay_model.variant, **out["delay_model"]}
    return out


def _build(cls, data: Any, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    return data


def params_from_dict(data: dict[str, Any], base: CircuitParams | None = None) -> CircuitParams:
    """Build params from a (possibly partial) mapping layered over ``base``."""
    base = base or default_params()
    _build(CircuitParams, data, "config")
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        if key == "delay_model":
            if not isinstance(value, dict) or "variant" not in value:
                raise ConfigError("delay_model: expected an object with a 'variant' key")
            rest = dict(value)
            variant = rest.pop("variant")
            cls = _DELAY_VARIANTS.get(variant)
            if cls is None:
                raise ConfigError(f"delay_model: unknown variant {variant!r}")
            _build(cls, rest, "delay_model")
            try:
                kwargs[key] = cls(**rest)
            except TypeError as exc:
                raise ConfigError(f"delay_model: {exc}") from None
        elif key == "dac_nonideality":
            if value is None:
                kwargs[key] = None
            else:
                kwargs[key] = DacNonideality(**_build(DacNonideality, value, key))
        elif key == "p_digital":
            merged = {**dataclasses.asdict(base.p_digital), **_build(DigitalPower, value, key)}
            kwargs[key] = DigitalPower(**merged)
        else:
            kwargs[key] = value
    return dataclasses.replace(base, **kwargs)


def dumps(params: CircuitParams) -> str:
    return json.dumps(params_to_dict(params), indent=2, sort_keys=False) + "\n"


def loads(text: str, base: CircuitParams | None = None) -> CircuitParams:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    return params_from_dict(data, base)


def save(params: CircuitParams, path: str | Path) -> None:
    Path(path).write_text(dumps(params))


def load(path: str | Path, base: CircuitParams | None = None) -> CircuitParams:
    return loads(Path(path).read_text(), base)
