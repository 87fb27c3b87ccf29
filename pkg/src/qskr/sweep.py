"""Parameter sweeps: config parsing, figure presets, evaluation and output files."""
from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Optional

import numpy as np

from .atmosphere import LinkProfile, altitude_to_tau, geometry_at_altitude
from .noise_channel import (
    ChannelUse,
    HybridNoiseParams,
    TransmittedSignal,
    snr_db,
    var_x_for_snr_db,
)
from .skr import DetectorParams, fading_average, secret_key_rate

AXES = ("sigma_x2", "snr_db")
VARIED = ("beta", "nu_ele", "T", "eta", "tau", "epsilon", "lambda", "altitude_km")
CSV_FIELDS = (
    "snr_db", "sigma_x2", "beta", "T", "tau", "eta", "nu_ele", "epsilon", "lambda",
    "altitude_km", "capacity_bits", "i_ab_bits", "chi_be_bits", "skr_bits", "secure_flag",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FixedParams:
    """Everything held constant along a sweep. Defaults are the baseline operating point."""

    lam: float = 2.0
    mu_thermal: float = 0.0
    var_thermal: float = 0.25
    truncation_r: Optional[int] = None
    beta: float = 0.95
    eta: float = 0.606
    nu_ele: float = 0.041
    epsilon: float = 0.005
    T: float = 1.0
    # optics, only used on the altitude path
    waist_w0: float = 0.15
    wavelength: float = 810e-9
    pointing_angle: float = 1e-6
    aperture_a: float = 0.5


@dataclass(frozen=True)
class SweepSpec:
    axis: str = "snr_db"
    axis_grid: tuple[float, ...] = tuple(float(x) for x in range(-5, 26))
    varied_param: str = "beta"
    varied_values: tuple[float, ...] = (0.95,)
    fixed: FixedParams = field(default_factory=FixedParams)
    n_fading_draws: int = 1000
    seed: int = 0
    altitude_mode: str = "mean"  # or "fading"
    covariance_form: str = "standard"  # or "printed"
    preset: Optional[str] = None


_BASELINE = dict(lam=2.0, epsilon=0.005, beta=0.95, eta=0.606, nu_ele=0.041, T=1.0)

PRESETS: dict[str, dict] = {
    "fig4a": dict(varied_param="beta", varied_values=(0.65, 0.75, 0.85, 0.95)),
    "fig4b": dict(varied_param="nu_ele", varied_values=(0.020, 0.040, 0.060)),
    "fig5a": dict(varied_param="T", varied_values=(0.6, 0.7, 0.8, 0.9, 1.0)),
    "fig5b": dict(varied_param="eta", varied_values=(0.25, 0.45, 0.65, 0.85)),
    "fig6a": dict(varied_param="tau", varied_values=(0.6, 0.7, 0.8, 0.9, 1.0)),
    "fig6b": dict(varied_param="epsilon", varied_values=(0.005, 0.006, 0.007, 0.008, 0.009, 0.010)),
    "fig7a": dict(varied_param="lambda", varied_values=(2.0, 3.0, 4.0, 5.0, 6.0)),
    "fig7b": dict(varied_param="altitude_km", varied_values=(300.0, 500.0, 800.0, 1200.0, 2000.0)),
}


def preset_spec(name: str, **overrides) -> SweepSpec:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    kw = dict(PRESETS[name])
    kw.update(overrides)
    return SweepSpec(fixed=FixedParams(**_BASELINE), preset=name, **kw)


# -- config files ------------------------------------------------------------

def _open(lo, hi):
    return lambda v: lo < v <= hi


_RANGES = {
    "beta": (_open(0, 1), "(0,1]"),
    "eta": (_open(0, 1), "(0,1]"),
    "T": (_open(0, 1), "(0,1]"),
    "tau": (_open(0, 1), "(0,1]"),
    "nu_ele": (lambda v: v >= 0, "[0,inf)"),
    "epsilon": (lambda v: v >= 0, "[0,inf)"),
    "lambda": (lambda v: v >= 0, "[0,inf)"),
    "var_thermal": (lambda v: v > 0, "(0,inf)"),
    "mu_thermal": (math.isfinite, "finite"),
    "altitude_km": (lambda v: v > 0, "(0,inf)"),
    "waist_w0": (lambda v: v > 0, "(0,inf)"),
    "wavelength": (lambda v: v > 0, "(0,inf)"),
    "pointing_angle": (lambda v: v >= 0, "[0,inf)"),
    "aperture_a": (lambda v: v > 0, "(0,inf)"),
}
_FIXED_KEYS = {
    "lambda": "lam", "mu_thermal": "mu_thermal", "var_thermal": "var_thermal",
    "beta": "beta", "eta": "eta", "nu_ele": "nu_ele", "epsilon": "epsilon", "T": "T",
    "waist_w0": "waist_w0", "wavelength": "wavelength",
    "pointing_angle": "pointing_angle", "aperture_a": "aperture_a",
}
_OTHER_KEYS = {
    "preset", "axis", "axis_min", "axis_max", "axis_step", "axis_grid", "varied_param",
    "varied_values", "truncation_r", "n_fading_draws", "seed", "altitude_mode", "covariance_form",
}
CONFIG_KEYS = frozenset(_FIXED_KEYS) | _OTHER_KEYS


def _num(key, text, where):
    try:
        val = float(text)
    except ValueError:
        raise ConfigError(f"{where}malformed number for {key}: {text!r}") from None
    if not math.isfinite(val):
        raise ConfigError(f"{where}{key} must be finite, got {text!r}")
    return val


def _int(key, text, where):
    val = _num(key, text, where)
    if val != int(val):
        raise ConfigError(f"{where}{key} must be an integer, got {text!r}")
    return int(val)


def _check_range(key, val, where):
    if key in _RANGES:
        ok, desc = _RANGES[key]
        if not ok(val):
            raise ConfigError(f"{where}{key} out of {desc}: {val:g}")


def _num_list(key, text, where):
    vals = [_num(key, t.strip(), where) for t in text.split(",") if t.strip()]
    if not vals:
        raise ConfigError(f"{where}{key} is empty")
    return tuple(vals)


def parse_config_text(text: str) -> dict[str, tuple[str, int]]:
    """``key = value`` lines to ``{key: (value, line_number)}``; ``#`` starts a comment."""
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first set on line {entries[key][1]})")
        entries[key] = (value, lineno)
    return entries


def spec_from_entries(
    entries: dict[str, tuple[str, int]],
    preset: Optional[str] = None,
    seed: Optional[int] = None,
) -> SweepSpec:
    """Defaults, then the preset, then explicit keys. ``preset``/``seed`` args win over the file."""

    def where(key):
        return f"line {entries[key][1]}: " if key in entries else ""

    name = preset if preset is not None else (entries["preset"][0] if "preset" in entries else None)
    if name is not None:
        try:
            spec = preset_spec(name)
        except ConfigError as exc:
            raise ConfigError(f"{where('preset') if preset is None else ''}{exc}") from None
    else:
        spec = SweepSpec()

    fixed = {}
    for key, attr in _FIXED_KEYS.items():
        if key in entries:
            val = _num(key, entries[key][0], where(key))
            _check_range(key, val, where(key))
            fixed[attr] = val
    if "truncation_r" in entries:
        r = _int("truncation_r", entries["truncation_r"][0], where("truncation_r"))
        if r < 0:
            raise ConfigError(f"{where('truncation_r')}truncation_r must be >= 0")
        fixed["truncation_r"] = r or None  # 0 means automatic
    kw: dict = {}
    if fixed:
        kw["fixed"] = replace(spec.fixed, **fixed)

    if "axis" in entries:
        axis = entries["axis"][0]
        if axis not in AXES:
            raise ConfigError(f"{where('axis')}axis must be one of {AXES}, got {axis!r}")
        kw["axis"] = axis
    if "axis_grid" in entries:
        if any(k in entries for k in ("axis_min", "axis_max", "axis_step")):
            raise ConfigError(f"{where('axis_grid')}axis_grid conflicts with axis_min/axis_max/axis_step")
        kw["axis_grid"] = _num_list("axis_grid", entries["axis_grid"][0], where("axis_grid"))
    elif any(k in entries for k in ("axis_min", "axis_max", "axis_step")):
        lo = _num("axis_min", entries["axis_min"][0], where("axis_min")) if "axis_min" in entries else min(spec.axis_grid)
        hi = _num("axis_max", entries["axis_max"][0], where("axis_max")) if "axis_max" in entries else max(spec.axis_grid)
        step = _num("axis_step", entries["axis_step"][0], where("axis_step")) if "axis_step" in entries else 1.0
        if step <= 0 or hi < lo:
            raise ConfigError(f"{where('axis_step') or where('axis_max')}need axis_step > 0 and axis_max >= axis_min")
        n = int(math.floor((hi - lo) / step + 1e-9)) + 1
        kw["axis_grid"] = tuple(round(lo + i * step, 12) for i in range(n))

    if "varied_param" in entries:
        vp = entries["varied_param"][0]
        if vp not in VARIED:
            raise ConfigError(f"{where('varied_param')}varied_param must be one of {VARIED}, got {vp!r}")
        kw["varied_param"] = vp
        if "varied_values" not in entries:
            raise ConfigError(f"{where('varied_param')}varied_param needs varied_values")
    if "varied_values" in entries:
        kw["varied_values"] = _num_list("varied_values", entries["varied_values"][0], where("varied_values"))
    if "n_fading_draws" in entries:
        n = _int("n_fading_draws", entries["n_fading_draws"][0], where("n_fading_draws"))
        if n < 100:
            raise ConfigError(f"{where('n_fading_draws')}n_fading_draws must be >= 100")
        kw["n_fading_draws"] = n
    if "seed" in entries:
        s = _int("seed", entries["seed"][0], where("seed"))
        if s < 0:
            raise ConfigError(f"{where('seed')}seed must be >= 0")
        kw["seed"] = s
    if seed is not None:
        kw["seed"] = seed
    for key, choices in (("altitude_mode", ("mean", "fading")), ("covariance_form", ("standard", "printed"))):
        if key in entries:
            val = entries[key][0]
            if val not in choices:
                raise ConfigError(f"{where(key)}{key} must be one of {choices}, got {val!r}")
            kw[key] = val

    spec = replace(spec, **kw)
    validate_spec(spec, where)
    return spec


def validate_spec(spec: SweepSpec, where=lambda key: "") -> None:
    for key, grid in (("axis_grid", spec.axis_grid), ("varied_values", spec.varied_values)):
        if not grid:
            raise ConfigError(f"{where(key)}{key} is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError(f"{where(key)}{key} must be strictly increasing")
    if spec.axis == "sigma_x2" and min(spec.axis_grid) <= 0:
        raise ConfigError(f"{where('axis_grid')}sigma_x2 axis values must be > 0")
    for v in spec.varied_values:
        _check_range(spec.varied_param, v, where("varied_values"))
    f = spec.fixed
    for key, attr in _FIXED_KEYS.items():
        _check_range(key, getattr(f, attr), where(key))
    try:
        HybridNoiseParams(f.lam, f.mu_thermal, f.var_thermal, f.truncation_r)
    except ValueError as exc:
        raise ConfigError(f"{where('truncation_r')}{exc}") from None


def load_config(path, preset: Optional[str] = None, seed: Optional[int] = None) -> SweepSpec:
    text = Path(path).read_text(encoding="utf-8")
    return spec_from_entries(parse_config_text(text), preset=preset, seed=seed)


# -- evaluation --------------------------------------------------------------

@dataclass
class ResultRow:
    snr_db: float
    sigma_x2: float
    beta: float
    T: float
    tau: float
    eta: float
    nu_ele: float
    epsilon: float
    lam: float
    altitude_km: float
    capacity_bits: float
    i_ab_bits: float
    chi_be_bits: float
    skr_bits: float
    secure_flag: bool
    # not written to the CSV
    varied_param: str = ""
    varied_value: float = math.nan
    axis: str = "snr_db"
    error: str = ""

    def csv_values(self) -> list:
        vals = [getattr(self, f.name) for f in dataclasses.fields(self)][: len(CSV_FIELDS)]
        return vals


@lru_cache(maxsize=128)
def _tau_at(altitude_km, w0, wavelength, pointing_angle, aperture_a) -> float:
    return altitude_to_tau(LinkProfile(altitude_km, w0, wavelength, pointing_angle, aperture_a))


def _point_seed(seed: int, i: int, j: int) -> int:
    return int(np.random.SeedSequence([seed, i, j]).generate_state(1)[0])


def evaluate_point(spec: SweepSpec, value: float, axis_value: float, i: int = 0, j: int = 0) -> ResultRow:
    """One grid point; parameter errors become an error row rather than an exception."""
    f = spec.fixed
    params = dict(lam=f.lam, beta=f.beta, eta=f.eta, nu_ele=f.nu_ele, epsilon=f.epsilon, T=f.T)
    altitude = math.nan
    vp = spec.varied_param
    if vp == "tau":
        params["T"] = math.sqrt(value)
    elif vp == "altitude_km":
        altitude = value
        params["T"] = math.sqrt(_tau_at(value, f.waist_w0, f.wavelength, f.pointing_angle, f.aperture_a))
    else:
        params["lam" if vp == "lambda" else vp] = value
    t = params["T"]

    row = ResultRow(
        snr_db=math.nan, sigma_x2=math.nan, beta=params["beta"], T=t, tau=t * t,
        eta=params["eta"], nu_ele=params["nu_ele"], epsilon=params["epsilon"], lam=params["lam"],
        altitude_km=altitude, capacity_bits=math.nan, i_ab_bits=math.nan, chi_be_bits=math.nan,
        skr_bits=math.nan, secure_flag=False, varied_param=vp, varied_value=value, axis=spec.axis,
    )
    try:
        noise = HybridNoiseParams(params["lam"], f.mu_thermal, f.var_thermal, f.truncation_r)
        if spec.axis == "snr_db":
            row.snr_db = axis_value
            row.sigma_x2 = var_x_for_snr_db(axis_value, t, noise)
        else:
            row.sigma_x2 = axis_value
        sig = TransmittedSignal(row.sigma_x2)
        ch = ChannelUse(t)
        if spec.axis == "sigma_x2":
            row.snr_db = snr_db(sig, ch, noise)
        det = DetectorParams(params["eta"], params["nu_ele"], params["epsilon"], params["beta"])
        printed = spec.covariance_form == "printed"
        if vp == "altitude_km" and spec.altitude_mode == "fading":
            g = geometry_at_altitude(LinkProfile(value, f.waist_w0, f.wavelength, f.pointing_angle, f.aperture_a))
            est = fading_average(sig, noise, det, g, spec.n_fading_draws, _point_seed(spec.seed, i, j), printed)
            cap, i_ab, chi, skr = est.capacity, est.i_ab, est.chi_be, est.skr
        else:
            res = secret_key_rate(sig, ch, noise, det, printed)
            cap, i_ab, chi, skr = res.capacity, res.i_ab, res.chi_be, res.skr
    except ValueError as exc:
        row.error = str(exc)
        return row
    row.capacity_bits, row.i_ab_bits, row.chi_be_bits, row.skr_bits = cap, i_ab, chi, skr
    row.secure_flag = skr > 0
    return row


def run_sweep(spec: SweepSpec) -> list[ResultRow]:
    """All (varied value, axis point) pairs, varied value major."""
    return [
        evaluate_point(spec, value, x, i, j)
        for i, value in enumerate(spec.varied_values)
        for j, x in enumerate(spec.axis_grid)
    ]


# -- output ------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return format(float(v), ".12g")


def curve_filename(param: str, value: float) -> str:
    return f"curve_{param}={value:g}.dat"


def emit_outputs(rows: list[ResultRow], out_dir) -> list[Path]:
    """Write ``results.csv`` plus one two-column ``.dat`` file per curve."""
    if not rows:
        raise ValueError("no rows to write")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    csv_path = out / "results.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        writer.writerows([_fmt(v) for v in row.csv_values()] for row in rows)
    written.append(csv_path)

    curves: dict[tuple[str, float], list[ResultRow]] = {}
    for row in rows:
        curves.setdefault((row.varied_param, row.varied_value), []).append(row)
    for (param, value), members in curves.items():
        axis = members[0].axis
        path = out / curve_filename(param, value)
        body = [f"# {axis} skr_bits"]
        body += [f"{_fmt(getattr(r, axis))} {_fmt(r.skr_bits)}" for r in members]
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(body) + "\n")
        written.append(path)
    return written
