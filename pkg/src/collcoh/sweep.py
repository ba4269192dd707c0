"""Density sweeps, spectrum tables and their CSV output."""

from __future__ import annotations

import csv
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, field
from pathlib import Path

import numpy as np

from .dressed import to_dressed
from .dynamics import assemble, steady_state
from .emission import (branching_ratio_from_spectra, branching_ratio_limits, branching_ratio_maxcoh,
                       branching_ratio_nocoh, branching_ratio_operational, correlation_widths,
                       uv_spectrum, visible_spectrum)
from .errors import ConfigError, DivisionByZero, SingularSystem, TruncationError
from .model import RateSet

CSV_HEADER = ("n_e", "gamma_uv", "p", "R_numeric", "R_maxcoh", "R_nocoh", "R_limit_low",
              "R_limit_high", "rho_DD", "rho_BB", "rho_aa", "rho_cc")
SPECTRUM_HEADER = ("omega", "s_vis", "s_uv")
MODELS = ("reduced", "five_level")


@dataclass(frozen=True)
class SweepConfig:
    gamma_vis: float = 1.0
    gamma_uv_list: tuple = (0.1, 1.0, 5.0)
    p_list: tuple = (1.0, 0.0, -1.0)
    k_vis: float = 0.3
    k_e: float = 0.1
    k_uv: float = 0.001
    ne_min: float = 1e-3
    ne_max: float = 1e4
    ne_points: int = 60
    model: str = "reduced"
    gamma_e: float = None
    delta: float = 0.0
    output_path: str = None

    def __post_init__(self):
        if self.gamma_e is None:
            object.__setattr__(self, "gamma_e", 1e6 * self.gamma_vis)
        object.__setattr__(self, "gamma_uv_list", tuple(float(g) for g in self.gamma_uv_list))
        object.__setattr__(self, "p_list", tuple(float(p) for p in self.p_list))
        _validate(self)

    def density_grid(self) -> np.ndarray:
        return np.logspace(math.log10(self.ne_min), math.log10(self.ne_max), self.ne_points)

    def rates(self, n_e: float, gamma_uv: float, p: float) -> RateSet:
        gamma_e = self.gamma_e if self.model == "five_level" else 0.0
        return RateSet.simplified(self.gamma_vis, gamma_uv, self.k_vis * n_e, r_e=self.k_e * n_e,
                                  r_uv=self.k_uv * n_e, gamma_e=gamma_e, p=p, delta=self.delta)


def _validate(cfg: SweepConfig):
    def bad(name, why):
        raise ConfigError(f"{name}: {why}")

    for name in ("gamma_vis", "k_vis", "k_e", "k_uv", "ne_min", "ne_max", "gamma_e", "delta"):
        if not math.isfinite(getattr(cfg, name)):
            bad(name, "must be finite")
    if cfg.gamma_vis <= 0:
        bad("gamma_vis", "must be > 0")
    for name in ("k_vis", "k_e", "k_uv", "gamma_e"):
        if getattr(cfg, name) < 0:
            bad(name, "must be >= 0")
    if not cfg.ne_min > 0:
        bad("ne_min", "must be > 0")
    if not cfg.ne_max > cfg.ne_min:
        bad("ne_max", "must exceed ne_min")
    if int(cfg.ne_points) != cfg.ne_points or cfg.ne_points < 2:
        bad("ne_points", "must be an integer >= 2")
    if not cfg.gamma_uv_list or any(not (math.isfinite(g) and g > 0) for g in cfg.gamma_uv_list):
        bad("gamma_uv_list", "needs one or more positive values")
    if not cfg.p_list or any(not (-1.0 <= p <= 1.0) for p in cfg.p_list):
        bad("p_list", "needs one or more values in [-1, 1]")
    if cfg.model not in MODELS:
        bad("model", f"must be one of {MODELS}")


# --- config parsing ---------------------------------------------------------

def _float(text):
    return float(text)


def _float_list(text):
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(float(t) for t in items)


def _int(text):
    value = float(text)
    if value != int(value):
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


_CONVERTERS = {
    "gamma_vis": _float, "gamma_uv_list": _float_list, "p_list": _float_list,
    "k_vis": _float, "k_e": _float, "k_uv": _float,
    "ne_min": _float, "ne_max": _float, "ne_points": _int,
    "model": str, "gamma_e": _float, "delta": _float, "output_path": str,
}


def read_config_text(text: str, source: str = "<config>") -> dict:
    """Parse flat ``key = value`` lines. ``#``/``;`` start comments; a lone
    ``[section]`` header is tolerated and ignored."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        sep = "=" if "=" in line else ":" if ":" in line else None
        if sep is None:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split(sep, 1))
        key = key.replace("-", "_")
        if key not in _CONVERTERS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = _CONVERTERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from None
    return values


def parse_config(path=None, overrides=None) -> SweepConfig:
    """Build a SweepConfig from an optional file plus flag overrides (flags win)."""
    values = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"{path}: cannot read config: {exc.strerror or exc}") from None
        values.update(read_config_text(text, str(path)))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _CONVERTERS:
            raise ConfigError(f"unknown override {key!r}")
        if key in ("gamma_uv_list", "p_list") and not isinstance(value, (list, tuple)):
            value = (value,)
        values[key] = value
    return SweepConfig(**values)


# --- density sweep ----------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    n_e: float
    gamma_uv: float
    p: float
    R_numeric: float
    R_maxcoh: float
    R_nocoh: float
    R_limit_low: float
    R_limit_high: float
    rho_DD: float
    rho_BB: float
    rho_aa: float
    rho_cc: float


class SweepPointError(SingularSystem):
    def __init__(self, n_e, gamma_uv, p, cause):
        super().__init__(f"steady state failed at n_e={n_e!r}, gamma_uv={gamma_uv!r}, p={p!r}: {cause}")
        self.n_e, self.gamma_uv, self.p = n_e, gamma_uv, p


def _or_nan(fn, *args):
    try:
        return fn(*args)
    except DivisionByZero:
        return math.nan


def sweep_point(cfg: SweepConfig, n_e: float, gamma_uv: float, p: float) -> SweepRow:
    rates = cfg.rates(n_e, gamma_uv, p)
    try:
        state = steady_state(assemble(rates, cfg.model))
    except SingularSystem as exc:
        raise SweepPointError(n_e, gamma_uv, p, exc) from exc
    low, high = branching_ratio_limits(rates)
    if rates.delta == 0.0:
        dressed = to_dressed(state.pop_a, state.pop_b, state.coh_ab)
        rho_dd, rho_bb = dressed.rho_dd_dark, dressed.rho_bb_bright
    else:
        rho_dd = rho_bb = math.nan
    return SweepRow(
        n_e=float(n_e), gamma_uv=float(gamma_uv), p=float(p),
        R_numeric=_or_nan(branching_ratio_operational, state, rates),
        R_maxcoh=_or_nan(branching_ratio_maxcoh, rates),
        R_nocoh=_or_nan(branching_ratio_nocoh, rates),
        R_limit_low=low, R_limit_high=high,
        rho_DD=rho_dd, rho_BB=rho_bb, rho_aa=state.pop_a, rho_cc=state.pop_c,
    )


def grid_points(cfg: SweepConfig) -> list:
    """(n_e, gamma_uv, p) triples in canonical (gamma_uv, p, n_e) order."""
    grid = cfg.density_grid()
    return [(float(n), g, p) for g in sorted(set(cfg.gamma_uv_list))
            for p in sorted(set(cfg.p_list)) for n in grid]


def run_density_sweep(cfg: SweepConfig, jobs: int = 1) -> list:
    points = grid_points(cfg)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda pt: sweep_point(cfg, *pt), points))
    return [sweep_point(cfg, *pt) for pt in points]


def monotonicity_violations(rows, p_values=(0.0, 1.0), rtol=1e-12) -> list:
    """Rows where R_numeric rises with n_e for the given p values."""
    bad = []
    prev = {}
    for row in rows:
        key = (row.gamma_uv, row.p)
        if row.p in p_values and key in prev:
            last = prev[key]
            if row.R_numeric > last.R_numeric * (1.0 + rtol):
                bad.append(row)
        prev[key] = row
    return bad


# --- CSV --------------------------------------------------------------------

def _fmt(value) -> str:
    return repr(float(value))


def _open_out(path):
    if path is None or str(path) == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def write_rows(fh, header, rows, preamble=()):
    for line in preamble:
        fh.write(line + "\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def emit_csv(rows, path) -> None:
    """Write sweep rows; ``path`` of None or ``-`` means stdout."""
    fh, close = _open_out(path)
    try:
        write_rows(fh, CSV_HEADER, (astuple(r) for r in rows))
    finally:
        if close:
            fh.close()


def rows_to_csv_text(rows) -> str:
    buf = io.StringIO()
    write_rows(buf, CSV_HEADER, (astuple(r) for r in rows))
    return buf.getvalue()


# --- spectra ----------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumTable:
    rates: RateSet
    omega: np.ndarray = field(repr=False)
    s_vis: np.ndarray = field(repr=False)
    s_uv: np.ndarray = field(repr=False)
    r0: float = 0.0
    w_uv: float = 0.0
    R_spectra: float = math.nan
    R_operational: float = math.nan

    def preamble(self) -> list:
        return [f"# r0={_fmt(self.r0)},w_uv={_fmt(self.w_uv)}",
                f"# R_spectra={_fmt(self.R_spectra)},R_operational={_fmt(self.R_operational)}"]


def run_spectrum(rates: RateSet, model: str = "reduced", omega_max: float = None,
                 points: int = 4001) -> SpectrumTable:
    """Stationary visible and UV spectra on a symmetric grid ``[-omega_max, omega_max]``.

    Default ``omega_max`` is 200 visible half-widths.
    """
    if points < 3:
        raise ValueError("points must be >= 3")
    r0, w_uv = correlation_widths(rates)
    if omega_max is None:
        omega_max = 200.0 * max(r0, w_uv)
    if not omega_max > 0:
        raise TruncationError(f"omega_max must be positive, got {omega_max!r}")
    state = steady_state(assemble(rates, model))
    omega = np.linspace(-omega_max, omega_max, int(points))
    vis = visible_spectrum(rates, state, omega)
    uv = uv_spectrum(rates, state, omega)
    r_spec = branching_ratio_from_spectra(vis, uv, rates)  # raises TruncationError on narrow grids
    return SpectrumTable(rates, omega, vis.values, uv.values, r0, w_uv, r_spec,
                         branching_ratio_operational(state, rates))


def emit_spectrum_csv(table: SpectrumTable, path) -> None:
    fh, close = _open_out(path)
    try:
        write_rows(fh, SPECTRUM_HEADER, zip(table.omega, table.s_vis, table.s_uv), table.preamble())
    finally:
        if close:
            fh.close()


__all__ = [
    "CSV_HEADER", "SweepConfig", "SweepRow", "SpectrumTable", "parse_config", "read_config_text",
    "run_density_sweep", "sweep_point", "grid_points", "monotonicity_violations", "emit_csv",
    "rows_to_csv_text", "run_spectrum", "emit_spectrum_csv",
]
