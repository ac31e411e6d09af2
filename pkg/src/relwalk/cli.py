"""
Command-line front end: simulations, analytic packets, comparisons and
figure data, all written as deterministic CSV.

    relwalk simulate --model dtqw --theta 3pi/7 --alpha 2.2 --time 225 --out sim.csv
    relwalk packet --model dirac --mass 1 --a 0.5 --time 50 --out packet.csv
    relwalk compare --dtqw-vs-ctqw --alpha 2.2 --time 225 --out cmp.csv
    relwalk entropy-scan --out scan.csv
    relwalk figure 2 --out figs/

Exit status: 0 on success, 2 for bad arguments, 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys
import tempfile
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import observables as obs
from . import wavepackets as wp
from .dispersion import DTQW, Dirac
from .errors import (
    ConvergenceFailure,
    LightConeOverflow,
    NormalizationError,
    ParseError,
    RelwalkError,
    Unsupported,
)
from .numerics import QuadratureSpec
from .walks import ScalarLattice, SpinorLattice, ctqw_evolve, dirac_evolve, dtqw_evolve

__all__ = ["parse_angle", "RunConfig", "run", "main", "format_float"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

FIG_THETA = 3 * math.pi / 7
FIG_ALPHAS = (2.2, 22.0)
FIG_DIRAC_AS = (5.0, 0.5)

_ANGLE = re.compile(r"^([+-]?\d*)\s*\*?\s*(?:pi|π)\s*(?:/\s*(\d+))?$", re.IGNORECASE)


def parse_angle(text: str) -> float:
    """Radians from ``"3pi/7"``, ``"pi/4"``, ``"-pi"`` or a plain decimal."""
    token = text.strip()
    match = _ANGLE.match(token)
    if match:
        num, den = match.groups()
        p = {"": 1, "+": 1, "-": -1}.get(num)
        if p is None:
            p = int(num)
        q = int(den) if den else 1
        if q == 0:
            raise ParseError(f"zero denominator in angle {text!r}")
        return p * math.pi / q
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"cannot parse angle {text!r}") from None


class _NumericCheckFailed(RelwalkError):
    pass


def format_float(value: float) -> str:
    # 12 significant digits; "+ 0.0" folds negative zero
    return f"{float(value) + 0.0:.11e}"


def _write_csv(path: Path, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    """Write columns atomically: a temporary file is renamed into place only when complete."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in zip(*columns):
                fh.write(",".join(format_float(v) for v in row) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _check_density(rho: np.ndarray, weight: float, label: str) -> float:
    norm = float(np.sum(rho) * weight)
    if abs(norm - 1.0) > 1e-6:
        raise _NumericCheckFailed(f"{label}: density integrates to {norm:.9f}, not 1")
    return norm


def _spinor_columns(state: SpinorLattice):
    rho = np.abs(state.up) ** 2 + np.abs(state.down) ** 2
    header = ["position", "rho", "re_up", "im_up", "re_dn", "im_dn"]
    cols = [state.positions, rho, state.up.real, state.up.imag, state.down.real, state.down.imag]
    return header, cols


def _scalar_columns(state: ScalarLattice):
    rho = np.abs(state.amp) ** 2
    return ["position", "rho", "re", "im"], [state.positions, rho, state.amp.real, state.amp.imag]


def _state_columns(state):
    return _spinor_columns(state) if isinstance(state, SpinorLattice) else _scalar_columns(state)


@dataclass
class RunConfig:
    """Parsed command line. ``None`` means "use the model's default"."""

    command: str
    model: str | None = None
    theta: float | None = None
    mass: float | None = None
    gamma: float | None = None
    alpha: list[float] | None = None
    a: list[float] | None = None
    time: float | None = None
    half_width: float | None = None
    spacing: float | None = None
    out: str | None = None
    tol: float | None = None
    figure: int | None = None
    pair: str = "dtqw-ctqw"
    a_min: float = 0.05
    a_max: float = 20.0
    points: int = 25
    explicit: set = field(default_factory=set)

    # parameters each model accepts; anything else given explicitly is an error
    MODEL_PARAMS = {
        "dtqw": {"theta", "alpha", "time", "half_width"},
        "dtqw-bessel": {"theta", "alpha", "time", "half_width"},
        "ctqw": {"gamma", "alpha", "time", "half_width"},
        "dirac": {"mass", "a", "time", "half_width", "spacing"},
    }

    def validate(self) -> None:
        given = self.explicit
        if self.command in ("simulate", "packet"):
            allowed = self.MODEL_PARAMS[self.model]
            if self.command == "simulate" and self.model == "dtqw-bessel":
                raise ValueError("simulate supports dtqw, ctqw and dirac")
            extra = (given & {"theta", "mass", "gamma", "alpha", "a", "spacing"}) - allowed
            if extra:
                flags = ", ".join("--" + e.replace("_", "-") for e in sorted(extra))
                raise ValueError(f"{flags} not valid for model {self.model}")
        if self.command == "entropy-scan" and given & {"alpha", "gamma"}:
            raise ValueError("entropy-scan takes --theta, --mass and the a-grid only")
        if self.command == "compare" and given & {"mass", "a", "spacing"}:
            raise ValueError("compare works on lattice walks; --mass/--a/--spacing do not apply")
        for name in ("alpha", "a"):
            vals = getattr(self, name)
            if vals is not None and any(v <= 0 for v in vals):
                raise ValueError(f"--{name} values must be positive")
        for name in ("mass", "gamma", "half_width", "spacing", "tol"):
            val = getattr(self, name)
            if val is not None and val <= 0:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        if self.theta is not None and not 0 < self.theta < math.pi / 2:
            raise ValueError("--theta must lie strictly between 0 and pi/2")
        if self.time is not None and self.time < 0:
            raise ValueError("--time must be non-negative")
        if self.a_min <= 0 or self.a_max <= self.a_min or self.points < 2:
            raise ValueError("entropy grid needs 0 < a-min < a-max and at least 2 points")

    @property
    def spec(self) -> QuadratureSpec:
        return QuadratureSpec() if self.tol is None else QuadratureSpec(abs_tol=self.tol)

    def first(self, name: str, default: float) -> float:
        vals = getattr(self, name)
        return default if not vals else vals[0]


def _lattice_time(cfg: RunConfig, default: int) -> int:
    t = default if cfg.time is None else cfg.time
    if t != int(t):
        raise ValueError("walk time must be a whole number of steps")
    return int(t)


def _dirac_grid(cfg: RunConfig, mass: float, a: float, t: float):
    spacing, half = obs.dirac_entropy_grid(mass, a, t)
    if cfg.spacing is not None:
        spacing = cfg.spacing
    if cfg.half_width is not None:
        half = cfg.half_width
    return spacing, half


def _analytic_state(cfg: RunConfig, model: str, t: float):
    spec = cfg.spec
    if model in ("dtqw", "dtqw-bessel"):
        theta = FIG_THETA if cfg.theta is None else cfg.theta
        params = wp.DTQWPacketParams(theta, cfg.first("alpha", FIG_ALPHAS[0]))
        hw = int(cfg.half_width or 160)
        variant = "bessel" if model == "dtqw-bessel" else "exact"
        return wp.dtqw_profile(int(t), params, hw, variant=variant, spec=spec)
    if model == "ctqw":
        gamma = math.cos(FIG_THETA) / 2 if cfg.gamma is None else cfg.gamma
        params = wp.CTQWPacketParams(gamma, cfg.first("alpha", FIG_ALPHAS[0]))
        return wp.ctqw_profile(t, params, int(cfg.half_width or 160))
    mass = 1.0 if cfg.mass is None else cfg.mass
    a = cfg.first("a", FIG_DIRAC_AS[1])
    spacing, half = _dirac_grid(cfg, mass, a, t)
    return wp.dirac_profile(t, wp.DiracPacketParams(mass, a), spacing, half, spec)


def _evolve(cfg: RunConfig, model: str, state, t: float):
    if model == "dtqw":
        return dtqw_evolve(state, FIG_THETA if cfg.theta is None else cfg.theta, int(t))
    if model == "ctqw":
        return ctqw_evolve(state, math.cos(FIG_THETA) / 2 if cfg.gamma is None else cfg.gamma, t)
    return dirac_evolve(state, 1.0 if cfg.mass is None else cfg.mass, t)


def _default_time(model: str) -> float:
    return 50.0 if model == "dirac" else 225


def _cmd_simulate(cfg: RunConfig, out: Path):
    model = cfg.model
    t = cfg.time if cfg.time is not None else _default_time(model)
    if model != "dirac":
        t = _lattice_time(cfg, int(t))
    if model == "dirac":
        # grid must be fine enough for the final time, not just the start
        mass = 1.0 if cfg.mass is None else cfg.mass
        spacing, half = _dirac_grid(cfg, mass, cfg.first("a", FIG_DIRAC_AS[1]), t)
        if cfg.half_width is None:
            # support (density > 1e-20) reaches ~24/m past the core; add travel and margin
            half = cfg.first("a", FIG_DIRAC_AS[1]) + 30.0 / mass + t
        params = wp.DiracPacketParams(mass, cfg.first("a", FIG_DIRAC_AS[1]))
        start = wp.dirac_profile(0.0, params, spacing, half, cfg.spec)
        reference = wp.dirac_profile(t, params, spacing, half, cfg.spec)
    else:
        start = _analytic_state(cfg, model, 0)
        reference = _analytic_state(cfg, model, t)
    final = _evolve(cfg, model, start, t)
    header, cols = _state_columns(final)
    norm = _check_density(cols[1], final.spacing, "simulated density")
    err = float(np.max(np.abs(cols[1] - obs.density(reference).rho)))
    _write_csv(out, header, cols)
    return [out], {"norm": norm, "max_err_vs_analytic": err}


def _cmd_packet(cfg: RunConfig, out: Path):
    model = cfg.model
    t = cfg.time if cfg.time is not None else _default_time(model)
    if model != "dirac":
        t = _lattice_time(cfg, int(t))
    state = _analytic_state(cfg, model, t)
    header, cols = _state_columns(state)
    norm = _check_density(cols[1], state.spacing, "packet density")
    variance = obs.moments(obs.density(state)).variance
    _write_csv(out, header, cols)
    return [out], {"norm": norm, "variance": variance}


def _cmd_compare(cfg: RunConfig, out: Path):
    theta = FIG_THETA if cfg.theta is None else cfg.theta
    alpha = cfg.first("alpha", FIG_ALPHAS[0])
    tau = _lattice_time(cfg, 225)
    hw = int(cfg.half_width or 160)
    exact = wp.dtqw_profile(tau, wp.DTQWPacketParams(theta, alpha), hw, spec=cfg.spec)
    rho_a = obs.density(exact).rho
    if cfg.pair == "dtqw-ctqw":
        # equal maximum speeds: 2 gamma = cos(theta)
        gamma = math.cos(theta) / 2 if cfg.gamma is None else cfg.gamma
        other = wp.ctqw_profile(tau, wp.CTQWPacketParams(gamma, alpha), hw)
        names = ["position", "rho_dtqw", "rho_ctqw"]
    else:
        other = wp.dtqw_profile(tau, wp.DTQWPacketParams(theta, alpha), hw, "bessel", spec=cfg.spec)
        names = ["position", "rho_dtqw", "rho_bessel"]
    rho_b = obs.density(other).rho
    norm = _check_density(rho_a, 1.0, names[1])
    _check_density(rho_b, 1.0, names[2])
    l1 = float(np.sum(np.abs(rho_a - rho_b)))
    _write_csv(out, names, [exact.positions, rho_a, rho_b])
    return [out], {"norm": norm, "l1_distance": l1}


def _entropy_scan(cfg: RunConfig, a_grid: np.ndarray):
    theta = FIG_THETA if cfg.theta is None else cfg.theta
    mass = 1.0 if cfg.mass is None else cfg.mass
    dirac = obs.entropy_vs_localization(Dirac(mass), a_grid, cfg.spec)
    walk = obs.entropy_vs_localization(DTQW(theta), a_grid, cfg.spec)
    return dirac[:, 1], walk[:, 1]


def _cmd_entropy_scan(cfg: RunConfig, out: Path):
    a_grid = np.geomspace(cfg.a_min, cfg.a_max, cfg.points)
    s_dirac, s_walk = _entropy_scan(cfg, a_grid)
    _write_csv(out, ["a", "entropy_dirac", "entropy_dtqw"], [a_grid, s_dirac, s_walk])
    gap = float(np.max(np.abs(s_dirac - s_walk)))
    return [out], {"points": len(a_grid), "max_gap": gap}


def _tag(value: float) -> str:
    return f"{value:g}"


def _figure_1(cfg: RunConfig, out_dir: Path, written: list):
    mass = 1.0 if cfg.mass is None else cfg.mass
    t_end = 50.0 if cfg.time is None else cfg.time
    metrics = {}
    for a in cfg.a or FIG_DIRAC_AS:
        spacing, half = _dirac_grid(cfg, mass, a, t_end)
        params = wp.DiracPacketParams(mass, a)
        cols, names = [], ["position"]
        for t in (0.0, t_end):
            state = wp.dirac_profile(t, params, spacing, half, cfg.spec)
            rho = obs.density(state).rho
            metrics["norm"] = _check_density(rho, spacing, f"a={a} t={t}")
            if not cols:
                cols.append(state.positions)
            cols.append(rho)
            names.append(f"rho_t{_tag(t)}")
        path = out_dir / f"fig1_a{_tag(a)}.csv"
        _write_csv(path, names, cols)
        written.append(path)
    return metrics


def _figure_2(cfg: RunConfig, out_dir: Path, written: list):
    theta = FIG_THETA if cfg.theta is None else cfg.theta
    tau = _lattice_time(cfg, 225)
    hw = int(cfg.half_width or 160)
    metrics = {"max_sim_err": 0.0, "bessel_l1": 0.0}
    for alpha in cfg.alpha or FIG_ALPHAS:
        params = wp.DTQWPacketParams(theta, alpha)
        start = wp.dtqw_profile(0, params, hw, spec=cfg.spec)
        names, cols = ["position"], [start.positions]
        for t in (0, tau):
            sim = dtqw_evolve(start, theta, t)
            exact = wp.dtqw_profile(t, params, hw, spec=cfg.spec)
            approx = wp.dtqw_profile(t, params, hw, "bessel", spec=cfg.spec)
            for label, state in (("sim", sim), ("exact", exact), ("bessel", approx)):
                rho = obs.density(state).rho
                metrics["norm"] = _check_density(rho, 1.0, f"alpha={alpha} {label} tau={t}")
                names.append(f"rho_{label}_tau{t}")
                cols.append(rho)
            rho_exact = cols[-2]
            metrics["max_sim_err"] = max(metrics["max_sim_err"], float(np.max(np.abs(cols[-3] - rho_exact))))
            metrics["bessel_l1"] = max(metrics["bessel_l1"], float(np.sum(np.abs(cols[-1] - rho_exact))))
        path = out_dir / f"fig2_alpha{_tag(alpha)}.csv"
        _write_csv(path, names, cols)
        written.append(path)
    return metrics


def _figure_3(cfg: RunConfig, out_dir: Path, written: list):
    a_grid = np.geomspace(cfg.a_min, cfg.a_max, cfg.points)
    s_dirac, s_walk = _entropy_scan(cfg, a_grid)
    path = out_dir / "fig3.csv"
    _write_csv(path, ["a", "entropy_dirac", "entropy_dtqw"], [a_grid, s_dirac, s_walk])
    written.append(path)
    return {"max_gap": float(np.max(np.abs(s_dirac - s_walk)))}


def _figure_4(cfg: RunConfig, out_dir: Path, written: list):
    gamma = math.cos(FIG_THETA) / 2 if cfg.gamma is None else cfg.gamma
    t_end = 225.0 if cfg.time is None else cfg.time
    hw = int(cfg.half_width or 160)
    metrics = {}
    for alpha in cfg.alpha or FIG_ALPHAS:
        params = wp.CTQWPacketParams(gamma, alpha)
        names, cols = ["position"], []
        for t in (0.0, t_end):
            state = wp.ctqw_profile(t, params, hw)
            rho = obs.density(state).rho
            metrics["norm"] = _check_density(rho, 1.0, f"alpha={alpha} t={t}")
            if not cols:
                cols.append(state.positions)
            names.append(f"rho_t{_tag(t)}")
            cols.append(rho)
        path = out_dir / f"fig4_alpha{_tag(alpha)}.csv"
        _write_csv(path, names, cols)
        written.append(path)
    return metrics


_FIGURES = {1: _figure_1, 2: _figure_2, 3: _figure_3, 4: _figure_4}


def _cmd_figure(cfg: RunConfig, out_dir: Path):
    written: list[Path] = []
    try:
        metrics = _FIGURES[cfg.figure](cfg, out_dir, written)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return written, metrics


_COMMANDS = {
    "simulate": _cmd_simulate,
    "packet": _cmd_packet,
    "compare": _cmd_compare,
    "entropy-scan": _cmd_entropy_scan,
    "figure": _cmd_figure,
}


def _default_out(cfg: RunConfig) -> Path:
    if cfg.command == "figure":
        return Path(".")
    stem = cfg.command if cfg.model is None else f"{cfg.command}_{cfg.model}"
    return Path(f"{stem}.csv")


def _summary(cfg: RunConfig, files: Iterable[Path], metrics: dict, elapsed: float) -> str:
    parts = [cfg.command if cfg.figure is None else f"figure {cfg.figure}"]
    parts.append("files=" + ";".join(str(p) for p in files))
    for key, value in metrics.items():
        parts.append(f"{key}={value:.6g}" if isinstance(value, float) else f"{key}={value}")
    parts.append(f"runtime={elapsed:.2f}s")
    return " ".join(parts)


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    try:
        cfg.validate()
    except (ValueError, Unsupported) as exc:
        print(f"relwalk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(cfg.out) if cfg.out else _default_out(cfg)
    start = time.perf_counter()
    try:
        files, metrics = _COMMANDS[cfg.command](cfg, out)
    except (ConvergenceFailure, NormalizationError, _NumericCheckFailed) as exc:
        print(f"relwalk: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, Unsupported, LightConeOverflow) as exc:
        print(f"relwalk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(_summary(cfg, files, metrics, time.perf_counter() - start))
    return EXIT_OK


def _angle_arg(text: str) -> float:
    try:
        return parse_angle(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theta", type=_angle_arg, help="coin angle, e.g. 3pi/7 or 0.5 (radians)")
    common.add_argument("--mass", type=float, help="Dirac mass")
    common.add_argument("--gamma", type=float, help="CTQW hopping rate")
    common.add_argument("--alpha", type=float, nargs="+", help="lattice localization(s)")
    common.add_argument("--a", type=float, nargs="+", help="continuum localization(s)")
    common.add_argument("--time", type=float, help="final time (steps for the DTQW)")
    common.add_argument("--half-width", type=float, help="lattice half-width in sites, or Dirac half-length")
    common.add_argument("--spacing", type=float, help="Dirac grid spacing")
    common.add_argument("--out", help="output CSV (or directory for figure)")
    common.add_argument("--tol", type=float, help="quadrature absolute tolerance")

    parser = argparse.ArgumentParser(prog="relwalk", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="evolve the t=0 analytic packet numerically")
    p.add_argument("--model", choices=["dtqw", "ctqw", "dirac"], default="dtqw")

    p = sub.add_parser("packet", parents=[common], help="evaluate an analytic packet")
    p.add_argument("--model", choices=["dtqw", "dtqw-bessel", "ctqw", "dirac"], default="dtqw")

    p = sub.add_parser("compare", parents=[common], help="compare two lattice packets")
    pair = p.add_mutually_exclusive_group()
    pair.add_argument("--dtqw-vs-ctqw", dest="pair", action="store_const", const="dtqw-ctqw")
    pair.add_argument("--dtqw-vs-bessel", dest="pair", action="store_const", const="dtqw-bessel")
    p.set_defaults(pair="dtqw-ctqw")

    for name, help_text in (
        ("entropy-scan", "spinor entropy versus localization"),
        ("figure", "write the data behind one figure"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "figure":
            p.add_argument("figure", type=int, choices=sorted(_FIGURES))
        p.add_argument("--a-min", type=float, default=0.05)
        p.add_argument("--a-max", type=float, default=20.0)
        p.add_argument("--points", type=int, default=25)
    return parser


def config_from_args(argv: Sequence[str] | None = None) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    known = {f.name for f in fields(RunConfig)} - {"explicit"}
    values = {k: v for k, v in vars(ns).items() if k in known}
    explicit = {k for k, v in vars(ns).items() if v is not None and k in known}
    return RunConfig(**values, explicit=explicit)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
