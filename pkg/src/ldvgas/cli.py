"""Run driver, config files, and the command line front end.

A run is described by a flat ``key = value`` config file with three
sections: ``[case]`` picks one of the published setups, ``[solver]``
overrides its method and discretization, ``[output]`` sets times and
destination.  Every key has a default that matches the named case, and
unknown keys are rejected so a typo cannot silently fall back.

The driver is deliberately single threaded: runs must produce byte
identical CSV output for identical configs, and the per-cell work is
already batched into array operations.  A ``workers`` key is accepted
for compatibility with schedulers that insist on passing one, but only
the serial path exists.
"""

from __future__ import annotations

import argparse
import configparser
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cases import (
    CASE_NAMES,
    HEAT_TRANSFER_KNUDSEN,
    CaseSpec,
    cell_centers,
    make_case,
)
from .errors import SolverError
from .scheme_dvm import dvm_state, dvm_step
from .scheme_ldv import (
    ENLARGE_TOL,
    GROWTH_CAP,
    CellState,
    _ghost_pair,
    initial_row,
    ldv_step,
    select_timestep,
)

__all__ = [
    "RunConfig",
    "ProfileRecord",
    "RunResult",
    "parse_config",
    "emit_config",
    "simulate",
    "run_from_config",
    "write_outputs",
    "profiles",
    "plateau_width",
    "read_profile",
    "compare_profiles",
    "main",
]

_NONE = "none"


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs, resolved from one config file.

    ``None`` means "use the case default"; the solver modules do the
    resolution so that a hand-built script and a config file run take
    the same path.
    """

    case: str
    knudsen: float = 1e-2
    nx: int | None = None
    method: str = "ldv"
    variant: str | None = None
    velocities: int | None = None
    points: int | None = None
    span: float = 4.0
    bounds: tuple[float, float] | None = None
    enlarge: bool | None = None
    enlarge_tol: float = ENLARGE_TOL
    growth_cap: int = GROWTH_CAP
    cfl_safety: float = 1.0
    timestep: str = "default"
    fallback: bool = False
    times: tuple[float, ...] | None = None
    directory: str | None = None
    workers: int = 0
    plots: bool = True


def _parse_bool(s: str) -> bool:
    if s == "true":
        return True
    if s == "false":
        return False
    raise ValueError(f"expected true or false, got {s!r}")


def _parse_floats(s: str) -> tuple[float, ...]:
    vals = tuple(float(tok) for tok in s.split())
    if not vals:
        raise ValueError("expected at least one number")
    return vals


def _opt(convert):
    return lambda s: None if s == _NONE else convert(s)


# section, key, RunConfig field, converter.  Order fixes the emitted form.
_SCHEMA = (
    ("case", "name", "case", str),
    ("case", "knudsen", "knudsen", float),
    ("case", "nx", "nx", _opt(int)),
    ("solver", "method", "method", str),
    ("solver", "variant", "variant", _opt(str)),
    ("solver", "velocities", "velocities", _opt(int)),
    ("solver", "points", "points", _opt(int)),
    ("solver", "span", "span", float),
    ("solver", "bounds", "bounds", _opt(_parse_floats)),
    ("solver", "enlarge", "enlarge", _opt(_parse_bool)),
    ("solver", "enlarge_tol", "enlarge_tol", float),
    ("solver", "growth_cap", "growth_cap", int),
    ("solver", "cfl_safety", "cfl_safety", float),
    ("solver", "timestep", "timestep", str),
    ("solver", "fallback", "fallback", _parse_bool),
    ("output", "times", "times", _opt(_parse_floats)),
    ("output", "directory", "directory", _opt(str)),
    ("output", "workers", "workers", int),
    ("output", "plots", "plots", _parse_bool),
)

_VARIANTS = ("base", "moment-correction", "exact-integral")


def parse_config(text: str) -> RunConfig:
    """Read a config file body; unknown sections or keys are errors."""
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ValueError(f"bad config syntax: {e}") from None
    allowed = {(sec, key): (name, conv) for sec, key, name, conv in _SCHEMA}
    known_sections = {sec for sec, *_ in _SCHEMA}
    kwargs = {}
    for sec in cp.sections():
        if sec not in known_sections:
            raise ValueError(f"unknown section [{sec}]")
        for key, raw in cp.items(sec):
            if (sec, key) not in allowed:
                raise ValueError(f"unknown key {key!r} in section [{sec}]")
            name, conv = allowed[(sec, key)]
            try:
                kwargs[name] = conv(raw.strip())
            except ValueError as e:
                raise ValueError(f"bad value for {sec}.{key}: {e}") from None
    if "case" not in kwargs:
        raise ValueError("missing required key: [case] name")
    cfg = RunConfig(**kwargs)
    validate_config(cfg)
    return cfg


def _fmt_key(value) -> str:
    if value is None:
        return _NONE
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return " ".join(repr(float(v)) for v in value)
    return str(value)


def emit_config(cfg: RunConfig) -> str:
    """Canonical text form: every key, fixed order, so emit(parse(emit))
    reproduces the same bytes."""
    lines = []
    current = None
    for sec, key, name, _ in _SCHEMA:
        if sec != current:
            if current is not None:
                lines.append("")
            lines.append(f"[{sec}]")
            current = sec
        lines.append(f"{key} = {_fmt_key(getattr(cfg, name))}")
    lines.append("")
    return "\n".join(lines)


def validate_config(cfg: RunConfig) -> None:
    if cfg.case not in CASE_NAMES:
        raise ValueError(f"unknown case {cfg.case!r}, expected one of {CASE_NAMES}")
    if cfg.method not in ("ldv", "dvm"):
        raise ValueError(f"method must be 'ldv' or 'dvm', got {cfg.method!r}")
    if cfg.variant is not None and cfg.variant not in _VARIANTS:
        raise ValueError(f"variant must be one of {_VARIANTS}, got {cfg.variant!r}")
    if cfg.points is not None and cfg.points not in (2, 3, 4):
        raise ValueError(f"points must be 2, 3 or 4, got {cfg.points}")
    if cfg.velocities is not None and cfg.velocities < 2:
        raise ValueError("velocities must be at least 2")
    if cfg.nx is not None and cfg.nx < 2:
        raise ValueError("nx must be at least 2")
    if not 0.0 < cfg.cfl_safety <= 1.0:
        raise ValueError("cfl_safety must lie in (0, 1]")
    if cfg.timestep not in ("default", "strict"):
        raise ValueError(f"timestep must be 'default' or 'strict', got {cfg.timestep!r}")
    if cfg.enlarge_tol <= 0.0:
        raise ValueError("enlarge_tol must be positive")
    if cfg.growth_cap < 1:
        raise ValueError("growth_cap must be at least 1")
    if cfg.workers < 0:
        raise ValueError("workers must be non-negative")
    if cfg.bounds is not None:
        if len(cfg.bounds) != 2 or not cfg.bounds[0] < cfg.bounds[1]:
            raise ValueError("bounds must be two ascending numbers")
    if cfg.times is not None:
        if any(t <= 0.0 for t in cfg.times):
            raise ValueError("output times must be positive")
        if any(b <= a for a, b in zip(cfg.times, cfg.times[1:])):
            raise ValueError("output times must be strictly increasing")
    if cfg.method == "dvm":
        # the global-grid method has no variant, adaptation, or stencil knobs
        for key, bad in (
            ("variant", cfg.variant is not None),
            ("points", cfg.points is not None),
            ("enlarge", cfg.enlarge is True),
            ("timestep", cfg.timestep == "strict"),
        ):
            if bad:
                raise ValueError(f"{key} does not apply to the dvm method")
    elif cfg.bounds is not None:
        raise ValueError("explicit velocity bounds only apply to the dvm method")


@dataclass(frozen=True)
class ProfileRecord:
    """Macroscopic state at one cell center."""

    x: float
    rho: float
    u: float
    T: float
    p: float


@dataclass(frozen=True)
class DiagRecord:
    step: int
    time: float
    dt: float
    mass: float
    momentum: float
    energy: float
    drift: float
    min_value: float
    max_size: int
    enlarged: int
    fallbacks: int
    redos: int


@dataclass
class RunResult:
    case: CaseSpec
    method: str
    snapshots: list[tuple[float, list[CellState]]]
    records: list[DiagRecord]
    steps: int
    wall_seconds: float
    error: SolverError | None = None
    error_step: int | None = None


def profiles(case: CaseSpec, cells) -> list[ProfileRecord]:
    R = case.gas.R
    out = []
    for x, c in zip(cell_centers(case), cells):
        U = c.moments
        out.append(
            ProfileRecord(float(x), U.rho, U.velocity, U.temperature(R), U.pressure(R))
        )
    return out


def simulate(
    case: CaseSpec,
    *,
    method: str = "ldv",
    variant: str | None = None,
    velocities: int | None = None,
    points: int | None = None,
    span: float = 4.0,
    bounds: tuple[float, float] | None = None,
    enlarge: bool | None = None,
    enlarge_tol: float = ENLARGE_TOL,
    growth_cap: int = GROWTH_CAP,
    cfl_safety: float = 1.0,
    strict_dt: bool = False,
    fallback: bool = False,
    times: tuple[float, ...] | None = None,
    raise_errors: bool = True,
) -> RunResult:
    """March a case to each output time and collect snapshots.

    The step size is the stability limit clipped to land exactly on the
    next output time, so snapshots need no interpolation in time.  On a
    solver failure with ``raise_errors=False`` the result carries the
    error and everything computed before it, so a caller can still
    flush partial output.
    """
    targets = tuple(sorted(times if times is not None else case.output_times))
    if not targets or targets[0] <= 0.0:
        raise ValueError("need at least one positive output time")
    if method == "dvm":
        state = dvm_state(case, span=span, velocities=velocities, bounds=bounds)
        cells = state.to_cells()
        # frozen node speeds never change, so the stability limit is fixed
        dt_max = select_timestep(cells, case.dx, cfl_safety)
    elif method == "ldv":
        if bounds is not None:
            raise ValueError("explicit velocity bounds only apply to the dvm method")
        cells = initial_row(
            case,
            velocities=velocities,
            span=span,
            points=points if points is not None else case.points,
            variant=variant,
        )
    else:
        raise ValueError(f"unknown method {method!r}, expected 'ldv' or 'dvm'")

    dx = case.dx
    total0 = dx * np.sum([c.moments.as_array() for c in cells], axis=0)
    scale = float(np.abs(total0).max())
    through = np.zeros(3)  # time-integrated boundary flux imbalance
    wall_cache: dict = {}
    snapshots: list[tuple[float, list[CellState]]] = []
    records: list[DiagRecord] = []
    t = 0.0
    step = 0
    index = 0
    error: SolverError | None = None
    error_step = None
    tiny = 1e-12 * targets[-1]

    started = time.perf_counter()
    try:
        while index < len(targets):
            target = targets[index]
            if target - t <= tiny:
                snapshots.append((target, cells))
                index += 1
                continue
            if method == "dvm":
                dt = min(dt_max, target - t)
                state, diag = dvm_step(
                    state, case, dt, fallback=fallback, wall_cache=wall_cache
                )
                cells = state.to_cells()
            else:
                ghosts = _ghost_pair(cells, case, span=span, cache=wall_cache)
                dt = select_timestep(cells, dx, cfl_safety, ghosts=ghosts)
                dt = min(dt, target - t)
                cells, diag = ldv_step(
                    cells,
                    case,
                    dt,
                    variant=variant,
                    points=points,
                    velocities=velocities,
                    span=span,
                    enlarge=enlarge,
                    enlarge_tol=enlarge_tol,
                    growth_cap=growth_cap,
                    cfl_safety=cfl_safety,
                    strict_dt=strict_dt,
                    fallback=fallback,
                    wall_cache=wall_cache,
                )
            step += 1
            t += diag.dt
            through += diag.dt * (diag.flux_right - diag.flux_left)
            drift = float(np.abs(diag.totals + through - total0).max() / scale)
            records.append(
                DiagRecord(
                    step,
                    t,
                    diag.dt,
                    float(diag.totals[0]),
                    float(diag.totals[1]),
                    float(diag.totals[2]),
                    drift,
                    diag.min_value,
                    diag.max_size,
                    diag.enlarged,
                    diag.fallbacks,
                    diag.redos,
                )
            )
    except SolverError as e:
        error = e
        error_step = step + 1
    wall_seconds = time.perf_counter() - started

    if error is not None and raise_errors:
        raise error
    return RunResult(
        case, method, snapshots, records, step, wall_seconds, error, error_step
    )


def run_from_config(cfg: RunConfig, *, raise_errors: bool = True) -> RunResult:
    case = make_case(cfg.case, kn=cfg.knudsen, nx=cfg.nx)
    return simulate(
        case,
        method=cfg.method,
        variant=cfg.variant,
        velocities=cfg.velocities,
        points=cfg.points,
        span=cfg.span,
        bounds=cfg.bounds,
        enlarge=cfg.enlarge,
        enlarge_tol=cfg.enlarge_tol,
        growth_cap=cfg.growth_cap,
        cfl_safety=cfg.cfl_safety,
        strict_dt=cfg.timestep == "strict",
        fallback=cfg.fallback,
        times=cfg.times,
        raise_errors=raise_errors,
    )


def plateau_width(x, rho, floor: float = 0.05) -> float:
    """Modal width of the staircase steps in a density profile.

    Collisionless flow on a discrete velocity grid produces a staircase
    whose risers sit one transported node apart.  Upwind smearing makes
    the risers overlap, so a fixed jump threshold cannot separate them;
    what survives the smearing is that each riser is a local maximum of
    the cell-to-cell jump sequence.  Riser positions are those maxima
    (above ``floor`` times the largest jump, to drop tail noise), their
    gaps are rounded to whole cells, and the most common gap wins.
    """
    x = np.asarray(x, dtype=float)
    rho = np.asarray(rho, dtype=float)
    jumps = np.abs(np.diff(rho))
    top = float(jumps.max())
    if top == 0.0:
        raise ValueError("profile is flat, nothing to measure")
    faces = 0.5 * (x[:-1] + x[1:])
    # collapse runs of equal jumps first, so float noise on a flat-topped
    # riser cannot split it into several peaks
    tol = 1e-9 * top
    runs = []  # (jump value, first face, last face)
    start = 0
    for i in range(1, jumps.size + 1):
        if i == jumps.size or abs(jumps[i] - jumps[start]) > tol:
            runs.append((jumps[start], faces[start], faces[i - 1]))
            start = i
    peaks = []
    for r, (val, lo, hi) in enumerate(runs):
        if val <= floor * top:
            continue
        left = runs[r - 1][0] if r > 0 else -np.inf
        right = runs[r + 1][0] if r + 1 < len(runs) else -np.inf
        if val > left and val > right:
            peaks.append(0.5 * (lo + hi))
    if len(peaks) < 2:
        raise ValueError("fewer than two risers, no plateau to measure")
    h = float(np.median(np.diff(x)))
    steps = np.rint(np.diff(peaks) / h).astype(int)
    sizes, counts = np.unique(steps, return_counts=True)
    return float(sizes[np.argmax(counts)] * h)


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _write_csv(path: Path, header, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def _time_tag(t: float) -> str:
    return format(t, "g")


def write_outputs(result: RunResult, out_dir: Path, *, plots: bool = True) -> list[Path]:
    """Flush everything a run produced; partial results are written too."""
    out_dir = Path(out_dir)
    case = result.case
    paths = [
        _write_csv(
            out_dir / "diagnostics.csv",
            (
                "step", "time", "dt", "mass", "momentum", "energy",
                "drift", "min_f", "max_nodes", "enlarged", "fallbacks", "redos",
            ),
            (
                (r.step, r.time, r.dt, r.mass, r.momentum, r.energy,
                 r.drift, r.min_value, r.max_size, r.enlarged, r.fallbacks, r.redos)
                for r in result.records
            ),
        )
    ]
    for t, cells in result.snapshots:
        tag = _time_tag(t)
        recs = profiles(case, cells)
        paths.append(
            _write_csv(
                out_dir / f"profile_t{tag}.csv",
                ("x", "rho", "u", "T", "p"),
                ((r.x, r.rho, r.u, r.T, r.p) for r in recs),
            )
        )
        if result.method == "ldv":
            x = cell_centers(case)
            paths.append(
                _write_csv(
                    out_dir / f"grids_t{tag}.csv",
                    ("cell", "x", "v"),
                    (
                        (i, x[i], v)
                        for i, c in enumerate(cells)
                        for v in c.grid.nodes
                    ),
                )
            )
        if plots:
            paths.append(_profile_figure(case, recs, t, out_dir / f"profile_t{tag}.png"))
            if result.method == "ldv":
                paths.append(_grid_figure(case, cells, t, out_dir / f"grids_t{tag}.png"))
    paths.append(_write_csv(out_dir / "summary.csv", *_summary_row(result)))
    return paths


def _summary_row(result: RunResult):
    records = result.records
    width = float("nan")
    if result.case.gas.regime == "free-transport" and result.snapshots:
        _, cells = result.snapshots[-1]
        recs = profiles(result.case, cells)
        try:
            width = plateau_width([r.x for r in recs], [r.rho for r in recs])
        except ValueError:
            pass  # flat or unresolved profile: leave nan
    header = (
        "case", "method", "nx", "steps", "wall_seconds", "drift",
        "min_f", "max_nodes", "enlarged", "fallbacks", "plateau_width",
    )
    row = (
        result.case.name,
        result.method,
        result.case.nx,
        result.steps,
        result.wall_seconds,
        max((r.drift for r in records), default=float("nan")),
        min((r.min_value for r in records), default=float("nan")),
        max((r.max_size for r in records), default=0),
        sum(r.enlarged for r in records),
        sum(r.fallbacks for r in records),
        width,
    )
    return header, [row]


def _agg():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _profile_figure(case: CaseSpec, recs, t: float, path: Path) -> Path:
    plt = _agg()
    fig, axes = plt.subplots(2, 2, figsize=(9.0, 6.0), sharex=True)
    x = [r.x for r in recs]
    panels = (
        ("density", [r.rho for r in recs]),
        ("velocity", [r.u for r in recs]),
        ("temperature", [r.T for r in recs]),
        ("pressure", [r.p for r in recs]),
    )
    for ax, (label, vals) in zip(axes.flat, panels):
        ax.plot(x, vals, lw=1.2)
        ax.set_ylabel(label)
        ax.grid(alpha=0.3)
    for ax in axes[1]:
        ax.set_xlabel("x")
    fig.suptitle(f"{case.name} at t = {t:g}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _grid_figure(case: CaseSpec, cells, t: float, path: Path) -> Path:
    plt = _agg()
    from matplotlib.collections import LineCollection

    x = cell_centers(case)
    segments = [
        ((x[i], c.grid.nodes[0]), (x[i], c.grid.nodes[-1]))
        for i, c in enumerate(cells)
    ]
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    ax.add_collection(LineCollection(segments, linewidths=0.7, colors="tab:blue"))
    ax.autoscale()
    ax.set_xlabel("x")
    ax.set_ylabel("v")
    ax.set_title(f"{case.name}: velocity grid supports at t = {t:g}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def read_profile(path: Path) -> dict[str, np.ndarray]:
    """Profile CSV back as a column dict, in file order."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{path}: empty file")
        names = header.split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0 or data.shape[1] != len(names):
        raise ValueError(f"{path}: rows do not match header {names}")
    return {name: data[:, j] for j, name in enumerate(names)}


@dataclass(frozen=True)
class FieldError:
    field: str
    linf: float
    l2: float


def compare_profiles(a: dict, b: dict) -> list[FieldError]:
    """Relative errors of profile a against reference b, field by field.

    Mismatched x samplings are handled by interpolating the finer file
    onto the coarser one, restricted to the overlap.
    """
    if list(a) != list(b):
        raise ValueError(f"field mismatch: {list(a)} vs {list(b)}")
    if "x" not in a:
        raise ValueError("profiles need an x column")
    xa, xb = a["x"], b["x"]
    if max(xa[0], xb[0]) >= min(xa[-1], xb[-1]):
        raise ValueError("x ranges do not overlap, domains are incompatible")
    if xa.shape == xb.shape and np.array_equal(xa, xb):
        fine, coarse, xc = None, None, xa
    elif xa.size <= xb.size:
        fine, coarse, xc = b, a, xa
    else:
        fine, coarse, xc = a, b, xb
    if fine is not None:
        keep = (xc >= fine["x"][0]) & (xc <= fine["x"][-1])
        xc = xc[keep]
        resampled = {"x": xc}
        for name in fine:
            if name != "x":
                resampled[name] = np.interp(xc, fine["x"], fine[name])
        if coarse is a:
            a = {name: (a[name][keep] if name != "x" else xc) for name in a}
            b = resampled
        else:
            b = {name: (b[name][keep] if name != "x" else xc) for name in b}
            a = resampled
    out = []
    for name in a:
        if name == "x":
            continue
        diff = a[name] - b[name]
        ref_inf = float(np.abs(b[name]).max())
        ref_l2 = float(np.sqrt(np.sum(b[name] ** 2)))
        # a zero reference field makes the error absolute, not undefined
        linf = float(np.abs(diff).max()) / (ref_inf if ref_inf > 0.0 else 1.0)
        l2 = float(np.sqrt(np.sum(diff**2))) / (ref_l2 if ref_l2 > 0.0 else 1.0)
        out.append(FieldError(name, linf, l2))
    return out


def _cmd_run(args) -> int:
    config_path = Path(args.config)
    try:
        cfg = parse_config(config_path.read_text(encoding="ascii"))
    except (OSError, ValueError) as e:
        print(f"run: {e}", file=sys.stderr)
        return 2
    if args.workers is not None and args.workers < 0:
        print("run: workers must be non-negative", file=sys.stderr)
        return 2
    if args.out is not None:
        out_dir = Path(args.out)
    elif cfg.directory is not None:
        out_dir = Path(cfg.directory)
    else:
        out_dir = Path(f"{config_path.stem}.out")
    result = run_from_config(cfg, raise_errors=False)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "run.cfg").write_text(emit_config(cfg), encoding="ascii")
    write_outputs(result, out_dir, plots=cfg.plots and not args.no_plots)
    if result.error is not None:
        print(
            f"run: {cfg.case} ({cfg.method}) failed at step {result.error_step}: "
            f"{result.error}",
            file=sys.stderr,
        )
        print(f"partial output in {out_dir}", file=sys.stderr)
        return 2
    print(
        f"{cfg.case} ({cfg.method}): {result.steps} steps, "
        f"{result.wall_seconds:.3f} s wall, output in {out_dir}"
    )
    return 0


def _cmd_compare(args) -> int:
    try:
        errors = compare_profiles(read_profile(Path(args.a)), read_profile(Path(args.b)))
    except (OSError, ValueError) as e:
        print(f"compare: {e}", file=sys.stderr)
        return 2
    print("field,linf,l2")
    for fe in errors:
        print(f"{fe.field},{_fmt(fe.linf)},{_fmt(fe.l2)}")
    if args.linf is None:
        return 0
    ok = max(fe.linf for fe in errors) <= args.linf
    print("pass" if ok else "fail")
    return 0 if ok else 1


def _cmd_case_list() -> int:
    def line(label: str, case: CaseSpec) -> None:
        print(f"{label:<24}{case.nx:>6}{case.velocities:>6}  "
              f"{case.t_final:<10g}{case.variant:<19}"
              f"{'on' if case.enlarge else 'off':<9}{case.boundary}")

    print(f"{'case':<24}{'nx':>6}{'K':>6}  {'t_final':<10}{'variant':<19}"
          f"{'enlarge':<9}boundary")
    for name in CASE_NAMES:
        if name == "heat-transfer":
            for kn in sorted(HEAT_TRANSFER_KNUDSEN):
                line(f"{name} Kn={kn:g}", make_case(name, kn=kn))
        else:
            line(name, make_case(name))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ldvgas",
        description="1D BGK solver on local, time-adaptive velocity grids",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run a configured case and write CSV output")
    run_p.add_argument("config", help="flat key = value config file")
    run_p.add_argument("--out", help="output directory (default: <config stem>.out)")
    run_p.add_argument(
        "--workers",
        type=int,
        help="worker count; accepted for compatibility, the driver is serial",
    )
    run_p.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    cmp_p = sub.add_parser(
        "compare", help="relative L-inf and L2 errors between two profile CSVs"
    )
    cmp_p.add_argument("a", help="profile to test")
    cmp_p.add_argument("b", help="reference profile")
    cmp_p.add_argument(
        "--linf",
        type=float,
        help="print pass/fail and exit 1 if any field's L-inf error exceeds this",
    )
    sub.add_parser("case-list", help="print the published cases and their defaults")
    args = parser.parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "compare":
        return _cmd_compare(args)
    return _cmd_case_list()


if __name__ == "__main__":
    sys.exit(main())
