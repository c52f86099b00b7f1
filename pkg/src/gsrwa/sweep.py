"""Parameter sweeps producing deterministic CSV tables (and optional SVG plots).

Configuration is a flat ``key = value`` text file; every key can be
overridden by the command-line flag of the same name (``g1_start`` ↔
``--g1-start``).
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .exact import converge_truncation, exact_gap_minimum
from .exceptions import ConfigError, GsrwaError, NoCrossingError
from .solver import Method, crossing_point, entanglement_entropy, analytic_beta_lambda, solve
from .transform import ModelParams

MODES = ("coupling_sweep", "detuning_sweep", "entanglement", "crossing", "point")
METHODS = ("gsrwa", "gsrwa_analytic", "gvm", "grwa", "exact")
MODEL_METHODS = {
    "gsrwa": Method.GSRWA,
    "gsrwa_analytic": Method.GSRWA_ANALYTIC,
    "gvm": Method.GVM,
    "grwa": Method.GRWA,
}
ERR = "ERR"

_FLOAT_KEYS = (
    "omega", "g1_start", "g1_stop", "g1_step", "g1", "delta_start", "delta_stop",
    "delta_step", "oracle_tol", "omega_ghz", "delta_ghz",
)  # fmt: skip
_KNOWN_KEYS = set(_FLOAT_KEYS) | {"mode", "delta", "g2_rule", "methods", "out", "svg", "offdiag", "jobs"}


@dataclass(frozen=True)
class SweepConfig:
    mode: str
    omega: float = 1.0
    delta: tuple[float, ...] = (1.0,)
    g1_range: tuple[float, float, float] = (0.0, 1.0, 0.1)
    g2_rule: tuple[str, float | None] = ("equal", None)
    methods: tuple[str, ...] = METHODS
    oracle_tol: float = 1e-8
    output_path: str | None = None
    emit_svg: bool = False
    g1: float | None = None
    delta_range: tuple[float, float, float] | None = None
    offdiag: str = "hop"
    jobs: int = 1
    notes: dict = field(default_factory=dict, compare=False)

    def g2(self, g1: float) -> float:
        kind, value = self.g2_rule
        if kind == "equal":
            return g1
        if kind == "ratio":
            return value * g1
        return value

    def params(self, delta: float, g1: float) -> ModelParams:
        return ModelParams(self.omega, delta, g1, self.g2(g1))


# ---------------------------------------------------------------------------
# configuration parsing


def read_config_file(path: str | Path) -> dict[str, str]:
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _float(mapping, key, default=None):
    if key not in mapping:
        return default
    try:
        value = float(mapping[key])
    except ValueError as exc:
        raise ConfigError(f"{key} must be a number, got {mapping[key]!r}") from exc
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite")
    return value


def _range(start, stop, step, name):
    if step is None or step <= 0:
        raise ConfigError(f"{name}_step must be positive")
    if start > stop:
        raise ConfigError(f"{name}_start must not exceed {name}_stop")
    return (start, stop, step)


def parse_g2_rule(text: str) -> tuple[str, float | None]:
    text = text.strip()
    if text == "equal":
        return ("equal", None)
    kind, _, value = text.partition(":")
    if kind in ("ratio", "fixed") and value:
        try:
            number = float(value)
        except ValueError as exc:
            raise ConfigError(f"bad g2 rule {text!r}") from exc
        if number < 0:
            raise ConfigError("g2 rule value must be non-negative")
        return (kind, number)
    raise ConfigError(f"g2_rule must be equal, ratio:R or fixed:V (got {text!r})")


def build_config(mapping: dict[str, str]) -> SweepConfig:
    mode = mapping.get("mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    notes = {}
    omega = _float(mapping, "omega", 1.0)
    omega_ghz, delta_ghz = _float(mapping, "omega_ghz"), _float(mapping, "delta_ghz")
    if (omega_ghz is None) != (delta_ghz is None):
        raise ConfigError("omega_ghz and delta_ghz must be given together")
    if omega_ghz is not None:
        if omega_ghz <= 0 or delta_ghz < 0:
            raise ConfigError("GHz frequencies must be positive")
        omega = 1.0
        deltas = (delta_ghz / omega_ghz,)
        notes["frequencies_ghz"] = (omega_ghz, delta_ghz)
    else:
        try:
            deltas = tuple(float(x) for x in mapping.get("delta", "1").split(","))
        except ValueError as exc:
            raise ConfigError(f"delta must be a comma-separated list, got {mapping['delta']!r}") from exc
    if omega <= 0:
        raise ConfigError("omega must be positive")
    if not deltas or any(not math.isfinite(d) or d < 0 for d in deltas):
        raise ConfigError("delta values must be finite and non-negative")

    g1 = _float(mapping, "g1")
    start = _float(mapping, "g1_start", 0.0 if g1 is None else g1)
    stop = _float(mapping, "g1_stop", start)
    step = _float(mapping, "g1_step", 1.0)
    g1_range = _range(start, stop, step, "g1")
    if min(g1_range[:2]) < 0 or (g1 is not None and g1 < 0):
        raise ConfigError("couplings must be non-negative")

    delta_range = None
    if mode == "detuning_sweep":
        d0 = _float(mapping, "delta_start")
        if d0 is None:
            raise ConfigError("detuning_sweep needs delta_start/delta_stop/delta_step")
        delta_range = _range(d0, _float(mapping, "delta_stop", d0), _float(mapping, "delta_step", 1.0), "delta")
        if d0 < 0:
            raise ConfigError("delta_start must be non-negative")

    methods = tuple(m.strip() for m in mapping.get("methods", ",".join(METHODS)).split(",") if m.strip())
    if not methods:
        raise ConfigError("methods must be non-empty")
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ConfigError(f"unknown methods {unknown}; choose from {METHODS}")

    g2_rule = parse_g2_rule(mapping.get("g2_rule", "equal"))
    if mode == "entanglement" and g2_rule[0] != "equal":
        raise ConfigError("entanglement mode is isotropic (g2_rule = equal)")
    if mode == "crossing":
        if g2_rule[0] != "ratio":
            raise ConfigError("crossing mode needs g2_rule = ratio:R")
        if not g2_rule[1] < 1:
            raise ConfigError(f"a level crossing needs ratio < 1 (g2 < g1), got ratio {g2_rule[1]}")

    tol = _float(mapping, "oracle_tol", 1e-8)
    if tol <= 0:
        raise ConfigError("oracle_tol must be positive")
    offdiag = mapping.get("offdiag", "hop")
    if offdiag not in ("hop", "full"):
        raise ConfigError("offdiag must be 'hop' or 'full'")
    try:
        jobs = int(mapping.get("jobs", "1"))
    except ValueError as exc:
        raise ConfigError("jobs must be an integer") from exc
    svg = mapping.get("svg", "false").strip().lower()
    if svg not in ("true", "false", "1", "0", "yes", "no"):
        raise ConfigError(f"svg must be a boolean, got {svg!r}")

    return SweepConfig(
        mode=mode,
        omega=omega,
        delta=deltas,
        g1_range=g1_range,
        g2_rule=g2_rule,
        methods=methods,
        oracle_tol=tol,
        output_path=mapping.get("out") or None,
        emit_svg=svg in ("true", "1", "yes"),
        g1=g1,
        delta_range=delta_range,
        offdiag=offdiag,
        jobs=max(1, jobs),
        notes=notes,
    )


# ---------------------------------------------------------------------------
# formatting


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    text = f"{value:.12g}"
    return "0" if text == "-0" else text


def grid(start: float, stop: float, step: float) -> list[float]:
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [float(f"{start + i * step:.12g}") for i in range(count)]


def to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# per-point evaluation


def method_columns(method: str) -> list[str]:
    if method == "exact":
        return ["E_gs_exact", "E_1_exact", "N_ph_exact", "S_exact", "n_max_exact"]
    return [f"{c}_{method}" for c in ("E_gs", "N_ph", "S", "beta", "lambda", "branch")]


def evaluate(p: ModelParams, method: str, cfg: SweepConfig) -> list:
    if method == "exact":
        n_star, res = converge_truncation(p, cfg.oracle_tol)
        return [res.eigenvalues[0], res.eigenvalues[1], res.photon_number, res.qubit_entropy, n_star]
    rep = solve(p, MODEL_METHODS[method], cfg.offdiag)
    return [
        rep.energy,
        rep.photon_number,
        rep.entropy,
        rep.optimum.beta,
        rep.optimum.lam,
        rep.branch.value,
    ]


def _scale(values: list, method: str, omega: float) -> list:
    out = list(values)
    out[0] = out[0] / omega
    if method == "exact":
        out[1] = out[1] / omega
    return out


def _row(task):
    cfg, lead, p = task
    row, ok = list(lead), True
    for method in cfg.methods:
        try:
            row += _scale(evaluate(p, method, cfg), method, cfg.omega)
        except (GsrwaError, ValueError, ArithmeticError):
            row += [ERR] * len(method_columns(method))
            ok = False
    return row + ["ok" if ok else ERR]


def _map(cfg: SweepConfig, func, tasks):
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(func, tasks))
    return [func(t) for t in tasks]


# ---------------------------------------------------------------------------
# sweep drivers


@dataclass
class Table:
    header: list[str]
    rows: list[list]
    plot_x: str = ""
    plot_prefix: str = "E_gs_"
    messages: list[str] = field(default_factory=list)
    failed: bool = False

    def csv(self) -> str:
        return to_csv(self.header, self.rows)


def _method_header(cfg):
    return [c for m in cfg.methods for c in method_columns(m)] + ["status"]


def run_coupling_sweep(cfg: SweepConfig) -> Table:
    w = cfg.omega
    tasks = [
        (cfg, [g1 / w, d / w], cfg.params(d, g1))
        for d in cfg.delta
        for g1 in grid(*cfg.g1_range)
    ]
    header = ["g1_over_omega", "delta_over_omega"] + _method_header(cfg)
    return Table(header, _map(cfg, _row, tasks), plot_x="g1_over_omega")


def run_point(cfg: SweepConfig) -> Table:
    g1 = cfg.g1 if cfg.g1 is not None else cfg.g1_range[0]
    w = cfg.omega
    tasks = [(cfg, [g1 / w, d / w], cfg.params(d, g1)) for d in cfg.delta]
    header = ["g1_over_omega", "delta_over_omega"] + _method_header(cfg)
    return Table(header, _map(cfg, _row, tasks), plot_x="g1_over_omega")


def run_detuning_sweep(cfg: SweepConfig) -> Table:
    g1 = cfg.g1 if cfg.g1 is not None else cfg.g1_range[0]
    w = cfg.omega
    tasks = [(cfg, [d / w, g1 / w], cfg.params(d, g1)) for d in grid(*cfg.delta_range)]
    header = ["delta_over_omega", "g1_over_omega"] + _method_header(cfg)
    return Table(header, _map(cfg, _row, tasks), plot_x="delta_over_omega")


def _entanglement_row(task):
    cfg, g1, d = task
    p = ModelParams(cfg.omega, d, g1, g1)
    try:
        s_gsrwa = entanglement_entropy(analytic_beta_lambda(p))[0]
    except (GsrwaError, ValueError, ArithmeticError):
        s_gsrwa = ERR
    try:
        s_exact = converge_truncation(p, cfg.oracle_tol)[1].qubit_entropy
    except (GsrwaError, ValueError, ArithmeticError):
        s_exact = ERR
    return [g1 / cfg.omega, s_gsrwa, s_exact]


def run_entanglement(cfg: SweepConfig) -> Table:
    d = cfg.delta[0]
    tasks = [(cfg, g1, d) for g1 in grid(*cfg.g1_range)]
    table = Table(
        ["g1_over_omega", "S_gsrwa_analytic", "S_exact"],
        _map(cfg, _entanglement_row, tasks),
        plot_x="g1_over_omega",
        plot_prefix="S_",
    )
    table.messages.append(f"delta/omega = {fmt(d / cfg.omega)}")
    return table


def run_crossing(cfg: SweepConfig) -> Table:
    ratio = cfg.g2_rule[1]
    lo, hi = cfg.g1_range[0], cfg.g1_range[1]
    chosen = [m for m in ("gsrwa", "gvm", "grwa", "exact") if m in cfg.methods]
    header = ["delta_over_omega", "ratio"] + [f"gc_{m}" for m in chosen]
    table = Table(header, [], plot_x="")
    for d in cfg.delta:
        template = ModelParams(cfg.omega, d, 0.0, 0.0)
        row = [d / cfg.omega, ratio]
        for m in chosen:
            try:
                if m == "exact":
                    gc = exact_gap_minimum(template, ratio, (lo, hi))
                else:
                    gc = crossing_point(template, ratio, (lo, hi), MODEL_METHODS[m], cfg.offdiag)
                row.append(gc / cfg.omega)
                table.messages.append(f"delta/omega={fmt(d / cfg.omega)} {m}: g_c/omega = {fmt(gc / cfg.omega)}")
            except NoCrossingError as exc:
                row.append(ERR)
                table.failed = True
                table.messages.append(f"delta/omega={fmt(d / cfg.omega)} {m}: {exc}")
        table.rows.append(row)
    return table


RUNNERS = {
    "coupling_sweep": run_coupling_sweep,
    "detuning_sweep": run_detuning_sweep,
    "entanglement": run_entanglement,
    "crossing": run_crossing,
    "point": run_point,
}


def run(cfg: SweepConfig) -> Table:
    return RUNNERS[cfg.mode](cfg)


# ---------------------------------------------------------------------------
# SVG


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f")


def render_svg(table: Table, width: int = 640, height: int = 420) -> str:
    """Minimal line plot of every ``plot_prefix*`` column against ``plot_x``."""
    xi = table.header.index(table.plot_x)
    group_col = None
    for name in ("delta_over_omega",):
        if name in table.header and name != table.plot_x:
            group_col = table.header.index(name)
    series = {}
    for col, name in enumerate(table.header):
        if not name.startswith(table.plot_prefix):
            continue
        for row in table.rows:
            x, y = row[xi], row[col]
            if not isinstance(y, float) or not math.isfinite(y):
                continue
            key = name[len(table.plot_prefix):]
            if group_col is not None:
                key += f" (delta={fmt(row[group_col])})"
            series.setdefault(key, []).append((x, y))
    points = [pt for pts in series.values() for pt in pts]
    margin = 60
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if points:
        x0, x1 = min(p[0] for p in points), max(p[0] for p in points)
        y0, y1 = min(p[1] for p in points), max(p[1] for p in points)
        x1 = x1 if x1 > x0 else x0 + 1
        y1 = y1 if y1 > y0 else y0 + 1

        def sx(x):
            return margin + (x - x0) / (x1 - x0) * (width - 2 * margin)

        def sy(y):
            return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin)

        out.append(
            f'<polyline fill="none" stroke="black" points="{margin},{margin} {margin},{height - margin} '
            f'{width - margin},{height - margin}"/>'
        )
        for value, anchor in ((x0, "start"), (x1, "end")):
            out.append(
                f'<text x="{sx(value):.2f}" y="{height - margin + 18}" font-size="11" '
                f'text-anchor="{anchor}">{fmt(value)}</text>'
            )
        for value in (y0, y1):
            out.append(f'<text x="{margin - 6}" y="{sy(value):.2f}" font-size="11" text-anchor="end">{fmt(value)}</text>')
        out.append(
            f'<text x="{width / 2:.0f}" y="{height - 15}" font-size="12" text-anchor="middle">{table.plot_x}</text>'
        )
        for i, (label, pts) in enumerate(series.items()):
            color = _COLORS[i % len(_COLORS)]
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
            out.append(
                f'<text x="{width - margin + 4 - 150}" y="{margin + 14 * i}" font-size="11" fill="{color}">'
                f"{label}</text>"
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"
