"""Run configuration files, solution records and plot-ready output files."""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import oracle
from .fourier import EvenSeries
from .functionals import CO_ROTATING, ConfigError, SheetConfig, SpeedClosure
from .solver import SheetSolution, spectral_diagnostics

FORMAT_VERSION = 1
EMIT_FLAGS = ("coeffs", "curves", "report", "svg")


@dataclass(frozen=True)
class RunConfig:
    sheet: SheetConfig
    epsilons: tuple
    output_dir: Path = Path("out")
    emit: tuple = EMIT_FLAGS
    oracle_Q: int = oracle.ORACLE_Q
    normal_tol: float = 1e-6
    tangential_tol: float = 1e-6

    def as_dict(self) -> dict:
        return {
            "sheet": asdict(self.sheet),
            "epsilons": list(self.epsilons),
            "emit": list(self.emit),
            "oracle_Q": self.oracle_Q,
            "normal_tol": self.normal_tol,
            "tangential_tol": self.tangential_tol,
        }


def parse_emit(text: str) -> tuple:
    flags = tuple(s.strip() for s in text.split(",") if s.strip())
    bad = [f for f in flags if f not in EMIT_FLAGS]
    if bad:
        raise ConfigError(f"unknown emit flag(s) {bad}; choose from {list(EMIT_FLAGS)}")
    return flags


def load_config(path) -> RunConfig:
    """Read an INI-style run configuration.

    Sections: [problem] mode, m, d; [numerics] N, Q, newton_tol,
    newton_max_iter; [run] epsilons, output_dir, emit; [oracle] Q,
    normal_tol, tangential_tol.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        prob = cp["problem"] if cp.has_section("problem") else {}
        num = cp["numerics"] if cp.has_section("numerics") else {}
        run = cp["run"] if cp.has_section("run") else {}
        orc = cp["oracle"] if cp.has_section("oracle") else {}
        sheet = SheetConfig(
            mode=prob.get("mode", CO_ROTATING).strip(),
            m=int(prob.get("m", "2")),
            d=float(prob.get("d", "2.0")),
            N=int(num.get("N", "32")),
            Q=int(num.get("Q", "256")),
            newton_tol=float(num.get("newton_tol", "1e-11")),
            newton_max_iter=int(num.get("newton_max_iter", "20")),
        )
        eps_text = run.get("epsilons", "").strip()
        if not eps_text:
            raise ConfigError("[run] epsilons must list at least one value")
        epsilons = tuple(float(e) for e in eps_text.replace(",", " ").split())
        return RunConfig(
            sheet=sheet,
            epsilons=epsilons,
            output_dir=Path(run.get("output_dir", "out")),
            emit=parse_emit(run.get("emit", ",".join(EMIT_FLAGS))),
            oracle_Q=int(orc.get("Q", str(oracle.ORACLE_Q))),
            normal_tol=float(orc.get("normal_tol", "1e-6")),
            tangential_tol=float(orc.get("tangential_tol", "1e-6")),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid value in {path}: {exc}") from exc


def config_hash(sheet: SheetConfig) -> str:
    blob = json.dumps(asdict(sheet), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def solution_record(sol: SheetSolution, report: oracle.EquilibriumReport | None = None) -> dict:
    tail, rate = spectral_diagnostics(sol)
    rec = {
        "format_version": FORMAT_VERSION,
        "config": asdict(sol.config),
        "config_hash": config_hash(sol.config),
        "epsilon": sol.epsilon,
        "speed": asdict(sol.speed),
        "f": sol.f.coeffs.tolist(),
        "g": sol.g.coeffs.tolist(),
        "residual_sup": sol.residual_sup,
        "residual_l2": sol.residual_l2,
        "newton_iters": sol.newton_iters,
        "history": list(sol.history),
        "spectral_tail_ratio": tail,
        "spectral_decay_rate": rate,
    }
    if report is not None:
        rec["curvature_min"] = report.curvature_min
        rec["oracle"] = report.as_dict()
    return rec


def write_record(rec: dict, path) -> None:
    Path(path).write_text(json.dumps(rec, indent=2, sort_keys=True) + "\n")


def load_record(path) -> SheetSolution:
    rec = json.loads(Path(path).read_text())
    if rec.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported record format {rec.get('format_version')!r}")
    cfg = SheetConfig(**rec["config"])
    if config_hash(cfg) != rec["config_hash"]:
        raise ValueError("config hash mismatch: record was edited or corrupted")
    return SheetSolution(
        config=cfg,
        epsilon=rec["epsilon"],
        speed=SpeedClosure(**rec["speed"]),
        f=EvenSeries(rec["f"]),
        g=EvenSeries(rec["g"]),
        residual_sup=rec["residual_sup"],
        residual_l2=rec["residual_l2"],
        newton_iters=rec["newton_iters"],
        history=tuple(rec.get("history", ())),
    )


def _fmt(v: float) -> str:
    return "%.17g" % v


def sheet_copies(sol: SheetSolution):
    """(positions, strengths) of every sheet, the computed one first."""
    cfg = sol.config
    z = sol.curve
    gam = sol.strength
    c = complex(cfg.d, 0)
    if cfg.mode == CO_ROTATING:
        return [(c + np.exp(2j * np.pi * i / cfg.m) * (z - c), gam) for i in range(cfg.m)]
    return [(z, gam), (2 * c - z, -gam)]


def vortex_centers(cfg: SheetConfig):
    c = complex(cfg.d, 0)
    if cfg.mode == CO_ROTATING:
        return [c - c * np.exp(2j * np.pi * i / cfg.m) for i in range(cfg.m)]
    return [0j, 2 * c]


def emit_curve(sol: SheetSolution, path) -> list:
    """Write one CSV per sheet: x, z1, z2, gamma, kappa, closed by repeating the x = 0 row."""
    path = Path(path)
    eps = sol.epsilon
    scaled = oracle.curvature_values(eps, sol.f.coeffs, sol.config.Q)
    with np.errstate(divide="ignore"):
        kappa = scaled / eps if eps != 0 else np.full(scaled.shape, np.inf)
    x = sol.x
    written = []
    for i, (z, gam) in enumerate(sheet_copies(sol)):
        out = path.with_name(f"{path.stem}_sheet{i}{path.suffix or '.csv'}")
        rows = ["x,z1,z2,gamma,kappa"]
        for q in list(range(x.size)) + [0]:
            rows.append(",".join(_fmt(v) for v in (x[q], z[q].real, z[q].imag, gam[q], kappa[q])))
        out.write_text("\n".join(rows) + "\n")
        written.append(out)
    return written


def emit_coeffs(sol: SheetSolution, path) -> Path:
    rows = ["j,f,g"]
    for j, (a, b) in enumerate(zip(sol.f.coeffs, sol.g.coeffs), start=1):
        rows.append(f"{j},{_fmt(a)},{_fmt(b)}")
    Path(path).write_text("\n".join(rows) + "\n")
    return Path(path)


REPORT_COLUMNS = ("epsilon", "speed", "speed_shift_over_eps", "residual_sup",
                  "oracle_normal_residual", "min_eps_kappa", "newton_iters", "tail_ratio")


@dataclass
class ReportRow:
    epsilon: float
    speed: float
    speed_shift_over_eps: float
    residual_sup: float
    oracle_normal_residual: float
    min_eps_kappa: float
    newton_iters: int
    tail_ratio: float


def report_row(sol: SheetSolution, rep: oracle.EquilibriumReport) -> ReportRow:
    shift = abs(sol.speed.total - sol.speed.base) / abs(sol.epsilon) if sol.epsilon else 0.0
    return ReportRow(sol.epsilon, sol.speed.total, shift, sol.residual_sup,
                     rep.normal_residual_sup, rep.curvature_min, sol.newton_iters,
                     spectral_diagnostics(sol)[0])


def emit_report(rows, path, mode: str = CO_ROTATING, extra: dict | None = None) -> tuple:
    """Text table plus a JSON sidecar with the same rows, sorted by eps."""
    path = Path(path)
    rows = sorted(rows, key=lambda r: r.epsilon)
    speed_name = "Omega" if mode == CO_ROTATING else "W"
    head = ["eps", speed_name, f"|{speed_name}-base|/eps", "residual_sup",
            "oracle_normal", "min_eps_kappa", "newton_iters", "tail_ratio"]
    lines = ["  ".join(f"{h:>22}" for h in head)]
    for r in rows:
        vals = [f"{r.epsilon:.6g}", f"{r.speed:.15g}", f"{r.speed_shift_over_eps:.6e}",
                f"{r.residual_sup:.3e}", f"{r.oracle_normal_residual:.3e}",
                f"{r.min_eps_kappa:.12f}", str(r.newton_iters), f"{r.tail_ratio:.3e}"]
        lines.append("  ".join(f"{v:>22}" for v in vals))
    path.write_text("\n".join(lines) + "\n")
    side = path.with_suffix(".json")
    payload = {"mode": mode, "columns": list(REPORT_COLUMNS), "rows": [asdict(r) for r in rows]}
    if extra:
        payload.update(extra)
    side.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path, side


def emit_svg(solutions, path, size: int = 600) -> Path:
    """Static picture: one polyline per sheet, vortex centers as dots."""
    path = Path(path)
    sheets, centers = [], []
    for sol in solutions:
        for z, gam in sheet_copies(sol):
            sheets.append((np.append(z, z[0]), float(np.sign(gam[0]))))
        centers = vortex_centers(sol.config)
    pts = np.concatenate([s for s, _ in sheets] + [np.array(centers)]) if sheets else np.zeros(1, complex)
    lo_x, hi_x = pts.real.min(), pts.real.max()
    lo_y, hi_y = pts.imag.min(), pts.imag.max()
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-12)
    pad = 0.1 * span
    scale = size / (span + 2 * pad)

    def px(z):
        return (z.real - lo_x + pad) * scale, (hi_y + pad - z.imag) * scale

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">', f'<rect width="{size}" height="{size}" fill="white"/>']
    for z, sign in sheets:
        xs, ys = px(z)
        color = "#1f4e9c" if sign > 0 else "#b3261e"
        coords = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(xs, ys))
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1"/>')
    for c in centers:
        cx, cy = px(np.array([c]))
        out.append(f'<circle cx="{cx[0]:.3f}" cy="{cy[0]:.3f}" r="2" fill="black"/>')
    out.append("</svg>")
    path.write_text("\n".join(out) + "\n")
    return path
