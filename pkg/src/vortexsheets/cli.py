"""Command line driver: ``vortexsheets solve|continue|validate``.

Exit codes: 0 success, 2 invalid configuration, 3 a solve failed (partial
outputs are kept), 4 an accepted solution failed the Birkhoff-Rott oracle.
Set VORTEXSHEETS_LOG=DEBUG (or INFO, WARNING, ...) for progress logging.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import oracle, records
from .functionals import ConfigError, closed_residual
from .solver import ContinuationRun, continue_family

EXIT_OK, EXIT_CONFIG, EXIT_SOLVE, EXIT_ORACLE = 0, 2, 3, 4

log = logging.getLogger("vortexsheets")


def _tag(eps: float) -> str:
    return f"eps{eps:.6g}".replace("-", "m")


def oracle_ok(rep: oracle.EquilibriumReport, cfg: records.RunConfig) -> bool:
    return rep.normal_residual_sup <= cfg.normal_tol and rep.tangential_constancy <= cfg.tangential_tol


def write_outputs(run: ContinuationRun, cfg: records.RunConfig, out: Path) -> bool:
    """Validate every accepted solution and write the requested files; True if all pass the oracle."""
    out.mkdir(parents=True, exist_ok=True)
    rows, all_ok = [], True
    for sol in run.solutions:
        rep = oracle.equilibrium_residual(sol, cfg.oracle_Q)
        ok = oracle_ok(rep, cfg)
        if not ok:
            log.error("oracle rejects eps=%g: normal %.3e, tangential %.3e",
                      sol.epsilon, rep.normal_residual_sup, rep.tangential_constancy)
        all_ok &= ok
        tag = _tag(sol.epsilon)
        records.write_record(records.solution_record(sol, rep), out / f"solution_{tag}.json")
        if "coeffs" in cfg.emit:
            records.emit_coeffs(sol, out / f"coeffs_{tag}.csv")
        if "curves" in cfg.emit:
            records.emit_curve(sol, out / f"curve_{tag}.csv")
        rows.append(records.report_row(sol, rep))
    summary = {
        "config": cfg.as_dict(),
        "accepted": [s.epsilon for s in run.solutions],
        "empirical_eps0": run.empirical_eps0,
        "failure": run.failure,
    }
    if "report" in cfg.emit:
        records.emit_report(rows, out / "report.txt", cfg.sheet.mode, extra=summary)
    if "svg" in cfg.emit and run.solutions:
        records.emit_svg(run.solutions[-1:], out / "family.svg")
    return all_ok


def _run(cfg: records.RunConfig, out: Path, targets) -> int:
    run = continue_family(cfg.sheet, targets)
    ok = write_outputs(run, cfg, out)
    if not run.complete:
        log.error("%s (empirical eps0 = %s)", run.failure, run.empirical_eps0)
        print(f"solve failed: {run.failure}", file=sys.stderr)
        return EXIT_SOLVE
    return EXIT_OK if ok else EXIT_ORACLE


def cmd_validate(args) -> int:
    try:
        sol = records.load_record(args.record)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"invalid record: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cfg = records.RunConfig(sol.config, (sol.epsilon,))
    if args.config:
        base = records.load_config(args.config)
        cfg = replace(base, sheet=sol.config, epsilons=(sol.epsilon,))
    rep = oracle.equilibrium_residual(sol, cfg.oracle_Q)
    res = closed_residual(sol.config, sol.state)
    print(f"epsilon            {sol.epsilon:.17g}")
    print(f"speed              {res.speed.total:.17g}")
    print(f"residual_sup       {res.sup():.6e}")
    print(f"oracle normal      {rep.normal_residual_sup:.6e}")
    print(f"oracle tangential  {rep.tangential_constancy:.6e}")
    print(f"min eps*kappa      {rep.curvature_min:.12f}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        records.write_record(records.solution_record(sol, rep), out / f"validated_{_tag(sol.epsilon)}.json")
    return EXIT_OK if oracle_ok(rep, cfg) else EXIT_ORACLE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vortexsheets", description="Vortex sheet relative equilibria")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (("solve", "solve at the first eps of the config"),
                           ("continue", "continue through every eps of the config")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--config", required=True)
        s.add_argument("--out")
        s.add_argument("--emit", help="comma list from coeffs,curves,report,svg")
    v = sub.add_parser("validate", help="re-check a saved solution record")
    v.add_argument("record")
    v.add_argument("--config")
    v.add_argument("--out")
    return p


def main(argv=None) -> int:
    level = os.environ.get("VORTEXSHEETS_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args)
        cfg = records.load_config(args.config)
        if args.emit is not None:
            cfg = replace(cfg, emit=records.parse_emit(args.emit))
        out = Path(args.out) if args.out else cfg.output_dir
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    targets = cfg.epsilons[:1] if args.command == "solve" else cfg.epsilons
    return _run(cfg, out, targets)


if __name__ == "__main__":
    sys.exit(main())
