"""
Kommandozeile: gadgetforge <recipe> [optionen]

Exit-Codes:
    0  Erfolg
    1  Validierungsfehler (Argumente, Target-JSON, Schema)
    2  numerisches Versagen (Overflow, Suche, singuläre Resolvente)

Ergebnisse von `bound` gehen nach stdout, Logs nach stderr.
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from . import config
from .errors import GadgetForgeError, InputError
from .logging_config import setup_logging
from .models import ExperimentConfig, SweepSpec
from .recipes import ALIASES, GADGETS, RECIPES, compute_bound, run_recipe

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """argparse beendet sonst mit Code 2; Argumentfehler sind hier Exit 1."""

    def error(self, message: str):
        raise InputError(message)


def _sweep(text: str) -> SweepSpec:
    try:
        return SweepSpec.parse(text)
    except (ValueError, ValidationError) as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _common_options() -> argparse.ArgumentParser:
    parent = _Parser(add_help=False)
    parent.add_argument("--target", help="Target-JSON mit interactions-Abschnitt")
    parent.add_argument("--gadget", choices=GADGETS)
    parent.add_argument("--alpha", type=float, action="append", default=[], help="Kopplung; mehrfach für par-sub/par-3to2")
    parent.add_argument("--eps", type=float)
    parent.add_argument("--delta", type=float)
    parent.add_argument("--helse-norm", type=float, default=0.0)
    parent.add_argument("--sweep", type=_sweep, action="append", default=[], metavar="PARAM:LO:HI:N[:log]")
    parent.add_argument("--order", type=int)
    parent.add_argument("--zgrid", type=int, default=config.Z_GRID_POINTS, help="Punkte im z-Grid")
    parent.add_argument("--no-v3", action="store_true")
    parent.add_argument("--no-4local", action="store_true")
    parent.add_argument("--ot06", action="store_true", help="bound: OT06-Schranke")
    parent.add_argument("--delta-mode", choices=("analytical", "optimized", "both"))
    parent.add_argument("--out")
    parent.add_argument("--tol-rel", type=float, default=config.SEARCH_TOL_REL)
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gadgetforge", description="Perturbative Gadgets: Konstruktion, Schranken, Spektren")
    sub = parser.add_subparsers(dest="command", metavar="recipe", parser_class=_Parser)
    sub.required = True
    parent = _common_options()
    sub.add_parser("bound", parents=[parent], help="geschlossene Δ-Schranke ausgeben")
    for name in list(RECIPES) + list(ALIASES):
        sub.add_parser(name, parents=[parent], help=(RECIPES[ALIASES.get(name, name)].__doc__ or "").strip().split("\n")[0])
    return parser


def _to_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.no_4local and args.gadget not in (None, "par-3to2"):
        raise InputError("--no-4local gilt nur für par-3to2")
    if args.ot06 and args.command != "bound":
        raise InputError("--ot06 gilt nur für bound")
    try:
        return ExperimentConfig(
            recipe=ALIASES.get(args.command, args.command),
            target_path=args.target,
            gadget=args.gadget,
            alphas=args.alpha,
            epsilon=args.eps,
            delta=args.delta,
            h_else_norm=args.helse_norm,
            sweeps=args.sweep,
            order=args.order,
            z_points=args.zgrid,
            include_v3=not args.no_v3,
            include_4local=not args.no_4local,
            ot06=args.ot06,
            delta_mode=args.delta_mode,
            out=args.out,
            tol_rel=args.tol_rel,
        )
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise InputError(f"{where}: {first['msg']}") from None


def cli_run(argv: Optional[Sequence[str]] = None) -> int:
    """Parst argv, führt aus und liefert den Exit-Code."""
    setup_logging()
    try:
        args = build_parser().parse_args(argv)
        cfg = _to_config(args)
        if args.command == "bound":
            print(config.CSV_FLOAT_FORMAT % compute_bound(cfg))
            return 0
        result = run_recipe(args.command, cfg)
    except GadgetForgeError as e:
        print(f"gadgetforge: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    for name, fit in result.fits.items():
        if "slope" in fit:
            print(f"slope[{name}] = {fit['slope']:.6g} (R²={fit['r_squared']:.4f}, {fit['points']} Punkte)")
    return 0


def main():
    sys.exit(cli_run())
