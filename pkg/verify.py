"""
Verify the rational, trigonometric and elliptic presentations.

Usage:
    python verify.py check --suite theta                  # Theta identities
    python verify.py check --suite elliptic-rep --rank 2  # Relations in the universal representation
    python verify.py expand "theta(z*q1) / theta(z)"      # Descriptor and automorphy factor
    python verify.py table gamma-rational --max-order 6   # Coefficient tables
    python verify.py corpus                               # Dump the stated relations

Exit status: 0 when every check passes, 1 when any check fails, 2 on
configuration, parse or usage errors.
"""

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

from config import Settings, load_config, load_params
from corpus import RelationCorpus
from engine.contour import expand_on_torus
from engine.errors import ConfigError, EngineError, ExpressionSyntaxError, ExpressionTypeError
from engine.kernels import REGION_PLUS, RationalFunction, gamma_coefficients
from engine.ring import LaurentPoly
from engine.series import BiLaurentSeries
from engine.theta import NOME, ThetaRatio, theta_coefficients
from engine.universal import ParamSpec
from expression import Evaluator, parse
from models import SUITES, ReportDocument, SuiteConfig
from suites import SuiteRunner

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2

TABLES = ("gamma-rational", "gamma-trig", "theta-coeffs", "relation-corpus")


class ReportStorage:
    """Reports and tables written under the configured directories"""

    def __init__(self, output_dir: str = "reports", tables_dir: str = "tables"):
        self.output_dir = Path(output_dir)
        self.tables_dir = Path(tables_dir)

    def get_report_path(self, suite: str) -> Path:
        return self.output_dir / f"{suite}.json"

    def save_report(self, document: ReportDocument, path: Optional[Path] = None) -> bool:
        try:
            path = path or self.get_report_path(document.config.get("suite", "report"))
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w") as f:
                f.write(render_report(document))
            return True
        except Exception as e:
            print(f"Error saving report: {e}", file=sys.stderr)
            return False

    def load_report(self, suite: str) -> Dict | None:
        try:
            path = self.get_report_path(suite)
            if not path.exists():
                return None
            with open(path, "r") as f:
                return json.load(f)
        except Exception as e:
            print(f"Error loading report for {suite}: {e}", file=sys.stderr)
            return None

    def save_table(self, name: str, rows: List[Dict[str, str]], fmt: str, path: Optional[Path] = None) -> bool:
        try:
            path = path or self.tables_dir / f"{name}.{fmt}"
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", newline="") as f:
                f.write(render_table(rows, fmt))
            return True
        except Exception as e:
            print(f"Error saving table {name}: {e}", file=sys.stderr)
            return False


def render_report(document: ReportDocument) -> str:
    return json.dumps(document.model_dump(), indent=2, sort_keys=True) + "\n"


def render_table(rows: List[Dict[str, str]], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if not rows:
        return ""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


# =============================================================================
# Commands
# =============================================================================


def _values(settings: Settings, params_file: Optional[str], seed: int = 1) -> Dict[str, Fraction]:
    if params_file:
        return load_params(params_file)
    return ParamSpec.sample(seed, settings.rank).values()


def cmd_check(args, settings: Settings) -> int:
    params = None
    if args.params:
        params = {k: str(v) for k, v in load_params(args.params).items()}
    try:
        config = SuiteConfig(
            suite=args.suite,
            np=args.np if args.np is not None else settings.np_order,
            window=args.window if args.window is not None else settings.window,
            rank=args.rank if args.rank is not None else settings.rank,
            seeds=args.seed or settings.seeds,
            params=params,
            workers=args.workers if args.workers is not None else settings.workers,
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e

    document = SuiteRunner(settings).run(config, quiet=args.quiet)
    if args.deterministic:
        document.wall_millis = 0
        document.timing = {key: 0 for key in document.timing}
        for report in document.reports:
            report.millis = 0

    storage = ReportStorage(settings.output_dir, settings.tables_dir)
    path = Path(args.output) if args.output else None
    saved = storage.save_report(document, path)
    if args.quiet:
        sys.stdout.write(render_report(document))
    elif saved:
        print(f"  → Report: {path or storage.get_report_path(config.suite)}")
    return EXIT_FAIL if document.failed else EXIT_PASS


def cmd_expand(args, settings: Settings) -> int:
    tree = parse(args.expr)
    values = _values(settings, args.params) if (args.series or args.params) else {}
    np = args.np if args.np is not None else settings.np_order
    window = args.window if args.window is not None else settings.window
    value = Evaluator(values, np, window).evaluate(tree)

    if isinstance(value, ThetaRatio) and not args.series:
        print(f"descriptor: {value}")
        for var in ("z", "w"):
            if value.depends_on(var):
                print(f"automorphy in {var}: {value.automorphy(var)}")
        return EXIT_PASS
    if not args.series and not isinstance(value, BiLaurentSeries):
        print(value)
        return EXIT_PASS

    if isinstance(value, ThetaRatio):
        numeric = {s: v for s, v in values.items() if s != NOME}
        value = expand_on_torus(value.specialize(numeric), np, window, values[NOME])
    elif isinstance(value, (LaurentPoly, RationalFunction)):
        value = RationalFunction.of(value).expand(REGION_PLUS, window)
    rows = [
        {"z_exp": str(z), "w_exp": str(w), "p_ord": str(k), "coefficient": str(c)}
        for (z, w, k), c in sorted(value.terms.items())
    ]
    sys.stdout.write(render_table(rows, "csv"))
    return EXIT_PASS


def table_rows(what: str, max_order: int, settings: Settings, argument: str = "z") -> List[Dict[str, str]]:
    if what == "gamma-rational":
        return gamma_coefficients("rational", max_order).rows()
    if what == "gamma-trig":
        return gamma_coefficients("trig", max_order).rows()
    if what == "theta-coeffs":
        arg = Evaluator().evaluate(parse(argument))
        if not (isinstance(arg, LaurentPoly) and arg.is_term()):
            raise ExpressionTypeError(f"theta argument {argument} must be a monomial")
        return [
            {"argument": argument, "p_ord": str(k), "coefficient": str(c)}
            for k, c in sorted(theta_coefficients(arg, max_order).items())
        ]
    return RelationCorpus(settings.relations_dir).rows()


def cmd_table(args, settings: Settings) -> int:
    rows = table_rows(args.what, args.max_order, settings, args.argument)
    storage = ReportStorage(settings.output_dir, settings.tables_dir)
    path = Path(args.output) if args.output else None
    if not storage.save_table(args.what, rows, args.format, path):
        return EXIT_ERROR
    if not args.quiet:
        print(f"  → Table: {path or storage.tables_dir / f'{args.what}.{args.format}'} ({len(rows)} rows)")
    return EXIT_PASS


def cmd_corpus(args, settings: Settings) -> int:
    corpus = RelationCorpus(settings.relations_dir).load()
    for (level, relation), entry in sorted(corpus.entries.items()):
        print(f"[{level}/{relation}] ({entry.labels})")
        print(f"  {entry.statement}")
    return EXIT_PASS


# =============================================================================
# Main
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Verify quantum toroidal presentations and their elliptic representation",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python verify.py check --suite theta --np 12 --window 24
  python verify.py check --suite elliptic-rep --rank 2 --seed 1 --seed 2 --seed 3
  python verify.py check --suite pushforward --params params.txt
  python verify.py expand "zeta(trig)(w/z)"
  python verify.py expand "onep(1/theta(u1/z); z)" --series --np 4
  python verify.py table theta-coeffs --max-order 2 --argument "z*q1" --format json
  python verify.py corpus
        """,
    )
    parser.add_argument("--config", default="config.yaml", help="YAML configuration file")
    parser.add_argument("--quiet", action="store_true", help="No progress output")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="Run a verification suite")
    check.add_argument("--suite", required=True, choices=SUITES)
    check.add_argument("--np", type=int, help="p-order of elliptic expansions")
    check.add_argument("--window", type=int, help="z, w exponent window")
    check.add_argument("--rank", type=int, help="Rank of the universal class (1-4)")
    check.add_argument("--seed", type=int, action="append", help="Parameter seed (repeatable)")
    check.add_argument("--params", help="key=value file with explicit parameters")
    check.add_argument("--workers", type=int, help="Worker processes")
    check.add_argument("--output", help="Report path (default: <output_dir>/<suite>.json)")
    check.add_argument("--deterministic", action="store_true", help="Zero all timing fields")

    expand = sub.add_parser("expand", help="Parse and evaluate an expression")
    expand.add_argument("expr")
    expand.add_argument("--np", type=int)
    expand.add_argument("--window", type=int)
    expand.add_argument("--params", help="key=value file with explicit parameters")
    expand.add_argument("--series", action="store_true", help="Print the coefficient table")

    table = sub.add_parser("table", help="Write a coefficient table")
    table.add_argument("what", choices=TABLES)
    table.add_argument("--max-order", type=int, default=6)
    table.add_argument("--format", choices=("csv", "json"), default="csv")
    table.add_argument("--argument", default="z", help="theta argument for theta-coeffs")
    table.add_argument("--output", help="Table path (default: <tables_dir>/<what>.<format>)")

    sub.add_parser("corpus", help="Print the stated explicit relations")
    return parser


COMMANDS = {"check": cmd_check, "expand": cmd_expand, "table": cmd_table, "corpus": cmd_corpus}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_config(args.config)
        return COMMANDS[args.command](args, settings)
    except ExpressionSyntaxError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_ERROR
    except (ConfigError, ExpressionTypeError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_ERROR
    except EngineError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
