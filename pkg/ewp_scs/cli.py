# ============================================================================
# EWP-SCS - CLI INTERFACE
# ============================================================================
"""
Command-line interface for EWP-SCS.

Commands:
    ewp-scs scs        Screen a return panel, write scs.json and records.csv
    ewp-scs metrics    Post-selection metrics from an scs.json
    ewp-scs simulate   Monte Carlo study on synthetic panels
    ewp-scs theory     Asymptotic expected SCS size of a synthetic population
    ewp-scs check      Is one candidate selection in the SCS?
    ewp-scs config     Show configuration (get | set | reset | init)
    ewp-scs version    Show version

Exit codes: 0 success, 2 input error, 3 numerical degeneracy,
4 internal invariant violation.
"""

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .artifacts import (
    load_scs,
    theory_row,
    write_cii_csv,
    write_cii_edges,
    write_ii_profile_csv,
    write_inclusion_csv,
    write_mc_outputs,
    write_metrics_csv,
    write_records_csv,
    write_scs_json,
    write_theory_csv,
)
from .config import USER_SETTINGS_FILE, config_get, config_reset, config_set, get_config, init_config
from .errors import InputError, ScsError
from .losses import parse_loss_spec
from .manifest import RunManifest
from .metrics import cii_graph_export, compute_metrics, ii_profile_from_result
from .panel import ReturnPanel, load_csv, log_returns, validate
from .screening import ScreenConfig, build_scs, find_reference, plausibility_check
from .selection import MaxAssetsFilter, SelectionMask
from .simulate import (
    GeneratorSpec,
    MeanRule,
    Model1,
    McEstimates,
    Model2,
    build_population,
    run_mc,
    theoretical_expected_size,
)

logger = logging.getLogger(__name__)

SCALE_FACTORS = {"fraction": 1.0, "percent": 100.0}
DEFAULT_PROFILE_GRID = [round(0.01 * k, 2) for k in range(1, 11)]


class Colors:
    """ANSI escapes used by the print helpers."""
    BLUE = '\033[94m'
    CYAN = '\033[96m'
    GREEN = '\033[92m'
    YELLOW = '\033[93m'
    RED = '\033[91m'
    BOLD = '\033[1m'
    DIM = '\033[2m'
    RESET = '\033[0m'

    @classmethod
    def disable(cls):
        """Blank every code, for NO_COLOR and --no-color."""
        for name in ("BLUE", "CYAN", "GREEN", "YELLOW", "RED", "BOLD", "DIM", "RESET"):
            setattr(cls, name, '')


def print_header(text: str) -> None:
    """Print a bold section title with an underline."""
    print(f"\n{Colors.BOLD}{Colors.CYAN}{text}{Colors.RESET}")
    print(f"{Colors.DIM}{'─' * len(text)}{Colors.RESET}")


def print_success(text: str) -> None:
    """Print a green check line."""
    print(f"{Colors.GREEN}✓{Colors.RESET} {text}")


def print_error(text: str) -> None:
    """Print a red cross line to stderr."""
    print(f"{Colors.RED}✗{Colors.RESET} {text}", file=sys.stderr)


def print_warning(text: str) -> None:
    """Print a yellow warning line to stderr."""
    print(f"{Colors.YELLOW}!{Colors.RESET} {text}", file=sys.stderr)


def print_info(text: str) -> None:
    """Print an informational line."""
    print(f"{Colors.BLUE}ℹ{Colors.RESET} {text}")


def print_key_value(key: str, value: str, indent: int = 0) -> None:
    """Print one indented key: value pair."""
    prefix = "  " * indent
    print(f"{prefix}{Colors.CYAN}{key}{Colors.RESET}: {value}")


# ----------------------------------------------------------------------------
# Argument helpers
# ----------------------------------------------------------------------------

def parse_float_list(text: str) -> List[float]:
    """argparse type for '0.1,0.05'."""
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of numbers, got {text!r}") from None


def parse_int_list(text: str) -> List[int]:
    """argparse type for '100,250,1000'."""
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of integers, got {text!r}") from None


def split_loss_list(text: str) -> List[str]:
    """
    Split 'sharpe,mv:gamma=1,scale=0.5,es' into loss specs.

    A 'key=value' token without a ':' continues the previous spec.
    """
    specs: List[str] = []
    for token in (t.strip() for t in text.split(",")):
        if not token:
            continue
        if "=" in token and ":" not in token and specs:
            specs[-1] = f"{specs[-1]},{token}"
        else:
            specs.append(token)
    return specs


def resolve_threads(args: argparse.Namespace) -> int:
    """Worker count from --threads or execution.threads; 0 means one per CPU."""
    threads = args.threads if args.threads is not None else get_config().get("execution.threads", 0)
    return int(threads)


def resolve_out(args: argparse.Namespace, default: Optional[Path] = None) -> Path:
    """Output directory from --out, the command default or execution.out_dir."""
    if args.out:
        return Path(args.out)
    return default if default is not None else Path(get_config().get("execution.out_dir"))


def _parameters(args: argparse.Namespace) -> Dict[str, Any]:
    """Parsed flags as manifest parameters."""
    return {k: v for k, v in vars(args).items() if k != "func" and not callable(v)}


def load_panel(args: argparse.Namespace) -> ReturnPanel:
    """Read --input per the panel flags and report diagnostics."""
    config = get_config()
    panel = load_csv(
        args.input,
        delimiter=args.delimiter or config.get("panel.delimiter"),
        header=not args.no_header and bool(config.get("panel.header", True)),
        date_column=args.date_column or config.get("panel.date_column"),
        n_max=config.get("panel.n_max"),
    )
    if args.log_prices:
        panel = log_returns(panel.returns, panel.asset_labels, panel.period_labels, n_max=panel.n_max)
    for problem in validate(panel):
        print_warning(problem)
    return panel.scaled(SCALE_FACTORS[args.scale]) if args.scale != "fraction" else panel


def screen_config(args: argparse.Namespace, alpha: Optional[float] = None) -> ScreenConfig:
    """ScreenConfig from flags, falling back to the screening settings."""
    config = get_config()
    mask_filter = MaxAssetsFilter(args.filter_max_assets) if args.filter_max_assets else None
    return ScreenConfig(
        alpha=alpha if alpha is not None else (args.alpha or config.get("screening.alpha")),
        cov_mode=args.cov_mode or config.get("screening.cov_mode"),
        mask_filter=mask_filter,
        tau2_floor=config.get("screening.tau2_floor"),
        delta_floor=config.get("screening.delta_floor"),
        worker_count=resolve_threads(args),
        block_size=config.get("screening.block_size"),
        record_cap=config.get("screening.record_cap"),
    )


def generator_spec(args: argparse.Namespace, n: int) -> GeneratorSpec:
    """GeneratorSpec for an N-asset population from the model flags."""
    config = get_config()
    model = Model1(args.v) if args.model == "model1" else Model2(args.rho)
    noise_is_variance = not args.noise_sd and config.get("simulate.noise_is_variance")
    return GeneratorSpec(
        model=model,
        n=n,
        mean_rule=MeanRule(noise_is_variance=bool(noise_is_variance)),
        seed=args.seed if args.seed is not None else config.get("simulate.seed"),
        fix_graph=args.fix_graph or bool(config.get("simulate.fix_graph")),
        fix_population=args.fix_population,
    )


def parse_candidate(text: str, panel: ReturnPanel) -> SelectionMask:
    """Hex literal '0x5/3' or comma list of asset labels."""
    text = text.strip()
    if text.lower().startswith("0x"):
        mask = SelectionMask.from_hex(text)
        if mask.n_assets != panel.N:
            raise InputError(f"Candidate {text} is over N={mask.n_assets}, panel has N={panel.N}")
        return mask
    labels = [label.strip() for label in text.split(",") if label.strip()]
    return SelectionMask.from_labels(labels, panel.asset_labels)


# ----------------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------------

def cmd_scs(args: argparse.Namespace) -> int:
    """Screen every selection of a panel."""
    manifest = RunManifest(command="scs", parameters=_parameters(args))
    panel = load_panel(args)
    manifest.add_input(args.input)
    spec = parse_loss_spec(args.loss)
    config = screen_config(args)
    out = resolve_out(args)
    manifest.claim(out)

    result = build_scs(panel, spec, config)
    manifest.outputs = [
        str(write_scs_json(result, out, scale=args.scale)),
        str(write_records_csv(result, out)),
    ]
    manifest.write(out)

    summary = {
        "reference": result.reference.labels(panel.asset_labels),
        "reference_loss": result.reference_loss,
        "scs_size": result.included_count,
        "universe_size": result.universe_size,
        "alpha": result.alpha,
        "q": result.q,
        "out": str(out),
    }
    if args.json:
        print(json.dumps(summary, indent=2))
        return 0
    print_header(f"SCS  {spec}  alpha={result.alpha:g}  ({result.cov_mode})")
    print_key_value("empirical optimum", ", ".join(summary["reference"]))
    print_key_value("L0", f"{result.reference_loss:.6g}")
    print_key_value("|SCS|", f"{result.included_count} of {result.universe_size}")
    print_success(f"Wrote {out}")
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    """Post-selection metrics from scs.json."""
    manifest = RunManifest(command="metrics", parameters=_parameters(args))
    scs_path = Path(args.scs)
    if scs_path.is_dir():
        scs_path = scs_path / "scs.json"
    base = load_scs(scs_path)
    manifest.add_input(scs_path)
    out = resolve_out(args, default=scs_path.parent / "metrics")
    manifest.claim(out)

    alphas = args.alphas or [base.alpha]
    results = [base.at_alpha(a) for a in alphas]
    metrics = [compute_metrics(r) for r in results]
    labels = list(base.asset_labels)

    primary = metrics[0]
    edges = cii_graph_export(results[0], args.cii_threshold, cii=primary.co_inclusion)
    grid = args.profile_alphas or DEFAULT_PROFILE_GRID
    if base.records_truncated:
        floor = base.screened_alpha or base.alpha
        grid = [a for a in grid if a >= floor] or [floor]
    profile = ii_profile_from_result(base, grid)

    written = [
        write_metrics_csv(metrics, out),
        write_inclusion_csv(metrics, labels, out),
        write_cii_csv(primary.co_inclusion, labels, out),
        *write_cii_edges(edges, labels, out),
        write_ii_profile_csv(profile, out),
    ]
    manifest.outputs = [str(p) for p in written]
    manifest.write(out)

    if args.json:
        print(json.dumps([
            {"alpha": m.alpha, "scs_size": m.scs_size, "lb_size": len(m.lower_boundary),
             "rmi": m.rmi, "loss_min": m.loss_min, "loss_max": m.loss_max, "spread": m.spread}
            for m in metrics
        ], indent=2))
        return 0
    print_header(f"Post-selection metrics  {base.loss_spec}")
    for m in metrics:
        print(
            f"  {100 * (1 - m.alpha):5.1f}%  |SCS|={m.scs_size:<7d} |LB|={len(m.lower_boundary):<4d} "
            f"RMI={100 * m.rmi:6.2f}%  L0={m.loss_min:.4g}  Lmax={m.loss_max:.4g}  spread={m.spread:.4g}"
        )
    print_success(f"Wrote {out}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    """Monte Carlo study."""
    config = get_config()
    specs = [parse_loss_spec(s) for s in split_loss_list(args.losses)]
    runs = args.runs or config.get("simulate.runs")
    threads = resolve_threads(args) or os.cpu_count() or 1
    out = resolve_out(args)
    cov_mode = args.cov_mode or config.get("screening.cov_mode")
    manifest = RunManifest(
        command="simulate",
        parameters=_parameters(args),
        seeds={"master": generator_spec(args, args.n[0]).seed},
    )
    manifest.claim(out)

    estimates = None
    for n in args.n:
        genspec = generator_spec(args, n)
        part = run_mc(genspec, specs, args.alphas, args.T, runs, threads=threads, cov_mode=cov_mode)
        estimates = part if estimates is None else McEstimates(
            cells=estimates.cells + part.cells, records=estimates.records + part.records
        )

    manifest.outputs = [str(p) for p in write_mc_outputs(estimates, out)]
    manifest.write(out)

    if args.json:
        print(json.dumps([asdict(c) for c in estimates.cells], indent=2, default=str))
        return 0
    print_header(f"Monte Carlo  {args.model}  N={args.n}  runs={runs}")
    for c in estimates.cells:
        print(
            f"  N={c.n:<3d} {c.loss:<22s} T={c.T:<6d} {100 * (1 - c.alpha):5.1f}%  "
            f"kappa={c.kappa:8.2f} ({c.kappa_se:.2f})  p={100 * c.coverage:5.1f}%  "
            f"kappa_lb={c.kappa_lower:6.2f}"
        )
    print_success(f"Wrote {out}")
    return 0


def cmd_theory(args: argparse.Namespace) -> int:
    """Asymptotic expected SCS size of one population realization per N."""
    spec = parse_loss_spec(args.loss)
    out = resolve_out(args)
    seed = generator_spec(args, args.n[0]).seed
    manifest = RunManifest(
        command="theory",
        parameters=_parameters(args),
        seeds={"master": seed, "run": args.run},
    )
    manifest.claim(out)

    rows = []
    for n in args.n:
        population = build_population(generator_spec(args, n), args.run)
        for alpha in args.alphas:
            for T in args.T:
                result = theoretical_expected_size(population, spec, alpha, T)
                rows.append(theory_row(result, n=n, loss=spec.to_string(), alpha=alpha, T=T))

    manifest.outputs = [str(write_theory_csv(rows, out))]
    manifest.write(out)

    if args.json:
        print(json.dumps(rows, indent=2, default=str))
        return 0
    print_header(f"Expected SCS size  {spec}  N={','.join(str(n) for n in args.n)}")
    for row in rows:
        print(
            f"  N={row['n']:<3d} alpha={row['alpha']:<5g} T={row['T']:<6d} expected={row['expected']:.3f}  "
            f"bounds=[{row['lower_bound']:.3f}, {row['upper_bound']:.3f}]  "
            f"gamma_min={row['gamma_min']:.4g}  |S0|={row['optimal_count']}"
        )
    print_success(f"Wrote {out}")
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    """Plausibility check for one candidate."""
    panel = load_panel(args)
    spec = parse_loss_spec(args.loss)
    config = screen_config(args)
    candidate = parse_candidate(args.candidate, panel)
    reference = find_reference(panel, spec, config.mask_filter, config.worker_count, config.block_size)
    verdict = plausibility_check(panel, spec, config, candidate, reference=reference)

    if args.json:
        print(json.dumps({
            "candidate": candidate.labels(panel.asset_labels),
            "reference": reference.mask.labels(panel.asset_labels),
            **{k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in verdict.items()},
        }, indent=2))
        return 0
    print_header(f"Plausibility check  {spec}  alpha={config.alpha:g}")
    print_key_value("candidate", ", ".join(candidate.labels(panel.asset_labels)))
    print_key_value("empirical optimum", ", ".join(reference.mask.labels(panel.asset_labels)))
    print_key_value("loss", f"{verdict['loss']:.6g}  (L0 = {verdict['reference_loss']:.6g})")
    print_key_value("z", f"{verdict['z']:.4f}  (q = {verdict['q']:.4f})")
    if verdict["included"]:
        print_success("INCLUDED: indistinguishable from the empirical optimum")
    else:
        print_error("EXCLUDED: significantly worse than the empirical optimum")
    return 0


def cmd_config_show(args: argparse.Namespace) -> int:
    """Print every section, or the whole tree as JSON with --json."""
    settings = get_config().to_dict()
    if args.json:
        print(json.dumps(settings, indent=2))
        return 0

    print_header("EWP-SCS Configuration")
    print_info(f"User config: {USER_SETTINGS_FILE}")
    print()
    for section, values in settings.items():
        print(f"{Colors.BOLD}{section}:{Colors.RESET}")
        for key, value in values.items():
            print_key_value(key, str(value), indent=1)
        print()
    return 0


def cmd_config_get(args: argparse.Namespace) -> int:
    """Print one setting; exit 2 if it does not exist."""
    value = config_get(args.key)
    if value is None:
        print_error(f"Key not found: {args.key}")
        return 2
    print(json.dumps(value) if isinstance(value, (dict, list, bool)) else value)
    return 0


def cmd_config_set(args: argparse.Namespace) -> int:
    """Store one setting in the user settings file."""
    config_set(args.key, args.value)
    print_success(f"Set {args.key} = {config_get(args.key)}")
    return 0


def cmd_config_reset(args: argparse.Namespace) -> int:
    """Restore and persist the built-in defaults."""
    config_reset()
    print_success("Configuration reset to defaults")
    return 0


def cmd_config_init(args: argparse.Namespace) -> int:
    """Write the user settings file unless it exists."""
    if init_config():
        print_success(f"Configuration initialized at {USER_SETTINGS_FILE}")
    else:
        print_info(f"Configuration already exists at {USER_SETTINGS_FILE}")
    return 0


def cmd_version(args: argparse.Namespace) -> int:
    """Print the package version."""
    print(f"EWP-SCS v{__version__}")
    return 0


# ----------------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------------

def _add_panel_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="Return panel CSV (T rows x N columns)")
    parser.add_argument("--delimiter", default=None, help="Field separator (default from config)")
    parser.add_argument("--no-header", action="store_true", help="First row is data, not labels")
    parser.add_argument("--date-column", action="store_true", help="First column holds period labels")
    parser.add_argument("--log-prices", action="store_true", help="Input holds prices; use log-returns")
    parser.add_argument("--scale", choices=sorted(SCALE_FACTORS), default="fraction",
                        help="Units losses are evaluated in; percent multiplies returns by 100")


def _add_screen_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--loss", default="mv:gamma=0.5", help="Loss spec, e.g. mv:gamma=0.5, sharpe, es:level=0.1")
    parser.add_argument("--alpha", type=float, default=None, help="Significance level (default from config)")
    parser.add_argument("--cov-mode", choices=["iid", "gaussian"], default=None, help="Moment covariance")
    parser.add_argument("--filter-max-assets", type=int, default=None, help="Keep selections of at most k assets")


def _add_model_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", choices=["model1", "model2"], default="model2", help="Correlation model")
    parser.add_argument("--v", type=float, default=1.0, help="Model 1 edge weight")
    parser.add_argument("--rho", type=float, default=0.75, help="Model 2 correlation")
    parser.add_argument("--n", type=parse_int_list, default=[10], help="Number of assets (comma list)")
    parser.add_argument("--T", type=parse_int_list, default=[100, 250, 1000], help="Sample lengths")
    parser.add_argument("--alphas", "--alpha", dest="alphas", type=parse_float_list,
                        default=[0.10, 0.05, 0.01], help="Significance levels")
    parser.add_argument("--seed", type=int, default=None, help="Master seed (default from config)")
    parser.add_argument("--noise-sd", action="store_true", help="Read the mean-noise parameter as a std-dev")
    parser.add_argument("--fix-graph", action="store_true", help="One Model 1 graph for all runs")
    parser.add_argument("--fix-population", action="store_true", help="One population for all runs")


def _add_common_args(parser: argparse.ArgumentParser, out: bool = True) -> None:
    parser.add_argument("--threads", type=int, default=None, help="Worker processes (0 = one per CPU)")
    if out:
        parser.add_argument("--out", default=None, help="Output directory")


def create_parser() -> argparse.ArgumentParser:
    """Top-level parser with one subparser per command."""
    parser = argparse.ArgumentParser(
        prog="ewp-scs",
        description="EWP-SCS - Selection Confidence Sets for equally weighted portfolios",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--no-color", action="store_true", help="Disable colored output")
    parser.add_argument("--json", action="store_true", help="Output in JSON format")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    scs_parser = subparsers.add_parser("scs", help="Build the Selection Confidence Set")
    _add_panel_args(scs_parser)
    _add_screen_args(scs_parser)
    _add_common_args(scs_parser)
    scs_parser.set_defaults(func=cmd_scs)

    metrics_parser = subparsers.add_parser("metrics", help="Post-selection metrics from scs.json")
    metrics_parser.add_argument("--scs", required=True, help="scs.json or the directory holding it")
    metrics_parser.add_argument("--alphas", type=parse_float_list, default=None, help="Levels to report")
    metrics_parser.add_argument("--cii-threshold", type=float, default=0.01, help="Graph edge threshold")
    metrics_parser.add_argument("--profile-alphas", type=parse_float_list, default=None, help="II profile grid")
    metrics_parser.add_argument("--out", default=None, help="Output directory (default: <scs dir>/metrics)")
    metrics_parser.set_defaults(func=cmd_metrics)

    simulate_parser = subparsers.add_parser("simulate", help="Monte Carlo study")
    _add_model_args(simulate_parser)
    simulate_parser.add_argument("--losses", default="sharpe,mv:gamma=0.5,es:level=0.1", help="Comma list of loss specs")
    simulate_parser.add_argument("--runs", type=int, default=None, help="Monte Carlo runs (default from config)")
    simulate_parser.add_argument("--cov-mode", choices=["iid", "gaussian"], default=None, help="Moment covariance")
    _add_common_args(simulate_parser)
    simulate_parser.set_defaults(func=cmd_simulate)

    theory_parser = subparsers.add_parser("theory", help="Asymptotic expected SCS size")
    _add_model_args(theory_parser)
    theory_parser.add_argument("--loss", default="mv:gamma=0.5", help="Loss spec")
    theory_parser.add_argument("--run", type=int, default=0, help="Population realization index")
    _add_common_args(theory_parser)
    theory_parser.set_defaults(func=cmd_theory)

    check_parser = subparsers.add_parser("check", help="Check one candidate against the SCS")
    _add_panel_args(check_parser)
    _add_screen_args(check_parser)
    check_parser.add_argument("--candidate", required=True, help="Asset labels 'A,C,F' or hex mask '0x5/3'")
    _add_common_args(check_parser, out=False)
    check_parser.set_defaults(func=cmd_check)

    config_parser = subparsers.add_parser("config", help="Configuration commands")
    config_subparsers = config_parser.add_subparsers(dest="config_command")

    config_actions = [
        ("show", cmd_config_show, "Print resolved settings", ()),
        ("get", cmd_config_get, "Print one setting", ("key",)),
        ("set", cmd_config_set, "Store one setting in the user file", ("key", "value")),
        ("reset", cmd_config_reset, "Restore built-in defaults", ()),
        ("init", cmd_config_init, f"Create {USER_SETTINGS_FILE}", ()),
    ]
    for name, func, summary, positionals in config_actions:
        action = config_subparsers.add_parser(name, help=summary)
        for positional in positionals:
            action.add_argument(positional, help="section.name" if positional == "key" else "JSON or plain text")
        action.set_defaults(func=func)
    config_parser.set_defaults(func=cmd_config_show)

    version_parser = subparsers.add_parser("version", help="Show version")
    version_parser.set_defaults(func=cmd_version)

    return parser


def configure_logging(verbose: bool) -> None:
    """Route library logs to stderr; DEBUG with --verbose."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and map ScsError subclasses to exit codes."""
    parser = create_parser()
    args = parser.parse_args(argv)

    settings = get_config()
    if args.no_color or not settings.get("ui.color_output", True):
        Colors.disable()
    args.json = args.json or bool(settings.get("ui.json_output", False))
    configure_logging(args.verbose or bool(settings.get("ui.verbose", False)))

    if not args.command:
        parser.print_help()
        return 0

    try:
        return args.func(args)
    except ScsError as e:
        print_error(f"{type(e).__name__}: {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
