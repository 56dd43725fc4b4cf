"""
Command-line interface for roofcoh.
"""

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .analysis.axioms import check_axioms
from .analysis.roof import roof_value
from .analysis.sweep import run_sweep
from .analysis.verify import run_check
from .exceptions import ContractViolation, RoofcohError
from .models.functionals import c_f_pure, get_functional
from .models.parameters import (INEQUALITY_IDS, MARGINAL_METHODS, AxiomConfig, RoofConfig, SweepSpec,
                                Tolerances, load_parameters)
from .models.states import DensityMatrix, PureState, SubsystemShape, projector
from .utils.reporting import dump_json, exit_code, histogram_path, render_reports, write_histogram
from .utils.sampling import PRNG_ALGORITHM, ginibre_mixed, haar_pure, random_product_pure
from .utils.state_io import load_parts, load_state, save_state

logger = logging.getLogger("roofcoh")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
PRODUCT_CHECKS = ("product-additivity", "mult-separability")


def configure_logging(verbose: bool = False):
    """Single stderr handler on the package logger; INFO with --verbose, else WARNING"""
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.handlers[:] = [handler]
    logger.setLevel(logging.INFO if verbose else logging.WARNING)
    logger.propagate = False


def _dims(text: str) -> List[int]:
    try:
        dims = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must be comma-separated integers, got {text!r}")
    if not dims or any(d < 2 for d in dims):
        raise argparse.ArgumentTypeError(f"every party dimension must be >= 2, got {text!r}")
    return dims


def _ensemble_size(text: str) -> Optional[int]:
    if text == "auto":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"ensemble size must be 'auto' or an integer, got {text!r}")


def _inequalities(text: str) -> List[str]:
    ids = [part.strip() for part in text.split(",") if part.strip()]
    unknown = [i for i in ids if i not in INEQUALITY_IDS]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown inequality ids {unknown}")
    return ids


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="64-bit seed (default: the parameter file's roof seed, 7)")
    common.add_argument("--tol", type=float, default=None,
                        help="Pass tolerance (default: 1e-9 for exact checks, 1e-4 with roof values)")
    common.add_argument("--out", default=None, help="Output file (directory for sample); default stdout")
    common.add_argument("--measure", default="formation",
                        help="formation, half, renyi-<alpha> or a registered name (default: formation)")
    common.add_argument("--format", choices=["csv", "json"], default="csv", help="Report format (default: csv)")
    common.add_argument("--params", default=None, help="JSON parameter file (see data/parameters)")
    common.add_argument("--verbose", action="store_true", help="Verbose output")
    return common


def _add_roof_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--restarts", type=int, default=None, help="Roof optimizer restarts (default: 32)")
    parser.add_argument("--max-iters", type=int, default=None, help="Iterations per restart (default: 2000)")
    parser.add_argument("--obj-tol", type=float, default=None, help="Stall tolerance (default: 1e-8)")
    parser.add_argument("--ensemble-size", type=_ensemble_size, default="auto",
                        help="Decomposition size, 'auto' for r^2 capped at 16 (default: auto)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="roofcoh", description="Convex-roof coherence measures and "
                                     "superadditivity checks")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _common_parser()
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pure-value", parents=[common], help="C_f of a pure state file")
    p.add_argument("--state", required=True, help="Pure-state JSON file")
    p.set_defaults(handler=cmd_pure_value)

    p = sub.add_parser("roof", parents=[common], help="Convex-roof value of a state file")
    p.add_argument("--state", required=True, help="State JSON file")
    _add_roof_flags(p)
    p.set_defaults(handler=cmd_roof)

    p = sub.add_parser("verify", parents=[common], help="Check one inequality on state file(s)")
    p.add_argument("--state", required=True, nargs="+", help="State file, or one file per part for products")
    p.add_argument("--inequality", required=True, choices=INEQUALITY_IDS)
    p.add_argument("--marginal-method", choices=MARGINAL_METHODS, default="auto")
    _add_roof_flags(p)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="Randomized sweep over sampled states")
    p.add_argument("--spec", default=None, help="Sweep spec JSON; when given the other sweep flags are ignored")
    p.add_argument("--dims", type=_dims, default=[2, 2], help="Party dimensions, e.g. 2,2,2 (default: 2,2)")
    p.add_argument("--count", type=int, default=100, help="Number of sampled states (default: 100)")
    p.add_argument("--inequality", type=_inequalities, action="append", default=None,
                   help="Inequality id(s), comma-separated or repeated (default: bipartite-sufficient)")
    p.add_argument("--kind", choices=["auto", "pure", "mixed", "product"], default="auto")
    p.add_argument("--rank", type=int, default=2, help="Rank of sampled mixed states (default: 2)")
    p.add_argument("--marginal-method", choices=MARGINAL_METHODS, default="auto")
    p.add_argument("--workers", type=int, default=None,
                   help="Worker processes (default: CPU count, capped by ROOFCOH_THREADS)")
    p.add_argument("--emit-plot", choices=["data"], default=None,
                   help="Also write gap-histogram columns next to --out")
    _add_roof_flags(p)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("axioms", parents=[common], help="Randomized coherence-measure axiom suite")
    p.add_argument("--dim", type=int, default=2, help="Dimension (default: 2)")
    p.add_argument("--samples", type=int, default=100, help="Samples per condition (default: 100)")
    _add_roof_flags(p)
    p.set_defaults(handler=cmd_axioms)

    p = sub.add_parser("sample", parents=[common], help="Write seeded random state files")
    p.add_argument("--dims", type=_dims, required=True, help="Party dimensions, e.g. 2,2,2")
    p.add_argument("--kind", choices=["pure", "mixed", "product"], default="pure")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--rank", type=int, default=2, help="Rank of mixed states (default: 2)")
    p.set_defaults(handler=cmd_sample)
    return parser


def _parameters(args) -> Dict[str, Any]:
    if args.params:
        return load_parameters(args.params)
    return {"roof_parameters": RoofConfig(), "tolerances": Tolerances(), "axiom_parameters": AxiomConfig()}


def _roof_config(args, base: RoofConfig) -> RoofConfig:
    overrides = {
        "restarts": getattr(args, "restarts", None),
        "max_iters": getattr(args, "max_iters", None),
        "obj_tol": getattr(args, "obj_tol", None),
        "seed": args.seed,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if getattr(args, "ensemble_size", None) is not None:
        overrides["ensemble_size"] = args.ensemble_size
    return dataclasses.replace(base, **overrides)


def _tolerance(args, params: Dict[str, Any]):
    return args.tol if args.tol is not None else params["tolerances"]


def _emit(text: str, out: Optional[str]):
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info("Wrote %s", path)
    else:
        sys.stdout.write(text)


def _emit_json(payload: Dict[str, Any], out: Optional[str]):
    dump_json(payload, out if out else sys.stdout)


def cmd_pure_value(args) -> int:
    state = load_state(args.state)
    if not isinstance(state, PureState):
        raise ContractViolation("pure-value needs a pure state file")
    f = get_functional(args.measure)
    value = c_f_pure(f, state)
    payload = {"measure": f.name, "dims": list(state.dims), "value": value}
    if args.format == "json" or args.out:
        _emit_json(payload, args.out)
    if args.format != "json":
        print(f"{value:.17g}")
    return 0


def cmd_roof(args) -> int:
    params = _parameters(args)
    state = load_state(args.state)
    rho = projector(state) if isinstance(state, PureState) else state
    f = get_functional(args.measure)
    cfg = _roof_config(args, params["roof_parameters"])
    logger.info("Roof of a %s state with %s", rho.dims, f.name)
    result = roof_value(rho, f, cfg)
    payload = dict(result.to_dict(), measure=f.name, dims=list(rho.dims), config=cfg.to_dict(), prng=PRNG_ALGORITHM)
    _emit_json(payload, args.out)
    return 0


def _verify_input(args):
    if args.inequality in PRODUCT_CHECKS:
        if len(args.state) == 1:
            parts = load_parts(args.state[0])
            if parts is None:
                raise ContractViolation(f"{args.inequality} needs a product-state file with parts, "
                                        "or one pure-state file per part")
            return parts
        parts = [load_state(path) for path in args.state]
        if not all(isinstance(p, PureState) for p in parts):
            raise ContractViolation(f"{args.inequality} parts must be pure states")
        return parts
    if len(args.state) != 1:
        raise ContractViolation(f"{args.inequality} takes a single state file, got {len(args.state)}")
    return load_state(args.state[0])


def cmd_verify(args) -> int:
    params = _parameters(args)
    f = get_functional(args.measure)
    cfg = _roof_config(args, params["roof_parameters"])
    report = run_check(args.inequality, _verify_input(args), f, _tolerance(args, params), cfg,
                       args.marginal_method, cfg.seed)
    config = {"roof": cfg.to_dict(), "marginal_method": args.marginal_method, "prng": PRNG_ALGORITHM}
    _emit(render_reports([report], args.format, config), args.out)
    return exit_code([report])


def cmd_sweep(args) -> int:
    params = _parameters(args)
    if args.spec:
        spec = SweepSpec.from_json(args.spec)
    else:
        inequalities = [i for group in (args.inequality or [["bipartite-sufficient"]]) for i in group]
        spec = SweepSpec(
            dims=args.dims, count=args.count, measure=args.measure, inequalities=inequalities,
            seed=args.seed if args.seed is not None else params["roof_parameters"].seed, tol=args.tol,
            output=args.out, roof=_roof_config(args, params["roof_parameters"]),
            marginal_method=args.marginal_method, kind=args.kind, mixed_rank=args.rank,
            emit_plot=args.emit_plot == "data")
    output = args.out or spec.output
    result = run_sweep(spec, args.workers, params["tolerances"])
    _emit(render_reports(result.reports, args.format, result.config()), output)

    if spec.emit_plot:
        if output:
            write_histogram(result.reports, histogram_path(output))
        else:
            logger.warning("--emit-plot data needs --out; histogram data not written")
    return exit_code(result.reports)


def cmd_axioms(args) -> int:
    params = _parameters(args)
    f = get_functional(args.measure)
    axiom_cfg: AxiomConfig = params["axiom_parameters"]
    axiom_cfg = dataclasses.replace(axiom_cfg, roof=_roof_config(args, axiom_cfg.roof))
    seed = args.seed if args.seed is not None else params["roof_parameters"].seed
    reports = check_axioms(f, args.dim, args.samples, seed, _tolerance(args, params), axiom_cfg)
    config = {"axioms": dataclasses.asdict(axiom_cfg), "dim": args.dim, "samples": args.samples,
              "prng": PRNG_ALGORITHM}
    _emit(render_reports(reports, args.format, config), args.out)
    return exit_code(reports)


def cmd_sample(args) -> int:
    if not args.out:
        raise ContractViolation("sample needs --out DIR")
    params = _parameters(args)
    seed = args.seed if args.seed is not None else params["roof_parameters"].seed
    shape = SubsystemShape(tuple(args.dims))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for index in range(args.count):
        path = out_dir / f"state_{index:04d}.json"
        if args.kind == "pure":
            save_state(haar_pure(shape, seed, index), path)
        elif args.kind == "mixed":
            rho: DensityMatrix = ginibre_mixed(shape, args.rank, seed, index)
            save_state(rho, path)
        else:
            composite, parts = random_product_pure(shape, seed, index)
            save_state(composite, path, parts)
        print(path)
    logger.info("Wrote %d %s state files to %s", args.count, args.kind, out_dir)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except (RoofcohError, np.linalg.LinAlgError) as exc:
        print(f"roofcoh: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
