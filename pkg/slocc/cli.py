"""Command-line front end: ``python -m slocc <subcommand> ...``."""

from pathlib import Path
from typing import Callable, Optional, Sequence
import argparse
import asyncio
import json
import logging
import re
import sys

from pydantic import BaseModel, ValidationError

from slocc.config import get_settings
from slocc.core.realign import RealignmentShape
from slocc.core.state import StateShape
from slocc.errors import IrreducibleFactor, MissingOmega, ParseError, SloccError
from slocc.fixtures import catalog_entry
from slocc.models.requests import OutputFormat, RunConfig
from slocc.models.responses import (
    BatchSummary,
    CanonReport,
    CensusReport,
    ClassifyReport,
    OrbitReport,
    RealignReport,
    VerdictReport,
)
from slocc.services.batch_runner import BatchRunner
from slocc.services.classifier import ClassifierService
from slocc.services.result_store import ResultStore
from slocc.utils.formatting import format_labeled

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


# ==================== Text rendering ====================

def render_classify(report: ClassifyReport) -> str:
    arrangement = report.arrangement
    lines = [
        f"source: {report.source}",
        f"shape: {'x'.join(map(str, report.shape))}",
        f"axes: qubit={arrangement.qubit_axis} single={arrangement.single_axis} "
        f"composite={arrangement.composite_side}",
        f"local ranks: {' '.join(map(str, report.local_ranks))}",
        f"genuine: {'yes' if report.genuine else 'no'} ({report.genuine_explanation})",
        f"signature: {report.signature}",
    ]
    if report.invariants:
        lines.append(f"invariants: {', '.join(report.invariants)}")
        lines.append(f"family parameters: {', '.join(report.family_parameters)}")
    lines.append(f"blocks: {' '.join(report.standard_form.blocks)}")
    lines.append(format_labeled("E", report.standard_form.e_part))
    lines.append(format_labeled("J", report.standard_form.j_part))
    lines.append(format_labeled("T0", report.route.t))
    lines.append(format_labeled("P0", report.route.p))
    lines.append(format_labeled("Q0", report.route.q))
    lines.append(f"verified: {'yes' if report.verified else 'no'}")
    return "\n".join(lines)


def render_verdict(report: VerdictReport) -> str:
    lines = [f"verdict: {report.verdict.value}"]
    if report.reason is not None:
        lines.append(f"reason: {report.reason.value}")
    if report.witness is not None:
        for label in ("a1", "a2", "a3", "a4"):
            lines.append(format_labeled(label.upper(), getattr(report.witness, label)))
    for key in sorted(report.diagnostics):
        lines.append(f"{key}: {report.diagnostics[key]}")
    return "\n".join(lines)


def render_census(report: CensusReport) -> str:
    return "\n".join([
        f"shape: {'x'.join(map(str, report.shape))}",
        f"genuine: {'yes' if report.genuine else 'no'} ({report.genuine_explanation})",
        f"families: sum Omega[{report.single_dim}, i] for {report.low} <= i <= {report.high} = {report.count}",
    ])


def render_realign(report: RealignReport) -> str:
    m1, m2, n1, n2 = report.factor_dims
    lines = [format_labeled(f"realigned ({m1}x{n1} blocks of {m2}x{n2})", report.realigned), f"rank: {report.rank}"]
    if report.left is not None:
        lines.append(format_labeled("left", report.left))
        lines.append(format_labeled("right", report.right))
    else:
        lines.append("not a Kronecker product")
    return "\n".join(lines)


def render_orbit(report: OrbitReport) -> str:
    return f"orbit of {report.value}: {{{', '.join(report.orbit)}}}"


def render_canon(report: CanonReport) -> str:
    return "\n".join([
        f"blocks: {' '.join(report.blocks)}",
        format_labeled("canonical 1", report.e_part),
        format_labeled("canonical 2", report.j_part),
        format_labeled("P", report.p),
        format_labeled("Q", report.q),
        f"verified: {'yes' if report.verified else 'no'}",
    ])


def render_batch(report: BatchSummary) -> str:
    lines = [f"{item.source}: {item.status.value} {item.signature or item.error_message or ''}".rstrip()
             for item in report.items]
    lines.append(f"{report.count} files: {report.completed} classified, {report.cached} cached, "
                 f"{report.failed} failed")
    return "\n".join(lines)


def emit(report: BaseModel, config: RunConfig, render: Callable) -> None:
    if config.output_format == OutputFormat.JSON:
        print(report.model_dump_json(indent=2, by_alias=True))
    else:
        print(render(report))


# ==================== Argument helpers ====================

def parse_dims(values: Sequence[str]) -> list[int]:
    dims = []
    for value in values:
        dims.extend(int(d) for d in re.split(r"[x,]", value) if d)
    return dims


def shape_from_dims(dims: Sequence[int]) -> StateShape:
    """Three dimensions (L, M, N) get the qubit prepended; four are taken as given."""
    if len(dims) == 3:
        return StateShape((2, *dims))
    if len(dims) == 4:
        return StateShape(tuple(dims))
    raise ParseError(f"expected three or four dimensions, got {len(dims)}")


def realignment_shape(values: Sequence[str]) -> RealignmentShape:
    dims = parse_dims(values)
    if len(dims) == 2:
        return RealignmentShape.square(*dims)
    if len(dims) == 4:
        return RealignmentShape(*dims)
    raise ParseError(f"expected M N or m1 m2 n1 n2, got {len(dims)} dimensions")


def run_config(args: argparse.Namespace) -> RunConfig:
    inputs = [Path(p) for p in getattr(args, "inputs", []) or []]
    return RunConfig(
        subcommand=args.command,
        inputs=inputs,
        output_format=OutputFormat(args.format),
        seed=args.seed,
        samples=args.samples,
        timeout_ms=args.timeout_ms,
        omega_table=args.omega_table,
        batch=getattr(args, "batch", None),
    )


def build_service(config: RunConfig, store: Optional[ResultStore] = None) -> ClassifierService:
    settings = get_settings().model_copy(update={
        "seed": config.seed,
        "samples": config.samples,
        "timeout_ms": config.timeout_ms,
        "omega_table": config.omega_table or get_settings().omega_table,
    })
    return ClassifierService(settings=settings, store=store)


# ==================== Subcommands ====================

def cmd_classify(args: argparse.Namespace, config: RunConfig) -> int:
    if config.batch is not None:
        return cmd_batch(args, config)
    if not config.inputs:
        raise ParseError("classify needs a state file or --batch DIR")
    service = build_service(config)
    for path in config.inputs:
        emit(service.classify_file(path), config, render_classify)
    return EXIT_OK


def cmd_batch(args: argparse.Namespace, config: RunConfig) -> int:
    settings = get_settings()
    store = None if args.no_cache else ResultStore()
    service = build_service(config, store)
    runner = BatchRunner(service, output_dir=args.out or settings.reports_path)

    async def run() -> BatchSummary:
        if store is not None:
            await store.initialize()
        return await runner.run(config.batch)

    summary = asyncio.run(run())
    emit(summary, config, render_batch)
    return EXIT_OK if summary.failed == 0 else EXIT_USAGE


def cmd_compare(args: argparse.Namespace, config: RunConfig) -> int:
    service = build_service(config)
    first, second = (service.load_state(p) for p in config.inputs)
    report = service.compare(first, second)
    emit(report, config, render_verdict)
    return report.exit_code


def cmd_census(args: argparse.Namespace, config: RunConfig) -> int:
    service = build_service(config)
    shape = shape_from_dims(parse_dims(args.dims))
    emit(service.census(shape), config, render_census)
    return EXIT_OK


def cmd_realign(args: argparse.Namespace, config: RunConfig) -> int:
    service = build_service(config)
    emit(service.realign_file(config.inputs[0], realignment_shape(args.dims)), config, render_realign)
    return EXIT_OK


def cmd_orbit(args: argparse.Namespace, config: RunConfig) -> int:
    emit(build_service(config).orbit(args.value), config, render_orbit)
    return EXIT_OK


def cmd_canon(args: argparse.Namespace, config: RunConfig) -> int:
    emit(build_service(config).canon_file(config.inputs[0]), config, render_canon)
    return EXIT_OK


def _state_text(tensor, config: RunConfig, service: ClassifierService, qubit_axis=None, single_axis=None) -> str:
    if config.output_format == OutputFormat.JSON:
        return json.dumps(service.to_state_file(tensor, qubit_axis, single_axis), indent=2)
    lines = [f"shape: {tensor.shape}"]
    if qubit_axis is not None:
        lines.append(f"qubit_axis: {qubit_axis}")
    if single_axis is not None:
        lines.append(f"single_axis: {single_axis}")
    lines.append(tensor.to_ket())
    return "\n".join(lines)


def _write_or_print(text: str, output: Optional[Path]) -> None:
    if output is None:
        print(text)
    else:
        output.write_text(text + "\n", encoding="utf-8")
        logger.info(f"Wrote {output}")


def cmd_random(args: argparse.Namespace, config: RunConfig) -> int:
    service = build_service(config)
    if args.scramble is not None:
        parsed = service.load_state(args.scramble)
        tensor = service.scramble(parsed, config.seed)
        text = _state_text(tensor, config, service, parsed.qubit_axis, parsed.single_axis)
    else:
        if not args.dims:
            raise ParseError("random needs a shape or --scramble STATEFILE")
        shape = shape_from_dims(parse_dims(args.dims))
        tensor = service.random_state(shape, config.seed, args.bound, args.gaussian)
        text = _state_text(tensor, config, service)
    _write_or_print(text, args.output)
    return EXIT_OK


def cmd_catalog(args: argparse.Namespace, config: RunConfig) -> int:
    service = build_service(config)
    if args.name:
        entry = catalog_entry(args.name)
        _write_or_print(_state_text(entry.state(), config, service), args.output)
        return EXIT_OK
    items = service.catalog()
    if config.output_format == OutputFormat.JSON:
        print(json.dumps([item.model_dump() for item in items], indent=2))
    else:
        for item in items:
            print(f"{item.name:14} {'x'.join(map(str, item.shape)):9} {item.ket}")
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "compare": cmd_compare,
    "census": cmd_census,
    "realign": cmd_realign,
    "orbit": cmd_orbit,
    "canon": cmd_canon,
    "random": cmd_random,
    "catalog": cmd_catalog,
}


def _common_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    settings = get_settings()

    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=default("text"))
    parser.add_argument("--seed", type=int, default=default(settings.seed))
    parser.add_argument("--samples", type=int, default=default(settings.samples),
                        help="random parameter points per stabilizer candidate")
    parser.add_argument("--timeout-ms", type=int, default=default(settings.timeout_ms))
    parser.add_argument("--omega-table", type=Path, default=default(None),
                        help="JSON file of extra Omega entries")
    parser.add_argument("--verbose", "-v", action="store_true", default=default(False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slocc", description="SLOCC classification of 2xLxMxN states")
    _common_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _common_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="standard form and family signature")
    p.add_argument("inputs", nargs="*", help="state files (.json, .ket, .txt)")
    p.add_argument("--batch", type=Path, help="classify every state file in a directory")
    p.add_argument("--out", type=Path, help="report directory for --batch")
    p.add_argument("--no-cache", action="store_true", help="bypass the report store")

    p = sub.add_parser("compare", parents=[common], help="decide SLOCC equivalence of two states")
    p.add_argument("inputs", nargs=2)

    p = sub.add_parser("census", parents=[common], help="count entanglement families")
    p.add_argument("dims", nargs="+", help="L M N, a full 2 L M N shape, or 2x4x3x2")

    p = sub.add_parser("realign", parents=[common], help="realign a matrix and test for a Kronecker product")
    p.add_argument("inputs", nargs=1)
    p.add_argument("dims", nargs="+", help="M N for an operator on C^M (x) C^N, or m1 m2 n1 n2")

    p = sub.add_parser("orbit", parents=[common], help="six-element cross-ratio orbit")
    p.add_argument("value")

    p = sub.add_parser("canon", parents=[common], help="Kronecker canonical form of a matrix pair")
    p.add_argument("inputs", nargs=1)

    p = sub.add_parser("random", parents=[common], help="emit a random or scrambled state file")
    p.add_argument("dims", nargs="*")
    p.add_argument("--bound", type=int, help="amplitude bound")
    p.add_argument("--gaussian", action="store_true", help="Gaussian-integer amplitudes")
    p.add_argument("--scramble", type=Path, help="apply a random invertible quadruple to this state")
    p.add_argument("--output", "-o", type=Path)

    p = sub.add_parser("catalog", parents=[common], help="bundled representative states")
    p.add_argument("name", nargs="?")
    p.add_argument("--output", "-o", type=Path)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging("DEBUG" if args.verbose else get_settings().log_level)

    try:
        config = run_config(args)
        return COMMANDS[args.command](args, config)
    except ValidationError as e:
        print(f"error: {e.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_USAGE
    except IrreducibleFactor as e:
        print(f"error: {e}. Pencil eigenvalues outside the Gaussian rationals are not supported.",
              file=sys.stderr)
        return e.exit_code
    except MissingOmega as e:
        print(f"error: {e}. Supply them with --omega-table.", file=sys.stderr)
        return e.exit_code
    except SloccError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except (FileNotFoundError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
