"""Command line interface.

Exit codes:
    0: knef, minimal, or a successful query.
    1: not knef, a ruled section exception, or not minimal.
    2: a descriptor, configuration or validation error.
    3: the knef oracle disagrees with a certificate, or a scan found a counterexample.
    4: the sum is conditionally minimal (the ruled section case).
"""

from __future__ import annotations

import argparse
import logging
import sys

from geography.geography import (
    building_blocks,
    chain_by_names,
    enumerate_region,
    s11_chain,
    verify_chain,
)
from knef.knef import (
    KnefVerdict,
    is_rationally_knef,
    knef_oracle,
    oracle_agrees,
    scan_integer_path,
    scan_possquare,
)
from lattice.errors import ConfigError, InconsistencyError, SymsumError
from lattice.lattice import sample_light_cone
from manifolds.descriptors import load_manifold, load_sum
from sums.sums import (
    LEFSCHETZ_REASONS,
    FibrationDescriptor,
    MinimalityVerdict,
    decide_minimality,
    enumerate_can_splittings,
    lefschetz_fiber_sum_minimal,
    sum_chern,
    sum_euler,
    validate_sum,
)
from symsum.config import load_config
from symsum.reports import ReportBuilder, region_lines, render

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INVALID = 2
EXIT_DISAGREEMENT = 3
EXIT_CONDITIONAL = 4

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


def fibration(text):
    """Parse ``genus:relatively_minimal:trivial_projection``, e.g. ``2:1:0``."""
    truth = {"1": True, "true": True, "yes": True, "0": False, "false": False, "no": False}
    parts = text.split(":")
    try:
        genus = int(parts[0])
        relatively_minimal, trivial = (truth[part.lower()] for part in parts[1:])
    except (ValueError, KeyError, IndexError) as error:
        raise argparse.ArgumentTypeError(f"expected genus:rel:triv such as 2:1:0, got {text!r}") from error
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected genus:rel:triv such as 2:1:0, got {text!r}")
    return FibrationDescriptor(genus, relatively_minimal, trivial)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="symsum",
        description="Exact lattice computations for symplectic 4-manifolds, their sums and their minimality.",
    )
    parser.add_argument("--config", help="YAML file with a 'run:' mapping")
    parser.add_argument("--degree-bound", type=int, help="bound for exceptional class searches (default 6)")
    parser.add_argument("--coeff-bound", type=int, help="coefficient box of the knef oracle (default 10)")
    parser.add_argument("--splitting-bound", type=int, help="coefficient box of the splitting search (default 8)")
    parser.add_argument("--max-components", type=int, help="sphere candidates per side of a splitting (default 1)")
    parser.add_argument("--jobs", type=int, help="worker processes (default: available cores)")
    parser.add_argument("--format", dest="output_format", choices=("text", "structured"), help="report format")
    parser.add_argument("--seed", type=int, help="seed for sampled checks")
    parser.add_argument("--oracle", action="store_const", const=True, help="cross-check certificates by brute force")
    parser.add_argument("--output", help="write the report to this file instead of stdout")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    commands = parser.add_subparsers(dest="command", required=True)

    invariants = commands.add_parser("invariants", help="echo a model's lattice, canonical class and surfaces")
    invariants.add_argument("file")

    knef = commands.add_parser("knef", help="certify that a surface is rationally K-nef")
    knef.add_argument("file")
    knef.add_argument("surface")

    possquare = commands.add_parser("possquare", help="scan the positive square lemma over a coefficient box")
    possquare.add_argument("n", type=int)
    possquare.add_argument("--integer-limit", type=int, default=100)

    lightcone = commands.add_parser("lightcone", help="sample the light cone lemma with the configured seed")
    lightcone.add_argument("--samples", type=int, default=10000)

    sum_ = commands.add_parser("sum", help="decide the minimality of a symplectic sum")
    sum_.add_argument("file")
    sum_.add_argument("--splittings", action="store_true", help="also enumerate splittings of exceptional classes")

    lefschetz = commands.add_parser("lefschetz", help="minimality of a fiber sum of Lefschetz fibrations")
    lefschetz.add_argument("first", type=fibration, metavar="g:rel:triv")
    lefschetz.add_argument("second", type=fibration, metavar="g:rel:triv")

    geography = commands.add_parser("geography", help="building blocks, realizable regions and chains")
    queries = geography.add_subparsers(dest="query", required=True)
    blocks = queries.add_parser("blocks")
    blocks.add_argument("--m-g-euler", type=int, default=24)
    blocks.add_argument("--exceptional-bound", type=int)
    region = queries.add_parser("region")
    region.add_argument("--a", nargs=2, type=int, default=(0, 48), metavar=("LOW", "HIGH"))
    region.add_argument("--b", nargs=2, type=int, default=(0, 48), metavar=("LOW", "HIGH"))
    region.add_argument("--r", type=int, default=0)
    region.add_argument("--delimited", action="store_true", help="print one a,b line per point")
    chain = queries.add_parser("chain")
    chain.add_argument("blocks", nargs="*", metavar="BLOCK")
    chain.add_argument("--s11", action="store_true", help="the two-stage construction of S11")
    chain.add_argument("--m-g-euler", type=int, default=24)
    return parser


def configure_logging(level, verbosity):
    if verbosity >= 2:
        level = "DEBUG"
    elif verbosity == 1:
        level = "INFO"
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(level)


def cmd_invariants(args, config, reports):
    return reports.invariants(load_manifold(args.file)), EXIT_OK


def cmd_knef(args, config, reports):
    descriptor = load_manifold(args.file)
    M = descriptor.model
    F = descriptor.surface(args.surface)
    certificate = is_rationally_knef(M, F, config.degree_bound, config.jobs)
    code = EXIT_OK if certificate.verdict is KnefVerdict.KNEF else EXIT_NEGATIVE
    if not config.oracle:
        return reports.knef(certificate), code
    oracle = knef_oracle(M, F, config.coeff_bound, config.jobs)
    agreement = oracle_agrees(certificate, oracle)
    if agreement is False:
        logger.error("The oracle disagrees with the %s certificate of %s", certificate.verdict.value, F.name)
        code = EXIT_DISAGREEMENT
    return reports.knef(certificate, oracle, agreement), code


def cmd_possquare(args, config, reports):
    passing, counterexamples = scan_possquare(args.n, config.coeff_bound, config.degree_bound, config.jobs)
    integer_path = scan_integer_path(args.integer_limit)
    code = EXIT_DISAGREEMENT if counterexamples or integer_path else EXIT_OK
    return reports.possquare(args.n, config.coeff_bound, passing, counterexamples, integer_path), code


def cmd_lightcone(args, config, reports):
    return reports.lightcone(sample_light_cone(args.samples, seed=config.seed), config.seed), EXIT_OK


def cmd_sum(args, config, reports):
    s = load_sum(args.file)
    validation = validate_sum(s)
    if not validation.ok:
        return reports.invalid_sum(validation), EXIT_INVALID
    decision = decide_minimality(s, config.degree_bound, config.jobs)
    if all(side.surface.square == 0 for side in s.sides):
        chern = sum_chern(s)
    else:
        chern = (None, sum_euler(s))
    splittings = None
    if args.splittings:
        splittings = enumerate_can_splittings(s, config.splitting_bound, config.max_components, config.jobs)
    if decision.verdict is MinimalityVerdict.CONDITIONAL_CASE_II:
        code = EXIT_CONDITIONAL
    else:
        code = EXIT_OK if decision.is_minimal else EXIT_NEGATIVE
    return reports.sum(s, decision, chern, splittings, config.splitting_bound), code


def cmd_lefschetz(args, config, reports):
    minimal = lefschetz_fiber_sum_minimal(args.first, args.second)
    return reports.lefschetz(args.first, args.second, minimal, LEFSCHETZ_REASONS), EXIT_OK


def cmd_geography(args, config, reports):
    if args.query == "blocks":
        bound = config.degree_bound if args.exceptional_bound is None else args.exceptional_bound
        return reports.blocks(building_blocks(args.m_g_euler, bound, config.jobs)), EXIT_OK
    if args.query == "region":
        points = enumerate_region(tuple(args.a), tuple(args.b), args.r, config.jobs)
        if args.delimited:
            return region_lines(points), EXIT_OK
        return reports.region(points, args.a, args.b, args.r), EXIT_OK
    if args.s11:
        first, links = s11_chain()
    else:
        first, links = chain_by_names(args.blocks, args.m_g_euler)
    report = verify_chain(first, links, config.degree_bound, config.jobs)
    if report.minimal is None:
        code = EXIT_CONDITIONAL
    else:
        code = EXIT_OK if report.minimal else EXIT_NEGATIVE
    return reports.chain(report), code


COMMANDS = {
    "invariants": cmd_invariants,
    "knef": cmd_knef,
    "possquare": cmd_possquare,
    "lightcone": cmd_lightcone,
    "sum": cmd_sum,
    "lefschetz": cmd_lefschetz,
    "geography": cmd_geography,
}


def main(argv=None):
    """Run one command and return its exit code.

    Examples:
        >>> main(["invariants", "descriptors/s2xs2.yml"])
        0
    """
    args = build_parser().parse_args(argv)
    overrides = {
        "degree_bound": args.degree_bound,
        "coeff_bound": args.coeff_bound,
        "splitting_bound": args.splitting_bound,
        "max_components": args.max_components,
        "jobs": args.jobs,
        "output_format": args.output_format,
        "seed": args.seed,
        "oracle": args.oracle,
    }
    try:
        config = load_config(args.config, overrides)
    except ConfigError as error:
        print(f"symsum: {error}", file=sys.stderr)
        return EXIT_INVALID
    configure_logging(config.log_level, args.verbose)
    try:
        report, code = COMMANDS[args.command](args, config, ReportBuilder())
    except InconsistencyError:
        raise
    except SymsumError as error:
        print(f"symsum: {error}", file=sys.stderr)
        return EXIT_INVALID
    text = report if isinstance(report, str) else render(report, config.output_format)
    if args.output:
        with open(args.output, "w") as output:
            output.write(text)
    else:
        sys.stdout.write(text)
    return code


def run():
    sys.exit(main())
