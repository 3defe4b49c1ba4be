"""Command-line front end.

Verbs: encode, decode, check, stats, bound, selftest.
Exit codes: 0 success, 1 usage or parameter error, 2 corrupt stream,
3 audit failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .arrays import delete_subarray, reinsert_subarray
from .container import (
    check_container,
    container_stats,
    decode_file,
    describe_config,
    encode_file,
    trial_stats,
)
from .errors import CorruptStreamError, MdcodecError, ParameterError
from .framework import (
    ConstraintConfig,
    check_feasibility,
    minimal_square_side,
    minimal_volume_threshold,
)
from .oracle import exhaustive_roundtrip, injectivity_audit, plant_instance
from .constraints import Violation, reconstruct_repeat

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CORRUPT = 2
EXIT_AUDIT = 3


class _UsageExit(Exception):
    def __init__(self, code: int, message: str | None = None):
        self.code = code
        self.message = message


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; this tool reserves 2 for
    # corrupt streams, so remap usage problems to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageExit(EXIT_USAGE, f"{self.prog}: error: {message}")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--constraint", choices=("zrcf", "vzrcf", "rf", "hdrf"), required=True
    )
    parser.add_argument("--n", type=int, required=True, help="array side length")
    parser.add_argument("--d", type=int, required=True, help="number of dimensions")
    parser.add_argument(
        "--shape", type=str, default=None, help="box extents, e.g. 2,3 (not for vzrcf)"
    )
    parser.add_argument("--p", type=int, default=None, help="Hamming threshold (hdrf)")
    parser.add_argument("--V", type=int, default=None, help="volume threshold (vzrcf)")


def _config_from_args(args) -> ConstraintConfig:
    shape = None
    if args.shape is not None:
        try:
            shape = tuple(int(part) for part in args.shape.split(","))
        except ValueError:
            raise ParameterError(f"could not parse shape {args.shape!r}") from None
    return ConstraintConfig(
        args.constraint,
        args.n,
        args.d,
        shape=shape,
        min_volume=args.V,
        min_distance=args.p,
    )


def _cmd_encode(args) -> int:
    config = _config_from_args(args)
    data = Path(args.input).read_bytes()
    blob = encode_file(data, config, max_iterations=args.max_iter)
    Path(args.output).write_bytes(blob)
    print(f"encoded {len(data)} bytes -> {len(blob)} bytes ({describe_config(config)})")
    return EXIT_OK


def _cmd_decode(args) -> int:
    blob = Path(args.input).read_bytes()
    data = decode_file(blob, max_iterations=args.max_iter)
    Path(args.output).write_bytes(data)
    print(f"decoded {len(blob)} bytes -> {len(data)} bytes")
    return EXIT_OK


def _cmd_check(args) -> int:
    report = check_container(Path(args.input).read_bytes())
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_AUDIT


def _cmd_stats(args) -> int:
    if args.input is not None and args.trials is not None:
        raise ParameterError("give either a container file or --trials, not both")
    if args.input is not None:
        report = container_stats(Path(args.input).read_bytes())
    elif args.trials is not None:
        if args.constraint is None or args.n is None or args.d is None:
            raise ParameterError("--trials needs --constraint, --n and --d")
        report = trial_stats(
            _config_from_args(args), args.trials, args.seed,
            max_iterations=args.max_iter,
        )
    else:
        raise ParameterError("give a container file or --trials N")
    print(report.summary())
    return EXIT_OK


def _cmd_bound(args) -> int:
    if args.constraint == "vzrcf":
        threshold = minimal_volume_threshold(args.n, args.d)
        if threshold is None:
            print("no feasible volume threshold at this size")
            return EXIT_USAGE
        print(f"minimal feasible volume threshold: V = {threshold}")
        return EXIT_OK
    extent = minimal_square_side(args.constraint, args.n, args.d, min_distance=args.p)
    print(f"minimal feasible square side: l = {extent}")
    if extent > args.n:
        print(f"note: l exceeds the array side {args.n}; no square box fits")
    else:
        config = ConstraintConfig(
            args.constraint, args.n, args.d,
            shape=(extent,) * args.d, min_distance=args.p,
        )
        result = check_feasibility(config)
        print(
            f"payload: {result.payload_bits} bits + 1 reserved slot "
            f"in volume {result.slots_available}"
        )
    return EXIT_OK


def _selftest_configs():
    return [
        ConstraintConfig("zrcf", 3, 2, shape=(2, 3)),
        ConstraintConfig("vzrcf", 3, 2, min_volume=6),
        ConstraintConfig("rf", 4, 2, shape=(3, 3)),
        ConstraintConfig("hdrf", 5, 2, shape=(4, 4), min_distance=2),
    ]


def _cmd_selftest(args) -> int:
    failures = 0
    for config in _selftest_configs():
        small = config.size <= 9
        report = exhaustive_roundtrip(
            config,
            samples=500,
            seed=args.seed,
            exhaustive=True if small else False,
        )
        print(report.summary())
        failures += not report.passed
        if config.size <= 16:
            audit = injectivity_audit(config)
            print(audit.summary())
            failures += not audit.passed
    # overlap reconstruction spot checks
    config = ConstraintConfig("rf", 6, 2, shape=(3, 3))
    bad = 0
    for trial in range(50):
        witness = Violation(position=(0, 0), partner=(1, 0))
        planted = plant_instance(config, witness, seed=args.seed + trial)
        partial = reinsert_subarray(
            delete_subarray(planted, witness.partner, config.shape), None
        )
        rebuilt = reconstruct_repeat(
            partial, witness.position, witness.partner, config.shape
        )
        bad += rebuilt != planted
    print(f"overlap reconstruction: {'PASS' if not bad else f'FAIL ({bad}/50)'}")
    failures += bool(bad)
    print(f"selftest: {'PASS' if not failures else 'FAIL'}")
    return EXIT_OK if not failures else EXIT_AUDIT


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mdcodec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="encode a file into a container")
    _add_config_flags(enc)
    enc.add_argument("--max-iter", type=int, default=None)
    enc.add_argument("input")
    enc.add_argument("output")
    enc.set_defaults(func=_cmd_encode)

    dec = sub.add_parser("decode", help="decode a container back to the original file")
    dec.add_argument("--max-iter", type=int, default=None)
    dec.add_argument("input")
    dec.add_argument("output")
    dec.set_defaults(func=_cmd_decode)

    chk = sub.add_parser("check", help="validate every block of a container")
    chk.add_argument("input")
    chk.set_defaults(func=_cmd_check)

    sts = sub.add_parser("stats", help="iteration statistics for a container or trials")
    sts.add_argument("input", nargs="?", default=None)
    sts.add_argument("--trials", type=int, default=None)
    sts.add_argument("--seed", type=int, default=0)
    sts.add_argument("--max-iter", type=int, default=None)
    sts.add_argument(
        "--constraint", choices=("zrcf", "vzrcf", "rf", "hdrf"), default=None
    )
    sts.add_argument("--n", type=int, default=None)
    sts.add_argument("--d", type=int, default=None)
    sts.add_argument("--shape", type=str, default=None)
    sts.add_argument("--p", type=int, default=None)
    sts.add_argument("--V", type=int, default=None)
    sts.set_defaults(func=_cmd_stats)

    bnd = sub.add_parser("bound", help="smallest encodable square box at a given size")
    bnd.add_argument(
        "--constraint", choices=("zrcf", "vzrcf", "rf", "hdrf"), required=True
    )
    bnd.add_argument("--n", type=int, required=True)
    bnd.add_argument("--d", type=int, required=True)
    bnd.add_argument("--p", type=int, default=None)
    bnd.set_defaults(func=_cmd_bound)

    slf = sub.add_parser("selftest", help="run the built-in audit battery")
    slf.add_argument("--seed", type=int, default=0)
    slf.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageExit as exc:
        if exc.message:
            print(exc.message, file=sys.stderr)
        return exc.code
    except CorruptStreamError as exc:
        print(f"corrupt stream: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except (ParameterError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MdcodecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
