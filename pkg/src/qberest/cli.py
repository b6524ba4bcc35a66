"""Command line interface.

Exit codes: 0 success, 1 bad arguments or config, 2 estimation failure,
3 file I/O or corrupt input files.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .alist import load_alist
from .config import load_config
from .estimator import (
    QberWindowPrior,
    effective_degrees,
    estimate_qber_syndrome,
)
from .evaluation import format_report_csv, compute_report, read_blocks_csv, run_evaluation, write_outputs
from .exceptions import AlistParseError, ConstructionError, EstimationError, TraceExhausted
from .extension import plan_extension
from .ldpc import CodePool, PoolEntry, relative_syndrome, save_pool
from .peg import construct_peg, measure_girth
from .rng import derive_seed


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def _build_parser():
    parser = _Parser(prog="qberest", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-codes", help="build a PEG code pool")
    gen.add_argument("--n", type=int, required=True, help="frame length")
    gen.add_argument("--rates", required=True, help="comma-separated code rates")
    gen.add_argument("--dist", required=True, action="append",
                     help="column degree distribution file: 'degree fraction' lines; "
                          "repeat once per rate, or give once to share")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True, help="output pool directory")

    sim = sub.add_parser("simulate", help="run the estimator comparison harness")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", required=True)
    sim.add_argument("--parallel", type=int, default=None, metavar="N",
                     help="evaluate blocks across N processes")

    est = sub.add_parser("estimate", help="one-shot estimate from syndrome files")
    est.add_argument("--matrix", required=True, help="alist file")
    est.add_argument("--syndrome-a", required=True)
    est.add_argument("--syndrome-b", required=True)
    est.add_argument("--layout", required=True, metavar="N_S,N_P,SEED")
    est.add_argument("--prior", default=None, metavar="A_LOW,A_HIGH,Q_MIN,Q_MAX",
                     help="window prior parameters; omit for pure ML")

    rep = sub.add_parser("report", help="recompute aggregates from blocks.csv")
    rep.add_argument("--blocks", required=True)
    return parser


def _parse_distribution(path):
    dist = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(
                    "%s line %d: expected 'degree fraction'" % (path, line_no)
                )
            dist.append((int(parts[0]), float(parts[1])))
    if not dist:
        raise ValueError("%s: empty degree distribution" % path)
    return dist


def _read_bits(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    chars = [c for c in text if not c.isspace()]
    if not chars or any(c not in "01" for c in chars):
        raise ValueError("%s: expected whitespace-separated 0/1 characters" % path)
    return np.frombuffer("".join(chars).encode("ascii"), dtype=np.uint8) - ord("0")


def _cmd_gen_codes(args) -> int:
    rates = [float(tok) for tok in args.rates.split(",") if tok.strip()]
    if not rates or sorted(set(rates)) != rates:
        raise ValueError("--rates must be distinct ascending values")
    dists = [_parse_distribution(path) for path in args.dist]
    if len(dists) == 1:
        dists = dists * len(rates)
    if len(dists) != len(rates):
        raise ValueError(
            "got %d --dist files for %d rates; give one per rate or a single "
            "shared file" % (len(dists), len(rates))
        )
    entries = []
    girths = {}
    for i, rate in enumerate(rates):
        m = round(args.n * (1.0 - rate))
        matrix = construct_peg(args.n, m, dists[i], derive_seed(args.seed, "code", i))
        girth = measure_girth(matrix)
        entries.append(PoolEntry(rate=rate, matrix=matrix))
        girths[rate] = girth
        print(
            "rate %.4g: m=%d edges=%d girth=%s"
            % (rate, m, matrix.edge_count, girth if girth else ">8")
        )
    manifest = save_pool(CodePool(args.n, entries), args.out, girths=girths,
                         seed=args.seed)
    print("wrote %s" % manifest)
    return 0


def _cmd_simulate(args) -> int:
    config = load_config(args.config)
    records, report = run_evaluation(config, workers=args.parallel)
    write_outputs(records, report, args.out, bin_width=config.hist_bin_width)
    sys.stdout.write(format_report_csv(report))
    return 0


def _cmd_estimate(args) -> int:
    matrix = load_alist(args.matrix)
    s_a = _read_bits(args.syndrome_a)
    s_b = _read_bits(args.syndrome_b)
    if s_a.size != matrix.m or s_b.size != matrix.m:
        raise ValueError(
            "syndrome length must equal m=%d (got %d and %d)"
            % (matrix.m, s_a.size, s_b.size)
        )
    try:
        n_s, n_p, seed = (int(tok) for tok in args.layout.split(","))
    except ValueError:
        raise ValueError("--layout expects N_S,N_P,SEED integers")
    prior = None
    if args.prior is not None:
        try:
            a_low, a_high, q_min, q_max = (float(t) for t in args.prior.split(","))
        except ValueError:
            raise ValueError("--prior expects A_LOW,A_HIGH,Q_MIN,Q_MAX floats")
        prior = QberWindowPrior(alpha_low=a_low, alpha_high=a_high,
                                q_min=q_min, q_max=q_max)
    layout = plan_extension(matrix.n, n_s, n_p, seed)
    profile = effective_degrees(matrix, layout)
    result = estimate_qber_syndrome(relative_syndrome(s_a, s_b), profile, prior)
    print("%.17g" % result.qber)
    return 0


def _cmd_report(args) -> int:
    records = read_blocks_csv(args.blocks)
    sys.stdout.write(format_report_csv(compute_report(records)))
    return 0


_COMMANDS = {
    "gen-codes": _cmd_gen_codes,
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except EstimationError as exc:
        print("estimation failed: %s" % exc, file=sys.stderr)
        return 2
    except (AlistParseError, OSError) as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return 3
    except (ValueError, ConstructionError, TraceExhausted) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
