"""Command-line interface: ``matprof <subcommand> [options]``.

Exit status is 0 on success, 1 for usage errors and 2 for bad input data.
"""

import argparse
import json
import sys
import time

import numpy as np

from . import io, sdts
from .discovery import (constrained_mstamp, extract_discords, extract_motifs,
                        select_natural_k)
from .errors import MatrixProfileError
from .multi import MultiProfile
from .profile import MatrixProfile, brute_force_profile, predict_runtime, stamp, stomp
from .series import (as_multi_series, as_series, random_walk, synth_planted,
                     synth_weakly_labeled, trace_like_pattern)

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    if text is None or text.strip() == "":
        return []
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _budget(text):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"budget must be an int or a fraction, got {text!r}")


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _emit_json(obj, out):
    _emit(json.dumps(obj, indent=1, allow_nan=False), out)


def _emit_column(values, out, fmt="%d"):
    _emit("\n".join(fmt % v for v in values), out)


def _load(args):
    return io.load_series(args.input, args.format)


def _profile_of(args, T):
    if T.ndim != 1:
        raise UsageError("input has several dimensions; use 'mprofile'")
    if args.algo == "brute":
        return brute_force_profile(T, args.m)
    if args.algo == "stamp":
        return stamp(T, args.m, seed=args.seed, budget=args.budget, workers=args.threads)
    return stomp(T, args.m)


def _mprofile_of(args, T):
    kw = {}
    if args.budget is not None or args.seed is not None:
        kw = {"order": "shuffled", "seed": args.seed, "budget": args.budget}
    return constrained_mstamp(as_multi_series(T), args.m, include=args.include,
                              exclude=args.exclude, **kw)


def cmd_profile(args):
    T = _load(args)
    mp = _profile_of(args, T)
    doc = io.ProfileDocument.from_profile(mp, io.file_digest(args.input), args.seed)
    _emit(doc.dumps(), args.out)


def cmd_mprofile(args):
    T = _load(args)
    mp = _mprofile_of(args, T)
    doc = io.ProfileDocument.from_profile(mp, io.file_digest(args.input), args.seed)
    _emit(doc.dumps(), args.out)


def _existing_or_new(args, T):
    if args.profile:
        return io.ProfileDocument.load(args.profile).to_profile()
    if T.ndim == 2:
        return constrained_mstamp(T, args.m)
    return stomp(T, args.m)


def cmd_motifs(args):
    T = _load(args)
    mp = _existing_or_new(args, T)
    k = args.k if isinstance(mp, MultiProfile) else 1
    found = extract_motifs(mp, T, args.count, k=k)
    _emit_json([{"rank": r.rank, "pair": list(r.pair), "distance": r.distance,
                 "k": r.k, "dims": r.dims} for r in found], args.out)


def cmd_discords(args):
    T = _load(args)
    mp = _existing_or_new(args, T)
    if isinstance(mp, MultiProfile):
        mp = MatrixProfile(mp.P[args.k - 1], mp.I[args.k - 1], mp.m,
                           mp.fraction_done, mp.algorithm, mp.exclusion)
    found = extract_discords(mp, args.count)
    _emit_json([{"rank": r.rank, "position": r.position, "distance": r.distance}
                for r in found], args.out)


def cmd_mdl_select(args):
    T = as_multi_series(_load(args))
    report = select_natural_k(T, args.m, b=args.bits)
    _emit_json({"chosen_k": report.chosen_k,
                "entries": [{"k": e.k, "pair": list(e.pair), "dims": e.dims,
                             "profile_value": e.profile_value, "bits": e.bits}
                            for e in report.entries]}, args.out)


def _load_labels(path, n=None):
    B = np.asarray(io.load_series(path, "csv"))
    if B.ndim != 1:
        raise MatrixProfileError("labels must be a single column")
    return sdts.as_annotation(B, n)


def cmd_sdts_train(args):
    T = as_series(_load(args))
    B = _load_labels(args.labels, len(T))
    if args.lag:
        T, B = sdts.lag_pair(T, B, args.lag)
    d = sdts.train(T, B, args.m_set, beta=args.beta, mode=args.mode)
    _emit(d.dumps(), args.out_dict)


def cmd_sdts_predict(args):
    T = as_series(_load(args))
    with open(args.dict) as fh:
        d = sdts.ShapeDictionary.loads(fh.read())
    _emit_column(sdts.predict(T, d, mode=args.mode), args.out)


def cmd_dna2ts(args):
    if args.sequence is not None:
        seq = args.sequence
    elif args.input:
        with open(args.input) as fh:
            seq = "".join(line.strip() for line in fh if not line.startswith(">"))
    else:
        raise UsageError("give --sequence or --input")
    walk = io.dna_to_ts(seq, strict=not args.skip_invalid)
    _emit("\n".join(repr(float(v)) for v in walk), args.out)


def cmd_downsample(args):
    out = io.downsample(_load(args), args.factor)
    if args.out is None:
        _emit("\n".join(",".join(repr(float(v)) for v in row)
                         for row in np.atleast_2d(out).T), None)
    else:
        io.save_series(args.out, out, args.out_format)


def cmd_synth(args):
    if args.kind == "planted":
        rng = np.random.default_rng(args.seed)
        pattern = np.cumsum(rng.standard_normal(args.m))
        pattern = args.amplitude * (pattern - pattern.mean()) / pattern.std()
        spacing = args.n // 2
        positions = [int(rng.integers(0, spacing - args.m)),
                     int(rng.integers(spacing, args.n - args.m))]
        dims = args.dims if args.dims else None
        pl = synth_planted(args.seed, args.n, pattern, positions, dims=dims, d=args.d)
        io.save_series(args.out, pl.values, args.out_format)
        truth = {"positions": pl.positions, "dims": pl.dims}
    elif args.kind == "walk":
        io.save_series(args.out, random_walk(np.random.default_rng(args.seed), args.n,
                                             args.d), args.out_format)
        truth = {}
    else:
        pat = trace_like_pattern(args.m, args.amplitude)
        data = synth_weakly_labeled(args.seed, args.events, pat, slop=args.slop,
                                    false_pos=args.false_pos, false_neg=args.false_neg)
        io.save_series(args.out, data.series, args.out_format)
        if args.labels_out:
            _emit_column(data.labels, args.labels_out)
        truth = {"pattern_starts": data.pattern_starts}
    if args.truth_out:
        _emit_json(truth, args.truth_out)


def cmd_predict_runtime(args):
    seconds = args.calib_seconds
    if seconds is None:
        T = random_walk(np.random.default_rng(args.seed), args.calib_n)[0]
        t0 = time.perf_counter()
        stomp(T, args.m)
        seconds = time.perf_counter() - t0
    _emit_json({"calib_n": args.calib_n, "calib_seconds": seconds, "n": args.n,
                "predicted_seconds": predict_runtime(seconds, args.calib_n, args.n)},
               args.out)


def build_parser():
    p = _Parser(prog="matprof", description="Matrix profile toolkit.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def series_cmd(name, func, help, m=True):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--input", required=True, help="series file (csv or tsbin)")
        sp.add_argument("--format", choices=("csv", "tsbin"), default=None)
        if m:
            sp.add_argument("--m", type=int, required=True, help="window length")
        sp.add_argument("--out", default=None, help="output file (default stdout)")
        sp.set_defaults(func=func)
        return sp

    sp = series_cmd("profile", cmd_profile, "matrix profile of a 1-D series")
    sp.add_argument("--algo", choices=("stamp", "stomp", "brute"), default="stomp")
    sp.add_argument("--budget", type=_budget, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--threads", type=int, default=1)

    sp = series_cmd("mprofile", cmd_mprofile, "k-dimensional matrix profiles")
    sp.add_argument("--include", type=_int_list, default=[])
    sp.add_argument("--exclude", type=_int_list, default=[])
    sp.add_argument("--budget", type=_budget, default=None)
    sp.add_argument("--seed", type=int, default=None)

    for name, func in (("motifs", cmd_motifs), ("discords", cmd_discords)):
        sp = series_cmd(name, func, f"top {name}")
        sp.add_argument("--count", type=int, default=3)
        sp.add_argument("--k", type=int, default=1, help="row of a multidimensional profile")
        sp.add_argument("--profile", default=None, help="reuse a saved profile document")

    sp = series_cmd("mdl-select", cmd_mdl_select, "MDL choice of motif dimensionality")
    sp.add_argument("--bits", type=int, default=4)

    sp = series_cmd("sdts-train", cmd_sdts_train, "learn a shape dictionary", m=False)
    sp.add_argument("--labels", required=True, help="0/1 label column")
    sp.add_argument("--m-set", type=_int_list, required=True)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--lag", type=int, default=0)
    sp.add_argument("--mode", choices=(sdts.WINDOW, sdts.START), default=sdts.WINDOW)
    sp.add_argument("--out-dict", default=None)

    sp = series_cmd("sdts-predict", cmd_sdts_predict, "annotate with a dictionary", m=False)
    sp.add_argument("--dict", required=True)
    sp.add_argument("--mode", choices=(sdts.WINDOW, sdts.START), default=sdts.WINDOW)

    sp = sub.add_parser("dna2ts", help="DNA string to cumulative series")
    sp.add_argument("--input", default=None, help="text/FASTA file")
    sp.add_argument("--sequence", default=None)
    sp.add_argument("--skip-invalid", action="store_true")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_dna2ts)

    sp = series_cmd("downsample", cmd_downsample, "block-mean downsampling", m=False)
    sp.add_argument("--factor", type=int, required=True)
    sp.add_argument("--out-format", choices=("csv", "tsbin"), default=None)

    sp = sub.add_parser("synth", help="seeded synthetic data")
    sp.add_argument("--kind", choices=("planted", "weak", "walk"), default="planted")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--n", type=int, default=2000)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--m", type=int, default=100, help="pattern length")
    sp.add_argument("--dims", type=_int_list, default=[])
    sp.add_argument("--amplitude", type=float, default=20.0)
    sp.add_argument("--events", type=int, default=30)
    sp.add_argument("--slop", type=float, default=0.7)
    sp.add_argument("--false-pos", type=float, default=0.0)
    sp.add_argument("--false-neg", type=float, default=0.0)
    sp.add_argument("--out", required=True)
    sp.add_argument("--out-format", choices=("csv", "tsbin"), default=None)
    sp.add_argument("--labels-out", default=None)
    sp.add_argument("--truth-out", default=None)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("predict-runtime", help="quadratic runtime extrapolation")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--calib-n", type=int, default=4096)
    sp.add_argument("--calib-seconds", type=float, default=None,
                    help="measured time at --calib-n (default: measure STOMP now)")
    sp.add_argument("--m", type=int, default=64)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_predict_runtime)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"matprof: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MatrixProfileError, ValueError, OSError) as exc:
        print(f"matprof: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
