"""Command-line entry point: ``multirank {train,rank,eval,coding,synth}``.

Exit codes: 0 success, 1 usage error, 2 data or model-file error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
import time
import warnings

import numpy as np

from . import __version__
from .coding import Scheme, build_coding_matrix, format_matrix
from .data import DataError, deduplicate, read_dataset, serialize_dataset
from .ensemble import WeightingScheme, WeightKind, fuse_scores, rank, train_multirank
from .metrics import auc, c_index_error, ndcg
from .modelio import ModelFormatError, dumps, load_model
from .rankboost import TrainConfig
from .stump import ThresholdPolicy
from .synth import make_ordinal

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

METRICS = ("ndcg", "cindex", "auc")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return val


def _thresholds(text: str) -> ThresholdPolicy:
    try:
        return ThresholdPolicy.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _write(out, text: str) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_train(args) -> int:
    weighting = WeightKind.parse(args.weights)
    coding = Scheme.parse(args.coding)
    if weighting is WeightKind.LPC_PRIOR and coding is not Scheme.LPC:
        raise UsageError("--weights lpc-prior requires --coding lpc")
    try:
        scheme = WeightingScheme(weighting, args.holdout_frac, args.holdout_reps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    d = read_dataset(args.data)
    if args.dedup:
        before = len(d)
        d = deduplicate(d)
        if len(d) != before:
            print(f"dedup: {before} -> {len(d)} instances")
    cfg = TrainConfig(args.rounds, args.thresholds)

    t0 = time.perf_counter()
    try:
        model = train_multirank(d, coding, cfg, scheme, seed=args.seed, threads=args.threads)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    elapsed = time.perf_counter() - t0
    _write(args.out, dumps(model))

    print(f"instances {len(d)}  ratings {d.num_ratings}  coding {coding.value}  weights {weighting.value}")
    for j, (ranker, t) in enumerate(zip(model.rankers, model.weights)):
        if ranker is None:
            print(f"column {j + 1}: skipped (degenerate)")
            continue
        rs = np.array([rd.r for rd in ranker.rounds])
        summary = f"r first {rs[0]:.4f} last {rs[-1]:.4f} mean|r| {np.abs(rs).mean():.4f}" if rs.size else "no useful ranker"
        print(f"column {j + 1}: rounds {len(rs)}  {summary}  weight {t:.4f}")
    print("weights " + " ".join(f"{t:.4f}" for t in model.weights))
    print(f"time {elapsed:.3f}s")
    return EXIT_OK


def _load_for(args):
    model = load_model(args.model)
    d = read_dataset(args.data, expected_L=model.L)
    dim = max((m.feature_dimension for m in model.rankers if m is not None), default=0)
    if d.feature_dimension > dim:
        warnings.warn(f"data has features beyond index {dim}; the model ignores them", stacklevel=2)
    return model, d


def cmd_rank(args) -> int:
    model, d = _load_for(args)
    ranked = rank(model, d)
    lines = []
    for pos, (ident, s, r) in enumerate(ranked, start=1):
        line = f"{pos} {ident} {s!r}"
        if r is not None:
            line += f" {r}"
        lines.append(line)
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_eval(args) -> int:
    wanted = [m.strip() for m in args.metrics.split(",") if m.strip()]
    bad = [m for m in wanted if m not in METRICS]
    if bad or not wanted:
        raise UsageError(f"unknown metrics {bad}; choose from {', '.join(METRICS)}")
    model, d = _load_for(args)
    if not d.labeled:
        raise UsageError("eval needs labeled data")
    scores = fuse_scores(model, d.instances)
    ratings = d.ratings
    distinct = np.unique(ratings).size
    if "auc" in wanted and distinct != 2:
        raise UsageError(f"auc needs exactly two distinct ratings, data has {distinct}")
    if "cindex" in wanted and distinct < 2:
        raise UsageError("cindex needs at least two distinct ratings")

    out = []
    for name in wanted:
        if name == "ndcg":
            out.append(("ndcg", ndcg(scores, ratings)))
        elif name == "cindex":
            out.append(("cindex_error", c_index_error(scores, ratings, model.L)))
        else:
            out.append(("auc", auc(scores, ratings)))
    print("\n".join(f"{n}\t{v:.4f}" for n, v in out))
    return EXIT_OK


def cmd_coding_show(args) -> int:
    if args.L < 2:
        raise UsageError("--L must be at least 2")
    sys.stdout.write(format_matrix(build_coding_matrix(args.L, args.scheme)))
    return EXIT_OK


def cmd_synth(args) -> int:
    d = make_ordinal(args.n, args.levels, args.noise_features, args.flip, args.seed)
    _write(args.out, serialize_dataset(d))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="multirank", description="Multipartite ranking with coded RankBoost ensembles.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    schemes = [s.value for s in Scheme]

    t = sub.add_parser("train", help="train a model")
    t.add_argument("--data", required=True)
    t.add_argument("--coding", choices=schemes, default="binary")
    t.add_argument("--weights", choices=[k.value for k in WeightKind], default="linear")
    t.add_argument("--rounds", type=_positive_int, default=100)
    t.add_argument("--thresholds", type=_thresholds, default=ThresholdPolicy(), help="'all' or a count per feature")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", required=True)
    t.add_argument("--dedup", action=argparse.BooleanOptionalAction, default=True)
    t.add_argument("--holdout-frac", type=float, default=1.0 / 3.0)
    t.add_argument("--holdout-reps", type=_positive_int, default=3)
    t.add_argument("--threads", type=_positive_int, default=1)
    t.set_defaults(func=cmd_train)

    r = sub.add_parser("rank", help="rank instances by fused score")
    r.add_argument("--model", required=True)
    r.add_argument("--data", required=True)
    r.add_argument("--out", default="-")
    r.add_argument("--threads", type=_positive_int, default=1)
    r.set_defaults(func=cmd_rank)

    e = sub.add_parser("eval", help="evaluate a model on labeled data")
    e.add_argument("--model", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--metrics", default="ndcg,cindex")
    e.add_argument("--threads", type=_positive_int, default=1)
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("coding", help="coding matrix utilities")
    csub = c.add_subparsers(dest="coding_command", required=True, parser_class=_Parser)
    show = csub.add_parser("show", help="print a coding matrix")
    show.add_argument("--L", type=int, required=True)
    show.add_argument("--scheme", choices=schemes, default="binary")
    show.set_defaults(func=cmd_coding_show)

    s = sub.add_parser("synth", help="write a synthetic ordinal dataset")
    s.add_argument("--n", type=_positive_int, default=400)
    s.add_argument("--levels", type=int, default=4)
    s.add_argument("--noise-features", type=int, default=4)
    s.add_argument("--flip", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"multirank: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ModelFormatError, OSError) as exc:
        print(f"multirank: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # invariant violations and bugs
        print(f"multirank: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
