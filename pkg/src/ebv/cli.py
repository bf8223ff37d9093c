"""Command-line front end.

Subcommands: ``generate``, ``stats``, ``bounds``, ``capacity``,
``demo-train``.  Tables are tab-separated with a header line; summaries are
``key=value`` lines.  Timing and progress go to stderr so identical
invocations produce identical stdout.

Exit codes: 0 success, 1 runtime error, 2 generation did not converge
(the best frame is still written), 3 infeasible alpha, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import capacity as capacity_mod
from . import toy
from .classifier import ClassifierHead
from .core import (
    DEFAULT_MAX_ITERS,
    DEFAULT_SLICE,
    DEFAULT_TOL,
    FrameConfig,
    frame_stats,
    grassmannian_feasibility,
    max_num_upper_bound,
    welch_lower_bound,
)
from .errors import EBVError, InfeasibleAlphaError
from .frameio import FrameMeta, load_frame, save_frame
from .generate import generate

EX_OK = 0
EX_ERROR = 1
EX_NOT_CONVERGED = 2
EX_INFEASIBLE = 3
EX_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    if value is None:
        return "none"
    return str(value)


def _print_kv(pairs):
    for key, value in pairs:
        print(f"{key}={_fmt(value)}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="ebv", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a frame and write it to a file")
    gen.add_argument("--dim", type=int, required=True)
    gen.add_argument("--num", type=int, required=True)
    gen.add_argument("--alpha", type=float, required=True)
    gen.add_argument("--lr", type=float, default=0.0,
                     help="learning rate; 0 calibrates from the initial gradient")
    gen.add_argument("--slice", type=int, default=DEFAULT_SLICE)
    gen.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    gen.add_argument("--tol", type=float, default=DEFAULT_TOL)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--deterministic", action="store_true",
                     help="accepted for reproducible pipelines; runs are "
                          "deterministic for a fixed seed either way")
    gen.add_argument("--quiet", action="store_true", help="suppress progress lines")
    gen.add_argument("--out", required=True)

    st = sub.add_parser("stats", help="print geometry stats of a frame file")
    st.add_argument("--in", dest="path", required=True)
    st.add_argument("--alpha", type=float, default=None,
                    help="threshold to check; defaults to the file's alpha")
    st.add_argument("--tol", type=float, default=DEFAULT_TOL)
    st.add_argument("--json", action="store_true", help="one flat JSON object")

    bd = sub.add_parser("bounds", help="analytic bounds for a (dim, num) pair")
    bd.add_argument("--dim", type=int, required=True)
    bd.add_argument("--num", type=int, required=True)
    bd.add_argument("--alpha", type=float, default=None)
    bd.add_argument("--embed-dim", type=int, default=None,
                    help="also report classifier parameter counts for this "
                         "feature width")

    cap = sub.add_parser("capacity", help="bisect the largest feasible count")
    cap.add_argument("--dim", type=int, required=True)
    cap.add_argument("--alpha", type=float, required=True)
    cap.add_argument("--budget", type=int, default=3)
    cap.add_argument("--seed", type=int, default=0)
    cap.add_argument("--tol", type=float, default=DEFAULT_TOL)
    cap.add_argument("--max-iters", type=int, default=None,
                     help="per-probe pass budget; default scales with num")

    demo = sub.add_parser("demo-train", help="train the synthetic demo")
    demo.add_argument("--classes", type=int, default=8)
    demo.add_argument("--frame", default=None, help="frame file for the head")
    demo.add_argument("--generate-frame", action="store_true",
                      help="generate the head frame on the fly")
    demo.add_argument("--dim", type=int, default=None,
                      help="frame dim when generating; defaults to --classes")
    demo.add_argument("--alpha", type=float, default=0.01)
    demo.add_argument("--tau", type=float, default=0.07)
    demo.add_argument("--epochs", type=int, default=30)
    demo.add_argument("--lr", type=float, default=0.05)
    demo.add_argument("--batch", type=int, default=32)
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--per-class", type=int, default=200)
    demo.add_argument("--input-dim", type=int, default=16)
    demo.add_argument("--sigma", type=float, default=0.5)
    demo.add_argument("--baseline", action="store_true",
                      help="also train the fully connected comparison arm")
    return parser


def _cmd_generate(args) -> int:
    config = FrameConfig(
        alpha=args.alpha,
        dim=args.dim,
        num=args.num,
        seed=args.seed,
        learning_rate=args.lr,
        slice=args.slice,
        max_iters=args.max_iters,
        tol=args.tol,
    )

    def progress(iteration, loss, coherence):
        print(
            f"pass {iteration}: loss={loss:.6g} coherence={coherence:.6g}",
            file=sys.stderr,
        )

    frame, report = generate(config, progress=None if args.quiet else progress)
    save_frame(frame, FrameMeta(alpha=args.alpha, seed=args.seed), args.out)
    _print_kv(
        [
            ("out", args.out),
            ("converged", report.converged),
            ("iterations", report.iterations),
            ("coherence", report.final_coherence),
        ]
    )
    print(f"elapsed_seconds={report.elapsed_seconds:.3f}", file=sys.stderr)
    if not report.converged:
        print(
            f"warning: did not reach alpha+tol={args.alpha + args.tol:g} within "
            f"{args.max_iters} passes; best frame written anyway",
            file=sys.stderr,
        )
        return EX_NOT_CONVERGED
    return EX_OK


def _cmd_stats(args) -> int:
    frame, meta = load_frame(args.path)
    alpha = meta.alpha if args.alpha is None else args.alpha
    stats = frame_stats(frame, alpha, args.tol)
    fields = [
        ("dim", frame.dim),
        ("num", frame.num),
        ("alpha", alpha),
        ("tol", args.tol),
        ("seed", meta.seed),
        ("coherence", stats.coherence),
        ("min_angle_deg", stats.min_angle_deg),
        ("avg_deviation_deg", stats.avg_deviation_deg),
        ("welch_bound", stats.welch_bound),
        ("satisfies_alpha", stats.satisfies_alpha),
    ]
    if args.json:
        print(json.dumps(dict(fields)))
    else:
        _print_kv(fields)
    return EX_OK


def _cmd_bounds(args) -> int:
    fields = [
        ("dim", args.dim),
        ("num", args.num),
        ("welch_lower_bound", welch_lower_bound(args.dim, args.num)),
        ("grassmannian_feasibility", grassmannian_feasibility(args.dim, args.num)),
        ("sqrt2n_dim_suggestion", capacity_mod.sqrt2n_heuristic(args.num)),
    ]
    if args.alpha is not None:
        fields.append(
            ("max_num_upper_bound", max_num_upper_bound(args.alpha, args.dim))
        )
    if args.embed_dim is not None:
        ebv_params, fc_params = capacity_mod.head_parameter_counts(
            args.embed_dim, args.dim, args.num
        )
        fields += [
            ("head_params_ebv", ebv_params),
            ("head_params_fc", fc_params),
            ("head_params_ratio", fc_params / ebv_params),
        ]
    _print_kv(fields)
    return EX_OK


def _cmd_capacity(args) -> int:
    query = capacity_mod.CapacityQuery(
        alpha=args.alpha,
        dim=args.dim,
        attempt_budget=args.budget,
        seed=args.seed,
        tol=args.tol,
        max_iters=args.max_iters,
    )
    result = capacity_mod.bisect_capacity(query)
    print("num\tsucceeded")
    for num, ok in result.probes:
        print(f"{num}\t{_fmt(ok)}")
    print(
        f"max_num_found={result.max_num_found} "
        f"analytic_upper={_fmt(result.analytic_upper)} "
        f"ceiling_limited={_fmt(result.ceiling_limited)} "
        f"total_seconds={result.total_seconds:.3f}",
        file=sys.stderr,
    )
    return EX_OK


def _cmd_demo_train(args) -> int:
    if args.frame is None and not args.generate_frame:
        raise EBVError("demo-train needs --frame PATH or --generate-frame")
    if args.frame is not None:
        frame, _ = load_frame(args.frame)
    else:
        dim = args.dim if args.dim is not None else args.classes
        num = max(args.classes, dim)
        config = FrameConfig(alpha=args.alpha, dim=dim, num=num, seed=args.seed)
        frame, report = generate(config)
        if not report.converged:
            raise EBVError(
                f"head frame generation did not converge at alpha={args.alpha:g}"
            )
    if frame.num < args.classes:
        raise EBVError(
            f"frame has {frame.num} rows but {args.classes} classes requested"
        )
    head = ClassifierHead(frame=frame, temperature=args.tau, num_classes=args.classes)
    dataset = toy.make_dataset(
        num_classes=args.classes,
        per_class=args.per_class,
        input_dim=args.input_dim,
        sigma=args.sigma,
        seed=args.seed,
    )
    extractor, record = toy.train_extractor(
        dataset, head, epochs=args.epochs, lr=args.lr, batch=args.batch, seed=args.seed
    )
    records = [record]
    fc_record = None
    if args.baseline:
        _, fc_record = toy.train_fc_baseline(
            dataset,
            embed_dim=frame.dim,
            epochs=args.epochs,
            lr=args.lr,
            batch=args.batch,
            seed=args.seed,
        )
        records.append(fc_record)

    print("arm\tepoch\ttrain_loss\ttrain_acc\ttest_acc")
    for rec in records:
        for epoch in range(len(rec.train_loss)):
            print(
                f"{rec.arm}\t{epoch + 1}\t{rec.train_loss[epoch]:.6f}"
                f"\t{rec.train_acc[epoch]:.4f}\t{rec.test_acc[epoch]:.4f}"
            )
    summary = [
        ("final_test_acc_ebv", record.final_test_acc),
        ("own_vector_angle_fraction",
         toy.own_vector_angle_fraction(extractor, head, dataset)),
        ("head_trainable_params_ebv", record.head_trainable_params),
    ]
    if fc_record is not None:
        summary += [
            ("final_test_acc_fc", fc_record.final_test_acc),
            ("acc_delta", record.final_test_acc - fc_record.final_test_acc),
            ("head_trainable_params_fc", fc_record.head_trainable_params),
        ]
    ebv_params, fc_params = capacity_mod.head_parameter_counts(
        frame.dim, frame.dim, args.classes
    )
    summary += [
        ("head_params_formula_ebv", ebv_params),
        ("head_params_formula_fc", fc_params),
    ]
    _print_kv(summary)
    return EX_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "stats": _cmd_stats,
    "bounds": _cmd_bounds,
    "capacity": _cmd_capacity,
    "demo-train": _cmd_demo_train,
}


def run_cli(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except InfeasibleAlphaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_INFEASIBLE
    except (EBVError, ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_ERROR


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
