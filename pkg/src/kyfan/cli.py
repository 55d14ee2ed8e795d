"""Command-line interface.

Exit codes: 0 success, 1 usage or parse error, 2 validation error,
3 property violation detected (probe witness, suite failure, failed
majorization, contractivity violation, or a measurement exceeding ``D_k``).
"""
from __future__ import annotations

import argparse
import csv
import io as _stdio
import shlex
import subprocess
import sys

import numpy as np

from . import channels as ch
from . import io
from .distances import classical_profile, distance_profile, jordan_decomposition, _check_k
from .errors import KyFanError, ParseError, UsageError, ValidationError
from .harness import PROBE_TOL, SUITES, blackbox_probe, run_suite
from .majorization import majorized, weakly_submajorized
from .measurements import measure_pair, optimal_pvm, povm_excess

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_VIOLATION = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class Output:
    """A structured report plus an optional table for ``--format csv``."""

    def __init__(self, report: dict, header=None, rows=None, code: int = EXIT_OK, raw: str | None = None):
        self.report = report
        self.header = header
        self.rows = rows
        self.code = code
        self.raw = raw

    def render(self, fmt: str) -> str:
        if self.raw is not None:
            return self.raw
        if fmt == "csv":
            buf = _stdio.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            if self.header is not None:
                writer.writerow(self.header)
                writer.writerows([[io.format_number(v) if not isinstance(v, str) else v for v in row] for row in self.rows])
            else:
                writer.writerow(["key", "value"])
                for key, value in self.report.items():
                    if not isinstance(value, (dict, list)):
                        writer.writerow([key, value if isinstance(value, str) else io.format_number(value)])
            return buf.getvalue()
        return io.dumps(self.report) + "\n"


def _profile_rows(values):
    return [[k + 1, v] for k, v in enumerate(values)]


def cmd_dist(args) -> Output:
    rho, sigma = io.load_state(args.state_a, args.tol), io.load_state(args.state_b, args.tol)
    profile = distance_profile(rho, sigma)
    if args.k is not None and not args.profile:
        return Output({"kind": "report", "command": "dist", "k": args.k, "D_k": profile[args.k]},
                      ["k", "D_k"], [[args.k, profile[args.k]]])
    return Output({"kind": "report", "command": "dist", "dim": profile.dim, "profile": profile.tolist(),
                   "trace_distance": profile[profile.dim]},
                  ["k", "D_k"], _profile_rows(profile.values))


def cmd_spectrum(args) -> Output:
    rho, sigma = io.load_state(args.state_a, args.tol), io.load_state(args.state_b, args.tol)
    jd = jordan_decomposition(rho, sigma)
    report = {
        "kind": "report",
        "command": "spectrum",
        "singular_values": jd.s.tolist(),
        "kappa": jd.kappa.tolist(),
        "tau": jd.tau.tolist(),
        "r_vectors": io.matrix_fields(jd.r_vectors) if jd.kappa.size else None,
        "t_vectors": io.matrix_fields(jd.t_vectors) if jd.tau.size else None,
    }
    return Output(report, ["j", "s_j"], [[j + 1, v] for j, v in enumerate(jd.s)])


def cmd_cdist(args) -> Output:
    p, q = io.load_vector(args.p), io.load_vector(args.q)
    profile = classical_profile(p, q)
    if args.k is not None:
        _check_k(args.k, profile.size)
        value = float(profile[args.k - 1])
        return Output({"kind": "report", "command": "cdist", "k": args.k, "D_k": value}, ["k", "D_k"], [[args.k, value]])
    return Output({"kind": "report", "command": "cdist", "profile": profile.tolist(), "l1_distance": float(profile[-1])},
                  ["k", "D_k"], _profile_rows(profile))


def cmd_pvm_opt(args) -> Output:
    rho, sigma = io.load_state(args.state_a, args.tol), io.load_state(args.state_b, args.tol)
    pvm = optimal_pvm(rho, sigma)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(io.povm_text(pvm))
    stats = measure_pair(pvm, rho, sigma)
    s = jordan_decomposition(rho, sigma).s
    return Output({"kind": "report", "command": "pvm-opt", "output": args.output, "outcomes": pvm.n_outcomes,
                   "gaps_sorted": stats.gaps_sorted.tolist(), "singular_values": s.tolist(),
                   "max_gap_error": float(np.max(np.abs(stats.gaps_sorted[: s.size] - s)))},
                  ["j", "gap_j", "s_j"], [[j + 1, g, v] for j, (g, v) in enumerate(zip(stats.gaps_sorted, s))])


def cmd_measure(args) -> Output:
    povm = io.load_povm(args.povm)
    rho, sigma = io.load_state(args.state_a, args.tol), io.load_state(args.state_b, args.tol)
    stats = measure_pair(povm, rho, sigma)
    excess = povm_excess(povm, rho, sigma)
    classical = stats.classical_profile()
    quantum = classical - excess
    rows = [[k + 1, c, d, e] for k, (c, d, e) in enumerate(zip(classical, quantum, excess))]
    exceeded = bool(excess.max() > args.violation_tol)
    code = EXIT_VIOLATION if exceeded and povm.small_trace else EXIT_OK
    return Output({"kind": "report", "command": "measure", "p": stats.p.tolist(), "q": stats.q.tolist(),
                   "gaps_sorted": stats.gaps_sorted.tolist(), "small_trace": povm.small_trace,
                   "element_traces": povm.traces.tolist(), "classical_profile": classical.tolist(),
                   "quantum_profile": quantum.tolist(), "excess": excess.tolist(), "exceeds_D_k": exceeded},
                  ["k", "classical_D_k", "D_k", "excess"], rows, code)


def cmd_majorize(args) -> Output:
    x, y = io.load_vector(args.x), io.load_vector(args.y)
    tol = 1e-9 if args.tol is None else args.tol
    report = weakly_submajorized(x, y, tol)
    verdict = majorized(x, y, tol) if args.strict else report.holds
    return Output({"kind": "report", "command": "majorize", "relation": "majorized" if args.strict else "weakly_submajorized",
                   "holds": verdict, "margins": report.margins.tolist(), "padded_length": report.padded_length,
                   "tol": tol, "first_failure_k": report.first_failure},
                  ["k", "margin"], _profile_rows(report.margins), EXIT_OK if verdict else EXIT_VIOLATION)


def _flags_report(channel) -> dict:
    f = channel.flags
    return {"dim_in": channel.dim_in, "dim_out": channel.dim_out, "kraus_operators": len(channel.kraus),
            "trace_preserving": f.trace_preserving, "trace_nonincreasing": f.trace_nonincreasing,
            "unital": f.unital, "teor0": f.teor0, "bistochastic": f.bistochastic,
            "residuals": {"trace_preserving": f.tp_residual, "trace_nonincreasing": f.nonincreasing_excess,
                          "unital": f.unital_residual, "teor0": f.teor0_excess}}


def cmd_channel_check(args) -> Output:
    channel = io.load_channel(args.kraus, 1e-9 if args.tol is None else args.tol)
    report = {"kind": "report", "command": "channel check", **_flags_report(channel)}
    rows = [[name, report[name], report["residuals"][name]] for name in ("trace_preserving", "trace_nonincreasing", "unital", "teor0")]
    rows.append(["bistochastic", report["bistochastic"], max(channel.flags.tp_residual, channel.flags.unital_residual)])
    return Output(report, ["flag", "value", "residual"], [[n, str(v).lower(), r] for n, v, r in rows])


def cmd_channel_apply(args) -> Output:
    channel = io.load_channel(args.kraus)
    rho = io.load_state(args.state, args.tol)
    if args.unnormalized:
        out, prob = ch.apply_unnormalized(channel, rho)
    else:
        out, prob = ch.apply(channel, rho).matrix, ch.apply_unnormalized(channel, rho)[1]
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(io.state_text(out))
    if args.state_only:
        return Output({}, raw=io.state_text(out))
    return Output({"kind": "report", "command": "channel apply", "success_probability": prob,
                   "normalized": not args.unnormalized, "state": io.MatrixFile("state", [out]).to_obj()})


def cmd_channel_contract(args) -> Output:
    channel = io.load_channel(args.kraus)
    rho, sigma = io.load_state(args.state_a, args.tol), io.load_state(args.state_b, args.tol)
    rep = ch.contractivity_report(channel, rho, sigma, unnormalized=args.unnormalized)
    rows = [[r.k, r.d_in, r.d_out, r.increase, str(r.violated).lower()] for r in rep.rows]
    code = EXIT_VIOLATION if rep.any_violation or not rep.submajorization.holds else EXIT_OK
    return Output({"kind": "report", "command": "channel contract", "teor0": rep.teor0, "unnormalized": rep.unnormalized,
                   "rows": [{"k": r.k, "D_k_in": r.d_in, "D_k_out": r.d_out, "violated": r.violated} for r in rep.rows],
                   "any_violation": rep.any_violation, "s_in": rep.s_in.tolist(), "s_out": rep.s_out.tolist(),
                   "s_out_weakly_submajorized_by_s_in": rep.submajorization.holds,
                   "submajorization_margins": rep.submajorization.margins.tolist()},
                  ["k", "D_k_in", "D_k_out", "increase", "violated"], rows, code)


class ExecOracle:
    """Black-box oracle backed by an external command (state file in, state file out)."""

    def __init__(self, command: str, tol: float):
        self.argv = shlex.split(command)
        self.tol = tol

    def __call__(self, rho):
        done = subprocess.run(self.argv, input=io.state_text(rho), capture_output=True, text=True, check=False)
        if done.returncode != 0:
            raise ValidationError(f"oracle command exited with {done.returncode}: {done.stderr.strip()}")
        return io.parse_kind(done.stdout, "state").matrices[0]


def cmd_probe(args) -> Output:
    if (args.kraus is None) == (args.exec_cmd is None):
        raise UsageError("give exactly one of a Kraus file or --exec CMD")
    oracle = ExecOracle(args.exec_cmd, args.tol) if args.exec_cmd else io.load_channel(args.kraus)
    extra = [(io.load_state(a), io.load_state(b)) for a, b in (args.pair or [])]
    tol = PROBE_TOL if args.tol is None else args.tol
    verdict = blackbox_probe(oracle, args.dim, args.pairs, seed=args.seed, tol=tol, extra_pairs=extra,
                             jobs=args.jobs, reentrant=not args.serial)
    report = {"kind": "report", "command": "probe", "verdict": verdict.verdict, "pairs_probed": verdict.pairs_probed,
              "tol": verdict.tol, "max_increase": verdict.max_increase.tolist(), "note": verdict.note, "witness": None}
    w = verdict.witness
    if w is not None:
        report["witness"] = {"pair_index": w.pair_index, "family": w.family, "k": w.k,
                             "D_in": w.d_in.tolist(), "D_out": w.d_out.tolist(),
                             "rho": io.MatrixFile("state", [w.rho.matrix]).to_obj(),
                             "sigma": io.MatrixFile("state", [w.sigma.matrix]).to_obj()}
        if args.witness_prefix:
            for tag, state in (("rho", w.rho), ("sigma", w.sigma)):
                with open(f"{args.witness_prefix}{tag}.json", "w", encoding="utf-8") as fh:
                    fh.write(io.state_text(state))
    return Output(report, ["k", "max_increase"], _profile_rows(verdict.max_increase),
                  EXIT_VIOLATION if verdict.violates else EXIT_OK)


def cmd_suite(args) -> Output:
    rep = run_suite(args.name, args.dim, args.trials, seed=args.seed, jobs=args.jobs)
    print(f"suite {rep.name}: {rep.trials} trials in {rep.wall_time:.2f}s", file=sys.stderr)
    rows = [[key, rep.worst_margins[key], rep.tolerances[key], sum(f.assertion == key for f in rep.failures)]
            for key in rep.tolerances]
    return Output({"kind": "report", "command": "suite", **rep.to_dict()},
                  ["assertion", "worst_margin", "tol", "failures"], rows,
                  EXIT_OK if rep.passed else EXIT_VIOLATION)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized commands")
    common.add_argument("--tol", type=float, default=None,
                        help="tolerance (state validation, comparison, or violation threshold depending on command)")
    common.add_argument("--format", choices=("text", "csv"), default="text", help="report format")

    parser = _Parser(prog="kyfan", description="Partitioned trace distances (Ky Fan k-norm metrics) between quantum states.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dist", parents=[common], help="D_k or the full distance profile of two states")
    p.add_argument("state_a")
    p.add_argument("state_b")
    p.add_argument("-k", type=int)
    p.add_argument("--profile", action="store_true")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("spectrum", parents=[common], help="singular values and Jordan eigendata of the difference")
    p.add_argument("state_a")
    p.add_argument("state_b")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("cdist", parents=[common], help="partitioned classical distance of two distributions")
    p.add_argument("p")
    p.add_argument("q")
    p.add_argument("-k", type=int)
    p.set_defaults(func=cmd_cdist)

    p = sub.add_parser("pvm-opt", parents=[common], help="write the projective measurement attaining every D_k")
    p.add_argument("state_a")
    p.add_argument("state_b")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_pvm_opt)

    p = sub.add_parser("measure", parents=[common], help="outcome statistics of a POVM and their partitioned distances")
    p.add_argument("povm")
    p.add_argument("state_a")
    p.add_argument("state_b")
    p.add_argument("--violation-tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("majorize", parents=[common], help="weak submajorization (or majorization with --strict)")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_majorize)

    chan = sub.add_parser("channel", help="Kraus channel commands")
    csub = chan.add_subparsers(dest="channel_command", required=True, parser_class=_Parser)
    p = csub.add_parser("check", parents=[common], help="classification flags with residuals")
    p.add_argument("kraus")
    p.set_defaults(func=cmd_channel_check)
    p = csub.add_parser("apply", parents=[common], help="apply a channel to a state ('-' reads stdin)")
    p.add_argument("kraus")
    p.add_argument("state")
    p.add_argument("--unnormalized", action="store_true")
    p.add_argument("-o", "--output")
    p.add_argument("--state-only", action="store_true", help="print only the output state file")
    p.set_defaults(func=cmd_channel_apply)
    p = csub.add_parser("contract", parents=[common], help="per-k contractivity table")
    p.add_argument("kraus")
    p.add_argument("state_a")
    p.add_argument("state_b")
    p.add_argument("--unnormalized", action="store_true")
    p.set_defaults(func=cmd_channel_contract)

    p = sub.add_parser("probe", parents=[common], help="black-box audit of a channel for D_k increases")
    p.add_argument("kraus", nargs="?")
    p.add_argument("--exec", dest="exec_cmd", metavar="CMD", help="external oracle: state file on stdin, state file on stdout")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--pairs", type=int, default=200)
    p.add_argument("--pair", nargs=2, action="append", metavar=("STATE_A", "STATE_B"), help="extra probe pair, probed first")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--serial", action="store_true", help="oracle is not reentrant; never call it concurrently")
    p.add_argument("--witness-prefix", help="write witness states to PREFIXrho.json / PREFIXsigma.json")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("suite", parents=[common], help="run a randomized property suite")
    p.add_argument("name", choices=sorted(SUITES))
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "tol", None) is None and args.func not in (cmd_majorize, cmd_probe, cmd_channel_check):
        args.tol = 1e-10
    try:
        out = args.func(args)
    except (ParseError, UsageError, OSError) as exc:
        print(f"kyfan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"kyfan: validation error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except KyFanError as exc:
        print(f"kyfan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(out.render(args.format))
    return out.code


if __name__ == "__main__":
    sys.exit(main())
