"""Command-line front end: build, verify, and simulate maskers; emit curve data.

Exit codes: 0 success, 1 domain failure (hypothesis violated or
infeasible), 2 input or I/O error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import fixed_reducing, masker as masking, optimizer
from .fileio import FileFormatError, load_masker, load_state_set, save_masker
from .fixed_reducing import MARGINAL_TOL
from .hilbert import MultipartiteState, StateVector, gram, partial_trace


def _comma_floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _format(value: float) -> str:
    return f"{value:.12g}"


def _print_matrix(name: str, entries: np.ndarray) -> None:
    print(f"{name}:")
    print(np.array_str(entries, precision=9, suppress_small=False))


def _cmd_verify_fixed_reducing(args) -> int:
    dims, vectors, _ = load_state_set(args.input, renormalize=args.renormalize)
    if len(dims) != 2:
        raise FileFormatError(
            f"field 'dims': need exactly 2 subsystems for marginal checks, got {len(dims)}"
        )
    states = [MultipartiteState(v, dims) for v in vectors]
    reference_a = partial_trace(states[0], states[0].labels[0]).entries
    reference_b = partial_trace(states[0], states[0].labels[1]).entries
    worst = 0.0
    for k, state in enumerate(states):
        dev_a = float(np.max(np.abs(partial_trace(state, state.labels[0]).entries - reference_a)))
        dev_b = float(np.max(np.abs(partial_trace(state, state.labels[1]).entries - reference_b)))
        deviation = max(dev_a, dev_b)
        worst = max(worst, deviation)
        print(f"state {k}: marginal deviation {deviation:.3e}")
    if worst <= args.tol:
        print(f"PASS (max deviation {worst:.3e}, tolerance {args.tol:.1e})")
        return 0
    print(f"FAIL (max deviation {worst:.3e}, tolerance {args.tol:.1e})")
    return 1


def _load_input_states(args) -> list[StateVector]:
    dims, vectors, _ = load_state_set(args.input, renormalize=args.renormalize)
    if len(dims) != 1:
        raise FileFormatError(
            f"field 'dims': masker inputs live on a single subsystem, got {len(dims)}"
        )
    if args.dim is not None and args.dim != dims[0]:
        raise FileFormatError(
            f"field 'dims': file declares dimension {dims[0]}, --dim says {args.dim}"
        )
    return [StateVector(v) for v in vectors]


def _print_verification(report: masking.MaskingReport) -> None:
    print("success probabilities:", " ".join(_format(p) for p in report.success_probabilities))
    print("fidelities:", " ".join(_format(f) for f in report.fidelities))
    print(f"max marginal deviation: {report.max_marginal_deviation:.3e}")
    print(f"unitarity residual: {report.unitarity_residual:.3e}")
    print(f"verification: {'PASS' if report.passed else 'FAIL'} (tolerance {report.tol:.1e})")


def _cmd_mask_det(args) -> int:
    inputs = _load_input_states(args)
    m = masking.build_deterministic(inputs, args.dim)
    report = masking.verify_masking(m)
    print(f"deterministic masker: {len(inputs)} states, dimension {m.dim}")
    _print_verification(report)
    if args.out:
        save_masker(m, args.out)
        print(f"wrote masker to {args.out}")
    return 0 if report.passed else 1


def _cmd_mask_prob(args) -> int:
    inputs = _load_input_states(args)
    n = len(inputs)
    d = inputs[0].dim
    if args.targets is not None:
        t_dims, t_vectors, _ = load_state_set(args.targets, renormalize=args.renormalize)
        if len(t_dims) != 2:
            raise FileFormatError(
                f"field 'dims': targets must be bipartite, got {len(t_dims)} subsystems"
            )
        targets = fixed_reducing.from_states([MultipartiteState(v, t_dims) for v in t_vectors])
    else:
        targets = fixed_reducing.targets_with_overlap(d, args.target_overlap)
    if targets.n != n:
        raise ValueError(f"got {targets.n} targets for {n} inputs")

    a = gram(inputs).entries
    x = gram(targets.states).entries
    if args.maximize:
        gammas, prob = optimizer.maximize_general(a, x)
    else:
        gammas = np.asarray(args.gammas, dtype=float)
        prob = optimizer.success_probability(gammas)
    _, margin = optimizer.feasible(a, x, gammas)

    m = masking.build_probabilistic(inputs, targets, gammas)
    print("gammas:", " ".join(_format(g) for g in gammas))
    print(f"Prob(M): {_format(prob)}")
    print(f"feasibility margin (min eigenvalue): {_format(margin)}")
    if args.out:
        save_masker(m, args.out)
        print(f"wrote masker to {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    m = load_masker(args.masker)
    if args.state is not None:
        outcome = masking.simulate(m, args.state)
        print(f"state {args.state}:")
        print(f"success probability: {_format(outcome.success_probability)}")
        print(f"fidelity to target: {_format(outcome.fidelity_to_target)}")
        _print_matrix("marginal A", outcome.marginal_A.entries)
        _print_matrix("marginal B", outcome.marginal_B.entries)
        return 0
    outcomes = [masking.simulate(m, k) for k in range(len(m.inputs))]
    for k, outcome in enumerate(outcomes):
        print(
            f"state {k}: success probability {_format(outcome.success_probability)}, "
            f"fidelity {_format(outcome.fidelity_to_target)}"
        )
    deviation = 0.0
    for outcome in outcomes[1:]:
        deviation = max(
            deviation,
            float(np.max(np.abs(outcome.marginal_A.entries - outcomes[0].marginal_A.entries))),
            float(np.max(np.abs(outcome.marginal_B.entries - outcomes[0].marginal_B.entries))),
        )
    _print_matrix("marginal A", outcomes[0].marginal_A.entries)
    _print_matrix("marginal B", outcomes[0].marginal_B.entries)
    print(f"cross-state marginal deviation: {deviation:.3e}")
    return 0


def _cmd_figure1(args) -> int:
    rows = optimizer.probability_curves(tuple(args.s_values), args.steps)
    lines = ["s,t,prob_max"]
    lines.extend(",".join(_format(v) for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmask",
        description="Build, verify, and simulate quantum information maskers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-fixed-reducing",
                       help="check that a bipartite state set has index-independent marginals")
    p.add_argument("input", help="state-set JSON file with two subsystems")
    p.add_argument("--tol", type=float, default=MARGINAL_TOL,
                   help="entrywise marginal tolerance (default %(default)g)")
    p.add_argument("--renormalize", action="store_true",
                   help="repair unnormalized input vectors instead of rejecting them")
    p.set_defaults(handler=_cmd_verify_fixed_reducing)

    p = sub.add_parser("mask-det", help="build a deterministic masker for orthonormal states")
    p.add_argument("input", help="state-set JSON file with one subsystem")
    p.add_argument("--dim", type=int, default=None, help="expected dimension of the input space")
    p.add_argument("--out", default=None, help="path for the masker JSON file")
    p.add_argument("--renormalize", action="store_true",
                   help="repair unnormalized input vectors instead of rejecting them")
    p.set_defaults(handler=_cmd_mask_det)

    p = sub.add_parser("mask-prob",
                       help="build a probabilistic masker for linearly independent states")
    p.add_argument("input", help="state-set JSON file with one subsystem")
    p.add_argument("--dim", type=int, default=None, help="expected dimension of the input space")
    target_group = p.add_mutually_exclusive_group(required=True)
    target_group.add_argument("--targets", default=None,
                              help="state-set JSON file of bipartite target states")
    target_group.add_argument("--target-overlap", type=float, default=None,
                              help="build two targets with this mutual overlap")
    gamma_group = p.add_mutually_exclusive_group(required=True)
    gamma_group.add_argument("--gammas", type=_comma_floats, default=None,
                             help="comma-separated efficiencies, one per input")
    gamma_group.add_argument("--maximize", action="store_true",
                             help="maximize the success probability first")
    p.add_argument("--out", default=None, help="path for the masker JSON file")
    p.add_argument("--renormalize", action="store_true",
                   help="repair unnormalized input vectors instead of rejecting them")
    p.set_defaults(handler=_cmd_mask_prob)

    p = sub.add_parser("simulate", help="run a saved masker and report the outcomes")
    p.add_argument("masker", help="masker JSON file")
    p.add_argument("--state", type=int, default=None,
                   help="input index to simulate (0-based); all of them when omitted")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("figure1",
                       help="emit CSV of the maximum success probability versus target overlap")
    p.add_argument("--s-values", type=float, nargs="+",
                   default=list(optimizer.DEFAULT_S_VALUES),
                   help="input overlap magnitudes, one curve each (default %(default)s)")
    p.add_argument("--steps", type=int, default=101,
                   help="number of target-overlap grid points (default %(default)s)")
    p.add_argument("--out", default=None, help="CSV path (stdout when omitted)")
    p.set_defaults(handler=_cmd_figure1)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
