"""``qdet`` command line: run the solvers on detector files.

Exit codes: 0 success, 2 invalid input, 3 enumeration or grid cap exceeded,
4 no unambiguous strategy exists.
"""
import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import fileio
from .bayes import map_regions, solve_bayes
from .capacity import METHODS, capacity, holevo_of_rescaled_povm, subentropy_lower_bound
from .errors import CapExceededError, InfeasibleError, ValidationError
from .linalg import state_to_bloch
from .sic import analytic_capacity, analytic_min_error, analytic_triple_point, sic_qubit, tetrahedral_group
from .unambiguous import solve_unambiguous

EXIT_OK, EXIT_INVALID, EXIT_CAP, EXIT_INFEASIBLE = 0, 2, 3, 4


def fmt(x):
    return f"{x:.9g}"


def parse_priors(text):
    try:
        return np.array([float(Fraction(t.strip())) for t in text.split(",") if t.strip()])
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"cannot parse priors {text!r}: {exc}") from exc


def _vector_json(v):
    return [[float(z.real), float(z.imag)] for z in v]


def _state_lines(label, vec, out):
    out.append(f"  {label}: vector [{', '.join(fmt_complex(z) for z in vec)}]")
    if len(vec) == 2:
        b = state_to_bloch(np.outer(vec, vec.conj()))
        out.append(f"    Bloch ({', '.join(fmt(x) for x in b)})")


def fmt_complex(z):
    z = complex(z)
    if abs(z.imag) < 5e-16:
        return fmt(z.real)
    return f"{fmt(z.real)}{'+' if z.imag >= 0 else '-'}{fmt(abs(z.imag))}j"


def _emit(args, report, payload):
    sys.stdout.write("\n".join(report) + "\n")
    if getattr(args, "out", None):
        fileio.write_json(args.out, payload)


def cmd_bayes(args):
    povm = fileio.load_povm(args.povm)
    priors = parse_priors(args.priors)
    cost = None if args.cost == "minerr" else fileio.load_cost(args.cost)
    sol = solve_bayes(povm, priors, cost)
    labels = [g + 1 for g in sol.grouping]
    report = [
        f"grouping (outcome -> hypothesis): {' '.join(map(str, labels))}",
        f"gain: {fmt(sol.gain)}",
        f"expected cost: {fmt(sol.original_cost)}",
        "signal states:",
    ]
    for i, v in enumerate(sol.signal_vectors):
        _state_lines(f"message {i + 1} (score {fmt(sol.score_vector[i])})", v, report)
    _emit(args, report, {
        "task": "bayes",
        "grouping": labels,
        "gain": sol.gain,
        "cost": sol.original_cost,
        "scores": sol.score_vector.tolist(),
        "signal_vectors": [_vector_json(v) for v in sol.signal_vectors],
        "grouped_elements": [fileio.matrix_to_json(e) for e in sol.grouped_elements],
    })
    return EXIT_OK


def cmd_unambig(args):
    povm = fileio.load_povm(args.povm)
    priors = parse_priors(args.priors)
    sol = solve_unambiguous(povm, priors)
    labels = list(sol.label_strings())
    report = [
        f"grouping (outcome -> hypothesis, ? = inconclusive): {' '.join(labels)}",
        f"success probability: {fmt(sol.p_success)}",
        f"scores (descending): {', '.join(fmt(s) for s in sol.score_vector)}",
        "signal states:",
    ]
    for i, v in enumerate(sol.signal_vectors):
        tag = "never identified" if i in sol.never_identified else f"conclusive element {sol.slot_of[i] + 1}"
        _state_lines(f"message {i + 1} ({tag})", v, report)
    _emit(args, report, {
        "task": "unambiguous",
        "grouping": labels,
        "p_success": sol.p_success,
        "scores": sol.score_vector.tolist(),
        "element_of_message": [s + 1 for s in sol.slot_of],
        "never_identified": [i + 1 for i in sol.never_identified],
        "signal_vectors": [_vector_json(v) for v in sol.signal_vectors],
    })
    return EXIT_OK


def cmd_capacity(args):
    povm = fileio.load_povm(args.povm)
    group = fileio.load_group(args.group) if args.group else None
    res = capacity(povm, group=group, method=args.method, restarts=args.restarts, seed=args.seed)
    lower = subentropy_lower_bound(povm)
    report = [
        f"capacity: {fmt(res.bits)} bits",
        f"method: {res.method} ({'certified' if res.certified else 'lower bound, not certified'})",
        f"subentropy lower bound: {fmt(lower)} bits",
    ]
    try:
        report.append(f"rescaled-POVM Holevo quantity (diagnostic only): {fmt(holevo_of_rescaled_povm(povm))} bits")
    except ValidationError:
        pass
    report.append("optimal ensemble:")
    for p, v in zip(res.ensemble.priors, res.vectors):
        _state_lines(f"prior {fmt(p)}", v, report)
    _emit(args, report, {
        "task": "capacity",
        "bits": res.bits,
        "method": res.method,
        "certified": res.certified,
        "subentropy_lower_bound": lower,
        "priors": res.ensemble.priors.tolist(),
        "vectors": [_vector_json(v) for v in res.vectors],
    })
    return EXIT_OK


def cmd_regions(args):
    povm = fileio.load_povm(args.povm)
    cost = None if args.cost == "minerr" else fileio.load_cost(args.cost)
    rmap = map_regions(povm, args.resolution, cost=cost, ordered=args.ordered)
    with open(args.out, "w", encoding="utf-8") as fh:
        rmap.write_csv(fh)
    counts = {}
    for gid in rmap.grouping_ids:
        counts[gid] = counts.get(gid, 0) + 1
    report = [f"{len(rmap)} grid points written to {args.out}", "regions (block sizes by decreasing prior):"]
    report += [f"  {gid}: {n} points" for gid, n in sorted(counts.items())]
    for jn in rmap.junctions:
        ref = jn.refined()
        where = f"({fmt(jn.point[0])}, {fmt(jn.point[1])})"
        exact = f", refined ({fmt(ref[0])}, {fmt(ref[1])})" if ref else ""
        report.append(f"junction of {', '.join(jn.region_ids)} at {where}{exact}")
    sys.stdout.write("\n".join(report) + "\n")
    return EXIT_OK


def cmd_sic(args):
    sic = sic_qubit(args.epsilon)
    if args.emit == "povm":
        text = fileio.save_povm(args.out, sic.povm.elements)
    elif args.emit == "group":
        text = fileio.save_group(args.out, tetrahedral_group())
    else:
        p1, p2 = analytic_triple_point(sic.epsilon)
        text = fileio.write_json(args.out, {
            "epsilon": sic.epsilon,
            "capacity_bits": analytic_capacity(sic.epsilon),
            "min_error_uniform": {str(n): analytic_min_error(n, sic.epsilon) for n in range(2, 7)},
            "triple_point": [p1, p2, 1 - p1 - p2],
        })
    if args.out in (None, "-"):
        sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="qdet", description="Optimal signal states for a fixed quantum detector.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bayes", help="minimum Bayes cost with optimal outcome grouping")
    p.add_argument("--povm", required=True)
    p.add_argument("--priors", required=True, help="comma-separated, e.g. 0.5,0.5 or 1/3,1/3,1/3")
    p.add_argument("--cost", default="minerr", help="cost file or 'minerr' (default)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bayes)

    p = sub.add_parser("unambig", help="unambiguous identification with an inconclusive outcome")
    p.add_argument("--povm", required=True)
    p.add_argument("--priors", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_unambig)

    p = sub.add_parser("capacity", help="capacity of the measurement in bits")
    p.add_argument("--povm", required=True)
    p.add_argument("--group")
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("regions", help="optimal groupings over the three-message prior simplex")
    p.add_argument("--povm", required=True)
    p.add_argument("--resolution", type=float, required=True)
    p.add_argument("--ordered", action="store_true", help="keep only pi1 >= pi2 >= pi3")
    p.add_argument("--cost", default="minerr")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("sic", help="emit the noisy qubit SIC detector, its symmetry group or reference values")
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--emit", choices=("povm", "group", "analytics"), default="povm")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sic)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapExceededError as exc:
        print(f"qdet: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InfeasibleError as exc:
        print(f"qdet: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValidationError as exc:
        print(f"qdet: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"qdet: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
