"""Command-line entry point.

Exit codes: 0 success, 2 invalid input, 3 certificate or invariant failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import _bits, apps, extensions, greedy, metrics, polytopes
from .errors import ApproxSubmodError, CertificateError, InputError, LpError
from .setfn import certify_flags, load_json

EXIT_OK, EXIT_INPUT, EXIT_CERT = 0, 2, 3
GLOBAL_DEFAULTS = {"seed": 0, "threads": 1, "out": None}


def _int_list(text: str) -> list[int]:
    text = text.strip()
    return [int(p) for p in text.split(",") if p.strip()] if text else []


def _float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _int_range(text: str) -> list[int]:
    if "-" in text:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return _int_list(text)


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, default=_default)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _clean(obj):
    """Replace infinities (not valid JSON) with strings."""
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


# -- subcommands ------------------------------------------------------------------------

def cmd_metrics(args) -> int:
    f = load_json(args.fn)
    which = args.metric or ["flags", "global", "marginal"]
    out = {}
    for m in which:
        if m == "flags":
            out["flags"] = vars(certify_flags(f))
        elif m == "global":
            out["global"] = metrics.global_distance(f).to_json()
        elif m == "marginal":
            out["marginal"] = metrics.marginal_violation(f).to_json()
        elif m == "pairwise":
            out["pairwise"] = metrics.pairwise_violation(f, args.l, args.k).to_json()
        elif m == "submod":
            out["submod"] = metrics.submod_violation(f, args.L, args.K).to_json()
        elif m == "index":
            out["index"] = metrics.submodularity_index(f, _int_list(args.set), args.K)
        elif m == "ratio":
            out["ratio"] = metrics.submodularity_ratio(f, _int_list(args.set), args.K)
    _emit(_clean(out), args.out)
    return EXIT_OK


def _sample_points(n: int, count: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).random((count, n))


def cmd_extensions(args) -> int:
    f = load_json(args.fn)
    if args.check == "sandwich":
        rep = extensions.sandwich_check(f, _sample_points(f.n, args.points, args.seed))
    elif args.check == "hessian":
        rep = extensions.hessian_bound_check(f, _sample_points(f.n, args.points, args.seed))
    else:
        rep = extensions.upconcavity_check(f, args.trials, args.seed)
    _emit(_clean(rep.to_json()), args.out)
    return EXIT_OK


def cmd_greedy(args) -> int:
    f = load_json(args.fn)
    if args.bounds == "none":
        tr = greedy.greedy_run(f, args.L)
        _emit({"chosen": list(tr.chosen), "values": list(tr.values)}, args.out)
        return EXIT_OK
    g = load_json(args.g) if args.g else None
    res = greedy.bound_suite(f, args.K, args.L, g=g, eps=args.eps)
    _emit(_clean(res.to_json()), args.out)
    return EXIT_OK


def cmd_cuts(args) -> int:
    inst = polytopes.load_instance(args.instance)
    if args.kind == "cover":
        if not isinstance(inst, polytopes.KnapsackInstance):
            raise InputError("cover cuts need a knapsack instance {n, values, b, c}")
        s = inst.f.mask(_int_list(args.set))
        perm = _int_list(args.perm) if args.perm is not None else \
            [e for e in range(1, inst.n + 1) if not s >> (e - 1) & 1]
        d = args.d_bound if args.d_bound is not None else metrics.marginal_violation(inst.f).value
        cut = polytopes.extended_cover_cut(inst.f, s, perm, inst.b, d)
    else:
        if not isinstance(inst, polytopes.EpigraphInstance):
            raise InputError("epigraph cuts need an instance {phi, c, sigma}")
        perm = _int_list(args.perm) if args.perm else list(range(1, inst.n + 1))
        gamma = extensions.gamma_of_perm(inst.g_sigma(), perm)
        cut = polytopes.epigraph_cut(inst, gamma, args.d_bound)
    _emit(cut.to_json(), args.out)
    return EXIT_OK if cut.certificate.valid else EXIT_CERT


def demo_ask(args) -> int:
    inst = apps.build_ask()
    d_bound = apps.ask_D_bound()
    cover = inst.f.mask([1, 2, 3, 4])
    cut = polytopes.extended_cover_cut(inst.f, cover, (5, 6), inst.b, d_bound)
    mask, obj = polytopes.knapsack_brute_force(inst)
    frac = polytopes.point_checks(inst, [1 / 30, 1, 1, 1, 0, 1], [cut])
    print(f"f({{1,2,3,4}}) = {inst.f.eval(cover):g}, b = {inst.b:g}, cover: "
          f"{polytopes.is_cover(inst.f, cover, inst.b)}, minimal: {polytopes.is_minimal_cover(inst.f, cover, inst.b)}")
    print(f"D bound p|w|_1^(p-1)|w|_inf = {d_bound:.6f}; exact D = {metrics.marginal_violation(inst.f).value:.6f}")
    ext = cut.details["extension"]
    print(f"cut: sum_{{s in {ext}}} x_s <= {cut.rhs:g}; guarantee {cut.guarantee}; "
          f"certificate valid {cut.certificate.valid} ({cut.certificate.checked_points} feasible points)")
    print(f"fractional point: F = {frac.F_value:.6f}, c.x = {frac.objective:.6f}, violates cut: {0 in frac.violated}")
    x = [int(b) for b in _bits.bit_matrix(inst.n)[mask]]
    print(f"brute-force optimum x = {x}, objective {obj:g}")
    return EXIT_OK if cut.certificate.valid else EXIT_CERT


def demo_cuflp(args) -> int:
    inst, h = apps.build_cuflp(args.t)
    f = apps.cuflp_base(inst)
    dprime = apps.cuflp_near_bound(inst)
    print(f"t = {args.t:g}: D' = {dprime:g}, Lovasz budget n D' = {apps.cuflp_lovasz_budget(inst):g}, "
          f"exact D = {metrics.marginal_violation(h).value:g}")
    eps = metrics.min_eps_for_pair(h, f)
    print(f"eps_H = {eps:.12g}")
    print(",".join(greedy.CSV_COLUMNS))
    for K in range(1, h.n + 1):
        res = greedy.bound_suite(h, K, K, g=f, eps=eps if 0 < eps < 1 else None)
        print(",".join(greedy.suite_row(res, args.t)))
    return EXIT_OK


def cmd_demo(args) -> int:
    return demo_ask(args) if args.which == "ask" else demo_cuflp(args)


def cmd_experiment(args) -> int:
    if args.which == "bounds":
        out = args.out or "bounds.csv"
        apps.experiment_bounds(_float_list(args.t), _int_range(args.K), out)
        print(f"wrote {out}")
    else:
        out = args.out or "multilinear"
        apps.experiment_multilinear(_float_list(args.bonus), args.grid, out)
        print(f"wrote {out}/")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    # global options are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="PRNG seed for sampled checks")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads (0 = all cores)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file (JSON/CSV) or directory")
    p = argparse.ArgumentParser(prog="approxsubmod", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="cmd", required=True)

    m = sub.add_parser("metrics", parents=[common], help="approximate-submodularity metrics of a JSON set function")
    m.add_argument("fn")
    m.add_argument("--metric", action="append",
                   choices=["flags", "global", "marginal", "pairwise", "submod", "index", "ratio"])
    m.add_argument("-l", type=int, default=0)
    m.add_argument("-k", type=int, default=0)
    m.add_argument("-L", type=int, default=0)
    m.add_argument("-K", type=int, default=1)
    m.add_argument("--set", default="", help="comma-separated elements")
    m.set_defaults(func=cmd_metrics)

    e = sub.add_parser("extensions", parents=[common], help="extension certificates")
    e.add_argument("fn")
    e.add_argument("--check", required=True, choices=["sandwich", "upconcave", "hessian"])
    e.add_argument("--points", type=int, default=100)
    e.add_argument("--trials", type=int, default=10_000)
    e.set_defaults(func=cmd_extensions)

    g = sub.add_parser("greedy", parents=[common], help="greedy run with performance bounds")
    g.add_argument("fn")
    g.add_argument("-K", type=int, required=True)
    g.add_argument("-L", type=int, required=True)
    g.add_argument("--bounds", choices=["all", "none"], default="all")
    g.add_argument("--g", default=None, help="submodular reference function (JSON) for the eps bound")
    g.add_argument("--eps", type=float, default=None)
    g.set_defaults(func=cmd_greedy)

    c = sub.add_parser("cuts", parents=[common], help="certified valid inequalities")
    c.add_argument("kind", choices=["cover", "epigraph"])
    c.add_argument("instance")
    c.add_argument("--set", default="", help="cover elements, comma-separated")
    c.add_argument("--perm", default=None, help="permutation, comma-separated")
    c.add_argument("--d-bound", type=float, default=None, help="upper bound on D (default: exact)")
    c.set_defaults(func=cmd_cuts)

    d = sub.add_parser("demo", parents=[common], help="built-in instances")
    d.add_argument("which", choices=["ask", "cuflp"])
    d.add_argument("--t", type=float, default=1.0)
    d.set_defaults(func=cmd_demo)

    x = sub.add_parser("experiment", parents=[common], help="write experiment data")
    x.add_argument("which", choices=["bounds", "multilinear"])
    x.add_argument("--t", default="0.25,0.5,1,2")
    x.add_argument("-K", default="1-7")
    x.add_argument("--bonus", default="0,4,32,100,800")
    x.add_argument("--grid", type=int, default=21)
    x.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, val in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, val)
    _bits.set_threads(args.threads)
    try:
        return args.func(args)
    except CertificateError as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return EXIT_CERT
    except LpError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_CERT
    except (InputError, ApproxSubmodError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
