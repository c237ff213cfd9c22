"""Command-line front end.

Every subcommand writes one artifact (JSON or CSV) to ``--out`` or stdout.
Numbers carry 12 significant digits and the payload holds no timing data,
so identical inputs give byte-identical output. Wall time goes to the
optional ``--meta`` file.

Exit codes: 0 success, 1 I/O failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .dynamics import (
    amplitude_series,
    amplitude_trace,
    diagonalize,
    format_number,
    series_to_csv,
    transition_amplitudes,
)
from .entanglement import Encoding, four_term_decomposition
from .errors import SpinbusError
from .graph import graph_to_dict, load_graph
from .hamiltonian import build_single_excitation
from .optimizer import Budgets, flux_transfer_search, optimize_over_time, plan_targeting
from .symmetry import SymmetryClass, classify, find_involutions, predicted_cmax

__all__ = ["main", "build_parser", "round_payload", "dumps_report"]


def round_payload(obj):
    """Round every float in a JSON-like structure to 12 significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            raise ValueError(f"non-finite number {obj!r} in report")
        return float(format_number(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [round_payload(obj.real), round_payload(obj.imag)]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): round_payload(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [round_payload(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_report(payload) -> str:
    return json.dumps(round_payload(payload), indent=2, sort_keys=True) + "\n"


def _pair(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a pair like 0:1, got {text!r}") from None


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _time_grid(args) -> np.ndarray:
    if args.t_max <= 0 or args.steps < 1:
        raise SpinbusError("--t-max must be positive and --steps at least 1")
    return np.linspace(0.0, args.t_max, args.steps + 1)


def _budgets(args) -> Budgets:
    b = Budgets(args.flux_points, args.time_points, args.horizon, args.refine_passes, args.refine_points)
    if b.flux_points < 1 or b.time_points < 2 or b.horizon <= 0 or b.refine_points < 2:
        raise SpinbusError("budgets need flux-points >= 1, time-points >= 2, horizon > 0, refine-points >= 2")
    return b


# ---------------------------------------------------------------------------
# Subcommands; each returns the artifact text

def cmd_amplitudes(args):
    g = load_graph(args.graph)
    p = diagonalize(build_single_excitation(g))
    rows = amplitude_series(p, _time_grid(args), args.pairs)
    if args.format == "csv":
        return series_to_csv(rows)
    return dumps_report({
        "command": "amplitudes",
        "rows": [{"t": r.t, "i": r.i, "j": r.j, "f": [r.f.real, r.f.imag], "abs2": r.abs2} for r in rows],
    })


def cmd_simulate(args):
    g = load_graph(args.graph)
    nu = args.mu if args.nu is None else args.nu
    for name, site in [("mu", args.mu), ("nu", nu)] + [("pair site", s) for pair in args.pairs for s in pair]:
        if not 0 <= site < g.n_sites:
            raise SpinbusError(f"{name} {site} is not a site of a {g.n_sites}-site graph")
    e = Encoding(args.mu, nu, args.alpha, args.beta)
    p = diagonalize(build_single_excitation(g))
    times = _time_grid(args)
    records = []
    for m, n in args.pairs:
        if m == n:
            raise SpinbusError(f"target pair {m}:{n} needs two different sites")
        a = e.alpha * amplitude_trace(p, m, e.mu, times) + e.beta * amplitude_trace(p, m, e.nu, times)
        b = e.alpha * amplitude_trace(p, n, e.mu, times) + e.beta * amplitude_trace(p, n, e.nu, times)
        records.append((m, n, a, b, 2.0 * np.abs(a) * np.abs(b)))
    if args.format == "csv":
        lines = ["t,m,n,re_A,im_A,re_B,im_B,C"]
        for k, t in enumerate(times):
            for m, n, a, b, c in records:
                vals = [t, a[k].real, a[k].imag, b[k].real, b[k].imag, c[k]]
                f = [format_number(v) for v in vals]
                lines.append(f"{f[0]},{m},{n},{f[1]},{f[2]},{f[3]},{f[4]},{f[5]}")
        return "\n".join(lines) + "\n"
    return dumps_report({
        "command": "simulate",
        "encoding": {"mu": e.mu, "nu": e.nu, "alpha": e.alpha, "beta": e.beta},
        "series": [{"m": m, "n": n, "t": times, "C": c, "max_C": float(c.max()),
                    "t_max_C": float(times[int(np.argmax(c))])} for m, n, _, _, c in records],
    })


def cmd_optimize(args):
    g = load_graph(args.graph)
    p = diagonalize(build_single_excitation(g))
    best = optimize_over_time(p, args.mu, args.nu, args.m, args.n, args.horizon, args.steps)
    f = transition_amplitudes(p, best.t)
    terms = four_term_decomposition(f, best.encoding(args.mu, args.nu), args.m, args.n)
    cls = classify(g, args.mu, args.nu, args.m, args.n)
    return dumps_report({
        "command": "optimize",
        "inputs": {"graph": graph_to_dict(g), "mu": args.mu, "nu": args.nu, "m": args.m, "n": args.n},
        "budgets": {"horizon": args.horizon, "steps": args.steps},
        "result": best.to_dict(),
        "achieved_C": best.C,
        "four_terms": {"terms": list(terms.terms), "magnitudes": list(terms.magnitudes)},
        "classification": cls.to_dict(),
    })


def cmd_scan_flux(args):
    budgets = _budgets(args)
    res = flux_transfer_search(args.n, args.coupling, args.source, args.target, budgets)
    return dumps_report({
        "command": "scan-flux",
        "inputs": {"n": args.n, "coupling": args.coupling, "source": args.source, "target": args.target},
        "budgets": budgets.to_dict(),
        "result": res.to_dict(),
    })


def cmd_plan(args):
    budgets = _budgets(args)
    plan = plan_targeting(args.n, args.coupling, args.mu, args.m, args.n_site, budgets, args.keep_flux)
    return dumps_report({
        "command": "plan",
        "inputs": {"n": args.n, "coupling": args.coupling, "mu": args.mu,
                   "target": [args.m, args.n_site], "keep_flux": args.keep_flux},
        "budgets": budgets.to_dict(),
        "result": plan.to_dict(),
    })


def cmd_symmetry(args):
    g = load_graph(args.graph)
    invs = find_involutions(g)
    report = {
        "command": "symmetry",
        "involutions": [inv.to_dict() for inv in invs if not inv.is_identity],
    }
    if args.mu is not None and args.m is not None and args.n is not None:
        cls = classify(g, args.mu, args.nu, args.m, args.n, invs)
        report["classification"] = cls.to_dict()
        if cls.cls is not SymmetryClass.NONE:
            if args.horizon is None:
                raise SpinbusError("--horizon is required to predict the optimum")
            p = diagonalize(build_single_excitation(g))
            times = np.linspace(0.0, args.horizon, args.steps)
            amp = np.abs(amplitude_trace(p, args.m, args.mu, times))
            t_star = float(times[int(np.argmax(amp))])
            pred = predicted_cmax(cls, p, args.mu, args.m, t_star, args.nu)
            report["prediction"] = {"t_star": t_star, "predicted_C_max": pred.value,
                                    "amplitude": pred.amplitude,
                                    "cross_terms": None if pred.cross_terms is None else list(pred.cross_terms)}
    return dumps_report(report)


# ---------------------------------------------------------------------------

def _add_budget_flags(p):
    d = Budgets()
    p.add_argument("--coupling", type=float, default=1.0, help="ring coupling J")
    p.add_argument("--flux-points", type=int, default=d.flux_points)
    p.add_argument("--time-points", type=int, default=d.time_points)
    p.add_argument("--horizon", type=float, default=d.horizon, help="time horizon in units of 1/J")
    p.add_argument("--refine-passes", type=int, default=d.refine_passes)
    p.add_argument("--refine-points", type=int, default=d.refine_points)


def _add_output_flags(p, formats=("json",)):
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--meta", help="write wall-time metadata JSON here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinbus", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("amplitudes", help="transition amplitude traces f_ij(t)")
    p.add_argument("--graph", required=True)
    p.add_argument("--pairs", type=_pair, nargs="+", required=True, help="i:j pairs for f_ij")
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True, help="number of intervals on [0, t-max]")
    _add_output_flags(p, ("csv", "json"))
    p.set_defaults(func=cmd_amplitudes)

    p = sub.add_parser("simulate", help="pair concurrence traces for an encoding")
    p.add_argument("--graph", required=True)
    p.add_argument("--mu", type=int, required=True)
    p.add_argument("--nu", type=int)
    p.add_argument("--alpha", type=_complex, default=1.0)
    p.add_argument("--beta", type=_complex, default=0.0)
    p.add_argument("--pairs", type=_pair, nargs="+", required=True, help="m:n target pairs")
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    _add_output_flags(p, ("csv", "json"))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="best encoding and time for a target pair")
    p.add_argument("--graph", required=True)
    for name in ("mu", "nu", "m", "n"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--steps", type=int, default=2001)
    _add_output_flags(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("scan-flux", help="flux and time for excitation transfer on a ring")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--target", type=int, required=True)
    _add_budget_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_scan_flux)

    p = sub.add_parser("plan", help="fixed-site targeting plan on a ring")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mu", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n-site", type=int, required=True)
    p.add_argument("--keep-flux", action="store_true", help="leave the stage-1 flux on in stage 2")
    _add_budget_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("symmetry", help="mirror involutions and class I/II classification")
    p.add_argument("--graph", required=True)
    for name in ("mu", "nu", "m", "n"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--horizon", type=float)
    p.add_argument("--steps", type=int, default=2001)
    _add_output_flags(p)
    p.set_defaults(func=cmd_symmetry)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        text = args.func(args)
    except OSError as exc:
        print(f"spinbus: {exc}", file=sys.stderr)
        return 1
    except (SpinbusError, ValueError) as exc:
        print(f"spinbus: invalid input: {exc}", file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - start
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if args.meta:
            with open(args.meta, "w", encoding="utf-8") as fh:
                json.dump({"command": args.command, "wall_time_s": elapsed}, fh)
                fh.write("\n")
    except OSError as exc:
        print(f"spinbus: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
