"""Command-line front end: bound curves, the summary table and self-checks.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dephasing as dp
from . import lossbounds as lb
from . import states as st
from . import verify
from .errors import DomainError, SingularityError

DEFAULT_LOSS_METHODS = ("analytic_sv", "averaged", "asymptotic", "weak_value", "before_loss", "lossless")
DEPHASING_METHODS = ("exact_bound", "asymptotic", "noiseless", "exact_qfi")
LOSS_COLUMNS = ("family", "N", "eta", "method", "F_upper", "delta_phi_lower")
DEPHASING_COLUMNS = ("family", "N", "strength_spread", "N_E", "method", "F_upper", "delta_phi_lower", "validity_radius")

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CurveRequest:
    family: str
    noise: str
    methods: tuple
    grid: tuple
    eta: float = 0.9
    strength_spread: float = 0.0
    n_env: float | None = None
    k_max: int = 30
    m: int = 1
    max_dim: int = 4096


def fmt(x) -> str:
    """Shortest round-trip decimal; non-finite values spelled inf / -inf / nan."""
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def n_grid(n_min: float, n_max: float, steps: int, scale: str) -> tuple:
    if steps < 1 or n_min <= 0 or n_max < n_min:
        raise UsageError("need 0 < n-min <= n-max and n-steps >= 1")
    if steps == 1:
        return (float(n_min),)
    if scale == "log":
        pts = np.geomspace(n_min, n_max, steps)
    else:
        pts = np.linspace(n_min, n_max, steps)
    return tuple(float(x) for x in pts)


# ---------------------------------------------------------------------------
# loss curves
# ---------------------------------------------------------------------------


def _loss_state(family: str, N: float, policy: st.TruncationPolicy):
    if family == "squeezed_vacuum":
        return st.squeezed_vacuum_state(N, policy), st.gaussian_saturating_moments(N)
    if family == "coherent":
        return st.coherent_state(N, policy), st.coherent_moments(N)
    if family == "fock":
        if N != int(N):
            raise DomainError(f"fock family needs integer N, got {N}")
        s = st.fock_basis_state(int(N))
        return s, st.moments_from_state(s)
    raise UsageError(f"unknown family {family!r}")


def loss_samples(req: CurveRequest) -> list[dict]:
    unknown = [m for m in req.methods if m not in lb.METHODS]
    if unknown:
        raise UsageError(f"unknown loss methods: {', '.join(unknown)}")
    if "analytic_sv" in req.methods and req.family != "squeezed_vacuum":
        raise UsageError("analytic_sv applies only to --family squeezed_vacuum")
    eta = req.eta
    policy = st.TruncationPolicy(max_dim=req.max_dim)
    rows = []
    for N in req.grid:
        state, mom = _loss_state(req.family, N, policy)
        for method in req.methods:
            if method == "linear_reference":
                sample = lb.BoundSample.from_delta_phi(method, lb.linear_loss_reference(N, eta), req.m)
            else:
                sample = lb.BoundSample.from_F(method, _loss_F(method, state, mom, N, req), req.m)
            rows.append(
                {"family": req.family, "N": N, "eta": eta, "method": method,
                 "F_upper": sample.F_upper, "delta_phi_lower": sample.delta_phi_lower}
            )
    return rows


def _loss_F(method, state, mom, N, req) -> float:
    eta = req.eta
    if method == "lossless":
        return lb.bound_lossless(mom)
    if method == "before_loss":
        return lb.bound_before_loss(mom, eta)
    if method == "variational_min":
        return lb.minimize_variational_qfi(state, lb.LossConfig(eta))[0]
    if method == "analytic_general":
        return lb.fmin_analytic_general(mom, eta)
    if method == "analytic_sv":
        return lb.fmin_analytic_sv(N, eta)
    if method == "asymptotic":
        return lb.fmin_asymptotic(N, eta)
    if method == "averaged":
        return lb.bound_averaged(state, lb.LossConfig(eta, None))
    if method == "weak_value":
        return lb.bound_weak_value(state, lb.LossConfig(eta, req.k_max))
    raise UsageError(f"unknown loss method {method!r}")


# ---------------------------------------------------------------------------
# dephasing curves
# ---------------------------------------------------------------------------


def dephasing_samples(req: CurveRequest) -> list[dict]:
    unknown = [m for m in req.methods if m not in DEPHASING_METHODS]
    if unknown:
        raise UsageError(f"unknown dephasing methods: {', '.join(unknown)}")
    family = {"squeezed_vacuum": "gaussian", "coherent": "coherent"}.get(req.family)
    if family is None:
        raise UsageError("dephasing curves support --family coherent or squeezed_vacuum")
    order = "second_order" if req.noise == "second_order_dephasing" else "linear"
    cfg = dp.DephasingConfig(order, req.strength_spread, req.n_env)
    spread = cfg.effective_spread
    rows = []
    for N in req.grid:
        mom = dp.family_moments(family, N)
        radius = dp.validity_radius(mom, spread) if order == "linear" else math.inf
        for method in req.methods:
            if method == "exact_bound":
                dphi = (dp.bound_linear_dephasing if order == "linear" else dp.bound_second_order_dephasing)(mom, spread)
            elif method == "asymptotic":
                dphi = dp.asymptotic_dephasing(N, spread, family) if order == "linear" else math.sqrt(2.0) * spread
            elif method == "noiseless":
                dphi = 1.0 / (2.0 * math.sqrt(mom.var_n2))
            else:  # exact_qfi
                if order != "linear":
                    raise UsageError("exact_qfi is available for linear dephasing only")
                from .oracle import ORACLE_MAX_DIM, qfi_exact_dephasing

                policy = st.TruncationPolicy(max_dim=ORACLE_MAX_DIM)
                build = st.squeezed_vacuum_state if family == "gaussian" else st.coherent_state
                F = qfi_exact_dephasing(build(N, policy), spread)
                dphi = lb.delta_phi_from_F(F)
            sample = lb.BoundSample.from_delta_phi(method, dphi, req.m)
            rows.append(
                {"family": req.family, "N": N, "strength_spread": req.strength_spread,
                 "N_E": 0.0 if req.n_env is None else req.n_env, "method": method,
                 "F_upper": sample.F_upper, "delta_phi_lower": sample.delta_phi_lower,
                 "validity_radius": radius}
            )
    return rows


# ---------------------------------------------------------------------------
# summary table
# ---------------------------------------------------------------------------


def summary_cells(eta: float, beta: float, gamma: float, N: float, N_E: float) -> dict:
    """Leading-order error floors for both schemes under each noise type."""
    if N <= 0:
        raise DomainError(f"N must be > 0, got {N}")
    env = N_E > 0
    return {
        ("photon loss", "linear"): (lb.linear_loss_reference(N, eta), None),
        ("photon loss", "second-order"): (lb.delta_phi_from_F(lb.fmin_asymptotic(N, eta)), None),
        ("linear phase diffusion", "linear"): (
            math.sqrt(2.0) * beta,
            beta / (math.sqrt(2.0) * math.sqrt(N_E)) if env else None,
        ),
        ("linear phase diffusion", "second-order"): (
            dp.asymptotic_dephasing(N, beta, "coherent"),
            dp.env_asymptotic_closed_form(N, N_E, beta, "linear") if env else None,
        ),
        ("second-order phase diffusion", "linear"): (None, None),
        ("second-order phase diffusion", "second-order"): (
            math.sqrt(2.0) * gamma,
            dp.env_asymptotic_closed_form(N, N_E, gamma, "second_order") if env else None,
        ),
    }


def render_summary(cells: dict, params: dict) -> str:
    head = ", ".join(f"{k}={fmt(v)}" for k, v in params.items())

    def cell(pair):
        plain, env = pair
        if plain is None:
            return "--"
        text = f"{plain:.6g}"
        if env is not None:
            text += f" [env {env:.6g}]"
        return text

    rows = ("photon loss", "linear phase diffusion", "second-order phase diffusion")
    width = max(len(r) for r in rows)
    out = [f"Error floors (delta phi) at {head}", ""]
    out.append(f"{'':{width}}  {'linear scheme':<28}  second-order scheme")
    for r in rows:
        out.append(f"{r:{width}}  {cell(cells[(r, 'linear')]):<28}  {cell(cells[(r, 'second-order')])}")
    out.append("")
    out.append("second-order scheme under linear phase diffusion: coherent probes only")
    out.append("[env ...]: environment squeezed to N_E excitations (large N_E form)")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def to_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) for c in columns])
    return buf.getvalue()


def to_json(rows: list[dict], columns) -> str:
    out = []
    for r in rows:
        rec = {}
        diverged = False
        for c in columns:
            v = r[c]
            if isinstance(v, float) and not math.isfinite(v):
                rec[c] = None
                diverged = True
            else:
                rec[c] = v
        rec["diverged"] = diverged
        out.append(rec)
    return json.dumps(out, indent=1) + "\n"


def gnuplot_script(csv_name: str, methods, method_col: int, y_col: int, title: str) -> str:
    lines = [
        f"# plots {csv_name}",
        "set datafile separator ','",
        "set logscale xy",
        "set xlabel 'N'",
        "set ylabel 'delta phi lower bound'",
        f"set title '{title}'",
        "set key outside",
    ]
    parts = [
        f"'{csv_name}' every ::1 using 2:(strcol({method_col}) eq '{m}' ? ${y_col} : 1/0) with linespoints title '{m}'"
        for m in methods
    ]
    lines.append("plot " + ", \\\n     ".join(parts))
    return "\n".join(lines) + "\n"


def emit(rows, columns, methods, fmt_name: str, out: str | None, title: str) -> None:
    if fmt_name == "json":
        text = to_json(rows, columns)
    else:
        text = to_csv(rows, columns)
    if fmt_name == "gnuplot":
        if out is None:
            raise UsageError("--format gnuplot needs --out (the CSV path)")
        path = Path(out)
        mcol = columns.index("method") + 1
        ycol = columns.index("delta_phi_lower") + 1
        script = gnuplot_script(path.name, methods, mcol, ycol, title)
        path.write_text(text, encoding="utf-8", newline="\n")
        path.with_suffix(".gp").write_text(script, encoding="utf-8", newline="\n")
        return
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _methods(text: str | None, default) -> tuple:
    if text is None or text == "all":
        return tuple(default)
    return tuple(m.strip() for m in text.split(",") if m.strip())


def _grid_args(p):
    p.add_argument("--n-min", type=float, default=1.0)
    p.add_argument("--n-max", type=float, default=20.0)
    p.add_argument("--n-steps", type=int, default=40)
    p.add_argument("--n-scale", choices=("log", "linear"), default="log")


def _output_args(p):
    p.add_argument("--format", choices=("csv", "json", "gnuplot"), default="csv")
    p.add_argument("--out", default=None)
    p.add_argument("--reps", type=int, default=1, help="measurement repetitions m")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kerrbounds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("loss-curve", help="photon-loss bounds versus N")
    p.add_argument("--family", choices=("squeezed_vacuum", "coherent", "fock"), default="squeezed_vacuum")
    p.add_argument("--eta", type=float, default=0.9)
    p.add_argument("--methods", default=None, help=f"comma list from {', '.join(lb.METHODS)}; default: {','.join(DEFAULT_LOSS_METHODS)}")
    p.add_argument("--kmax", type=int, default=30, help="loss-count cutoff for the weak-value bound")
    p.add_argument("--max-dim", type=int, default=4096)
    _grid_args(p)
    _output_args(p)

    p = sub.add_parser("dephasing-curve", help="phase-diffusion bounds versus N")
    p.add_argument("--family", choices=("coherent", "squeezed_vacuum"), default="coherent")
    strength = p.add_mutually_exclusive_group(required=True)
    strength.add_argument("--beta-delta", type=float, help="linear diffusion, product beta*Delta")
    strength.add_argument("--gamma-delta", type=float, help="second-order diffusion, product gamma*Delta")
    p.add_argument("--n-env", type=float, default=None, help="environment excitations N_E (Delta derived)")
    p.add_argument("--methods", default=None, help=f"comma list from {', '.join(DEPHASING_METHODS)}")
    _grid_args(p)
    _output_args(p)

    p = sub.add_parser("summary-table", help="leading-order error floors for both schemes")
    p.add_argument("--eta", type=float, default=0.9)
    p.add_argument("--beta-delta", type=float, default=1.0)
    p.add_argument("--gamma-delta", type=float, default=1.0)
    p.add_argument("--n", type=float, default=10.0, help="mean photon number N")
    p.add_argument("--n-env", type=float, default=0.0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("verify", help="run the built-in consistency checks")
    p.add_argument("--suite", choices=("all",) + verify.SUITES, default="all")
    return parser


def _run(args) -> int:
    if args.command == "loss-curve":
        req = CurveRequest(
            family=args.family, noise="loss", methods=_methods(args.methods, DEFAULT_LOSS_METHODS),
            grid=n_grid(args.n_min, args.n_max, args.n_steps, args.n_scale),
            eta=args.eta, k_max=args.kmax, m=args.reps, max_dim=args.max_dim,
        )
        if args.kmax < 0 or args.reps < 1:
            raise UsageError("--kmax must be >= 0 and --reps >= 1")
        lb.LossConfig(args.eta, args.kmax)
        rows = loss_samples(req)
        emit(rows, LOSS_COLUMNS, req.methods, args.format, args.out, f"{args.family}, eta = {args.eta}")
        return EXIT_OK

    if args.command == "dephasing-curve":
        second = args.gamma_delta is not None
        req = CurveRequest(
            family=args.family,
            noise="second_order_dephasing" if second else "linear_dephasing",
            methods=_methods(args.methods, DEPHASING_METHODS[:3]),
            grid=n_grid(args.n_min, args.n_max, args.n_steps, args.n_scale),
            strength_spread=args.gamma_delta if second else args.beta_delta,
            n_env=args.n_env, m=args.reps,
        )
        if args.reps < 1:
            raise UsageError("--reps must be >= 1")
        rows = dephasing_samples(req)
        emit(rows, DEPHASING_COLUMNS, req.methods, args.format, args.out, f"{args.family} dephasing")
        return EXIT_OK

    if args.command == "summary-table":
        params = {"eta": args.eta, "beta_delta": args.beta_delta, "gamma_delta": args.gamma_delta, "N": args.n, "N_E": args.n_env}
        if args.n_env < 0 or args.beta_delta < 0 or args.gamma_delta < 0:
            raise DomainError("strengths and N_E must be >= 0")
        text = render_summary(summary_cells(args.eta, args.beta_delta, args.gamma_delta, args.n, args.n_env), params)
        if args.out is None:
            sys.stdout.write(text)
        else:
            Path(args.out).write_text(text, encoding="utf-8", newline="\n")
        return EXIT_OK

    results = verify.run(args.suite)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_VERIFY


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except (UsageError, DomainError, SingularityError) as exc:
        print(f"kerrbounds: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"kerrbounds: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
