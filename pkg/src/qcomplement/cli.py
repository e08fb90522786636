"""Command-line front end.

Subcommands::

    sweep         grid of points to CSV
    verify        run every audit and print a report
    discriminate  Bob's optimal guess at one point
    eavesdrop     simulate the CHSH monitoring protocol
    povm          print a measurement family member

Exit codes: 0 all checks pass, 1 a violation was found, 2 usage or
configuration error. Every subcommand accepts ``--config FILE`` with
``key = value`` lines (``#`` starts a comment); keys are option names and
command-line flags override file values.
"""
from __future__ import annotations

import argparse
import math
import sys
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import complementarity as comp
from .discrimination import DiscriminationProblem, helstrom_bound, solve
from .eavesdrop import ProtocolConfig, run_protocol
from .linalg import trace_norm
from .measurement import (
    PovmParams,
    apply_measurement,
    build_povm,
    disturbance,
    pointer_model,
    quality,
)
from .states import PureState

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

CSV_COLUMNS = (
    "a", "b", "lambda", "phi", "pi0", "pi1", "E0", "E1", "Ebar", "D",
    "G0", "G1", "Gbar", "margin_ED", "margin_EG", "E_loss",
)


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """17 significant digits so every binary64 value round-trips."""
    return format(float(x), ".17g")


# ----------------------------------------------------------------------------
# config files and ranges
# ----------------------------------------------------------------------------

def read_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    out = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{no}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise UsageError(f"{path}:{no}: empty key")
        out[key.replace("-", "_")] = value
    return out


class AxisRange(NamedTuple):
    lo: float
    hi: float
    count: int
    spacing: str = "linear"

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.lo])
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


def parse_range(text: str) -> AxisRange:
    """``value`` or ``min:max:count[:linear|log]``."""
    parts = str(text).split(":")
    try:
        if len(parts) == 1:
            v = float(parts[0])
            return AxisRange(v, v, 1)
        if len(parts) not in (3, 4):
            raise ValueError
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        spacing = parts[3] if len(parts) == 4 else "linear"
    except ValueError:
        raise UsageError(f"bad range {text!r}; use VALUE or MIN:MAX:COUNT[:linear|log]") from None
    if count < 1:
        raise UsageError(f"range {text!r} has count {count}; need at least 1")
    if spacing not in ("linear", "log"):
        raise UsageError(f"unknown spacing {spacing!r}")
    if spacing == "log" and (lo <= 0 or hi <= 0):
        raise UsageError("log spacing needs positive endpoints")
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise UsageError(f"range {text!r} is empty or not finite")
    return AxisRange(lo, hi, count, spacing)


class SweepSpec(NamedTuple):
    a: AxisRange
    b: AxisRange
    lam: AxisRange
    phi: AxisRange
    output: str
    use_theta: bool = False

    def axes(self):
        a, b, lam, phi = (r.values() for r in (self.a, self.b, self.lam, self.phi))
        if self.use_theta:
            if b.min() < 0 or b.max() > math.pi / 4 + 1e-12:
                raise UsageError("theta must lie in [0, pi/4]")
            b = np.minimum(np.sin(np.clip(b, 0.0, math.pi / 4)) ** 2, 0.5)
        try:
            return comp.validate_grid(comp.Grid(a, b, lam, phi))
        except ValueError as exc:
            raise UsageError(str(exc)) from None


def _params(lam, theta=None, phi=0.0, b=None) -> PovmParams:
    try:
        if b is not None:
            return PovmParams(float(lam), float(b), float(phi))
        return PovmParams.from_theta(float(lam), float(theta or 0.0), float(phi))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------

def cmd_sweep(args, out) -> int:
    spec = SweepSpec(
        parse_range(args.a), parse_range(args.theta if args.theta is not None else args.b),
        parse_range(args.lam), parse_range(args.phi), args.output, args.theta is not None,
    )
    grid = spec.axes()
    mesh = np.meshgrid(*grid, indexing="ij")
    ev = comp.evaluate_batch(*(m.ravel() for m in mesh))
    cols = [ev.a, ev.b, ev.lam, ev.phi, ev.pi0, ev.pi1, ev.e0, ev.e1, ev.e_bar, ev.d,
            ev.g0, ev.g1, ev.g_bar, ev.margin_ed, ev.margin_eg, ev.e_loss]
    lines = [",".join(CSV_COLUMNS)]
    for i in range(len(ev)):
        lines.append(",".join(fmt(c[i]) for c in cols))
    text = "\n".join(lines) + "\n"
    if spec.output == "-":
        out.write(text)
    else:
        try:
            with open(spec.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {spec.output}: {exc}") from None
    bad = (ev.margin_ed < -comp.SLACK) | (ev.margin_eg < -comp.SLACK)
    if args.verbose:
        print(f"# {len(ev)} points, min margin_ED={fmt(ev.margin_ed.min())}, "
              f"min margin_EG={fmt(ev.margin_eg.min())}", file=sys.stderr)
    if bad.any():
        for i in np.flatnonzero(bad)[:20]:
            print(f"violation at a={fmt(ev.a[i])} b={fmt(ev.b[i])} lambda={fmt(ev.lam[i])} phi={fmt(ev.phi[i])}",
                  file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_verify(args, out) -> int:
    if args.n_random < 0 or args.mixed_samples < 1:
        raise UsageError("sample counts must be non-negative (mixed samples at least 1)")
    reports = [
        comp.theorem_sweep(n_random=args.n_random, seed=args.seed, inject_bug=args.inject_bug),
        comp.h_hat_audit(),
        comp.proof_identity_audit(),
        comp.mixed_audit(args.mixed_samples, seed=args.seed),
    ]
    out.write(f"verify seed={args.seed} random={args.n_random} mixed={args.mixed_samples}\n")
    for rep in reports:
        out.write(rep.render() + "\n")
    ok = all(r.passed for r in reports)
    out.write(f"overall: {'PASS' if ok else 'FAIL'}\n")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_discriminate(args, out) -> int:
    a = float(args.a)
    if not 0.0 <= a <= 0.5:
        raise UsageError(f"a must lie in [0, 1/2], got {a}")
    params = _params(args.lam, b=args.b, phi=args.phi)
    ens = apply_measurement(PureState.canonical(a), build_povm(params))
    sol = solve(DiscriminationProblem.from_ensemble(ens))
    m = lambda x: "[" + "; ".join(" ".join(f"{complex(v).real:.12g}{complex(v).imag:+.12g}j" for v in row) for row in x) + "]"
    tn = trace_norm(sol.t_matrix)
    lines = [
        f"a={fmt(a)} b={fmt(params.skew)} lambda={fmt(params.strength)} phi={fmt(params.phase)}",
        f"priors: pi0={fmt(ens.probs[0])} pi1={fmt(ens.probs[1])}",
        f"T = {m(sol.t_matrix)}",
        f"eigenvalues: {fmt(sol.eigenvalues[0])} {fmt(sol.eigenvalues[1])}",
        f"Pi0 = {m(sol.pi0)}",
        f"Pi1 = {m(sol.pi1)}",
        f"P(e|0)={fmt(sol.err_given0)} P(e|1)={fmt(sol.err_given1)}",
        f"G0={fmt(sol.gain0)} G1={fmt(sol.gain1)} Gbar={fmt(sol.avg_gain)}",
        f"trace norm of T={fmt(tn)} |Gbar - ||T|||={fmt(abs(sol.avg_gain - tn))}",
        f"Helstrom error={fmt(helstrom_bound(sol.t_matrix))}",
    ]
    # guessing the likelier outcome alone never beats the optimum
    prior_err = min(ens.probs)
    ok = sol.avg_error <= prior_err + 1e-12 and abs(sol.avg_gain - tn) <= 1e-10
    lines.append(f"prior-only error={fmt(prior_err)} optimum <= prior-only: {'yes' if sol.avg_error <= prior_err + 1e-12 else 'NO'}")
    out.write("\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_eavesdrop(args, out) -> int:
    try:
        params = PovmParams.from_theta(float(args.lambda_e), float(args.theta_e), float(args.phi_e))
        cfg = ProtocolConfig(
            n_pairs=int(args.pairs),
            sacrifice_fraction=float(args.sacrifice),
            eve_present=bool(args.eve),
            intercept_fraction=float(args.eta),
            eve_params=params,
            chsh_threshold=float(args.threshold),
            rng_seed=int(args.seed),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = run_protocol(cfg)
    out.write(rep.render() + "\n")
    return EXIT_OK if rep.bound_holds else EXIT_VIOLATION


def cmd_povm(args, out) -> int:
    params = _params(args.lam, theta=args.theta, phi=args.phi)
    pair = build_povm(params)
    ptr = pointer_model(params.strength)
    m = lambda x: "\n".join("  " + "  ".join(f"{complex(v).real:+.15f}{complex(v).imag:+.15f}j" for v in row) for row in x)
    out.write(
        f"lambda={fmt(params.strength)} theta={fmt(params.theta)} phi={fmt(params.phase)} b={fmt(params.skew)}\n"
        f"m0 =\n{m(pair.m0)}\nm1 =\n{m(pair.m1)}\n"
        f"completeness residual={pair.completeness_residual():.3e}\n"
        f"pointer angle theta_Z={fmt(ptr.pointer_angle)}\n"
        f"D={fmt(disturbance(params.strength))} F={fmt(quality(params.strength))}\n"
        f"sin(theta_Z) = Lambda/sqrt(n) = {fmt(math.sin(ptr.pointer_angle))} (not the quality factor; F = sin(2 theta_Z))\n"
    )
    return EXIT_OK


# ----------------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------------

def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="qcomplement", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", parents=[common], help="grid of points to CSV")
    s.add_argument("--a", default="0:0.5:11")
    s.add_argument("--b", default="0")
    s.add_argument("--theta", default=None, help="axis angle range instead of --b")
    s.add_argument("--lambda", dest="lam", default="1")
    s.add_argument("--phi", default="0")
    s.add_argument("--output", "-o", default="-")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", parents=[common], help="run every audit")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--n-random", type=int, default=100_000)
    v.add_argument("--mixed-samples", type=int, default=1000)
    v.add_argument("--inject-bug", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("discriminate", parents=[common], help="optimal guess at one point")
    d.add_argument("--a", type=float, default=0.5)
    d.add_argument("--b", type=float, default=0.0)
    d.add_argument("--lambda", dest="lam", type=float, default=1.0)
    d.add_argument("--phi", type=float, default=0.0)
    d.set_defaults(func=cmd_discriminate)

    e = sub.add_parser("eavesdrop", parents=[common], help="simulate CHSH monitoring")
    grp = e.add_mutually_exclusive_group()
    grp.add_argument("--eve", dest="eve", action="store_true", default=None)
    grp.add_argument("--no-eve", dest="eve", action="store_false")
    e.add_argument("--lambda-e", type=float, default=0.0)
    e.add_argument("--theta-e", type=float, default=0.0)
    e.add_argument("--phi-e", type=float, default=0.0)
    e.add_argument("--eta", type=float, default=1.0)
    e.add_argument("--pairs", type=int, default=10_000)
    e.add_argument("--sacrifice", type=float, default=1.0)
    e.add_argument("--threshold", type=float, default=2.5)
    e.add_argument("--seed", type=int, default=0)
    e.set_defaults(func=cmd_eavesdrop)

    m = sub.add_parser("povm", parents=[common], help="print a family member")
    m.add_argument("--lambda", dest="lam", type=float, default=1.0)
    m.add_argument("--theta", type=float, default=0.0)
    m.add_argument("--phi", type=float, default=0.0)
    m.set_defaults(func=cmd_povm)
    return p


_ALIASES = {"lambda": "lam"}


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    values = read_config(args.config)
    explicit = parser.parse_args(argv)  # flags as given
    defaults = vars(parser.parse_args([args.command]))
    for key, raw in values.items():
        dest = _ALIASES.get(key, key)
        if dest in ("config", "command", "func") or dest not in defaults:
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        if getattr(explicit, dest) != defaults[dest]:
            continue  # flag given on the command line wins
        current = defaults[dest]
        try:
            if dest == "eve" or isinstance(current, bool):
                value = _bool(raw)
            elif isinstance(current, int):
                value = int(raw)
            elif isinstance(current, float):
                value = float(raw)
            else:
                value = raw
        except ValueError:
            raise UsageError(f"bad value for {key}: {raw!r}") from None
        setattr(args, dest, value)
    return args


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
        if getattr(args, "command", None) == "eavesdrop" and args.eve is None:
            args.eve = False
        return args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
