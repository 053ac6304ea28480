"""Command-line front end.

Exit status is 0 on success, 1 for invalid arguments or malformed input and
2 when a budget or precision guarantee cannot be met.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import mpmath

from .arith import PrimePowerSet, factorize
from .errors import BudgetExceeded, PrecisionFailure
from .extremal import argmax_argmin, limit_m_infinity, monotonicity_report
from .gcd import GcdSystem, GcdTargetSpec, lambda_crt_box_check, lambda_global, lambda_ps
from .global_density import (
    format_sig, mu_global_prefix, table_csv, table_scaled_columns, table_zl, z_l, z_n, z_n_l,
)
from .local import (
    LocalDistribution, SnfPrefixSpec, enumerate_distribution, mu_crt, mu_distribution,
    mu_prefix_local, mu_ps_point,
)
from .sampler import SampleBox, parse_event, sample_lambda, sample_mu
from .snf import minors_gcd_profile, parse_matrix, snf_integer, snf_mod


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def _tol(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("tolerance must lie in (0, 1)")
    return v


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# --------------------------------------------------------------------------
# output


def _emit(doc, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(doc, indent=2) + "\n")
    elif fmt == "csv":
        rows = doc if isinstance(doc, list) else [doc]
        keys = list(rows[0].keys()) if rows else []
        w = csv.writer(out, lineterminator="\n")
        w.writerow(keys)
        for row in rows:
            w.writerow([json.dumps(row[k]) if isinstance(row[k], (list, dict)) else row[k] for k in keys])
    else:
        rows = doc if isinstance(doc, list) else [doc]
        for row in rows:
            out.write("  ".join(f"{k}={v}" for k, v in row.items()) + "\n")


def _distribution_rows(dist: LocalDistribution) -> list[dict]:
    return [{"a": ",".join(map(str, a)), "value": _frac(v)} for a, v in sorted(dist.values.items())]


def _emit_distribution(dist: LocalDistribution, fmt: str, out) -> None:
    if fmt == "json":
        doc = dist.to_json()
        doc["total"] = _frac(dist.total())
        _emit(doc, fmt, out)
    else:
        _emit(_distribution_rows(dist), fmt, out)


# --------------------------------------------------------------------------
# subcommands


def cmd_snf(args, out) -> None:
    M = parse_matrix(_read(args.matrix))
    if args.mod:
        doc = snf_mod(M, args.mod).to_json()
        doc["modulus"] = args.mod
    else:
        doc = snf_integer(M).to_json()
        if args.minors:
            doc["minor_gcds"] = list(minors_gcd_profile(M, args.budget).g)
    _emit(doc, args.format, out)


def _spec(args) -> SnfPrefixSpec:
    if args.n is None or args.m is None:
        raise UsageError("--prefix needs --n and --m")
    return SnfPrefixSpec(args.prefix, args.n, args.m)


def cmd_local_density(args, out) -> None:
    if args.input:
        dist = LocalDistribution.from_json(_read(args.input))
        if dist.total() != 1:
            raise UsageError(f"distribution sums to {dist.total()}, not 1")
        _emit_distribution(dist, args.format, out)
        return
    need = {"--p": args.p, "--s": args.s, "--n": args.n, "--m": args.m}
    missing = [k for k, v in need.items() if v is None]
    if args.modulus:
        missing = [k for k in missing if k not in ("--p", "--s")]
    if missing:
        raise UsageError(f"missing {', '.join(missing)}")
    if args.modulus:
        if args.prefix is None:
            raise UsageError("--modulus needs --prefix")
        ps = PrimePowerSet(factorize(args.modulus))
        _emit({"modulus": args.modulus, "prefix": list(args.prefix), "value": _frac(mu_crt(ps, _spec(args)))},
              args.format, out)
    elif args.all:
        _emit_distribution(mu_distribution(args.p, args.s, args.n, args.m), args.format, out)
    elif args.a is not None:
        v = mu_ps_point(args.p, args.s, args.n, args.m, args.a)
        _emit({"p": args.p, "s": args.s, "n": args.n, "m": args.m, "a": list(args.a), "value": _frac(v)},
              args.format, out)
    elif args.prefix is not None:
        v = mu_prefix_local(args.p, args.s, _spec(args))
        _emit({"p": args.p, "s": args.s, "n": args.n, "m": args.m, "prefix": list(args.prefix),
               "value": _frac(v)}, args.format, out)
    else:
        raise UsageError("choose one of --all, --a, --prefix or --in")


def cmd_enumerate(args, out) -> None:
    dist = enumerate_distribution(args.p, args.s, args.n, args.m, args.budget)
    if args.check:
        formula = mu_distribution(args.p, args.s, args.n, args.m)
        if formula.values != dist.values:
            raise UsageError("enumeration disagrees with the closed form")
    _emit_distribution(dist, args.format, out)


def cmd_global_density(args, out) -> None:
    if args.prefix is not None:
        res = mu_global_prefix(_spec(args), args.tol)
    elif args.cyclic is not None:
        res = z_n_l(args.cyclic, args.ell, args.tol) if args.ell is not None else z_n(args.cyclic, args.tol)
    elif args.ell is not None:
        res = z_l(args.ell, args.tol)
    else:
        raise UsageError("choose one of --prefix, --cyclic or --ell")
    doc = res.to_json()
    if res.warning:
        print(f"warning: {res.warning}", file=sys.stderr)
    _emit(doc, args.format, out)


def cmd_table_zl(args, out) -> None:
    rows = table_zl(args.lmax, args.tol)
    if args.format == "csv":
        out.write(table_csv(rows))
        return
    _emit([{"l": r.ell, "Z": format_sig(r.z.value), "one_minus_Z": format_sig(r.one_minus_z.value, sci=True),
            "scaled": format_sig(r.scaled.value), "log_column": format_sig(r.log_column.value)}
           for r in rows], args.format, out)


def cmd_figure_zl(args, out) -> None:
    rows = []
    for ell in range(1, args.lmax + 1):
        scaled, logc = table_scaled_columns(ell, args.tol)
        rows.append({"l": ell, "scaled": format_sig(scaled.value), "log_column": format_sig(logc.value)})
    _emit(rows, args.format, out)


def cmd_sample(args, out) -> None:
    box = SampleBox(args.k, args.trials, args.seed)
    if args.system:
        if args.y is None:
            raise UsageError("--system needs --y")
        sys_ = GcdSystem.from_json(_read(args.system))
        est = sample_lambda(sys_, box, GcdTargetSpec(args.y))
    else:
        if args.n is None or args.m is None or args.event is None:
            raise UsageError("sampling matrices needs --n, --m and --event")
        est = sample_mu(args.n, args.m, box, parse_event(args.event, args.n, args.m))
    _emit(est.to_json(), args.format, out)


def cmd_gcd_density(args, out) -> None:
    sys_ = GcdSystem.from_json(_read(args.system))
    spec = GcdTargetSpec(args.y)
    if args.modulus:
        ps = PrimePowerSet(factorize(args.modulus))
        if args.k is None:
            raise UsageError("--modulus needs --k")
        chk = lambda_crt_box_check(sys_, ps, spec, args.k, args.budget)
        doc = {key: (_frac(v) if isinstance(v, Fraction) else v) for key, v in chk.items()}
    elif args.p is not None:
        if args.s is None:
            raise UsageError("--p needs --s")
        doc = {"p": args.p, "s": args.s, "value": _frac(lambda_ps(sys_, args.p, args.s, spec, args.budget))}
    else:
        doc = lambda_global(sys_, spec, args.cutoff, args.budget).to_json()
    _emit(doc, args.format, out)


def cmd_extremal(args, out) -> None:
    if args.report:
        rep = monotonicity_report()
        failed = [r for r in rep if not r["ok"]]
        _emit({"checked": len(rep), "failed": failed}, args.format, out)
        return
    if args.b is not None:
        v = limit_m_infinity(args.p, len(args.b), args.n_prime, args.b, args.tol)
        _emit({"p": args.p, "n_prime": args.n_prime, "b": list(args.b),
               "limit": mpmath.nstr(v.value, 15), "abs_error": mpmath.nstr(v.abs_error, 3)}, args.format, out)
        return
    if args.m is None:
        raise UsageError("--m is required")
    e = argmax_argmin(args.p, args.s, args.m, args.n_prime, args.budget)
    _emit({"p": e.p, "s": e.s, "m": e.m, "n_prime": e.n_prime,
           "argmax": [list(b) for b in e.argmax], "max": _frac(e.max_value),
           "argmin": [list(b) for b in e.argmin], "min": _frac(e.min_value),
           "expected_argmax": [list(b) for b in e.expected_argmax], "expected_max": _frac(e.expected_max),
           "expected_argmin": [list(b) for b in e.expected_argmin], "expected_min": _frac(e.expected_min),
           "agrees": e.agrees}, args.format, out)


# --------------------------------------------------------------------------


def _add(sub, name: str, help: str, fmt: str = "json", tol: float = 1e-12) -> argparse.ArgumentParser:
    p = sub.add_parser(name, help=help)
    p.add_argument("--format", choices=("json", "csv", "text"), default=fmt)
    p.add_argument("--budget", type=_positive, default=10 ** 6)
    p.add_argument("--tol", type=_tol, default=tol)
    return p


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="snfdist", description="Densities of Smith normal forms and multi-gcds.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = _add(sub, "snf", "Smith normal form of an integer matrix")
    p.add_argument("--matrix", required=True, help="matrix file ('n m' + rows, or JSON); '-' for stdin")
    p.add_argument("--mod", type=_positive, help="compute over Z/qZ instead")
    p.add_argument("--minors", action="store_true", help="also report gcds of minors")
    p.set_defaults(func=cmd_snf)

    p = _add(sub, "local-density", "exact density modulo p^s")
    for flag in ("--p", "--s", "--n", "--m"):
        p.add_argument(flag, type=_positive)
    p.add_argument("--a", type=_ints, help="chain a_1,...,a_s")
    p.add_argument("--prefix", type=_ints, help="SNF prefix d_1,...,d_r")
    p.add_argument("--modulus", type=_positive, help="prefix density modulo a composite")
    p.add_argument("--all", action="store_true", help="the whole distribution")
    p.add_argument("--in", dest="input", help="validate and re-emit a distribution JSON")
    p.set_defaults(func=cmd_local_density)

    p = _add(sub, "enumerate", "brute-force distribution modulo p^s")
    for flag in ("--p", "--s", "--n", "--m"):
        p.add_argument(flag, type=_positive, required=True)
    p.add_argument("--check", action="store_true", help="compare with the closed form")
    p.set_defaults(func=cmd_enumerate)

    p = _add(sub, "global-density", "densities over the integers")
    p.add_argument("--prefix", type=_ints)
    p.add_argument("--n", type=_positive)
    p.add_argument("--m", type=_positive)
    p.add_argument("--cyclic", type=_positive, metavar="N", help="cokernel of an N x N matrix")
    p.add_argument("--ell", type=_positive, help="at most ell generators")
    p.set_defaults(func=cmd_global_density)

    p = _add(sub, "table-zl", "asymptotics of Z(l) as CSV", "csv", 1e-16)
    p.add_argument("--lmax", type=_positive, default=10)
    p.set_defaults(func=cmd_table_zl)

    p = _add(sub, "figure-zl", "plot data for the scaled deficit of Z(l)", "csv", 1e-16)
    p.add_argument("--lmax", type=_positive, default=20)
    p.set_defaults(func=cmd_figure_zl)

    p = _add(sub, "sample", "Monte Carlo estimate on a box")
    p.add_argument("--n", type=_positive)
    p.add_argument("--m", type=_positive)
    p.add_argument("--event", help="prefix:2,6 | full-rank | det:C | cokernel-gens:L")
    p.add_argument("--system", help="polynomial system JSON for gcd events")
    p.add_argument("--y", type=_ints, help="gcd target y_1,...,y_r")
    p.add_argument("--k", type=_positive, default=10 ** 6)
    p.add_argument("--trials", type=_positive, default=10 ** 5)
    p.add_argument("--seed", type=_nonneg, default=0)
    p.set_defaults(func=cmd_sample)

    p = _add(sub, "gcd-density", "density of a multi-gcd event")
    p.add_argument("--system", "--in", dest="system", required=True, help="polynomial system JSON")
    p.add_argument("--y", type=_ints, required=True)
    p.add_argument("--p", type=_positive)
    p.add_argument("--s", type=_positive)
    p.add_argument("--modulus", type=_positive, help="compare the CRT product with a box count")
    p.add_argument("--k", type=_nonneg)
    p.add_argument("--cutoff", type=_positive, default=60)
    p.set_defaults(func=cmd_gcd_density)

    p = _add(sub, "extremal", "extrema and monotonicity of point densities")
    p.add_argument("--p", type=_positive, default=2)
    p.add_argument("--s", type=_positive, default=1)
    p.add_argument("--m", type=_positive)
    p.add_argument("--n-prime", type=_nonneg, default=0)
    p.add_argument("--b", type=_ints, help="limit as m grows with these b fixed")
    p.add_argument("--report", action="store_true", help="run every monotonicity check")
    p.set_defaults(func=cmd_extremal)
    return ap


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        buf = io.StringIO()
        args.func(args, buf)
    except (BudgetExceeded, PrecisionFailure) as e:
        print(f"snfdist: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError, KeyError) as e:
        print(f"snfdist: {e}", file=sys.stderr)
        return 1
    out.write(buf.getvalue())
    return 0


if __name__ == "__main__":
    sys.exit(main())
