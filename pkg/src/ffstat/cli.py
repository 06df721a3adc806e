"""Command-line front end.

Subcommands: lfunc, family, curve, moments, density, lemma61, eulersum,
primes.  Output goes to stdout or --out as CSV (schema-stable header per
command) or JSON.  Exact rationals serialize as "num/den" strings in CSV
and {"num": .., "den": ..} objects in JSON; floats use shortest
round-trip decimals.  Exit codes: 0 success, 1 configuration error,
2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from fractions import Fraction

from . import biquad, cache, eulerprod, ffpoly, lfunc, moments
from .errors import InvariantError

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 1, 2


class ConfigError(ValueError):
    """Bad flag or flag combination; message names the offending field."""


# ---------------------------------------------------------------------------
# Polynomial text format
# ---------------------------------------------------------------------------

_TERM_RE = re.compile(r"^([0-9]+)?(X(?:\^([0-9]+))?)?$")


def parse_poly(field, text):
    """Parse either ascending comma-separated coefficients ("1,0,1") or
    the symbolic form ("X^2+1").  Coefficients must already lie in
    0..q-1; out-of-range or malformed input raises ConfigError naming
    the offending position."""
    text = text.strip()
    if not text:
        raise ConfigError("poly: empty input")
    if "," in text or re.fullmatch(r"[0-9]+", text):
        coeffs = []
        for pos, tok in enumerate(text.split(",")):
            tok = tok.strip()
            if not re.fullmatch(r"[0-9]+", tok):
                raise ConfigError(f"poly: coefficient {pos} ({tok!r}) is not a base-10 integer")
            c = int(tok)
            if c >= field.q:
                raise ConfigError(f"poly: coefficient {pos} ({c}) out of range for q={field.q}")
            coeffs.append(c)
        return ffpoly.Poly(field, coeffs)
    coeffs = {}
    for pos, term in enumerate(text.split("+")):
        m = _TERM_RE.fullmatch(term.strip())
        if not m or (m.group(1) is None and m.group(2) is None):
            raise ConfigError(f"poly: term {pos} ({term!r}) is malformed")
        coef = int(m.group(1)) if m.group(1) else 1
        if m.group(2) is None:
            deg = 0
        elif m.group(3) is None:
            deg = 1
        else:
            deg = int(m.group(3))
        if coef >= field.q:
            raise ConfigError(f"poly: term {pos} coefficient {coef} out of range for q={field.q}")
        if deg in coeffs:
            raise ConfigError(f"poly: term {pos} repeats degree {deg}")
        coeffs[deg] = coef
    out = [0] * (max(coeffs) + 1)
    for deg, c in coeffs.items():
        out[deg] = c
    return ffpoly.Poly(field, out)


def poly_str(p):
    return str(p)


# ---------------------------------------------------------------------------
# Serialization helpers
# ---------------------------------------------------------------------------


def _csv_cell(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def _json_cell(v):
    if isinstance(v, Fraction):
        return {"num": v.numerator, "den": v.denominator}
    if isinstance(v, tuple):
        return list(v)
    return v


def emit(rows, header, fmt, out):
    """Single-writer serialization of a list of dict rows."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_csv_cell(row.get(col)) for col in header])
        text = buf.getvalue()
    else:
        text = json.dumps(
            [{k: _json_cell(v) for k, v in row.items()} for row in rows],
            indent=2,
        ) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _field_for(q):
    fac = ffpoly._factor_int(q)
    if len(fac) != 1:
        raise ConfigError(f"q: {q} is not a prime power")
    (p, e), = fac.items()
    if p == 2 or q < 3:
        raise ConfigError(f"q: {q} must be an odd prime power >= 3")
    return ffpoly.GF(p, e)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_lfunc(args):
    field = _field_for(args.q)
    D = parse_poly(field, args.modulus)
    chi = lfunc.QuadChar(D, lfunc.parse_sign(args.sign))
    raw, lstar, frob, dev = lfunc.l_data(chi, n_max=args.n_max)
    if args.check_rh and dev >= 1e-9:
        raise InvariantError(f"RH deviation {dev:.3e} exceeds 1e-9")
    row = {
        "modulus": poly_str(chi.modulus),
        "sign": args.sign,
        "raw_coeffs": ";".join(map(str, raw.coeffs)),
        "lambda": raw.lam,
        "delta": raw.delta,
        "lstar_coeffs": ";".join(map(str, lstar.coeffs)),
        "traces_t": ";".join(map(str, frob.t)),
        "rh_max_deviation": dev,
    }
    if args.format == "json":
        row["raw_coeffs"] = list(raw.coeffs)
        row["lstar_coeffs"] = list(lstar.coeffs)
        row["traces_t"] = list(frob.t)
    emit([row], list(row), args.format, args.out)


def _cmd_family(args):
    field = _field_for(args.q)
    cache.family_cached(field, args.genus, cache_dir=args.cache_dir)
    if args.count:
        size, ratio = biquad.family_size_ratio(field, args.genus, args.variant)
        emit(
            [{"q": args.q, "g": args.genus, "variant": args.variant,
              "size": size, "ratio": float(ratio)}],
            ["q", "g", "variant", "size", "ratio"], args.format, args.out,
        )
        return
    rows = [
        {"index": i, "f1": poly_str(t.f1), "f2": poly_str(t.f2), "f3": poly_str(t.f3)}
        for i, t in enumerate(biquad.enumerate_family(field, args.genus, args.variant))
    ]
    emit(rows, ["index", "f1", "f2", "f3"], args.format, args.out)


def _cmd_curve(args):
    field = _field_for(args.q)
    t = biquad.CurveTriple(
        parse_poly(field, args.f1), parse_poly(field, args.f2),
        parse_poly(field, args.f3),
        biquad.MONIC if all(parse_poly(field, s).is_monic()
                            for s in (args.f1, args.f2)) else biquad.FULL,
    )
    data = biquad.zeta_numerator(t, n_max=args.n_max)
    row = {
        "q": args.q, "genus": t.genus,
        "N": list(data.N[: args.n_max]), "T": list(data.T[: args.n_max]),
        "P_C": list(data.pc),
        "rh_deviation": biquad.pc_rh_deviation(data.pc, field.q),
    }
    if args.format == "csv":
        row["N"] = ";".join(map(str, row["N"]))
        row["T"] = ";".join(map(str, row["T"]))
        row["P_C"] = ";".join(map(str, row["P_C"]))
    emit([row], list(row), args.format, args.out)


MOMENTS_HEADER = [
    "q", "g", "n", "family_size", "avg_T_num", "avg_T_den", "avg_trace",
    "reference", "gap", "roots_term", "bilinear_term", "roots_bound",
    "nongen_bound",
]


def _cmd_moments(args):
    field = _field_for(args.q)
    cache.family_cached(field, args.genus, cache_dir=args.cache_dir)
    rows = []
    for n in range(1, args.n_max + 1):
        size = biquad.family_size(field, args.genus, args.variant)
        cost = size * (field.q ** n + 1)
        mode = args.mode
        if mode == "auto":
            mode = "sample" if (args.work_budget and cost > args.work_budget) else "exhaustive"
        rep = moments.average_trace(
            field, args.genus, n, args.variant, mode=mode,
            sample_size=args.sample_size, seed=args.seed, threads=args.threads,
        )
        row = {
            "q": args.q, "g": args.genus, "n": n,
            "family_size": rep.family_size,
            "avg_T_num": rep.avg_T.numerator,
            "avg_T_den": rep.avg_T.denominator,
            "avg_trace": rep.avg_trace,
            "reference": rep.reference,
            "gap": rep.gap,
            "roots_term": None, "bilinear_term": None,
            "roots_bound": 3 * (args.genus + 3) / field.q ** (n / 2),
            "nongen_bound": 3 * field.q ** (-n / 6),
        }
        if n % 2 == 0 and mode == "exhaustive":
            dec = moments.error_decomposition(field, args.genus, n, threads=args.threads)
            row["roots_term"] = dec.roots_term
            row["bilinear_term"] = dec.bilinear_term
        rows.append(row)
    emit(rows, MOMENTS_HEADER, args.format, args.out)


def _cmd_density(args):
    field = _field_for(args.q)
    if args.kernel != "fejer":
        raise ConfigError(f"kernel: unknown kernel {args.kernel!r}")
    if not 0 < args.alpha <= 1:
        raise ConfigError("alpha: must lie in (0, 1]")
    fhat = moments.fejer_kernel(args.alpha)
    rep = moments.one_level_density(
        field, args.genus, fhat, args.alpha, args.variant, threads=args.threads
    )
    row = {
        "q": rep.q, "g": rep.g, "alpha": rep.alpha, "kernel": args.kernel,
        "variant": rep.variant, "terms": list(rep.terms),
        "family_size": rep.family_size,
        "family_value": rep.family_value,
        "reference_value": rep.reference_value,
        "crosscheck_max_gap": rep.crosscheck_max_gap,
    }
    if args.format == "csv":
        row["terms"] = ";".join(map(str, rep.terms))
    emit([row], list(row), args.format, args.out)


def _cmd_lemma61(args):
    field = _field_for(args.q)
    P = parse_poly(field, args.prime)
    if not P.is_monic() or not ffpoly.is_irreducible(P):
        raise ConfigError("prime: must be monic irreducible")
    blocks = moments.c_blocks(P, args.M)
    rows = []
    for d in range(args.d_min, args.d_max + 1):
        sums = moments.nkk_sums_all(field, P, d)
        for (k1, k2), exact in sorted(sums.items()):
            c = moments.c_constant_kk(P, d, k1, k2, args.M, blocks)
            pred = float(c / 4 * field.q ** d)
            rows.append({
                "q": args.q, "P": poly_str(P), "d": d, "k1": k1, "k2": k2,
                "nkk": exact, "predicted": pred, "gap": exact - pred,
                "scaled_gap": abs(exact - pred) / field.q ** (0.6 * d),
            })
    emit(rows, ["q", "P", "d", "k1", "k2", "nkk", "predicted", "gap", "scaled_gap"],
         args.format, args.out)


def _cmd_eulersum(args):
    field = _field_for(args.q)
    rows = []
    kinds = eulerprod.KINDS if args.kind == "all" else (args.kind,)
    for kind in kinds:
        r = eulerprod.prime_sum(kind, field, args.n, args.M)
        rows.append({
            "q": args.q, "n": args.n, "M": args.M, "kind": kind,
            "sum_num": r.value.numerator, "sum_den": r.value.denominator,
            "reference_num": r.reference.numerator,
            "reference_den": r.reference.denominator,
            "scaled_gap": r.scaled_gap,
        })
    emit(rows, ["q", "n", "M", "kind", "sum_num", "sum_den",
                "reference_num", "reference_den", "scaled_gap"],
         args.format, args.out)


def _cmd_primes(args):
    field = _field_for(args.q)
    ps = cache.primes_cached(field, args.degree, cache_dir=args.cache_dir)
    if args.count:
        emit([{"q": args.q, "degree": args.degree, "count": len(ps)}],
             ["q", "degree", "count"], args.format, args.out)
    else:
        rows = [{"index": i, "prime": poly_str(p)} for i, p in enumerate(ps)]
        emit(rows, ["index", "prime"], args.format, args.out)


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse exits 2 on usage errors by default; config errors are 1
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _add_common(sp, *, genus=False, variant=False):
    sp.add_argument("--q", type=int, required=True, help="odd prime power >= 3")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", default=None, help="output path (default stdout)")
    sp.add_argument("--cache-dir", default=os.environ.get(cache.ENV_VAR),
                    help="cache directory (env FFSTAT_CACHE_DIR)")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--work-budget", type=int, default=None,
                    help="cost cap (members x points) before sampling kicks in")
    if genus:
        sp.add_argument("--genus", type=int, required=True)
    if variant:
        sp.add_argument("--variant", choices=(biquad.MONIC, biquad.FULL),
                        default=biquad.FULL)


def build_parser():
    ap = _Parser(prog="ffstat", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("lfunc", help="L-polynomial of a quadratic character")
    _add_common(sp)
    sp.add_argument("--modulus", required=True)
    sp.add_argument("--sign", default="plus")
    sp.add_argument("--n-max", type=int, default=8)
    sp.add_argument("--check-rh", action="store_true")
    sp.set_defaults(fn=_cmd_lfunc)

    sp = sub.add_parser("family", help="enumerate or count a curve family")
    _add_common(sp, genus=True, variant=True)
    sp.add_argument("--count", action="store_true")
    sp.set_defaults(fn=_cmd_family)

    sp = sub.add_parser("curve", help="point counts and zeta numerator of one curve")
    _add_common(sp)
    sp.add_argument("--f1", required=True)
    sp.add_argument("--f2", required=True)
    sp.add_argument("--f3", required=True)
    sp.add_argument("--n-max", type=int, default=4)
    sp.set_defaults(fn=_cmd_curve)

    sp = sub.add_parser("moments", help="family trace averages with error split")
    _add_common(sp, genus=True, variant=True)
    sp.add_argument("--n-max", type=int, required=True)
    sp.add_argument("--mode", choices=("exhaustive", "sample", "auto"),
                    default="exhaustive")
    sp.add_argument("--sample-size", type=int, default=1000)
    sp.set_defaults(fn=_cmd_moments)

    sp = sub.add_parser("density", help="one-level density vs matrix-integral reference")
    _add_common(sp, genus=True, variant=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--kernel", default="fejer")
    sp.set_defaults(fn=_cmd_density)

    sp = sub.add_parser("lemma61", help="fixed-prime parity sums vs residue constants")
    _add_common(sp)
    sp.add_argument("--prime", required=True)
    sp.add_argument("--d-min", type=int, default=0)
    sp.add_argument("--d-max", type=int, required=True)
    sp.add_argument("--M", type=int, default=8)
    sp.set_defaults(fn=_cmd_lemma61)

    sp = sub.add_parser("eulersum", help="truncated Euler products summed over primes")
    _add_common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--M", type=int, required=True)
    sp.add_argument("--kind", choices=eulerprod.KINDS + ("all",), default="all")
    sp.set_defaults(fn=_cmd_eulersum)

    sp = sub.add_parser("primes", help="monic prime polynomials of one degree")
    _add_common(sp)
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--count", action="store_true")
    sp.set_defaults(fn=_cmd_primes)

    return ap


def main(argv=None):
    if hasattr(sys, "set_int_max_str_digits"):
        # exact numerators/denominators can run to thousands of digits;
        # lift the int-to-str conversion cap so they serialize faithfully
        sys.set_int_max_str_digits(0)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        args.fn(args)
    except BrokenPipeError:
        # downstream consumer (head, etc.) closed the pipe; not an error
        try:
            sys.stdout.close()
        except OSError:
            pass
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
