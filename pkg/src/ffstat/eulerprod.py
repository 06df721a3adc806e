"""Truncated Euler products of generic local factors 1 + delta(u; Q).

A local-factor family is described by its leading character part
delta(u;Q) = (sum_i c_i chi_i(Q)) u^deg(Q) + O(|u|^(1+eta) deg(Q)), with
chi_i(Q) = eps_i^deg(Q) * (Q / D_i).  The three concrete families are the
per-prime factors

    delta_{P,+-}(u;Q) = 2 chi_P^{+-}(Q) u^d - (1 + 2 chi_P^{+-}(Q)) u^{2d}
    delta_{P,0}(u;Q)  = (chi_P^+ + chi_P^-)(Q) u^d
                        - (1 + chi_P^+(Q) + chi_P^-(Q)) u^{2d}

whose full products equal L(u,chi_P^+-)^2 H_{P,+-}(u), resp.
L(u,chi_P^+) L(u,chi_P^-) H_{P,0}(u).

All products are exact rationals (evaluation points are rational, every
local numerator an integer over a power of q); numerators multiply in a
balanced tree so catalog-scale truncations stay cheap.  Sums of the
truncated products over primes of fixed degree approach
pi_q(n)/zeta_q(2), and the module reports the three error scales of that
approximation alongside the exact value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import ffpoly
from . import lfunc
from ._tables import poly_tables

KINDS = ("plus", "minus", "zero")


def _prod(vals):
    """Balanced integer product (keeps big-int multiplies near-square)."""
    vals = list(vals)
    if not vals:
        return 1
    while len(vals) > 1:
        nxt = [a * b for a, b in zip(vals[0::2], vals[1::2])]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def prod_fractions(fracs):
    fracs = list(fracs)
    return Fraction(_prod(f.numerator for f in fracs), _prod(f.denominator for f in fracs))


@dataclass(frozen=True)
class LocalFactorSpec:
    """A family of local factors over the monic primes of one F_q[X].

    chars lists (c_i, eps_i, D_i) for the u^deg(Q) coefficient
    sum_i c_i eps_i^deg(Q) (Q/D_i); exact_factor(Q, u) returns the full
    1 + delta(u;Q) as a Fraction; eta bounds the remainder exponent.
    """

    field: ffpoly.FiniteField
    chars: tuple
    exact_factor: Callable
    eta: Fraction
    label: str = ""

    def main_term(self, Q, u):
        d = int(Q.degree)
        total = Fraction(0)
        for c, eps, D in self.chars:
            chi = ffpoly.jacobi_symbol(Q, D)
            if eps == -1 and d % 2 == 1:
                chi = -chi
            total += Fraction(c) * chi
        return total * u ** d

    def remainder_scale(self, Q, u):
        """|delta - main| / |u|^((1+eta) deg Q) as a float (the implied
        constant of the remainder bound at this Q and u)."""
        d = int(Q.degree)
        rem = self.exact_factor(Q, u) - 1 - self.main_term(Q, u)
        expo = (1 + self.eta) * d
        return abs(float(rem)) / float(abs(u)) ** float(expo)

    def in_disc(self, u):
        """|u| < min(q^(-1/(1+eta)), q^(-1/2)), decided exactly."""
        q = self.field.q
        au = abs(u)
        if au ** 2 * q >= 1:
            return False
        r, s = self.eta.numerator, self.eta.denominator
        # |u|^(1 + eta) < 1/q  <=>  |u|^(s+r) * q^s < 1
        return au ** (s + r) * q ** s < 1


@dataclass(frozen=True)
class TruncatedProduct:
    spec: LocalFactorSpec
    M: int
    u: Fraction
    value: Fraction
    in_disc: bool


def delta_spec(kind, P):
    """LocalFactorSpec for delta_{P,kind}, kind in {plus, minus, zero}."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    fld = P.field

    def exact_factor(Q, u):
        return local_factor(kind, P, Q, u, _validate=False)

    if kind == "plus":
        chars = ((Fraction(2), 1, P),)
    elif kind == "minus":
        chars = ((Fraction(2), -1, P),)
    else:
        chars = ((Fraction(1), 1, P), (Fraction(1), -1, P))
    return LocalFactorSpec(fld, chars, exact_factor, Fraction(1), f"delta[P={P},{kind}]")


def _chi_pm(P, Q, sign, lookup=None):
    chi = lookup(Q) if lookup is not None else ffpoly.jacobi_symbol(Q, P)
    if sign == -1 and int(Q.degree) % 2 == 1:
        chi = -chi
    return chi


def chi_plain_lookup(P, max_deg):
    """Memoized Q -> (Q/P) over monic primes Q, table-backed for prime q."""
    fld = P.field
    if fld.e == 1:
        T = poly_tables(fld.q, max(max_deg, int(P.degree)))
        qkey = (int(P.degree), P.monic_code())
        arrays = {}

        def lookup(Q):
            d = int(Q.degree)
            arr = arrays.get(d)
            if arr is None:
                arr = T.legendre_array(T.prime_coefmat(d), qkey)
                arrays[d] = arr
            idx = int(np.searchsorted(T.prime_codes[d], Q.monic_code()))
            return int(arr[idx])

        return lookup
    cache = {}

    def lookup(Q):
        v = cache.get(Q.coeffs)
        if v is None:
            v = ffpoly.jacobi_symbol(Q, P)
            cache[Q.coeffs] = v
        return v

    return lookup


def local_factor(kind, P, Q, u, _validate=True):
    """The exact local factor 1 + delta_{P,kind}(u; Q) as a Fraction."""
    if _validate and not ffpoly.is_irreducible(Q):
        raise ValueError("Q must be monic irreducible")
    if not Q.is_monic():
        raise ValueError("Q must be monic")
    u = Fraction(u)
    d = int(Q.degree)
    ud, u2d = u ** d, u ** (2 * d)
    if kind == "plus" or kind == "minus":
        chi = _chi_pm(P, Q, 1 if kind == "plus" else -1)
        return 1 + 2 * chi * ud - (1 + 2 * chi) * u2d
    if kind == "zero":
        s = _chi_pm(P, Q, 1) + _chi_pm(P, Q, -1)
        return 1 + s * ud - (1 + s) * u2d
    raise ValueError(f"kind must be one of {KINDS}")


def truncated_product(spec, M, u):
    """Product of spec.exact_factor over all monic primes of degree <= M.

    Exact rational arithmetic; a point outside the convergence disc only
    flags the result, the product itself is still exact.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    u = Fraction(u)
    fracs = []
    for d in range(1, M + 1):
        for Q in ffpoly.primes(spec.field, d):
            fracs.append(Fraction(spec.exact_factor(Q, u)))
    return TruncatedProduct(spec, M, u, prod_fractions(fracs), spec.in_disc(u))


def tail_bound(spec, M, u):
    """(sqrt(q)|u|)^M / M + (q |u|^(1+eta))^M / M; a scale, not a certificate."""
    q = spec.field.q
    au = abs(float(u))
    eta = float(spec.eta)
    return (math.sqrt(q) * au) ** M / M + (q * au ** (1 + eta)) ** M / M


# ---------------------------------------------------------------------------
# Assembly against exact L-values
# ---------------------------------------------------------------------------


def l_value(P, sign, u):
    """L(u, chi_P^sign) evaluated exactly from its raw polynomial."""
    chi = lfunc.QuadChar(P, sign)
    return lfunc.l_polynomial(chi).evaluate(Fraction(u))


def h_value(kind, P, u, M):
    """Truncated H_{P,kind}(u): the Euler factors left after dividing the
    zeta and L local factors out of 1 + delta_{P,kind}."""
    u = Fraction(u)
    lookup = chi_plain_lookup(P, M)
    fracs = []
    for d in range(1, M + 1):
        ud, u2d = u ** d, u ** (2 * d)
        for Q in ffpoly.primes(P.field, d):
            chi = lookup(Q)
            chi_p = chi
            chi_m = -chi if d % 2 else chi
            if kind == "plus":
                c = chi_p
                base = 1 + 2 * c * ud - (1 + 2 * c) * u2d
                fracs.append(base * (1 - c * ud) ** 2)
            elif kind == "minus":
                c = chi_m
                base = 1 + 2 * c * ud - (1 + 2 * c) * u2d
                fracs.append(base * (1 - c * ud) ** 2)
            else:
                s = chi_p + chi_m
                base = 1 + s * ud - (1 + s) * u2d
                fracs.append(base * (1 - chi_p * ud) * (1 - chi_m * ud))
    return prod_fractions(fracs)


def assembled_product(kind, P, u, M):
    """L-part times truncated H-part: L(u,chi^+-)^2 H_{P,+-} for the signed
    kinds, L(u,chi^+) L(u,chi^-) H_{P,0} for the mixed one.

    Agrees with truncated_product(delta_spec(kind, P), M, u) up to the
    tail scale; the gap shrinks as M grows.
    """
    u = Fraction(u)
    h = h_value(kind, P, u, M)
    if kind == "plus":
        return l_value(P, lfunc.PLUS, u) ** 2 * h
    if kind == "minus":
        return l_value(P, lfunc.MINUS, u) ** 2 * h
    if kind == "zero":
        return l_value(P, lfunc.PLUS, u) * l_value(P, lfunc.MINUS, u) * h
    raise ValueError(f"kind must be one of {KINDS}")


# ---------------------------------------------------------------------------
# Prime sums (sum over deg P = n of the truncated product at u = 1/q)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeSumResult:
    q: int
    n: int
    M: int
    kind: str
    value: Fraction
    reference: Fraction
    scales: dict = dc_field(compare=False, default_factory=dict)

    @property
    def gap(self):
        return self.value - self.reference

    @property
    def scaled_gap(self):
        """|gap| normalized by n / q^(n/2) (the leading error scale)."""
        return abs(float(self.gap)) * self.n / self.q ** (self.n / 2)


def prime_sum(kind, field, n, M):
    """sum_{deg P = n} prod_{deg Q <= M} (1 + delta_{P,kind}(1/q; Q)) exactly.

    Reference value pi_q(n)/zeta_q(2); the scales dict reports the three
    error terms q^(n-2M)/n, q^(n/2) M^3/n and q^n/(n M q^(M/2)).
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if n < 1 or M < 1:
        raise ValueError("n and M must be >= 1")
    q = field.q
    if field.e == 1:
        value = _prime_sum_fast(kind, q, n, M)
    else:
        value = _prime_sum_pure(kind, field, n, M)
    reference = Fraction(ffpoly.prime_count_exact(q, n)) * (
        1 / lfunc.zeta_q_value(q, 2)
    )
    scales = {
        "zeta_tail": q ** float(n - 2 * M) / n,
        "fluctuation": q ** (n / 2) * M ** 3 / n,
        "product_tail": q ** n / (n * M * q ** (M / 2)),
    }
    return PrimeSumResult(q, n, M, kind, value, reference, scales)


def _local_numerator(kind, q, d, chi_plain):
    """Numerator of 1 + delta at u = 1/q over the denominator q^(2d);
    chi_plain is (Q/P) before any sign twist."""
    if kind == "plus":
        chi = chi_plain
        return q ** (2 * d) + 2 * chi * q ** d - (1 + 2 * chi)
    if kind == "minus":
        chi = -chi_plain if d % 2 else chi_plain
        return q ** (2 * d) + 2 * chi * q ** d - (1 + 2 * chi)
    s = 0 if d % 2 else 2 * chi_plain
    return q ** (2 * d) + s * q ** d - (1 + s)


def _prime_sum_fast(kind, q, n, M):
    T = poly_tables(q, max(n, M))
    den_exp = 2 * sum(d * T.prime_count(d) for d in range(1, M + 1))
    den = q ** den_exp
    total = Fraction(0)
    coefmats = {d: T.prime_coefmat(d) for d in range(1, M + 1)}
    for pcode in T.prime_codes[n]:
        qkey = (n, int(pcode))
        nums = []
        for d in range(1, M + 1):
            for chi in T.legendre_array(coefmats[d], qkey):
                nums.append(_local_numerator(kind, q, d, int(chi)))
        total += Fraction(_prod(nums), den)
    return total


def _prime_sum_pure(kind, field, n, M):
    q = field.q
    total = Fraction(0)
    for P in ffpoly.primes(field, n):
        nums, den = [], 1
        for d in range(1, M + 1):
            for Q in ffpoly.primes(field, d):
                nums.append(_local_numerator(kind, q, d, ffpoly.jacobi_symbol(Q, P)))
                den *= q ** (2 * d)
        total += Fraction(_prod(nums), den)
    return total
