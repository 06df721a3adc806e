"""Quadratic characters chi_D^{+-} over F_q[X] and their L-polynomials.

For a square-free modulus D the L-polynomial has integer coefficients
c_d = sum of chi_D over monic polynomials of degree d, vanishing for
d >= deg(D).  Completing by the trivial zero (divide by 1-u for the plus
sign, 1+u for the minus sign, present only when deg(D) is even) yields a
degree 2*delta polynomial with the functional-equation symmetry
c_j = q^(j-delta) * c_(2*delta-j), all of whose reciprocal roots have
modulus sqrt(q).  Power sums of those reciprocal roots are the integers
t_n = q^(n/2) * Tr(Theta^n), recovered exactly by Newton's identities and
cross-checkable against the von Mangoldt character sum (the explicit
formula): -t_n = lambda + sum_{deg F = n} Lambda(F) chi(F).

Scalar operations here are pure-Python exact; `l_suite` runs the whole
catalog of moduli through a vectorized engine (prime q only) and reports
aggregate check results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import ffpoly
from ._tables import poly_tables
from .errors import InvariantError

PLUS, MINUS = 1, -1

_SIGN_NAMES = {PLUS: "plus", MINUS: "minus"}


def parse_sign(text):
    for val, name in _SIGN_NAMES.items():
        if text in (name, name[0], {PLUS: "+", MINUS: "-"}[val]):
            return val
    raise ValueError(f"unknown character sign {text!r}")


class QuadChar:
    """Quadratic Dirichlet character modulo a square-free D, sign +1 or -1.

    The minus variant twists by (-1)^deg(F).  A non-monic D is accepted
    and normalized: constants are units, so (F/D) depends only on the
    monic part of D.
    """

    __slots__ = ("modulus", "sign")

    def __init__(self, modulus, sign=PLUS):
        if modulus.is_zero() or modulus.is_constant():
            raise ValueError("modulus must be nonconstant")
        modulus = modulus.to_monic()
        if not ffpoly.is_squarefree(modulus):
            raise ValueError("modulus must be square-free")
        if sign not in (PLUS, MINUS):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "sign", sign)

    def __setattr__(self, *a):
        raise AttributeError("QuadChar is immutable")

    @property
    def field(self):
        return self.modulus.field

    def __call__(self, f):
        return char_value(self, f)

    def __repr__(self):
        return f"QuadChar({self.modulus}, {_SIGN_NAMES[self.sign]})"


def char_value(chi, f):
    """chi_D^{sign}(F) in {-1, 0, 1}; 0 iff gcd(F, D) != 1."""
    if f.is_zero():
        raise ValueError("character of the zero polynomial is undefined")
    val = ffpoly.jacobi_symbol(f, chi.modulus)
    if chi.sign == MINUS and val and f.degree % 2 == 1:
        val = -val
    return val


@dataclass(frozen=True)
class LPoly:
    """Integer-coefficient L-polynomial data for one character.

    Raw form: coefficients c_0..c_{deg D - 1} with c_0 = 1.  Completed
    form: degree exactly 2*delta = deg(D) - 1 - lambda, satisfying the
    functional equation coefficient symmetry.
    """

    coeffs: tuple
    modulus_degree: int
    sign: int
    completed: bool
    q: int

    @property
    def lam(self):
        return 1 if self.modulus_degree % 2 == 0 else 0

    @property
    def delta(self):
        d = self.modulus_degree - 1 - self.lam
        assert d % 2 == 0
        return d // 2

    @property
    def degree(self):
        n = len(self.coeffs)
        while n and self.coeffs[n - 1] == 0:
            n -= 1
        return n - 1

    def evaluate(self, u):
        """Exact evaluation at a rational point."""
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc


@dataclass(frozen=True)
class FrobeniusData:
    """Exact power sums t_n = q^{n/2} Tr(Theta^n) of the unitarized
    Frobenius class, plus optional numerically computed eigenphases."""

    delta: int
    q: int
    t: tuple  # t[n-1] = t_n, exact ints
    eigenphases: Optional[tuple] = None

    def trace(self, n):
        """Tr(Theta^n) as a float."""
        return self.t[n - 1] / self.q ** (n / 2)


def l_polynomial(chi):
    """Raw L-polynomial by direct character sums over monic polynomials."""
    D = chi.modulus
    deg = int(D.degree)
    field = chi.field
    coeffs = []
    for d in range(deg):
        total = 0
        for f in ffpoly.monic_polys(field, d):
            total += char_value(chi, f)
        coeffs.append(total)
    if coeffs[0] != 1:
        raise InvariantError("constant coefficient of L must be 1")
    return LPoly(tuple(coeffs), deg, chi.sign, completed=False, q=field.q)


def complete_l(lpoly):
    """Divide out the trivial zero: by (1-u)^lambda for the plus sign,
    (1+u)^lambda for the minus sign.  The division must be exact in
    integer arithmetic; a nonzero remainder means an upstream bug."""
    if lpoly.completed:
        return lpoly
    lam = lpoly.lam
    coeffs = list(lpoly.coeffs)
    for _ in range(lam):
        coeffs = _divide_linear(coeffs, at_one=(lpoly.sign == PLUS))
    # trim exactly to degree 2*delta
    target = lpoly.modulus_degree - 1 - lam
    while len(coeffs) > target + 1:
        if coeffs[-1] != 0:
            raise InvariantError("completed L-polynomial exceeds degree 2*delta")
        coeffs.pop()
    if len(coeffs) != target + 1:
        raise InvariantError("completed L-polynomial has wrong degree")
    if coeffs[-1] == 0:
        raise InvariantError("completed L-polynomial has wrong degree")
    return LPoly(tuple(coeffs), lpoly.modulus_degree, lpoly.sign, completed=True,
                 q=lpoly.q)


def _divide_linear(coeffs, at_one):
    """Exact division by (1 - u) when at_one else (1 + u)."""
    # with s = +-1: c_i = out_i - s*out_{i-1}, so out_i = c_i + s*out_{i-1};
    # the final carry must close to zero or the division was not exact
    s = 1 if at_one else -1
    out = [0] * (len(coeffs) - 1)
    prev = 0
    for i, c in enumerate(coeffs):
        if i < len(out):
            cur = c + s * prev
            out[i] = cur
            prev = cur
        else:
            if c + s * prev != 0:
                raise InvariantError("non-exact division by trivial-zero factor")
    return out


def functional_equation_ok(lstar, q):
    """Exact coefficient symmetry c_j = q^{j-delta} c_{2delta-j}."""
    d = lstar.delta
    c = lstar.coeffs
    for j in range(2 * d + 1):
        lhs = c[j] * q ** d
        rhs = q ** j * c[2 * d - j]
        if lhs != rhs:
            return False
    return True


def frobenius_traces(lstar, n_max, with_eigenphases=False):
    """Newton's identities on the completed coefficients.

    With L*(u) = prod(1 - gamma_i u), t_n = sum gamma_i^n satisfies
    t_n = -(sum_{i=1..min(n-1,N)} c_i t_{n-i}) - n*c_n   (c_n = 0, n > N).
    """
    if not lstar.completed:
        raise ValueError("frobenius_traces needs a completed L-polynomial")
    c = lstar.coeffs
    N = len(c) - 1
    t = []
    for n in range(1, n_max + 1):
        acc = 0
        for i in range(1, min(n - 1, N) + 1):
            acc += c[i] * t[n - i - 1]
        if n <= N:
            acc += n * c[n]
        t.append(-acc)
    phases = None
    if with_eigenphases and N > 0:
        phases = tuple(np.sort(np.angle(reciprocal_roots(lstar))))
    return FrobeniusData(lstar.delta, lstar.q, tuple(t), phases)


def reciprocal_roots(lstar):
    """The gamma_i with L*(u) = prod(1 - gamma_i u), via numpy roots."""
    if lstar.degree <= 0:
        return np.zeros(0, dtype=complex)
    return np.roots(list(lstar.coeffs))


def _rational_gcd(a, b):
    """Euclidean gcd of two rational coefficient lists (scale arbitrary)."""

    def trim(p):
        while p and p[-1] == 0:
            p.pop()
        return p

    a = trim([Fraction(c) for c in a])
    b = trim([Fraction(c) for c in b])
    while b:
        while len(a) >= len(b):
            c = a[-1] / b[-1]
            off = len(a) - len(b)
            for i in range(len(b)):
                a[off + i] -= c * b[i]
            a = trim(a)
            if not a:
                break
        a, b = b, a
    return a


def squarefree_part(coeffs):
    """coeffs / gcd(coeffs, coeffs'), exact; same root set, all simple.

    Normalized to constant term 1 (which our L* and zeta-numerator
    polynomials always have, their roots being nonzero)."""
    c = list(coeffs)
    dc = [i * c[i] for i in range(1, len(c))]
    g = _rational_gcd(c, dc)
    if len(g) <= 1:
        return tuple(coeffs)
    a = [Fraction(x) for x in c]
    out = []
    for i in range(len(a) - 1, len(g) - 2, -1):
        q_ = a[i] / g[-1]
        out.append(q_)
        for j in range(len(g)):
            a[i - len(g) + 1 + j] -= q_ * g[j]
    out.reverse()
    if out[0] == 0:
        raise InvariantError("square-free part lost its constant term")
    return tuple(x / out[0] for x in out)


def rh_max_deviation(lstar, q):
    """max_i | |gamma_i|/sqrt(q) - 1 |, zero for delta = 0.

    Repeated roots wreck double-precision root finding, so the check runs
    on the exact square-free part (same root set, simple roots).
    """
    if lstar.degree <= 0:
        return 0.0
    sf = squarefree_part(lstar.coeffs)
    roots = np.roots([float(c) for c in sf])
    if len(roots) == 0:
        return 0.0
    return float(np.max(np.abs(np.abs(roots) / math.sqrt(q) - 1.0)))


def prime_char_sum(chi_or_modulus, n):
    """s_n(D) = sum over monic primes P of degree n of chi_D(P) (plus sign)."""
    D = chi_or_modulus.modulus if isinstance(chi_or_modulus, QuadChar) else chi_or_modulus
    return sum(ffpoly.jacobi_symbol(p, D) for p in ffpoly.primes(D.field, n))


def explicit_formula_trace(chi, n):
    """lambda + sum_{deg F = n} Lambda(F) chi(F), an exact integer.

    Grouped over prime powers: Lambda(P^k) = deg P.  Equals -t_n of
    `frobenius_traces` for every valid modulus; the test suite pins this.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    D = chi.modulus
    field = D.field
    lam = 1 if int(D.degree) % 2 == 0 else 0
    total = 0
    for d in range(1, n + 1):
        if n % d:
            continue
        k = n // d
        for p in ffpoly.primes(field, d):
            v = char_value(chi, p)
            total += d * (v if k % 2 else v * v)
    return lam + total


def zeta_q_value(q, s):
    """zeta_q(s) = 1/(1 - q^(1-s)) exactly, for integer s >= 2."""
    if s <= 1:
        raise ValueError("zeta_q has a pole at s = 1; need s >= 2")
    return Fraction(q ** (s - 1), q ** (s - 1) - 1)


def l_data(chi, n_max=8):
    """Convenience bundle: raw L, completed L, traces, RH deviation."""
    raw = l_polynomial(chi)
    lstar = complete_l(raw)
    frob = frobenius_traces(lstar, n_max)
    dev = rh_max_deviation(lstar, chi.field.q)
    return raw, lstar, frob, dev


# ---------------------------------------------------------------------------
# Batched catalog verification (prime q)
# ---------------------------------------------------------------------------


@dataclass
class SuiteReport:
    """Aggregate results of the full-catalog L-function verification."""

    q: int
    max_deg: int
    n_max: int
    moduli: int
    failures: list
    rh_max_dev: float
    prime_sum_bound_max: float  # max of s_n^2 / (degD^2 q^n) over catalog

    def ok(self):
        return not self.failures


def l_suite(q, max_deg=6, n_max=8, rh_tol=1e-9, collect=None):
    """Verify the whole catalog of square-free monic moduli of degree
    1..max_deg over F_q (q prime): exact completion, degree bookkeeping,
    functional equation, RH root moduli, minus-sign relation, vanishing
    of coefficients at degree >= deg D, and explicit-formula traces
    against Newton traces for n <= n_max.  Returns a SuiteReport.

    `collect`, if given, is called with each record dict (used by tests
    to cross-check samples against the scalar path).
    """
    T = poly_tables(q, max(n_max, max_deg))
    failures = []
    rh_worst = 0.0
    bound_worst = 0.0

    # concatenated (F/Q) arrays over all monic F of degree 0..max_deg
    offsets = np.cumsum([0] + [q ** d for d in range(max_deg + 1)])
    monic_mats = [T.monic_coefmat(d) for d in range(max_deg + 1)]
    legf_cache = {}

    def legf(qkey):
        arr = legf_cache.get(qkey)
        if arr is None:
            arr = np.concatenate([T.legendre_array(m, qkey) for m in monic_mats])
            legf_cache[qkey] = arr
        return arr

    # phase 1: raw coefficients, completion, Newton traces, RH
    records = []
    for dd in range(1, max_deg + 1):
        for code in range(q ** dd):
            factors = T.factor(dd, code)
            if factors is None:
                continue
            arr = legf(tuple(factors[0]))
            for fac in factors[1:]:
                arr = arr * legf(tuple(fac))
            sums = [
                int(arr[offsets[e] : offsets[e + 1]].sum(dtype=np.int64))
                for e in range(max_deg + 1)
            ]
            label = f"D deg={dd} code={code}"
            for e in range(dd, max_deg + 1):
                if sums[e] != 0:
                    failures.append(f"{label}: coefficient at degree {e} nonzero")
            raw = LPoly(tuple(sums[:dd]), dd, PLUS, completed=False, q=q)
            raw_minus = LPoly(
                tuple((-1) ** e * c for e, c in enumerate(raw.coeffs)),
                dd, MINUS, completed=False, q=q,
            )
            rec = {"deg": dd, "code": code, "factors": factors, "raw": raw}
            try:
                lstar = complete_l(raw)
                lstar_minus = complete_l(raw_minus)
            except InvariantError as exc:
                failures.append(f"{label}: {exc}")
                continue
            lam = raw.lam
            if lstar.degree != dd - 1 - lam:
                failures.append(f"{label}: deg L* != deg D - 1 - lambda")
            if not functional_equation_ok(lstar, q):
                failures.append(f"{label}: functional equation (plus)")
            if not functional_equation_ok(lstar_minus, q):
                failures.append(f"{label}: functional equation (minus)")
            t_plus = frobenius_traces(lstar, n_max).t
            t_minus = frobenius_traces(lstar_minus, n_max).t
            if any(t_minus[i] != (-1) ** (i + 1) * t_plus[i] for i in range(n_max)):
                failures.append(f"{label}: minus traces != (-1)^n plus traces")
            dev = rh_max_deviation(lstar, q)
            rh_worst = max(rh_worst, dev)
            if dev >= rh_tol:
                failures.append(f"{label}: RH deviation {dev:.2e}")
            rec["lstar"] = lstar
            rec["t"] = t_plus
            rec["lam"] = lam
            records.append(rec)

    # phase 2: prime character sums s_d(D) for the explicit formula
    s_table = {id(rec): [] for rec in records}
    for d in range(1, n_max + 1):
        pmat = T.prime_coefmat(d)
        legp_cache = {}

        def legp(qkey):
            arr = legp_cache.get(qkey)
            if arr is None:
                arr = T.legendre_array(pmat, qkey)
                legp_cache[qkey] = arr
            return arr

        for rec in records:
            arr = legp(tuple(rec["factors"][0]))
            for fac in rec["factors"][1:]:
                arr = arr * legp(tuple(fac))
            s_table[id(rec)].append(int(arr.sum(dtype=np.int64)))
        del legp_cache

    # phase 3: explicit formula vs Newton, and the prime-sum size bound
    pi_q = {d: ffpoly.prime_count_exact(q, d) for d in range(1, n_max + 1)}
    for rec in records:
        s = s_table[id(rec)]
        dd = rec["deg"]
        omega = {}
        for a, _ in rec["factors"]:
            omega[a] = omega.get(a, 0) + 1
        for n in range(1, n_max + 1):
            lam_sum = 0
            for d in range(1, n + 1):
                if n % d:
                    continue
                if (n // d) % 2:
                    lam_sum += d * s[d - 1]
                else:
                    lam_sum += d * (pi_q[d] - omega.get(d, 0))
            if -rec["t"][n - 1] != rec["lam"] + lam_sum:
                failures.append(
                    f"D deg={dd} code={rec['code']}: explicit formula n={n}"
                )
            ratio = s[n - 1] ** 2 / (dd ** 2 * q ** n)
            bound_worst = max(bound_worst, ratio)
        rec["s"] = s
        if collect is not None:
            collect(rec)

    return SuiteReport(
        q=q,
        max_deg=max_deg,
        n_max=n_max,
        moduli=len(records),
        failures=failures,
        rh_max_dev=rh_worst,
        prime_sum_bound_max=bound_worst,
    )
