"""Biquadratic curve families over F_q and their Frobenius data.

A family member is a triple (f1, f2, f3) of square-free, pairwise coprime
polynomials (f3 monic; all three monic in the "monic" variant) whose
degree pattern satisfies the genus-length condition L(d1, d2, d3) = g+3,
excluding the degenerate degree multisets {g+3,0,0} and {g+2,0,0} that
collapse to hyperelliptic curves (only reachable when g is odd).

Point counts are defined by the quadratic character sum over P^1(F_{q^n}):

    N_n = sum_x (1 + chi2(f1*f3(x)) + chi2(f2*f3(x)) + chi2(f1*f2(x)))

with the infinity convention baked into quad_char_eval.  T_n = q^n+1-N_n
is the integer q^{n/2} Tr(Theta_C^n), and the zeta numerator P_C(u) of
degree 2g is recovered from T_1..T_g by Newton's identities plus the
functional equation, with an independent T_{g+1} consistency check.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import ffpoly
from .errors import InvariantError
from .lfunc import squarefree_part

MONIC, FULL = "monic", "full"


def genus_length(d1, d2, d3):
    """L(d1,d2,d3): total degree, plus 1 unless d1+d3 and d2+d3 are both even."""
    bump = 0 if (d1 + d3) % 2 == 0 and (d2 + d3) % 2 == 0 else 1
    return d1 + d2 + d3 + bump


def admissible_patterns(g):
    """(kept, excluded) ordered degree triples with L = g+3.

    Candidates are exhausted over d1+d2+d3 <= g+3 rather than listed in
    closed form; `excluded` holds the ones rejected by the degenerate
    multiset rule.
    """
    target = g + 3
    kept, excluded = [], []
    for total in range(target + 1):
        for d1 in range(total + 1):
            for d2 in range(total - d1 + 1):
                d3 = total - d1 - d2
                if genus_length(d1, d2, d3) != target:
                    continue
                if sorted((d1, d2, d3)) in ([0, 0, g + 3], [0, 0, g + 2]):
                    excluded.append((d1, d2, d3))
                else:
                    kept.append((d1, d2, d3))
    return kept, excluded


@dataclass(frozen=True)
class CurveTriple:
    """One family member; validates the defining conditions on construction."""

    f1: ffpoly.Poly
    f2: ffpoly.Poly
    f3: ffpoly.Poly
    variant: str = MONIC

    def __post_init__(self):
        f1, f2, f3 = self.f1, self.f2, self.f3
        if self.variant not in (MONIC, FULL):
            raise ValueError(f"unknown variant {self.variant!r}")
        for f in (f1, f2, f3):
            if f.is_zero() or not ffpoly.is_squarefree(f):
                raise ValueError("family members must be nonzero and square-free")
        if not f3.is_monic():
            raise ValueError("f3 must be monic")
        if self.variant == MONIC and not (f1.is_monic() and f2.is_monic()):
            raise ValueError("monic variant requires monic f1, f2")
        for a, b in ((f1, f2), (f1, f3), (f2, f3)):
            if not ffpoly.poly_gcd(a, b).is_constant():
                raise ValueError("family members must be pairwise coprime")
        g = self.genus
        degs = sorted(int(f.degree) for f in (f1, f2, f3))
        if degs in ([0, 0, g + 3], [0, 0, g + 2]):
            raise ValueError("degenerate degree multiset (hyperelliptic)")

    @property
    def field(self):
        return self.f1.field

    @property
    def genus(self):
        return genus_length(*(int(f.degree) for f in (self.f1, self.f2, self.f3))) - 3

    def pair_products(self):
        """(f1*f3, f2*f3, f1*f2), the three quadratic twists of the cover."""
        return self.f1 * self.f3, self.f2 * self.f3, self.f1 * self.f2


@dataclass(frozen=True)
class CurveData:
    """Exact point counts and traces; P_C present once reconstructed."""

    N: tuple
    T: tuple
    pc: Optional[tuple] = None

    def n_from_pc(self, q, n):
        """q^n + 1 - (power sum of P_C reciprocal roots), exact."""
        if self.pc is None:
            raise ValueError("no zeta numerator attached")
        return q ** n + 1 - _power_sum(self.pc, n)


def _power_sum(pc_coeffs, n):
    """Power sums of reciprocal roots of an ascending coefficient list."""
    c = pc_coeffs
    N = len(c) - 1
    t = []
    for k in range(1, n + 1):
        acc = 0
        for i in range(1, min(k - 1, N) + 1):
            acc += c[i] * t[k - i - 1]
        if k <= N:
            acc += k * c[k]
        t.append(-acc)
    return t[n - 1] if n else 0


# ---------------------------------------------------------------------------
# Family enumeration
# ---------------------------------------------------------------------------


_triple_store = {}


def preload_family(field, g, triples):
    """Install an externally loaded (cached) monic enumeration."""
    _triple_store[(field, g)] = tuple(triples)


def _monic_triples(field, g):
    key = (field, g)
    got = _triple_store.get(key)
    if got is None:
        got = _build_monic_triples(field, g)
        _triple_store[key] = got
    return got


def _build_monic_triples(field, g):
    """All monic-variant members for genus g, deterministic order.

    Filter order is fixed (square-free lists, then coprimality, then
    degree pattern order) so enumeration indices are stable.
    """
    kept, _ = admissible_patterns(g)
    out = []
    sf = {d: ffpoly.enumerate_polys(field, d, "squarefree-monic")
          for d in sorted({d for pat in kept for d in pat})}
    for d1, d2, d3 in kept:
        for f1 in sf[d1]:
            for f2 in sf[d2]:
                if not ffpoly.poly_gcd(f1, f2).is_constant():
                    continue
                f12 = f1 * f2
                for f3 in sf[d3]:
                    if ffpoly.poly_gcd(f12, f3).is_constant():
                        out.append(CurveTriple(f1, f2, f3, MONIC))
    return tuple(out)


def family_size(field, g, variant=MONIC):
    """Exact member count; the full variant is (q-1)^2 times the monic one."""
    n = len(_monic_triples(field, g))
    if variant == FULL:
        return (field.q - 1) ** 2 * n
    if variant == MONIC:
        return n
    raise ValueError(f"unknown variant {variant!r}")


def family_member(field, g, variant, index):
    """Random access into the deterministic enumeration order."""
    triples = _monic_triples(field, g)
    if variant == MONIC:
        t = triples[index]
        return t
    u = field.q - 1
    tidx, rest = divmod(index, u * u)
    c1, c2 = divmod(rest, u)
    base = triples[tidx]
    return CurveTriple(base.f1.scale(c1 + 1), base.f2.scale(c2 + 1), base.f3, FULL)


def enumerate_family(field, g, variant=MONIC, start=0, stop=None):
    """Stream of CurveTriple in deterministic order, sliceable by index."""
    total = family_size(field, g, variant)
    if stop is None or stop > total:
        stop = total
    for i in range(start, stop):
        yield family_member(field, g, variant, i)


def family_size_ratio(field, g, variant=MONIC):
    """(size, size / q^(g+3)) - the empirical leading-order ratio."""
    from fractions import Fraction

    size = family_size(field, g, variant)
    return size, Fraction(size, field.q ** (g + 3))


# ---------------------------------------------------------------------------
# Character-sum engine over P^1(F_{q^n})
# ---------------------------------------------------------------------------


class ChiCache:
    """Cached chi_2(f(x)) vectors over a fixed F_{q^n}, one per polynomial.

    The finite-x vector is an int8 array indexed by element code; the
    value at infinity is kept separately.  Pair sums use multiplicativity
    chi(fg(x)) = chi(f(x)) chi(g(x)) pointwise, with the infinity term
    recomputed from degree parity and leading coefficients.
    """

    def __init__(self, field, n):
        self.field = field
        self.n = n
        self.ext = ffpoly.extension_field(field, n)
        self._vec = {}

    def chi(self, f):
        key = f.coeffs
        got = self._vec.get(key)
        if got is None:
            got = self.ext.chi_vector(f)
            self._vec[key] = got
        return got

    def chi_inf_product(self, fa, fb):
        deg = int(fa.degree) + int(fb.degree)
        if deg % 2 == 1:
            return 0
        lc = self.field.mul(fa.leading, fb.leading)
        return self.ext.chi2(self.ext.embed_base(lc))

    def pair_sum(self, fa, fb):
        """sum over P^1(F_{q^n}) of chi2((fa*fb)(x)), exact int."""
        va, _ = self.chi(fa)
        vb, _ = self.chi(fb)
        fin = int((va * vb).sum(dtype=np.int64))
        return fin + self.chi_inf_product(fa, fb)

    def triple_T(self, t):
        """T_n = q^n + 1 - N_n for one family member."""
        return -(
            self.pair_sum(t.f1, t.f3)
            + self.pair_sum(t.f2, t.f3)
            + self.pair_sum(t.f1, t.f2)
        )

    def zero_count(self, f):
        """Zeros of f among finite x (cached alongside chi)."""
        va, _ = self.chi(f)
        return int(np.count_nonzero(va == 0))


@functools.lru_cache(maxsize=None)
def chi_cache(field, n):
    return ChiCache(field, n)


# ---------------------------------------------------------------------------
# Point counts and the zeta numerator
# ---------------------------------------------------------------------------


def curve_counts(triple, n_max):
    """N_n and T_n for 1 <= n <= n_max by the character sum over P^1."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    q = triple.field.q
    N, T = [], []
    for n in range(1, n_max + 1):
        cache = chi_cache(triple.field, n)
        t_n = cache.triple_T(triple)
        T.append(t_n)
        N.append(q ** n + 1 - t_n)
    return CurveData(tuple(N), tuple(T))


def zeta_numerator(triple, n_max=None):
    """CurveData carrying P_C, reconstructed from T_1..T_g.

    Coefficients a_1..a_g come from Newton's identities (each division by
    k must be exact), a_{g+1}..a_{2g} from the functional equation
    a_j = q^{j-g} a_{2g-j}.  The count N_{g+1} predicted by P_C is checked
    against the direct character sum; a mismatch raises InvariantError.
    """
    g = triple.genus
    q = triple.field.q
    upto = max(g + 1, n_max or 0)
    data = curve_counts(triple, upto)
    T = data.T
    a = [1] + [0] * (2 * g)
    for k in range(1, g + 1):
        acc = T[k - 1]
        for i in range(1, k):
            acc += a[i] * T[k - i - 1]
        if acc % k:
            raise InvariantError("Newton inversion not integral")
        a[k] = -(acc // k)
    for j in range(g + 1, 2 * g + 1):
        a[j] = q ** (j - g) * a[2 * g - j]
    pc = tuple(a)
    if _power_sum(pc, g + 1) != T[g]:
        raise InvariantError("zeta numerator inconsistent with point counts")
    return CurveData(data.N, data.T, pc)


def pc_roots(pc_coeffs):
    """Reciprocal roots of P_C (the sqrt(q)-scale Frobenius eigenvalues)."""
    if len(pc_coeffs) <= 1:
        return np.zeros(0, dtype=complex)
    return np.roots(list(pc_coeffs))


def pc_rh_deviation(pc_coeffs, q):
    """max | |root|/sqrt(q) - 1 | over reciprocal roots of P_C, via the
    exact square-free part (repeated roots would spoil double precision)."""
    if len(pc_coeffs) <= 1:
        return 0.0
    sf = squarefree_part(pc_coeffs)
    roots = np.roots([float(c) for c in sf])
    return float(np.max(np.abs(np.abs(roots) / q ** 0.5 - 1.0)))


def eigenphases(pc_coeffs):
    """Sorted angles theta_j with reciprocal roots sqrt(q) e^{i theta_j}."""
    return np.sort(np.angle(pc_roots(pc_coeffs)))
