"""Vectorized residue/character tables over F_q[X] for prime q.

Internal engine behind the batched L-function computations.  Monic
polynomials of degree d are integer codes in range(q^d) (lower
coefficients as base-q digits, leading 1 implicit), matching the
enumeration order in :mod:`ffstat.ffpoly`.

Reduction modulo a fixed monic Q is GF(q)-linear in the coefficient
vector, so batches reduce with one float64 matmul against the matrix of
X^j mod Q rows (entries stay far below 2^53, hence exact).  Quadratic
residue tables per prime come from squaring every residue in one batch.

Everything here is cross-checked against the scalar paths in ffpoly by
the test suite.
"""

from __future__ import annotations

import functools

import numpy as np

from . import ffpoly


class PolyTables:
    """Sieve tables for monic polynomials over a prime field F_q.

    Provides per-degree prime code arrays, smallest-prime-factor codes
    for factorization, and cached coefficient matrices for batched
    reduction.
    """

    def __init__(self, q, max_deg):
        if not ffpoly._is_prime_int(q):
            raise ValueError("PolyTables requires prime q")
        self.q = q
        self.max_deg = max_deg
        self.field = ffpoly.GF(q)
        self._qpow = np.array([q ** i for i in range(max_deg + 2)], dtype=np.int64)
        self._sieve()
        self._digit_cache = {}
        self._coefmat_cache = {}
        self._chiq_cache = {}
        self._xrow_cache = {}

    # -- sieve ----------------------------------------------------------

    def _digits(self, codes, length):
        """Base-q digit matrix (len(codes) x length), int64."""
        out = np.empty((len(codes), length), dtype=np.int64)
        rem = np.asarray(codes, dtype=np.int64)
        for i in range(length):
            rem, out[:, i] = np.divmod(rem, self.q)
        return out

    def _sieve(self):
        q, D = self.q, self.max_deg
        # spf[d][code] = packed (deg, code) of a smallest-degree prime factor
        self.spf = {d: np.zeros(q ** d, dtype=np.int64) for d in range(1, D + 1)}
        self.prime_codes = {1: np.arange(q, dtype=np.int64)}
        pack = q ** D
        for d in range(2, D + 1):
            spf_d = self.spf[d]
            for a in range(1, d // 2 + 1):
                mdeg = d - a
                mult_digits = self._digits(np.arange(q ** mdeg), mdeg)
                mult_full = np.hstack(
                    [mult_digits, np.ones((q ** mdeg, 1), dtype=np.int64)]
                )
                for pcode in self.prime_codes[a]:
                    pco = self._prime_coeffs(a, int(pcode))
                    prod = np.zeros((q ** mdeg, d + 1), dtype=np.int64)
                    for j, pj in enumerate(pco):
                        if pj:
                            prod[:, j : j + mdeg + 1] += pj * mult_full
                    prod %= q
                    codes = prod[:, :d] @ self._qpow[:d]
                    packed = a * pack + int(pcode)
                    cur = spf_d[codes]
                    spf_d[codes] = np.where(cur == 0, packed, cur)
            self.prime_codes[d] = np.nonzero(spf_d == 0)[0].astype(np.int64)

    def _prime_coeffs(self, deg, code):
        digits = []
        for _ in range(deg):
            code, r = divmod(code, self.q)
            digits.append(r)
        return tuple(digits) + (1,)

    def prime_count(self, d):
        return len(self.prime_codes[d])

    def factor(self, deg, code):
        """Factor a monic square-free polynomial into [(deg, code), ...].

        Returns None when a repeated factor is found (not square-free).
        """
        q = self.q
        pack = q ** self.max_deg
        out = []
        while deg > 0:
            packed = int(self.spf[deg][code]) if deg > 1 else 0
            if deg == 1 or packed == 0:
                out.append((deg, code))
                break
            a, pcode = divmod(packed, pack)
            out.append((a, pcode))
            pco = self._prime_coeffs(a, pcode)
            fco = list(self._prime_coeffs(deg, code))
            # synthetic division fco / pco
            quot = [0] * (deg - a + 1)
            for i in range(deg, a - 1, -1):
                c = fco[i] % q
                quot[i - a] = c
                if c:
                    for j in range(a + 1):
                        fco[i - a + j] = (fco[i - a + j] - c * pco[j]) % q
            if any(fco[:a]):
                raise AssertionError("spf does not divide")
            deg -= a
            code = sum(c * q ** i for i, c in enumerate(quot[:deg]))
        seen = set()
        for fac in out:
            if fac in seen:
                return None
            seen.add(fac)
        return out

    def squarefree_flags(self, d):
        """Boolean array over degree-d monic codes, True = square-free."""
        q = self.q
        flags = np.empty(q ** d, dtype=bool)
        for code in range(q ** d):
            flags[code] = self.factor(d, code) is not None
        return flags

    # -- batched reduction ----------------------------------------------

    def monic_coefmat(self, d):
        """Float64 (q^d x (d+1)) coefficient matrix of all monic of degree d."""
        key = ("monic", d)
        if key not in self._coefmat_cache:
            digits = self._digits(np.arange(self.q ** d), d)
            full = np.hstack([digits, np.ones((self.q ** d, 1), dtype=np.int64)])
            self._coefmat_cache[key] = full.astype(np.float64)
        return self._coefmat_cache[key]

    def prime_coefmat(self, d):
        key = ("prime", d)
        if key not in self._coefmat_cache:
            codes = self.prime_codes[d]
            digits = self._digits(codes, d)
            full = np.hstack([digits, np.ones((len(codes), 1), dtype=np.int64)])
            self._coefmat_cache[key] = full.astype(np.float64)
        return self._coefmat_cache[key]

    def _xpow_rows(self, qkey, nrows):
        """Matrix whose row j holds the coefficients of X^j mod Q."""
        k, code = qkey
        cached = self._xrow_cache.get(qkey)
        if cached is None or cached.shape[0] < nrows:
            pco = self._prime_coeffs(k, code)
            rows = np.zeros((max(nrows, k), k), dtype=np.float64)
            cur = [0] * k
            cur[0] = 1
            for j in range(rows.shape[0]):
                rows[j] = cur
                top = cur[k - 1]
                cur = [0] + cur[:-1]
                if top:
                    for i in range(k):
                        cur[i] = (cur[i] - top * pco[i]) % self.q
            self._xrow_cache[qkey] = rows
            cached = rows
        return cached[:nrows]

    def reduce_codes(self, coefmat, qkey):
        """Residue codes modulo the prime Q given by qkey=(deg, code)."""
        k = qkey[0]
        R = self._xpow_rows(qkey, coefmat.shape[1])
        res = coefmat @ R
        res = res.astype(np.int64) % self.q
        return res @ self._qpow[:k]

    # -- quadratic residue tables ----------------------------------------

    def chiq(self, qkey):
        """int8 table over residue codes mod prime Q: (r/Q) in {-1, 0, 1}."""
        tab = self._chiq_cache.get(qkey)
        if tab is not None:
            return tab
        k, code = qkey
        q = self.q
        n = q ** k
        digits = self._digit_cache.get(k)
        if digits is None:
            digits = self._digits(np.arange(n), k).astype(np.float64)
            self._digit_cache[k] = digits
        # batch squares of all residues
        sq = np.zeros((n, 2 * k - 1), dtype=np.float64)
        for i in range(k):
            sq[:, 2 * i] += digits[:, i] * digits[:, i]
            for j in range(i + 1, k):
                sq[:, i + j] += 2.0 * digits[:, i] * digits[:, j]
        sq_codes = self.reduce_codes(sq, qkey)
        tab = np.full(n, -1, dtype=np.int8)
        tab[sq_codes] = 1
        tab[0] = 0
        self._chiq_cache[qkey] = tab
        return tab

    def legendre_array(self, coefmat, qkey):
        """(F/Q) for every row F of coefmat, as int8."""
        return self.chiq(qkey)[self.reduce_codes(coefmat, qkey)]


@functools.lru_cache(maxsize=None)
def poly_tables(q, max_deg):
    return PolyTables(q, max_deg)
