"""Exact arithmetic over F_q and F_q[X] at desk scale.

Fields have odd prime-power order q = p^e.  Field elements are plain ints
in range(q); for e > 1 the int encodes the base-p digit vector of a
polynomial residue, so F_p embeds as the codes 0..p-1.  Polynomials are
immutable ascending coefficient tuples over a fixed field.

Everything in this module is integer-exact: counting uses Python ints and
no operation introduces floats.  Enumeration streams are deterministic
(descending-degree lexicographic order, equivalently ascending integer
code) and support index-range slicing so consumers can partition them.
"""

from __future__ import annotations

import functools

import numpy as np


class _Infinity:
    """Point at infinity on P^1; a unique sentinel, not a number."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()

#: degree of the zero polynomial
NEG_INFINITY = float("-inf")


def _is_prime_int(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _factor_int(n):
    """Prime factorization of a small positive int as a dict {p: a}."""
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# ---------------------------------------------------------------------------
# Low-level digit-vector helpers over F_p, used to bootstrap field tables
# before the Poly class is available.  Vectors are ascending int tuples.
# ---------------------------------------------------------------------------


def _vtrim(v):
    n = len(v)
    while n and v[n - 1] == 0:
        n -= 1
    return tuple(v[:n])


def _vmul_mod(a, b, modulus, p):
    """(a*b) mod modulus over F_p; modulus monic, as ascending tuples."""
    if not a or not b:
        return ()
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    k = len(modulus) - 1
    for i in range(len(prod) - 1, k - 1, -1):
        c = prod[i]
        if c:
            prod[i] = 0
            for j in range(k):
                prod[i - k + j] = (prod[i - k + j] - c * modulus[j]) % p
    return _vtrim(prod)


def _least_irreducible_mod_p(p, e):
    """Lexicographically least monic irreducible of degree e over F_p.

    Brute force: a monic polynomial of degree e <= 3 is irreducible iff it
    has no roots; for larger e, test divisibility by every lower-degree
    monic irreducible (recursively generated the same way).
    """
    smaller = {}
    for d in range(1, e):
        smaller[d] = []
        for code in range(p ** d):
            cand = _decode_digits(code, d, p) + (1,)
            if _digits_irreducible(cand, p, smaller):
                smaller[d].append(cand)
    for code in range(p ** e):
        cand = _decode_digits(code, e, p) + (1,)
        if _digits_irreducible(cand, p, smaller):
            return cand
    raise RuntimeError(f"no irreducible of degree {e} over F_{p}")


def _decode_digits(code, length, base):
    digits = []
    for _ in range(length):
        code, r = divmod(code, base)
        digits.append(r)
    return tuple(digits)


def _digits_irreducible(v, p, smaller_primes):
    deg = len(v) - 1
    if deg == 1:
        return True
    if deg <= 3:
        # no roots <=> irreducible for degree 2, 3
        for x in range(p):
            acc = 0
            for c in reversed(v):
                acc = (acc * x + c) % p
            if acc == 0:
                return False
        return True
    for d in range(1, deg // 2 + 1):
        for q in smaller_primes[d]:
            if not _vdivides_rem(v, q, p):
                return False
    return True


def _vdivides_rem(a, b, p):
    """True if b does not divide a over F_p (both monic tuples)."""
    rem = list(a)
    k = len(b) - 1
    while len(rem) - 1 >= k:
        c = rem[-1]
        if c:
            for j in range(k + 1):
                rem[len(rem) - 1 - k + j] = (rem[len(rem) - 1 - k + j] - c * b[j]) % p
        rem.pop()
        while rem and rem[-1] == 0 and len(rem) - 1 >= k:
            rem.pop()
    return any(rem)


# ---------------------------------------------------------------------------
# Finite fields
# ---------------------------------------------------------------------------


class FiniteField:
    """The field F_q with q = p^e, p an odd prime.

    Elements are ints in range(q).  For e == 1 arithmetic is plain modular
    arithmetic; for e > 1 the int encodes base-p digits of a residue modulo
    an irreducible `modulus` and arithmetic goes through precomputed
    tables (q <= a few hundred keeps these tiny).
    """

    def __init__(self, p, e=1, modulus=None):
        if not _is_prime_int(p):
            raise ValueError(f"characteristic {p} is not prime")
        if p == 2:
            raise ValueError("only odd characteristic is supported")
        if e < 1:
            raise ValueError("extension degree must be >= 1")
        self.p = p
        self.e = e
        self.q = p ** e
        if e == 1:
            self.modulus_coeffs = None
        else:
            if self.q > 2048:
                raise ValueError(f"q = {self.q} exceeds desk scale for table-based fields")
            if modulus is None:
                modulus = _least_irreducible_mod_p(p, e)
            else:
                modulus = tuple(int(c) % p for c in modulus)
                if len(modulus) != e + 1 or modulus[-1] != 1:
                    raise ValueError("modulus must be monic of degree e")
                smaller = {}
                for d in range(1, e):
                    smaller[d] = [
                        v + (1,) for code in range(p ** d)
                        for v in [_decode_digits(code, d, p)]
                        if _digits_irreducible(v + (1,), p, smaller)
                    ]
                if not _digits_irreducible(modulus, p, smaller):
                    raise ValueError("modulus is not irreducible over F_p")
            self.modulus_coeffs = modulus
            self._build_tables()
        self._squares = None

    def _build_tables(self):
        p, e, q = self.p, self.e, self.q
        mod = self.modulus_coeffs
        vecs = [_decode_digits(c, e, p) for c in range(q)]
        enc = {v: c for c, v in enumerate(vecs)}

        def encode(v):
            return enc[tuple(v) + (0,) * (e - len(v))]

        self._mul_table = [[0] * q for _ in range(q)]
        for a in range(q):
            va = _vtrim(vecs[a])
            for b in range(a, q):
                c = encode(_vmul_mod(va, _vtrim(vecs[b]), mod, p))
                self._mul_table[a][b] = c
                self._mul_table[b][a] = c
        self._add_table = [
            [sum(((va[i] + vb[i]) % p) * p ** i for i in range(e))
             for vb in vecs]
            for va in vecs
        ]
        self._neg_table = [sum(((-v[i]) % p) * p ** i for i in range(e)) for v in vecs]
        self._inv_table = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if self._mul_table[a][b] == 1:
                    self._inv_table[a] = b
                    break

    # -- element arithmetic on int codes --

    def add(self, a, b):
        if self.e == 1:
            return (a + b) % self.p
        return self._add_table[a][b]

    def neg(self, a):
        if self.e == 1:
            return (-a) % self.p
        return self._neg_table[a]

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.e == 1:
            return (a * b) % self.p
        return self._mul_table[a][b]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        return self._inv_table[a]

    def pow(self, a, n):
        if n < 0:
            return self.pow(self.inv(a), -n)
        r, base = 1, a
        while n:
            if n & 1:
                r = self.mul(r, base)
            base = self.mul(base, base)
            n >>= 1
        return r

    def elements(self):
        return range(self.q)

    def units(self):
        return range(1, self.q)

    def chi2(self, a):
        """The quadratic character of F_q: 0 at 0, +1 on squares, -1 otherwise."""
        if a == 0:
            return 0
        if self._squares is None:
            self._squares = frozenset(self.mul(x, x) for x in self.units())
        return 1 if a in self._squares else -1

    def __eq__(self, other):
        return (
            isinstance(other, FiniteField)
            and (self.p, self.e, self.modulus_coeffs)
            == (other.p, other.e, other.modulus_coeffs)
        )

    def __hash__(self):
        return hash((self.p, self.e, self.modulus_coeffs))

    def __repr__(self):
        if self.e == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.e})"


@functools.lru_cache(maxsize=None)
def GF(p, e=1):
    """Cached constructor for F_{p^e} with the canonical modulus."""
    return FiniteField(p, e)


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


class Poly:
    """Immutable dense polynomial over a FiniteField.

    `coeffs` is the ascending tuple (c_0, c_1, ...) with no trailing zeros;
    the zero polynomial has coeffs == () and degree -inf.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", _vtrim(tuple(coeffs)))

    def __setattr__(self, *a):
        raise AttributeError("Poly is immutable")

    # -- constructors --

    @classmethod
    def from_coeffs(cls, field, coeffs):
        cs = tuple(int(c) for c in coeffs)
        for c in cs:
            if not 0 <= c < field.q:
                raise ValueError(f"coefficient {c} out of range for q={field.q}")
        return cls(field, cs)

    @classmethod
    def zero(cls, field):
        return cls(field, ())

    @classmethod
    def one(cls, field):
        return cls(field, (1,))

    @classmethod
    def x(cls, field):
        return cls(field, (0, 1))

    @classmethod
    def constant(cls, field, c):
        return cls(field, (c % field.q,))

    @classmethod
    def monic_from_code(cls, field, degree, code):
        """The monic polynomial of `degree` whose lower coefficients are the
        base-q digits of `code` (constant term least significant)."""
        return cls(field, _decode_digits(code, degree, field.q) + (1,))

    # -- basic structure --

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INFINITY

    def is_zero(self):
        return not self.coeffs

    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def is_constant(self):
        return len(self.coeffs) <= 1

    @property
    def leading(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def monic_code(self):
        """Integer code of a monic polynomial (degree implied by caller)."""
        if not self.is_monic():
            raise ValueError("monic_code requires a monic polynomial")
        q = self.field.q
        return sum(c * q ** i for i, c in enumerate(self.coeffs[:-1]))

    # -- arithmetic --

    def _check(self, other):
        if self.field != other.field:
            raise ValueError("polynomials over different fields")

    def __add__(self, other):
        self._check(other)
        F = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return Poly(F, out)

    def __neg__(self):
        F = self.field
        return Poly(F, tuple(F.neg(c) for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        F = self.field
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly.zero(F)
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] = F.add(out[i + j], F.mul(ai, bj))
        return Poly(F, out)

    def scale(self, c):
        F = self.field
        c %= F.q
        return Poly(F, tuple(F.mul(c, x) for x in self.coeffs))

    def __pow__(self, n):
        r = Poly.one(self.field)
        base = self
        while n:
            if n & 1:
                r = r * base
            base = base * base
            n >>= 1
        return r

    def __divmod__(self, other):
        self._check(other)
        F = self.field
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        a = list(self.coeffs)
        b = other.coeffs
        db = len(b) - 1
        inv_lead = F.inv(b[-1])
        quot = [0] * max(len(a) - db, 0)
        for i in range(len(a) - 1, db - 1, -1):
            c = F.mul(a[i], inv_lead)
            if c:
                quot[i - db] = c
                for j in range(db + 1):
                    a[i - db + j] = F.sub(a[i - db + j], F.mul(c, b[j]))
        return Poly(F, quot), Poly(F, a[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def derivative(self):
        F = self.field
        return Poly(
            F,
            tuple(F.mul(i % F.p, c) for i, c in enumerate(self.coeffs) if i)
            if len(self.coeffs) > 1
            else (),
        )

    def to_monic(self):
        if self.is_zero():
            return self
        return self.scale(self.field.inv(self.leading))

    def evaluate(self, x):
        """Horner evaluation at an element of the base field."""
        F = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, x), c)
        return acc

    # -- comparisons / hashing / printing --

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field.p, self.field.e, self.coeffs))

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(("" if c == 1 else str(c)) + "X")
            else:
                terms.append(("" if c == 1 else str(c)) + f"X^{i}")
        return "+".join(terms)

    def __repr__(self):
        return f"Poly({self.field!r}, {self})"


def poly_gcd(a, b):
    """Monic gcd;  gcd(0, 0) is the zero polynomial."""
    while not b.is_zero():
        a, b = b, a % b
    return a.to_monic()


# ---------------------------------------------------------------------------
# Predicates: square-free / Mobius / irreducibility
# ---------------------------------------------------------------------------


def is_squarefree(f):
    """True iff f is square-free (units count as square-free)."""
    if f.is_zero():
        raise ValueError("square-freeness of the zero polynomial is undefined")
    if f.is_constant():
        return True
    g = poly_gcd(f, f.derivative())
    return g.is_constant()


def factorize(f):
    """Full factorization by trial division: list of (prime, multiplicity).

    Fine at desk scale (degrees <= 10 or so); the unit factor is dropped.
    """
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    f = f.to_monic()
    out = []
    d = 1
    while f.degree >= 1:
        if 2 * d > f.degree:
            out.append((f, 1))
            break
        for p in primes(f.field, d):
            if (f % p).is_zero():
                mult = 0
                while (f % p).is_zero():
                    f = f // p
                    mult += 1
                out.append((p, mult))
        d += 1
    return out


def mobius_squarefree(f):
    """(mu(f), is_squarefree(f)) with mu = (-1)^r on a unit times r distinct
    primes and 0 otherwise; constants are units with mu = 1."""
    if f.is_zero():
        raise ValueError("mu of the zero polynomial is undefined")
    if f.is_constant():
        return 1, True
    if not is_squarefree(f):
        return 0, False
    r = len(factorize(f))
    return (-1) ** r, True


def is_irreducible(f):
    """Primality in F_q[X] by trial division against sieved primes."""
    deg = f.degree
    if f.is_zero() or f.is_constant():
        raise ValueError("irreducibility is defined for nonconstant polynomials")
    if deg == 1:
        return True
    g = f.to_monic()
    for d in range(1, deg // 2 + 1):
        for p in primes(f.field, d):
            if (g % p).is_zero():
                return False
    return True


# ---------------------------------------------------------------------------
# Enumeration and counting
# ---------------------------------------------------------------------------


def monic_polys(field, d):
    """All monic polynomials of degree d, ascending code order."""
    return [Poly.monic_from_code(field, d, code) for code in range(field.q ** d)]


@functools.lru_cache(maxsize=None)
def _prime_list(field, d):
    """Monic primes of degree d via an Eratosthenes-style sieve on codes."""
    q = field.q
    if d == 1:
        return tuple(Poly(field, (c, 1)) for c in range(q))
    composite = bytearray(q ** d)
    for a in range(1, d // 2 + 1):
        for p in _prime_list(field, a):
            for m in monic_polys(field, d - a):
                composite[(p * m).monic_code()] = 1
    return tuple(
        Poly.monic_from_code(field, d, code)
        for code in range(q ** d)
        if not composite[code]
    )


def primes(field, d):
    """Monic prime polynomials of degree d, deterministic order."""
    if d < 1:
        raise ValueError("primes have degree >= 1")
    return _prime_list(field, d)


def squarefree_monics(field, d):
    return [f for f in monic_polys(field, d) if is_squarefree(f)]


def enumerate_polys(field, d, kind, start=0, stop=None):
    """Ordered stream of degree-d polynomials of the given kind.

    kind is one of "monic", "prime", "squarefree-monic".  The order is
    ascending integer code (descending-degree lexicographic on printed
    coefficients), and [start:stop) slices the stream by index so callers
    can partition work deterministically.
    """
    if kind == "monic":
        if d < 0:
            raise ValueError("degree must be >= 0")
        rng = range(field.q ** d)[start:stop]
        return [Poly.monic_from_code(field, d, code) for code in rng]
    if kind == "prime":
        if d < 1:
            raise ValueError("prime enumeration needs degree >= 1")
        return list(primes(field, d)[start:stop])
    if kind == "squarefree-monic":
        if d < 0:
            raise ValueError("degree must be >= 0")
        return _squarefree_cache(field, d)[start:stop]
    raise ValueError(f"unknown enumeration kind {kind!r}")


@functools.lru_cache(maxsize=None)
def _squarefree_cache(field, d):
    return squarefree_monics(field, d)


def prime_count_exact(q, n):
    """pi_q(n) by the divisor-sum formula (1/n) sum_{d|n} mu(d) q^{n/d}."""
    if n < 1:
        raise ValueError("prime counts need n >= 1")
    total = 0
    for d in range(1, n + 1):
        if n % d == 0:
            mu = _mobius_int(d)
            if mu:
                total += mu * q ** (n // d)
    assert total % n == 0
    return total // n


def _mobius_int(n):
    fac = _factor_int(n)
    if any(a > 1 for a in fac.values()):
        return 0
    return (-1) ** len(fac)


def squarefree_count(q, d):
    """Number of square-free monic polynomials of degree d."""
    if d < 0:
        raise ValueError("degree must be >= 0")
    if d <= 1:
        return q ** d
    return q ** d - q ** (d - 1)


# ---------------------------------------------------------------------------
# Quadratic residue symbols
# ---------------------------------------------------------------------------


def legendre_symbol(f, p, method="euler"):
    """(f/p) for p monic irreducible: 0 if p | f, else +-1 by squareness
    of f mod p.

    method="euler" runs the Euler criterion f^((q^deg p - 1)/2) mod p;
    method="reciprocity" runs the Jacobi-symbol reduction, which must
    agree (both are exercised by the test suite).
    """
    if p.is_constant() or not p.is_monic() or not is_irreducible(p):
        raise ValueError("second argument must be monic irreducible")
    if method == "euler":
        r = f % p
        if r.is_zero():
            return 0
        acc = _poly_powmod(r, (f.field.q ** p.degree - 1) // 2, p)
        if acc == Poly.one(f.field):
            return 1
        if acc == Poly.constant(f.field, f.field.neg(1)):
            return -1
        raise ArithmeticError("Euler criterion did not land on +-1")
    if method == "reciprocity":
        return jacobi_symbol(f, p)
    raise ValueError(f"unknown method {method!r}")


def _poly_powmod(base, n, modulus):
    r = Poly.one(base.field)
    base = base % modulus
    while n:
        if n & 1:
            r = (r * base) % modulus
        base = (base * base) % modulus
        n >>= 1
    return r


def _chi_q_unit(field, c):
    """Quadratic character of F_q at a unit c (interpreted in the base field)."""
    return field.chi2(c % field.q)


def jacobi_symbol(f, m):
    """Jacobi symbol (f/m) for monic m, via quadratic reciprocity.

    Multiplicative in both arguments; for monic coprime A, B it satisfies
    (A/B)(B/A) = (-1)^((q-1)/2 * deg A * deg B), and a constant c has
    (c/m) = chi_q(c)^deg(m).  Returns 0 when gcd(f, m) != 1.
    """
    if m.is_zero() or not m.is_monic():
        raise ValueError("modulus must be monic and nonzero")
    field = f.field
    flip_parity = (field.q - 1) // 2  # exponent parity driver
    sign = 1
    a, b = f, m
    while True:
        if b.is_constant():
            return sign
        a = a % b
        if a.is_zero():
            return 0
        c = a.leading
        a = a.to_monic()
        if c != 1:
            s = _chi_q_unit(field, c)
            if s == -1 and b.degree % 2 == 1:
                sign = -sign
        if a.is_constant():
            return sign
        if (flip_parity * a.degree * b.degree) % 2 == 1:
            sign = -sign
        a, b = b, a


def quad_char_eval(f, x, ext=None):
    """chi_2(f(x)) for x in P^1(F_{q^n}).

    x is either INFINITY or an element code of `ext` (an ExtensionField
    over f's field; defaults to the degree-1 extension, i.e. the base
    field itself).  chi_2 is the unique quadratic character of the
    evaluation field; at infinity the convention is chi_2(leading
    coefficient) for even-degree f and 0 for odd degree.
    """
    if f.is_zero():
        raise ValueError("character of the zero polynomial is undefined")
    if ext is None:
        ext = extension_field(f.field, 1)
    if x is INFINITY:
        if f.degree % 2 == 1:
            return 0
        return ext.chi2(ext.embed_base(f.leading))
    return ext.chi2(ext.eval_poly(f, x))


# ---------------------------------------------------------------------------
# Extension fields F_{q^n} with discrete-log tables
# ---------------------------------------------------------------------------


class ExtensionField:
    """F_{q^n} built as base[T]/(modulus), modulus the least monic
    irreducible of degree n over the base.

    Element codes are base-q digit vectors packed into ints in range(q^n);
    the base field embeds as the codes 0..q-1.  Multiplication, powering
    and the quadratic character run off exp/log tables relative to a fixed
    generator of the (cyclic) multiplicative group, so chi_2 is a log
    parity lookup.
    """

    def __init__(self, base, n, modulus=None):
        if n < 1:
            raise ValueError("extension degree must be >= 1")
        self.base = base
        self.n = n
        self.q = base.q
        self.order = base.q ** n
        if modulus is None:
            cands = monic_polys(base, n)
            modulus = next(f for f in cands if n == 1 or is_irreducible(f))
        else:
            if modulus.degree != n or not modulus.is_monic():
                raise ValueError("modulus must be monic of degree n")
            if n > 1 and not is_irreducible(modulus):
                raise ValueError("modulus is not irreducible")
        self.modulus = modulus
        self._build_tables()

    # -- raw code arithmetic (digit vectors over the base field) --

    def _decode(self, code):
        return _decode_digits(code, self.n, self.q)

    def _encode(self, digits):
        return sum(c * self.q ** i for i, c in enumerate(digits))

    def add(self, a, b):
        F = self.base
        da, db = self._decode(a), self._decode(b)
        return self._encode(tuple(F.add(x, y) for x, y in zip(da, db)))

    def _mul_codes(self, a, b):
        F = self.base
        da, db = _vtrim(self._decode(a)), _vtrim(self._decode(b))
        if not da or not db:
            return 0
        prod = [0] * (len(da) + len(db) - 1)
        for i, ai in enumerate(da):
            if ai:
                for j, bj in enumerate(db):
                    prod[i + j] = F.add(prod[i + j], F.mul(ai, bj))
        mod = self.modulus.coeffs
        k = self.n
        for i in range(len(prod) - 1, k - 1, -1):
            c = prod[i]
            if c:
                prod[i] = 0
                for j in range(k):
                    prod[i - k + j] = F.sub(prod[i - k + j], F.mul(c, mod[j]))
        return self._encode(prod[:k])

    def _build_tables(self):
        Q = self.order
        g = self._find_generator()
        exp = np.zeros(2 * (Q - 1), dtype=np.int64)
        log = np.full(Q, -1, dtype=np.int64)
        acc = 1
        for j in range(Q - 1):
            exp[j] = acc
            log[acc] = j
            acc = self._mul_codes(acc, g)
        if acc != 1:
            raise AssertionError("generator order mismatch")
        exp[Q - 1:] = exp[: Q - 1]
        self.generator = g
        self._exp = exp
        self._log = log
        # chi2 by log parity: squares are even powers of the generator
        chi = np.where(log % 2 == 0, 1, -1).astype(np.int8)
        chi[0] = 0
        self._chi2 = chi

    def _find_generator(self):
        Q = self.order
        prime_divs = list(_factor_int(Q - 1))
        for cand in range(2, Q):
            if all(self._pow_codes(cand, (Q - 1) // r) != 1 for r in prime_divs):
                return cand
        raise RuntimeError("no generator found")

    def _pow_codes(self, a, n):
        r = 1
        while n:
            if n & 1:
                r = self._mul_codes(r, a)
            a = self._mul_codes(a, a)
            n >>= 1
        return r

    # -- public ops --

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def pow(self, a, n):
        if a == 0:
            if n == 0:
                return 1
            return 0
        return int(self._exp[(self._log[a] * n) % (self.order - 1)])

    def chi2(self, a):
        return int(self._chi2[a])

    def embed_base(self, c):
        return c % self.q

    def elements(self):
        return range(self.order)

    def eval_poly(self, f, x):
        """f over the base field evaluated at the code x."""
        acc = 0
        for c in reversed(f.coeffs):
            acc = self.add(self.mul(acc, x), self.embed_base(c))
        return acc

    # -- vectorized helpers --

    def _mul_vec(self, a, b):
        out = np.zeros_like(a)
        nz = (a != 0) & (b != 0)
        out[nz] = self._exp[self._log[a[nz]] + self._log[b[nz]]]
        return out

    def eval_poly_all(self, f):
        """Values f(x) for every x in the field, as a code array of
        length q^n indexed by x."""
        xs = np.arange(self.order, dtype=np.int64)
        acc = np.zeros(self.order, dtype=np.int64)
        for c in reversed(f.coeffs):
            acc = self._mul_vec(acc, xs)
            c = self.embed_base(c)
            if c:
                if self.base.e == 1:
                    low = acc % self.q
                    acc = acc - low + (low + c) % self.q
                else:
                    # digit-0 addition in a non-prime base field
                    low = acc % self.q
                    add = np.array([self.base.add(int(v), c) for v in low])
                    acc = acc - low + add
        return acc

    def chi_vector(self, f):
        """(chi array over finite x, chi at infinity) for chi_2(f(x))."""
        values = self.eval_poly_all(f)
        chi_fin = self._chi2[values]
        if f.degree % 2 == 1:
            chi_inf = 0
        else:
            chi_inf = self.chi2(self.embed_base(f.leading))
        return chi_fin, chi_inf

    def zero_count(self, f):
        """Number of x in F_{q^n} with f(x) = 0."""
        return int(np.count_nonzero(self.eval_poly_all(f) == 0))

    def subfield_mask(self, m):
        """Boolean array marking the image of F_{q^m} (requires m | n)."""
        if self.n % m != 0:
            raise ValueError("not a subfield degree")
        step = (self.order - 1) // (self.q ** m - 1)
        mask = np.zeros(self.order, dtype=bool)
        mask[0] = True
        mask[1:] = self._log[1:] % step == 0
        return mask

    def __repr__(self):
        return f"ExtensionField({self.base!r}, n={self.n})"


@functools.lru_cache(maxsize=None)
def extension_field(base, n):
    """Cached F_{q^n} with the canonical (least) modulus."""
    return ExtensionField(base, n)
