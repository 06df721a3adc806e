"""Quadratic characters, L-polynomials, completion, traces, explicit formula."""

import random
from fractions import Fraction

import pytest

from ffstat import ffpoly, lfunc
from ffstat.errors import InvariantError
from ffstat.ffpoly import GF, Poly

F3 = GF(3)
F5 = GF(5)


def P3(*coeffs):
    return Poly.from_coeffs(F3, coeffs)


def all_squarefree_moduli(field, max_deg):
    for d in range(1, max_deg + 1):
        for f in ffpoly.enumerate_polys(field, d, "squarefree-monic"):
            yield f


# -- character basics -----------------------------------------------------------


def test_char_values_worked():
    chi_p = lfunc.QuadChar(P3(1, 0, 1), lfunc.PLUS)
    chi_m = lfunc.QuadChar(P3(1, 0, 1), lfunc.MINUS)
    x = Poly.x(F3)
    assert chi_p(x) == 1 and chi_m(x) == -1
    # sign twist is invisible on even degrees
    f = P3(2, 1, 1)
    assert chi_p(f) == chi_m(f)
    # shared factor kills the value
    assert chi_p(P3(1, 0, 1) * x) == 0


def test_char_modulus_validation():
    with pytest.raises(ValueError):
        lfunc.QuadChar(Poly.x(F3) ** 2)  # not square-free
    with pytest.raises(ValueError):
        lfunc.QuadChar(Poly.one(F3))  # constant


def test_nonmonic_modulus_normalizes():
    d = P3(1, 0, 1)
    assert lfunc.QuadChar(d.scale(2)).modulus == d


# -- L-polynomials ----------------------------------------------------------------


def test_l_polynomial_worked_example():
    raw_p = lfunc.l_polynomial(lfunc.QuadChar(P3(1, 0, 1), lfunc.PLUS))
    raw_m = lfunc.l_polynomial(lfunc.QuadChar(P3(1, 0, 1), lfunc.MINUS))
    assert raw_p.coeffs == (1, -1)
    assert raw_m.coeffs == (1, 1)
    ls = lfunc.complete_l(raw_p)
    assert ls.coeffs == (1,) and ls.delta == 0 and ls.lam == 1


def test_completion_degree_bookkeeping():
    # odd-degree modulus: lambda = 0 and L* = L
    x = Poly.x(F3)
    D = x * P3(1, 1) * P3(2, 1) * P3(1, 0, 1)  # degree 5, square-free
    raw = lfunc.l_polynomial(lfunc.QuadChar(D))
    ls = lfunc.complete_l(raw)
    assert raw.lam == 0 and ls.coeffs == raw.coeffs
    assert ls.degree == 4 == 2 * ls.delta


def test_minus_is_plus_at_minus_u():
    for D in all_squarefree_moduli(F3, 4):
        raw_p = lfunc.l_polynomial(lfunc.QuadChar(D, lfunc.PLUS))
        raw_m = lfunc.l_polynomial(lfunc.QuadChar(D, lfunc.MINUS))
        assert raw_m.coeffs == tuple((-1) ** i * c for i, c in enumerate(raw_p.coeffs))


def test_coefficients_vanish_from_modulus_degree():
    # one extra coefficient beyond the stated degree bound is identically zero
    for D in [P3(1, 0, 1), P3(1, 1) * P3(2, 1), Poly.x(F3) * P3(1, 0, 1)]:
        chi = lfunc.QuadChar(D)
        d = int(D.degree)
        extra = sum(lfunc.char_value(chi, f) for f in ffpoly.monic_polys(F3, d))
        assert extra == 0


def test_functional_equation_and_rh_pure_grid():
    for field in (F3,):
        q = field.q
        for D in all_squarefree_moduli(field, 4):
            raw = lfunc.l_polynomial(lfunc.QuadChar(D))
            ls = lfunc.complete_l(raw)
            assert ls.degree == int(D.degree) - 1 - raw.lam
            assert lfunc.functional_equation_ok(ls, q)
            assert lfunc.rh_max_deviation(ls, q) < 1e-9


def test_explicit_formula_matches_newton_pure_grid():
    for D in all_squarefree_moduli(F3, 4):
        chi = lfunc.QuadChar(D)
        _, ls, frob, _ = lfunc.l_data(chi, n_max=8)
        for n in range(1, 9):
            assert lfunc.explicit_formula_trace(chi, n) == -frob.t[n - 1], (D, n)


def test_explicit_formula_worked_values():
    chi = lfunc.QuadChar(P3(1, 0, 1))
    # lambda = 1 and the degree-n von Mangoldt sums are both -1
    assert lfunc.explicit_formula_trace(chi, 1) == 0
    assert lfunc.explicit_formula_trace(chi, 2) == 0


def test_newton_traces_worked():
    ls = lfunc.LPoly((1, 0, 3), 3, lfunc.PLUS, completed=True, q=3)
    frob = lfunc.frobenius_traces(ls, 2)
    assert frob.t == (0, -6)
    assert frob.trace(2) == -2.0


def test_trace_unitarity_bound():
    for D in all_squarefree_moduli(F3, 5):
        _, ls, frob, _ = lfunc.l_data(lfunc.QuadChar(D), n_max=6)
        for n, t in enumerate(frob.t, start=1):
            assert abs(t) <= 2 * ls.delta * 3 ** (n / 2) * (1 + 1e-9)


def test_delta_zero_all_traces_vanish():
    ls = lfunc.LPoly((1,), 2, lfunc.PLUS, completed=True, q=3)
    assert lfunc.frobenius_traces(ls, 6).t == (0,) * 6


def test_nonexact_division_raises():
    bogus = lfunc.LPoly((1, 1), 2, lfunc.PLUS, completed=False, q=3)
    with pytest.raises(InvariantError):
        lfunc.complete_l(bogus)


def test_prime_char_sum_bound():
    # |sum over deg-n primes of chi_D| <= deg(D) q^(n/2), squared to stay exact
    for D in all_squarefree_moduli(F3, 4):
        for n in range(1, 7):
            s = lfunc.prime_char_sum(D, n)
            assert s * s <= int(D.degree) ** 2 * 3 ** n


def test_zeta_values():
    assert lfunc.zeta_q_value(3, 2) == Fraction(3, 2)
    assert lfunc.zeta_q_value(5, 2) == Fraction(5, 4)
    assert lfunc.zeta_q_value(3, 3) == Fraction(9, 8)
    with pytest.raises(ValueError):
        lfunc.zeta_q_value(3, 1)


def test_prime_power_field_l_data():
    # the scalar path also runs over non-prime base fields
    F9 = GF(3, 2)
    D = Poly.from_coeffs(F9, (1, 0, 1))
    if not ffpoly.is_squarefree(D):
        D = Poly.from_coeffs(F9, (3, 0, 1))
    chi = lfunc.QuadChar(D)
    raw, ls, frob, dev = lfunc.l_data(chi, n_max=4)
    assert raw.coeffs[0] == 1
    assert lfunc.functional_equation_ok(ls, 9)
    assert dev < 1e-9
    for n in (1, 2):
        assert lfunc.explicit_formula_trace(chi, n) == -frob.t[n - 1]


# -- batched suite ----------------------------------------------------------------


def test_l_suite_q3_small_grid_cross_checks_scalar_path():
    sampled = []
    rep = lfunc.l_suite(3, max_deg=4, n_max=6, collect=sampled.append)
    assert rep.ok(), rep.failures[:4]
    assert rep.moduli == sum(ffpoly.squarefree_count(3, d) for d in range(1, 5))
    rng = random.Random(5)
    for rec in rng.sample(sampled, 12):
        D = Poly.monic_from_code(F3, rec["deg"], rec["code"])
        chi = lfunc.QuadChar(D)
        raw = lfunc.l_polynomial(chi)
        assert raw.coeffs == rec["raw"].coeffs
        for n in (1, 3):
            assert lfunc.prime_char_sum(D, n) == rec["s"][n - 1]


def test_l_suite_q5_degree2():
    rep = lfunc.l_suite(5, max_deg=2, n_max=4)
    assert rep.ok(), rep.failures[:4]
    assert rep.moduli == 5 + 20
    assert rep.prime_sum_bound_max <= 1.0


def test_squarefree_part():
    # (1 + 2u + 3u^2)^2 reduces to the simple-root factor
    assert lfunc.squarefree_part((1, 4, 10, 12, 9)) == (1, 2, 3)
    assert lfunc.squarefree_part((1, 0, 3)) == (1, 0, 3)
