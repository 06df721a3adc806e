"""Family enumeration, point counts, zeta numerators."""

import random

import pytest

from ffstat import biquad, ffpoly
from ffstat.errors import InvariantError
from ffstat.ffpoly import GF, INFINITY, Poly, extension_field, quad_char_eval

F3 = GF(3)
F5 = GF(5)


def P3(*coeffs):
    return Poly.from_coeffs(F3, coeffs)


WORKED = lambda: biquad.CurveTriple(P3(1, 0, 1), P3(2, 1, 1), Poly.one(F3))


def test_genus_length_examples():
    assert biquad.genus_length(1, 1, 1) == 3
    assert biquad.genus_length(2, 2, 0) == 4
    assert biquad.genus_length(3, 1, 0) == 5


def test_patterns_g0():
    kept, excluded = biquad.admissible_patterns(0)
    assert sorted(kept) == [(0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 1)]
    assert excluded == []


def test_patterns_g1_exclusion():
    kept, excluded = biquad.admissible_patterns(1)
    for pat in [(4, 0, 0), (0, 4, 0), (0, 0, 4), (3, 0, 0), (0, 3, 0), (0, 0, 3)]:
        assert pat in excluded
        assert pat not in kept
    # the exclusion never triggers for even genus: those patterns fail the
    # length test outright
    kept2, excluded2 = biquad.admissible_patterns(2)
    assert excluded2 == []


def test_family_counts():
    assert biquad.family_size(F3, 0) == 24
    assert biquad.family_size(F3, 0, biquad.FULL) == 96
    assert biquad.family_size(F3, 1) == 144  # frozen from the enumeration
    assert biquad.family_size(F3, 2) == 504
    from fractions import Fraction

    size, ratio = biquad.family_size_ratio(F3, 0)
    assert size == 24 and ratio == Fraction(24, 27)


@pytest.mark.parametrize("q,g", [(3, 0), (3, 1), (3, 2), (5, 0), (5, 1)])
def test_full_variant_scaling(q, g):
    field = GF(q)
    assert (biquad.family_size(field, g, biquad.FULL)
            == (q - 1) ** 2 * biquad.family_size(field, g))


def test_family_g0_members_are_distinct_linears():
    for t in biquad.enumerate_family(F3, 0):
        degs = sorted(int(f.degree) for f in (t.f1, t.f2, t.f3))
        assert biquad.genus_length(*(int(f.degree) for f in (t.f1, t.f2, t.f3))) == 3
        assert t.genus == 0


def test_enumeration_slicing_matches_full_stream():
    full = list(biquad.enumerate_family(F3, 1, biquad.FULL))
    pieces = []
    for a in range(0, len(full), 100):
        pieces.extend(biquad.enumerate_family(F3, 1, biquad.FULL, start=a, stop=a + 100))
    assert pieces == full
    assert len(full) == biquad.family_size(F3, 1, biquad.FULL)


def test_triple_validation():
    x = Poly.x(F3)
    with pytest.raises(ValueError):
        biquad.CurveTriple(x * x, P3(1, 1), Poly.one(F3))  # not square-free
    with pytest.raises(ValueError):
        biquad.CurveTriple(x, x, Poly.one(F3))  # shared factor
    with pytest.raises(ValueError):
        biquad.CurveTriple(P3(1, 1), Poly.one(F3), x.scale(2))  # f3 not monic
    with pytest.raises(ValueError):
        # degenerate multiset {g+2,0,0} at g = 1
        f = P3(0, 1) * P3(1, 1) * P3(2, 1)  # degree 3 square-free
        biquad.CurveTriple(f, Poly.one(F3), Poly.one(F3))


def test_worked_curve_counts():
    t = WORKED()
    assert t.genus == 1
    data = biquad.zeta_numerator(t, n_max=2)
    assert data.N[0] == 4 and data.T[0] == 0
    assert data.pc == (1, 0, 3)
    assert data.T[1] == -6 and data.N[1] == 16
    assert data.n_from_pc(3, 2) == 16


def test_worked_curve_counts_against_pointwise_oracle():
    # independent recount of N_1, N_2 using scalar quad_char_eval per point
    t = WORKED()
    for n in (1, 2):
        ext = extension_field(F3, n)
        prods = t.pair_products()
        total = 0
        for x in list(ext.elements()) + [INFINITY]:
            total += 1 + sum(quad_char_eval(h, x, ext) for h in prods)
        assert total == biquad.curve_counts(t, n).N[n - 1]


def test_genus0_traces_vanish():
    for t in biquad.enumerate_family(F3, 0):
        data = biquad.zeta_numerator(t, n_max=3)
        assert data.pc == (1,)
        assert data.T == (0, 0, 0)


def test_point_count_range():
    for t in list(biquad.enumerate_family(F3, 2))[::25]:
        data = biquad.curve_counts(t, 3)
        for n, N in enumerate(data.N, start=1):
            assert 0 <= N <= 4 * (3 ** n + 1)


@pytest.mark.parametrize("q,g", [(3, 1), (3, 2), (5, 1)])
def test_zeta_numerator_structure(q, g):
    field = GF(q)
    for t in biquad.enumerate_family(field, g):
        data = biquad.zeta_numerator(t)
        assert len(data.pc) == 2 * g + 1 and data.pc[2 * g] != 0
        for j in range(2 * g + 1):
            assert data.pc[j] * q ** g == q ** j * data.pc[2 * g - j]
        assert biquad.pc_rh_deviation(data.pc, q) < 1e-9


def test_zeta_numerator_structure_sampled_g3():
    # spot coverage of the larger grids: strided samples keep runtime sane
    rng = random.Random(2)
    for field, g, step in ((F3, 3, 37), (F5, 2, 151)):
        total = biquad.family_size(field, g)
        for idx in range(rng.randrange(step), total, step):
            t = biquad.family_member(field, g, biquad.MONIC, idx)
            data = biquad.zeta_numerator(t)
            assert len(data.pc) == 2 * g + 1
            for j in range(2 * g + 1):
                assert data.pc[j] * field.q ** g == field.q ** j * data.pc[2 * g - j]
            assert biquad.pc_rh_deviation(data.pc, field.q) < 1e-9


def test_degree_ledger():
    # with D1 = f1 f3, D2 = f2 f3, D3 = f1 f2: sum of (deg Di - 1 - lam_i) = 2g
    for (field, g) in [(F3, 0), (F3, 1), (F3, 2), (F5, 1)]:
        for t in biquad.enumerate_family(field, g):
            total = 0
            for h in t.pair_products():
                deg = int(h.degree)
                lam = 1 if deg % 2 == 0 else 0
                total += deg - 1 - lam
            assert total == 2 * g, t


def test_trace_formula_decomposition():
    # T_n equals minus the sum of the three pair character sums, recomputed
    # through the scalar evaluator
    rng = random.Random(9)
    triples = list(biquad.enumerate_family(F3, 2))
    for t in rng.sample(triples, 8):
        for n in (1, 2):
            ext = extension_field(F3, n)
            s = 0
            for h in t.pair_products():
                for x in list(ext.elements()) + [INFINITY]:
                    s += quad_char_eval(h, x, ext)
            assert biquad.curve_counts(t, n).T[n - 1] == -s


def test_odd_n_constant_twist_cancellation():
    # for odd n, averaging chi2(c * f(x)) over the q-1 leading constants is 0
    ext = extension_field(F3, 3)
    rng = random.Random(13)
    for _ in range(30):
        f = Poly.from_coeffs(F3, [rng.randrange(3) for _ in range(4)] + [1])
        x = rng.randrange(ext.order)
        val = ext.eval_poly(f, x)
        if val == 0:
            continue
        assert sum(ext.chi2(ext.mul(ext.embed_base(c), val)) for c in F3.units()) == 0


def test_inconsistent_counts_raise(monkeypatch):
    # corrupting a point count must trip the zeta-numerator consistency check
    t = WORKED()
    real = biquad.curve_counts

    def corrupted(triple, n_max):
        data = real(triple, n_max)
        bad_T = data.T[:-1] + (data.T[-1] + 3,)
        return biquad.CurveData(data.N, bad_T)

    monkeypatch.setattr(biquad, "curve_counts", corrupted)
    with pytest.raises(InvariantError):
        biquad.zeta_numerator(t)


def test_eigenphases_worked_curve():
    import numpy as np

    phases = biquad.eigenphases((1, 0, 3))
    assert np.allclose(sorted(phases), [-np.pi / 2, np.pi / 2])
