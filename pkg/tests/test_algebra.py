import random
from fractions import Fraction

import pytest
from mpmath import mp

from gefp_lab.algebra import (Jet, TruncatedSeries, UniPoly, det, det_cofactor,
                              geometric_inverse_coeffs, poly_div_exact,
                              series_invert)
from gefp_lab.errors import NotDivisible, NotInvertible


def test_det_small_examples():
    assert det([[1, 2], [3, 4]]) == -2
    eye5 = [[1 if i == j else 0 for j in range(5)] for i in range(5)]
    assert det(eye5) == 1
    assert det([]) == 1


def test_det_matches_cofactor_on_random_rationals():
    rng = random.Random(7)
    for n in range(1, 7):
        for _ in range(4):
            m = [[Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(n)]
                 for _ in range(n)]
            assert det(m) == det_cofactor(m)


def test_det_singular_returns_zero():
    m = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]
    assert det(m) == 0
    assert det([[Fraction(0), Fraction(1)], [Fraction(0), Fraction(2)]]) == 0


def test_det_needs_row_swap():
    m = [[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]]
    assert det(m) == -1


def test_det_float_matches_cofactor():
    with mp.workprec(128):
        rng = random.Random(3)
        for n in range(1, 6):
            m = [[mp.mpf(rng.randint(-9, 9)) / 4 for _ in range(n)] for _ in range(n)]
            assert abs(det(m) - det_cofactor(m)) < mp.mpf("1e-30")


def test_jet_entries_determinant_matches_cofactor():
    # 2x2 matrix of phi-jet derivatives against direct expansion
    from gefp_lab.ik import PhiJet
    with mp.workprec(128):
        phi = PhiJet(mp.mpf("1.2"), mp.mpf("0.4"), 4)
        entries = [[phi.derivative(0), phi.derivative(1)],
                   [phi.derivative(1), phi.derivative(2)]]
        expect = entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0]
        rel = abs(det(entries) - expect) / max(1, abs(expect))
        assert rel < mp.mpf("1e-35")


def _fd_derivative(f, x0, m, h):
    """5-point central finite-difference derivative of order m <= 4."""
    pts = [f(x0 + k * h) for k in (-2, -1, 0, 1, 2)]
    if m == 0:
        return pts[2]
    if m == 1:
        return (pts[0] - 8 * pts[1] + 8 * pts[3] - pts[4]) / (12 * h)
    if m == 2:
        return (-pts[0] + 16 * pts[1] - 30 * pts[2] + 16 * pts[3] - pts[4]) / (12 * h * h)
    if m == 3:
        return (-pts[0] + 2 * pts[1] - 2 * pts[3] + pts[4]) / (2 * h ** 3)
    if m == 4:
        return (pts[0] - 4 * pts[1] + 6 * pts[2] - 4 * pts[3] + pts[4]) / h ** 4
    raise ValueError(m)


def test_sin_jet_matches_finite_differences():
    # order-8 jet of sin around a random base; orders 0..4 within 10 ulp at 128 bits
    rng = random.Random(11)
    for _ in range(3):
        base = mp.mpf(rng.uniform(0.5, 1.2))
        with mp.workprec(128):
            jet = Jet.sin_offset(base, 8)
            derivs = [jet.derivative(m) for m in range(5)]
        with mp.workprec(512):
            h = mp.mpf(2) ** -70
            for m in range(5):
                fd = _fd_derivative(mp.sin, base, m, h)
                tol = 10 * mp.mpf(2) ** -128 * max(1, abs(fd))
                assert abs(derivs[m] - fd) <= tol, (m, abs(derivs[m] - fd))


def test_jet_arithmetic_roundtrip():
    with mp.workprec(128):
        j = Jet.sin_offset(mp.mpf("0.9"), 6) + 2
        assert abs((j * j.invert()).coeffs[0] - 1) < mp.mpf("1e-35")
        for c in (j * j.invert()).coeffs[1:]:
            assert abs(c) < mp.mpf("1e-32")
        assert ((j ** 3) * (j.invert() ** 3)).coeffs[0] - 1 < mp.mpf("1e-30")


def test_jet_invert_rejects_zero_constant():
    j = Jet([Fraction(0), Fraction(1)], 3)
    with pytest.raises(NotInvertible):
        j.invert()


def test_jet_sin_cos_composition():
    with mp.workprec(128):
        theta = mp.mpf("0.8")
        var = Jet.variable(mp.mpf(0), mp.mpf(1), 6) + theta
        s, c = var.sin_cos()
        ref = Jet.sin_offset(theta, 6)
        for x, y in zip(s.coeffs, ref.coeffs):
            assert abs(x - y) < mp.mpf("1e-35")
        # pythagorean identity as jets
        one = s * s + c * c
        assert abs(one.coeffs[0] - 1) < mp.mpf("1e-35")
        assert all(abs(x) < mp.mpf("1e-33") for x in one.coeffs[1:])
        # nonlinear inner jet: sin(sin(x + theta))
        s2 = s.sin()
        assert abs(s2.coeffs[0] - mp.sin(mp.sin(theta))) < mp.mpf("1e-35")
        assert abs(s2.coeffs[1] - mp.cos(mp.sin(theta)) * mp.cos(theta)) \
            < mp.mpf("1e-35")


def test_series_invert_geometric():
    one = Fraction(1)
    f = TruncatedSeries.from_univariate([one, -one], 0, (3,), Fraction(0))
    inv = series_invert(f)
    assert [inv.coeff((m,)) for m in range(4)] == [1, 1, 1, 1]


def test_series_invert_constant():
    f = TruncatedSeries.constant((2,), Fraction(2), Fraction(0))
    assert series_invert(f).coeff((0,)) == Fraction(1, 2)


def test_series_invert_multiply_back_bivariate():
    # (1 - 2*Delta*t*z + t^2*z*w) with caps (2, 2)
    delta, t = Fraction(1, 3), Fraction(3, 4)
    zero = Fraction(0)
    f = TruncatedSeries((2, 2), zero)
    f.set_coeff((0, 0), Fraction(1))
    f.set_coeff((1, 0), -2 * delta * t)
    f.set_coeff((1, 1), t * t)
    prod = f * series_invert(f)
    assert prod.coeff((0, 0)) == 1
    assert all(v == 0 for idx, v in prod.items() if any(idx))


def test_series_invert_involution_on_random_series():
    rng = random.Random(5)
    zero = Fraction(0)
    for _ in range(5):
        f = TruncatedSeries((2, 2, 1), zero)
        f.set_coeff((0, 0, 0), Fraction(rng.randint(1, 5)))
        for idx in [(1, 0, 0), (0, 1, 0), (1, 1, 1), (2, 0, 1)]:
            f.set_coeff(idx, Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
        again = series_invert(series_invert(f))
        assert all(again.coeff(idx) == v for idx, v in f.items())
        assert all(f.coeff(idx) == v for idx, v in again.items())


def test_series_invert_rejects_zero_constant():
    f = TruncatedSeries((2,), Fraction(0))
    f.set_coeff((1,), Fraction(1))
    with pytest.raises(NotInvertible):
        series_invert(f)


def test_series_substitute_and_embed():
    zero = Fraction(0)
    f = TruncatedSeries((2, 2), zero)
    f.set_coeff((1, 1), Fraction(3))
    f.set_coeff((2, 0), Fraction(1))
    g = f.substitute_value(1, Fraction(2))
    assert g.coeff((1,)) == 6 and g.coeff((2,)) == 1
    big = f.embed((2, 3, 2), [0, 2])
    assert big.coeff((1, 0, 1)) == 3 and big.coeff((2, 0, 0)) == 1
    assert f.max_degree(0) == 2 and f.max_degree(1) == 1


def test_geometric_inverse_coeffs():
    # (z-1)^(-2) = 1 + 2z + 3z^2 + ...
    assert geometric_inverse_coeffs(2, 3, Fraction(1)) == [1, 2, 3, 4]
    assert geometric_inverse_coeffs(1, 2, Fraction(1)) == [-1, -1, -1]


def test_poly_div_exact_examples():
    z2m1 = UniPoly([Fraction(-1), Fraction(0), Fraction(1)])
    zm1 = UniPoly([Fraction(-1), Fraction(1)])
    assert poly_div_exact(z2m1, zm1).coeffs == [1, 1]
    p = UniPoly([Fraction(2), Fraction(0), Fraction(5)])
    assert poly_div_exact(p, UniPoly([Fraction(1)])) == p


def test_poly_div_exact_rejects_remainder():
    with pytest.raises(NotDivisible):
        poly_div_exact(UniPoly([Fraction(1), Fraction(1)]),
                       UniPoly([Fraction(-1), Fraction(1)]))


def test_unipoly_taylor_jet():
    p = UniPoly([Fraction(1), Fraction(-2), Fraction(3)])  # 1 - 2x + 3x^2
    jet = p.taylor_jet(Fraction(2), 2)
    # p(2 + e) = 9 + 10 e + 3 e^2
    assert jet.coeffs == [9, 10, 3]
