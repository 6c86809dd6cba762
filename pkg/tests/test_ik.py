import pytest
from mpmath import mp

from gefp_lab.errors import DuplicateRapidity, TooLarge
from gefp_lab.ik import (PhiJet, a_fn, b_fn, gefp_homogeneous_nxn,
                         gefp_inhom_determinant, gefp_inhom_recurrence,
                         homogeneous_partition_jets, ik_partition,
                         k_polynomial, partially_inhomogeneous_partition,
                         phi_fn)
from gefp_lab.oracle import (WeightGrid, YoungProfile, gefp_oracle,
                             partition_function_oracle)
from gefp_lab.params import SpectralData, VertexWeights

LAM3 = ("0.31", "0.73", "1.17")
NU3 = ("0.11", "0.52", "0.26")
ETA = "0.41"


def spectral(n, eta=ETA):
    lams = [mp.mpf(x) for x in LAM3] + [mp.mpf("0.55")]
    nus = [mp.mpf(x) for x in NU3] + [mp.mpf("0.91")]
    return SpectralData(lams[:n], nus[:n], mp.mpf(eta))


def test_ik_single_site_collapses_to_c():
    with mp.workprec(128):
        spec = SpectralData([mp.mpf("0.8")], [mp.mpf("0.2")], mp.mpf("0.3"))
        z = ik_partition(spec)
        lam, nu, eta = spec.lambdas[0], spec.nus[0], spec.eta
        direct = a_fn(lam, nu, eta) * b_fn(lam, nu, eta) * phi_fn(lam, nu, eta)
        assert abs(z - mp.sin(2 * eta)) < mp.mpf("1e-36")
        assert abs(z - direct) < mp.mpf("1e-36")


def test_ik_matches_oracle_spec_point():
    with mp.workprec(128):
        spec = SpectralData(["0.3", "0.7"], ["0.1", "0.5"], "0.4")
        z = ik_partition(spec)
        zo = partition_function_oracle(WeightGrid.from_spectral(spec))
        assert abs(z - zo) / abs(zo) < mp.mpf("1e-25")


def test_ik_duplicate_rapidity():
    with mp.workprec(64):
        spec = SpectralData(["0.3", "0.3"], ["0.1", "0.5"], "0.4")
        with pytest.raises(DuplicateRapidity):
            ik_partition(spec)


def test_ik_symmetric_under_rapidity_permutations():
    with mp.workprec(128):
        spec = spectral(3)
        base = ik_partition(spec)
        for perm in ((1, 0, 2), (2, 1, 0), (1, 2, 0)):
            lam2 = [spec.lambdas[i] for i in perm]
            nu2 = [spec.nus[i] for i in perm]
            z1 = ik_partition(SpectralData(lam2, spec.nus, spec.eta))
            z2 = ik_partition(SpectralData(spec.lambdas, nu2, spec.eta))
            assert abs(z1 - base) / abs(base) < mp.mpf("1e-33")
            assert abs(z2 - base) / abs(base) < mp.mpf("1e-33")


def test_ik_richardson_convergence_to_homogeneous():
    with mp.workprec(192):
        lam, eta = mp.mpf("1.1"), mp.mpf("0.35")
        z_hom = homogeneous_partition_jets(3, lam, eta)
        errs = []
        for h in (mp.mpf("1e-2"), mp.mpf("5e-3")):
            lams = [lam + k * h for k in range(3)]
            nus = [k * h / 3 for k in range(3)]
            errs.append(abs(ik_partition(SpectralData(lams, nus, eta)) - z_hom))
        assert errs[1] < errs[0]


def test_partially_inhomogeneous_matches_oracle():
    with mp.workprec(128):
        eta = mp.mpf("0.35")
        lams = [mp.mpf("1.05"), mp.mpf("1.3"), mp.mpf("0.9")]
        z = partially_inhomogeneous_partition(lams, eta)
        spec = SpectralData(lams, [mp.mpf(0)] * 3, eta)
        zo = partition_function_oracle(WeightGrid.from_spectral(spec))
        assert abs(z - zo) / abs(zo) < mp.mpf("1e-30")


def test_homogeneous_jets_examples():
    with mp.workprec(128):
        eta = mp.mpf("0.3")
        assert abs(homogeneous_partition_jets(1, mp.mpf("1.0"), eta)
                   - mp.sin(2 * eta)) < mp.mpf("1e-36")
        # free fermion point: Z_2 = c^2 (a^2 + b^2) = 1
        z2 = homogeneous_partition_jets(2, mp.pi / 2, mp.pi / 4)
        assert abs(z2 - 1) < mp.mpf("1e-35")
        z3 = homogeneous_partition_jets(3, mp.pi / 2, mp.pi / 6)
        assert abs(z3 - 7 * (mp.sqrt(3) / 2) ** 9) < mp.mpf("1e-35")


def test_k_polynomial_basics():
    with mp.workprec(128):
        k0 = k_polynomial(0, mp.mpf("1.2"), mp.mpf("0.4"))
        assert k0.degree == 0 and abs(k0.coeffs[0] - 1) < mp.mpf("1e-36")
        k3 = k_polynomial(3, mp.pi / 2, mp.pi / 5)
        assert k3.degree == 3 and abs(k3.coeffs[3]) > mp.mpf("1e-10")


def _fd_phi_derivs(lam, eta, top):
    """Finite-difference rebuild of phi derivatives (test oracle only)."""
    def phi(x):
        return mp.sin(2 * eta) / (mp.sin(x + eta) * mp.sin(x - eta))
    h = mp.mpf(2) ** -60
    derivs = [phi(lam)]
    for m in range(1, top + 1):
        if m == 1:
            d = (phi(lam - 2 * h) - 8 * phi(lam - h) + 8 * phi(lam + h)
                 - phi(lam + 2 * h)) / (12 * h)
        elif m == 2:
            d = (-phi(lam - 2 * h) + 16 * phi(lam - h) - 30 * phi(lam)
                 + 16 * phi(lam + h) - phi(lam + 2 * h)) / (12 * h * h)
        elif m == 3:
            d = (-phi(lam - 2 * h) + 2 * phi(lam - h) - 2 * phi(lam + h)
                 + phi(lam + 2 * h)) / (2 * h ** 3)
        else:
            d = (phi(lam - 2 * h) - 4 * phi(lam - h) + 6 * phi(lam)
                 - 4 * phi(lam + h) + phi(lam + 2 * h)) / h ** 4
        derivs.append(d)
    return derivs


def test_k2_against_finite_difference_rebuild():
    lam, eta = mp.pi / 2, mp.pi / 4
    with mp.workprec(128):
        k2 = k_polynomial(2, lam, eta)
    with mp.workprec(512):
        import math
        pd = _fd_phi_derivs(lam, eta, 4)
        from gefp_lab.algebra import det
        den = det([[pd[j + k] for k in range(3)] for j in range(3)])
        coeffs = []
        for j in range(3):
            rows = [r for r in range(3) if r != j]
            minor = det([[pd[r + k] for k in range(2)] for r in rows])
            coeffs.append((-1) ** j * minor)
        scale = math.factorial(2) * pd[0] ** 3 / den
        rebuilt = [scale * c for c in coeffs]
    for a, b in zip(k2.coeffs, rebuilt):
        assert abs(a - b) <= mp.mpf("1e-25") * max(1, abs(b))


def test_phi_jet_order_guard():
    with mp.workprec(64):
        phi = PhiJet(mp.mpf("1.1"), mp.mpf("0.4"), 3)
        with pytest.raises(ValueError):
            phi.derivatives(4)


def test_recurrence_empty_profile_is_one():
    with mp.workprec(128):
        spec = spectral(3)
        assert gefp_inhom_recurrence(spec, YoungProfile(3, ())) == 1


def test_recurrence_matches_oracle():
    with mp.workprec(128):
        spec = spectral(3)
        grid = WeightGrid.from_spectral(spec)
        for r in ((2,), (2, 3), (1, 2), (3, 3, 3)):
            rec = gefp_inhom_recurrence(spec, YoungProfile(3, r))
            orc = gefp_oracle(grid, YoungProfile(3, r)).value
            assert abs(rec - orc) <= mp.mpf("1e-22") * max(1, abs(orc))


def test_determinant_matches_recurrence_and_oracle():
    with mp.workprec(128):
        spec = spectral(3)
        for r in ((2,), (1, 2), (2, 3), (2, 2, 3)):
            p = YoungProfile(3, r)
            rec = gefp_inhom_recurrence(spec, p)
            detv = gefp_inhom_determinant(spec, p)
            assert abs(rec - detv) <= mp.mpf("1e-20") * max(1, abs(rec))
        spec4 = spectral(4)
        grid4 = WeightGrid.from_spectral(spec4)
        p = YoungProfile(4, (2, 4))
        detv = gefp_inhom_determinant(spec4, p)
        orc = gefp_oracle(grid4, p).value
        assert abs(detv - orc) <= mp.mpf("1e-20") * max(1, abs(orc))


def test_determinant_shift_invariance():
    with mp.workprec(128):
        spec = spectral(3)
        p = YoungProfile(3, (2, 3))
        base = gefp_inhom_determinant(spec, p)
        shifted = gefp_inhom_determinant(spec, p, shift=mp.mpf("0.2"))
        assert abs(base - shifted) <= mp.mpf("1e-20") * max(1, abs(base))


def test_determinant_permutation_cap():
    with mp.workprec(64):
        lams = [mp.mpf("0.2") + k * mp.mpf("0.13") for k in range(8)]
        nus = [mp.mpf("0.05") + k * mp.mpf("0.11") for k in range(8)]
        spec = SpectralData(lams, nus, mp.mpf("0.29"))
        with pytest.raises(TooLarge):
            gefp_inhom_determinant(spec, YoungProfile(8, (4,)))


def test_homogeneous_nxn_prefactor_readings():
    """Per-row exponents are required; one shared exponent only works for
    constant profiles."""
    with mp.workprec(128):
        lam, eta = mp.mpf("1.1"), mp.mpf("0.35")
        w = VertexWeights.from_abc(mp.sin(lam + eta), mp.sin(lam - eta),
                                   mp.sin(2 * eta))
        grid = WeightGrid.from_weights(3, w)
        for r in ((1, 2), (2, 3), (1, 2, 3), (2, 2)):
            p = YoungProfile(3, r)
            orc = gefp_oracle(grid, p).value
            good = gefp_homogeneous_nxn(3, p, lam, eta, row_prefactor=True)
            assert abs(good - orc) <= mp.mpf("1e-25") * max(1, abs(orc))
        # constant profile: both readings coincide
        p = YoungProfile(3, (2, 2))
        a = gefp_homogeneous_nxn(3, p, lam, eta, row_prefactor=True)
        b = gefp_homogeneous_nxn(3, p, lam, eta, row_prefactor=False)
        assert abs(a - b) <= mp.mpf("1e-30")
        # non-constant profile: the shared-exponent reading disagrees
        p = YoungProfile(3, (1, 3))
        orc = gefp_oracle(grid, p).value
        bad = gefp_homogeneous_nxn(3, p, lam, eta, row_prefactor=False)
        assert abs(bad - orc) > mp.mpf("1e-6")
