import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from fqhlab.potentials import Gaussian, HardCore, SoftDisc, scaled
from fqhlab.scattering import (DegenerateScatteringWarning, RadialProfile,
                               born_scattering_length, c_factor, effective_coupling,
                               reduced_scattering_length,
                               scattering_length, solve_zero_energy, solve_zero_energy_log,
                               variational_energy)

# frozen from oracles.softdisc_b (modified Bessel matching at the disc edge)
SOFTDISC_20_1 = {
    (0, 2): 0.6804284679031635,
    (1, 2): 0.48056343616429814,
    (2, 2): 0.25986968246416986,
    (0, 3): 0.684903417487,
    (1, 3): 0.34791096873409344,
    (2, 3): 0.19970061129837458,
}
# frozen from oracles.shooting_b (DOP853), Gaussian(1, 0.3) truncated at 0.9
GAUSSIAN_B1 = 0.0010055945771375713


def test_zero_potential_profile_is_one():
    prof = solve_zero_energy(SoftDisc(0.0, 1.0), 2)
    np.testing.assert_array_equal(prof.f, 1.0)
    assert prof.b == 0.0


def test_zero_potential_log_profile_is_degenerate():
    with pytest.warns(DegenerateScatteringWarning):
        prof = solve_zero_energy_log(SoftDisc(0.0, 1.0))
    assert prof.b == 0.0
    np.testing.assert_array_equal(prof.f, 1.0)


@pytest.mark.parametrize("R0", [0.5, 1.0, 2.0])
def test_hard_disc_p_wave_profile(R0):
    prof = solve_zero_energy(HardCore(R0), 1)
    r = np.linspace(1.1 * R0, 4 * R0, 50)
    np.testing.assert_allclose(prof(r), 1 - R0**2 / r**2, atol=1e-9)


def test_hard_sphere_s_wave_profile():
    prof = solve_zero_energy(HardCore(1.0), 0, dim=3)
    r = np.linspace(1.05, 4, 50)
    np.testing.assert_allclose(prof(r), 1 - 1 / r, atol=1e-9)


def test_hard_disc_log_profile():
    prof = solve_zero_energy_log(HardCore(1.0), R=10.0)
    r = np.linspace(1.0, 10.0, 40)
    np.testing.assert_allclose(prof(r), np.log(r) / math.log(10), atol=1e-9)
    assert np.all(prof(np.array([0.2, 0.9])) == 0.0)


@pytest.mark.parametrize("p", [SoftDisc(5.0, 1.0), Gaussian(3.0, 0.4), HardCore(0.7)])
@pytest.mark.parametrize("ell,dim", [(1, 2), (2, 2), (0, 3), (1, 3)])
def test_profile_bounds_and_monotone_tail(p, ell, dim):
    prof = solve_zero_energy(p, ell, dim)
    assert np.all(prof.f >= -1e-12) and np.all(prof.f <= 1 + 1e-12)
    outside = prof.r > p.support_radius
    assert np.all(np.diff(prof.f[outside]) >= -1e-14)


def test_softdisc_log_r_independence():
    b5 = solve_zero_energy_log(SoftDisc(1.0, 1.0), R=5.0).b
    b50 = solve_zero_energy_log(SoftDisc(1.0, 1.0), R=50.0).b
    assert abs(b5 - b50) / b50 < 1e-6


def test_hard_disc_examples():
    assert scattering_length(HardCore(0.5), 2).b == pytest.approx(0.0625, rel=1e-8)
    assert scattering_length(HardCore(2.0), 1, dim=3).b == pytest.approx(8.0, rel=1e-8)


def test_gaussian_p_wave_against_shooting():
    assert scattering_length(Gaussian(1.0, 0.3), 1).b == pytest.approx(GAUSSIAN_B1, rel=1e-8)


@pytest.mark.parametrize("key", sorted(SOFTDISC_20_1))
def test_softdisc_against_bessel(key):
    ell, dim = key
    assert scattering_length(SoftDisc(20.0, 1.0), ell, dim).b == pytest.approx(SOFTDISC_20_1[key], rel=1e-8)


def test_born_examples():
    assert born_scattering_length(SoftDisc(1.0, 1.0), 1) == pytest.approx(1 / 16, rel=1e-13)
    assert born_scattering_length(SoftDisc(0.0, 1.0), 1) == 0.0
    assert math.isinf(born_scattering_length(HardCore(1.0), 1))
    with pytest.raises(ValueError):
        born_scattering_length(SoftDisc(1.0, 1.0), 0)


def test_variational_energy_of_constant_profile():
    prof = solve_zero_energy(SoftDisc(0.0, 1.0), 1)
    # |grad f|^2 vanishes; what remains is (1/2) int |x|^2 v = (1/2)(pi/2)
    assert variational_energy(prof, SoftDisc(1.0, 1.0), ell=1) == pytest.approx(math.pi / 4, rel=1e-10)


def test_variational_energy_hard_disc():
    res = scattering_length(HardCore(1.0), 1)
    assert res.variational_energy == pytest.approx(4 * math.pi, rel=1e-8)


@pytest.mark.parametrize("p", [SoftDisc(20.0, 1.0), Gaussian(2.0, 0.5), HardCore(1.3)])
@pytest.mark.parametrize("ell,dim", [(1, 2), (2, 2), (3, 2), (0, 3), (2, 3)])
def test_energy_equals_b_times_surface_factor(p, ell, dim):
    res = scattering_length(p, ell, dim)
    factor = 4 * math.pi * ell if dim == 2 else 4 * math.pi * (2 * ell + 1)
    assert res.variational_energy == pytest.approx(factor * res.b, rel=1e-7)
    assert res.energy_per_b == pytest.approx(factor, rel=1e-7)


def test_perturbed_profile_has_larger_energy():
    p = SoftDisc(20.0, 1.0)
    prof = solve_zero_energy(p, 1)
    bump = 0.05 * np.exp(-((prof.r - 0.8) / 0.1) ** 2)
    dbump = bump * (-2 * (prof.r - 0.8) / 0.01)
    trial = RadialProfile(prof.r, prof.f + bump, prof.df + dbump, 1, 2, 0.0, prof.segments,
                          tail_b=prof.tail_b)
    assert variational_energy(trial, p) > variational_energy(prof, p)


@pytest.mark.parametrize("R0", [0.5, 1.0, 2.0])
def test_hard_disc_s_wave(R0):
    assert scattering_length(HardCore(R0), 0).b == pytest.approx(R0, rel=1e-8)


def test_reduced_parameter():
    res = scattering_length(HardCore(2.0), 2, dim=3)
    assert reduced_scattering_length(res) == 8 * res.b / 15
    with pytest.raises(ValueError):
        reduced_scattering_length(scattering_length(HardCore(1.0), 1))


def test_c_factor_values():
    assert c_factor(0) == 1
    assert c_factor(1) == Fraction(2, 3)
    assert c_factor(3) == Fraction(16, 35)


def test_effective_couplings():
    res = scattering_length(HardCore(1.0), 1)
    eff = effective_coupling(res, 0.1)
    assert eff.coupling == pytest.approx(8 * math.pi, rel=1e-8)
    assert eff.scale == pytest.approx(0.01)
    res3 = scattering_length(HardCore(0.7), 0, dim=3)
    eff3 = effective_coupling(res3, 0.5, chi4=0.3)
    assert eff3.coupling == pytest.approx(8 * math.pi * 0.7 * 0.3, rel=1e-8)
    assert eff3.scale == pytest.approx(0.5)
    eff0 = effective_coupling(scattering_length(HardCore(1.0), 0), 0.1)
    assert eff0.coupling == 8 * math.pi
    assert eff0.scale == pytest.approx(1 / math.log(100), rel=1e-15)
    with pytest.raises(ValueError):
        effective_coupling(res3, 0.5)


def test_born_bound_and_gap_halving():
    for ell in (1, 2):
        gaps = []
        for lam in (1e-3, 5e-4):
            p = Gaussian(1.0, 0.3, coupling=lam)
            b = scattering_length(p, ell).b
            born = born_scattering_length(p, ell)
            assert b <= born
            gaps.append((born - b) / born)
        assert gaps[1] / gaps[0] == pytest.approx(0.5, rel=0.2)


@settings(max_examples=15, deadline=None)
@given(h=st.floats(0.05, 30), w=st.floats(0.1, 1.5), a=st.floats(0.05, 1), ell=st.integers(1, 3))
def test_scaling_law_property(h, w, a, ell):
    p = Gaussian(h, w)
    assert scattering_length(scaled(p, a), ell).b == pytest.approx(
        a ** (2 * ell) * scattering_length(p, ell).b, rel=1e-8)


@settings(max_examples=10, deadline=None)
@given(h=st.floats(0.05, 30), a=st.floats(0.05, 1))
def test_s_wave_scaling_property(h, a):
    p = SoftDisc(h, 1.0)
    assert scattering_length(scaled(p, a), 0).b == pytest.approx(a * scattering_length(p, 0).b, rel=1e-8)


@settings(max_examples=15, deadline=None)
@given(h=st.floats(0.01, 20), factor=st.floats(1.01, 5), ell=st.integers(1, 3))
def test_monotone_in_coupling(h, factor, ell):
    b1 = scattering_length(SoftDisc(h, 1.0), ell).b
    b2 = scattering_length(SoftDisc(h, 1.0, coupling=factor), ell).b
    assert b2 >= b1 > 0
    assert b1 <= born_scattering_length(SoftDisc(h, 1.0), ell)


@pytest.mark.slow
def test_frozen_values_match_oracles():
    for (ell, dim), val in SOFTDISC_20_1.items():
        assert oracles.softdisc_b(20.0, 1.0, ell, dim) == pytest.approx(val, rel=1e-12)
    v = lambda r: math.exp(-(r / 0.3) ** 2) if r <= 0.9 else 0.0
    assert oracles.shooting_b(v, 1, 2, 0.9) == pytest.approx(GAUSSIAN_B1, rel=1e-10)
