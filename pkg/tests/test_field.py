import math

import numpy as np
import pytest

import fermiskin.field as field_mod
from fermiskin.constants import SPEED_OF_LIGHT
from fermiskin.field import (
    DispersionRootError,
    FieldProfile,
    ProfileEvaluationError,
    amplitude_A,
    amplitude_B,
    asymptotic_coefficients,
    asymptotic_field,
    check_dispersion_roots,
    dispersion_denominator,
    f_of_Omega,
    f_of_Omega_dimensional,
    field_ratio_direct,
    field_ratio_ibp,
    field_ratio_rescaled,
    profile,
)
from fermiskin.materials import Material, get_material, params_for
from fermiskin.permittivity import eps_tr
from fermiskin.quadrature import QuadratureError

# Frozen cross-route references for Na at Omega = 1e-2, eps = 1e-4,
# computed with an adaptive QAWO evaluation of the same transform plus
# the analytic far-tail remainder (quadrature error below 1e-17).
QAWO_REFS = {
    1e-5: -1.5884504680885026e-07 - 2.1855541411803967e-09j,
    3e-5: -4.2630945824250907e-10 + 3.0286961928590405e-10j,
    1e-4: 1.4569133017952493e-11 - 9.650148443586974e-12j,
}

# Frozen engine values at eps = 1e-5 (near-surface regression anchors).
E_AT_0 = -3.229708862537981e-06 - 1.7518850318439067e-08j
E_AT_DELTA = -1.2090822951369451e-06 + 4.5691094675646505e-09j

# Frozen closed-form coefficients for Na.
FROZEN_COEFFS = {
    1e-2: (2.2717461333836598e-6, 4.2220675948846401e-21, 1.2933585755081764e-15),
    5e-3: (4.1508045523485917e-6, 3.0857281340794886e-20, 9.4526031481208337e-15),
    1e-3: (8.0234295229630422e-7, 1.4911640561829445e-19, 4.5679273867865753e-14),
}
A_LOW_NA = 1.6520107234169466e-19
A_HIGH_NA_0P1 = 5.9815957801118693e-25


@pytest.fixture(scope="module")
def p_1em4(na):
    return params_for(na, 1e-2, 1e-4)


@pytest.fixture(scope="module")
def p_1em5(na):
    return params_for(na, 1e-2, 1e-5)


@pytest.fixture(scope="module")
def far_zone(na):
    # the [5, 50] oscillation window is clean of the exponential skin
    # term and of collision damping only in a band of Omega; 2e-3 sits
    # inside it for eps = 1e-5
    Omega = 2e-3
    p = params_for(na, Omega, 1e-5)
    L = na.v_F / (Omega * na.omega_p)
    us = np.linspace(4.6, 50.4, 100)
    prof = profile(us * L, p, "rescaled")
    return prof, Omega, L


class TestDispersionDenominator:
    def test_identity(self, p_1em4):
        q = np.array([0.003, 0.009, 0.02, 0.3])
        d = dispersion_denominator(q, p_1em4.Omega, p_1em4.eps, p_1em4.b)
        ref = eps_tr(q, p_1em4.Omega, p_1em4.eps) - p_1em4.b * q**2
        np.testing.assert_allclose(d, ref, rtol=1e-14)

    def test_b_validation(self):
        with pytest.raises(ValueError, match="b must be"):
            dispersion_denominator(0.01, 1e-2, 0.0, 0.0)

    def test_collisionless_margin_inside_window(self, na):
        # the physical denominator stays far from zero over the whole
        # window that could host a contour root
        p = params_for(na, 1e-2, 0.0)
        qs = np.linspace(p.Omega / 1e4, p.Omega * (1 - 1e-4), 10000)
        d = dispersion_denominator(qs, p.Omega, 0.0, p.b)
        assert np.all(d.imag == 0.0)
        assert np.abs(d.real).min() > 1.0

    def test_root_check_passes_for_builtins(self, na):
        check_dispersion_roots(params_for(na, 1e-2, 0.0))
        check_dispersion_roots(params_for(na, 1e-1, 0.0))

    def test_root_check_trips_on_soft_stiffness(self):
        # a deliberately fictitious material with v_F near c makes the
        # quadratic term weak enough for an on-contour crossing
        fict = Material("fict", 1e22, 1.4e15, 0.9 * SPEED_OF_LIGHT, check=False)
        p = params_for(fict, 2.0, 0.0)
        with pytest.raises(DispersionRootError, match="dispersion root on contour"):
            check_dispersion_roots(p)
        with pytest.raises(DispersionRootError):
            field_ratio_rescaled(1e-6, p)


class TestRoutesAgainstFrozenReferences:
    def test_rescaled_matches_qawo(self, p_1em4):
        for x, ref in QAWO_REFS.items():
            got = field_ratio_rescaled(x, p_1em4)
            assert abs(got - ref) <= 1e-14

    def test_direct_matches_qawo(self, p_1em4):
        for x, ref in QAWO_REFS.items():
            got = field_ratio_direct(x, p_1em4)
            assert abs(got - ref) <= 1e-14

    def test_direct_equals_rescaled_spec_points(self, p_1em4):
        for x in QAWO_REFS:
            d = field_ratio_direct(x, p_1em4)
            r = field_ratio_rescaled(x, p_1em4)
            assert abs(d - r) <= 1e-6 * max(abs(d), abs(r))

    def test_direct_equals_rescaled_randomized(self, na):
        rng = np.random.default_rng(42)
        for _ in range(6):
            Om = rng.uniform(5e-3, 5e-2)
            e = 10 ** rng.uniform(-5, -3)
            x = 10 ** rng.uniform(-6, math.log10(6e-5))
            p = params_for(na, Om, e)
            d = field_ratio_direct(x, p)
            r = field_ratio_rescaled(x, p)
            assert abs(d - r) <= 1e-6 * max(abs(d), abs(r))

    def test_ibp_exact_equals_rescaled(self, p_1em4):
        for x in QAWO_REFS:
            i = field_ratio_ibp(x, p_1em4, kernel="exact")
            r = field_ratio_rescaled(x, p_1em4)
            assert abs(i - r) <= 1e-4 * max(abs(i), abs(r))

    @pytest.mark.parametrize("kernel", ["second-derivative", "kohn-pole"])
    def test_truncated_kernels_are_not_the_field(self, p_1em4, kernel):
        # the study kernels keep the oscillation but drop smooth terms;
        # they must NOT quietly agree, or the exact kernel is redundant
        x = 1e-4
        r = field_ratio_rescaled(x, p_1em4)
        exact_dev = abs(field_ratio_ibp(x, p_1em4, kernel="exact") - r) / abs(r)
        trunc_dev = abs(field_ratio_ibp(x, p_1em4, kernel=kernel) - r) / abs(r)
        assert trunc_dev > 100.0 * exact_dev
        assert trunc_dev > 0.01

    def test_unknown_kernel_rejected(self, p_1em4):
        with pytest.raises(ValueError, match="unknown ibp kernel"):
            field_ratio_ibp(1e-5, p_1em4, kernel="bogus")


class TestRouteDomains:
    def test_direct_needs_collisions(self, na):
        with pytest.raises(ValueError, match="direct route needs eps > 0"):
            field_ratio_direct(1e-5, params_for(na, 1e-2, 0.0))

    def test_ibp_needs_positive_depth(self, p_1em4):
        with pytest.raises(ValueError, match="x = 0"):
            field_ratio_ibp(0.0, p_1em4)

    def test_ibp_needs_collisions(self, na):
        with pytest.raises(ValueError, match="need eps > 0"):
            field_ratio_ibp(1e-5, params_for(na, 1e-2, 0.0))

    def test_negative_depth_rejected(self, p_1em4):
        with pytest.raises(ValueError, match="x must be >= 0"):
            field_ratio_rescaled(-1e-5, p_1em4)

    def test_rescaled_works_collisionless(self, na):
        p = params_for(na, 1e-2, 0.0)
        v = field_ratio_rescaled(3e-5, p)
        assert np.isfinite(v)


class TestHermitianSymmetry:
    def test_conjugate_exponent(self, p_1em4):
        for fn in (field_ratio_rescaled, field_ratio_direct, field_ratio_ibp):
            plus = fn(3e-5, p_1em4, exponent_sign=1)
            minus = fn(3e-5, p_1em4, exponent_sign=-1)
            assert abs(minus - plus.conjugate()) <= 1e-13 * abs(plus)

    def test_bad_sign_rejected(self, p_1em4):
        with pytest.raises(ValueError, match="exponent_sign"):
            field_ratio_rescaled(3e-5, p_1em4, exponent_sign=0)


class TestNearSurface:
    def test_frozen_regression_values(self, p_1em5):
        assert abs(field_ratio_rescaled(0.0, p_1em5) - E_AT_0) <= 1e-12 * abs(E_AT_0)
        got = field_ratio_rescaled(p_1em5.delta, p_1em5)
        assert abs(got - E_AT_DELTA) <= 1e-12 * abs(E_AT_DELTA)

    def test_surface_value_is_minus_skin_depth(self, p_1em5):
        # E(0)/E'(0) = -c/omega_p to within the ten-percent contract
        v = field_ratio_rescaled(0.0, p_1em5)
        delta = p_1em5.delta
        assert abs(v + delta) <= 0.1 * delta
        assert v.real < 0

    def test_one_skin_depth_is_one_efolding(self, p_1em5):
        v0 = field_ratio_rescaled(0.0, p_1em5)
        vd = field_ratio_rescaled(p_1em5.delta, p_1em5)
        assert abs(vd) / abs(v0) == pytest.approx(1.0 / math.e, rel=0.15)

    def test_eps_continuity_at_fixed_depth(self, na):
        # collisional values converge to the collisionless limit
        lim = field_ratio_rescaled(1e-4, params_for(na, 1e-2, 0.0))
        gaps = [
            abs(field_ratio_rescaled(1e-4, params_for(na, 1e-2, e)) - lim)
            for e in (1e-4, 1e-5, 1e-6)
        ]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 1e-12


class TestInverseSquareLaw:
    def test_x2_scaled_envelope_is_flat(self, p_1em5, na):
        # |E| x^2 probed one oscillation apart in the deep far zone must
        # agree within a factor well inside two
        k = 1e-2 * na.omega_p / na.v_F
        half = math.pi / k
        peaks = []
        for xc in (8e-4, 9e-4):
            xs = np.linspace(xc - half / 2, xc + half / 2, 7)
            peaks.append(
                max(abs(field_ratio_rescaled(float(x), p_1em5)) * x**2 for x in xs)
            )
        ratio = peaks[0] / peaks[1]
        assert 0.5 < ratio < 2.0

    def test_far_zone_envelope_slope(self, far_zone):
        from fermiskin.analysis import envelope_fit

        prof, Omega, L = far_zone
        fit = envelope_fit(prof, window=(5 * L, 50 * L))
        assert fit.slope == pytest.approx(-2.0, abs=0.15)
        assert fit.r_squared > 0.99

    def test_far_zone_wavelength(self, far_zone, na):
        from fermiskin.analysis import wavelength_extract

        prof, Omega, L = far_zone
        wl = wavelength_extract(prof, window=(5 * L, 50 * L))
        expected = 2.0 * math.pi * na.v_F / (Omega * na.omega_p)
        assert wl.wavelength == pytest.approx(expected, rel=0.02)

    def test_measured_coefficient_is_A_over_Omega(self, far_zone, na):
        from fermiskin.analysis import envelope_fit

        prof, Omega, L = far_zone
        fit = envelope_fit(prof, window=(5 * L, 50 * L))
        C = math.exp(fit.intercept)
        ratio = C * Omega / amplitude_A(Omega, na)
        assert 0.5 < ratio < 2.0

    @pytest.mark.xfail(
        strict=True,
        reason="the fitted envelope coefficient measures A/Omega, not A; "
        "kept as a strict expected failure so any change is noticed",
    )
    def test_measured_coefficient_is_A_literally(self, far_zone, na):
        from fermiskin.analysis import envelope_fit

        prof, Omega, L = far_zone
        fit = envelope_fit(prof, window=(5 * L, 50 * L))
        C = math.exp(fit.intercept)
        ratio = C / amplitude_A(Omega, na)
        print(f"measured coefficient / A = {ratio:.3g} (about 1/Omega)")
        assert 0.5 < ratio < 2.0


class TestOscillationStrength:
    @pytest.mark.parametrize("Omega", sorted(FROZEN_COEFFS))
    def test_frozen_values(self, na, Omega):
        f_ref, A_ref, B_ref = FROZEN_COEFFS[Omega]
        assert f_of_Omega(Omega, na) == pytest.approx(f_ref, rel=1e-12)
        assert amplitude_A(Omega, na) == pytest.approx(A_ref, rel=1e-12)
        assert amplitude_B(Omega, na) == pytest.approx(B_ref, rel=1e-12)

    def test_low_frequency_limit(self, na):
        # f / Omega^2 -> 8/9 as Omega -> 0
        assert f_of_Omega(1e-6, na) / 1e-12 == pytest.approx(8.0 / 9.0, rel=1e-6)

    def test_dimensional_form_agrees(self, na):
        for Omega in (1e-3, 1e-2, 1e-1):
            f = f_of_Omega(Omega, na)
            f_dim = f_of_Omega_dimensional(Omega * na.omega_p, na)
            assert f_dim == pytest.approx(f, rel=1e-12)

    def test_validation(self, na):
        with pytest.raises(ValueError):
            f_of_Omega(0.0, na)
        with pytest.raises(ValueError):
            f_of_Omega_dimensional(-1.0, na)


class TestAmplitudeModes:
    def test_frozen_limit_values(self, na):
        assert amplitude_A(1e-2, na, "low") == pytest.approx(A_LOW_NA, rel=1e-12)
        assert amplitude_A(0.1, na, "high") == pytest.approx(A_HIGH_NA_0P1, rel=1e-12)

    def test_exact_reduces_to_low_limit(self, na):
        a = amplitude_A(1e-6, na, "exact8")
        assert a == pytest.approx(amplitude_A(1e-6, na, "low"), rel=1e-4)

    def test_nonrel_reduces_to_high_limit(self, na):
        a = amplitude_A(0.1, na, "nonrel9")
        assert a == pytest.approx(amplitude_A(0.1, na, "high"), rel=0.01)

    def test_relativistic_correction_is_small(self, na):
        # the two full forms differ only by the (v_F/c)^2-suppressed
        # bracket correction
        a8 = amplitude_A(1e-2, na, "exact8")
        a9 = amplitude_A(1e-2, na, "nonrel9")
        assert abs(a8 - a9) / a8 <= 5.0 * (na.v_F / SPEED_OF_LIGHT) ** 2

    def test_unknown_mode_rejected(self, na):
        with pytest.raises(ValueError, match="unknown mode"):
            amplitude_A(1e-2, na, "fancy")

    def test_B_scales_with_E0(self, na):
        assert amplitude_B(1e-2, na, E0=3.0) == pytest.approx(
            3.0 * amplitude_B(1e-2, na), rel=1e-14
        )
        with pytest.raises(ValueError, match="E0"):
            amplitude_B(1e-2, na, E0=0.0)

    def test_coefficient_bundle(self, na):
        co = asymptotic_coefficients(1e-2, na)
        assert co.A == amplitude_A(1e-2, na)
        assert co.B == amplitude_B(1e-2, na)
        assert co.f_Omega == f_of_Omega(1e-2, na)
        assert co.wavenumber == pytest.approx(1e-2 * na.omega_p / na.v_F, rel=1e-15)


class TestAsymptoticField:
    def test_zeros_on_the_comb(self, na):
        k = 1e-2 * na.omega_p / na.v_F
        A = amplitude_A(1e-2, na)
        for n in (3, 10, 41):
            xn = n * math.pi / k
            assert abs(asymptotic_field(xn, 1e-2, na)) * xn**2 / A < 1e-9

    def test_first_half_period_is_negative(self, na):
        k = 1e-2 * na.omega_p / na.v_F
        xs = np.linspace(0.05, 0.95, 12) * math.pi / k
        assert np.all(asymptotic_field(xs, 1e-2, na) < 0)

    def test_normalizations_related_by_skin_depth(self, na):
        x = 1e-4
        per_ep = asymptotic_field(x, 1e-2, na, normalization="per_Eprime0")
        per_e0 = asymptotic_field(x, 1e-2, na, normalization="per_E0")
        assert abs(per_e0) == pytest.approx(
            na.omega_p / SPEED_OF_LIGHT * abs(per_ep), rel=1e-12
        )
        # surface value E(0)/E'(0) is negative, so the two signs flip
        assert per_e0 * per_ep <= 0

    def test_domain(self, na):
        with pytest.raises(ValueError, match="x > 0"):
            asymptotic_field(0.0, 1e-2, na)
        with pytest.raises(ValueError, match="normalization"):
            asymptotic_field(1e-4, 1e-2, na, normalization="per_B")


class TestProfile:
    def test_numeric_matches_single_calls(self, p_1em4):
        xs = np.array([1e-5, 2e-5, 3e-5])
        prof = profile(xs, p_1em4, "rescaled")
        assert isinstance(prof, FieldProfile)
        for x, v in zip(xs, prof.values):
            assert v == field_ratio_rescaled(float(x), p_1em4)
        assert prof.ok.all()
        assert prof.normalization == "per_Eprime0"
        assert not prof.errors

    def test_pair_shorthand_means_collisionless(self, na):
        prof = profile([1e-5, 2e-5], (1e-2, na), "rescaled")
        assert prof.params.eps == 0.0
        assert prof.params.material is na

    def test_asymptotic_branch_is_closed_form(self, na):
        xs = np.geomspace(1e-5, 1e-4, 20)
        prof = profile(xs, (1e-2, na), "asymptotic", normalization="per_E0")
        np.testing.assert_allclose(
            prof.values.real,
            asymptotic_field(xs, 1e-2, na, normalization="per_E0"),
            rtol=1e-14,
        )
        assert np.all(prof.values.imag == 0.0)
        assert np.all(prof.abs_err == 0.0)

    def test_grid_validation(self, p_1em4):
        with pytest.raises(ValueError, match="empty"):
            profile([], p_1em4)
        with pytest.raises(ValueError, match="strictly increasing"):
            profile([2e-5, 1e-5], p_1em4)
        with pytest.raises(ValueError, match="unknown method"):
            profile([1e-5], p_1em4, "magic")
        with pytest.raises(ValueError, match="per_Eprime0"):
            profile([1e-5], p_1em4, "rescaled", normalization="per_E0")

    def test_partial_failure_is_collected(self, p_1em4, monkeypatch):
        real = field_ratio_rescaled

        def flaky(x_cm, params, **kw):
            if x_cm == 2e-5:
                raise QuadratureError("synthetic failure")
            return real(x_cm, params, **kw)

        monkeypatch.setattr(field_mod, "field_ratio_rescaled", flaky)
        prof = profile([1e-5, 2e-5, 3e-5], p_1em4, "rescaled")
        assert len(prof.errors) == 1
        assert prof.errors[0][0] == 1
        assert "synthetic failure" in prof.errors[0][1]
        assert np.isnan(prof.values[1])
        assert prof.ok.tolist() == [True, False, True]

    def test_total_failure_raises(self, p_1em4, monkeypatch):
        def broken(x_cm, params, **kw):
            raise QuadratureError("synthetic failure")

        monkeypatch.setattr(field_mod, "field_ratio_rescaled", broken)
        with pytest.raises(ProfileEvaluationError, match="all 2 profile points"):
            profile([1e-5, 2e-5], p_1em4, "rescaled")
