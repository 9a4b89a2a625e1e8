import numpy as np
import pytest

from acoufilt.dispersion import (
    AcousticMode,
    DispersionTable,
    PlatformConstants,
    Regime,
    builtin_table,
    classify_regime,
    frequency_for,
    interpolate,
    select_mode,
    validate_sh0_velocity,
    wavelength_for_frequency,
)
from acoufilt.errors import AmbiguityError, DomainError, RangeError

CONSTS = PlatformConstants()


@pytest.fixture(scope="module")
def s0():
    return builtin_table("s0")


@pytest.fixture(scope="module")
def sh0():
    return builtin_table("sh0")


class TestInterpolate:
    def test_exact_at_sample_points(self, s0):
        for x, vp, k2 in s0.samples:
            assert interpolate(s0, x) == (pytest.approx(vp), pytest.approx(k2))

    def test_linear_data_stays_linear_at_midpoints(self):
        x = np.array([0.1, 0.2, 0.3, 0.4, 0.5])
        table = DispersionTable(
            mode=AcousticMode.S0,
            samples=tuple((xi, 5000.0 + 2000.0 * xi, 0.1 + 0.2 * xi) for xi in x),
        )
        for mid in 0.5 * (x[1:] + x[:-1]):
            vp, k2 = interpolate(table, mid)
            assert vp == pytest.approx(5000.0 + 2000.0 * mid, rel=1e-12)
            assert k2 == pytest.approx(0.1 + 0.2 * mid, rel=1e-12)

    def test_s0_velocity_anchor(self, s0):
        vp, _ = interpolate(s0, 0.25)
        assert vp == pytest.approx(6660.0, rel=1e-12)

    def test_out_of_domain_names_the_interval(self, s0):
        with pytest.raises(RangeError, match=r"0\.15"):
            interpolate(s0, 0.01)
        with pytest.raises(RangeError, match=r"0\.45"):
            interpolate(s0, 0.7)

    def test_no_overshoot_on_monotone_intervals(self, sh0):
        x_samples = [s[0] for s in sh0.samples]
        vp_samples = [s[1] for s in sh0.samples]
        for (x0, x1), (v0, v1) in zip(
            zip(x_samples, x_samples[1:]), zip(vp_samples, vp_samples[1:])
        ):
            xs = np.linspace(x0, x1, 101)
            vps = np.array([interpolate(sh0, x)[0] for x in xs])
            assert np.all(vps <= max(v0, v1) + 1e-9)
            assert np.all(vps >= min(v0, v1) - 1e-9)


class TestFrequencyFor:
    def test_s0_anchor_3p7_ghz(self, s0):
        assert frequency_for(s0, CONSTS, 1.8e-6) == pytest.approx(3.70e9, rel=1e-12)

    def test_s0_anchor_4p4_ghz(self, s0):
        assert frequency_for(s0, CONSTS, 1.5e-6) == pytest.approx(4.40e9, rel=1e-12)

    def test_flat_table_scaling(self):
        table = DispersionTable(
            mode=AcousticMode.S0,
            samples=((0.1, 6000.0, 0.2), (0.2, 6000.0, 0.2), (0.3, 6000.0, 0.2), (0.4, 6000.0, 0.2)),
        )
        f1 = frequency_for(table, CONSTS, 1.5e-6)
        f2 = frequency_for(table, CONSTS, 3.0e-6)
        assert f1 == pytest.approx(2 * f2, rel=1e-12)

    def test_propagates_range_error(self, s0):
        with pytest.raises(RangeError):
            frequency_for(s0, CONSTS, 100e-6)


class TestWavelengthForFrequency:
    def test_round_trip(self, sh0):
        for lam0 in (2.0e-6, 3.1e-6, 5.0e-6):
            f = frequency_for(sh0, CONSTS, lam0)
            lam = wavelength_for_frequency(sh0, CONSTS, f)
            assert lam == pytest.approx(lam0, rel=1e-9)

    def test_s0_anchor_inversion(self, s0):
        assert wavelength_for_frequency(s0, CONSTS, 4.40e9) == pytest.approx(1.5e-6, rel=1e-9)

    def test_rejects_unachievable_target(self, s0):
        with pytest.raises(RangeError):
            wavelength_for_frequency(s0, CONSTS, 20e9)
        with pytest.raises(RangeError):
            wavelength_for_frequency(s0, CONSTS, 1e8)

    def test_non_monotone_table_reports_ambiguity(self):
        # f(x) = vp*x/h dips then rises: two wavelengths share one frequency
        table = DispersionTable(
            mode=AcousticMode.S0,
            samples=((0.1, 5000.0, 0.2), (0.2, 2000.0, 0.2), (0.3, 1500.0, 0.2), (0.4, 1400.0, 0.2)),
        )
        f_lo = frequency_for(table, CONSTS, CONSTS.film_thickness_h / 0.2)
        f_hi = frequency_for(table, CONSTS, CONSTS.film_thickness_h / 0.1)
        target = 0.5 * (f_lo + f_hi)
        with pytest.raises(AmbiguityError, match="candidates"):
            wavelength_for_frequency(table, CONSTS, target)


class TestModeSelection:
    def test_low_band_uses_sh0(self):
        assert select_mode(1.4e9) is AcousticMode.SH0

    def test_high_band_uses_s0(self):
        assert select_mode(4.4e9) is AcousticMode.S0

    def test_boundary_goes_to_s0(self):
        assert select_mode(3.0e9) is AcousticMode.S0

    def test_threshold_is_configurable(self):
        assert select_mode(3.5e9, threshold=4e9) is AcousticMode.SH0

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            select_mode(0.0)


class TestRegime:
    def test_sed_regime(self):
        assert classify_regime(CONSTS, 5.0e-6) is Regime.SED  # h/lambda = 0.09

    def test_standard_regime(self):
        assert classify_regime(CONSTS, 2.5e-6) is Regime.STANDARD  # 0.18

    def test_out_of_range(self):
        assert classify_regime(CONSTS, 1.5e-6) is Regime.OUT_OF_VALIDATED_RANGE  # 0.30

    def test_sed_boundary_belongs_to_standard(self):
        assert classify_regime(CONSTS, 3.0e-6) is Regime.STANDARD  # exactly 0.15


class TestTableValidation:
    def test_needs_four_samples(self):
        with pytest.raises(DomainError):
            DispersionTable(
                mode=AcousticMode.SH0,
                samples=((0.1, 5000.0, 0.1), (0.2, 5000.0, 0.1), (0.3, 5000.0, 0.1)),
            )

    def test_rejects_unsorted_abscissas(self):
        with pytest.raises(DomainError):
            DispersionTable(
                mode=AcousticMode.SH0,
                samples=((0.2, 5000.0, 0.1), (0.1, 5000.0, 0.1), (0.3, 5000.0, 0.1), (0.4, 5000.0, 0.1)),
            )

    def test_rejects_out_of_range_columns(self):
        with pytest.raises(DomainError):
            DispersionTable(
                mode=AcousticMode.SH0,
                samples=((0.1, 25000.0, 0.1), (0.2, 5000.0, 0.1), (0.3, 5000.0, 0.1), (0.4, 5000.0, 0.1)),
            )
        with pytest.raises(DomainError):
            DispersionTable(
                mode=AcousticMode.SH0,
                samples=((0.1, 5000.0, 1.3), (0.2, 5000.0, 0.1), (0.3, 5000.0, 0.1), (0.4, 5000.0, 0.1)),
            )

    def test_sh0_velocity_bound(self):
        table = DispersionTable(
            mode=AcousticMode.SH0,
            samples=((0.1, 8000.0, 0.1), (0.2, 7000.0, 0.1), (0.3, 6000.0, 0.1), (0.4, 5000.0, 0.1)),
        )
        with pytest.raises(DomainError, match="v_ssb"):
            validate_sh0_velocity(table, CONSTS)

    def test_sh0_velocity_tolerance_band_allowed(self):
        table = DispersionTable(
            mode=AcousticMode.SH0,
            samples=((0.1, 7400.0, 0.1), (0.2, 7000.0, 0.1), (0.3, 6000.0, 0.1), (0.4, 5000.0, 0.1)),
        )
        validate_sh0_velocity(table, CONSTS)  # 7400 < 1.05 * 7150

    def test_s0_tables_skip_the_bound(self):
        table = DispersionTable(
            mode=AcousticMode.S0,
            samples=((0.1, 9000.0, 0.1), (0.2, 8500.0, 0.1), (0.3, 8000.0, 0.1), (0.4, 7500.0, 0.1)),
        )
        validate_sh0_velocity(table, CONSTS)


class TestBuiltinTables:
    def test_both_modes_load_with_provenance(self):
        for name, mode in (("sh0", AcousticMode.SH0), ("s0", AcousticMode.S0)):
            table = builtin_table(name)
            assert table.mode is mode
            assert "anchor" in table.provenance

    def test_sh0_flagship_anchor(self, sh0):
        assert frequency_for(sh0, CONSTS, 5.0e-6) == pytest.approx(1.45e9, rel=1e-12)
        _, k2 = interpolate(sh0, 0.09)
        assert k2 == pytest.approx(0.0867, rel=1e-12)

    def test_unknown_name_rejected(self):
        with pytest.raises(DomainError):
            builtin_table("lamb3")
