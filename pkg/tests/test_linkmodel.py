import math
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from spacemimo.errors import ValidationError
from spacemimo.linkmodel import (
    ApertureRegion,
    LinkBudget,
    WeakLinkAssumptionWarning,
    channel_gain,
    dof_count,
    dof_from_ratio,
    input_snr,
    loss_db_to_factor,
    siso_spectral_efficiency,
)


def make_budget(**overrides):
    params = dict(
        power_watts=1.0,
        bandwidth_hz=1.0,
        tx_aperture_m2=1.0,
        rx_aperture_m2=1.0,
        range_m=4e8,
        wavelength_m=0.2,
        loss_factor=1.0,
        noise_psd_w_per_hz=1.0,
    )
    params.update(overrides)
    return LinkBudget(**params)


class TestChannelGain:
    def test_identity_case(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WeakLinkAssumptionWarning)
            lb = make_budget(range_m=1.0, wavelength_m=1.0)
        assert channel_gain(lb) == 1.0

    def test_deep_space_link(self):
        # 1 / (0.04 * 1.6e17)
        assert channel_gain(make_budget()) == pytest.approx(1.5625e-16, rel=1e-12)

    def test_mixed_apertures(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WeakLinkAssumptionWarning)
            lb = make_budget(tx_aperture_m2=2.0, rx_aperture_m2=3.0, loss_factor=0.5,
                             wavelength_m=1.0, range_m=1.0)
        assert channel_gain(lb) == pytest.approx(3.0, rel=1e-15)

    def test_doubling_range_quarters_gain(self):
        g1 = channel_gain(make_budget(range_m=1e6))
        g2 = channel_gain(make_budget(range_m=2e6))
        assert g1 / g2 == pytest.approx(4.0, rel=1e-14)

    def test_large_gain_warns_but_is_accepted(self):
        with pytest.warns(WeakLinkAssumptionWarning):
            lb = make_budget(range_m=1.0, wavelength_m=1.0)
        assert channel_gain(lb) == 1.0

    def test_small_gain_is_silent(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            make_budget()


class TestInputSnr:
    def test_unit(self):
        assert input_snr(make_budget(power_watts=3.0, bandwidth_hz=3.0, noise_psd_w_per_hz=1.0)) == 1.0

    def test_hundred_watts(self):
        lb = make_budget(power_watts=100.0, bandwidth_hz=1e6, noise_psd_w_per_hz=1e-20)
        assert input_snr(lb) == pytest.approx(1e16, rel=1e-12)

    def test_fractional(self):
        lb = make_budget(power_watts=1.0, bandwidth_hz=2.0, noise_psd_w_per_hz=0.25)
        assert input_snr(lb) == 2.0


class TestValidation:
    @pytest.mark.parametrize("field", ["power_watts", "bandwidth_hz", "range_m", "noise_psd_w_per_hz"])
    def test_non_positive_rejected(self, field):
        with pytest.raises(ValidationError) as err:
            make_budget(**{field: 0.0})
        assert err.value.field == field

    def test_loss_above_one_rejected(self):
        with pytest.raises(ValidationError, match="loss_factor"):
            make_budget(loss_factor=1.5)

    def test_missing_field_named(self):
        with pytest.raises(ValidationError) as err:
            LinkBudget.from_dict({"power_watts": 1.0})
        assert err.value.field is not None

    def test_loss_db(self):
        assert loss_db_to_factor(3.0) == pytest.approx(0.5011872336272722, rel=1e-12)
        assert loss_db_to_factor(0.0) == 1.0


class TestDof:
    def test_boundary(self):
        assert dof_count(ApertureRegion.from_ratio(1.0)) == 1

    def test_three_and_a_half(self):
        assert dof_count(ApertureRegion.from_ratio(3.5)) == 13

    def test_five(self):
        assert dof_count(ApertureRegion.from_ratio(5.0)) == 25

    @pytest.mark.parametrize("c", [1.0, 2.0, 3.0, 4.0, 5.0, 8.0, 16.0])
    def test_exact_squares_survive_roundoff(self, c):
        assert dof_count(ApertureRegion.from_ratio(c, wavelength_m=0.03, range_m=7e5)) == int(c * c)

    def test_region_below_one_rejected(self):
        with pytest.raises(ValidationError):
            ApertureRegion(radius_m=0.5, wavelength_m=1.0, range_m=1.0)

    def test_region_below_one_allowed_when_not_strict(self):
        r = ApertureRegion(radius_m=0.01, wavelength_m=1.0, range_m=1.0, strict=False)
        assert r.aperture_ratio < 1.0

    @given(st.floats(1.0, 20.0), st.floats(0.0, 5.0))
    def test_non_decreasing_in_radius(self, c, dc):
        assert dof_from_ratio(c + dc) >= dof_from_ratio(c)

    def test_round_trip_dict(self):
        r = ApertureRegion(2.0, 0.1, 30.0)
        assert ApertureRegion.from_dict(r.to_dict()) == r


class TestSiso:
    def test_unit_snr(self):
        assert siso_spectral_efficiency(1.0, 1.0) == 1.0

    def test_three(self):
        assert siso_spectral_efficiency(3.0, 1.0) == pytest.approx(2.0, rel=1e-15)

    def test_million(self):
        assert siso_spectral_efficiency(1e-10, 1e16) == pytest.approx(19.931570012018494, rel=1e-12)

    @given(st.floats(1e-12, 1e12), st.floats(1.0001, 10.0))
    def test_increasing_and_below_linear(self, x, k):
        lo = siso_spectral_efficiency(x, 1.0)
        hi = siso_spectral_efficiency(x * k, 1.0)
        assert hi > lo
        assert lo <= x * math.log2(math.e) * (1 + 1e-12)
