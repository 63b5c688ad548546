import math

import pytest
from hypothesis import given, strategies as st

from ehcap.model import (
    UNBOUNDED,
    ChannelParams,
    EnergyModel,
    NetworkParams,
    ValidationError,
    derive_channel,
    interference_kappa,
)
from oracles import FROZEN


def test_kappa_reference_values():
    assert interference_kappa(3.0) == pytest.approx(FROZEN["kappa_3"], rel=1e-14)
    # sin(pi/2) = 1 collapses the formula to pi^2/2
    assert interference_kappa(4.0) == pytest.approx(math.pi**2 / 2.0, rel=1e-15)
    assert interference_kappa(4.0) == pytest.approx(FROZEN["kappa_4"], rel=1e-14)


def test_derive_channel_reference_values():
    der = derive_channel(ChannelParams(3.0, 1.0, 1.0))
    assert der.lambda_max == pytest.approx(FROZEN["lambda_max_3_1_1"], rel=1e-14)
    der = derive_channel(ChannelParams(3.0, 2.0, 2.0))
    assert der.lambda_max == pytest.approx(FROZEN["lambda_max_3_2_2"], rel=1e-14)
    assert der.rate == pytest.approx(FROZEN["rate_theta_2"], rel=1e-15)
    der = derive_channel(ChannelParams(4.0, 1.0, 1.0))
    assert der.lambda_max == pytest.approx(FROZEN["lambda_max_4_1_1"], rel=1e-14)


def test_derive_channel_is_pure():
    ch = ChannelParams(3.3, 1.7, 2.9)
    a, b = derive_channel(ch), derive_channel(ch)
    assert (a.kappa, a.lambda_max, a.rate) == (b.kappa, b.lambda_max, b.rate)


@given(
    a1=st.floats(min_value=2.01, max_value=40.0),
    a2=st.floats(min_value=2.01, max_value=40.0),
)
def test_kappa_strictly_decreasing(a1, a2):
    if a1 == a2:
        return
    lo, hi = sorted((a1, a2))
    assert interference_kappa(lo) > interference_kappa(hi)


@given(
    d=st.floats(min_value=1e-3, max_value=1e3),
    theta=st.floats(min_value=1e-3, max_value=1e3),
    alpha=st.floats(min_value=2.1, max_value=8.0),
)
def test_lambda_max_doubling_d_quarters_exactly(d, theta, alpha):
    near = derive_channel(ChannelParams(alpha, theta, d)).lambda_max
    far = derive_channel(ChannelParams(alpha, theta, 2.0 * d)).lambda_max
    # d^2 -> 4*d^2 is exact in binary floating point, so the ratio is exact
    assert near == 4.0 * far


@given(
    theta1=st.floats(min_value=0.01, max_value=100.0),
    theta2=st.floats(min_value=0.01, max_value=100.0),
)
def test_lambda_max_decreasing_in_theta(theta1, theta2):
    if theta1 == theta2:
        return
    lo, hi = sorted((theta1, theta2))
    ch_lo = derive_channel(ChannelParams(3.0, lo, 1.0)).lambda_max
    ch_hi = derive_channel(ChannelParams(3.0, hi, 1.0)).lambda_max
    assert ch_lo > ch_hi


@pytest.mark.parametrize(
    "kwargs,field",
    [
        (dict(alpha=2.0, theta=1.0, d=1.0), "alpha"),
        (dict(alpha=1.5, theta=1.0, d=1.0), "alpha"),
        (dict(alpha=3.0, theta=0.0, d=1.0), "theta"),
        (dict(alpha=3.0, theta=-1.0, d=1.0), "theta"),
        (dict(alpha=3.0, theta=1.0, d=0.0), "d"),
    ],
)
def test_channel_validation_names_field(kwargs, field):
    with pytest.raises(ValidationError) as exc:
        ChannelParams(**kwargs)
    assert exc.value.field == field


def test_energy_model_validation():
    EnergyModel(0.5, 3)
    EnergyModel(1.0, UNBOUNDED)
    with pytest.raises(ValidationError):
        EnergyModel(0.0, 3)
    with pytest.raises(ValidationError):
        EnergyModel(1.5, 3)
    with pytest.raises(ValidationError):
        EnergyModel(0.5, 0)
    with pytest.raises(ValidationError):
        EnergyModel(0.5, 2.5)
    assert EnergyModel(0.5, UNBOUNDED).is_unbounded
    assert not EnergyModel(0.5, 7).is_unbounded


def test_network_validation():
    ch = ChannelParams(3.0, 1.0, 1.0)
    with pytest.raises(ValidationError) as exc:
        NetworkParams(0.0, ch, EnergyModel(0.5))
    assert exc.value.field == "lambda"


def test_types_are_immutable():
    ch = ChannelParams(3.0, 1.0, 1.0)
    with pytest.raises(Exception):
        ch.alpha = 4.0
