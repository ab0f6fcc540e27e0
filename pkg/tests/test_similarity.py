import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rieszlab.errors import NotEquivalent, Unsupported
from rieszlab.multiplier import basis_constant_section
from rieszlab.projection import riesz_norm_section
from rieszlab.similarity import (
    equivalence_constant,
    equivalence_grid,
    equivalent_weight_comparison,
    sandwich,
)
from rieszlab.weights import WeightSpec, critical_exponent, floor_value

from conftest import STEP, gauss, section, table

TAN = WeightSpec.tan_alpha(0.5)
SQRT2 = math.sqrt(2.0)


def test_constant_sandwich():
    rep = sandwich(WeightSpec.constant(), gauss(64), 64)
    assert rep.p == math.inf and rep.floor == 1.0
    assert rep.lower == pytest.approx(1.0, abs=1e-10)
    assert rep.upper == pytest.approx(1.0, abs=1e-10)
    assert rep.bracketed
    assert rep.label == "section lower bound"


def test_tan_sandwich_upper_leg():
    rep = sandwich(TAN, gauss(256), 256)
    assert rep.floor == pytest.approx(1.4142136, abs=1e-7)
    assert rep.floor == pytest.approx(SQRT2, rel=1e-15)
    assert rep.upper <= SQRT2 + 1e-6
    assert rep.lower <= rep.upper + 1e-6
    assert rep.powers[:4] == (0, 1, 12, 665)


@pytest.mark.xfail(strict=True, reason=(
    "at M=256 both section legs sit near 1.2966 while the floor is 1.4142; "
    "the section norms converge to the floor too slowly for a 0.05 window"))
def test_tan_sandwich_lower_leg_near_floor():
    rep = sandwich(TAN, gauss(256), 256)
    assert abs(rep.lower - rep.floor) <= 0.05


@pytest.mark.xfail(strict=True, reason=(
    "at M=256 the upper leg is 2.2743 against a floor of 3.2361 (30% below), "
    "so the floor is not bracketed within 10%"))
def test_tan_08_sandwich_brackets_floor():
    rep = sandwich(WeightSpec.tan_alpha(0.8), gauss(256), 256)
    assert rep.floor == pytest.approx(3.2360680, abs=1e-7)
    assert rep.lower * 0.9 <= rep.floor <= rep.upper * 1.1


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
def test_sandwich_ordering(alpha):
    rep = sandwich(WeightSpec.tan_alpha(alpha), gauss(64), 64)
    assert rep.lower <= rep.upper + 1e-6
    assert rep.floor >= 1.0
    assert rep.floor == pytest.approx(1 / math.cos(alpha * math.pi / 2), rel=1e-12)


def test_sandwich_errors():
    sampled = WeightSpec.sampled((0.0, 1.0, 2.0), (1.0, 2.0, 1.0))
    with pytest.raises(Unsupported):
        sandwich(sampled, gauss(16), 16)
    with pytest.raises(ValueError):
        sandwich(TAN, gauss(8), 16)


def test_step_equivalent_to_constant():
    pair = equivalent_weight_comparison(WeightSpec.constant(), STEP, gauss(32), 32)
    assert pair.equivalence_constant == 2.0
    assert pair.same_floor and pair.first.floor == 1.0
    assert math.isfinite(pair.first.upper) and math.isfinite(pair.second.upper)
    assert pair.second.upper >= 1.0


def test_scaled_weight_is_equivalent():
    v = TAN.scaled(2.0)
    pair = equivalent_weight_comparison(TAN, v, gauss(32), 32)
    assert pair.equivalence_constant == pytest.approx(2.0, rel=1e-14)
    assert pair.same_floor
    assert pair.first.upper == pytest.approx(pair.second.upper, abs=1e-10)
    for N in (4, 8, 16, 32):
        a = riesz_norm_section(table(TAN, 64), N).sec_phi
        b = riesz_norm_section(table(v, 64), N).sec_phi
        assert a == pytest.approx(b, abs=1e-10)


def test_tan_not_equivalent_to_abs_theta():
    with pytest.raises(NotEquivalent):
        equivalent_weight_comparison(TAN, WeightSpec.abs_theta_alpha(0.5), gauss(16), 16)


def test_equivalence_cap():
    v = WeightSpec.piecewise_step((1.0, 50.0), (0.0,))
    assert equivalence_constant(WeightSpec.constant(), v) == 50.0
    with pytest.raises(NotEquivalent):
        equivalent_weight_comparison(WeightSpec.constant(), v, gauss(16), 16, cap=10.0)


def test_equivalence_grid_probes_singular_points():
    th = equivalence_grid(TAN, TAN)
    assert np.all((th > -math.pi) & (th < math.pi))
    assert np.min(np.abs(th)) < 1e-15
    assert np.max(th) > math.pi - 1e-14
    step = WeightSpec.piecewise_step((1.0, 2.0, 3.0), (-2.5, 3.0))
    th2 = equivalence_grid(step, step)
    assert np.any(np.abs(th2 - 3.0) < 1e-12) and np.any(np.abs(th2 + 2.5) < 1e-12)


@given(alpha=st.floats(0.05, 0.95), a=st.floats(0.1, 3.0))
def test_floor_consistency(alpha, a):
    w = WeightSpec.power_of(WeightSpec.tan_alpha(alpha), a)
    p = critical_exponent(w)
    if p > 1:
        assert floor_value(p) == pytest.approx(1 / math.cos(math.pi / (2 * p)), abs=1e-12)


@given(c=st.floats(1e-3, 1e3))
def test_basis_constant_scale_invariant(c):
    a = basis_constant_section(section(TAN, 24), 24)
    b = basis_constant_section(table(WeightSpec.tan_alpha(0.5, scale=c), 24), 24)
    assert b == pytest.approx(a, abs=1e-10)
