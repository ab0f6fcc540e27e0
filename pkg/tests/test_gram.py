import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rieszlab import kernels
from rieszlab.errors import InsufficientCoefficients, NegativeQuadraticForm
from rieszlab.gram import BasisRange, GramBlock, build_gram, weighted_norm
from rieszlab.weights import WeightSpec

from conftest import STEP, table

FIXTURES = [
    WeightSpec.constant(),
    WeightSpec.tan_alpha(0.2),
    WeightSpec.tan_alpha(0.5),
    WeightSpec.tan_alpha(0.8),
    WeightSpec.abs_theta_alpha(0.5),
    STEP,
]


def test_basis_range():
    r = BasisRange(-2, 1)
    assert len(r) == 4
    np.testing.assert_array_equal(r.indices, [-2, -1, 0, 1])
    with pytest.raises(ValueError):
        BasisRange(3, 2)


def test_constant_gram_is_identity():
    g = build_gram(table(WeightSpec.constant(), 4), BasisRange(0, 2))
    np.testing.assert_array_equal(g.matrix, np.eye(3))
    assert g.is_square


def test_cross_block_index_bookkeeping():
    ft = table(WeightSpec.tan_alpha(0.5), 8)
    g = build_gram(ft, BasisRange(0, 1), BasisRange(-1, -1))
    assert g.matrix.shape == (2, 1)
    np.testing.assert_array_equal(g.matrix[:, 0], [np.conj(ft[1]), np.conj(ft[2])])
    assert not g.is_square


def test_step_gram():
    g = build_gram(table(STEP, 4), BasisRange(0, 1)).matrix
    assert g[0, 0] == pytest.approx(1.5, abs=1e-15)
    assert g[1, 1] == pytest.approx(1.5, abs=1e-15)
    # entry (j, k) = w_hat(k - j): above the diagonal w_hat(1) = -i/pi
    assert g[0, 1] == pytest.approx(-1j / math.pi, abs=1e-15)
    assert g[1, 0] == pytest.approx(1j / math.pi, abs=1e-15)


def test_insufficient_coefficients():
    with pytest.raises(InsufficientCoefficients):
        build_gram(table(WeightSpec.constant(), 4), BasisRange(0, 5))


@pytest.mark.parametrize("w", FIXTURES, ids=lambda w: w.ident)
def test_positive_definite_up_to_512(w):
    g = build_gram(table(w, 511), BasisRange(0, 511)).matrix
    np.testing.assert_array_equal(g, g.conj().T)
    f = kernels.cholesky(g)
    assert f.dim == 512 and f.cond_estimate >= 1.0


@pytest.mark.parametrize("w", FIXTURES, ids=lambda w: w.ident)
def test_toeplitz_shift_invariance(w):
    ft = table(w, 64)
    a = build_gram(ft, BasisRange(0, 20)).matrix
    b = build_gram(ft, BasisRange(5, 25)).matrix
    np.testing.assert_array_equal(a, b)


def test_weighted_norm_examples():
    ft = table(WeightSpec.constant(), 4)
    g3 = build_gram(ft, BasisRange(0, 2))
    assert weighted_norm([1, 0, 0], g3) == 1.0
    assert weighted_norm([3, 4], build_gram(ft, BasisRange(0, 1))) == 5.0
    gt = build_gram(table(WeightSpec.tan_alpha(0.5), 4), BasisRange(0, 1))
    assert weighted_norm([1, 0], gt) == pytest.approx(2 ** 0.25, abs=1e-6)
    assert weighted_norm([1, 0], gt) == pytest.approx(1.1892, abs=1e-4)


def test_weighted_norm_errors():
    ft = table(WeightSpec.constant(), 4)
    with pytest.raises(ValueError):
        weighted_norm([1, 0], build_gram(ft, BasisRange(0, 2)))
    with pytest.raises(ValueError):
        weighted_norm([1], build_gram(ft, BasisRange(0, 0), BasisRange(1, 1)))
    bad = GramBlock(BasisRange(0, 1), BasisRange(0, 1), np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(NegativeQuadraticForm):
        weighted_norm([1.0, -1.0], bad)


@given(x=st.lists(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False),
                  min_size=1, max_size=20))
def test_parseval_constant_weight(x):
    n = len(x)
    g = build_gram(table(WeightSpec.constant(), 20), BasisRange(0, n - 1))
    assert weighted_norm(x, g) == pytest.approx(float(np.linalg.norm(x)), rel=1e-14, abs=1e-300)


@given(x=st.lists(st.floats(-10, 10), min_size=8, max_size=8), c=st.floats(0.01, 100.0))
def test_weighted_norm_scales_with_weight(x, c):
    ft = table(WeightSpec.tan_alpha(0.5), 8)
    g1 = build_gram(ft, BasisRange(0, 7))
    gc = GramBlock(g1.rows, g1.cols, c * g1.matrix)
    assert weighted_norm(x, gc) == pytest.approx(math.sqrt(c) * weighted_norm(x, g1),
                                                 rel=1e-12, abs=1e-12)
