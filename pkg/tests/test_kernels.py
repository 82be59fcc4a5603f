import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from memheat import (
    ConstantKernel,
    DiracDeltaKernel,
    ExponentialKernel,
    FrequencyGrid,
    PolynomialHalfSquareKernel,
    SampledKernel,
    SumKernel,
    TimeSignal,
    laplace_of_kernel,
    validate_K0,
    validate_no_zeros,
)
from memheat.errors import NonpositiveRealPart, QuadratureDivergence
from memheat.kernels import default_k0_probes

ALL_ANALYTIC = [
    ConstantKernel(1.0),
    ConstantKernel(2.5),
    ExponentialKernel(1.0),
    ExponentialKernel(0.3),
    PolynomialHalfSquareKernel(),
    DiracDeltaKernel(),
]


def test_laplace_values():
    assert laplace_of_kernel(ConstantKernel(1.0), 2.0 + 0j) == pytest.approx(0.5)
    assert laplace_of_kernel(ExponentialKernel(1.0), 1.0 + 0j) == pytest.approx(0.5)
    assert laplace_of_kernel(PolynomialHalfSquareKernel(), 2.0 + 0j) == pytest.approx(0.125)


@pytest.mark.parametrize("kernel", ALL_ANALYTIC, ids=lambda k: k.form + str(k.params()))
def test_defining_identities_exact(kernel):
    z = np.array([0.5 + 0j, 1.0 + 2.0j, 3.0 - 0.7j, 50.0 + 10.0j])
    K = kernel.laplace(z)
    if isinstance(kernel, ConstantKernel):
        np.testing.assert_allclose(K * z, kernel.amplitude, rtol=1e-15)
    elif isinstance(kernel, ExponentialKernel):
        np.testing.assert_allclose(K * (z + kernel.decay), 1.0, rtol=1e-15)
    elif isinstance(kernel, PolynomialHalfSquareKernel):
        np.testing.assert_allclose(K * z**3, 1.0, rtol=1e-14)


@settings(max_examples=60, deadline=None)
@given(re=st.floats(1e-3, 1e3), im=st.floats(-1e3, 1e3))
def test_conjugate_symmetry(re, im):
    z = complex(re, im)
    for kernel in ALL_ANALYTIC:
        K1 = complex(np.asarray(kernel.laplace(z)).reshape(-1)[0])
        K2 = complex(np.asarray(kernel.laplace(np.conj(z))).reshape(-1)[0])
        assert K2 == np.conj(K1)


def test_sampled_matches_analytic_within_bound():
    base = ExponentialKernel(1.0)
    t = np.arange(0, 40.0 + 1e-12, 1e-3)
    samp = SampledKernel(TimeSignal(dt=1e-3, values=np.exp(-t)))
    for z in (1.0 + 0j, 2.0 + 1.0j, 5.0 - 3.0j):
        val, bound = samp.laplace_with_bound(z)
        exact = complex(np.asarray(base.laplace(z)).reshape(-1)[0])
        quad_err = 1e-6  # trapezoid O(dt^2) scale on this grid
        assert abs(val - exact) <= bound + quad_err


def test_sampled_growth_guard():
    t = np.arange(0, 10.0 + 1e-12, 1e-3)
    growing = SampledKernel(TimeSignal(dt=1e-3, values=np.exp(2.0 * t)))
    with pytest.raises(QuadratureDivergence):
        growing.laplace_with_bound(1.0 + 0j)
    # damped enough is fine
    growing.laplace_with_bound(3.0 + 0j)


def test_nonpositive_real_part_rejected():
    with pytest.raises(NonpositiveRealPart):
        laplace_of_kernel(ConstantKernel(), -1.0 + 1j)
    with pytest.raises(NonpositiveRealPart):
        laplace_of_kernel(ConstantKernel(), 0.0 + 1j)


class TestValidateK0:
    def test_constant_exact(self):
        rep = validate_K0(ConstantKernel(1.0))
        assert rep.admissible
        assert rep.a == 1.0
        assert rep.max_residual == 0.0

    @settings(max_examples=30, deadline=None)
    @given(alpha=st.floats(0.1, 10.0))
    def test_constant_recovers_alpha(self, alpha):
        rep = validate_K0(ConstantKernel(alpha**2))
        assert rep.admissible
        assert rep.a == pytest.approx(alpha, rel=1e-12)

    def test_exponential_bounded_remainder(self):
        # K - 1/z = -1/(z(z+1)), so z^2 (K - 1/z) = -z/(z+1): bounded by 1
        rep = validate_K0(ExponentialKernel(1.0))
        assert rep.admissible
        assert rep.a == pytest.approx(1.0)
        assert rep.max_residual <= 0.5 + 1e-12  # normalised by 1 + a^2

    def test_poly_rejected_k0_zero(self):
        rep = validate_K0(PolynomialHalfSquareKernel())
        assert not rep.admissible
        assert rep.a == 0.0

    def test_delta_rejected(self):
        rep = validate_K0(DiracDeltaKernel())
        assert not rep.admissible

    def test_sampled_exponential_admissible(self):
        t = np.arange(0, 30.0 + 1e-12, 1e-3)
        samp = SampledKernel(TimeSignal(dt=1e-3, values=np.exp(-t)))
        rep = validate_K0(samp, default_k0_probes(1.0, 2.0, 4))
        assert rep.admissible
        assert rep.a == pytest.approx(1.0, abs=1e-6)


class TestValidateNoZeros:
    def test_constant(self):
        grid = FrequencyGrid.geometric_real(0.1, 100.0, 25)
        assert validate_no_zeros(ConstantKernel(1.0), grid)

    def test_exponential_compact_grid(self):
        grid = FrequencyGrid.geometric_real(0.1, 10.0, 25)
        assert validate_no_zeros(ExponentialKernel(1.0), grid)

    def test_sum_linearity(self):
        k = SumKernel((ConstantKernel(1.0), ConstantKernel(-0.5)))
        grid = FrequencyGrid.geometric_real(0.5, 50.0, 20)
        assert validate_no_zeros(k, grid)
        z = 2.0 + 0j
        assert complex(np.asarray(k.laplace(z)).reshape(-1)[0]) == pytest.approx(0.25)

    def test_detects_zero(self):
        # K = 1/(z+1) - 1/(z+3) - small has zeros... build one with a real zero:
        # K = 1/z - 2/(z+1) vanishes at z = 1
        k = SumKernel((ConstantKernel(1.0),
                       SampledKernel(TimeSignal(dt=1e-3,
                                                values=-2 * np.exp(-np.arange(0, 40, 1e-3))))))
        grid = FrequencyGrid(np.array([1.0 + 0j]))
        assert not validate_no_zeros(k, grid, tol=1e-4)
