import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.stats import norm

from decest.model import (
    CodebookSpec,
    Quantizer,
    SystemParams,
    cell_bounds,
    pmf_approx,
    pmf_quantized,
    quantize,
    quantize_vector,
    sample_observations,
)

Q16 = Quantizer(16, 1.0)


def make_params(**kw):
    defaults = dict(n_sensors=10, theta_range=1.0, sigma_s=0.1, sigma_c=0.5,
                    energy_per_observation=1.0, quantizer=Q16)
    defaults.update(kw)
    return SystemParams(**defaults)


class TestQuantizer:
    def test_levels(self):
        assert Q16.step == pytest.approx(2.0 / 15.0)
        vals = Q16.values
        assert vals[0] == -1.0 and vals[-1] == 1.0
        assert np.all(np.diff(vals) > 0)

    def test_invalid(self):
        with pytest.raises(ValueError):
            Quantizer(1, 1.0)
        with pytest.raises(ValueError):
            Quantizer(8, -1.0)

    def test_tail_saturation(self):
        assert quantize(-5.0, Q16) == (0, -1.0)
        m, v = quantize(7.3, Q16)
        assert m == 15 and v == 1.0

    def test_level_fixed_point(self):
        for m in range(16):
            s = m * Q16.step - 1.0
            assert quantize(s, Q16)[0] == m

    def test_nearest_level_oracle(self):
        # brute-force argmin over all level distances
        rng = np.random.default_rng(7)
        for x in np.concatenate([rng.uniform(-2, 2, 200), [0.05]]):
            expect = int(np.argmin(np.abs(x - Q16.values)))
            got, val = quantize(float(x), Q16)
            if not np.isclose(abs(x - Q16.values[expect]), abs(x - val)):
                assert got == expect
        m, v = quantize(0.05, Q16)
        assert m == 8 and v == pytest.approx(1.0 / 15.0)

    def test_boundary_tie_goes_low(self):
        edge = Q16.cell_edges()[8]          # boundary between cells 8 and 9
        assert quantize(float(edge), Q16)[0] == 8
        assert quantize(float(np.nextafter(edge, 2.0)), Q16)[0] == 9

    @given(st.floats(min_value=-50, max_value=50, allow_nan=False))
    @settings(max_examples=200, deadline=None)
    def test_idempotent(self, x):
        m, v = quantize(x, Q16)
        assert quantize(v, Q16) == (m, v)

    @given(st.floats(-10, 10), st.floats(-10, 10))
    @settings(max_examples=200, deadline=None)
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        assert quantize(lo, Q16)[0] <= quantize(hi, Q16)[0]

    def test_vector_matches_scalar(self):
        xs = np.linspace(-1.5, 1.5, 31)
        qv = quantize_vector(xs, Q16)
        for x, i, v in zip(xs, qv.indices, qv.values):
            assert quantize(float(x), Q16) == (i, v)


class TestObservations:
    def test_zero_noise(self):
        p = make_params(sigma_s=1e-300)
        x = sample_observations(0.5, p, np.random.default_rng(0))
        assert np.allclose(x, 0.5)

    def test_law_of_large_numbers(self):
        p = make_params(n_sensors=100_000)
        x = sample_observations(0.0, p, np.random.default_rng(3))
        assert abs(np.mean(x)) < 4 * 0.1 / np.sqrt(100_000)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            sample_observations(1.1, make_params(), np.random.default_rng(0))

    def test_deterministic_given_stream(self):
        p = make_params()
        a = sample_observations(0.2, p, np.random.default_rng(11))
        b = sample_observations(0.2, p, np.random.default_rng(11))
        assert np.array_equal(a, b)


class TestPmf:
    def test_sums_to_one(self):
        for theta in np.linspace(-2, 2, 41):
            assert pmf_quantized(theta, Q16, 0.1).sum() == pytest.approx(1.0, abs=1e-12)

    def test_concentration(self):
        p = pmf_quantized(Q16.values[8], Q16, 1e-4)
        assert p[8] > 1 - 1e-12

    def test_quadrature_oracle(self):
        theta, sigma = 0.0, 0.1
        lo, hi = cell_bounds(Q16)
        for m in range(16):
            a = max(lo[m], theta - 12 * sigma)
            b = min(hi[m], theta + 12 * sigma)
            expect = quad(norm(theta, sigma).pdf, a, b, epsabs=1e-13)[0] if a < b else 0.0
            assert pmf_quantized(theta, Q16, sigma)[m] == pytest.approx(expect, abs=1e-9)

    def test_symmetry(self):
        for theta in (0.3, 0.77, 1.4):
            p_pos = pmf_quantized(theta, Q16, 0.2)
            p_neg = pmf_quantized(-theta, Q16, 0.2)
            assert np.allclose(p_pos, p_neg[::-1], rtol=1e-12, atol=1e-300)

    def test_vectorized_theta(self):
        thetas = np.array([-0.4, 0.0, 0.9])
        mat = pmf_quantized(thetas, Q16, 0.1)
        for k, th in enumerate(thetas):
            assert np.array_equal(mat[k], pmf_quantized(float(th), Q16, 0.1))

    def test_rejects_bad_sigma(self):
        with pytest.raises(ValueError):
            pmf_quantized(0.0, Q16, 0.0)


class TestPmfApprox:
    def test_mode_at_level(self):
        w = pmf_approx(Q16.values[5], Q16, 0.1)
        assert np.argmax(w) == 5

    def test_flat_limit(self):
        w = pmf_approx(0.0, Q16, 50.0)
        assert w.max() / w.min() == pytest.approx(1.0, abs=1e-3)

    def test_close_to_exact_near_theta(self):
        # midpoint-rule error is ~ step^2 (z^2-1) / (24 sigma^2): about 4%
        # at M=16 where step/sigma = 4/3, inside 1% once step/sigma < 0.16
        w16, p16 = pmf_approx(0.0, Q16, 0.1), pmf_quantized(0.0, Q16, 0.1)
        near16 = np.abs(Q16.values) <= 2 * 0.1
        assert np.all(np.abs(w16[near16] / p16[near16] - 1) < 0.2)
        q = Quantizer(128, 1.0)
        near = np.abs(q.values) <= 2 * 0.1
        ratio = pmf_approx(0.0, q, 0.1)[near] / pmf_quantized(0.0, q, 0.1)[near]
        assert np.all((0.99 < ratio) & (ratio < 1.01))

    def test_ratio_converges_as_step_shrinks(self):
        worst = []
        for m in (16, 64, 256):
            q = Quantizer(m, 1.0)
            near = np.abs(q.values) <= 3 * 0.1
            ratio = pmf_approx(0.0, q, 0.1)[near] / pmf_quantized(0.0, q, 0.1)[near]
            worst.append(np.max(np.abs(ratio - 1)))
        assert worst[0] > worst[1] > worst[2]
        assert worst[2] < 5e-3


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            make_params(n_sensors=0)
        with pytest.raises(ValueError):
            make_params(sigma_s=0.0)
        with pytest.raises(ValueError):
            make_params(energy_per_observation=0.0)

    def test_codebook_spec_validation(self):
        with pytest.raises(ValueError):
            CodebookSpec("bogus")
        with pytest.raises(ValueError):
            CodebookSpec("training", 0)
