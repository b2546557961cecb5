import numpy as np
import pytest

from carnotlab import (
    build_measure,
    expectation,
    get_group,
    make_potential,
    mcmc_sample,
    shooting_distance_field,
)
from carnotlab.errors import InputError
from carnotlab.grid import grid_from_callable
from carnotlab.measures import _radial_tail_fraction


class TestBuildMeasure:
    def test_gaussian_partition_value(self, gauss_measure):
        # midpoint quadrature of e^{-x^2/2} on [-8, 8]
        assert gauss_measure.Z == pytest.approx(np.sqrt(2 * np.pi), rel=1e-4)
        assert gauss_measure.weights.values.sum() == pytest.approx(1.0, abs=1e-15)
        assert gauss_measure.tail_bound < 1e-6

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    def test_uniform_measure(self, line):
        field = shooting_distance_field(line, [[-2.0, 2.0]], (41,))
        # the flat potential has no tail control, so opt out of the check
        mu = build_measure(line, field, make_potential("constant"),
                           tail_threshold=1.0)
        np.testing.assert_allclose(mu.weights.values, 1.0 / 41, rtol=1e-12)
        assert mu.Z == pytest.approx(4.0 + 4.0 / 40, rel=1e-12)  # 41 cells

    def test_tail_refusal_mentions_box(self, line):
        field = shooting_distance_field(line, [[-2.0, 2.0]], (41,))
        with pytest.raises(InputError, match="enlarge the box"):
            build_measure(line, field, make_potential("gaussian-euclid"))

    def test_tail_fraction_monotone_in_radius(self):
        pot = make_potential("gaussian-euclid")
        fr = [_radial_tail_fraction(pot, 4, R) for R in (2.0, 3.0, 4.0, 5.0)]
        assert all(a > b for a, b in zip(fr, fr[1:]))
        assert fr[-1] < 1e-3

    def test_h1_tail_small(self, h1_measure):
        assert h1_measure.tail_bound < 1e-6


class TestExpectation:
    def test_normalization(self, gauss_measure):
        assert expectation(gauss_measure, lambda m: np.ones(m.shape[:-1])) == 1.0

    def test_linearity(self, gauss_measure):
        f = lambda m: m[..., 0] ** 2
        g = lambda m: np.cos(m[..., 0])
        lhs = expectation(gauss_measure, lambda m: 2.0 * f(m) + g(m))
        rhs = 2.0 * expectation(gauss_measure, f) + expectation(gauss_measure, g)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_gaussian_moments(self, gauss_measure):
        assert expectation(gauss_measure, lambda m: m[..., 0]) == pytest.approx(
            0.0, abs=1e-12
        )
        assert expectation(gauss_measure, lambda m: m[..., 0] ** 2) == pytest.approx(
            1.0, rel=1e-4
        )

    def test_half_space(self, h1_measure):
        p = expectation(
            h1_measure, lambda m: (m[..., 0] > 0).astype(float)
        )
        # symmetric up to the x = 0 node layer, which carries ~13% of the mass
        assert 0.40 < p < 0.5

    def test_grid_function_and_array(self, gauss_measure):
        g = grid_from_callable(gauss_measure.box, gauss_measure.weights.shape,
                               lambda m: m[..., 0] ** 2)
        e1 = expectation(gauss_measure, g)
        e2 = expectation(gauss_measure, g.values)
        assert e1 == e2

    def test_shape_mismatch(self, gauss_measure):
        with pytest.raises(InputError):
            expectation(gauss_measure, np.zeros(5))

    def test_nonfinite_observable(self, gauss_measure):
        vals = np.zeros(gauss_measure.weights.shape)
        vals[0] = np.inf
        with pytest.raises(InputError):
            expectation(gauss_measure, vals)


class TestMcmc:
    def test_requires_min_samples(self, gauss_measure):
        with pytest.raises(InputError):
            mcmc_sample(gauss_measure, 100, seed=0)

    def test_deterministic(self, gauss_measure):
        c1 = mcmc_sample(gauss_measure, 1000, seed=42)
        c2 = mcmc_sample(gauss_measure, 1000, seed=42)
        np.testing.assert_array_equal(c1.points, c2.points)
        assert c1.provenance == c2.provenance

    def test_seed_changes_chain(self, gauss_measure):
        c1 = mcmc_sample(gauss_measure, 1000, seed=1)
        c2 = mcmc_sample(gauss_measure, 1000, seed=2)
        assert not np.array_equal(c1.points, c2.points)

    def test_gaussian_moments(self, gauss_measure):
        # the 1D target mixes best with a larger proposal than the default
        cloud = mcmc_sample(gauss_measure, 4000, seed=3, step_scale=2.0)
        x = cloud.points[:, 0]
        assert abs(x.mean()) < 0.1
        assert x.var() == pytest.approx(1.0, rel=0.1)
        assert 0.1 <= cloud.provenance["acceptance_rate"] <= 0.7
        assert cloud.provenance["warnings"] == []

    def test_h1_second_moment(self, heis, h1_measure):
        from carnotlab.metric import cc_distance_origin

        cloud = mcmc_sample(h1_measure, 3000, seed=4)
        emp = float(np.mean(cc_distance_origin(heis, cloud.points) ** 2))
        quad = expectation(h1_measure, h1_measure.distance.values ** 2)
        assert emp == pytest.approx(quad, rel=0.05)

    def test_provenance_fields(self, gauss_measure):
        cloud = mcmc_sample(gauss_measure, 1000, seed=5, thin=3)
        p = cloud.provenance
        assert p["thin"] == 3
        assert p["chain_length"] == p["burn_in"] + 3000
        assert cloud.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_cloud_validation():
    from carnotlab.measures import SampleCloud

    with pytest.raises(InputError):
        SampleCloud(np.zeros((3, 2)), np.array([0.5, 0.5]), {})
    with pytest.raises(InputError):
        SampleCloud(np.zeros((2, 2)), np.array([0.7, 0.7]), {})


def test_weights_must_be_normalized(line):
    from carnotlab.measures import RadialMeasure

    field = shooting_distance_field(line, [[-2.0, 2.0]], (11,))
    bad = field.grid.with_values(np.full(11, 0.2))
    with pytest.raises(InputError):
        RadialMeasure(line, make_potential("constant"), field.grid, bad, 1.0, 0.0)
