import math

import numpy as np
import pytest

import bibfractal as bf


def test_cubic_roots_and_step():
    cubic = bf.PolynomialMap.cubic_unity()
    assert cubic.degree == 3
    assert cubic.roots[0] == pytest.approx(1.0)
    assert bf.newton_step(cubic, 2.0) == pytest.approx(2.0 - 7.0 / 12.0)
    orbit = bf.iterate_orbit(cubic, 2.0)
    assert orbit.status == bf.Termination.Converged and orbit.root_index == 0


def test_singular_derivative_raises():
    with pytest.raises(bf.BibError, match="SingularDerivative"):
        bf.newton_step(bf.PolynomialMap.cubic_unity(), 0.0)


def test_grid_boundary_dimension_partition():
    cubic = bf.PolynomialMap.cubic_unity()
    grid = bf.label_grid(cubic, bf.GridSpec(-2, 2, -2, 2, 128, 128))
    labels = grid.labels
    assert labels.shape == (128, 128)
    assert set(np.unique(labels)) == {0, 1, 2}
    mask = bf.extract_boundary(grid)
    est = bf.box_counting_dimension(mask)
    assert 1.0 < est.slope < 2.0
    part = bf.build_partition(grid, mask, 0, 2)
    assert 0.0 < part.theta < 1.0
    basin = labels == 0
    assert not (part.inner & ~basin).any()
    assert not (basin & ~part.outer).any()
    report = bf.measure_report(grid, mask)
    assert sum(report["basin_fractions"]) == pytest.approx(1.0)


def test_kernel_and_perception():
    cubic = bf.PolynomialMap.cubic_unity()
    grid = bf.label_grid(cubic, bf.GridSpec(-2, 2, -2, 2, 128, 128))
    kernel = bf.switch_kernel(cubic, grid, samples_per_row=2000, seed=3)
    for row in kernel.p:
        assert sum(row) == pytest.approx(1.0, abs=1e-12)
    percepts, stats = bf.run_perception(bf.make_kernel([[0.9, 0.05, 0.05], [0.05, 0.9, 0.05], [0.05, 0.05, 0.9]]),
                                        steps=20000, seed=2)
    assert len(percepts) == 20000
    assert np.mean(stats["means"]) == pytest.approx(10.0, rel=0.1)


def test_bayes_and_free_energy():
    prior = bf.Distribution(["h1", "h2"], [0.5, 0.5])
    lik = bf.LikelihoodTable(["h1", "h2"], ["d1", "d2"], [[0.8, 0.2], [0.3, 0.7]])
    post = bf.bayes_update(prior, lik, "d1")
    assert post.probs == pytest.approx([0.8 / 1.1, 0.3 / 1.1])
    report = bf.free_energy(post, lik, prior, "d1")
    assert report.free_energy == pytest.approx(-math.log(0.55), abs=1e-12)
    relation = bf.build_relation(prior, lik, 0.3)
    assert relation.pairs() == [("h1", "d1"), ("h2", "d2")]
    lower, upper = bf.rough_approximation(relation)
    assert upper["h1"] == {"d1"}


def test_bib_state_steps():
    prior = bf.Distribution.uniform(["h1", "h2", "h3"])
    lik = bf.LikelihoodTable(["h1", "h2", "h3"], ["d1", "d2", "d3"],
                             [[0.6, 0.2, 0.2], [0.2, 0.6, 0.2], [0.2, 0.2, 0.6]])
    state = bf.BIBState(prior, lik, gamma=0.0, theta=0.0, seed=5)
    for _ in range(20):
        events = state.step("d3")
        assert "B" in events
    assert state.t == 20
    assert state.map_hypothesis == 2


def test_walker_beats_control():
    path, runs = bf.simulate_walk(steps=30000, seed=1)
    assert path.shape == (30001, 2)
    bib_alpha = bf.diffusion_statistics(path, runs)["alpha"]
    cpath, cruns = bf.simulate_walk(steps=30000, seed=1, control=True)
    control_alpha = bf.diffusion_statistics(cpath, cruns)["alpha"]
    assert bib_alpha > control_alpha + 0.15
