import math

import pytest

import cglab


def test_shape_formulas():
    assert cglab.mu_shape(1.0, 1.0) == pytest.approx(4.0)
    assert cglab.mu_shape(1.0, 0.0) == pytest.approx(1.0)
    d = cglab.DensityPair(lam=0.3, rho=0.6)
    assert cglab.w_star(d) == pytest.approx(9.0 / 14.0)
    m = cglab.clt_moments(cglab.DensityPair(lam=0.2, rho=0.6))
    assert m.mean_i_rate == pytest.approx(0.32)
    assert m.mean_j_rate == pytest.approx(0.12)
    pred = cglab.direction_prediction(cglab.DensityPair(lam=0.8, rho=0.2))
    assert not pred.deterministic
    assert (pred.u_lo, pred.u_hi) == pytest.approx((-0.6, 0.6))
    u = 0.25
    assert cglab.u_from_tan(cglab.tan_from_u(u)) == pytest.approx(u)


def test_weights_are_site_keyed():
    stream = cglab.RngStream(seed=5, stream=2)
    small = cglab.sample_weights(
        cglab.LatticeBox(cglab.Site(0, 0), cglab.Site(4, 4)), stream
    )
    big = cglab.sample_weights(
        cglab.LatticeBox(cglab.Site(-2, -2), cglab.Site(6, 6)), stream
    )
    for x in range(5):
        for y in range(5):
            assert small.at(cglab.Site(x, y)) == big.at(cglab.Site(x, y))
    a = small.array()
    assert a.shape == (5, 5)
    assert a[1, 3] == small.at(cglab.Site(3, 1))
    assert (a > 0).all()


def test_growth_recurrence_and_interface():
    stream = cglab.RngStream(seed=11)
    ifc = cglab.sample_random_walk(0.5, 0.5, 40, stream)
    lo = cglab.Site(ifc.alpha_at(10) + 1, ifc.beta_at(10) + 1)
    field = cglab.sample_weights(cglab.LatticeBox(lo, cglab.Site(10, 10)), stream)
    table = cglab.compute_growth(field, ifc, 10)

    z = cglab.Site(10, 10)
    below = table.g_or_zero(cglab.Site(10, 9))
    left = table.g_or_zero(cglab.Site(9, 10))
    assert table.g_at(z) == pytest.approx(field.at(z) + max(below, left))

    path, exhausted = cglab.interface_path(table)
    assert exhausted  # an unbounded trace always reaches the box edge
    assert path.steps[0] == cglab.Site(0, 0)
    assert all(b > a for a, b in zip(path.times, path.times[1:]))

    geo = cglab.geodesic_backtrack(table, z)
    assert geo.weight == pytest.approx(table.g_at(z))
    total = sum(field.at(s) for s in geo.sites)
    assert total == pytest.approx(geo.weight)

    g = table.g_array()
    assert math.isnan(g[0, 0]) or g[0, 0] >= 0.0


def test_harris_tagged_particle():
    state = cglab.nu_second_class_state(
        0.3, 0.6, cglab.harris_margin(5.0), cglab.RngStream(seed=3)
    )
    assert state.tag_pos == 0
    result = cglab.harris_simulate(
        state, t_max=5.0, sample_times=[1.0, 5.0], stream=cglab.RngStream(seed=4)
    )
    assert len(result.tag_samples) == 2
    assert result.rings > 0
    assert result.state.at(result.state.tag_pos) == 2


def test_ks_helpers():
    n = 400
    grid = [(-0.5 + (k + 0.5) / n) for k in range(n)]
    res = cglab.ks_uniform_test(grid, -0.5, 0.5)
    assert res.p > 0.5
    assert res.out_of_support == 0
    two = cglab.ks_two_sample(grid, list(reversed(grid)))
    assert two.d == pytest.approx(0.0, abs=1e-12)


def test_run_experiment(tmp_path):
    out = tmp_path / "rows.csv"
    report = cglab.run("coupling", n=16, replicas=3, seed=3, out=str(out))
    assert report.all_pass
    assert report.replicas_completed == 3
    assert out.exists()
    header = out.read_text().splitlines()[0]
    assert header == "replica,n_box,events,jumps,verified,ok"
    names = [v.name for v in report.verdicts]
    assert "dictionary_exact" in names and "replica_completion" in names

    with pytest.raises(ValueError):
        cglab.run("clt", n=50)  # horizon experiments take t, not n
    with pytest.raises(TypeError):
        cglab.run("coupling", bogus=1)
    with pytest.raises(AttributeError):
        cglab.run("nonsense")
