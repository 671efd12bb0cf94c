import math

import numpy as np
import pytest

import pucci_spectra as ps

J01_SQ = 5.783185962946783
J11_SQ = 14.681970642123895


def test_pointwise_operators():
    ell = ps.EllipticityPair(1.0, 2.0)
    m = np.diag([2.0, -3.0])
    assert ps.pucci_plus(m, ell) == pytest.approx(1.0)
    assert ps.pucci_minus(m, ell) == pytest.approx(-4.0)
    assert ps.sym_eigenvalues(np.array([[2.0, 1.0], [1.0, 2.0]])) == pytest.approx([1.0, 3.0])
    assert ps.pucci_sup_oracle(np.diag([1.0, -1.0]), ell, 10, 1) == pytest.approx(1.0)


def test_invalid_ellipticity_raises():
    with pytest.raises(ps.PucciError):
        ps.EllipticityPair(2.0, 1.0)


def test_radial_eigenvalues():
    ball = ps.RadialDomain.ball(1.0)
    lap = ps.EllipticityPair(1.0, 1.0)
    e1 = ps.principal_eigenvalue_radial(ball, lap)
    assert e1["lambda"] == pytest.approx(J01_SQ, rel=1e-6)
    assert e1["profile"]["r"].shape == e1["profile"]["u"].shape
    e2 = ps.radial_nodal_eigenvalue(ball, lap, interior_zeros=1)
    assert e2["lambda"] == pytest.approx(30.471262343662087, rel=1e-6)


def test_grid_eigenvalue_and_symmetry():
    grid = ps.build_grid(ps.DomainSpec.cap_disc(1.0, 1.0, 0.0), 1.0 / 16)
    e = ps.principal_eigenvalue_grid(grid, ps.EllipticityPair(1.0, 1.0))
    assert e["lambda"] == pytest.approx(J11_SQ, rel=0.03)
    assert e["lambda_lo"] <= e["lambda"] <= e["lambda_hi"]

    disc = ps.build_grid(ps.DomainSpec.disc(1.0), 1.0 / 32)
    u = ps.sample(disc, lambda x, y: x * (1.0 - x * x - y * y))
    report = ps.detect_fss(u, 16)
    assert report["classification"] == "foliated_schwarz"
    nodal = ps.nodal_analysis(u)
    assert nodal["num_nodal_regions"] == 2
    assert nodal["touches_boundary"]


def test_semilinear_solves():
    nl = ps.Nonlinearity(c0=1.0)
    ell = ps.EllipticityPair(1.0, 1.0)
    prof = ps.solve_semilinear_radial(ps.RadialDomain.ball(1.0), ell, nl)
    assert prof["u"][0] == pytest.approx(0.25, rel=1e-6)
    grid = ps.build_grid(ps.DomainSpec.disc(1.0), 1.0 / 16)
    u = ps.solve_semilinear_grid(grid, ell, nl)
    assert u(0.0, 0.0) == pytest.approx(0.25, rel=1e-6)
    assert len(u.values) == grid.size


def test_run_experiment():
    rec = ps.run({"run.experiment": "eval", "ell.beta": "2", "eval.frames": "100"})
    assert rec["status"] == 0
    values = {r["name"]: r["value"] for r in rec["results"]}
    assert values["pucci_plus"] == pytest.approx(1.0)
    with pytest.raises(ps.ConfigError):
        ps.run({"no.such.key": "1"})


def test_version():
    assert ps.__version__.startswith("pucci-spectra")
    assert math.isfinite(ps.pucci_plus(np.eye(3), ps.EllipticityPair()))
