import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pqtwistor.algebra import EPS, standard_metric, standard_triple
from pqtwistor.catalog import catalog_get, conf_flat, prod_surfaces
from pqtwistor.geometry import (
    DegeneratePoint,
    ManifoldSpec,
    PointFrame,
    SpecError,
    christoffel,
    curvature,
    curvature_split,
    extract_omegas,
    fundamental_forms,
    nabla_J,
    nijenhuis,
    ricci_forms,
    torsion,
    weyl_asd,
    weyl_decomposition,
)
from pqtwistor.oracle import QUANTITIES, WIDE, fd_nabla_J, fd_partials, fd_riemann, run_oracle, weyl_blocks

FOUR_DIM_CURVED = ["conf-flat", "prod-surfaces", "prod-surfaces-opposite"]

box_points = st.lists(st.floats(min_value=-0.9, max_value=0.9, allow_nan=False), min_size=4, max_size=4)


def test_flat_r4_vanishes():
    spec = catalog_get("flat-r4")
    p = [0.3, -0.2, 0.1, 0.5]
    gamma, dgamma = christoffel(spec, p)
    assert not gamma.any() and not dgamma.any()
    assert not curvature(spec, p).any()
    assert not torsion(spec, p).any()
    for a in (1, 2, 3):
        assert not nijenhuis(spec, a, p).any()
        assert not nabla_J(spec, a, p).any()


def test_conformal_christoffel_closed_form():
    # g = exp(2f) eta: Gamma^i_jk = delta^i_j f_k + delta^i_k f_j - eta_jk eta^il f_l
    spec = conf_flat("0.1*x*y")
    p = np.array([0.4, -0.7, 0.2, 0.9])
    df = np.array([0.1 * p[1], 0.1 * p[0], 0.0, 0.0])
    eta = standard_metric(1)
    eye = np.eye(4)
    expected = (
        np.einsum("ij,k->ijk", eye, df) + np.einsum("ik,j->ijk", eye, df) - np.einsum("jk,i->ijk", eta, eta @ df)
    )
    np.testing.assert_allclose(PointFrame(spec, p).gamma, expected, atol=1e-15)


@pytest.mark.parametrize("k1, k2", [(1.0, 1.0), (1.0, -1.0), (0.5, 2.0), (-1.0, 0.5)])
def test_product_scalar_curvature(k1, k2):
    # the second factor is minus a metric of curvature -k2, whose scalar curvature is +2 k2
    spec = prod_surfaces(k1, k2)
    for p in spec.sample(3, 1):
        w = weyl_decomposition(PointFrame(spec, p))
        assert w.scalar_curvature == pytest.approx(2 * k1 + 2 * k2, abs=1e-10)


@pytest.mark.parametrize("k1, k2", [(1.0, 1.0), (0.5, 2.0), (1.0, -1.0)])
def test_product_weyl_spectrum(k1, k2):
    # the self-dual Weyl block of a product of surfaces has spectrum (k1 + k2) / 6 * (2, -1, -1);
    # eigenvalues do not depend on the chart, unlike the matrix norm that is reported
    spec = prod_surfaces(k1, k2)
    expected = np.sort(np.array([2.0, -1.0, -1.0, 0.0, 0.0, 0.0]) * (k1 + k2) / 6)
    for p in spec.sample(3, 6):
        pf = PointFrame(spec, p)
        for block in weyl_blocks(pf.g, pf.R, pf.J[0]):
            np.testing.assert_allclose(np.sort(np.linalg.eigvals(block).real), expected, atol=1e-10)


def test_product_weyl_norm_at_origin():
    # g is the flat metric at the origin, where the reported norm is sqrt(6) (k1 + k2) / 6
    w = weyl_decomposition(PointFrame(catalog_get("prod-surfaces"), np.zeros(4)))
    assert w.plus == pytest.approx(np.sqrt(2.0 / 3.0), rel=1e-12)
    assert w.minus == pytest.approx(w.plus, rel=1e-12)
    opposite = weyl_decomposition(PointFrame(catalog_get("prod-surfaces-opposite"), [0.2, 0.1, -0.3, 0.4]))
    assert opposite.plus < 1e-12 and opposite.minus < 1e-12


def test_conformally_flat_weyl_vanishes():
    spec = catalog_get("conf-flat")
    for p in spec.sample(5, 3):
        plus, minus = weyl_asd(spec, p)
        assert plus < 1e-12 and minus < 1e-12


@settings(max_examples=25, deadline=None)
@given(box_points, st.sampled_from(FOUR_DIM_CURVED))
def test_curvature_symmetries(p, name):
    pf = PointFrame(catalog_get(name), p)
    R, g = pf.R, pf.g
    np.testing.assert_allclose(R, -np.transpose(R, (0, 1, 3, 2)), atol=1e-12)
    Rl = np.einsum("ai,ibcd->abcd", g, R)
    np.testing.assert_allclose(Rl, -np.transpose(Rl, (1, 0, 2, 3)), atol=1e-12)
    np.testing.assert_allclose(Rl, np.transpose(Rl, (2, 3, 0, 1)), atol=1e-12)
    bianchi = R + np.transpose(R, (0, 2, 3, 1)) + np.transpose(R, (0, 3, 1, 2))
    assert np.max(np.abs(bianchi)) < 1e-9


@pytest.mark.parametrize("name", ["flat-r4-srel", "flat-r8-pqkt", "perturbed-J", "frame-hpc-4d"])
def test_two_form_antisymmetries(name):
    spec = catalog_get(name)
    pf = PointFrame(spec, spec.sample(1, 2)[0])
    np.testing.assert_allclose(pf.T, -np.transpose(pf.T, (0, 2, 1)), atol=1e-12)
    np.testing.assert_allclose(pf.N, -np.transpose(pf.N, (0, 1, 3, 2)), atol=1e-12)
    np.testing.assert_allclose(pf.rho, -np.transpose(pf.rho, (0, 2, 1)), atol=1e-12)
    np.testing.assert_allclose(pf.F, -np.transpose(pf.F, (0, 2, 1)), atol=1e-12)


@pytest.mark.parametrize("name", ["flat-r4", "conf-flat", "prod-surfaces", "flat-r8-pqkt", "flat-r4-srel"])
@pytest.mark.parametrize("quantity", QUANTITIES)
def test_jet_matches_oracle(name, quantity):
    spec = catalog_get(name)
    if quantity == "weyl" and spec.dim != 4:
        pytest.skip("Weyl blocks are four-dimensional")
    for p in spec.sample(3, 17):
        rec = run_oracle(spec, quantity, p, 1e-5)
        assert rec["max_rel_dev"] < 1e-5, rec


@pytest.mark.parametrize("name", ["conf-flat", "prod-surfaces", "flat-r8-pqkt"])
def test_ricci_forms_and_omegas_match_oracle(name):
    spec = catalog_get(name)
    for p in spec.sample(2, 23):
        pf = PointFrame(spec, p)
        R = np.asarray(fd_riemann(spec, p, 1e-5), dtype=float)
        rho = np.stack([0.5 * EPS[a] * np.einsum("ji,ijkl->kl", pf.J[a], R) for a in range(3)])
        np.testing.assert_allclose(pf.rho, rho, atol=1e-7)
        # omega from the trace pairing, with nabla J built from differenced data
        NJ = np.asarray(fd_nabla_J(spec, p, 1e-5), dtype=float)
        d = spec.dim
        o1 = 0.5 * (-np.einsum("im,kmi->k", pf.J[2], NJ[1]) + np.einsum("im,kmi->k", pf.J[1], NJ[2])) / d
        np.testing.assert_allclose(pf.omega[0], o1, atol=1e-8)


def test_domega_matches_differenced_omega():
    spec = catalog_get("flat-r8-pqkt")
    p = spec.sample(1, 4)[0]

    def omega_at(q):
        return PointFrame(spec, np.asarray(q, dtype=float)).omega

    dw = np.asarray(fd_partials(omega_at, np.asarray(p, dtype=WIDE), 1e-5), dtype=float)  # [a, k, m]
    expected = np.transpose(dw, (0, 2, 1)) - dw
    np.testing.assert_allclose(PointFrame(spec, p).domega, expected, atol=1e-7)


@pytest.mark.parametrize("name", ["flat-r8-pqkt", "conf-flat", "prod-surfaces", "frame-hpc-4d", "flat-r4-srel"])
def test_curvature_commutator_identities(name):
    spec = catalog_get(name)
    for p in spec.sample(4, 8):
        pf = PointFrame(spec, p)
        assert pf.omega_defect < 1e-8
        res = pf.rel1_residuals()
        assert res["J1"] < 1e-7 and res["J2"] < 1e-7 and res["J3[A1]"] < 1e-7
        assert np.max(np.abs(pf.rho_vs_domega()["scaled"])) < 1e-7


def test_rho_needs_dimension_factor_in_eight_dimensions():
    spec = catalog_get("flat-r8-pqkt")
    pf = PointFrame(spec, spec.sample(1, 0)[0])
    assert np.max(np.abs(pf.rho_vs_domega()["unscaled"])) > 1e-2


@pytest.mark.parametrize("name", ["flat-r8-pqkt", "conf-flat"])
def test_curvature_split(name):
    spec = catalog_get(name)
    for p in spec.sample(4, 9):
        Rp, part, comm, recon = PointFrame(spec, p).curvature_split()
        assert comm < 1e-7 and recon < 1e-12


def test_function_api_shapes_and_errors():
    spec = catalog_get("flat-r8-pqkt")
    p = spec.sample(1, 1)[0]
    o1, o2, o3, defect = extract_omegas(spec, p)
    assert o1.shape == (8,) and defect < 1e-8
    assert len(ricci_forms(spec, p)) == 3
    Rp, part, info = curvature_split(spec, p)
    assert Rp.shape == (8, 8, 8, 8) and info["commutator"] < 1e-7
    with pytest.raises(ValueError):
        nijenhuis(spec, 4, p)
    with pytest.raises(ValueError):
        weyl_asd(spec, p)
    F1, F2, F3 = fundamental_forms(catalog_get("flat-r4"), np.zeros(4))
    np.testing.assert_array_equal(F1, -F1.T)


def test_fundamental_forms_wedge_to_volume():
    # F_a ^ F_a is a multiple of the volume form in dimension 4
    spec = catalog_get("prod-surfaces")
    for F in fundamental_forms(spec, [0.1, 0.2, 0.3, 0.1]):
        pf = F[0, 1] * F[2, 3] - F[0, 2] * F[1, 3] + F[0, 3] * F[1, 2]
        assert abs(pf) > 1e-3


def test_fundamental_forms_rejects_incompatible_metric():
    T = standard_triple(1)
    g = np.diag([1.0, 2.0, -1.0, -1.0])
    spec = ManifoldSpec.chart("bad", ("x", "y", "u", "v"), g, T.mats)
    with pytest.raises(ValueError):
        fundamental_forms(spec, np.zeros(4))


def test_pole_is_degenerate():
    spec = catalog_get("prod-surfaces")
    with pytest.raises(DegeneratePoint):
        PointFrame(spec, [0.0, 0.0, 2.0, 0.0]).g


def test_non_neutral_metric_is_degenerate():
    T = standard_triple(1)
    spec = ManifoldSpec.chart("riem", ("x", "y", "u", "v"), np.eye(4), T.mats)
    with pytest.raises(DegeneratePoint):
        PointFrame(spec, np.zeros(4)).g
    with pytest.raises(SpecError):
        spec.validate()


def test_frame_validation():
    T = standard_triple(1)
    c = np.zeros((4, 4, 4))
    c[0, 1, 2] = 1.0  # not antisymmetric
    with pytest.raises(SpecError):
        ManifoldSpec.frame("f", ("a", "b", "c", "d"), standard_metric(1), T.mats, c).validate()
    with pytest.raises(SpecError):
        ManifoldSpec.chart("odd", ("x", "y", "z"), np.eye(3), [np.eye(3)] * 3)


def test_frame_curvature_of_gl2():
    pf = PointFrame(catalog_get("frame-hpc-4d"), np.zeros(4))
    assert np.max(np.abs(pf.N)) == 0
    assert pf.omega_defect < 1e-12
    assert np.max(np.abs(pf.rho)) > 1e-3
