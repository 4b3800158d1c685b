import math

import numpy as np
import pytest

from neutralsurf.ambient import DomainRect
from neutralsurf.catalog import (
    Immersion,
    JetPoint,
    catalog_get,
    catalog_names,
    check_membership,
    induced_metric,
)
from neutralsurf.errors import DegeneracyError, InputMismatchError


def scaled_copy(imm: Immersion, factor: float) -> Immersion:
    def evaluate(s, t):
        jp = imm.evaluate(s, t)
        return JetPoint(jp.ambient, tuple(factor * c for c in jp.components))

    return Immersion(
        name=f"{imm.name}_x{factor}",
        ambient=imm.ambient,
        evaluator=evaluate,
        domain=imm.domain,
    )


class TestCatalogGet:
    def test_phi_position_at_origin(self):
        phi = catalog_get("phi_h42")
        x = phi.evaluate(0.0, 0.0).position()
        assert np.allclose(x.coords, [-7 / 8, 0.0, 1 / 2, 0.0, -1 / 8], atol=1e-15)

    def test_flat_l_position_at_origin(self):
        fl = catalog_get("flat_L")
        x = fl.evaluate(0.0, 0.0).position()
        r = 1 / math.sqrt(2)
        assert np.allclose(x.coords, [r, r, 0.0, 0.0, 0.0], atol=1e-15)

    def test_linear_graph_is_flat_plane(self):
        # f(z) = 2z: affine graph, all second derivatives vanish
        imm = catalog_get("holomorphic_graph", {"f": "2*z"})
        jp = imm.evaluate(1.5, 1.0)
        for acc in (jp.accel_ss(), jp.accel_st(), jp.accel_tt()):
            assert acc.euclid_norm() <= 1e-12

    def test_unknown_name(self):
        with pytest.raises(InputMismatchError):
            catalog_get("nonexistent")

    def test_unknown_params_rejected(self):
        with pytest.raises(InputMismatchError):
            catalog_get("phi_h42", {"bogus": 1})

    def test_catalog_has_six_entries(self):
        assert len(catalog_names()) == 6

    def test_holomorphic_coefficient_list(self):
        by_text = catalog_get("holomorphic_graph", {"f": "z^2/2"})
        by_coeffs = catalog_get("holomorphic_graph", {"f": [0, 0, 0.5]})
        a = by_text.evaluate(1.5, 1.0).position()
        b = by_coeffs.evaluate(1.5, 1.0).position()
        assert np.allclose(a.coords, b.coords, atol=1e-15)

    def test_holomorphic_requires_f(self):
        with pytest.raises(InputMismatchError):
            catalog_get("holomorphic_graph")

    def test_holomorphic_rejects_non_spacelike_domain(self):
        # |f'(z)| = |z| < 1 near the origin: not space-like there
        with pytest.raises(DegeneracyError):
            catalog_get(
                "holomorphic_graph",
                {"f": "z^2/2", "domain": DomainRect(0.0, 0.5, 0.0, 0.5)},
            )

    def test_random_polynomial_deterministic(self):
        a = catalog_get("random_polynomial", {"seed": 12})
        b = catalog_get("random_polynomial", {"seed": 12})
        c = catalog_get("random_polynomial", {"seed": 13})
        pa = a.evaluate(0.3, -0.2).position().coords
        pb = b.evaluate(0.3, -0.2).position().coords
        pc = c.evaluate(0.3, -0.2).position().coords
        assert np.array_equal(pa, pb)
        assert not np.array_equal(pa, pc)


class TestMembership:
    def test_phi_on_random_points(self):
        phi = catalog_get("phi_h42")
        rng = np.random.default_rng(2)
        assert check_membership(phi, phi.domain.sample(rng, 100)) <= 1e-10

    def test_flat_l(self):
        fl = catalog_get("flat_L")
        rng = np.random.default_rng(2)
        assert check_membership(fl, fl.domain.sample(rng, 100)) <= 1e-10

    def test_scaled_copy_breaks_membership(self):
        phi = catalog_get("phi_h42")
        bad = scaled_copy(phi, 1.1)
        residual = check_membership(bad, [(0.0, 0.0)])
        # |1.1^2 * (-1) - (-1)| = 0.21
        assert residual == pytest.approx(0.21, abs=1e-12)

    def test_flat_ambient_rejected(self):
        with pytest.raises(InputMismatchError):
            check_membership(catalog_get("umbilical_flat"), [(0.0, 0.0)])


class TestInducedMetric:
    def test_phi_metric_closed_form(self):
        phi = catalog_get("phi_h42")
        rng = np.random.default_rng(4)
        for s, t in phi.domain.sample(rng, 60):
            m = induced_metric(phi, (s, t))
            assert abs(m.E - 1.0) <= 1e-10
            assert abs(m.F) <= 1e-10
            assert abs(m.G - math.exp(2 * s / math.sqrt(3))) <= 1e-10

    def test_totally_geodesic_at_origin_with_oracle(self):
        geo = catalog_get("totally_geodesic_h42")
        m = induced_metric(geo, (0.0, 0.0))
        assert (m.E, m.F, m.G) == pytest.approx((1.0, 0.0, 1.0), abs=1e-12)

        # independent finite-difference oracle on the raw chart
        def chart(s, t):
            return np.array(
                [
                    math.cosh(s) * math.cosh(t),
                    0.0,
                    0.0,
                    math.cosh(s) * math.sinh(t),
                    math.sinh(s),
                ]
            )

        h = 1e-6
        vs = (chart(h, 0) - chart(-h, 0)) / (2 * h)
        vt = (chart(0, h) - chart(0, -h)) / (2 * h)
        w = np.array([-1.0, -1.0, -1.0, 1.0, 1.0])
        assert float(np.dot(w * vs, vs)) == pytest.approx(m.E, abs=1e-9)
        assert float(np.dot(w * vs, vt)) == pytest.approx(m.F, abs=1e-9)
        assert float(np.dot(w * vt, vt)) == pytest.approx(m.G, abs=1e-9)

    def test_holomorphic_conformal_metric(self):
        imm = catalog_get("holomorphic_graph", {"f": "z^2/2"})
        m = induced_metric(imm, (1.6, 1.2))  # |z| = 2
        assert m.E == pytest.approx(3.0, abs=1e-12)
        assert m.G == pytest.approx(3.0, abs=1e-12)
        assert m.F == pytest.approx(0.0, abs=1e-12)

    def test_degenerate_point_raises(self):
        imm = catalog_get("holomorphic_graph", {"f": "z^2/2"})
        with pytest.raises(DegeneracyError):
            induced_metric(imm, (0.5, 0.5))  # |f'| < 1


CATALOG_SPECS = [
    ("phi_h42", {}),
    ("flat_L", {}),
    ("totally_geodesic_h42", {}),
    ("holomorphic_graph", {"f": "z^2/2"}),
    ("umbilical_flat", {}),
    ("random_polynomial", {"seed": 9}),
]


@pytest.mark.parametrize("name,params", CATALOG_SPECS)
def test_every_surface_spacelike_on_grid(name, params):
    imm = catalog_get(name, params)
    ss, ts = imm.domain.grid(33, 33)
    for s in ss:
        for t in ts:
            m = induced_metric(imm, (s, t))
            assert m.positive_definite


def test_nonflat_membership_invariant():
    for name in ("phi_h42", "flat_L", "totally_geodesic_h42"):
        imm = catalog_get(name)
        ss, ts = imm.domain.grid(9, 9)
        pts = [(float(s), float(t)) for s in ss for t in ts]
        assert check_membership(imm, pts) <= 1e-9
