import math

import numpy as np
import pytest

from conftest import random_params
from goldman_lab.errors import InvalidParameter, OutOfRange
from goldman_lab.pants import (
    CATALOGUE_PAIRS,
    BoundaryInvariant,
    Hexagon,
    PantsParams,
    boundary_length,
    build_hexagon,
    catalogue,
    convert_params,
    geometric_cross_ratio,
    reference_params,
    rho,
    rho_inverse,
    rotate_labels,
    solve_holonomy,
)
from goldman_lab.projective import ProjectivePoint, convex_position, spectral

GOLDEN = 2.0 + math.sqrt(5.0)


def test_cell_membership_enforced():
    with pytest.raises(InvalidParameter):
        BoundaryInvariant(0.2, 4.0)  # below 2/sqrt(0.2) ~ 4.472
    with pytest.raises(InvalidParameter):
        BoundaryInvariant(0.2, 26.0)  # above 1/0.04 + 0.2
    with pytest.raises(InvalidParameter):
        BoundaryInvariant(1.2, 3.0)
    BoundaryInvariant(0.2, 5.0)


def test_rho_reference_values():
    p = reference_params()
    assert rho(1, p.R, 1.0) == pytest.approx(GOLDEN, rel=1e-12)
    assert rho(2, p.R, 2.0) == pytest.approx(5.0 + math.sqrt(20.0), rel=1e-12)
    for i in (1, 2, 3):
        assert rho(i, p.R, 1e-8) - 1.0 < 1e-6


def test_rho_strictly_increasing():
    rng = np.random.default_rng(2)
    for _ in range(20):
        p = random_params(rng)
        xs = np.sort(np.exp(rng.uniform(-3, 3, size=8)))
        for i in (1, 2, 3):
            vals = [rho(i, p.R, x) for x in xs]
            assert all(v2 > v1 > 1.0 for v1, v2 in zip(vals, vals[1:]))


def test_rho_inverse_reference():
    p = reference_params()
    assert rho_inverse(1, p.R, GOLDEN) == pytest.approx(1.0, rel=1e-12)


def test_rho_inverse_roundtrip():
    rng = np.random.default_rng(3)
    for _ in range(100):
        p = random_params(rng)
        x = math.exp(rng.uniform(math.log(1e-3), math.log(1e3)))
        i = int(rng.integers(1, 4))
        back = rho_inverse(i, p.R, rho(i, p.R, x))
        assert back == pytest.approx(x, rel=1e-9)


def test_rho_inverse_boundary():
    p = reference_params()
    with pytest.raises(OutOfRange):
        rho_inverse(1, p.R, 1.0)
    assert rho_inverse(1, p.R, 1.0 + 1e-12) < 1e-6


def test_convert_reference():
    p = reference_params()
    q = convert_params(p)
    assert q.chart == "sr"
    assert q.r == pytest.approx(GOLDEN, rel=1e-12)
    assert convert_params(q).t == pytest.approx(1.0, rel=1e-12)


def test_convert_roundtrip():
    rng = np.random.default_rng(5)
    for _ in range(100):
        p = random_params(rng)
        q = convert_params(convert_params(p))
        assert q.chart == p.chart
        assert q.internal == pytest.approx(p.internal, rel=1e-12)


def test_hexagon_reference_coordinates():
    hexagon = build_hexagon(reference_params())
    assert hexagon.a == ProjectivePoint((1, 0, 0))
    assert hexagon.b == ProjectivePoint((0, 1, 0))
    assert hexagon.c == ProjectivePoint((0, 0, 1))
    assert hexagon.f == ProjectivePoint((2, 2, -1))
    assert hexagon.d == ProjectivePoint((-1.0, GOLDEN, GOLDEN / 2))
    assert hexagon.e == ProjectivePoint((1.0, -1.0, GOLDEN / 2))
    assert convex_position(hexagon.vertices())


def test_hexagon_fixed_vertices_any_params():
    rng = np.random.default_rng(7)
    for _ in range(20):
        hexagon = build_hexagon(random_params(rng))
        assert hexagon.a == ProjectivePoint((1, 0, 0))
        assert hexagon.b == ProjectivePoint((0, 1, 0))
        assert hexagon.c == ProjectivePoint((0, 0, 1))
        assert hexagon.f == ProjectivePoint((2, 2, -1))
        assert convex_position(hexagon.vertices())


def test_holonomy_reference_eigenvalues():
    h = solve_holonomy(reference_params())
    expected = (0.2, (5 - math.sqrt(5)) / 2, (5 + math.sqrt(5)) / 2)
    assert spectral(h.A).eigenvalues == pytest.approx(expected, rel=1e-9)
    assert spectral(h.B).eigenvalues == pytest.approx(expected, rel=1e-9)
    assert spectral(h.C).eigenvalues == pytest.approx(expected, rel=1e-9)


def holonomy_invariants(p, h):
    hexagon = build_hexagon(p)
    cba = (h.C @ h.B @ h.A).entries
    assert np.abs(cba - np.eye(3)).max() < 1e-9
    assert h.B.apply(hexagon.a).approx_eq(hexagon.d, tol=1e-9)
    assert h.A.apply(hexagon.c).approx_eq(hexagon.f, tol=1e-9)
    assert h.C.apply(hexagon.b).approx_eq(hexagon.e, tol=1e-9)
    for inv, gen, fix in zip(p.R, (h.A, h.B, h.C), (hexagon.a, hexagon.b, hexagon.c)):
        data = spectral(gen)
        assert data.eigenvalues == pytest.approx(inv.eigenvalues(), rel=1e-9)
        assert data.eigenvectors[0].approx_eq(fix)
        measured = math.log(data.eigenvalues[2] / data.eigenvalues[0])
        assert measured == pytest.approx(boundary_length(inv), rel=1e-9)


def test_holonomy_invariants_random():
    rng = np.random.default_rng(11)
    for _ in range(25):
        p = random_params(rng)
        holonomy_invariants(p, solve_holonomy(p))


def test_boundary_length_values():
    assert boundary_length(BoundaryInvariant(0.2, 5.0)) == pytest.approx(
        math.log((25 + 5 * math.sqrt(5)) / 2), rel=1e-12
    )
    ell = 1.0
    fuchsian = BoundaryInvariant(math.exp(-ell), 1 + math.exp(ell))
    assert boundary_length(fuchsian) == pytest.approx(2 * ell, rel=1e-12)
    near_edge = BoundaryInvariant(0.25, 4.0 + 1e-10)
    assert boundary_length(near_edge) == pytest.approx(math.log(8.0), abs=1e-4)


def test_catalogue_reference_values():
    p = reference_params()
    cat = catalogue(p)
    assert cat.ad == pytest.approx(GOLDEN, rel=1e-12)
    assert cat.cd == pytest.approx(2.0, rel=1e-12)
    assert (cat.ae - 1.0) * cat.cf == pytest.approx(GOLDEN, rel=1e-9)
    assert all(v > 1.0 for v in cat.as_dict().values())


def test_catalogue_matches_geometry():
    rng = np.random.default_rng(13)
    for _ in range(30):
        p = random_params(rng)
        cat = catalogue(p)
        hexagon = build_hexagon(p)
        for x, y in CATALOGUE_PAIRS:
            geo = geometric_cross_ratio(hexagon, x, y)
            assert geo == pytest.approx(cat.value(x, y), rel=1e-9), (x, y)


def test_internal_parameter_recovery():
    # the rho-inverses of three specific entries all recover s; the three
    # bracket products all recover r
    rng = np.random.default_rng(17)
    for _ in range(50):
        p = random_params(rng)
        cat = catalogue(p)
        r = p.internal * rho(2, p.R, p.s) if p.chart == "st" else p.internal
        for i, entry in ((1, cat.ad), (2, cat.be), (3, cat.cf)):
            assert rho_inverse(i, p.R, entry) == pytest.approx(p.s, rel=1e-9)
            assert entry == pytest.approx(rho(i, p.R, p.s), rel=1e-9)
        products = (
            (cat.ae - 1.0) * cat.cf,
            (cat.cd - 1.0) * cat.be,
            (cat.bf - 1.0) * cat.ad,
        )
        for prod in products:
            assert prod == pytest.approx(r, rel=1e-9)


def test_rotate_labels_permutation():
    b1 = BoundaryInvariant(0.2, 5.0)
    b2 = BoundaryInvariant(0.3, 4.0)
    b3 = BoundaryInvariant(0.25, 4.5)
    p = PantsParams(R=(b1, b2, b3), s=1.3, internal=2.0, chart="sr")
    q = rotate_labels(p)
    assert q.R == (b2, b3, b1)
    assert (q.s, q.r) == (p.s, p.r)
    assert rotate_labels(rotate_labels(q)).R == p.R


def test_rotate_labels_geometric_consistency():
    # relabeled hexagon (vertex shift by two) reproduces the same (s, r)
    # through the coordinate-free recovery maps
    rng = np.random.default_rng(19)
    for _ in range(10):
        p = convert_params(random_params(rng))
        q = rotate_labels(p)
        hexagon = build_hexagon(p)
        relabeled = Hexagon(
            a=hexagon.b, f=hexagon.d, b=hexagon.c,
            d=hexagon.e, c=hexagon.a, e=hexagon.f,
        )
        s2 = rho_inverse(1, q.R, geometric_cross_ratio(relabeled, "a", "d"))
        r2 = (geometric_cross_ratio(relabeled, "a", "e") - 1.0) * geometric_cross_ratio(
            relabeled, "c", "f"
        )
        assert s2 == pytest.approx(p.s, rel=1e-9)
        assert r2 == pytest.approx(p.r, rel=1e-9)
