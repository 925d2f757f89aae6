import math

import numpy as np
import pytest

from goldman_lab.errors import (
    CoincidentWithCenter,
    ComplexSpectrum,
    Degenerate,
    NotCollinear,
    RepeatedEigenvalue,
)
from goldman_lab.projective import (
    INFINITY,
    ProjectivePoint,
    UnimodularMatrix,
    convex_position,
    cross_ratio_collinear,
    cross_ratio_pencil,
    is_positive_hyperbolic,
    spectral,
)

P = ProjectivePoint.affine


def random_unimodular(rng):
    while True:
        m = rng.normal(size=(3, 3))
        if abs(np.linalg.det(m)) > 0.1:
            return UnimodularMatrix(m)


def test_point_normalization_canonical():
    p = ProjectivePoint((2.0, -4.0, 1.0))
    assert p.coords[1] == 1.0  # largest magnitude coordinate forced to +1
    assert np.allclose(p.coords, [-0.5, 1.0, -0.25])
    assert ProjectivePoint((2, -4, 1)) == ProjectivePoint((-1, 2, -0.5))


def test_pencil_collinear_spacing_example():
    o = P(0, 1)
    a = [P(0, 0), P(1, 0), P(2, 0), P(4, 0)]
    assert cross_ratio_pencil(o, *a) == pytest.approx(3.0, abs=1e-12)


def test_pencil_equally_spaced_example():
    o = P(5, 7)
    a = [P(0, 0), P(1, 0), P(2, 0), P(3, 0)]
    assert cross_ratio_pencil(o, *a) == pytest.approx(4.0, abs=1e-12)


def test_pencil_projective_invariance():
    rng = np.random.default_rng(7)
    count = 0
    while count < 1000:
        o = ProjectivePoint(rng.normal(size=3))
        pts = [ProjectivePoint(rng.normal(size=3)) for _ in range(4)]
        try:
            v0 = cross_ratio_pencil(o, *pts)
        except CoincidentWithCenter:
            continue
        if v0 is INFINITY:
            continue
        x = random_unimodular(rng)
        v1 = cross_ratio_pencil(x.apply(o), *[x.apply(p) for p in pts])
        assert v1 == pytest.approx(v0, rel=1e-9, abs=1e-9)
        count += 1


def test_pencil_coincident_center():
    o = P(1, 1)
    with pytest.raises(CoincidentWithCenter):
        cross_ratio_pencil(o, P(1, 1), P(2, 0), P(3, 0), P(4, 0))


def test_collinear_0134():
    v = cross_ratio_collinear(P(0, 0), P(1, 0), P(3, 0), P(4, 0))
    assert v == pytest.approx(9.0, abs=1e-12)


def test_collinear_closed_form():
    for x in (0.1, 0.5, 0.9):
        v = cross_ratio_collinear(P(-1, 0), P(0, 0), P(x, 0), P(1, 0))
        assert v == pytest.approx((1 + x) / (1 - x), rel=1e-12)


def test_collinear_matches_pencil_random():
    rng = np.random.default_rng(11)
    for _ in range(200):
        base = rng.normal(size=3)
        direction = rng.normal(size=3)
        ts = rng.normal(size=4) * 3.0
        if np.min(np.abs(ts[:, None] - ts[None, :]) + np.eye(4)) < 1e-3:
            continue
        pts = [ProjectivePoint(base + t * direction) for t in ts]
        o = ProjectivePoint(base + rng.normal(size=3) * 2.0 + np.cross(base, direction))
        v_line = cross_ratio_collinear(*pts)
        try:
            v_pencil = cross_ratio_pencil(o, *pts)
        except CoincidentWithCenter:
            continue
        assert v_line == pytest.approx(v_pencil, rel=1e-9, abs=1e-9)


def test_collinear_rejects_noncollinear():
    with pytest.raises(NotCollinear):
        cross_ratio_collinear(P(0, 0), P(1, 0), P(1, 1), P(2, 3))


def test_collinear_rejects_triple_coincidence():
    with pytest.raises(Degenerate):
        cross_ratio_collinear(P(0, 0), P(0, 0), P(0, 0), P(2, 0))


def test_spectral_diagonal():
    lo, mid, hi = 0.2, (5 - math.sqrt(5)) / 2, (5 + math.sqrt(5)) / 2
    m = UnimodularMatrix(np.diag([lo, mid, hi]))
    data = spectral(m)
    assert data.eigenvalues == pytest.approx((lo, mid, hi), rel=1e-12)
    for ev, vec in data:
        axis = np.zeros(3)
        axis[int(np.argmin([abs(ev - x) for x in (lo, mid, hi)]))] = 1.0
        assert vec.approx_eq(ProjectivePoint(axis))


def test_spectral_identity_repeated():
    with pytest.raises(RepeatedEigenvalue):
        spectral(UnimodularMatrix(np.eye(3)))


def test_spectral_conjugation_recovers():
    rng = np.random.default_rng(3)
    for _ in range(50):
        evs = np.sort(np.exp(rng.normal(size=3) * 1.5))
        evs = evs / np.prod(evs) ** (1 / 3)
        if min(np.diff(evs)) < 1e-3 * evs[-1]:
            continue
        x = random_unimodular(rng)
        m = UnimodularMatrix(x.entries @ np.diag(evs) @ np.linalg.inv(x.entries))
        data = spectral(m)
        assert np.allclose(data.eigenvalues, evs, rtol=1e-9)
        for ev, vec in data:
            resid = np.linalg.norm(m.entries @ vec.coords - ev * vec.coords)
            assert resid < 1e-9 * max(1.0, np.abs(m.entries).max())


def test_spectral_conjugation_invariance():
    rng = np.random.default_rng(5)
    m = UnimodularMatrix(np.diag([0.2, 1.4, 1 / 0.28]))
    base = spectral(m).eigenvalues
    for _ in range(20):
        x = random_unimodular(rng)
        conj = UnimodularMatrix(x.entries @ m.entries @ np.linalg.inv(x.entries))
        assert spectral(conj).eigenvalues == pytest.approx(base, rel=1e-9)


def test_positive_hyperbolic_classification():
    assert is_positive_hyperbolic(UnimodularMatrix(np.diag([0.2, 1.382, 3.618])))
    rot = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    assert not is_positive_hyperbolic(UnimodularMatrix(rot))
    assert not is_positive_hyperbolic(UnimodularMatrix(np.diag([-1.0, -1.0, 1.0])))
    with pytest.raises(ComplexSpectrum):
        spectral(UnimodularMatrix(rot))


def pentagon(rotate=0.0):
    return [
        P(math.cos(2 * math.pi * k / 5 + rotate), math.sin(2 * math.pi * k / 5 + rotate))
        for k in range(5)
    ]


def test_convex_position_pentagon():
    assert convex_position(pentagon())


def test_convex_position_swapped_false():
    pts = pentagon()
    pts[1], pts[2] = pts[2], pts[1]
    assert not convex_position(pts)


def test_convex_position_star_false():
    pts = pentagon()
    star = [pts[0], pts[2], pts[4], pts[1], pts[3]]
    assert not convex_position(star)


def test_convex_position_mixed_representatives():
    rng = np.random.default_rng(17)
    pts = pentagon(rotate=0.3)
    flipped = [ProjectivePoint(-p.coords if rng.random() < 0.5 else p.coords) for p in pts]
    assert convex_position(flipped)


def ellipse_points(rng, thetas):
    a, b = 1.0 + rng.random(), 1.0 + rng.random()
    phi = rng.random() * math.pi
    rot = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    center = rng.normal(size=2)
    out = []
    for t in thetas:
        xy = rot @ np.array([a * math.cos(t), b * math.sin(t)]) + center
        out.append(P(xy[0], xy[1]))
    return out


def sorted_thetas(rng, k):
    return np.sort(rng.random(k) * 2 * math.pi * 0.9)


def test_boundary_cross_ratio_range():
    rng = np.random.default_rng(23)
    for _ in range(100):
        th = sorted_thetas(rng, 5)
        o, a1, a2, a3, a4 = ellipse_points(rng, th)
        v = cross_ratio_pencil(o, a1, a2, a3, a4)
        assert v is not INFINITY and 1.0 < v < math.inf


def test_boundary_cocycle():
    rng = np.random.default_rng(29)
    for _ in range(100):
        th = np.sort(rng.random(6) * 2 * math.pi * 0.9)
        o, a1, a2, a3, y, a4 = ellipse_points(rng, th)
        lhs = cross_ratio_pencil(o, a1, a2, a3, a4) * cross_ratio_pencil(o, a1, a3, y, a4)
        rhs = cross_ratio_pencil(o, a1, a2, y, a4)
        assert lhs == pytest.approx(rhs, rel=1e-9)


def test_boundary_monotonicity():
    rng = np.random.default_rng(31)
    for _ in range(100):
        th = np.sort(rng.random(7) * 2 * math.pi * 0.9)
        o, a1, x, a2, a3, y, a4 = ellipse_points(rng, th)
        base = cross_ratio_pencil(o, a1, a2, a3, a4)
        assert base <= cross_ratio_pencil(o, a1, x, a3, a4) + 1e-12
        assert base <= cross_ratio_pencil(o, a1, a2, y, a4) + 1e-12
        assert base <= cross_ratio_pencil(o, x, a2, a3, a4) + 1e-12  # x in arc(a1, a2)
        assert base <= cross_ratio_pencil(o, a1, a2, a3, y) + 1e-12  # y in arc(a3, a4)
