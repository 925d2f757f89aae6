"""Inner approximation of the developing domain and its Hilbert geometry.

The domain is approximated from inside by the convex hull of group-orbit
points and word fixed points, drawn in an affine chart built from the
invariant triangle of the first cuff holonomy.  Because the approximation
is an inner one and axis endpoints are hull vertices, distances measured
along axes are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy.spatial import ConvexHull as _QhullConvexHull

from .errors import (
    DepthInsufficient,
    DepthTooLarge,
    NotHyperbolic,
    NotTypical,
    OutsideDomain,
    ZeroVector,
)
from .geodesics import (
    INVERSE,
    CyclicWord,
    class_length,
    free_reduce,
    generator_matrices,
    holonomy_of,
    is_typical,
)
from .pants import Hexagon, HolonomyTriple
from .projective import (
    ComplexSpectrum,
    ConvexChart,
    ProjectivePoint,
    RepeatedEigenvalue,
    UnimodularMatrix,
    adjugate,
    spectral,
)

MAX_DEPTH = 8

_STAB_WORDS = {"a": (0,), "b": (2,), "c": (1, 3)}  # letter words fixing each ideal vertex


def _cross2(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


def _structure_chart(h: HolonomyTriple, hexagon: Hexagon) -> ConvexChart:
    """Chart whose infinity line misses the invariant triangle of A.

    The domain lies inside the triangle spanned by A's fixed points, so
    the dual functional of that triangle bounds every orbit point.
    """
    data = spectral(h.A)
    tri = np.array([vec.coords for vec in data.eigenvectors])
    center = hexagon.a.coords + hexagon.b.coords + hexagon.c.coords
    coeffs = np.linalg.solve(tri.T, center)
    tri = tri * np.sign(coeffs)[:, None]
    ell = np.linalg.solve(tri, np.ones(3))
    ell = ell / np.linalg.norm(ell)
    return ConvexChart(ell=ell, reps=tri)


@dataclass
class OrbitHull:
    """Convex polygon approximating the domain, with its chart.

    vertices are in counterclockwise order in the chart plane; xy caches
    their plane coordinates, normals/offsets the edge half-planes
    (normal . x <= offset inside).
    """

    vertices: list
    depth: int
    chart: ConvexChart
    xy: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray

    @property
    def edge_count(self) -> int:
        return len(self.xy)


def _chart_xy(chart: ConvexChart, vectors: np.ndarray) -> np.ndarray:
    """Plane coordinates with representative signs fixed by the chart."""
    vectors = np.atleast_2d(vectors)
    dots = vectors @ chart.ell
    if np.any(dots == 0.0):
        raise OutsideDomain("point on the chart's infinity line")
    signed = vectors * np.sign(dots)[:, None]
    return chart.to_plane(signed)


def _polygon_from_xy(points_xy: np.ndarray, depth: int, chart: ConvexChart) -> OrbitHull:
    hull = _QhullConvexHull(points_xy)
    order = hull.vertices  # counterclockwise for 2D
    xy = points_xy[order]
    verts = [chart.plane_to_point(p) for p in xy]
    edges = np.roll(xy, -1, axis=0) - xy
    normals = np.column_stack([edges[:, 1], -edges[:, 0]])
    normals = normals / np.linalg.norm(normals, axis=1)[:, None]
    offsets = (normals * xy).sum(axis=1)
    center = xy.mean(axis=0)
    flip = (normals @ center) > offsets
    normals[flip] *= -1.0
    offsets[flip] *= -1.0
    return OrbitHull(
        vertices=verts, depth=depth, chart=chart, xy=xy, normals=normals, offsets=offsets
    )


def polygon_domain(xy_points) -> OrbitHull:
    """Synthetic hull from explicit convex-polygon coordinates in the
    standard chart [x : y : 1]; handy for disk-approximation tests."""
    xy = np.asarray(xy_points, dtype=float)
    chart = ConvexChart(
        ell=np.array([0.0, 0.0, 1.0]),
        reps=np.column_stack([xy, np.ones(len(xy))]),
    )
    return _polygon_from_xy(xy, 0, chart)


def _refine_fixed_point(m: np.ndarray, v0: np.ndarray):
    """Sharpen an attracting eigendirection by applying m^8 twice.

    Eigensolver noise in a fixed point bulges the hull boundary enough to
    spoil axis-exactness, so transverse components are crushed doubly
    exponentially; the direction counts as certified only when the two
    refinement stages agree (matrices with clustered top eigenvalues
    cannot be located reliably and must not pollute an inner hull).
    """
    p = m / np.abs(m).max()
    for _ in range(3):
        p = p @ p
        p = p / np.abs(p).max()
    v1 = p @ v0
    n1 = float(np.linalg.norm(v1))
    if not np.isfinite(n1) or n1 < 1e-150:
        return v0, False
    v1 = v1 / n1
    v2 = p @ v1
    n2 = float(np.linalg.norm(v2))
    if not np.isfinite(n2) or n2 < 1e-150:
        return v1, False
    v2 = v2 / n2
    certified = float(np.linalg.norm(np.cross(v1, v2))) < 1e-9
    return v2, certified


def _reduced_words(depth: int):
    """All nonempty reduced words of length <= depth, parents before children."""
    if depth < 1:
        return []
    out = []
    stack = [(x,) for x in range(3, -1, -1)]
    while stack:
        w = stack.pop()
        out.append(w)
        if len(w) < depth:
            stack.extend(w + (nxt,) for nxt in range(4) if nxt != INVERSE[w[-1]])
    return out


def orbit_hull(h: HolonomyTriple, hexagon: Hexagon, depth: int,
               max_depth: int = MAX_DEPTH) -> OrbitHull:
    """Convex hull of the orbit of the hexagon vertices under short words,
    together with the words' attracting and repelling fixed points."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if depth > max_depth:
        raise DepthTooLarge(f"depth {depth} exceeds configured maximum {max_depth}")
    g, gi = generator_matrices(h)
    hex_vecs = np.array([v.coords for v in hexagon.vertices()])
    points = [hex_vecs]
    mats = {(): np.eye(3)}
    invs = {(): np.eye(3)}
    for w in _reduced_words(depth):
        mats[w] = mats[w[:-1]] @ g[w[-1]]
        invs[w] = gi[w[-1]] @ invs[w[:-1]]
    for w, m in mats.items():
        if not w:
            continue
        points.append((m @ hex_vecs.T).T)
        try:
            data = spectral(UnimodularMatrix(m), inverse=invs[w])
        except (ComplexSpectrum, RepeatedEigenvalue):
            continue
        rep, rep_ok = _refine_fixed_point(invs[w], data.eigenvectors[0].coords)
        att, att_ok = _refine_fixed_point(m, data.eigenvectors[2].coords)
        fixed = [v for v, ok in ((rep, rep_ok), (att, att_ok)) if ok]
        if fixed:
            points.append(np.array(fixed))
    stacked = np.vstack(points)
    chart = _structure_chart(h, hexagon)
    # properness: every translate used stays inside the invariant triangle
    bary = np.linalg.solve(chart.reps.T, stacked.T).T
    lead = np.take_along_axis(bary, np.argmax(np.abs(bary), axis=1)[:, None], axis=1)
    bary = bary * np.sign(lead)
    if np.min(bary) < -1e-7 * np.max(np.abs(bary)):
        raise OutsideDomain("orbit point escaped the invariant triangle")
    return _polygon_from_xy(_chart_xy(chart, stacked), depth, chart)


def _clip_line(hull: OrbitHull, x0: np.ndarray, direction: np.ndarray):
    """Parameter range [t_lo, t_hi] of {x0 + t d} inside the hull polygon."""
    nd = hull.normals @ direction
    nx = hull.offsets - hull.normals @ x0
    t_lo, t_hi = -math.inf, math.inf
    scale = float(np.linalg.norm(direction))
    off_scale = max(1.0, float(np.abs(hull.offsets).max()))
    for k in range(hull.edge_count):
        denom = nd[k]
        # near-parallel edges either do not bind or carry a boundary flat
        if abs(denom) < 1e-9 * scale:
            if nx[k] < -1e-9 * off_scale:
                raise OutsideDomain("line misses the hull")
            continue
        t = nx[k] / denom
        if denom > 0.0:
            t_hi = min(t_hi, t)
        else:
            t_lo = max(t_lo, t)
    if not (t_lo < t_hi):
        raise OutsideDomain("line misses the hull")
    return t_lo, t_hi


def _contains(hull: OrbitHull, xy: np.ndarray, tol: float = 1e-9) -> bool:
    slack = hull.offsets - hull.normals @ xy
    return bool(np.min(slack) >= -tol * max(1.0, float(np.abs(hull.offsets).max())))


def hilbert_distance(hull: OrbitHull, p: ProjectivePoint, q: ProjectivePoint) -> float:
    """Half the log of the boundary cross ratio along the chord through p, q.

    Points may lie on the closed hull; chords running inside a boundary
    edge use that edge's endpoints, which is the limiting distance and
    makes axis measurements of peripheral classes exact.
    """
    pxy = _chart_xy(hull.chart, p.coords[None, :])[0]
    qxy = _chart_xy(hull.chart, q.coords[None, :])[0]
    for xy in (pxy, qxy):
        if not _contains(hull, xy):
            raise OutsideDomain("point lies outside the hull")
    d = qxy - pxy
    dn = float(np.linalg.norm(d))
    if dn < 1e-14 * max(1.0, float(np.linalg.norm(pxy))):
        return 0.0
    t_lo, t_hi = _clip_line(hull, pxy, d)
    if not (t_lo < 1e-12 and t_hi > 1.0 - 1e-12):
        raise OutsideDomain("chord does not contain both points")
    cr = ((1.0 - t_lo) * t_hi) / ((-t_lo) * (t_hi - 1.0))
    return 0.5 * math.log(cr)


def finsler_norm(hull: OrbitHull, x: ProjectivePoint, v) -> float:
    """Norm of the chart tangent vector v at x: half the sum of reciprocal
    parameter distances to the two boundary hits of the line through x."""
    v = np.asarray(v, dtype=float)
    if v.shape != (2,):
        raise ValueError("tangent vector must be a chart 2-vector")
    if float(np.linalg.norm(v)) == 0.0:
        raise ZeroVector("zero tangent vector")
    xy = _chart_xy(hull.chart, x.coords[None, :])[0]
    if not _contains(hull, xy):
        raise OutsideDomain("base point lies outside the hull")
    t_lo, t_hi = _clip_line(hull, xy, v)
    if not (t_lo < 0.0 < t_hi):
        raise OutsideDomain("base point not interior along the direction")
    return 0.5 * (1.0 / t_hi - 1.0 / t_lo)


@dataclass(frozen=True)
class AreaEstimate:
    value: float
    stderr: float
    samples: int

    def __iter__(self):
        return iter((self.value, self.stderr))


def _unit_ball_areas(hull: OrbitHull, xs: np.ndarray, directions: int) -> np.ndarray:
    """Lebesgue areas of the Finsler-norm unit balls at the chart points.

    Angular quadrature: area = 1/2 integral r(theta)^2 dtheta with radius
    r = 2 t+ t- / (t+ + t-) along each direction; points are processed in
    blocks to keep the (block, direction, edge) tensor small.
    """
    thetas = (np.arange(directions) + 0.5) * (2.0 * math.pi / directions)
    dirs = np.column_stack([np.cos(thetas), np.sin(thetas)])
    nd = dirs @ hull.normals.T  # (D, E)
    pos_mask = nd > 0.0
    inv_nd = np.where(np.abs(nd) > 1e-300, 1.0 / nd, 0.0)
    out = np.empty(len(xs))
    block = max(1, int(4e6 // (directions * hull.edge_count)))
    for start in range(0, len(xs), block):
        xb = xs[start:start + block]
        nx = hull.offsets[None, :] - xb @ hull.normals.T  # (B, E)
        t = nx[:, None, :] * inv_nd[None, :, :]           # (B, D, E)
        pos = np.where(pos_mask[None, :, :], t, np.inf).min(axis=2)
        neg = np.where(~pos_mask[None, :, :], -t, np.inf).min(axis=2)
        r = 2.0 * pos * neg / (pos + neg)
        out[start:start + block] = math.pi * (r * r).mean(axis=1)
    return out


def _polygon_area(xy: np.ndarray) -> float:
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def busemann_area(hull: OrbitHull, region, samples: int, seed: int = 0,
                  directions: int = 128) -> AreaEstimate:
    """Monte-Carlo Busemann area of a convex polygonal region inside the hull.

    The density against Lebesgue measure is pi / mu(B_1(x)), with B_1 the
    unit ball of the Finsler norm; this normalization reproduces
    hyperbolic area on the Klein disk.
    """
    if len(region) == 0:
        return AreaEstimate(0.0, 0.0, 0)
    if isinstance(region[0], ProjectivePoint):
        reg_xy = _chart_xy(hull.chart, np.array([p.coords for p in region]))
    else:
        reg_xy = np.atleast_2d(np.asarray(region, dtype=float))
    if len(reg_xy) < 3:
        return AreaEstimate(0.0, 0.0, 0)
    for xy in reg_xy:
        if not _contains(hull, xy):
            raise OutsideDomain("region vertex outside the hull")
    area = _polygon_area(reg_xy)
    if area == 0.0:
        return AreaEstimate(0.0, 0.0, 0)
    edges = np.roll(reg_xy, -1, axis=0) - reg_xy
    normals = np.column_stack([edges[:, 1], -edges[:, 0]])
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    offsets = (normals * reg_xy).sum(axis=1)
    center = reg_xy.mean(axis=0)
    flip = normals @ center > offsets
    normals[flip] *= -1.0
    offsets[flip] *= -1.0

    rng = np.random.default_rng(seed)
    lo = reg_xy.min(axis=0)
    hi = reg_xy.max(axis=0)
    densities = np.empty(samples)
    filled = 0
    while filled < samples:
        batch = max(1024, (samples - filled) * 2)
        cand = rng.uniform(lo, hi, size=(batch, 2))
        inside = np.all(cand @ normals.T <= offsets[None, :] + 1e-12, axis=1)
        cand = cand[inside]
        take = min(len(cand), samples - filled)
        if take == 0:
            continue
        areas = _unit_ball_areas(hull, cand[:take], directions)
        densities[filled:filled + take] = math.pi / areas
        filled += take
    mean = float(densities.mean())
    std = float(densities.std(ddof=1)) if samples > 1 else 0.0
    return AreaEstimate(
        value=area * mean,
        stderr=area * std / math.sqrt(samples),
        samples=samples,
    )


def hilbert_ball(hull: OrbitHull, center: ProjectivePoint, radius: float,
                 directions: int = 256) -> np.ndarray:
    """Chart-coordinate polygon approximating the Hilbert metric ball."""
    cxy = _chart_xy(hull.chart, center.coords[None, :])[0]
    blow = math.exp(2.0 * radius)
    thetas = np.linspace(0.0, 2.0 * math.pi, directions, endpoint=False)
    out = np.empty((directions, 2))
    for i, th in enumerate(thetas):
        d = np.array([math.cos(th), math.sin(th)])
        t_lo, t_hi = _clip_line(hull, cxy, d)
        t_fwd, t_back = t_hi, -t_lo
        u = t_back * t_fwd * (blow - 1.0) / (t_fwd + blow * t_back)
        out[i] = cxy + u * d
    return out


def axis(h: HolonomyTriple, w: CyclicWord):
    """(attracting, repelling) fixed-point pair of the word's holonomy."""
    g, gi = generator_matrices(h)
    m = np.eye(3)
    minv = np.eye(3)
    for x in w.letters:
        m = m @ g[x]
        minv = gi[x] @ minv
    try:
        data = spectral(UnimodularMatrix(m), inverse=minv)
    except (ComplexSpectrum, RepeatedEigenvalue) as exc:
        raise NotHyperbolic(str(exc)) from exc
    if any(ev <= 0.0 for ev in data.eigenvalues):
        raise NotHyperbolic("holonomy has non-positive eigenvalues")
    att, _ = _refine_fixed_point(m, data.eigenvectors[2].coords)
    rep, _ = _refine_fixed_point(minv, data.eigenvectors[0].coords)
    return ProjectivePoint(att), ProjectivePoint(rep)


def translation_check(h: HolonomyTriple, hull: OrbitHull, w: CyclicWord):
    """(measured Hilbert displacement, eigenvalue length) for one word.

    The displacement of the axis midpoint equals half the eigenvalue
    length exactly, because the hull boundary meets the axis line at the
    word's fixed points.
    """
    att, rep = axis(h, w)
    axy = _chart_xy(hull.chart, att.coords[None, :])[0]
    rxy = _chart_xy(hull.chart, rep.coords[None, :])[0]
    hull_scale = max(1.0, float(np.abs(hull.offsets).max()))
    for endpoint in (axy, rxy):
        slack = hull.offsets - hull.normals @ endpoint
        # the fixed point must sit on the hull boundary: inside, but with a
        # supporting edge through it (inner hulls are exact along axes)
        if float(slack.min()) < -1e-9 * hull_scale or float(slack.min()) > 1e-8 * hull_scale:
            raise OutsideDomain("axis endpoint is not on the hull boundary; deepen the hull")
    mid = hull.chart.plane_to_point(0.5 * (axy + rxy))
    moved = holonomy_of(h, w).apply(mid)
    hd = hilbert_distance(hull, mid, moved)
    eig = class_length(h, w)
    return hd, eig


# --- triangulation trace ----------------------------------------------------


def _coset_normal_form(letters, stab):
    """Lexicographically least shortest representative of letters * <stab>."""
    stab = tuple(stab)
    stab_inv = tuple(INVERSE[x] for x in reversed(stab))
    cur = tuple(free_reduce(list(letters)))
    improved = True
    while improved:
        improved = False
        for hword in (stab, stab_inv):
            cand = tuple(free_reduce(list(cur) + list(hword)))
            if len(cand) < len(cur):
                cur = cand
                improved = True
    best = cur
    seen = {cur}
    frontier = [cur]
    while frontier:
        g0 = frontier.pop()
        for hword in (stab, stab_inv):
            cand = tuple(free_reduce(list(g0) + list(hword)))
            if len(cand) == len(cur) and cand not in seen:
                seen.add(cand)
                frontier.append(cand)
                if cand < best:
                    best = cand
    return best


def _vertex_id(letters, tag):
    return (tag, _coset_normal_form(letters, _STAB_WORDS[tag]))


@dataclass
class TriangulationLift:
    """Finite piece of the lifted ideal triangulation.

    Each edge is a chord g.[x, y] between ideal vertices of the central
    triangle; endpoints carry exact group-theoretic ids (coset normal
    forms), so shared-vertex tests never rely on floating coincidence.
    """

    edges: list          # dicts: p, q (xy), ids, word, base
    chart: ConvexChart
    depth: int


_BASE_EDGES = (("a", "b"), ("b", "c"), ("c", "a"))


def triangulation_lift(h: HolonomyTriple, hexagon: Hexagon, depth: int,
                       chart: ConvexChart = None) -> TriangulationLift:
    """Orbit of the three central-triangle edges under words of length <= depth."""
    if chart is None:
        chart = _structure_chart(h, hexagon)
    g, _ = generator_matrices(h)
    base_vec = {"a": hexagon.a.coords, "b": hexagon.b.coords, "c": hexagon.c.coords}
    mats = {(): np.eye(3)}
    for w in _reduced_words(depth):
        mats[w] = mats[w[:-1]] @ g[w[-1]]
    edges = {}
    for w, m in mats.items():
        ids = {tag: _vertex_id(w, tag) for tag in ("a", "b", "c")}
        vecs = {tag: m @ base_vec[tag] for tag in ("a", "b", "c")}
        for x, y in _BASE_EDGES:
            key = frozenset((ids[x], ids[y]))
            if key in edges:
                continue
            pq = _chart_xy(chart, np.array([vecs[x], vecs[y]]))
            edges[key] = {
                "p": pq[0], "q": pq[1], "ids": (ids[x], ids[y]),
                "word": w, "base": x + y,
            }
    return TriangulationLift(edges=list(edges.values()), chart=chart, depth=depth)


@dataclass(frozen=True)
class LoopingSegment:
    segment: int        # index of the crossing-point pair along the period
    f_count: int        # intersections of the open segment with the lift
    self_intersections: int


@dataclass(frozen=True)
class GeodesicDecomposition:
    """One period of a typical closed geodesic against the triangulation.

    Looping counts satisfy f_count - 2 <= 2 * self_intersections <= f_count.
    """

    m: int
    looping: tuple
    period_length: float


def _shared_id(e1, e2):
    common = set(e1["ids"]) & set(e2["ids"])
    if len(common) != 1:
        return None
    return next(iter(common))


def _segments_intersect(p1, p2, q1, q2) -> bool:
    """Proper intersection of open segments (touching endpoints excluded)."""
    d1 = p2 - p1
    d2 = q2 - q1
    denom = _cross2(d1, d2)
    scale = max(float(np.abs(d1).max()), float(np.abs(d2).max()), 1e-300)
    if abs(denom) < 1e-12 * scale * scale:
        return False
    rhs = q1 - p1
    t = _cross2(rhs, d2) / denom
    u = _cross2(rhs, d1) / denom
    eps = 1e-9
    return eps < t < 1.0 - eps and eps < u < 1.0 - eps


def _stab_matrix(h: HolonomyTriple, vid) -> np.ndarray:
    """Holonomy of the primitive cuff element fixing the given ideal vertex."""
    tag, gword = vid
    g, gi = generator_matrices(h)
    base = {"a": h.A.entries, "b": h.B.entries, "c": h.C.entries}[tag]
    m = np.eye(3)
    mi = np.eye(3)
    for x in gword:
        m = m @ g[x]
        mi = gi[x] @ mi
    return m @ base @ mi


def decompose_geodesic(h: HolonomyTriple, hexagon: Hexagon, w: CyclicWord,
                       depth: int, details: bool = False):
    """Trace one period of the word's axis through the lifted triangulation.

    A traversal is a crossing point when the three surrounding edges share
    no common ideal vertex; runs between crossing points are looping
    segments, whose self-intersections are counted geometrically against
    their cuff-holonomy translates.
    """
    if not is_typical(w):
        raise NotTypical(f"word {w} is peripheral")
    lift = triangulation_lift(h, hexagon, depth)
    chart = lift.chart
    att, rep = axis(h, w)
    a_xy = _chart_xy(chart, att.coords[None, :])[0]
    r_xy = _chart_xy(chart, rep.coords[None, :])[0]
    direction = a_xy - r_xy

    crossings = []
    for edge in lift.edges:
        p, q = edge["p"], edge["q"]
        side_p = _cross2(direction, p - r_xy)
        side_q = _cross2(direction, q - r_xy)
        if side_p * side_q >= 0.0:
            continue
        edge_dir = q - p
        side_r = _cross2(edge_dir, r_xy - p)
        side_a = _cross2(edge_dir, a_xy - p)
        if side_r * side_a >= 0.0:
            continue
        t_cross = -side_r / (side_a - side_r)
        crossings.append((t_cross, edge))
    if len(crossings) < 3:
        raise DepthInsufficient("axis meets too few traced edges")
    crossings.sort(key=lambda item: item[0])
    edges_sorted = [e for _, e in crossings]
    ts = [t for t, _ in crossings]

    i0 = len(crossings) // 2
    base_edge = edges_sorted[i0]
    translated_ids = frozenset(
        _vertex_id(tuple(w.letters) + vid[1], vid[0]) for vid in base_edge["ids"]
    )
    i1 = None
    for j in range(i0 + 1, len(edges_sorted)):
        if frozenset(edges_sorted[j]["ids"]) == translated_ids:
            i1 = j
            break
    if i1 is None or i0 == 0 or i1 >= len(edges_sorted) - 1:
        raise DepthInsufficient("one period of the axis is not covered; deepen the trace")

    shared_before = {}
    for j in range(1, len(edges_sorted)):
        shared_before[j] = _shared_id(edges_sorted[j - 1], edges_sorted[j])
    crossing_positions = []
    for j in range(i0, i1):
        left = shared_before.get(j)
        right = shared_before.get(j + 1)
        if left is None or right is None:
            raise DepthInsufficient("trace has a gap between consecutive edges")
        if left != right:
            crossing_positions.append(j)
    m = len(crossing_positions)
    if m == 0:
        raise DepthInsufficient("no crossing point found in one period")

    looping = []
    extras = []
    for idx in range(m):
        j_start = crossing_positions[idx]
        if idx + 1 < m:
            j_end = crossing_positions[idx + 1]
        else:
            j_end = crossing_positions[0] + (i1 - i0)
        f_count = j_end - j_start + 1
        if j_start - 1 < 0 or j_end + 1 >= len(edges_sorted):
            raise DepthInsufficient("looping run exceeds the traced window")
        run_vertex = _shared_id(edges_sorted[j_start], edges_sorted[j_start + 1])
        if run_vertex is None:
            raise DepthInsufficient("looping run lost its common vertex")
        t_from = ts[j_start - 1]
        t_to = ts[j_end + 1]
        seg_a = r_xy + t_from * direction
        seg_b = r_xy + t_to * direction
        x_mat = _stab_matrix(h, run_vertex)
        hom_a = chart.from_plane(seg_a[None, :])[0]
        hom_b = chart.from_plane(seg_b[None, :])[0]
        count = 0
        power = np.eye(3)
        for _k in range(1, f_count + 3):
            power = power @ x_mat
            ta = _chart_xy(chart, (power @ hom_a)[None, :])[0]
            tb = _chart_xy(chart, (power @ hom_b)[None, :])[0]
            if _segments_intersect(seg_a, seg_b, ta, tb):
                count += 1
            else:
                break
        looping.append(LoopingSegment(segment=idx, f_count=f_count,
                                      self_intersections=count))
        extras.append({
            "vertex": run_vertex,
            "stab": x_mat,
            "endpoints": (seg_a, seg_b),
            "count": count,
        })
    decomposition = GeodesicDecomposition(
        m=m, looping=tuple(looping), period_length=class_length(h, w)
    )
    if details:
        return decomposition, {
            "chart": chart, "segments": extras, "edges": edges_sorted,
            "ts": ts, "window": (i0, i1), "axis": (r_xy, a_xy),
        }
    return decomposition
