"""Projective-plane primitives: points, lines, cross ratios, 3x3 spectra.

Everything works on homogeneous triples.  Points and lines are normalized
so the largest-magnitude coordinate is +1, which makes equality tests and
degeneracy thresholds scale-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import (
    CoincidentWithCenter,
    ComplexSpectrum,
    Degenerate,
    DegeneratePencil,
    NotCollinear,
    RepeatedEigenvalue,
)

TOL_ALG = 1e-9      # algebraic identities
TOL_ZERO = 1e-12    # "is zero" on normalized homogeneous data


class Infinite:
    """Tagged infinity for cross ratios; deliberately not a float."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = Infinite()


def _normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError("homogeneous vector must have three components")
    i = int(np.argmax(np.abs(v)))
    if v[i] == 0.0 or not np.all(np.isfinite(v)):
        raise ValueError("homogeneous vector must be finite and nonzero")
    return v / v[i]


@dataclass(frozen=True)
class ProjectivePoint:
    """Point of RP^2 stored as a canonical homogeneous triple."""

    coords: np.ndarray

    def __init__(self, coords):
        object.__setattr__(self, "coords", _normalize(coords))

    @staticmethod
    def affine(x: float, y: float) -> "ProjectivePoint":
        return ProjectivePoint((x, y, 1.0))

    def approx_eq(self, other: "ProjectivePoint", tol: float = TOL_ALG) -> bool:
        return float(np.linalg.norm(np.cross(self.coords, other.coords))) < tol

    def __eq__(self, other):
        return isinstance(other, ProjectivePoint) and self.approx_eq(other)

    def __hash__(self):  # coarse: canonical rounding
        return hash(tuple(np.round(self.coords, 9)))

    def __repr__(self):
        x, y, z = self.coords
        return f"ProjectivePoint([{x:.6g}:{y:.6g}:{z:.6g}])"


@dataclass(frozen=True)
class ProjectiveLine:
    """Line of RP^2 as a canonical dual homogeneous triple."""

    coeffs: np.ndarray

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", _normalize(coeffs))

    @staticmethod
    def through(p: ProjectivePoint, q: ProjectivePoint) -> "ProjectiveLine":
        return ProjectiveLine(np.cross(p.coords, q.coords))

    def contains(self, p: ProjectivePoint, tol: float = TOL_ALG) -> bool:
        return abs(float(self.coeffs @ p.coords)) < tol

    def approx_eq(self, other: "ProjectiveLine", tol: float = TOL_ALG) -> bool:
        return float(np.linalg.norm(np.cross(self.coeffs, other.coeffs))) < tol

    def __eq__(self, other):
        return isinstance(other, ProjectiveLine) and self.approx_eq(other)

    def __hash__(self):
        return hash(tuple(np.round(self.coeffs, 9)))


def adjugate(m: np.ndarray) -> np.ndarray:
    """Adjugate of a 3x3 matrix; equals the inverse when det = 1."""
    out = np.empty((3, 3))
    idx = ((1, 2), (0, 2), (0, 1))
    for i in range(3):
        r = idx[i]
        for j in range(3):
            c = idx[j]
            out[j, i] = ((-1) ** (i + j)) * (
                m[r[0], c[0]] * m[r[1], c[1]] - m[r[0], c[1]] * m[r[1], c[0]]
            )
    return out


@dataclass(frozen=True)
class UnimodularMatrix:
    """3x3 real matrix rescaled to determinant one."""

    entries: np.ndarray

    def __init__(self, entries):
        m = np.asarray(entries, dtype=float)
        if m.shape != (3, 3):
            raise ValueError("expected a 3x3 matrix")
        det = float(np.linalg.det(m))
        if det == 0.0 or not np.isfinite(det):
            raise ValueError("matrix must have nonzero finite determinant")
        m = m / math.copysign(abs(det) ** (1.0 / 3.0), det)
        object.__setattr__(self, "entries", m)

    def apply(self, p: ProjectivePoint) -> ProjectivePoint:
        return ProjectivePoint(self.entries @ p.coords)

    def inverse(self) -> "UnimodularMatrix":
        return UnimodularMatrix(adjugate(self.entries))

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(self.entries @ other.entries)

    def trace(self) -> float:
        return float(np.trace(self.entries))


@dataclass(frozen=True)
class SpectralData:
    """Real eigenvalues sorted ascending with matching projective eigenvectors."""

    eigenvalues: tuple
    eigenvectors: tuple

    def __iter__(self):
        return iter(zip(self.eigenvalues, self.eigenvectors))


def _cubic_roots(tr: float, c1: float, det: float):
    """Real roots of x^3 - tr x^2 + c1 x - det, via the trigonometric branch.

    Solved in rescaled coordinates so huge traces do not overflow.  Returns
    None when the discriminant indicates a complex pair.
    """
    sigma = max(abs(tr), math.sqrt(abs(c1)), abs(det) ** (1.0 / 3.0), 1.0)
    a2 = -tr / sigma
    a1 = c1 / (sigma * sigma)
    a0 = -det / (sigma * sigma * sigma)
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2 ** 3 / 27.0 - a2 * a1 / 3.0 + a0
    disc = -4.0 * p ** 3 - 27.0 * q * q
    if disc < -1e-13:
        return None
    if p >= 0.0:
        r = -a2 / 3.0
        return (r * sigma,) * 3
    mmod = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * mmod)
    arg = min(1.0, max(-1.0, arg))
    theta = math.acos(arg) / 3.0
    roots = sorted(
        mmod * math.cos(theta - 2.0 * math.pi * k / 3.0) - a2 / 3.0 for k in range(3)
    )
    return tuple(r * sigma for r in roots)


def _eigenvector(m: np.ndarray, lam: float) -> np.ndarray:
    """Null vector of (m - lam I): cross products of row pairs, then polish."""
    a = m - lam * np.eye(3)
    best = None
    best_norm = -1.0
    for i in range(3):
        for j in range(i + 1, 3):
            v = np.cross(a[i], a[j])
            n = float(np.linalg.norm(v))
            if n > best_norm:
                best_norm = n
                best = v
    if best_norm <= 0.0:
        best = np.array([1.0, 0.0, 0.0])
    v = best / np.linalg.norm(best)
    shift = 1e-14 * max(1.0, abs(lam))
    for _ in range(2):
        try:
            w = np.linalg.solve(a + shift * np.eye(3), v)
        except np.linalg.LinAlgError:
            break
        n = float(np.linalg.norm(w))
        if not np.isfinite(n) or n == 0.0:
            break
        v = w / n
    return v


def spectral(m: UnimodularMatrix, tol: float = TOL_ALG,
             inverse: np.ndarray = None) -> SpectralData:
    """Sorted real eigenvalues and projective eigenvectors of a unimodular matrix.

    Raises ComplexSpectrum / RepeatedEigenvalue when the spectrum is not
    real or not separated at relative tolerance ``tol``.  For strongly
    non-normal products, pass an independently accumulated ``inverse``:
    the adjugate loses the second characteristic coefficient to
    cancellation when the norm is much larger than the eigenvalues.
    """
    a = m.entries
    tr = float(np.trace(a))
    c1 = float(np.trace(adjugate(a) if inverse is None else inverse))
    roots = _cubic_roots(tr, c1, 1.0)
    if roots is None:
        raise ComplexSpectrum("matrix has a complex eigenvalue pair")
    lo, mid, hi = roots
    scale = max(abs(lo), abs(hi), 1e-300)
    if min(mid - lo, hi - mid) < tol * scale:
        raise RepeatedEigenvalue("eigenvalue gap below resolution")
    vecs = []
    norm_m = max(1.0, float(np.abs(a).max()))
    for lam in roots:
        v = _eigenvector(a, lam)
        resid = float(np.linalg.norm(a @ v - lam * v)) / norm_m
        if resid > 1e-9:
            raise RepeatedEigenvalue(f"eigenvector residual {resid:.2e} too large")
        vecs.append(ProjectivePoint(v))
    return SpectralData(eigenvalues=tuple(roots), eigenvectors=tuple(vecs))


def is_positive_hyperbolic(m: UnimodularMatrix, tol: float = TOL_ALG) -> bool:
    """True iff m has three positive, pairwise distinct real eigenvalues."""
    try:
        data = spectral(m, tol=tol)
    except (ComplexSpectrum, RepeatedEigenvalue):
        return False
    return all(ev > 0.0 for ev in data.eigenvalues)


def _wedge(u, v, w) -> float:
    return float(np.linalg.det(np.column_stack((u, v, w))))


def cross_ratio_pencil(o: ProjectivePoint, a1, a2, a3, a4, tol: float = TOL_ZERO):
    """Cross ratio of the four lines joining o to a1..a4.

    (v_o ^ v_1 ^ v_3)(v_o ^ v_4 ^ v_2) / ((v_o ^ v_1 ^ v_2)(v_o ^ v_4 ^ v_3)),
    valued in R together with the tagged INFINITY.
    """
    pts = (a1, a2, a3, a4)
    vo = o.coords
    vs = []
    for p in pts:
        if o.approx_eq(p):
            raise CoincidentWithCenter("cross-ratio point coincides with the center")
        vs.append(p.coords)
    lines = [np.cross(vo, v) for v in vs]
    lines = [l / np.linalg.norm(l) for l in lines]
    for i in range(4):
        for j in range(i + 1, 4):
            for k in range(j + 1, 4):
                if (
                    np.linalg.norm(np.cross(lines[i], lines[j])) < tol
                    and np.linalg.norm(np.cross(lines[i], lines[k])) < tol
                ):
                    raise DegeneratePencil("three pencil lines coincide")
    num = _wedge(vo, vs[0], vs[2]) * _wedge(vo, vs[3], vs[1])
    den = _wedge(vo, vs[0], vs[1]) * _wedge(vo, vs[3], vs[2])
    if abs(den) < tol * max(abs(num), 1.0):
        return INFINITY
    return num / den


def _line_parameters(points):
    """Finite affine parameters of collinear projective points.

    Picks a basis (u, u + c*w) of the common line, with (u, w) the most
    separated input pair and c chosen so no input point is at the basis
    direction; then every point is b1 + t*b2 with finite t.
    """
    vs = [p.coords for p in points]
    best = (0, 1)
    best_n = -1.0
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            n = float(np.linalg.norm(np.cross(vs[i], vs[j])))
            if n > best_n:
                best_n = n
                best = (i, j)
    if best_n < TOL_ZERO:
        raise Degenerate("points do not span a line")
    u, w = vs[best[0]], vs[best[1]]
    ell = np.cross(u, w)
    ell = ell / np.linalg.norm(ell)
    for v in vs:
        if abs(float(ell @ v)) > 1e-8 * np.linalg.norm(v):
            raise NotCollinear("points are not collinear")
    for c in (1.0, 0.5, -0.7369, 2.0, -3.1):
        b1, b2 = u, u + c * w
        basis = np.column_stack((b1, b2, ell))
        coeffs = np.linalg.solve(basis, np.column_stack(vs))
        alphas, betas = coeffs[0], coeffs[1]
        scale = np.abs(coeffs[:2]).max(axis=0)
        if np.all(np.abs(alphas) > 1e-9 * scale):
            return list(betas / alphas)
    raise Degenerate("could not find a finite parameterization")


def cross_ratio_collinear(a1, a2, a3, a4):
    """Cross ratio of four collinear points, agreeing with the pencil form.

    Computed from projective line parameters, so it is the paper's
    Euclidean-distance ratio carrying a consistent sign.
    """
    points = (a1, a2, a3, a4)
    for i in range(4):
        close = sum(1 for j in range(4) if i != j and points[i].approx_eq(points[j]))
        if close >= 2:
            raise Degenerate("three of the four points coincide")
    t = _line_parameters(points)
    num = (t[0] - t[2]) * (t[1] - t[3])
    den = (t[0] - t[1]) * (t[2] - t[3])
    if abs(den) < TOL_ZERO * max(abs(num), 1.0):
        return INFINITY
    return num / den


@dataclass
class ConvexChart:
    """Affine chart exhibiting an ordered point set as a convex polygon.

    ell is the chart functional (ell = 0 is the line at infinity); reps are
    sign-flipped homogeneous representatives with ell . rep > 0.
    """

    ell: np.ndarray
    reps: np.ndarray  # (n, 3)
    frame: np.ndarray = field(default=None)  # (2, 3) functionals completing ell

    def __post_init__(self):
        if self.frame is None:
            rows = [self.ell / np.linalg.norm(self.ell)]
            for e in np.eye(3):
                cand = e.copy()
                for r in rows:
                    cand -= (cand @ r) * r
                n = np.linalg.norm(cand)
                if n > 1e-6:
                    rows.append(cand / n)
                if len(rows) == 3:
                    break
            self.frame = np.array(rows[1:])

    def to_plane(self, vectors: np.ndarray) -> np.ndarray:
        """Map homogeneous vectors (n, 3) to chart coordinates (n, 2)."""
        vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
        denom = vectors @ self.ell
        return (vectors @ self.frame.T) / denom[:, None]

    def from_plane(self, xy: np.ndarray) -> np.ndarray:
        """Homogeneous vectors with ell-component 1 over given chart coords."""
        xy = np.atleast_2d(np.asarray(xy, dtype=float))
        basis = np.vstack((self.ell, self.frame))
        target = np.column_stack((np.ones(len(xy)), xy))
        return np.linalg.solve(basis, target.T).T

    def point_to_plane(self, p: ProjectivePoint) -> np.ndarray:
        return self.to_plane(p.coords[None, :])[0]

    def plane_to_point(self, xy) -> ProjectivePoint:
        return ProjectivePoint(self.from_plane(np.asarray(xy)[None, :])[0])


def _solve_sign_flips(dets: np.ndarray):
    """Sign flips x_i over GF(2) with x_i+x_{i+1}+x_{i+2}+c = [det<0] cyclically.

    Propagates the recurrence for the four (x_2, c) seeds with x_1 = 0 and
    checks the wrap-around equations.  Returns flips or None.
    """
    n = len(dets)
    t = [1 if d < 0 else 0 for d in dets]
    for x2 in (0, 1):
        for c in (0, 1):
            x = [0, x2] + [0] * (n - 2)
            for i in range(n - 2):
                x[i + 2] = (t[i] + c + x[i] + x[i + 1]) % 2
            ok = ((x[n - 2] + x[n - 1] + x[0] + c) % 2 == t[n - 2]) and (
                (x[n - 1] + x[0] + x[1] + c) % 2 == t[n - 1]
            )
            if ok:
                return x
    return None


def find_convex_chart(points, tol: float = TOL_ZERO):
    """Chart in which the ordered points form a convex polygon, or None.

    Solves for representative sign flips making all consecutive orientation
    determinants agree, then checks a common half-space and unit winding.
    """
    n = len(points)
    vs = np.array([p.coords for p in points])
    if n == 3:
        if abs(_wedge(vs[0], vs[1], vs[2])) < 1e-10:
            return None
        ell = np.linalg.solve(vs, np.ones(3))
        ell = ell / np.linalg.norm(ell)
        return ConvexChart(ell=ell, reps=vs * np.sign(vs @ ell)[:, None])
    dets = np.array(
        [_wedge(vs[i], vs[(i + 1) % n], vs[(i + 2) % n]) for i in range(n)]
    )
    scale = float(np.max(np.abs(dets)))
    if scale == 0.0 or np.min(np.abs(dets)) < 1e-10 * scale:
        return None
    flips = _solve_sign_flips(dets)
    if flips is None:
        return None
    reps = vs * np.array([1.0 if x == 0 else -1.0 for x in flips])[:, None]
    # chart functional: sum of face normals of the cone over the polygon,
    # oriented by the common sign of the consecutive determinants
    sigma = math.copysign(1.0, _wedge(reps[0], reps[1], reps[2]))
    normals = np.cross(reps, np.roll(reps, -1, axis=0))
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    ell = sigma * normals.sum(axis=0)
    nrm = np.linalg.norm(ell)
    if nrm < tol:
        return None
    ell = ell / nrm
    dots = reps @ ell
    if np.min(dots) <= 1e-12 * np.max(np.abs(dots)):
        return None
    chart = ConvexChart(ell=ell, reps=reps)
    xy = chart.to_plane(reps)
    edges = np.roll(xy, -1, axis=0) - xy
    nxt = np.roll(edges, -1, axis=0)
    cross = edges[:, 0] * nxt[:, 1] - edges[:, 1] * nxt[:, 0]
    if np.min(cross) * np.max(cross) <= 0.0:
        return None
    turn = np.arctan2(cross, (edges * nxt).sum(axis=1))
    if abs(abs(turn.sum()) - 2.0 * math.pi) > 1e-6:
        return None
    return chart


def convex_position(points) -> bool:
    """True iff some affine chart shows the points as a convex polygon in order."""
    if len(points) < 3:
        raise ValueError("need at least three points")
    return find_convex_chart(points) is not None
