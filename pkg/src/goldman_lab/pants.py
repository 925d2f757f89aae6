"""Goldman coordinates on the convex projective pair of pants.

Maps parameter tuples ((lam, tau) x 3, s, t-or-r) to the normalized
hexagon, the holonomy triple around the three cuffs, boundary lengths,
and the fifteen tabulated hexagon cross ratios.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import math

import numpy as np

from .errors import (
    ConsistencyFailure,
    InvalidParameter,
    NonConvexHexagon,
    NoRealBranch,
    OutOfRange,
)
from .projective import (
    ProjectivePoint,
    UnimodularMatrix,
    cross_ratio_pencil,
    find_convex_chart,
    spectral,
)


@dataclass(frozen=True)
class BoundaryInvariant:
    """Eigenvalue data (lam, tau) of a positive hyperbolic boundary holonomy.

    lam is the smallest eigenvalue, tau the sum of the other two; the pair
    must lie in the open cell 0 < lam < 1, 2/sqrt(lam) < tau < 1/lam^2 + lam.
    """

    lam: float
    tau: float

    def __post_init__(self):
        if not (0.0 < self.lam < 1.0):
            raise InvalidParameter(f"lambda must be in (0,1), got {self.lam}")
        lo = 2.0 / math.sqrt(self.lam)
        hi = 1.0 / self.lam ** 2 + self.lam
        if not (lo < self.tau < hi):
            raise InvalidParameter(
                f"tau must lie in ({lo:.6g}, {hi:.6g}) for lambda={self.lam}, got {self.tau}"
            )

    def eigenvalues(self):
        """The three holonomy eigenvalues in increasing order."""
        disc = math.sqrt(self.tau ** 2 - 4.0 / self.lam)
        return (self.lam, (self.tau - disc) / 2.0, (self.tau + disc) / 2.0)


@dataclass(frozen=True)
class PantsParams:
    """Full coordinate tuple: boundary invariants plus internal parameters.

    chart is "st" (classic internal pair) or "sr" (rotation-symmetric pair);
    `internal` stores t or r accordingly.
    """

    R: tuple
    s: float
    internal: float
    chart: str = "st"

    def __post_init__(self):
        if len(self.R) != 3 or not all(isinstance(b, BoundaryInvariant) for b in self.R):
            raise InvalidParameter("R must be three BoundaryInvariant values")
        if self.chart not in ("st", "sr"):
            raise InvalidParameter(f"unknown chart {self.chart!r}")
        if not (self.s > 0.0 and self.internal > 0.0):
            raise InvalidParameter("internal parameters must be positive")

    @property
    def t(self) -> float:
        if self.chart != "st":
            raise InvalidParameter("parameters are in the (s, r) chart; convert first")
        return self.internal

    @property
    def r(self) -> float:
        if self.chart != "sr":
            raise InvalidParameter("parameters are in the (s, t) chart; convert first")
        return self.internal


def reference_params() -> PantsParams:
    """Symmetric test point: three copies of (0.2, 5) with s = t = 1."""
    b = BoundaryInvariant(0.2, 5.0)
    return PantsParams(R=(b, b, b), s=1.0, internal=1.0, chart="st")


def _rho_coeffs(i: int, R) -> tuple:
    """(linear, quadratic) coefficients of rho_i over the given invariants."""
    if i not in (1, 2, 3):
        raise InvalidParameter("rho index must be 1, 2, or 3")
    lam = [b.lam for b in R]
    tau = [b.tau for b in R]
    lin = math.sqrt(lam[(i + 1) % 3] * lam[(i - 1) % 3] / lam[i % 3]) * tau[i - 1]
    quad = lam[(i + 1) % 3] / lam[i % 3]
    return lin, quad


def rho(i: int, R, x: float) -> float:
    """The strictly increasing quadratic rho_i^R(x) = 1 + lin*x + quad*x^2."""
    if x <= 0.0:
        raise InvalidParameter("rho is defined for positive arguments")
    lin, quad = _rho_coeffs(i, R)
    return 1.0 + lin * x + quad * x * x


def rho_minus_one(i: int, R, x: float) -> float:
    """rho_i^R(x) - 1 computed without cancellation for tiny x."""
    lin, quad = _rho_coeffs(i, R)
    return lin * x + quad * x * x


def rho_inverse(i: int, R, y: float) -> float:
    """Positive solution of rho_i^R(x) = y; requires y > 1.

    Values barely above 1 return correspondingly tiny x.
    """
    if not y > 1.0:
        raise OutOfRange(f"rho inverse needs y > 1, got {y}")
    lin, quad = _rho_coeffs(i, R)
    # quad*x^2 + lin*x - (y-1) = 0, stable positive branch
    c = y - 1.0
    return 2.0 * c / (lin + math.sqrt(lin * lin + 4.0 * quad * c))


def convert_params(p: PantsParams) -> PantsParams:
    """Switch between the (s, t) and (s, r) charts via r = t * rho_2(s)."""
    rho2 = rho(2, p.R, p.s)
    if p.chart == "st":
        return replace(p, internal=p.internal * rho2, chart="sr")
    return replace(p, internal=p.internal / rho2, chart="st")


def _t_value(p: PantsParams) -> float:
    return p.internal if p.chart == "st" else p.internal / rho(2, p.R, p.s)


def _r_value(p: PantsParams) -> float:
    return p.internal if p.chart == "sr" else p.internal * rho(2, p.R, p.s)


@dataclass(frozen=True)
class Hexagon:
    """Vertices of the fundamental hexagon, cyclic boundary order a,f,b,d,c,e."""

    a: ProjectivePoint
    f: ProjectivePoint
    b: ProjectivePoint
    d: ProjectivePoint
    c: ProjectivePoint
    e: ProjectivePoint

    BOUNDARY_ORDER = ("a", "f", "b", "d", "c", "e")

    def vertices(self):
        return [getattr(self, name) for name in self.BOUNDARY_ORDER]

    def vertex(self, name: str) -> ProjectivePoint:
        return getattr(self, name)


def build_hexagon(p: PantsParams) -> Hexagon:
    """Hexagon in the normalized chart a=[1:0:0], b=[0:1:0], c=[0:0:1], f=[2:2:-1]."""
    t = _t_value(p)
    rho1 = rho(1, p.R, p.s)
    rho2 = rho(2, p.R, p.s)
    rho3 = rho(3, p.R, p.s)
    hexagon = Hexagon(
        a=ProjectivePoint((1.0, 0.0, 0.0)),
        f=ProjectivePoint((2.0, 2.0, -1.0)),
        b=ProjectivePoint((0.0, 1.0, 0.0)),
        d=ProjectivePoint((-1.0, rho3 / t, rho2 / 2.0)),
        c=ProjectivePoint((0.0, 0.0, 1.0)),
        e=ProjectivePoint((t, -1.0, rho1 / 2.0)),
    )
    if find_convex_chart(hexagon.vertices()) is None:
        raise NonConvexHexagon("hexagon vertices are not in convex position")
    return hexagon


@dataclass(frozen=True)
class HolonomyTriple:
    """Cuff holonomies with C B A = I and repelling fixed points a, b, c."""

    A: UnimodularMatrix
    B: UnimodularMatrix
    C: UnimodularMatrix

    def generator(self, name: str) -> UnimodularMatrix:
        return getattr(self, name)


def _solve_branch(lam, tau, fix, src1, img1, src2, img2, sign1, sign2):
    """Candidates for M with M fix = lam fix, M src1 ~ img1, M src2 ~ img2.

    The scalar factors alpha, beta solve det = 1 and trace = lam + tau;
    sign1/sign2 convert them to the convex-chart representative scaling,
    which must be positive for the branch preserving the hexagon.
    """
    basis = np.column_stack([fix, src1, src2])
    binv = np.linalg.inv(basis)
    kappa = float(np.linalg.det(np.column_stack([fix, img1, img2]))) * float(
        np.linalg.det(binv)
    )
    prod = 1.0 / (lam * kappa)  # alpha * beta
    pcoef = float(img1 @ binv[1])
    qcoef = float(img2 @ binv[2])
    disc = tau * tau - 4.0 * pcoef * qcoef * prod
    if disc < 0.0:
        return []
    out = []
    for sg in (1.0, -1.0):
        alpha = (tau + sg * math.sqrt(disc)) / (2.0 * pcoef)
        if alpha == 0.0:
            continue
        beta = prod / alpha
        if alpha * sign1 <= 0.0 or beta * sign2 <= 0.0:
            continue
        mat = (
            lam * np.outer(fix, binv[0])
            + alpha * np.outer(img1, binv[1])
            + beta * np.outer(img2, binv[2])
        )
        out.append(mat)
    return out


def _check_generator(mat, inv: BoundaryInvariant, fix_point, tol=1e-7):
    """Positive hyperbolic with invariant-matching spectrum and repelling fixed point."""
    try:
        data = spectral(UnimodularMatrix(mat))
    except Exception:
        return False
    expected = inv.eigenvalues()
    if any(ev <= 0.0 for ev in data.eigenvalues):
        return False
    if not np.allclose(data.eigenvalues, expected, rtol=tol):
        return False
    return data.eigenvectors[0].approx_eq(fix_point, tol=1e-6)


def solve_holonomy(p: PantsParams) -> HolonomyTriple:
    """Holonomy triple (A, B, C) attached to the hexagon of p.

    A maps the (c,a,e)-triangle onto the (f,a,b)-triangle fixing a, B maps
    the (a,b,f)-triangle onto the (b,c,d)-triangle fixing b, and C is
    defined as (BA)^-1 and verified against its boundary invariant.
    """
    hexagon = build_hexagon(p)
    chart = find_convex_chart(hexagon.vertices())
    if chart is None:
        raise NonConvexHexagon("hexagon vertices are not in convex position")
    sign = {}
    for name, rep in zip(Hexagon.BOUNDARY_ORDER, chart.reps):
        sign[name] = 1.0 if float(rep @ hexagon.vertex(name).coords) > 0.0 else -1.0
    v = {name: hexagon.vertex(name).coords for name in Hexagon.BOUNDARY_ORDER}
    lamA, tauA = p.R[0].lam, p.R[0].tau
    lamB, tauB = p.R[1].lam, p.R[1].tau

    cands_a = _solve_branch(
        lamA, tauA, v["a"], v["c"], v["f"], v["e"], v["b"],
        sign["c"] * sign["f"], sign["e"] * sign["b"],
    )
    cands_b = _solve_branch(
        lamB, tauB, v["b"], v["a"], v["d"], v["f"], v["c"],
        sign["a"] * sign["d"], sign["f"] * sign["c"],
    )
    mats_a = [m for m in cands_a if _check_generator(m, p.R[0], hexagon.a)]
    mats_b = [m for m in cands_b if _check_generator(m, p.R[1], hexagon.b)]
    if not mats_a or not mats_b:
        raise NoRealBranch("no branch yields a positive hyperbolic generator")
    A = UnimodularMatrix(mats_a[0])
    B = UnimodularMatrix(mats_b[0])
    C = (B @ A).inverse()

    if not _check_generator(C.entries, p.R[2], hexagon.c):
        raise ConsistencyFailure("derived C violates its boundary invariant")
    if not C.apply(hexagon.b).approx_eq(hexagon.e, tol=1e-7):
        raise ConsistencyFailure("derived C does not map b to e")
    return HolonomyTriple(A=A, B=B, C=C)


def boundary_length(b: BoundaryInvariant) -> float:
    """Cuff length log((tau + sqrt(tau^2 - 4/lam)) / (2 lam)).

    Equals log(lambda_max / lambda_min) of any holonomy with invariant b.
    """
    disc = math.sqrt(b.tau ** 2 - 4.0 / b.lam)
    return math.log((b.tau + disc) / (2.0 * b.lam))


CATALOGUE_PAIRS = (
    ("a", "f"), ("a", "d"), ("a", "e"), ("f", "d"), ("f", "e"),
    ("b", "d"), ("b", "e"), ("b", "f"), ("d", "e"), ("d", "f"),
    ("c", "e"), ("c", "f"), ("c", "d"), ("e", "f"), ("e", "d"),
)


@dataclass(frozen=True)
class CrossRatioCatalogue:
    """The fifteen tabulated hexagon cross ratios Cr_{x,y}; all exceed 1."""

    af: float
    ad: float
    ae: float
    fd: float
    fe: float
    bd: float
    be: float
    bf: float
    de: float
    df: float
    ce: float
    cf: float
    cd: float
    ef: float
    ed: float

    def value(self, x: str, y: str) -> float:
        return getattr(self, x + y)

    def as_dict(self) -> dict:
        return {x + y: self.value(x, y) for x, y in CATALOGUE_PAIRS}


def catalogue(p: PantsParams) -> CrossRatioCatalogue:
    """All fifteen tabulated cross ratios from the parameters.

    Denominators rho_i - 1 are computed directly from the coefficients, so
    entries stay accurate even when s is tiny and rho_i rounds to 1.
    """
    r1, r2, r3 = (rho(i, p.R, p.s) for i in (1, 2, 3))
    m1, m2, m3 = (rho_minus_one(i, p.R, p.s) for i in (1, 2, 3))
    r = _r_value(p)
    return CrossRatioCatalogue(
        af=1.0 + r3 * r1 / r,
        ad=r1,
        ae=1.0 + r / r3,
        fd=(r + r1 * r2) / (r2 * m1),
        fe=r2 * (r3 + r) / (r * m2),
        bd=1.0 + r1 * r2 / r,
        be=r2,
        bf=1.0 + r / r1,
        de=(r + r2 * r3) / (r3 * m2),
        df=r3 * (r1 + r) / (r * m3),
        ce=1.0 + r2 * r3 / r,
        cf=r3,
        cd=1.0 + r / r2,
        ef=(r + r3 * r1) / (r1 * m3),
        ed=r1 * (r2 + r) / (r * m1),
    )


def geometric_cross_ratio(hexagon: Hexagon, x: str, y: str):
    """Cr_{x,y} measured on the hexagon: center x, the other four vertices
    taken in boundary order starting after x, with y removed."""
    order = Hexagon.BOUNDARY_ORDER
    i = order.index(x)
    rest = [order[(i + k) % 6] for k in range(1, 6) if order[(i + k) % 6] != y]
    pts = [hexagon.vertex(n) for n in rest]
    return cross_ratio_pencil(hexagon.vertex(x), *pts)


def rotate_labels(p: PantsParams) -> PantsParams:
    """Cyclic relabeling (A,B,C) -> (B,C,A); fixes (s, r) by construction."""
    if p.chart != "sr":
        raise InvalidParameter("rotate_labels expects the (s, r) chart")
    return replace(p, R=(p.R[1], p.R[2], p.R[0]))
