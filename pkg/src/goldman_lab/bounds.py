"""Explicit length and entropy bounds from the cross-ratio catalogue.

All lengths here follow the eigenvalue-ratio convention
log(lambda_max / lambda_min); the counting bounds use exact big-integer
binomials so the Stirling asymptotics have a trustworthy oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

from .errors import InvalidTopology, OutOfRange, PreconditionViolated
from .pants import CrossRatioCatalogue

_X_PAIRS = (("fd", "cf"), ("fd", "bf"), ("de", "ad"), ("de", "cd"), ("ef", "be"), ("ef", "ae"))
_Y_PAIRS = (("df", "bd"), ("df", "ad"), ("ed", "ce"), ("ed", "be"), ("fe", "af"), ("fe", "cf"))


@dataclass(frozen=True)
class BoundInputs:
    """Inputs for the single-pants bound functions."""

    catalogue: CrossRatioCatalogue
    boundary_lengths: tuple
    genus: int = 0
    boundary_count: int = 3

    def __post_init__(self):
        if len(self.boundary_lengths) != 3 or any(x <= 0 for x in self.boundary_lengths):
            raise ValueError("need three positive boundary lengths")
        if 2 * self.genus - 2 + self.boundary_count <= 0:
            raise InvalidTopology("need 2g - 2 + n > 0")


def L_func(inputs: BoundInputs) -> float:
    """One tenth of the shortest cuff length."""
    return min(inputs.boundary_lengths) / 10.0


def XY_minima(cat: CrossRatioCatalogue):
    """The two six-way product minima controlling crossing-segment lengths."""
    x = min(getattr(cat, a) * getattr(cat, b) for a, b in _X_PAIRS)
    y = min(getattr(cat, a) * getattr(cat, b) for a, b in _Y_PAIRS)
    return x, y


def K_func(inputs: BoundInputs) -> float:
    """(1/48) log(X Y) for the single pants."""
    x, y = XY_minima(inputs.catalogue)
    return math.log(x * y) / 48.0


def _cyc(values, i):
    return values[(i - 1) % 3]


def k_reduced(rho1: float, rho2: float, rho3: float, r: float):
    """The (X, Y) minima written directly in (rho_1, rho_2, rho_3, r).

    Equivalent to XY_minima composed with the catalogue built from the
    same parameters; indices are cyclic in {1, 2, 3}.
    """
    if min(rho1, rho2, rho3) <= 1.0 or r <= 0.0:
        raise ValueError("need rho_i > 1 and r > 0")
    rho = (rho1, rho2, rho3)
    x_terms = []
    y_terms = []
    for i in (1, 2, 3):
        ri = _cyc(rho, i)
        rim1 = _cyc(rho, i - 1)
        rip1 = _cyc(rho, i + 1)
        x_terms.append(rim1 * (r + ri * rip1) / (rip1 * (ri - 1.0)))
        x_terms.append((ri + r) * (r + ri * rip1) / (ri * rip1 * (ri - 1.0)))
        y_terms.append(rim1 * (ri + r) * (r + ri * rip1) / (r * r * (rim1 - 1.0)))
        y_terms.append(ri * rim1 * (ri + r) / (r * (rim1 - 1.0)))
    return min(x_terms), min(y_terms)


def n_values(i: int, k: int, rho, r: float):
    """The three explicit lower-bound quantities for the (i, k) product term."""
    if i not in (1, 2, 3) or k not in (1, 2, 3):
        raise ValueError("indices must be 1, 2, or 3")
    if min(rho) <= 1.0 or r <= 0.0:
        raise ValueError("need rho_i > 1 and r > 0")
    ri = _cyc(rho, i)
    rim1 = _cyc(rho, i - 1)
    rip1 = _cyc(rho, i + 1)
    rk = _cyc(rho, k)
    rkm1 = _cyc(rho, k - 1)
    rkp1 = _cyc(rho, k + 1)
    common = (rk + r) * (r + ri * rip1) / (r * rip1 * (rkm1 - 1.0) * (ri - 1.0))
    n1 = rkm1 * rim1 * common
    n2 = rkm1 * rk * common
    n3 = rkm1 * rk * rkp1 * common / ri
    return n1, n2, n3


def B_func(m: int, hash_sum: int, K: float, L: float) -> float:
    """Length lower bound m K + (sum of self-intersection counts) L."""
    return m * K + hash_sum * L


def counting_constants(g: int, n: int):
    """Crossing-triple count 24g - 24 + 12n and the fiber base 18."""
    if 2 * g - 2 + n <= 0:
        raise InvalidTopology("need 2g - 2 + n > 0")
    return {"crossing_triples": 24 * g - 24 + 12 * n, "psi_fiber_base": 18}


def _binom_argmax(T: float, K: float, L: float):
    """Argmax over Q in {1..floor(T/K)} of C(floor((T-QK)/L) + Q, Q).

    Full scan by exact integer ratio comparisons of consecutive values
    (never materializing the big binomials), then exact evaluation at every
    local peak; the maximal peak wins.
    """
    qmax = int(math.floor(T / K))
    if qmax < 1:
        raise PreconditionViolated("T must be at least K")

    def top(q):
        return int(math.floor((T - q * K) / L)) + q

    peaks = [qmax]
    rising = True
    for q in range(1, qmax):
        n_cur, n_nxt = top(q), top(q + 1)
        d = n_cur - n_nxt
        # C(n', q+1) / C(n, q) = prod_{j=0..d}(n - q - j) / (prod_{j=0..d-1}(n - j) * (q+1))
        num = 1
        for j in range(d + 1):
            num *= max(n_cur - q - j, 0)
        den = q + 1
        for j in range(d):
            den *= n_cur - j
        ascending = num > den
        if rising and not ascending:
            peaks.append(q)
        rising = ascending
    best_q, best_v = 1, math.comb(top(1), 1)
    for q in set(peaks):
        val = math.comb(top(q), q)
        if val > best_v or (val == best_v and q < best_q):
            best_q, best_v = q, val
    return best_q, best_v


def binom_rate(T: float, K: float, L: float):
    """(1/T) log of the maximal binomial, with its argmax Q.

    Exact integer binomials; the returned rate is the finite-T version of
    the entropy correction term.
    """
    if not (T >= K > L > 0.0):
        raise PreconditionViolated("need T >= K > L > 0")
    q, val = _binom_argmax(T, K, L)
    # log of a big integer via int.bit_length to avoid float overflow
    return _log_big(val) / T, q


def _log_big(value: int) -> float:
    if value <= 0:
        raise ValueError("log of nonpositive integer")
    bits = value.bit_length()
    if bits <= 900:
        return math.log(value)
    shift = bits - 900
    return math.log(value >> shift) + shift * math.log(2.0)


def entropy_upper(T: float, K: float, L: float, g: int, n: int) -> float:
    """Finite-T upper bound for the geodesic-counting growth rate.

    (1/T) [log 2 + floor(T/K) log(432g - 432 + 216n) + log floor(T/K)
           + log C(floor((T - QK)/L) + Q, Q)] at the maximizing Q.
    """
    if 2 * g - 2 + n <= 0:
        raise InvalidTopology("need 2g - 2 + n > 0")
    if T < 10.0 * K:
        raise PreconditionViolated("need T >= 10 K")
    if not (K > L > 0.0):
        raise PreconditionViolated("need K > L > 0")
    base = 432 * g - 432 + 216 * n
    rate, q = binom_rate(T, K, L)
    floor_tk = int(math.floor(T / K))
    return (
        math.log(2.0) + floor_tk * math.log(base) + math.log(floor_tk)
    ) / T + rate


def asymptotic_rate(H: float, K: float, L: float) -> float:
    """Closed-form limit of the binomial rate at Q/T -> H.

    H log(1 - K/L + 1/(H L)) + ((1 - H K)/L) log(1 + H L / (1 - H K)).
    """
    if not (K > 0.0 and L > 0.0):
        raise OutOfRange("need positive K and L")
    if not (0.0 < H <= 1.0 / (L + K)):
        raise OutOfRange("need 0 < H <= 1/(L+K)")
    first = H * math.log(1.0 - K / L + 1.0 / (H * L))
    rem = 1.0 - H * K
    second = (rem / L) * math.log(1.0 + H * L / rem)
    return first + second
