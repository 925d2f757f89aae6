"""Free-homotopy classes on the pair of pants and geodesic counting.

Conjugacy classes of the rank-2 free group on A, B (with C = (BA)^-1)
are cyclically reduced cyclic words.  Lengths come from the holonomy:
log(lambda_max / lambda_min) of the word's matrix, evaluated through the
trace pair (tr W, tr W^-1) so tiny bottom eigenvalues of long products
are never resolved directly.
"""

from __future__ import annotations

from dataclasses import dataclass
import itertools
import math

import numpy as np

from .errors import (
    CutoffUncertified,
    NoGeodesicsBelowT,
    NotHyperbolic,
    ParseError,
    TrivialWord,
)
from .pants import HolonomyTriple
from .projective import UnimodularMatrix, adjugate

LETTER_NAMES = ("A", "A^-1", "B", "B^-1")
INVERSE = (1, 0, 3, 2)

# letter sequences of the peripheral generators' inverses-free classes:
# C = (BA)^-1 = A^-1 B^-1 as a matrix product
_C_WORD = (1, 3)
_C_INV_WORD = (0, 2)


@dataclass(frozen=True)
class CyclicWord:
    """Cyclically reduced word over {A, A^-1, B, B^-1}, canonical rotation."""

    letters: tuple

    def __post_init__(self):
        ls = self.letters
        if not ls:
            raise TrivialWord("empty cyclic word")
        n = len(ls)
        for i in range(n):
            if ls[i] == INVERSE[ls[(i + 1) % n]]:
                raise ValueError("word is not cyclically reduced")
        if ls != min(ls[i:] + ls[:i] for i in range(n)):
            raise ValueError("word is not in canonical rotation")

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return " ".join(LETTER_NAMES[x] for x in self.letters)

    def inverse(self) -> "CyclicWord":
        return cyclic_reduce([INVERSE[x] for x in reversed(self.letters)])

    def power(self, k: int) -> "CyclicWord":
        if k < 1:
            raise ValueError("power must be positive")
        return cyclic_reduce(list(self.letters) * k)


def free_reduce(seq):
    out = []
    for x in seq:
        if out and out[-1] == INVERSE[x]:
            out.pop()
        else:
            out.append(x)
    return out


def cyclic_reduce(seq) -> CyclicWord:
    """Canonical cyclic word of a letter sequence; TrivialWord if it cancels."""
    word = free_reduce(list(seq))
    while len(word) >= 2 and word[0] == INVERSE[word[-1]]:
        word = word[1:-1]
    if not word:
        raise TrivialWord("word reduces to the identity")
    n = len(word)
    tup = tuple(word)
    canon = min(tup[i:] + tup[:i] for i in range(n))
    return CyclicWord(letters=canon)


def parse_word(text: str) -> CyclicWord:
    """Parse tokens like "A B^-1 A^-1" into a cyclic word."""
    tokens = text.replace(",", " ").split()
    if not tokens:
        raise ParseError("empty word")
    seq = []
    lookup = {name: i for i, name in enumerate(LETTER_NAMES)}
    for tok in tokens:
        if tok not in lookup:
            raise ParseError(f"unknown letter {tok!r}; expected A, B, A^-1, B^-1")
        seq.append(lookup[tok])
    return cyclic_reduce(seq)


def is_peripheral(w: CyclicWord) -> bool:
    """True for powers of A, B, (BA)^-1 and their inverses, up to rotation."""
    ls = w.letters
    n = len(ls)
    if all(x == ls[0] for x in ls):
        return True
    if n % 2 == 0:
        half = n // 2
        if ls == _C_WORD * half or ls == _C_INV_WORD * half:
            return True
    return False


def is_typical(w: CyclicWord) -> bool:
    return not is_peripheral(w)


def is_primitive(w: CyclicWord) -> bool:
    n = len(w.letters)
    for p in range(1, n):
        if n % p == 0 and w.letters == w.letters[:p] * (n // p):
            return False
    return True


def enumerate_classes(max_len: int):
    """All conjugacy classes of word length <= max_len, canonical, in order."""
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    for n in range(1, max_len + 1):
        for tup in itertools.product(range(4), repeat=n):
            if any(tup[i] == INVERSE[tup[(i + 1) % n]] for i in range(n)):
                continue
            if tup != min(tup[i:] + tup[:i] for i in range(n)):
                continue
            yield CyclicWord(letters=tup)


def generator_matrices(h: HolonomyTriple):
    """Stacked letter matrices G[i] and their exact inverses Gi[i]."""
    a = h.A.entries
    b = h.B.entries
    ai = adjugate(a)
    bi = adjugate(b)
    return np.stack([a, ai, b, bi]), np.stack([ai, a, bi, b])


def holonomy_of(h: HolonomyTriple, w: CyclicWord) -> UnimodularMatrix:
    g, _ = generator_matrices(h)
    m = np.eye(3)
    for x in w.letters:
        m = m @ g[x]
    return UnimodularMatrix(m)


def _largest_roots(tr, c1):
    """Largest real root of x^3 - tr x^2 + c1 x - 1, vectorized.

    Rescaled monotone Newton from above; assumes tr > 0 (true whenever a
    positive real dominant eigenvalue exists).
    """
    tr = np.asarray(tr, dtype=float)
    c1 = np.asarray(c1, dtype=float)
    sig = np.maximum(np.maximum(tr, np.sqrt(np.maximum(c1, 0.0))), 1.0)
    a2 = tr / sig
    a1 = c1 / (sig * sig)
    a0 = 1.0 / (sig * sig * sig)
    y = np.maximum(a2, 1.0)
    for _ in range(64):
        f = ((y - a2) * y + a1) * y - a0
        df = (3.0 * y - 2.0 * a2) * y + a1
        step = f / df
        y = y - step
        if float(np.max(np.abs(step))) < 1e-15 * float(np.max(y)):
            break
    return y * sig


def _lengths_from_traces(tr_fwd, tr_inv):
    """log(lambda_max) + log(lambda_max of inverse) from the trace pair."""
    return np.log(_largest_roots(tr_fwd, tr_inv)) + np.log(_largest_roots(tr_inv, tr_fwd))


def _trace_pair(h_or_mats, letters):
    if isinstance(h_or_mats, HolonomyTriple):
        g, gi = generator_matrices(h_or_mats)
    else:
        g, gi = h_or_mats
    p = np.eye(3)
    q = np.eye(3)
    for x in letters:
        p = p @ g[x]
        q = gi[x] @ q
    return float(np.trace(p)), float(np.trace(q))


def class_length(h: HolonomyTriple, w: CyclicWord, tol: float = 1e-9) -> float:
    """Translation length log(lambda_max / lambda_min) of the word's holonomy.

    Raises NotHyperbolic when the holonomy fails to have three positive,
    separated real eigenvalues.
    """
    tr_fwd, tr_inv = _trace_pair(h, w.letters)
    if not (tr_fwd > 0.0 and tr_inv > 0.0):
        raise NotHyperbolic("trace pair not positive")
    lam_hi = float(_largest_roots(tr_fwd, tr_inv))
    # deflation: remaining quadratic x^2 - (tr - lam) x + 1/lam has the other
    # two eigenvalues as roots; positives iff its coefficients are positive
    rem_sum = tr_fwd - lam_hi
    rem_prod = 1.0 / lam_hi
    disc = rem_sum * rem_sum - 4.0 * rem_prod
    if rem_sum <= 0.0 or disc <= 0.0:
        raise NotHyperbolic("spectrum not positive real")
    lam_mid = (rem_sum + math.sqrt(disc)) / 2.0
    lam_lo = rem_prod / lam_mid
    if lam_mid - lam_lo <= tol * lam_mid or lam_hi - lam_mid <= tol * lam_hi:
        raise NotHyperbolic("eigenvalue gap below resolution")
    return float(_lengths_from_traces(tr_fwd, tr_inv))


@dataclass(frozen=True)
class ClassRecord:
    """A conjugacy class with its geodesic length and classification flags."""

    word: CyclicWord
    length: float
    typical: bool
    primitive: bool


def make_record(h: HolonomyTriple, w: CyclicWord) -> ClassRecord:
    return ClassRecord(
        word=w,
        length=class_length(h, w),
        typical=is_typical(w),
        primitive=is_primitive(w),
    )


def shortest_typical(h: HolonomyTriple, max_len: int) -> ClassRecord:
    """Shortest typical class of word length <= max_len.

    An upper bound for the true shortest typical geodesic: completeness
    beyond the word-length cutoff is not guaranteed.  Near-ties within
    1e-9 relative length are broken by word length then letters.
    """
    if max_len < 2:
        raise ValueError("max_len must be at least 2 to contain typical classes")
    best = []
    for w in enumerate_classes(max_len):
        if not is_typical(w):
            continue
        best.append((class_length(h, w), w))
    low = min(ell for ell, _ in best)
    ties = [w for ell, w in best if ell <= low * (1.0 + 1e-9)]
    winner = min(ties, key=lambda w: (len(w.letters), w.letters))
    return make_record(h, winner)


# --- counting machinery -----------------------------------------------------

_TAIL_DEPTH = 9  # vectorized suffix-tree depth for the level scans


def _scan_level(g, gi, n: int, thresholds):
    """Counts of cyclically reduced words of length n with length <= each
    threshold, plus the level's minimum length and word total."""
    counts = np.zeros(len(thresholds), dtype=np.int64)
    state = {"min": math.inf, "total": 0}
    thr = np.asarray(thresholds, dtype=float)

    def absorb(tr_fwd, tr_inv):
        lens = _lengths_from_traces(tr_fwd, tr_inv)
        if len(lens):
            state["min"] = min(state["min"], float(lens.min()))
            state["total"] += len(lens)
            for j, t in enumerate(thr):
                counts[j] += int((lens <= t).sum())

    def tail(first, prods, invs, lasts, depth):
        if depth == n:
            mask = lasts != INVERSE[first]
            if mask.any():
                absorb(
                    np.trace(prods[mask], axis1=1, axis2=2),
                    np.trace(invs[mask], axis1=1, axis2=2),
                )
            return
        ps, qs, ls = [], [], []
        for nxt in range(4):
            m = lasts != INVERSE[nxt]
            if m.any():
                ps.append(prods[m] @ g[nxt])
                qs.append(gi[nxt] @ invs[m])
                ls.append(np.full(int(m.sum()), nxt, dtype=np.int8))
        tail(first, np.concatenate(ps), np.concatenate(qs), np.concatenate(ls), depth + 1)

    split = max(1, n - _TAIL_DEPTH)

    def prefix(first, last, p, q, depth):
        if depth == split or depth == n:
            tail(first, p[None], q[None], np.array([last], dtype=np.int8), depth)
            return
        for nxt in range(4):
            if nxt == INVERSE[last]:
                continue
            prefix(first, nxt, p @ g[nxt], gi[nxt] @ q, depth + 1)

    for first in range(4):
        prefix(first, first, g[first], gi[first], 1)
    return counts, state["min"], state["total"]


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


class _PrimitiveCounter:
    """Level-by-level word counts folded to primitive class counts.

    W_n(t) counts cyclically reduced words of length n with class length
    <= t.  Since every such word is u^k for a unique primitive class u with
    |u| d = n (contributing d rotations of length-k-scaled classes),
    n P_n(t) = W_n(t) - sum over proper divisors d of d P_d(t d / n).
    """

    def __init__(self, h: HolonomyTriple, bases, max_len: int):
        self.g, self.gi = generator_matrices(h)
        self.bases = tuple(bases)
        self.max_len = max_len
        # thresholds needed at level d: base * d / n for every multiple n
        self.level_thresholds = {}
        for d in range(1, max_len + 1):
            keys = []
            for bi, base in enumerate(self.bases):
                for n in range(d, max_len + 1, d):
                    keys.append((bi, n, base * d / n))
            self.level_thresholds[d] = keys
        self.word_counts = {}  # (d, bi, n) -> W_d(base*d/n)
        self.level_min = {}
        self.level_total = {}
        self._pmemo = {}

    def scan(self, n: int):
        keys = self.level_thresholds[n]
        counts, mn, total = _scan_level(self.g, self.gi, n, [k[2] for k in keys])
        for (bi, den, _), c in zip(keys, counts):
            self.word_counts[(n, bi, den)] = int(c)
        self.level_min[n] = mn
        self.level_total[n] = total

    def primitive_count(self, d: int, bi: int, den: int) -> int:
        """P_d evaluated at threshold base[bi] * d / den."""
        key = (d, bi, den)
        if key in self._pmemo:
            return self._pmemo[key]
        total = self.word_counts[key]
        for e in _divisors(d)[:-1]:
            total -= e * self.primitive_count(e, bi, den)
        # a class straddling the float threshold can break exact divisibility
        # between levels; round rather than fail
        val = int(round(total / d))
        self._pmemo[key] = max(val, 0)
        return self._pmemo[key]


def count_geodesics(h: HolonomyTriple, T: float, max_len: int, slack: float = None) -> int:
    """Number of primitive oriented conjugacy classes with length <= T.

    Levels are scanned in increasing word length until two consecutive
    levels carry no primitive class below T + slack, which certifies the
    cutoff under the padded-frontier policy; otherwise CutoffUncertified
    is raised.  The default slack is the largest cuff length, absorbing
    the small non-monotonicity of per-level length minima.
    """
    if T <= 0.0:
        return 0
    gen_lengths = [
        class_length(h, CyclicWord(letters=(0,))),
        class_length(h, CyclicWord(letters=(2,))),
        class_length(h, CyclicWord(letters=_C_WORD)),
    ]
    if slack is None:
        slack = max(gen_lengths)
    counter = _PrimitiveCounter(h, (T, T + slack), max_len)
    running = 0
    empty_streak = 0
    for n in range(1, max_len + 1):
        counter.scan(n)
        running += counter.primitive_count(n, 0, n)
        padded = counter.primitive_count(n, 1, n)
        empty_streak = empty_streak + 1 if padded == 0 else 0
        if empty_streak >= 2:
            return running
    raise CutoffUncertified(
        f"no primitive-free frontier below word length {max_len}; "
        f"raise max_len (T={T:.6g}, slack={slack:.6g})"
    )


def entropy_estimate(h: HolonomyTriple, T: float, max_len: int) -> float:
    """log R(T) / T for the certified count R(T)."""
    r = count_geodesics(h, T, max_len)
    if r < 1:
        raise NoGeodesicsBelowT(f"no closed geodesics of length <= {T}")
    return math.log(r) / T
