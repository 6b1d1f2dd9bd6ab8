"""Lower-bound laboratory: collision-problem reduction and fingerprint bounds.

Two constructions live here.  The first turns a one-to-one vs two-to-one
function-distinction instance into an orthogonality-testing instance by
splitting a randomly relabeled domain into odd and even inputs; the L1
distance of the resulting pair is controlled exactly by how many matched
pairs straddle the parity classes.  The second is the fingerprint machinery
for the classical uniformity bound: Poissonized collision statistics, the
moment-series bound on the distance between fingerprint distributions, and
the arithmetic that certifies untestability at a square-root sample budget.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .distributions import Distribution, OracleTable

__all__ = [
    "CollisionFunction",
    "build_collision_oracles",
    "matching_parity_distance",
    "sequential_matching_sampler",
    "cross_parity_count",
    "Fingerprint",
    "fingerprint_of",
    "poissonized_occupation",
    "sample_poissonized_fingerprint",
    "valiant_bound",
    "CorollaryReport",
    "corollary_report",
    "empirical_fingerprint_tv",
]

ONE_TO_ONE = "one-to-one"
TWO_TO_ONE = "two-to-one"


@dataclass(frozen=True)
class CollisionFunction:
    """A function on an even-size domain into a range of 1.5x that size,
    promised to be either injective or exactly two-to-one."""

    table: np.ndarray
    kind: str

    def __post_init__(self):
        arr = np.asarray(self.table, dtype=np.int64)
        n = arr.size
        if n < 2 or n % 2:
            raise ValueError("domain size must be an even integer >= 2")
        if arr.min() < 0 or arr.max() >= (3 * n) // 2:
            raise ValueError("values must lie in [0, 3n/2)")
        _, mult = np.unique(arr, return_counts=True)
        if self.kind == ONE_TO_ONE:
            if not np.all(mult == 1):
                raise ValueError("one-to-one table must have all distinct values")
        elif self.kind == TWO_TO_ONE:
            if not np.all(mult == 2):
                raise ValueError("two-to-one table must hit every value exactly twice")
        else:
            raise ValueError(f"unknown kind {self.kind!r}")
        arr.flags.writeable = False
        object.__setattr__(self, "table", arr)

    @property
    def n(self) -> int:
        return int(self.table.size)

    @property
    def range_size(self) -> int:
        return (3 * self.n) // 2

    @classmethod
    def one_to_one(cls, n: int, rng: np.random.Generator) -> "CollisionFunction":
        table = rng.permutation(3 * n // 2)[:n]
        return cls(table, ONE_TO_ONE)

    @classmethod
    def two_to_one(cls, n: int, rng: np.random.Generator) -> "CollisionFunction":
        values = rng.permutation(3 * n // 2)[: n // 2]
        table = np.repeat(values, 2)
        rng.shuffle(table)
        return cls(table, TWO_TO_ONE)


def _as_permutation(sigma, n: int) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=np.int64)
    if sigma.size != n or not np.array_equal(np.sort(sigma), np.arange(n)):
        raise ValueError("sigma must be a permutation of the function domain")
    return sigma


def build_collision_oracles(
    h: CollisionFunction,
    sigma=None,
    rng: np.random.Generator | None = None,
) -> tuple[OracleTable, OracleTable]:
    """Split the relabeled function into odd-input and even-input oracles.

    With domain inputs numbered from 1, the first oracle reads the composed
    table at inputs 1, 3, 5, ... and the second at 2, 4, 6, ...; both have
    domain size n/2 and range 3n/2.  For an injective function the two
    generated distributions are uniform on disjoint sets, hence orthogonal;
    for a two-to-one function their distance is governed by the parity
    structure of the relabeling (see :func:`matching_parity_distance`).
    """
    if sigma is None:
        if rng is None:
            raise ValueError("provide sigma or an rng to draw it")
        sigma = rng.permutation(h.n)
    else:
        sigma = _as_permutation(sigma, h.n)
    composed = h.table[sigma]
    op = OracleTable(composed[0::2], h.range_size)
    oq = OracleTable(composed[1::2], h.range_size)
    return op, oq


def matching_parity_distance(h: CollisionFunction, sigma) -> float:
    """L1 distance of the split pair, computed from parity bookkeeping alone.

    A two-to-one function induces a perfect matching on the relabeled domain
    (inputs mapping to the same value are matched).  A matched pair whose
    inputs have different parity contributes the same mass to both oracles;
    a same-parity pair puts double mass on one side and none on the other.
    Hence distance = 2 - (4/n) * (#different-parity matched pairs), exactly.
    """
    if h.kind != TWO_TO_ONE:
        raise ValueError("parity formula applies to two-to-one functions only")
    sigma = _as_permutation(sigma, h.n)
    composed = h.table[sigma]
    order = np.argsort(composed, kind="stable")
    u, v = order[0::2], order[1::2]
    different = int(np.count_nonzero((u ^ v) & 1))
    return (2 * h.n - 4 * different) / h.n


def sequential_matching_sampler(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random perfect matching on n vertices, built pair by pair.

    At each step the next vertex to match is drawn from whichever parity
    class is not larger, and its partner uniformly from all remaining
    vertices.  Fixing which vertex gets matched next does not bias the
    matching, so the output is uniform over all perfect matchings; the
    side-selection rule additionally makes every step pair across parity
    classes with probability at least 1/2.

    Returns an (n/2, 2) array of vertex pairs.
    """
    if n < 2 or n % 2:
        raise ValueError("n must be an even integer >= 2")
    groups = [list(range(0, n, 2)), list(range(1, n, 2))]  # by parity

    def pop_at(g: list[int], idx: int) -> int:
        g[idx], g[-1] = g[-1], g[idx]
        return g.pop()

    pairs = np.empty((n // 2, 2), dtype=np.int64)
    for step in range(n // 2):
        even, odd = groups
        if len(even) >= len(odd) and odd:
            side = odd
        elif even:
            side = even
        else:
            side = odd
        u = pop_at(side, int(rng.integers(len(side))))
        j = int(rng.integers(len(even) + len(odd)))
        v = pop_at(even, j) if j < len(even) else pop_at(odd, j - len(even))
        pairs[step] = (u, v)
    return pairs


def cross_parity_count(matching: np.ndarray) -> int:
    """Number of matched pairs whose endpoints have different parity."""
    m = np.asarray(matching, dtype=np.int64)
    return int(np.count_nonzero((m[:, 0] ^ m[:, 1]) & 1))


@dataclass(frozen=True)
class Fingerprint:
    """Collision-multiplicity profile of a sample list.

    ``counts`` holds pairs ``(r, c_r)``: ``c_r`` elements appeared exactly
    ``r`` times.  The profile forgets element identities, which is all a
    tester of a relabeling-invariant property can use.
    """

    counts: tuple[tuple[int, int], ...]

    @property
    def total(self) -> int:
        """Length of the underlying sample list: sum of r * c_r."""
        return sum(r * c for r, c in self.counts)

    def as_dict(self) -> dict[int, int]:
        return dict(self.counts)


def _fingerprint_from_multiplicities(mult: np.ndarray) -> Fingerprint:
    if mult.size == 0:
        return Fingerprint(())
    orders, occur = np.unique(mult, return_counts=True)
    return Fingerprint(tuple((int(r), int(c)) for r, c in zip(orders, occur)))


def fingerprint_of(samples) -> Fingerprint:
    arr = np.asarray(samples)
    if arr.size == 0:
        return Fingerprint(())
    _, mult = np.unique(arr, return_counts=True)
    return _fingerprint_from_multiplicities(mult)


def poissonized_occupation(
    p: Distribution, m: float, rng: np.random.Generator
) -> np.ndarray:
    """Per-element occupation counts of a Poisson(m)-size i.i.d. sample.

    Drawn as: sample the list length from Poisson(m), then the occupation
    vector of that many i.i.d. draws.  Under this sampling the count of each
    element i is marginally Poisson(m * p_i), independent across elements;
    tests use that standard fact as the oracle for this implementation.
    """
    if m <= 0:
        raise ValueError("rate parameter must be positive")
    k = int(rng.poisson(m))
    if k == 0:
        return np.zeros(p.n, dtype=np.int64)
    return rng.multinomial(k, p.weights)


def sample_poissonized_fingerprint(
    p: Distribution, m: float, rng: np.random.Generator
) -> Fingerprint:
    """Fingerprint of a Poisson(m)-size i.i.d. sample from p."""
    occupation = poissonized_occupation(p, m, rng)
    return _fingerprint_from_multiplicities(occupation[occupation > 0])


def valiant_bound(
    p: Distribution,
    m: float,
    delta: float,
    *,
    term_tol: float = 1e-15,
    max_terms: int = 500,
) -> float:
    """Moment-series upper bound on the L1 distance between the Poissonized
    fingerprint distributions of ``p`` and of the uniform distribution:

        40*delta + 10 * sum_{k>=2} m^k (m_k(p) - n^(1-k))
                                   / (floor(k/2)! * sqrt(1 + m^k m_k(p)))

    Requires ``max_i p_i <= delta / m``.  The series is truncated once terms
    fall below ``term_tol`` while already decreasing; the factorial
    denominators guarantee convergence for any admissible input.
    """
    if m <= 0:
        raise ValueError("rate parameter must be positive")
    if delta <= 0:
        raise ValueError("delta must be positive")
    if p.max_weight > delta / m:
        raise ValueError(
            f"precondition failed: max weight {p.max_weight:.3g} exceeds delta/m={delta / m:.3g}"
        )
    base = m * p.weights
    ref = m * (1.0 / p.n)
    total = 0.0
    prev = math.inf
    converged = False
    for k in range(2, max_terms + 1):
        powers = base**k
        scaled_moment = float(powers.sum())
        # Elementwise difference so the uniform distribution cancels exactly;
        # clamp tiny negative rounding (the true difference is >= 0).
        diff = max(0.0, float((powers - ref**k).sum()))
        term = 10.0 * diff / (math.factorial(k // 2) * math.sqrt(1.0 + scaled_moment))
        total += term
        if term < term_tol and term <= prev:
            converged = True
            break
        prev = term
    if not converged:
        raise RuntimeError("moment series did not converge within max_terms")
    return 40.0 * delta + total


@dataclass(frozen=True)
class CorollaryReport:
    """Arithmetic certificate for classical uniformity untestability.

    For the half-support instance (weight 2/n on half the domain) and sample
    budget ``m = 2^-a * sqrt(n)``, every series term is at most
    ``2^(-2a+1)`` and the term sum is at most 4 of those, so the fingerprint
    distance is at most ``bound = 40*delta + 10*2^(-2a+3)``.  The instance is
    certified when the bound is below 1/12 and the moment-series
    precondition ``2/n <= delta/m`` holds.
    """

    n: int
    a: int
    delta: float
    m: float
    sup_weight: float
    precondition_ok: bool
    bound: float
    threshold: float
    certified: bool

    def render(self) -> str:
        lines = [
            f"n={self.n}",
            f"a={self.a}",
            f"delta={self.delta!r}",
            f"samples={self.m!r}",
            f"sup_weight={self.sup_weight!r}",
            f"precondition_ok={int(self.precondition_ok)}",
            f"bound={self.bound!r}",
            f"threshold={self.threshold!r}",
            f"certified={int(self.certified)}",
        ]
        return "\n".join(lines) + "\n"


def corollary_report(n: int, a: int, delta: float) -> CorollaryReport:
    """Evaluate the untestability arithmetic at ``m = 2^-a * sqrt(n)``."""
    n = int(n)
    a = int(a)
    if n < 2 or n % 2:
        raise ValueError("n must be an even integer >= 2")
    if a < 0:
        raise ValueError("a must be a non-negative integer")
    if delta <= 0:
        raise ValueError("delta must be positive")
    m = 2.0**-a * math.sqrt(n)
    sup_weight = 2.0 / n
    precondition_ok = sup_weight <= delta / m
    bound = 40.0 * delta + 10.0 * 2.0 ** (3 - 2 * a)
    threshold = 1.0 / 12.0
    return CorollaryReport(
        n=n,
        a=a,
        delta=float(delta),
        m=m,
        sup_weight=sup_weight,
        precondition_ok=precondition_ok,
        bound=bound,
        threshold=threshold,
        certified=precondition_ok and bound < threshold,
    )


def empirical_fingerprint_tv(
    p: Distribution,
    q: Distribution,
    m: float,
    trials: int,
    rng: np.random.Generator,
) -> float:
    """Plug-in total-variation estimate between Poissonized fingerprint
    distributions, from ``trials`` draws per side.

    Plug-in TV is biased upward on sparse supports; a warning is issued when
    the trial count is below 100x the observed joint support size.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    cp: Counter = Counter()
    cq: Counter = Counter()
    for _ in range(trials):
        cp[sample_poissonized_fingerprint(p, m, rng)] += 1
    for _ in range(trials):
        cq[sample_poissonized_fingerprint(q, m, rng)] += 1
    support = set(cp) | set(cq)
    if trials < 100 * len(support):
        warnings.warn(
            f"plug-in TV over {len(support)} observed fingerprints from {trials} "
            "trials is likely biased upward",
            stacklevel=2,
        )
    return 0.5 * sum(abs(cp[f] - cq[f]) for f in support) / trials
