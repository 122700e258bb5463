"""Integer-lattice combinatorics: generators, GAP point sets, prime-slope families."""

import math
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.enums import GapSpec, LatticeVector
from src.errors import InvalidArgumentError
from src.utils.logger import get_logger

logger = get_logger(__name__)

# Slack for radii that come from square roots of integers
_RADIUS_SLACK = 1e-9


class Generator(BaseModel):
    """Coprime lattice vector and its 1-based position in the ordering of V."""
    model_config = ConfigDict(frozen=True)

    v: LatticeVector
    index_m: int

    @property
    def norm(self) -> float:
        return self.v.norm


class DisjointnessReport(BaseModel):
    """Outcome of a pairwise disjointness check over GAP blocks."""
    disjoint: bool
    witness: Optional[LatticeVector] = None
    pair: Optional[Tuple[int, int]] = None


def _require_nonzero(w: LatticeVector) -> None:
    if w.is_zero:
        raise InvalidArgumentError("Expected a nonzero lattice vector, got (0,0)")


def generator_decompose(w: LatticeVector) -> Tuple[int, LatticeVector]:
    """Write w = ell * v with ell = gcd(|a|,|b|) and v coprime."""
    _require_nonzero(w)
    ell = math.gcd(w.a, w.b)
    return ell, LatticeVector(a=w.a // ell, b=w.b // ell)


def canonical_generator(v: LatticeVector) -> LatticeVector:
    """The lexicographically larger of v and -v."""
    return v if v.as_tuple() >= (-v.a, -v.b) else -v


def _coprime_disk(radius: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coprime points of norm <= radius, sorted by (norm, a, b)."""
    reach = int(math.floor(radius + _RADIUS_SLACK))
    limit = radius * radius + _RADIUS_SLACK
    coords = np.arange(-reach, reach + 1, dtype=np.int64)
    a, b = np.meshgrid(coords, coords, indexing="ij")
    n2 = a * a + b * b
    mask = (n2 <= limit) & (np.gcd(a, b) == 1)
    a, b, n2 = a[mask], b[mask], n2[mask]
    order = np.lexsort((b, a, n2))
    return a[order], b[order], n2[order]


def enumerate_generators(radius: float) -> List[Generator]:
    """All generators with norm <= radius, in the fixed total order of V."""
    if radius < 1:
        raise InvalidArgumentError(f"radius must be >= 1, got {radius}")
    a, b, _ = _coprime_disk(radius)
    generators = [
        Generator(v=LatticeVector(a=int(x), b=int(y)), index_m=i + 1)
        for i, (x, y) in enumerate(zip(a.tolist(), b.tolist()))
    ]
    logger.debug(f"Enumerated {len(generators)} generators up to radius {radius}")
    return generators


def generator_norms(radius: float) -> np.ndarray:
    """Norms |v_m| for m = 1..K, without materializing Generator objects."""
    if radius < 1:
        raise InvalidArgumentError(f"radius must be >= 1, got {radius}")
    _, _, n2 = _coprime_disk(radius)
    return np.sqrt(n2.astype(np.float64))


def generator_index_map(radius: float) -> Dict[Tuple[int, int], int]:
    """Map (a, b) -> index_m for every generator with norm <= radius."""
    a, b, _ = _coprime_disk(max(radius, 1.0))
    return {(int(x), int(y)): i + 1 for i, (x, y) in enumerate(zip(a.tolist(), b.tolist()))}


@lru_cache(maxsize=65536)
def _generator_index(a: int, b: int) -> int:
    n2v = a * a + b * b
    reach = math.isqrt(n2v)
    coords = np.arange(-reach, reach + 1, dtype=np.int64)
    xa, xb = np.meshgrid(coords, coords, indexing="ij")
    n2 = xa * xa + xb * xb
    coprime = np.gcd(xa, xb) == 1
    inner = np.count_nonzero(coprime & (n2 < n2v))
    earlier = np.count_nonzero(coprime & (n2 == n2v) & ((xa < a) | ((xa == a) & (xb < b))))
    return int(inner + earlier + 1)


def generator_index(v: LatticeVector) -> int:
    """1-based position of the coprime vector v in the ordering of V."""
    _require_nonzero(v)
    if math.gcd(v.a, v.b) != 1:
        raise InvalidArgumentError(f"({v.a},{v.b}) is not a generator: coordinates are not coprime")
    return _generator_index(v.a, v.b)


def coprime_density(radius: float) -> float:
    """Share of nonzero lattice points of norm <= radius that are coprime."""
    if radius < 1:
        raise InvalidArgumentError(f"radius must be >= 1, got {radius}")
    reach = int(math.floor(radius + _RADIUS_SLACK))
    limit = radius * radius + _RADIUS_SLACK
    coords = np.arange(-reach, reach + 1, dtype=np.int64)
    a, b = np.meshgrid(coords, coords, indexing="ij")
    inside = (a * a + b * b) <= limit
    nonzero = np.count_nonzero(inside) - 1
    coprime = np.count_nonzero(inside & (np.gcd(a, b) == 1))
    return coprime / nonzero


def unimodular_completion(v: LatticeVector) -> LatticeVector:
    """An integer xi with det[v; xi] = 1, so (v, xi) is a basis of Z^2."""
    _require_nonzero(v)
    old_r, r = v.a, v.b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    # old_s * a + old_t * b = old_r = +-1
    if abs(old_r) != 1:
        raise InvalidArgumentError(f"({v.a},{v.b}) is not coprime; no unimodular completion")
    xi = LatticeVector(a=-old_t * old_r, b=old_s * old_r)
    return xi


def check_gap_spec(spec: GapSpec) -> None:
    """Raise InvalidArgumentError unless the spec describes d1*d2 distinct points."""
    _require_nonzero(spec.w1)
    if spec.w2 is None:
        if spec.d2 != 1:
            raise InvalidArgumentError(f"rank 1 GAP requires d2 = 1, got d2 = {spec.d2}")
        return
    if spec.d2 > 1 and spec.w2.is_zero:
        raise InvalidArgumentError("second step of a rank 2 GAP must be nonzero")
    if spec.d1 > 1 and spec.d2 > 1 and spec.w1.cross(spec.w2) == 0:
        raise InvalidArgumentError(
            f"steps ({spec.w1.a},{spec.w1.b}) and ({spec.w2.a},{spec.w2.b}) are linearly dependent"
        )


def gap_point_array(spec: GapSpec) -> np.ndarray:
    """Points of the GAP as an int64 array of shape (d1*d2, 2), k2 outer and k1 inner."""
    check_gap_spec(spec)
    origin = spec.index_origin
    k1 = np.arange(origin, origin + spec.d1, dtype=np.int64)
    k2 = np.arange(origin, origin + spec.d2, dtype=np.int64)
    w1 = np.array(spec.w1.as_tuple(), dtype=np.int64)
    w2 = np.zeros(2, dtype=np.int64) if spec.w2 is None else np.array(spec.w2.as_tuple(), dtype=np.int64)
    t = np.array(spec.translation.as_tuple(), dtype=np.int64)
    points = t + k1[None, :, None] * w1 + k2[:, None, None] * w2
    return points.reshape(-1, 2)


def gap_points(spec: GapSpec) -> List[LatticeVector]:
    """Points of the GAP in deterministic row-major order."""
    return [LatticeVector(a=int(x), b=int(y)) for x, y in gap_point_array(spec).tolist()]


def prime_slope_gap(n: int, k: int) -> GapSpec:
    """B(n, k) = {w, 2w, ..., n^2 w} with w = (n, k)."""
    if n < 2:
        raise InvalidArgumentError(f"n must be >= 2, got {n}")
    if not 1 <= k <= n - 1:
        raise InvalidArgumentError(f"k must lie in [1, {n - 1}], got {k}")
    return GapSpec(w1=LatticeVector(a=n, b=k), d1=n * n, index_origin=1)


def check_pairwise_disjoint(blocks: Sequence[GapSpec]) -> DisjointnessReport:
    """True iff the expanded blocks share no point; otherwise the first collision found."""
    owner: Dict[Tuple[int, int], int] = {}
    for index, spec in enumerate(blocks):
        for point in map(tuple, gap_point_array(spec).tolist()):
            previous = owner.get(point)
            if previous is not None and previous != index:
                logger.debug(f"Blocks {previous} and {index} share {point}")
                return DisjointnessReport(
                    disjoint=False,
                    witness=LatticeVector.of(*point),
                    pair=(previous, index),
                )
            owner[point] = index
    return DisjointnessReport(disjoint=True)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def primes_up_to(limit: int) -> List[int]:
    """Primes p <= limit in ascending order."""
    if limit < 2:
        return []
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve).tolist()
