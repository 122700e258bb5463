"""Construction of the bad set S on the normalized torus [0,1)^2.

S is the complement of the strips I_[w] = {t : <w,t> mod 1 in (-rho_w, rho_w)}
over all nonzero w with |w|_inf <= W. Half-widths are rho_w = delta(l) * delta(m)
for w = l * v_m, using the generator index of the lexicographically larger
of {v, -v} so that the strip family is symmetric.
"""

import math
from functools import lru_cache
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.config import config
from src.enums import LatticeVector, MeasureMethod, TorusPoint
from src.errors import InvalidArgumentError, ResourceLimitError
from src.lattice import canonical_generator, generator_decompose, generator_index, generator_index_map
from src.utils.logger import get_logger
from src.worker_pool import chunk_ranges, worker_pool

logger = get_logger(__name__)

# Fractional cell offsets for grid sampling of strip sets (golden ratio, silver ratio)
GRID_ROTATION = ((math.sqrt(5.0) - 1.0) / 2.0, math.sqrt(2.0) - 1.0)

_ROW_CHUNK = 64
_SAMPLE_CHUNK = 1_000_000

Strip = Tuple[int, int, float]


class DeltaSequence(BaseModel):
    """delta(n) = c0 / (n * ln(n+1)^2), with c0 calibrated against epsilon."""
    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(gt=0.0, lt=1.0)
    c0: float = Field(gt=0.0)
    partial_terms: int = Field(default=1_000_000, ge=1)

    def __call__(self, n: int) -> float:
        return delta(self, n)

    def partial_sum(self, upto: int) -> float:
        """sum_{n <= upto} delta(n)."""
        n = np.arange(1, upto + 1, dtype=np.float64)
        return self.c0 * float(np.sum(1.0 / (n * np.log1p(n) ** 2)))

    def sum_upper_bound(self) -> float:
        """Certified upper bound on sum_n delta(n): partial sum plus an integral tail."""
        partial, tail = _series_bound(self.partial_terms)
        return self.c0 * (partial + tail)


@lru_cache(maxsize=8)
def _series_bound(terms: int) -> Tuple[float, float]:
    """Partial sum of 1/(n ln^2(n+1)) up to terms, and a bound on the rest.

    For x >= N, 1/(x ln^2(x+1)) <= (1 + 1/N) / ((x+1) ln^2(x+1)), whose
    integral over [N, inf) is (1 + 1/N) / ln(N+1).
    """
    n = np.arange(1, terms + 1, dtype=np.float64)
    partial = float(np.sum(1.0 / (n * np.log1p(n) ** 2)))
    tail = (1.0 + 1.0 / terms) / math.log(terms + 1.0)
    return partial, tail


def calibrate_delta(epsilon: float, partial_terms: Optional[int] = None, safety: Optional[float] = None) -> DeltaSequence:
    """Choose c0 so that the certified bound on sum delta equals safety * sqrt(epsilon/2)."""
    if not 0.0 < epsilon < 1.0:
        raise InvalidArgumentError(f"epsilon must lie in (0,1), got {epsilon}")
    terms = partial_terms or config.delta_partial_terms
    safety = config.delta_safety if safety is None else safety
    partial, tail = _series_bound(terms)
    c0 = safety * math.sqrt(epsilon / 2.0) / (partial + tail)
    logger.debug(f"Calibrated delta: epsilon={epsilon} c0={c0:.6g} (partial={partial:.6f}, tail={tail:.6f})")
    return DeltaSequence(epsilon=epsilon, c0=c0, partial_terms=terms)


def delta(seq: DeltaSequence, n: int) -> float:
    """delta(n) for n >= 1."""
    if n < 1:
        raise InvalidArgumentError(f"delta is defined for n >= 1, got {n}")
    return seq.c0 / (n * math.log1p(n) ** 2)


class BadSetDescriptor(BaseModel):
    """Truncated bad set S_W, or an explicit strip family when delta is None."""

    delta: Optional[DeltaSequence] = None
    truncation_W: int = Field(ge=0)
    rho_cache: Dict[Tuple[int, int], float] = Field(default_factory=dict)
    tail_bound: float = 0.0

    @property
    def epsilon(self) -> Optional[float]:
        return None if self.delta is None else self.delta.epsilon

    def distinct_strips(self) -> List[Strip]:
        """One (a, b, rho) per strip, keyed by the lexicographically larger of +-w."""
        return [
            (a, b, r) for (a, b), r in sorted(self.rho_cache.items())
            if (a, b) > (-a, -b)
        ]

    def included_mass(self) -> float:
        """sum of 2 rho_w over every included w (both signs)."""
        return math.fsum(2.0 * r for r in self.rho_cache.values())

    def perimeter(self) -> float:
        """Total boundary length of the distinct strips on the unit torus."""
        return math.fsum(2.0 * math.hypot(a, b) for a, b, _ in self.distinct_strips())


def _rho_value(seq: DeltaSequence, w: Tuple[int, int]) -> float:
    ell, v = generator_decompose(LatticeVector.of(*w))
    m = generator_index(canonical_generator(v))
    return delta(seq, ell) * delta(seq, m)


def rho(desc: BadSetDescriptor, w: LatticeVector) -> float:
    """Strip half-width rho_w (normalized units)."""
    if w.is_zero:
        raise InvalidArgumentError("rho is undefined for the zero vector")
    cached = desc.rho_cache.get(w.as_tuple())
    if cached is not None:
        return cached
    if desc.delta is None:
        raise InvalidArgumentError(f"strip family has no strip for ({w.a},{w.b})")
    return _rho_value(desc.delta, w.as_tuple())


def _reduced(s: float) -> float:
    return s - math.floor(s + 0.5)


def in_strip(w: LatticeVector, rho_hat: float, t: TorusPoint) -> bool:
    """t in I_[w] for half-width rho_hat, via <w,t> mod 1 in (-rho_hat, rho_hat)."""
    return abs(_reduced(w.a * t.x + w.b * t.y)) < rho_hat


def strip_contains(desc: BadSetDescriptor, w: LatticeVector, t: TorusPoint) -> bool:
    """t in I_[w] using the descriptor's half-width for w."""
    return in_strip(w, rho(desc, w), t)


def pullback_contains(w: LatticeVector, xi: LatticeVector, rho_hat: float, t: TorusPoint) -> bool:
    """Membership in (L_w^T)^{-1}(I~_w) with L_w e1 = w, L_w e2 = xi."""
    if w.cross(xi) == 0:
        raise InvalidArgumentError(f"xi = ({xi.a},{xi.b}) must be linearly independent of w = ({w.a},{w.b})")
    # u = L_w^T t; I~_w is (-rho, rho) x R periodized by Z^2, so only u[0] matters
    u = (w.a * t.x + w.b * t.y, xi.a * t.x + xi.b * t.y)
    return abs(_reduced(u[0])) < rho_hat


def contains_mesh(desc: BadSetDescriptor, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Membership in S on the mesh xs x ys; result has shape (len(xs), len(ys))."""
    inside = np.ones((len(xs), len(ys)), dtype=bool)
    for a, b, r in desc.distinct_strips():
        s = (a * xs)[:, None] + (b * ys)[None, :]
        s -= np.floor(s + 0.5)
        inside &= np.abs(s) >= r
    return inside


def contains_points(desc: BadSetDescriptor, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Membership in S for the paired points (xs[i], ys[i])."""
    inside = np.ones(len(xs), dtype=bool)
    for a, b, r in desc.distinct_strips():
        s = a * xs + b * ys
        s -= np.floor(s + 0.5)
        inside &= np.abs(s) >= r
    return inside


def set_contains(desc: BadSetDescriptor, t: TorusPoint) -> bool:
    """t in S_W: outside every included strip."""
    for a, b, r in desc.distinct_strips():
        if abs(_reduced(a * t.x + b * t.y)) < r:
            return False
    return True


def _tail(seq: Optional[DeltaSequence], included: float) -> float:
    if seq is None:
        return 0.0
    total = seq.sum_upper_bound()
    return max(0.0, 2.0 * total * total - included)


def tail_mass(desc: BadSetDescriptor) -> float:
    """Upper bound on sum over omitted w of 2 rho_w."""
    return _tail(desc.delta, desc.included_mass())


def certified_measure_lower_bound(desc: BadSetDescriptor) -> float:
    """Union bound: |S_W| >= 1 - sum over distinct strips of 2 rho_w."""
    return max(0.0, 1.0 - math.fsum(2.0 * r for _, _, r in desc.distinct_strips()))


def build_bad_set(epsilon: float, truncation_W: int) -> BadSetDescriptor:
    """S_W = T^2 minus the strips of every w with 0 < |w|_inf <= W."""
    if not 0.0 < epsilon < 1.0:
        raise InvalidArgumentError(f"epsilon must lie in (0,1), got {epsilon}")
    if truncation_W < 0:
        raise InvalidArgumentError(f"truncation must be >= 0, got {truncation_W}")

    seq = calibrate_delta(epsilon)
    cache: Dict[Tuple[int, int], float] = {}
    if truncation_W > 0:
        index_of = generator_index_map(truncation_W * math.sqrt(2.0))
        for a in range(-truncation_W, truncation_W + 1):
            for b in range(-truncation_W, truncation_W + 1):
                if a == 0 and b == 0:
                    continue
                ell = math.gcd(a, b)
                v = canonical_generator(LatticeVector(a=a // ell, b=b // ell))
                cache[(a, b)] = delta(seq, ell) * delta(seq, index_of[v.as_tuple()])

    included = math.fsum(2.0 * r for r in cache.values())
    desc = BadSetDescriptor(
        delta=seq,
        truncation_W=truncation_W,
        rho_cache=cache,
        tail_bound=_tail(seq, included),
    )
    logger.info(
        f"Built bad set: epsilon={epsilon} W={truncation_W} strips={len(desc.distinct_strips())} "
        f"included={included:.6g} tail_bound={desc.tail_bound:.6g}"
    )
    return desc


def strip_family(strips: Mapping[Tuple[int, int], float]) -> BadSetDescriptor:
    """Descriptor for an explicit finite strip family {w: rho_hat}; empty means the full torus."""
    cache: Dict[Tuple[int, int], float] = {}
    for (a, b), r in strips.items():
        if a == 0 and b == 0:
            raise InvalidArgumentError("strip vector must be nonzero")
        if not 0.0 <= r < 0.5:
            raise InvalidArgumentError(f"half-width must lie in [0, 1/2), got {r} for ({a},{b})")
        for key in ((a, b), (-a, -b)):
            if key in cache and cache[key] != r:
                raise InvalidArgumentError(f"conflicting half-widths for +-({a},{b})")
            cache[key] = float(r)
    reach = max((max(abs(a), abs(b)) for a, b in cache), default=0)
    return BadSetDescriptor(delta=None, truncation_W=reach, rho_cache=cache, tail_bound=0.0)


class MeasureEstimate(BaseModel):
    """Estimate of |S_W| with its error bound."""
    value: float
    error_bound: float
    method: MeasureMethod
    resolution: Optional[int] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    certified_lower_bound: float
    tail_bound: float


def _check_grid_resolution(n: int) -> None:
    if n < 64 or n & (n - 1):
        raise InvalidArgumentError(f"grid resolution must be a power of two >= 64, got {n}")
    if n > config.grid_cap:
        raise ResourceLimitError(f"grid resolution {n} exceeds the configured cap {config.grid_cap}")


def raster_error(desc: BadSetDescriptor, n: int, offset: Tuple[float, float] = GRID_ROTATION) -> float:
    """Bound on |sampled occupancy - |S_W|| for samples at ((i, j) + offset)/n.

    Both the sampled strip union and the true one lie in [0, sum over strips],
    so the larger of the exact per-strip sampled fractions and the strip
    masses bounds the gap; the perimeter rule is kept when it is sharper.
    """
    sampled = []
    for a, b, r in desc.distinct_strips():
        # <w, (i, j)> mod n runs over multiples of g, each hit n * g times
        g = math.gcd(math.gcd(a, b), n)
        s = (g * np.arange(n // g) + a * offset[0] + b * offset[1]) / n
        s -= np.floor(s + 0.5)
        sampled.append(g * int(np.count_nonzero(np.abs(s) < r)) / n)
    union = max(math.fsum(sampled), math.fsum(2.0 * r for _, _, r in desc.distinct_strips()))
    return min(1.0, desc.perimeter() / n, union)


def _grid_count(desc: BadSetDescriptor, n: int) -> int:
    xs = (np.arange(n) + GRID_ROTATION[0]) / n
    ys = (np.arange(n) + GRID_ROTATION[1]) / n

    def count(rows: range) -> int:
        return int(np.count_nonzero(contains_mesh(desc, xs[rows.start:rows.stop], ys)))

    return sum(worker_pool.map(count, chunk_ranges(n, _ROW_CHUNK)))


def _sample_count(desc: BadSetDescriptor, samples: int, seed: int) -> int:
    chunks = chunk_ranges(samples, _SAMPLE_CHUNK)
    seeds = np.random.SeedSequence(seed).spawn(len(chunks))

    def count(job: Tuple[range, np.random.SeedSequence]) -> int:
        rows, child = job
        rng = np.random.default_rng(child)
        pts = rng.random((len(rows), 2))
        return int(np.count_nonzero(contains_points(desc, pts[:, 0], pts[:, 1])))

    return sum(worker_pool.map(count, list(zip(chunks, seeds))))


def measure_estimate(
    desc: BadSetDescriptor,
    method: MeasureMethod,
    n: Optional[int] = None,
    samples: Optional[int] = None,
    seed: int = 0,
) -> MeasureEstimate:
    """Estimate |S_W| on a rotated n x n grid or from Monte-Carlo samples."""
    method = MeasureMethod(method)
    common: Dict[str, Any] = {
        "certified_lower_bound": certified_measure_lower_bound(desc),
        "tail_bound": desc.tail_bound,
    }

    if method == MeasureMethod.GRID:
        if n is None:
            raise InvalidArgumentError("grid estimation needs a resolution n")
        _check_grid_resolution(n)
        value = _grid_count(desc, n) / (n * n)
        error = raster_error(desc, n)
        logger.info(f"Grid measure n={n}: {value:.6f} +- {error:.3g}")
        return MeasureEstimate(value=value, error_bound=error, method=method, resolution=n, **common)

    if samples is None or samples < 10_000:
        raise InvalidArgumentError(f"Monte-Carlo estimation needs at least 10^4 samples, got {samples}")
    if samples > config.sample_cap:
        raise ResourceLimitError(f"{samples} samples exceed the configured cap {config.sample_cap}")
    p = _sample_count(desc, samples, seed) / samples
    error = 3.0 * math.sqrt(p * (1.0 - p) / samples)
    logger.info(f"Monte-Carlo measure k={samples} seed={seed}: {p:.6f} +- {error:.3g}")
    return MeasureEstimate(value=p, error_bound=error, method=method, samples=samples, seed=seed, **common)


def descriptor_to_dict(desc: BadSetDescriptor) -> Dict[str, Any]:
    """JSON form of a descriptor."""
    seq = desc.delta
    return {
        "epsilon": desc.epsilon,
        "c0": None if seq is None else seq.c0,
        "partial_terms": None if seq is None else seq.partial_terms,
        "truncation_W": desc.truncation_W,
        "rho": [{"w": [a, b], "rho": r} for (a, b), r in sorted(desc.rho_cache.items())],
        "tail_bound": desc.tail_bound,
    }


def descriptor_from_dict(data: Mapping[str, Any]) -> BadSetDescriptor:
    """Inverse of descriptor_to_dict."""
    seq = None
    if data.get("epsilon") is not None:
        seq = DeltaSequence(
            epsilon=data["epsilon"],
            c0=data["c0"],
            partial_terms=data.get("partial_terms") or config.delta_partial_terms,
        )
    cache = {(int(item["w"][0]), int(item["w"][1])): float(item["rho"]) for item in data["rho"]}
    return BadSetDescriptor(
        delta=seq,
        truncation_W=int(data["truncation_W"]),
        rho_cache=cache,
        tail_bound=float(data["tail_bound"]),
    )
