"""Lower Riesz bounds for exponential systems over a set, and greedy assembly of Lambda.

The Gram matrix of a finite block {lambda_i} over S has entries
c(lambda_i - lambda_j) with c the indicator coefficients of S, so the
quadratic form c* G c is the squared L^2(S) norm of the exponential sum.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, field_serializer, field_validator

from src.config import config
from src.enums import CertificateMethod, GapSpec, LatticeVector
from src.errors import InternalConsistencyError, InvalidArgumentError
from src.lattice import check_gap_spec, gap_point_array, gap_points, is_prime, prime_slope_gap
from src.spectrum import FourierTable
from src.utils.logger import get_logger
from src.worker_pool import chunk_ranges, worker_pool

logger = get_logger(__name__)

# Rounding slack charged against the Hilbert-Schmidt route
_HS_SLACK = 1e-12

Block = Union[GapSpec, Sequence[LatticeVector]]


def _as_array(frequencies: Sequence[LatticeVector]) -> np.ndarray:
    return np.array([f.as_tuple() for f in frequencies], dtype=np.int64).reshape(-1, 2)


def _check_distinct(points: np.ndarray, label: str) -> None:
    if len({tuple(p) for p in points.tolist()}) != len(points):
        raise InvalidArgumentError(f"{label} contains repeated frequencies")


@dataclass
class GramMatrix:
    """Hermitian matrix c(lambda - mu) over an ordered frequency block."""

    frequencies: List[LatticeVector]
    entries: np.ndarray
    fourier_error: float = 0.0

    @property
    def size(self) -> int:
        return len(self.frequencies)


def _cross_block(table: FourierTable, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    diff = left[:, None, :] - right[None, :, :]
    return table.values(diff[..., 0], diff[..., 1])


def _check_differences(table: FourierTable, left: np.ndarray, right: np.ndarray) -> None:
    diff = left[:, None, :] - right[None, :, :]
    outside = np.abs(diff).max(axis=2) > table.max_freq
    if outside.any():
        i, j = (int(x) for x in np.argwhere(outside)[0])
        raise InvalidArgumentError(
            f"difference of ({left[i, 0]},{left[i, 1]}) and ({right[j, 0]},{right[j, 1]}) "
            f"is outside the table range {table.max_freq}"
        )


def gram(table: FourierTable, frequencies: Sequence[LatticeVector]) -> GramMatrix:
    """Gram matrix of the block; every pairwise difference must lie in the table range."""
    points = _as_array(frequencies)
    _check_differences(table, points, points)
    entries = _cross_block(table, points, points)
    entries = (entries + entries.conj().T) / 2.0
    return GramMatrix(frequencies=list(frequencies), entries=entries, fourier_error=table.error_bound)


def _eigenpair(entries: np.ndarray) -> Tuple[float, float, float]:
    """Smallest eigenvalue, its residual ||Gv - gv|| and the largest eigenvalue."""
    values, vectors = np.linalg.eigh(entries)
    v = vectors[:, 0]
    residual = float(np.linalg.norm(entries @ v - values[0] * v))
    return float(values[0]), residual, float(values[-1])


def _check_hermitian(entries: np.ndarray) -> None:
    defect = float(np.max(np.abs(entries - entries.conj().T))) if entries.size else 0.0
    if defect > config.hermitian_tol:
        raise InternalConsistencyError(f"Gram matrix is not Hermitian (defect {defect:.3g})")


def lower_riesz_bound(g: GramMatrix) -> Tuple[float, float]:
    """(gamma, residual): the smallest eigenvalue clamped at 0, and its a-posteriori residual."""
    _check_hermitian(g.entries)
    if g.size == 0:
        raise InvalidArgumentError("lower Riesz bound of an empty block is undefined")
    lam, residual, _ = _eigenpair(g.entries)
    return max(0.0, lam), residual


def gram_eigenvalues(g: GramMatrix) -> np.ndarray:
    """All eigenvalues in ascending order."""
    _check_hermitian(g.entries)
    return np.linalg.eigvalsh(g.entries)


@dataclass
class MassSequence:
    """a(lambda) = |c(lambda)|^2, or an explicit symmetric assignment."""

    max_freq: int
    table: Optional[FourierTable] = None
    dense: Optional[np.ndarray] = None
    _total: Optional[float] = field(default=None, repr=False)

    @classmethod
    def from_mapping(cls, values: Mapping[Tuple[int, int], float], max_freq: int) -> "MassSequence":
        """Explicit masses; each lambda also defines -lambda, and both must agree."""
        dense = np.zeros((2 * max_freq + 1, 2 * max_freq + 1), dtype=np.float64)
        seen: Dict[Tuple[int, int], float] = {}
        for (a, b), value in values.items():
            if max(abs(a), abs(b)) > max_freq:
                raise InvalidArgumentError(f"mass at ({a},{b}) is outside range {max_freq}")
            if value < 0:
                raise InvalidArgumentError(f"mass at ({a},{b}) is negative")
            for key in ((a, b), (-a, -b)):
                if key in seen and seen[key] != value:
                    raise InvalidArgumentError(f"asymmetric masses at +-({a},{b})")
                seen[key] = float(value)
                dense[key[0] + max_freq, key[1] + max_freq] = value
        return cls(max_freq=max_freq, dense=dense)

    def values(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.size and max(int(np.abs(a).max()), int(np.abs(b).max())) > self.max_freq:
            raise InvalidArgumentError(f"frequency outside the mass range |lambda|_inf <= {self.max_freq}")
        if self.dense is not None:
            return self.dense[a + self.max_freq, b + self.max_freq]
        # Evaluate at the lexicographically larger of +-lambda so a(-lambda) = a(lambda) exactly
        flip = (a < 0) | ((a == 0) & (b < 0))
        ca = np.where(flip, -a, a)
        cb = np.where(flip, -b, b)
        return np.abs(self.table.values(ca, cb)) ** 2

    def value(self, lam: LatticeVector) -> float:
        return float(self.values(np.array([lam.a]), np.array([lam.b]))[0])

    def total(self) -> float:
        if self._total is None:
            self._total = float(np.sum(self.dense)) if self.dense is not None else self.table.parseval_mass()
        return self._total


def mass_sequence(table: FourierTable) -> MassSequence:
    """a = |c|^2 with sum a <= 1 checked."""
    seq = MassSequence(max_freq=table.max_freq, table=table)
    if seq.total() > 1.0 + config.parseval_tol:
        raise InternalConsistencyError(f"mass sequence sums to {seq.total():.12g} > 1")
    return seq


def _rank1(spec: GapSpec) -> None:
    check_gap_spec(spec)
    if spec.rank != 1:
        raise InvalidArgumentError("expected a rank 1 progression")


def block_mass(a: MassSequence, spec: GapSpec) -> float:
    """sum of a over the points of a rank 1 block."""
    _rank1(spec)
    points = gap_point_array(spec)
    return math.fsum(a.values(points[:, 0], points[:, 1]).tolist())


def prime_mass_profile(a: MassSequence, p: int) -> List[float]:
    """block_mass(B(p, k)) for k = 1..p-1."""
    return [block_mass(a, prime_slope_gap(p, k)) for k in range(1, p)]


class MassSearchResult(BaseModel):
    """First B(p, k) with mass below eps/p^2, or the per-prime minima if none."""
    found: bool
    p: Optional[int] = None
    k: Optional[int] = None
    mass: Optional[float] = None
    threshold: Optional[float] = None
    minima: Dict[int, float] = Field(default_factory=dict)


def _check_primes(primes: Sequence[int]) -> None:
    for p in primes:
        if not is_prime(p):
            raise InvalidArgumentError(f"{p} is not prime")
    if any(b <= a for a, b in zip(primes, primes[1:])):
        raise InvalidArgumentError(f"primes must be strictly ascending, got {list(primes)}")


def find_small_mass_ap(a: MassSequence, eps: float, primes: Sequence[int]) -> MassSearchResult:
    """Scan (p, k) in ascending order for block_mass(B(p, k)) < eps / p^2."""
    if eps <= 0:
        raise InvalidArgumentError(f"eps must be positive, got {eps}")
    _check_primes(primes)

    minima: Dict[int, float] = {}
    for p in primes:
        threshold = eps / (p * p)
        masses = prime_mass_profile(a, p)
        for k, mass in enumerate(masses, start=1):
            if mass < threshold:
                logger.info(f"Small-mass progression B({p},{k}): mass {mass:.3g} < {threshold:.3g}")
                return MassSearchResult(found=True, p=p, k=k, mass=mass, threshold=threshold, minima=minima)
        minima[p] = min(masses)
        logger.debug(f"No small-mass progression for p={p}: min mass {minima[p]:.3g} >= {threshold:.3g}")

    logger.warning(f"Small-mass search exhausted primes {list(primes)}")
    return MassSearchResult(found=False, minima=minima)


def difference_mass(a: MassSequence, spec: GapSpec) -> float:
    """sum over ordered pairs of distinct points of a(lambda - mu), via 2 sum_j (d - j) a(j w)."""
    _rank1(spec)
    d, w = spec.d1, spec.w1
    if d == 1:
        return 0.0
    j = np.arange(1, d, dtype=np.int64)
    masses = a.values(j * w.a, j * w.b).tolist()
    total = sum(((d - jj) * Fraction(m) for jj, m in zip(j.tolist(), masses)), Fraction(0))
    return float(2 * total)


def difference_mass_bruteforce(a: MassSequence, points: Sequence[LatticeVector]) -> float:
    """Double sum of a(lambda - mu) over distinct ordered pairs."""
    total = Fraction(0)
    for i, lam in enumerate(points):
        for j, mu in enumerate(points):
            if i != j:
                total += Fraction(a.value(LatticeVector(a=lam.a - mu.a, b=lam.b - mu.b)))
    return float(total)


class RieszCertificate(BaseModel):
    """Certified lower Riesz bound of a finite block."""
    block: Union[GapSpec, List[LatticeVector]]
    gamma: float = Field(ge=0.0)
    method: CertificateMethod
    residual: float
    fourier_error: float
    lambda_min: float
    hs_bound: float
    difference_mass: float
    target: float
    success: bool

    @field_serializer("block")
    def _serialize_block(self, block: Union[GapSpec, List[LatticeVector]]) -> Any:
        if isinstance(block, GapSpec):
            return block.to_dict()
        return [[v.a, v.b] for v in block]

    @field_validator("block", mode="before")
    @classmethod
    def _parse_block(cls, value: Any) -> Any:
        if isinstance(value, dict) and "d1" in value:
            return GapSpec.from_dict(value)
        if isinstance(value, list) and value and isinstance(value[0], (list, tuple)):
            return [LatticeVector.of(*v) for v in value]
        return value


def _block_points(block: Block) -> List[LatticeVector]:
    return gap_points(block) if isinstance(block, GapSpec) else list(block)


def certify_block(table: FourierTable, block: Block, target_gamma: float) -> RieszCertificate:
    """Best of the eigenvalue and Hilbert-Schmidt lower bounds, compared with target_gamma."""
    points = _block_points(block)
    if not points:
        raise InvalidArgumentError("cannot certify an empty block")
    _check_distinct(_as_array(points), "block")
    g = gram(table, points)
    lam, residual = lower_riesz_bound(g)

    if isinstance(block, GapSpec) and block.rank == 1:
        dm = difference_mass(mass_sequence(table), block)
    else:
        off = g.entries - np.diag(np.diag(g.entries))
        dm = math.fsum((np.abs(off) ** 2).ravel().tolist())
    hs = table.set_measure - math.sqrt(dm) - _HS_SLACK
    if hs > lam + 1e-9:
        raise InternalConsistencyError(f"Hilbert-Schmidt bound {hs:.12g} exceeds lambda_min {lam:.12g}")

    eig = lam - residual
    method = CertificateMethod.EIGEN if eig >= hs else CertificateMethod.HILBERT_SCHMIDT
    gamma = max(0.0, eig, hs)
    stored = block if isinstance(block, GapSpec) else points
    cert = RieszCertificate(
        block=stored,
        gamma=gamma,
        method=method,
        residual=residual if method == CertificateMethod.EIGEN else _HS_SLACK,
        fourier_error=table.error_bound,
        lambda_min=lam,
        hs_bound=hs,
        difference_mass=dm,
        target=target_gamma,
        success=gamma >= target_gamma,
    )
    logger.info(
        f"Certified block of {len(points)} frequencies: gamma={gamma:.6g} ({method.value}), "
        f"target={target_gamma:.6g}, success={cert.success}"
    )
    return cert


class TranslationResult(BaseModel):
    """Outcome of the translation search gluing two blocks."""
    found: bool
    M: Optional[LatticeVector] = None
    lambda_min: Optional[float] = None
    best_M: Optional[LatticeVector] = None
    best_lambda_min: Optional[float] = None
    examined: int = 0
    skipped: int = 0
    radius: int = 0


def _shell(inner: int, outer: int) -> List[Tuple[int, int]]:
    """Lattice points with inner < |M|_inf <= outer ordered by (|M|_inf, a, b)."""
    coords = range(-outer, outer + 1)
    cells = [(a, b) for a in coords for b in coords if inner < max(abs(a), abs(b)) <= outer]
    return sorted(cells, key=lambda m: (max(abs(m[0]), abs(m[1])), m[0], m[1]))


def _shells(initial: int, limit: int) -> Iterator[Tuple[int, List[Tuple[int, int]]]]:
    radius = min(initial, limit)
    yield radius, [(0, 0)] + _shell(0, radius)
    while radius < limit:
        outer = min(2 * radius, limit)
        yield outer, _shell(radius, outer)
        radius = outer


def find_translation(
    table: FourierTable,
    block1: Sequence[LatticeVector],
    block2: Sequence[LatticeVector],
    gamma_prime: float,
) -> TranslationResult:
    """First M (in (|M|_inf, a, b) order) with lambda_min(block1 + (M + block2)) >= gamma_prime."""
    if gamma_prime >= table.set_measure:
        raise InvalidArgumentError(
            f"gamma' = {gamma_prime} is not below c(0) = {table.set_measure}; no block can reach it"
        )
    left = _as_array(block1)
    right = _as_array(block2)
    _check_distinct(left, "block1")
    _check_distinct(right, "block2")

    g11 = gram(table, block1).entries
    g22 = gram(table, block2).entries
    for label, entries in (("block1", g11), ("block2", g22)):
        lam = float(np.linalg.eigvalsh(entries)[0])
        if gamma_prime >= lam:
            logger.warning(f"gamma' = {gamma_prime:.6g} is not below lambda_min of {label} ({lam:.6g})")

    occupied = {tuple(p) for p in left.tolist()}
    F = table.max_freq

    def admissible(m: Tuple[int, int]) -> bool:
        shifted = right + np.array(m, dtype=np.int64)
        if any(tuple(p) in occupied for p in shifted.tolist()):
            return False
        diff = left[:, None, :] - shifted[None, :, :]
        return bool(np.abs(diff).max() <= F)

    def evaluate(m: Tuple[int, int]) -> Tuple[float, float]:
        g12 = _cross_block(table, left, right + np.array(m, dtype=np.int64))
        full = np.block([[g11, g12], [g12.conj().T, g22]])
        lam, residual, _ = _eigenpair(full)
        return lam, residual

    result = TranslationResult(found=False)
    best: Optional[Tuple[float, Tuple[int, int]]] = None
    for radius, candidates in _shells(config.translation_initial_radius, config.translation_max_radius):
        result.radius = radius
        usable = [m for m in candidates if admissible(m)]
        result.skipped += len(candidates) - len(usable)
        for batch in chunk_ranges(len(usable), config.translation_batch):
            ms = usable[batch.start:batch.stop]
            # Candidates evaluate concurrently; acceptance follows candidate order
            for m, (lam, residual) in zip(ms, worker_pool.map(evaluate, ms)):
                result.examined += 1
                if best is None or lam > best[0]:
                    best = (lam, m)
                logger.debug(f"Translation {m}: lambda_min={lam:.6g}")
                if lam - residual >= gamma_prime:
                    result.found = True
                    result.M = LatticeVector.of(*m)
                    result.lambda_min = lam
                    result.best_M, result.best_lambda_min = result.M, lam
                    logger.info(f"Translation M={m} accepted: lambda_min={lam:.6g} >= {gamma_prime:.6g}")
                    return result

    if best is not None:
        result.best_M = LatticeVector.of(*best[1])
        result.best_lambda_min = best[0]
    logger.warning(
        f"Translation search exhausted radius {result.radius}: examined {result.examined}, "
        f"best lambda_min={result.best_lambda_min}"
    )
    return result


class AssemblySection(BaseModel):
    """One glued block M + B(p, k) of Lambda."""
    p: int
    k: int
    M: LatticeVector
    mass: float
    certificate: RieszCertificate


class AssemblyResult(BaseModel):
    """Sections of the assembled finite Lambda_0 and its global certificate."""
    sections: List[AssemblySection] = Field(default_factory=list)
    frequencies: List[LatticeVector] = Field(default_factory=list)
    global_certificate: Optional[RieszCertificate] = None
    set_measure: float
    gamma: float
    target: float
    partial: bool = False
    empty: bool = False
    notes: List[str] = Field(default_factory=list)

    @property
    def global_gamma(self) -> Optional[float]:
        return None if self.global_certificate is None else self.global_certificate.gamma


def assemble_lambda(table: FourierTable, primes: Sequence[int], gamma_fraction: float) -> AssemblyResult:
    """Greedy union of certified prime-slope blocks, each glued by a translation."""
    if not 0.0 < gamma_fraction < 1.0:
        raise InvalidArgumentError(f"gamma_fraction must lie in (0,1), got {gamma_fraction}")
    _check_primes(primes)
    measure = table.set_measure
    if measure <= 0:
        raise InvalidArgumentError("the set has zero measure; no lower Riesz bound exists")

    gamma = measure / 2.0
    eps = gamma * gamma
    target = gamma_fraction * gamma
    result = AssemblyResult(set_measure=measure, gamma=gamma, target=target)
    if not primes:
        result.empty = True
        result.notes.append("empty prime budget: no frequencies assembled")
        logger.warning("Assembly called with an empty prime budget")
        return result

    a = mass_sequence(table)
    union: List[LatticeVector] = []
    for p in primes:
        search = find_small_mass_ap(a, eps, [p])
        if not search.found:
            result.partial = True
            result.notes.append(f"p={p}: no B(p,k) below mass {eps / (p * p):.6g} (min {search.minima[p]:.6g})")
            continue

        spec = prime_slope_gap(p, search.k)
        cert = certify_block(table, spec, gamma)
        if not cert.success:
            result.partial = True
            result.notes.append(f"p={p}: B({p},{search.k}) certified only gamma={cert.gamma:.6g} < {gamma:.6g}")
            continue

        points = gap_points(spec)
        if union:
            glue = find_translation(table, union, points, target)
            if not glue.found:
                result.partial = True
                result.notes.append(
                    f"p={p}: no translation within radius {glue.radius} "
                    f"(best lambda_min={glue.best_lambda_min})"
                )
                continue
            M = glue.M
        else:
            M = LatticeVector(a=0, b=0)

        union.extend(point + M for point in points)
        result.sections.append(
            AssemblySection(p=p, k=search.k, M=M, mass=search.mass, certificate=cert)
        )

    result.frequencies = union
    if not union:
        result.empty = True
        result.notes.append("no block could be certified")
        return result

    result.global_certificate = certify_block(table, union, target)
    if not result.global_certificate.success:
        raise InternalConsistencyError(
            f"assembled Lambda_0 certifies gamma={result.global_certificate.gamma:.6g} below target {target:.6g}"
        )
    logger.info(
        f"Assembled {len(result.sections)} sections, {len(union)} frequencies: "
        f"gamma={result.global_certificate.gamma:.6g} (target {target:.6g})"
    )
    return result


def spot_check_subblocks(
    table: FourierTable,
    frequencies: Sequence[LatticeVector],
    count: int,
    size: int,
    seed: int = 0,
) -> List[float]:
    """lambda_min of random sub-blocks of the given frequencies."""
    if not 1 <= size <= len(frequencies):
        raise InvalidArgumentError(f"sub-block size must lie in [1, {len(frequencies)}], got {size}")
    if count < 1:
        raise InvalidArgumentError(f"count must be >= 1, got {count}")
    full = gram(table, frequencies).entries
    rng = np.random.default_rng(seed)
    picks = [np.sort(rng.choice(len(frequencies), size=size, replace=False)) for _ in range(count)]

    def smallest(idx: np.ndarray) -> float:
        return float(np.linalg.eigvalsh(full[np.ix_(idx, idx)])[0])

    return worker_pool.map(smallest, picks)
