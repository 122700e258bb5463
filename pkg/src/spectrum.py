"""Fourier-side numerics: rasters, indicator coefficients, GAP polynomial norms."""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel
from scipy import integrate

from src.config import config
from src.enums import DecayMode, GapSpec, LatticeVector, QuadratureMethod
from src.errors import InternalConsistencyError, InvalidArgumentError, ResourceLimitError
from src.lattice import check_gap_spec, gap_point_array, generator_decompose, unimodular_completion
from src.setbuilder import GRID_ROTATION, BadSetDescriptor, contains_mesh, raster_error
from src.utils.logger import get_logger
from src.worker_pool import chunk_ranges, worker_pool

logger = get_logger(__name__)

_ROW_CHUNK = 64
# Upper bound on fibers x arcs held in memory at once
_FIBER_BLOCK = 1 << 22
# Aliasing margin: resolution must exceed this multiple of the largest frequency
ALIAS_FACTOR = 8

Rectangle = Tuple[float, float, float, float]


def _next_power_of_two(value: int) -> int:
    return 1 << max(0, int(value) - 1).bit_length()


def _check_resolution(n: int) -> None:
    if n < 64 or n & (n - 1):
        raise InvalidArgumentError(f"grid resolution must be a power of two >= 64, got {n}")
    if n > config.grid_cap:
        raise ResourceLimitError(f"grid resolution {n} exceeds the configured cap {config.grid_cap}")


@dataclass
class TorusGrid:
    """n x n occupancy raster; axis 0 is x, axis 1 is y, samples at ((i, j) + offset)/n per axis."""

    n: int
    cells: np.ndarray
    offset: Tuple[float, float] = (0.5, 0.5)
    error: float = 0.0

    @property
    def occupancy(self) -> float:
        return np.count_nonzero(self.cells) / (self.n * self.n)

    def centers(self, axis: int = 0) -> np.ndarray:
        return (np.arange(self.n) + self.offset[axis]) / self.n


def rasterize(desc: BadSetDescriptor, n: int) -> TorusGrid:
    """Sample the indicator of S on the rotated n x n grid ((i, j) + GRID_ROTATION)/n."""
    _check_resolution(n)
    xs = (np.arange(n) + GRID_ROTATION[0]) / n
    ys = (np.arange(n) + GRID_ROTATION[1]) / n

    def rows(block: range) -> np.ndarray:
        return contains_mesh(desc, xs[block.start:block.stop], ys)

    cells = np.vstack(worker_pool.map(rows, chunk_ranges(n, _ROW_CHUNK)))
    grid = TorusGrid(n=n, cells=cells, offset=GRID_ROTATION, error=raster_error(desc, n))
    logger.info(f"Rasterized set at n={n}: occupancy {grid.occupancy:.6f}")
    return grid


def _check_rectangle(a1: float, b1: float, a2: float, b2: float) -> None:
    if not (0.0 <= a1 < b1 <= 1.0 and 0.0 <= a2 < b2 <= 1.0):
        raise InvalidArgumentError(f"rectangle bounds must satisfy 0 <= a < b <= 1, got {(a1, b1, a2, b2)}")


def rasterize_rectangle(a1: float, b1: float, a2: float, b2: float, n: int) -> TorusGrid:
    """Raster of [a1,b1) x [a2,b2)."""
    _check_rectangle(a1, b1, a2, b2)
    _check_resolution(n)
    xs = (np.arange(n) + 0.5) / n
    cells = ((xs >= a1) & (xs < b1))[:, None] & ((xs >= a2) & (xs < b2))[None, :]
    perimeter = 2.0 * ((b1 - a1) + (b2 - a2))
    return TorusGrid(n=n, cells=cells, error=min(1.0, perimeter / n))


def _phi(k: np.ndarray, a: float, b: float) -> np.ndarray:
    """Fourier coefficient of the interval [a, b) at integer frequencies k."""
    k = np.asarray(k, dtype=np.int64)
    out = np.full(k.shape, complex(b - a), dtype=np.complex128)
    nz = k != 0
    kk = k[nz].astype(np.float64)
    # Reduce phases mod 1 so that a = 0, b = 1 gives exact zeros
    ea = np.exp(-2j * np.pi * np.mod(kk * a, 1.0))
    eb = np.exp(-2j * np.pi * np.mod(kk * b, 1.0))
    out[nz] = (ea - eb) / (2j * np.pi * kk)
    return out


def rect_fourier(a1: float, b1: float, a2: float, b2: float) -> Callable[[LatticeVector], complex]:
    """Exact coefficient function of the indicator of [a1,b1] x [a2,b2]."""
    _check_rectangle(a1, b1, a2, b2)

    def coefficient(lam: LatticeVector) -> complex:
        return complex(_phi(np.array([lam.a]), a1, b1)[0] * _phi(np.array([lam.b]), a2, b2)[0])

    return coefficient


@dataclass
class FourierTable:
    """Coefficients c(lambda) of a set indicator for |lambda|_inf <= max_freq.

    Backed either by a dense (2F+1) x (2F+1) array indexed [a + F, b + F]
    (raster tables) or by the rectangle closed form (exact tables).
    """

    max_freq: int
    set_measure: float
    error_bound: float = 0.0
    dense: Optional[np.ndarray] = None
    rectangle: Optional[Rectangle] = None
    _cache: Dict[str, Any] = field(default_factory=dict, repr=False, compare=False)

    def in_range(self, a: int, b: int) -> bool:
        return max(abs(a), abs(b)) <= self.max_freq

    def values(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Coefficients at the integer frequency arrays (a, b); both must be in range."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.size and max(int(np.abs(a).max()), int(np.abs(b).max())) > self.max_freq:
            raise InvalidArgumentError(f"frequency outside the table range |lambda|_inf <= {self.max_freq}")
        if self.dense is not None:
            return self.dense[a + self.max_freq, b + self.max_freq]
        a1, b1, a2, b2 = self.rectangle
        out = _phi(a, a1, b1) * _phi(b, a2, b2)
        out[np.abs(out) <= config.coefficient_floor] = 0.0
        return out

    def coefficient(self, lam: LatticeVector) -> complex:
        if not self.in_range(lam.a, lam.b):
            raise InvalidArgumentError(
                f"frequency ({lam.a},{lam.b}) outside the table range |lambda|_inf <= {self.max_freq}"
            )
        return complex(self.values(np.array([lam.a]), np.array([lam.b]))[0])

    def parseval_mass(self) -> float:
        """sum of |c(lambda)|^2 over the stored range."""
        if "parseval" not in self._cache:
            if self.dense is not None:
                mass = float(np.sum(np.abs(self.dense) ** 2))
            else:
                a1, b1, a2, b2 = self.rectangle
                k = np.arange(-self.max_freq, self.max_freq + 1)
                mass = float(np.sum(np.abs(_phi(k, a1, b1)) ** 2) * np.sum(np.abs(_phi(k, a2, b2)) ** 2))
            self._cache["parseval"] = mass
        return self._cache["parseval"]


def _check_parseval(table: FourierTable) -> None:
    mass = table.parseval_mass()
    if mass > table.set_measure + config.parseval_tol:
        raise InternalConsistencyError(
            f"partial Parseval sum {mass:.12g} exceeds the set measure {table.set_measure:.12g}"
        )


def fourier_coefficients(grid: TorusGrid, max_freq: int) -> FourierTable:
    """Discrete indicator coefficients of a raster for |lambda|_inf <= max_freq."""
    if max_freq < 1:
        raise InvalidArgumentError(f"max_freq must be >= 1, got {max_freq}")
    if 2 * max_freq >= grid.n:
        raise InvalidArgumentError(f"max_freq {max_freq} too large for grid n={grid.n}: need 2F < n")

    n = grid.n
    spectrum = np.fft.fft2(grid.cells.astype(np.float64)) / (n * n)
    k = np.arange(-max_freq, max_freq + 1)
    px = np.exp(-2j * np.pi * k * grid.offset[0] / n)
    py = np.exp(-2j * np.pi * k * grid.offset[1] / n)
    idx = np.mod(k, n)
    dense = spectrum[np.ix_(idx, idx)] * px[:, None] * py[None, :]
    dense = (dense + np.conj(dense[::-1, ::-1])) / 2.0
    dense[np.abs(dense) <= config.coefficient_floor] = 0.0

    table = FourierTable(
        max_freq=max_freq,
        set_measure=float(dense[max_freq, max_freq].real),
        error_bound=grid.error,
        dense=dense,
    )
    _check_parseval(table)
    logger.info(f"Fourier table F={max_freq} from n={n}: measure {table.set_measure:.6f}")
    return table


def rectangle_table(a1: float, b1: float, a2: float, b2: float, max_freq: Optional[int] = None) -> FourierTable:
    """Exact table of the rectangle [a1,b1] x [a2,b2]."""
    _check_rectangle(a1, b1, a2, b2)
    max_freq = max_freq or config.rectangle_max_freq
    if max_freq < 1:
        raise InvalidArgumentError(f"max_freq must be >= 1, got {max_freq}")
    table = FourierTable(
        max_freq=max_freq,
        set_measure=(b1 - a1) * (b2 - a2),
        rectangle=(a1, b1, a2, b2),
    )
    _check_parseval(table)
    return table


def table_to_dict(table: FourierTable) -> Dict[str, Any]:
    """JSON form; raster tables keep one of each +-lambda with |c| above the floor."""
    data: Dict[str, Any] = {
        "max_freq": table.max_freq,
        "measure": table.set_measure,
        "error_bound": table.error_bound,
    }
    if table.rectangle is not None:
        data["rectangle"] = list(table.rectangle)
        return data

    F = table.max_freq
    coefficients = []
    for i, j in zip(*np.nonzero(table.dense)):
        a, b = int(i) - F, int(j) - F
        if a > 0 or (a == 0 and b >= 0):
            value = table.dense[i, j]
            coefficients.append({"lambda": [a, b], "re": float(value.real), "im": float(value.imag)})
    data["coefficients"] = coefficients
    return data


def table_from_dict(data: Mapping[str, Any]) -> FourierTable:
    """Inverse of table_to_dict."""
    F = int(data["max_freq"])
    if data.get("rectangle") is not None:
        a1, b1, a2, b2 = (float(v) for v in data["rectangle"])
        return FourierTable(
            max_freq=F,
            set_measure=float(data["measure"]),
            error_bound=float(data.get("error_bound", 0.0)),
            rectangle=(a1, b1, a2, b2),
        )

    dense = np.zeros((2 * F + 1, 2 * F + 1), dtype=np.complex128)
    for item in data["coefficients"]:
        a, b = item["lambda"]
        value = complex(item["re"], item["im"])
        dense[a + F, b + F] = value
        dense[F - a, F - b] = value.conjugate()
    return FourierTable(
        max_freq=F,
        set_measure=float(data["measure"]),
        error_bound=float(data.get("error_bound", 0.0)),
        dense=dense,
    )


def _reduce(s: np.ndarray) -> np.ndarray:
    return s - np.floor(s + 0.5)


def _geometric(d: int, s: np.ndarray) -> np.ndarray:
    """sum_{k<d} e^{2 pi i k s} in closed form."""
    s = _reduce(s)
    den = np.sin(np.pi * s)
    safe = np.abs(den) > 1e-300
    ratio = np.where(safe, np.sin(np.pi * d * s) / np.where(safe, den, 1.0), float(d))
    return np.exp(1j * np.pi * (d - 1) * s) * ratio


def _fejer(d: int, s: np.ndarray) -> np.ndarray:
    """|sum_{k<d} e^{2 pi i k s}|^2 = sin^2(pi d s) / sin^2(pi s)."""
    s = _reduce(s)
    den = np.sin(np.pi * s) ** 2
    safe = den > 1e-300
    return np.where(safe, np.sin(np.pi * d * s) ** 2 / np.where(safe, den, 1.0), float(d * d))


def gap_polynomial(spec: GapSpec, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """P(t) = (1/sqrt(d1 d2)) sum over the GAP points of e^{2 pi i <lambda, t>} at points (xs, ys)."""
    check_gap_spec(spec)
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    o = spec.index_origin
    w1, t0 = spec.w1, spec.translation
    start = np.array([t0.a + o * w1.a, t0.b + o * w1.b], dtype=np.float64)
    value = _geometric(spec.d1, w1.a * xs + w1.b * ys)
    if spec.w2 is not None:
        w2 = spec.w2
        start += o * np.array([w2.a, w2.b], dtype=np.float64)
        value = value * _geometric(spec.d2, w2.a * xs + w2.b * ys)
    carrier = np.exp(2j * np.pi * _reduce(start[0] * xs + start[1] * ys))
    return carrier * value / math.sqrt(spec.size)


def gap_polynomial_abs2(spec: GapSpec, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """|P|^2; independent of the translation."""
    value = _fejer(spec.d1, spec.w1.a * xs + spec.w1.b * ys)
    if spec.w2 is not None:
        value = value * _fejer(spec.d2, spec.w2.a * xs + spec.w2.b * ys)
    return value / spec.size


class PolynomialNormReport(BaseModel):
    """Integral of |P|^2 over a set, with the decay bound it is compared against."""
    spec: GapSpec
    coefficient_rule: str = "flat"
    value: float
    bound: Optional[float] = None
    ratio: Optional[float] = None
    error_bound: float
    method: QuadratureMethod
    resolution: int


def _untranslated_reach(spec: GapSpec) -> int:
    points = gap_point_array(spec.model_copy(update={"translation": LatticeVector(a=0, b=0)}))
    return int(np.abs(points).max())


def _grid_norm(grid: TorusGrid, spec: GapSpec) -> Tuple[float, float]:
    n = grid.n
    xs, ys = grid.centers(0), grid.centers(1)
    h2 = 1.0 / (n * n)

    def block(rows: range) -> Tuple[float, float]:
        ext = np.arange(rows.start, rows.stop + 1) % n
        occ = grid.cells[ext]
        f = gap_polynomial_abs2(spec, xs[ext][:, None], ys[None, :])
        total = float(np.sum(f[:-1][occ[:-1]]))
        # Boundary pairs: y-neighbors inside the block, x-neighbors to the next row
        fy = np.maximum(f[:-1], np.roll(f[:-1], -1, axis=1))
        dy = occ[:-1] != np.roll(occ[:-1], -1, axis=1)
        fx = np.maximum(f[:-1], f[1:])
        dx = occ[:-1] != occ[1:]
        edge = float(np.sum(fy[dy]) + np.sum(fx[dx]))
        return total, edge

    parts = worker_pool.map(block, chunk_ranges(n, _ROW_CHUNK))
    value = math.fsum(p[0] for p in parts) * h2
    error = math.fsum(p[1] for p in parts) * h2
    return value, error


def _fiber_measure(desc: BadSetDescriptor, v: LatticeVector, xi: LatticeVector, us: np.ndarray) -> np.ndarray:
    """Length of {r : A^{-1}(u, r) in S} for each u, where A has rows v and xi."""
    blocked = np.zeros(us.shape, dtype=bool)
    centers: List[np.ndarray] = []
    halves: List[float] = []
    for a, b, r in desc.distinct_strips():
        w = LatticeVector(a=a, b=b)
        p = w.cross(xi)
        q = v.cross(w)
        if q == 0:
            blocked |= np.abs(_reduce(p * us)) < r
            continue
        m = np.arange(abs(q), dtype=np.float64)
        centers.append(np.mod((m[None, :] - p * us[:, None]) / q, 1.0))
        halves.extend([r / abs(q)] * abs(q))

    if not centers:
        return np.where(blocked, 0.0, 1.0)

    c = np.hstack(centers)
    h = np.asarray(halves)
    start = c - h
    end = c + h
    # Fold each arc onto [0, 1] as two clipped intervals, then merge on the line
    starts = np.hstack([np.clip(start, 0.0, 1.0), np.clip(start + 1.0, 0.0, 1.0), np.clip(start - 1.0, 0.0, 1.0)])
    ends = np.hstack([np.clip(end, 0.0, 1.0), np.clip(end + 1.0, 0.0, 1.0), np.clip(end - 1.0, 0.0, 1.0)])
    order = np.argsort(starts, axis=1, kind="stable")
    starts = np.take_along_axis(starts, order, axis=1)
    ends = np.take_along_axis(ends, order, axis=1)
    reach = np.maximum.accumulate(ends, axis=1)
    prev = np.hstack([np.zeros((len(us), 1)), reach[:, :-1]])
    covered = np.sum(np.maximum(0.0, ends - np.maximum(starts, prev)), axis=1)
    return np.where(blocked, 0.0, np.clip(1.0 - covered, 0.0, 1.0))


def _fiber_norm(desc: BadSetDescriptor, spec: GapSpec) -> Tuple[float, float, int]:
    ell, v = generator_decompose(spec.w1)
    xi = unimodular_completion(v)
    K = spec.d1
    n_u = _next_power_of_two(max(64, ALIAS_FACTOR * ell * K))
    if n_u > config.fiber_cap:
        raise ResourceLimitError(f"fiber quadrature needs {n_u} fibers, above the configured cap {config.fiber_cap}")

    arcs = max(1, sum(abs(v.cross(LatticeVector(a=a, b=b))) for a, b, _ in desc.distinct_strips()))
    chunk = max(1, _FIBER_BLOCK // (3 * arcs))
    us = (np.arange(n_u) + 0.5) / n_u

    def block(rows: range) -> np.ndarray:
        return _fiber_measure(desc, v, xi, us[rows.start:rows.stop])

    g = np.concatenate(worker_pool.map(block, chunk_ranges(n_u, chunk)))
    f = _fejer(K, ell * us) / K
    value = math.fsum(g * f) / n_u
    g_next = np.roll(g, -1)
    f_pair = np.maximum(f, np.roll(f, -1))
    error = math.fsum(np.abs(g_next - g) * f_pair) / n_u
    return value, error, n_u


def _strip_rho(desc: BadSetDescriptor, w: LatticeVector) -> Optional[float]:
    return desc.rho_cache.get(w.as_tuple())


def _decay_bound(desc: Optional[BadSetDescriptor], spec: GapSpec, constant: float) -> Optional[float]:
    if desc is None:
        return None
    rho1 = _strip_rho(desc, spec.w1)
    if spec.w2 is None:
        return None if not rho1 else constant / (spec.d1 * rho1)
    rho2 = _strip_rho(desc, spec.w2)
    if not rho1 or not rho2:
        return None
    return constant / (spec.d1 * spec.d2 * rho1 * rho2)


def gap_polynomial_norm(
    source: Union[TorusGrid, BadSetDescriptor],
    spec: GapSpec,
    descriptor: Optional[BadSetDescriptor] = None,
    n: Optional[int] = None,
    constant: Optional[float] = None,
) -> PolynomialNormReport:
    """integral over the set of |P|^2 for the flat unit-l2 polynomial on spec's points.

    A raster source is integrated cell by cell. A descriptor source is
    rasterized for rank 2 spectra; rank 1 spectra use exact fiber measures
    after the unimodular change of variables along the step's generator.
    """
    check_gap_spec(spec)
    constant = config.report_constant if constant is None else constant
    reach = _untranslated_reach(spec)

    if isinstance(source, TorusGrid):
        if source.n < ALIAS_FACTOR * reach:
            raise InvalidArgumentError(
                f"grid n={source.n} aliases the spectrum: need n >= {ALIAS_FACTOR} * {reach}"
            )
        value, error = _grid_norm(source, spec)
        method, resolution = QuadratureMethod.GRID, source.n
    else:
        descriptor = descriptor or source
        if spec.rank == 1:
            value, error, resolution = _fiber_norm(source, spec)
            method = QuadratureMethod.FIBER
        else:
            size = n or _next_power_of_two(max(64, ALIAS_FACTOR * reach))
            if size < ALIAS_FACTOR * reach:
                raise InvalidArgumentError(f"grid n={size} aliases the spectrum: need n >= {ALIAS_FACTOR} * {reach}")
            grid = rasterize(source, size)
            value, error = _grid_norm(grid, spec)
            error += grid.error
            method, resolution = QuadratureMethod.GRID, size

    bound = _decay_bound(descriptor, spec, constant)
    report = PolynomialNormReport(
        spec=spec,
        value=value,
        bound=bound,
        ratio=None if not bound else value / bound,
        error_bound=error,
        method=method,
        resolution=resolution,
    )
    logger.debug(f"Polynomial norm d1={spec.d1} d2={spec.d2}: {value:.6g} +- {error:.3g} ({method.value})")
    return report


def dirichlet_tail(rho_hat: float, K: int) -> float:
    """integral over {|s| > rho_hat} of |sum_{j=1..K} e^{2 pi i j s}|^2 ds."""
    if not 0.0 < rho_hat < 0.5:
        raise InvalidArgumentError(f"rho_hat must lie in (0, 1/2), got {rho_hat}")
    if K < 1:
        raise InvalidArgumentError(f"K must be >= 1, got {K}")

    def integrand(s: float) -> float:
        return (math.sin(math.pi * K * s) / math.sin(math.pi * s)) ** 2

    # Integrate between consecutive zeros j/K so every piece is a single lobe
    knots = [rho_hat] + [j / K for j in range(1, K) if rho_hat < j / K < 0.5] + [0.5]
    pieces = [
        integrate.quad(integrand, lo, hi, epsabs=1e-14, epsrel=config.quadrature_rel_tol)[0]
        for lo, hi in zip(knots[:-1], knots[1:])
    ]
    return 2.0 * math.fsum(pieces)


def dirichlet_tail_majorant(rho_hat: float) -> float:
    """(2/pi) cot(pi rho_hat): the tail with sin^2(pi K s) replaced by 1."""
    return 2.0 / (math.pi * math.tan(math.pi * rho_hat))


class DecayRow(BaseModel):
    """One size of the decay experiment."""
    N: int
    alpha: float
    report: PolynomialNormReport

    def to_row(self) -> List[Any]:
        spec = self.report.spec
        w2 = "" if spec.w2 is None else f"{spec.w2.a},{spec.w2.b}"
        bound = "" if self.report.bound is None else repr(self.report.bound)
        ratio = "" if self.report.ratio is None else repr(self.report.ratio)
        return [self.N, repr(self.alpha), f"{spec.w1.a},{spec.w1.b}", w2, repr(self.report.value), bound, ratio]


DECAY_HEADER = ["N", "alpha", "step_w1", "step_w2", "value", "bound", "ratio"]


def _decay_spec(N: int, alpha: float, mode: DecayMode, generator: Optional[LatticeVector]) -> GapSpec:
    step = int(math.floor(N ** alpha + 1e-12))
    if step < 1:
        raise InvalidArgumentError(f"step floor(N^alpha) vanishes for N={N}, alpha={alpha}")
    if mode == DecayMode.RANK1:
        return GapSpec(w1=LatticeVector(a=step, b=0), d1=N * N)
    if mode == DecayMode.RANK2:
        return GapSpec(w1=LatticeVector(a=step, b=0), w2=LatticeVector(a=0, b=step), d1=N, d2=N)
    return GapSpec(w1=generator.scale(step), d1=N)


def thm1_decay_experiment(
    desc: BadSetDescriptor,
    alpha: float,
    sizes: Sequence[int],
    mode: DecayMode,
    generator: Optional[LatticeVector] = None,
    constant: Optional[float] = None,
) -> List[DecayRow]:
    """|P|^2 mass over S for GAPs of growing size with steps of length about N^alpha."""
    mode = DecayMode(mode)
    if not 0.0 < alpha < 1.0:
        raise InvalidArgumentError(f"alpha must lie in (0, 1), got {alpha}")
    if not sizes:
        raise InvalidArgumentError("sizes must be nonempty")
    if any(n < 2 for n in sizes) or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InvalidArgumentError(f"sizes must be increasing integers >= 2, got {list(sizes)}")
    if mode == DecayMode.FIXED_GENERATOR:
        if generator is None or generator.is_zero or math.gcd(generator.a, generator.b) != 1:
            raise InvalidArgumentError("fixed_generator mode needs a coprime generator v")

    rows: List[DecayRow] = []
    for N in sizes:
        spec = _decay_spec(N, alpha, mode, generator)
        steps = [spec.w1] if spec.w2 is None else [spec.w1, spec.w2]
        for w in steps:
            if w.as_tuple() not in desc.rho_cache:
                raise InvalidArgumentError(f"step ({w.a},{w.b}) for N={N} has no strip in the set")
        report = gap_polynomial_norm(desc, spec, constant=constant)
        rows.append(DecayRow(N=N, alpha=alpha, report=report))
        logger.info(f"Decay N={N} ({mode.value}): value={report.value:.6g} bound={report.bound}")

    if not decay_is_monotone(rows):
        logger.warning(f"Decay values are not monotone: {[row.report.value for row in rows]}")
    return rows


def decay_is_monotone(rows: Sequence[DecayRow]) -> bool:
    """True when the values never increase with N."""
    values = [row.report.value for row in rows]
    return all(b <= a for a, b in zip(values, values[1:]))
