"""Core types and enums shared across the toolkit."""

import math
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator


class MeasureMethod(str, Enum):
    """Measure estimation method."""
    GRID = "grid"
    MONTECARLO = "montecarlo"


class DecayMode(str, Enum):
    """Step construction used by the decay experiment."""
    RANK1 = "rank1"
    RANK2 = "rank2"
    FIXED_GENERATOR = "fixed_generator"


class CertificateMethod(str, Enum):
    """Route that produced a lower Riesz bound."""
    EIGEN = "eigen"
    HILBERT_SCHMIDT = "hilbert_schmidt"


class QuadratureMethod(str, Enum):
    """How a polynomial norm over a set was integrated."""
    GRID = "grid"
    FIBER = "fiber"


# Data Models
class LatticeVector(BaseModel):
    """Integer frequency vector in Z^2."""
    model_config = ConfigDict(frozen=True)

    a: int
    b: int

    @classmethod
    def of(cls, a: int, b: int) -> "LatticeVector":
        return cls(a=int(a), b=int(b))

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    @property
    def norm2(self) -> int:
        return self.a * self.a + self.b * self.b

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm2)

    @property
    def sup_norm(self) -> int:
        return max(abs(self.a), abs(self.b))

    def as_tuple(self) -> Tuple[int, int]:
        return (self.a, self.b)

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector(a=self.a + other.a, b=self.b + other.b)

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(a=-self.a, b=-self.b)

    def scale(self, k: int) -> "LatticeVector":
        return LatticeVector(a=k * self.a, b=k * self.b)

    def cross(self, other: "LatticeVector") -> int:
        """Determinant of the 2x2 matrix with rows self, other."""
        return self.a * other.b - self.b * other.a


ZERO = LatticeVector(a=0, b=0)


class GapSpec(BaseModel):
    """Rank 1 or rank 2 generalized arithmetic progression, optionally translated."""
    model_config = ConfigDict(frozen=True)

    w1: LatticeVector
    w2: Optional[LatticeVector] = None
    d1: int = Field(ge=1)
    d2: int = Field(default=1, ge=1)
    translation: LatticeVector = ZERO
    index_origin: Literal[0, 1] = 0

    @property
    def rank(self) -> int:
        return 1 if self.w2 is None else 2

    @property
    def size(self) -> int:
        return self.d1 * self.d2

    def to_dict(self) -> Dict[str, Any]:
        return {
            "w1": [self.w1.a, self.w1.b],
            "w2": None if self.w2 is None else [self.w2.a, self.w2.b],
            "d1": self.d1,
            "d2": self.d2,
            "translation": [self.translation.a, self.translation.b],
            "index_origin": self.index_origin,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GapSpec":
        w2 = data.get("w2")
        translation = data.get("translation") or [0, 0]
        return cls(
            w1=LatticeVector.of(*data["w1"]),
            w2=None if w2 is None else LatticeVector.of(*w2),
            d1=int(data["d1"]),
            d2=int(data.get("d2", 1)),
            translation=LatticeVector.of(*translation),
            index_origin=int(data.get("index_origin", 0)),
        )


class TorusPoint(BaseModel):
    """Point of the normalized torus [0,1)^2."""
    model_config = ConfigDict(frozen=True)

    x: float
    y: float

    @field_validator("x", "y")
    @classmethod
    def _reduce(cls, value: float) -> float:
        reduced = value % 1.0
        # value % 1.0 rounds tiny negatives up to exactly 1.0
        return 0.0 if reduced >= 1.0 else reduced


class ErrorInfo(BaseModel):
    """Error information surfaced in run reports."""
    type: str
    message: str
    code: str


def vectors(pairs: List[Tuple[int, int]]) -> List[LatticeVector]:
    """Build lattice vectors from integer pairs."""
    return [LatticeVector.of(a, b) for a, b in pairs]
