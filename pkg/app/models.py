from enum import Enum
from functools import lru_cache
from math import comb
from typing import Dict, List, Optional, Set, Tuple, Union

from pydantic import BaseModel, Field, field_validator, model_validator
from sympy import isprime
from sympy.ntheory import n_order

from app.config import settings


@lru_cache(maxsize=1024)
def validate_r(r: int) -> bool:
    """r is prime and 2 generates (Z/rZ)*, so x^r - 1 = (x + 1) * irreducible."""
    if r < 3 or not isprime(r):
        return False
    return n_order(2, r) == r - 1


class BikeParams(BaseModel, frozen=True):
    r: int
    d: int = Field(ge=1)
    t: int = Field(ge=1)
    security_label: Optional[str] = None

    @field_validator("r")
    @classmethod
    def check_modulus(cls, r: int) -> int:
        if not validate_r(r):
            raise ValueError(f"r={r} is not a prime with 2 as primitive root")
        return r

    @model_validator(mode="after")
    def check_weights(self):
        if self.d > self.r:
            raise ValueError(f"Block weight d={self.d} exceeds block size r={self.r}")
        return self


class FilterMode(str, Enum):
    PER = "per"
    CUM = "cum"


class FilterConfig(BaseModel, frozen=True):
    weights: Tuple[int, ...]
    threshold: int = Field(ge=1)
    mode: FilterMode = FilterMode.PER
    label: Optional[str] = None

    @field_validator("weights")
    @classmethod
    def check_weights(cls, weights):
        if not weights:
            raise ValueError("Weight vector is empty")
        if any(w < 0 for w in weights):
            raise ValueError(f"Weights must be nonnegative, got {weights}")
        return weights

    def weight(self, m: int) -> int:
        """w_m; vectors shorter than the histogram extend with their last entry."""
        if m < len(self.weights):
            return self.weights[m]
        return self.weights[-1]

    @classmethod
    def cycle_weights(cls, d: int, threshold: int, mode: FilterMode = FilterMode.PER):
        """w_m = C(m, 2): the number of 4-cycles a column pair of intersection m carries."""
        return cls(
            weights=tuple(comb(m, 2) for m in range(d + 1)),
            threshold=threshold,
            mode=mode,
            label=f"cycles-{mode.value}-{threshold}",
        )

    @classmethod
    def max_intersection(cls, d: int, T: int):
        """Reject any within-block multiplicity or cross intersection of T or more."""
        return cls(
            weights=tuple(int(m >= T) for m in range(d + 1)),
            threshold=1,
            mode=FilterMode.PER,
            label=f"T={T}",
        )


class DecoderConfig(BaseModel, frozen=True):
    max_iterations: int = Field(5, ge=0)
    threshold_slope: float = Field(0.0215, ge=0)
    threshold_offset: float = 6.7
    threshold_floor: Optional[int] = Field(None, ge=1)
    black_gray_margin: int = Field(3, ge=0)
    masked_threshold: Optional[int] = Field(None, ge=1)

    @classmethod
    def from_settings(cls):
        return cls(
            max_iterations=settings.get("DECODER_MAX_ITERATIONS", 5),
            threshold_slope=settings.get("DECODER_THRESHOLD_SLOPE", 0.0215),
            threshold_offset=settings.get("DECODER_THRESHOLD_OFFSET", 6.7),
            black_gray_margin=settings.get("DECODER_BLACK_GRAY_MARGIN", 3),
        )

    def floor_for(self, d: int) -> int:
        if self.threshold_floor is not None:
            return self.threshold_floor
        return (d + 2) // 2

    def threshold(self, syndrome_weight: int, d: int) -> int:
        affine = int(self.threshold_slope * syndrome_weight + self.threshold_offset)
        return min(d, max(self.floor_for(d), affine))

    def masked_for(self, d: int) -> int:
        if self.masked_threshold is not None:
            return self.masked_threshold
        return min(d, self.floor_for(d) + 1)


class Task(str, Enum):
    SPECTRUM = "spectrum"
    CYCLES = "cycles"
    DFR = "dfr"


class CampaignSpec(BaseModel, frozen=True):
    params: BikeParams
    n_keys: int = Field(ge=1)
    filter: Optional[FilterConfig] = None
    master_seed: int = Field(ge=0, lt=2**64)
    tasks: Set[Task] = {Task.CYCLES}
    dfr_trials_per_key: int = Field(0, ge=0)
    workers: int = Field(1, ge=1)
    decoder: Optional[DecoderConfig] = None
    max_attempts: int = Field(
        default_factory=lambda: settings.get("MAX_FILTER_ATTEMPTS", 1_000_000), ge=1
    )


class CycleRecord(BaseModel):
    within_0: int
    within_1: int
    cross: int
    total: int


class KeyRecord(BaseModel):
    """One line of a key file."""

    r: int
    d: int
    h0: Union[List[int], str]
    h1: Union[List[int], str]
    seed: Optional[int] = None
    accepted: Optional[bool] = None
    filter: Optional[str] = None
    cycles: Optional[CycleRecord] = None
    mspec: Optional[Dict[str, List[Tuple[int, int]]]] = None


class CycleStats(BaseModel):
    r: int
    n_keys: int
    rejections: int = 0
    within_avg: float
    within_min: int
    within_max: int
    cross_avg: float
    cross_min: int
    cross_max: int
    total_avg: float
    total_min: int
    total_max: int


class WeakKeyProfile(BaseModel):
    threshold: int
    longest_run: int
    mci_h0: int
    mci_h1: int
    mci_cross: int
    type_i: bool
    type_ii: bool
    type_iii: bool


class DfrFailure(BaseModel):
    key_index: int
    seed: int
    r: int
    d: int
    h0: List[int]
    h1: List[int]
    error: List[int]
    decoded: bool


class DfrReport(BaseModel):
    r: int
    d: int
    t: int
    keys: int
    trials: int
    failures: int
    miscorrections: int
    rate: float
    failing: List[DfrFailure] = []
