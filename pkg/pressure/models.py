"""
Dynamic-programming state for the modified singular value sums.

A word w of length k is summarised by its orientation class and two exponent
vectors: u[i] counts the times letter i was appended while the prefix was in
class A, v[i] while it was in class B. Base and height of S_w([0,1]^2) are
then prod a_i^u_i b_i^v_i and prod b_i^u_i a_i^v_i, so every word sharing
(cls, u, v) has the same singular values and the table only needs a count.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from ifs_core.models import OrientationClass

LIMB_BITS = 32
LIMB_MASK = (1 << LIMB_BITS) - 1


@dataclass(frozen=True)
class PressureParams:
    s1: float
    s2: float

    @classmethod
    def from_dims(cls, dims):
        return cls(s1=float(dims.s1), s2=float(dims.s2))

    @property
    def total(self):
        return self.s1 + self.s2


@dataclass(frozen=True)
class ExponentState:
    cls: OrientationClass
    u: tuple
    v: tuple
    count: int = 1

    @property
    def level(self):
        return sum(self.u) + sum(self.v)

    def log_sizes(self, ifs):
        """(log base, log height) of the rectangles aggregated in this state."""
        log_base = log_height = 0.0
        for spec, u, v in zip(ifs, self.u, self.v):
            log_a, log_b = math.log(spec.a), math.log(spec.b)
            log_base += u * log_a + v * log_b
            log_height += u * log_b + v * log_a
        return log_base, log_height


class LevelTable:
    """
    Sealed table of all states reachable by words of length ``k``.

    Stored column-wise: ``cls`` (0 for A, 1 for B), ``exponents`` (u then v,
    one row per state) and ``limbs``, the exact counts split into 32-bit limbs
    (least significant first) so they never overflow. Rows are in a fixed
    canonical order, which fixes the order of every floating-point sum.
    """

    def __init__(self, k, cls, exponents, limbs):
        self.k = k
        self.cls = np.ascontiguousarray(cls, dtype=np.uint8)
        self.exponents = np.ascontiguousarray(exponents, dtype=np.uint16)
        self.limbs = np.ascontiguousarray(limbs, dtype=np.uint64)
        for array in (self.cls, self.exponents, self.limbs):
            array.setflags(write=False)

    @classmethod
    def empty(cls, m):
        """Level 0: the empty word, class A, count 1."""
        return cls(0, np.zeros(1), np.zeros((1, 2 * m)), np.ones((1, 1)))

    @property
    def m(self):
        return self.exponents.shape[1] // 2

    def __len__(self):
        return len(self.cls)

    @property
    def counts(self):
        """Exact counts as Python integers."""
        return [
            sum(int(limb) << (LIMB_BITS * j) for j, limb in enumerate(row))
            for row in self.limbs
        ]

    def total_count(self):
        return sum(self.counts)

    def log_counts(self):
        limbs = self.limbs
        n, width = limbs.shape
        top = width - 1 - np.argmax((limbs != 0)[:, ::-1], axis=1)
        padded = np.hstack([np.zeros((n, 2), dtype=np.uint64), limbs]).astype(np.float64)
        rows = np.arange(n)
        index = top + 2
        mantissa = (padded[rows, index] * 2.0 ** (2 * LIMB_BITS)
                    + padded[rows, index - 1] * 2.0 ** LIMB_BITS
                    + padded[rows, index - 2])
        return np.log(mantissa) + (top - 2) * LIMB_BITS * math.log(2)

    def log_sizes(self, ifs):
        """Arrays (log base, log height) for every state."""
        m = self.m
        log_a = np.array([math.log(spec.a) for spec in ifs])
        log_b = np.array([math.log(spec.b) for spec in ifs])
        u = self.exponents[:, :m].astype(np.float64)
        v = self.exponents[:, m:].astype(np.float64)
        return u @ log_a + v @ log_b, u @ log_b + v @ log_a

    def iter_states(self):
        m = self.m
        for cls, row, count in zip(self.cls, self.exponents, self.counts):
            yield ExponentState(
                OrientationClass.B if cls else OrientationClass.A,
                tuple(int(x) for x in row[:m]),
                tuple(int(x) for x in row[m:]),
                count,
            )

    @property
    def states(self):
        return {(state.cls, state.u, state.v): state.count for state in self.iter_states()}


@dataclass(frozen=True)
class LevelRoot:
    k: int
    value: float
    lower: float
    upper: float

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class DimensionEstimate:
    kind: str  # 'modified' or 'affinity'
    schedule: tuple
    roots: tuple
    final_upper: float
    extrapolated: float
    s1: float = None
    s2: float = None
    closed_form: float = None
    flags: dict = field(default_factory=dict)
    notes: tuple = ()

    @property
    def is_decreasing(self):
        return all(later <= earlier + 1e-9 for earlier, later in zip(self.roots, self.roots[1:]))


@dataclass(frozen=True)
class GapReport:
    level: int
    affinity_upper: float
    epsilon: float
    eta: float = None
    bound: float = None
    gap_detected: bool = False
    notes: tuple = ()
