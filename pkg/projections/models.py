from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from ifs_core.models import InvalidMapError


class Node(str, Enum):
    X = 'X'  # projection onto the horizontal axis
    Y = 'Y'  # projection onto the vertical axis


class Method(str, Enum):
    MORAN = 'Moran'
    GRAPH_DIRECTED = 'GraphDirected'
    BLOCK_TYPE = 'BlockType'
    OVERRIDE = 'Override'


@dataclass(frozen=True, order=True)
class LineMap:
    """x -> orientation * ratio * x + offset on [0,1]."""

    ratio: Fraction
    offset: Fraction
    orientation: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'ratio', Fraction(self.ratio))
        object.__setattr__(self, 'offset', Fraction(self.offset))
        if not 0 < self.ratio < 1:
            raise InvalidMapError(f"line map ratio {self.ratio} is not in (0,1)")
        if self.orientation not in (1, -1):
            raise InvalidMapError(f"orientation must be +1 or -1, got {self.orientation}")

    def __call__(self, x):
        return self.orientation * self.ratio * x + self.offset

    def image(self):
        """Closed interval g([0,1]) as (lo, hi)."""
        if self.orientation == 1:
            return (self.offset, self.offset + self.ratio)
        return (self.offset - self.ratio, self.offset)

    def reflect_before(self):
        """g o r with r(x) = 1 - x."""
        return LineMap(self.ratio, self.offset + self.orientation * self.ratio, -self.orientation)

    def reflect_after(self):
        """r o g with r(x) = 1 - x."""
        return LineMap(self.ratio, 1 - self.offset, -self.orientation)

    def __str__(self):
        sign = '+' if self.orientation == 1 else '-'
        return f"x -> {self.offset} {sign} {self.ratio}x"


@dataclass(frozen=True, order=True)
class Edge:
    """``target`` contains ``line_map`` applied to the set at ``source``."""

    source: Node
    target: Node
    line_map: LineMap
    map_index: int = field(default=-1, compare=False)

    @property
    def key(self):
        return (self.source.value, self.target.value, self.line_map.ratio,
                self.line_map.offset, self.line_map.orientation)

    @property
    def is_cross(self):
        return self.source is not self.target

    def __str__(self):
        return f"{self.source.value}->{self.target.value} {self.line_map} (map {self.map_index})"


@dataclass(frozen=True)
class ProjectionSystem:
    edges: tuple
    symmetric: frozenset = frozenset()
    dedupe_log: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'edges', tuple(sorted(self.edges)))
        object.__setattr__(self, 'symmetric', frozenset(self.symmetric))
        object.__setattr__(self, 'dedupe_log', tuple(self.dedupe_log))

    def edges_into(self, node):
        return tuple(edge for edge in self.edges if edge.target is node)

    def edges_from(self, node):
        return tuple(edge for edge in self.edges if edge.source is node)

    @property
    def has_cross_edges(self):
        return any(edge.is_cross for edge in self.edges)

    def canonical(self):
        return tuple(edge.key for edge in self.edges)


@dataclass(frozen=True)
class RootResult:
    """A root clamped to [0, 1]; ``unclamped`` keeps the raw value when clamping happened."""

    value: float
    clamped: bool = False
    unclamped: float = None

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class ProjectionDims:
    s1: float
    s2: float
    method_s1: Method
    method_s2: Method
    rigorous: bool
    clamped: bool = False
    dedupe_log: tuple = ()
    symmetric_nodes: tuple = ()
    notes: tuple = ()

    @property
    def method(self):
        if self.method_s1 is self.method_s2:
            return self.method_s1.value
        return f"{self.method_s1.value}/{self.method_s2.value}"
