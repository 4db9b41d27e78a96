"""
Domain types for box-like iterated function systems.

Nothing here is persisted; these are immutable value objects shared by the
projections, pressure and render apps. All coordinates are exact rationals.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import math

Rational = Fraction


class BoxDimensionError(Exception):
    """Base class for every error raised by the dimension toolkit."""


class InvalidMapError(BoxDimensionError):
    """A map or rectangle violates the box-like invariants."""


class ConfigError(BoxDimensionError):
    """A configuration file could not be parsed or validated."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class ReducibleSystemError(BoxDimensionError):
    pass


class StateLimitExceeded(BoxDimensionError):
    pass


class RenderLimitExceeded(BoxDimensionError):
    pass


class RenderOutputError(BoxDimensionError):
    pass


class OrientationClass(str, Enum):
    A = 'A'  # horizontal lines go to horizontal lines
    B = 'B'  # horizontal lines go to vertical lines

    def flip(self, swap):
        if not swap:
            return self
        return OrientationClass.B if self is OrientationClass.A else OrientationClass.A


class SystemType(str, Enum):
    SEPARATED = 'Separated'
    NON_SEPARATED = 'NonSeparated'


class DihedralElement(str, Enum):
    """The eight symmetries of the square. Rotations are clockwise."""

    ID = 'id'
    ROT90 = 'rot90'
    ROT180 = 'rot180'
    ROT270 = 'rot270'
    REFLECT_H = 'reflect_h'
    REFLECT_V = 'reflect_v'
    REFLECT_DIAG = 'reflect_diag'
    REFLECT_ANTI = 'reflect_anti'

    @property
    def matrix(self):
        return _DIHEDRAL_MATRICES[self]

    @property
    def swaps_axes(self):
        (p, _), (_, s) = self.matrix
        return p == 0 and s == 0

    def compose(self, other):
        """Return the element acting as ``self`` after ``other``."""
        return from_matrix(_matmul(self.matrix, other.matrix))

    def inverse(self):
        (p, q), (r, s) = self.matrix
        # orthogonal: inverse is the transpose
        return from_matrix(((p, r), (q, s)))


_DIHEDRAL_MATRICES = {
    DihedralElement.ID: ((1, 0), (0, 1)),
    DihedralElement.ROT90: ((0, 1), (-1, 0)),
    DihedralElement.ROT180: ((-1, 0), (0, -1)),
    DihedralElement.ROT270: ((0, -1), (1, 0)),
    DihedralElement.REFLECT_H: ((1, 0), (0, -1)),
    DihedralElement.REFLECT_V: ((-1, 0), (0, 1)),
    DihedralElement.REFLECT_DIAG: ((0, 1), (1, 0)),
    DihedralElement.REFLECT_ANTI: ((0, -1), (-1, 0)),
}

_MATRIX_LOOKUP = {matrix: element for element, matrix in _DIHEDRAL_MATRICES.items()}


def from_matrix(matrix):
    try:
        return _MATRIX_LOOKUP[tuple(tuple(row) for row in matrix)]
    except KeyError:
        raise InvalidMapError(f"{matrix} is not a symmetry of the square")


def _matmul(m1, m2):
    return tuple(
        tuple(sum(m1[i][k] * m2[k][j] for k in range(2)) for j in range(2))
        for i in range(2)
    )


@dataclass(frozen=True)
class Rect:
    """Closed axis-parallel rectangle [x0, x1] x [y0, y1]."""

    x0: Fraction
    x1: Fraction
    y0: Fraction
    y1: Fraction

    def __post_init__(self):
        for name in ('x0', 'x1', 'y0', 'y1'):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.x0 > self.x1 or self.y0 > self.y1:
            raise InvalidMapError(f"rectangle {self} has reversed bounds")

    @property
    def width(self):
        return self.x1 - self.x0

    @property
    def height(self):
        return self.y1 - self.y0

    @property
    def is_degenerate(self):
        return self.width == 0 or self.height == 0

    def contains(self, other):
        return (self.x0 <= other.x0 and other.x1 <= self.x1
                and self.y0 <= other.y0 and other.y1 <= self.y1)

    def interiors_intersect(self, other):
        # shared edges are allowed
        return (max(self.x0, other.x0) < min(self.x1, other.x1)
                and max(self.y0, other.y0) < min(self.y1, other.y1))

    def as_tuple(self):
        return (self.x0, self.x1, self.y0, self.y1)

    def __str__(self):
        return f"[{self.x0}, {self.x1}] x [{self.y0}, {self.y1}]"


UNIT_SQUARE = Rect(Fraction(0), Fraction(1), Fraction(0), Fraction(1))


@dataclass(frozen=True)
class AffineTransform:
    """x -> M x + t with exact rational entries."""

    matrix: tuple
    offset: tuple

    def apply(self, x, y):
        (p, q), (r, s) = self.matrix
        return (p * x + q * y + self.offset[0], r * x + s * y + self.offset[1])

    def compose(self, inner):
        """self after inner."""
        matrix = _matmul(self.matrix, inner.matrix)
        ox, oy = self.apply(*inner.offset)
        return AffineTransform(matrix, (ox, oy))

    def corners(self, rect=UNIT_SQUARE):
        return (
            self.apply(rect.x0, rect.y0),
            self.apply(rect.x1, rect.y0),
            self.apply(rect.x1, rect.y1),
            self.apply(rect.x0, rect.y1),
        )

    def image(self, rect=UNIT_SQUARE):
        points = self.corners(rect)
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        return Rect(min(xs), max(xs), min(ys), max(ys))

    @property
    def is_diagonal(self):
        return self.matrix[0][1] == 0 and self.matrix[1][0] == 0


IDENTITY = AffineTransform(((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))),
                           (Fraction(0), Fraction(0)))


@dataclass(frozen=True)
class AffineMapSpec:
    """One map S = T o L + t with T = diag(a, b) and L a symmetry of the square."""

    a: Fraction
    b: Fraction
    iso: DihedralElement
    t: tuple

    def __post_init__(self):
        object.__setattr__(self, 'a', Fraction(self.a))
        object.__setattr__(self, 'b', Fraction(self.b))
        object.__setattr__(self, 'iso', DihedralElement(self.iso))
        object.__setattr__(self, 't', (Fraction(self.t[0]), Fraction(self.t[1])))
        if not (0 < self.a < 1 and 0 < self.b < 1):
            raise InvalidMapError(f"contractions must lie in (0,1), got a={self.a}, b={self.b}")
        if not UNIT_SQUARE.contains(self.transform.image()):
            raise InvalidMapError(f"image {self.transform.image()} leaves the unit square")

    @property
    def transform(self):
        (p, q), (r, s) = self.iso.matrix
        matrix = ((self.a * p, self.a * q), (self.b * r, self.b * s))
        return AffineTransform(matrix, self.t)

    @property
    def swaps_axes(self):
        return self.iso.swaps_axes


@dataclass(frozen=True)
class BoxLikeIFS:
    maps: tuple
    name: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'maps', tuple(self.maps))
        if len(self.maps) < 2:
            raise InvalidMapError(f"an IFS needs at least two maps, got {len(self.maps)}")

    @property
    def m(self):
        return len(self.maps)

    def __len__(self):
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)

    def __getitem__(self, index):
        return self.maps[index]

    def with_isometries(self, iso=DihedralElement.ID):
        """Same image rectangles, every linear part replaced by ``iso``."""
        from .utils import from_target_rect, image_rect

        return BoxLikeIFS(
            tuple(from_target_rect(iso, image_rect(spec)) for spec in self.maps),
            name=f"{self.name} ({iso.value})" if self.name else '',
        )


@dataclass(frozen=True)
class SizeState:
    """Orientation class and log side lengths of S_w([0,1]^2)."""

    cls: OrientationClass = OrientationClass.A
    log_base: float = 0.0
    log_height: float = 0.0

    @property
    def base(self):
        return math.exp(self.log_base)

    @property
    def height(self):
        return math.exp(self.log_height)


@dataclass(frozen=True)
class RoscResult:
    satisfied: bool
    rect: Rect
    violation: str = ''  # 'containment' or 'overlap'
    maps: tuple = field(default_factory=tuple)

    @property
    def witness(self):
        if self.satisfied:
            return None
        return {'kind': self.violation, 'maps': list(self.maps)}
