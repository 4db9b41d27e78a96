from dataclasses import dataclass

from ifs_core.models import Rect


@dataclass(frozen=True)
class OrientedRect:
    """S_w([0,1]^2) with its corners in the order of (0,0), (1,0), (1,1), (0,1)."""

    corners: tuple
    depth: int
    word: tuple

    @property
    def bounds(self):
        xs = [x for x, _ in self.corners]
        ys = [y for _, y in self.corners]
        return Rect(min(xs), max(xs), min(ys), max(ys))

    @property
    def area(self):
        bounds = self.bounds
        return bounds.width * bounds.height

    @property
    def is_axis_parallel(self):
        xs = {x for x, _ in self.corners}
        ys = {y for _, y in self.corners}
        return len(xs) == 2 and len(ys) == 2
