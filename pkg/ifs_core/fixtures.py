"""Reference systems used by the tests and mirrored in ``configs/``."""
from fractions import Fraction as F

from .models import AffineMapSpec, BoxLikeIFS, DihedralElement, Rect
from .utils import from_target_rect


def non_separated_example():
    """Three rectangles with a reflection and two quarter turns."""
    return BoxLikeIFS((
        from_target_rect(DihedralElement.REFLECT_V, Rect(F(0), F(2, 5), F(1, 4), F(3, 4))),
        from_target_rect(DihedralElement.ROT270, Rect(F(3, 5), F(1), F(3, 4), F(1))),
        from_target_rect(DihedralElement.ROT90, Rect(F(3, 5), F(1), F(0), F(1, 4))),
    ), name='non-separated')


def block_type_example():
    return BoxLikeIFS((
        AffineMapSpec(F(1, 2), F(3, 10), DihedralElement.REFLECT_H, (F(0), F(1))),
        AffineMapSpec(F(1, 2), F(1, 5), DihedralElement.ROT90, (F(1, 4), F(7, 10))),
        AffineMapSpec(F(1, 4), F(3, 5), DihedralElement.REFLECT_V, (F(1), F(0))),
    ), name='block-type')


def full_grid():
    half = F(1, 2)
    return BoxLikeIFS(tuple(
        AffineMapSpec(half, half, DihedralElement.ID, (x, y))
        for y in (F(0), half) for x in (F(0), half)
    ), name='2x2 grid')


def corner_system():
    quarter = F(1, 4)
    return BoxLikeIFS(tuple(
        AffineMapSpec(quarter, quarter, DihedralElement.ID, t)
        for t in ((F(0), F(0)), (F(3, 4), F(0)), (F(0), F(3, 4)))
    ), name='corners')


def overlapping_system():
    target = Rect(F(0), F(1, 2), F(0), F(1, 2))
    return BoxLikeIFS((
        from_target_rect(DihedralElement.ID, target),
        from_target_rect(DihedralElement.ROT180, target),
        from_target_rect(DihedralElement.ID, Rect(F(1, 2), F(1), F(1, 2), F(1))),
    ), name='overlapping')


def grid_carpet(columns, rows, cells):
    """Carpet with horizontal contraction 1/columns and vertical 1/rows."""
    return BoxLikeIFS(tuple(
        AffineMapSpec(F(1, columns), F(1, rows), DihedralElement.ID, (F(col, columns), F(row, rows)))
        for col, row in cells
    ), name=f"{columns}x{rows} carpet")
