import logging
from fractions import Fraction
from pathlib import Path

from django.conf import settings

from ifs_core.models import IDENTITY, RenderLimitExceeded, RenderOutputError

from .models import OrientedRect

logger = logging.getLogger(__name__)

SVG_NS = 'http://www.w3.org/2000/svg'


def level_rects(ifs, k, max_level=None):
    """All m^k rectangles S_w([0,1]^2), |w| = k, in lexicographic word order."""
    max_level = settings.BOXDIM_RENDER_MAX_LEVEL if max_level is None else max_level
    if not 1 <= k <= max_level:
        raise RenderLimitExceeded(f"render level must be between 1 and {max_level}, got {k}")

    transforms = [spec.transform for spec in ifs]
    rects = []

    def walk(transform, word):
        if len(word) == k:
            rects.append(OrientedRect(transform.corners(), k, word))
            return
        for letter, inner in enumerate(transforms):
            walk(transform.compose(inner), word + (letter,))

    walk(IDENTITY, ())
    logger.debug("Level %d: %d rectangles", k, len(rects))
    return rects


def _number(value):
    """Integers verbatim; anything else rounded to 6 decimals, so the SVG is exact only for display."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{float(value):.6f}".rstrip('0').rstrip('.')


def svg_document(rects, viewport=None, fill=None, opacity=None):
    """SVG text with the unit square mapped to a viewport x viewport canvas, y pointing up."""
    viewport = settings.BOXDIM_SVG_VIEWPORT if viewport is None else viewport
    fill = settings.BOXDIM_SVG_FILL if fill is None else fill
    opacity = settings.BOXDIM_SVG_OPACITY if opacity is None else opacity
    size = _number(viewport)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="{SVG_NS}" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<path d="M0 0 H{size} V{size} H0 Z" fill="none" stroke="#000000" stroke-width="1"/>',
        f'<g fill="{fill}" fill-opacity="{_number(Fraction(str(opacity)))}">',
    ]
    for rect in rects:
        bounds = rect.bounds
        lines.append(
            f'<rect x="{_number(bounds.x0 * viewport)}" y="{_number((1 - bounds.y1) * viewport)}" '
            f'width="{_number(bounds.width * viewport)}" height="{_number(bounds.height * viewport)}"/>'
        )
    lines += ['</g>', '</svg>', '']
    return '\n'.join(lines)


def emit_svg(rects, path, viewport=None, fill=None, opacity=None):
    path = Path(path)
    document = svg_document(rects, viewport, fill, opacity)
    try:
        path.write_text(document, encoding='utf-8')
    except OSError as exc:
        raise RenderOutputError(f"cannot write SVG to {path}: {exc.strerror or exc}")
    logger.info("Wrote %d rectangles to %s", len(rects), path)
    return path
