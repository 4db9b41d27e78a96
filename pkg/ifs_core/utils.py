import logging
import math
from fractions import Fraction
from itertools import combinations

from .models import (
    AffineMapSpec, AffineTransform, DihedralElement, IDENTITY, InvalidMapError,
    OrientationClass, RoscResult, SizeState, SystemType, UNIT_SQUARE,
)

logger = logging.getLogger(__name__)


def swaps_axes(g):
    return g.swaps_axes


def classify_map(spec):
    return OrientationClass.B if swaps_axes(spec.iso) else OrientationClass.A


def split_index_sets(ifs):
    """Return (I_A, I_B) as tuples of map indices."""
    i_a = tuple(i for i, spec in enumerate(ifs) if classify_map(spec) is OrientationClass.A)
    i_b = tuple(i for i, spec in enumerate(ifs) if classify_map(spec) is OrientationClass.B)
    return i_a, i_b


def classify_system(ifs):
    _, i_b = split_index_sets(ifs)
    return SystemType.NON_SEPARATED if i_b else SystemType.SEPARATED


def from_target_rect(iso, target):
    """Build the unique map with linear isometry ``iso`` sending [0,1]^2 onto ``target``."""
    iso = DihedralElement(iso)
    if target.is_degenerate:
        raise InvalidMapError(f"target rectangle {target} is degenerate")
    if not UNIT_SQUARE.contains(target):
        raise InvalidMapError(f"target rectangle {target} is not inside [0,1]^2")
    a, b = target.width, target.height
    (p, q), (r, s) = iso.matrix
    shape = AffineTransform(((a * p, a * q), (b * r, b * s)), (Fraction(0), Fraction(0))).image()
    t = (target.x0 - shape.x0, target.y0 - shape.y0)
    return AffineMapSpec(a=a, b=b, iso=iso, t=t)


def image_rect(spec):
    return spec.transform.image()


def rect_image(spec, rect):
    return spec.transform.image(rect)


def compose_maps(outer, inner):
    return outer.transform.compose(inner.transform)


def word_transform(word, ifs):
    """Exact affine map S_{w1} o ... o S_{wk}."""
    result = IDENTITY
    for letter in word:
        result = result.compose(ifs[letter].transform)
    return result


def extend_size(state, letter, ifs):
    spec = ifs[letter]
    log_a, log_b = math.log(spec.a), math.log(spec.b)
    if state.cls is OrientationClass.A:
        log_base, log_height = state.log_base + log_a, state.log_height + log_b
    else:
        log_base, log_height = state.log_base + log_b, state.log_height + log_a
    return SizeState(state.cls.flip(spec.swaps_axes), log_base, log_height)


def word_size(word, ifs):
    """Return (alpha_1, alpha_2, cls) of a non-empty word."""
    if not word:
        raise ValueError("word_size needs a non-empty word")
    state = SizeState()
    for letter in word:
        state = extend_size(state, letter, ifs)
    return max(state.base, state.height), min(state.base, state.height), state.cls


def alpha_extremes(ifs):
    """Return (alpha_min, alpha_max) over single maps, exactly."""
    alpha_min = min(min(spec.a, spec.b) for spec in ifs)
    alpha_max = max(max(spec.a, spec.b) for spec in ifs)
    return alpha_min, alpha_max


def check_rosc(ifs, rect=UNIT_SQUARE):
    """Test the rectangular open set condition for the open rectangle ``rect``."""
    if rect.is_degenerate:
        raise InvalidMapError(f"ROSC rectangle {rect} is degenerate")
    images = [rect_image(spec, rect) for spec in ifs]
    for i, image in enumerate(images):
        if not rect.contains(image):
            logger.info("ROSC containment fails for map %d: %s not in %s", i, image, rect)
            return RoscResult(False, rect, 'containment', (i,))
    for i, j in combinations(range(len(images)), 2):
        if images[i].interiors_intersect(images[j]):
            logger.info("ROSC overlap between maps %d and %d", i, j)
            return RoscResult(False, rect, 'overlap', (i, j))
    return RoscResult(True, rect)


def parse_rational(value):
    """Parse "3/5", "0.6", 3 or 0.6 into an exact rational."""
    if isinstance(value, bool):
        raise ValueError(f"{value!r} is not a number")
    if isinstance(value, float):
        # floats from TOML carry their decimal spelling through repr
        return Fraction(repr(value))
    return Fraction(str(value).strip())


def format_rational(value):
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
