"""Orchestration shared by the management commands: one pipeline per IFS, one report per run."""
import logging
from dataclasses import dataclass, field
from functools import cached_property

from django.conf import settings

from box_dimension import __version__
from ifs_core.config import canonical_config
from ifs_core.models import ConfigError, Rect, UNIT_SQUARE
from ifs_core.utils import check_rosc, classify_map, classify_system, parse_rational
from pressure.utils import affinity_dimension, estimate_dimension, gap_diagnostic, iter_level_tables
from projections.utils import detect_block_type, projection_dims

from .serializers import (
    ClassificationSerializer, DimensionSerializer, GapSerializer, ProjectionsSerializer,
    RoscSerializer,
)

logger = logging.getLogger(__name__)

EXIT_VALIDATION = 2
EXIT_NOT_RIGOROUS = 3


def parse_schedule(value):
    """Parse "6,12,24" into sorted distinct positive levels."""
    try:
        levels = sorted({int(part) for part in str(value).split(',') if part.strip()})
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {value!r}", field='--schedule')
    if not levels or levels[0] < 1:
        raise ConfigError("levels must be positive integers", field='--schedule')
    return tuple(levels)


def parse_rect(value):
    """Parse "x0,x1,y0,y1" with rational components into a Rect."""
    parts = str(value).split(',')
    if len(parts) != 4:
        raise ConfigError(f"expected x0,x1,y0,y1, got {value!r}", field='--rosc')
    try:
        return Rect(*(parse_rational(part) for part in parts))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc), field='--rosc')


@dataclass
class PipelineOptions:
    schedule: tuple = None
    k_max: int = None
    tol: float = None
    threads: int = None
    rosc_rect: Rect = UNIT_SQUARE
    overrides: dict = field(default_factory=dict)
    probe_level: int = None

    @property
    def levels(self):
        schedule = tuple(self.schedule or settings.BOXDIM_SCHEDULE)
        if self.k_max is None:
            return schedule
        return tuple(k for k in schedule if k <= self.k_max) or (self.k_max,)

    @property
    def probe(self):
        return self.probe_level if self.probe_level is not None else self.levels[-1]


class DimensionPipeline:
    """Lazily computes each stage once; level tables are shared by every pressure stage."""

    def __init__(self, ifs, options=None):
        self.ifs = ifs
        self.options = options or PipelineOptions()

    @cached_property
    def classification(self):
        return {
            'system_type': classify_system(self.ifs).value,
            'maps': [classify_map(spec).value for spec in self.ifs],
            'block_type': detect_block_type(self.ifs),
        }

    @cached_property
    def rosc(self):
        return check_rosc(self.ifs, self.options.rosc_rect)

    @cached_property
    def projections(self):
        return projection_dims(self.ifs, self.options.overrides, self.options.tol)

    @cached_property
    def tables(self):
        levels = set(self.options.levels) | {self.options.probe}
        logger.info("Building level tables up to k = %d for %s", max(levels), self.ifs.name or 'IFS')
        return dict(iter_level_tables(self.ifs, levels, self.options.threads))

    @cached_property
    def dimension(self):
        return estimate_dimension(
            self.ifs, self.projections, self.options.levels, self.tables,
            self.options.tol, self.options.threads,
        )

    @cached_property
    def affinity(self):
        return affinity_dimension(
            self.ifs, self.options.levels, self.tables, self.options.tol, self.options.threads,
        )

    @cached_property
    def gap(self):
        k = self.options.probe
        return gap_diagnostic(
            self.ifs, self.projections, k, self.tables[k], self.options.tol, self.options.threads,
        )

    def warnings(self, sections):
        warnings = []
        if 'rosc' in sections and not self.rosc.satisfied:
            maps = ', '.join(str(i) for i in self.rosc.maps)
            warnings.append(
                f"ROSC fails on {self.rosc.rect} ({self.rosc.violation} at maps {maps}); "
                "dimension values are upper bounds only"
            )
        if 'projections' in sections:
            if not self.projections.rigorous:
                warnings.append("projection pieces overlap; s1 and s2 assume the open set condition")
            if self.projections.clamped:
                warnings.append("a projection root exceeded 1 and was clamped")
        if 'dimension' in sections and not self.dimension.is_decreasing:
            warnings.append("level roots are not decreasing along the schedule")
        if 'affinity' in sections and self.affinity.final_upper >= 2.0:
            warnings.append("affinity roots reached 2 and were capped")
        return warnings

    def report(self, sections):
        """Plain-data report holding the requested sections, in pipeline order."""
        report = {'version': __version__, 'ifs': canonical_config(self.ifs)}
        flags = {}
        if 'classification' in sections:
            report['classification'] = ClassificationSerializer(self.classification).data
        if 'rosc' in sections:
            report['rosc'] = RoscSerializer(self.rosc).data
            flags['rosc_satisfied'] = self.rosc.satisfied
        if 'projections' in sections:
            report['projections'] = ProjectionsSerializer(self.projections).data
        if 'dimension' in sections:
            report['dimension'] = DimensionSerializer(self.dimension, context={'flags': flags}).data
        if 'affinity' in sections:
            report['affinity'] = DimensionSerializer(self.affinity, context={'flags': flags}).data
        if 'gap' in sections:
            report['gap'] = GapSerializer(self.gap).data
        report['warnings'] = self.warnings(sections)
        for warning in report['warnings']:
            logger.warning("%s: %s", self.ifs.name or 'IFS', warning)
        return _plain(report)


def _plain(value):
    # ReturnDict / OrderedDict to builtin containers for json and jsonschema
    if isinstance(value, dict):
        return {key: _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value
