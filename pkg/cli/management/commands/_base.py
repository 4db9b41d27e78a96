import json
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from ifs_core.config import load_config
from ifs_core.models import (
    BoxDimensionError, ConfigError, InvalidMapError, RenderLimitExceeded, UNIT_SQUARE,
)
from cli.utils import (
    EXIT_NOT_RIGOROUS, EXIT_VALIDATION, DimensionPipeline, PipelineOptions, parse_rect,
    parse_schedule,
)

logger = logging.getLogger(__name__)


class IFSCommand(BaseCommand):
    """Loads every ``--config``, runs the pipeline sections of the command and emits reports.

    Subclasses set ``sections`` and override ``summarize`` for human-readable output.
    """

    sections = ()
    json_to_stdout = False
    computes_dimension = False

    def add_arguments(self, parser):
        parser.add_argument('--config', action='append', required=True,
                            help='TOML file with [[map]] tables; repeat for several systems')
        parser.add_argument('--json-out', help='write the JSON report to this path')
        parser.add_argument('--strict', action='store_true',
                            help='exit with status 3 when any result is not rigorous')
        parser.add_argument('--threads', type=int, default=None)
        parser.add_argument('--rosc', help='ROSC rectangle as x0,x1,y0,y1 (default unit square)')
        if self.computes_dimension:
            parser.add_argument('--override-s1', type=float, default=None)
            parser.add_argument('--override-s2', type=float, default=None)
            parser.add_argument('--schedule', help='comma-separated levels, e.g. 6,12,24,48')
            parser.add_argument('--k-max', type=int, default=None)
            parser.add_argument('--tol', type=float, default=None)
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def pipeline_options(self, options):
        if options['threads'] is not None and options['threads'] < 1:
            raise ConfigError(f"must be at least 1, got {options['threads']}", field='--threads')
        values = {
            'threads': options['threads'],
            'rosc_rect': parse_rect(options['rosc']) if options.get('rosc') else UNIT_SQUARE,
        }
        if self.computes_dimension:
            overrides = {}
            for axis in ('s1', 's2'):
                value = options.get(f'override_{axis}')
                if value is not None and not 0 <= value <= 1:
                    raise ConfigError(f"must lie in [0, 1], got {value}", field=f'--override-{axis}')
                overrides[axis] = value
            if options.get('k_max') is not None and options['k_max'] < 1:
                raise ConfigError(f"must be at least 1, got {options['k_max']}", field='--k-max')
            if options.get('tol') is not None and not options['tol'] > 0:
                raise ConfigError(f"must be positive, got {options['tol']}", field='--tol')
            values.update(
                schedule=parse_schedule(options['schedule']) if options.get('schedule') else None,
                k_max=options.get('k_max'),
                tol=options.get('tol'),
                overrides=overrides,
            )
        extra = self.extra_options(options)
        if extra.get('probe_level') is not None and extra['probe_level'] < 1:
            raise ConfigError(f"must be at least 1, got {extra['probe_level']}", field='--probe-level')
        return PipelineOptions(**values, **extra)

    def extra_options(self, options):
        return {}

    def build_report(self, pipeline, options):
        return pipeline.report(self.sections)

    def summarize(self, report):
        pass

    def handle(self, *args, **options):
        try:
            pipeline_options = self.pipeline_options(options)
            reports = []
            for path in options['config']:
                pipeline = DimensionPipeline(load_config(path), pipeline_options)
                logger.debug("Running %s on %s", self.sections or 'render', path)
                report = self.build_report(pipeline, options)
                if not self.json_to_stdout or options['json_out']:
                    self.summarize(report)
                reports.append(report)
        except (ConfigError, InvalidMapError, RenderLimitExceeded) as exc:
            raise CommandError(str(exc), returncode=EXIT_VALIDATION)
        except BoxDimensionError as exc:
            raise CommandError(str(exc))

        payload = reports[0] if len(reports) == 1 else reports
        text = json.dumps(payload, indent=2)
        if options['json_out']:
            try:
                Path(options['json_out']).write_text(text + '\n', encoding='utf-8')
            except OSError as exc:
                raise CommandError(f"cannot write report to {options['json_out']}: {exc.strerror or exc}")
        elif self.json_to_stdout:
            self.stdout.write(text)

        for report in reports:
            for warning in report['warnings']:
                self.stderr.write(self.style.WARNING(f"warning: {warning}"))
        if options['strict'] and any(report['warnings'] for report in reports):
            raise CommandError("results are not rigorous", returncode=EXIT_NOT_RIGOROUS)
