from django.conf import settings

from ifs_core.models import ConfigError
from render.utils import emit_svg, level_rects

from ._base import IFSCommand


class Command(IFSCommand):
    help = 'Write the level-k rectangles S_w([0,1]^2) as an SVG file.'

    def add_command_arguments(self, parser):
        parser.add_argument('--level', type=int, required=True)
        parser.add_argument('--out', required=True, help='SVG output path')
        parser.add_argument('--viewport', type=int, default=settings.BOXDIM_SVG_VIEWPORT)
        parser.add_argument('--fill', default=settings.BOXDIM_SVG_FILL)
        parser.add_argument('--opacity', type=float, default=settings.BOXDIM_SVG_OPACITY)

    def build_report(self, pipeline, options):
        if not 0 <= options['opacity'] <= 1:
            raise ConfigError(f"must lie in [0, 1], got {options['opacity']}", field='--opacity')
        if options['viewport'] < 1:
            raise ConfigError(f"must be positive, got {options['viewport']}", field='--viewport')
        rects = level_rects(pipeline.ifs, options['level'])
        path = emit_svg(rects, options['out'], options['viewport'], options['fill'], options['opacity'])
        report = pipeline.report(())
        report['render'] = {'level': options['level'], 'rectangles': len(rects), 'path': str(path)}
        return report

    def summarize(self, report):
        section = report['render']
        self.stdout.write(f"{section['rectangles']} rectangles at level {section['level']} -> {section['path']}")
