from ._base import IFSCommand


class Command(IFSCommand):
    help = 'Probe whether the box dimension is strictly below the affinity dimension.'
    sections = ('projections', 'gap')
    computes_dimension = True

    def add_command_arguments(self, parser):
        parser.add_argument('--probe-level', type=int, default=None)

    def extra_options(self, options):
        return {'probe_level': options.get('probe_level')}

    def summarize(self, report):
        section = report['gap']
        verdict = 'gap detected' if section['gap_detected'] else 'no gap certified'
        self.stdout.write(f"k = {section['level']}  epsilon = {section['epsilon']:.6g}  {verdict}")
        if section['bound'] is not None:
            self.stdout.write(f"  eta^epsilon = {section['bound']:.6g}")
