from ._base import IFSCommand


class Command(IFSCommand):
    help = 'Upper bounds s_k for the box dimension along a level schedule, with the full run report.'
    sections = ('classification', 'rosc', 'projections', 'dimension', 'affinity', 'gap')
    json_to_stdout = True
    computes_dimension = True

    def add_command_arguments(self, parser):
        parser.add_argument('--probe-level', type=int, default=None,
                            help='level of the gap probe (default: last scheduled level)')

    def extra_options(self, options):
        return {'probe_level': options.get('probe_level')}

    def summarize(self, report):
        section = report['dimension']
        for k, root in zip(section['schedule'], section['roots']):
            self.stdout.write(f"k = {k:>3}  s_k = {root:.12f}")
        self.stdout.write(f"dim_B <= {section['final_upper']:.12g}  "
                          f"(extrapolated {section['extrapolated']:.12g})")
