from ._base import IFSCommand


class Command(IFSCommand):
    help = 'Box dimensions s1, s2 of the coordinate projections.'
    sections = ('classification', 'projections')
    computes_dimension = True

    def summarize(self, report):
        section = report['projections']
        rigor = 'rigorous' if section['rigorous'] else 'upper bounds'
        self.stdout.write(f"s1 = {section['s1']:.12g}  s2 = {section['s2']:.12g}  "
                          f"method {section['method']} ({rigor})")
        for line in section['dedupe_log']:
            self.stdout.write(f"  dropped {line}")
