from ._base import IFSCommand


class Command(IFSCommand):
    help = 'Upper bounds for the affinity dimension from the singular value function.'
    sections = ('affinity',)
    json_to_stdout = True
    computes_dimension = True

    def summarize(self, report):
        section = report['affinity']
        for k, root in zip(section['schedule'], section['roots']):
            self.stdout.write(f"k = {k:>3}  d_k = {root:.12f}")
