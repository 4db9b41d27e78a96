from ._base import IFSCommand


class Command(IFSCommand):
    help = 'Test the rectangular open set condition on the unit square or on --rosc x0,x1,y0,y1.'
    sections = ('rosc',)

    def summarize(self, report):
        section = report['rosc']
        rect = ', '.join(section['rect'])
        if section['satisfied']:
            self.stdout.write(self.style.SUCCESS(f"ROSC holds on ({rect})"))
        else:
            witness = section['witness']
            maps = ', '.join(str(i) for i in witness['maps'])
            self.stdout.write(f"ROSC fails on ({rect}): {witness['kind']} at maps {maps}")
