from ._base import IFSCommand


class Command(IFSCommand):
    help = 'Classify each map as A (no axis swap) or B, and the system as Separated or NonSeparated.'
    sections = ('classification',)

    def summarize(self, report):
        section = report['classification']
        self.stdout.write(f"{report['ifs']['name'] or 'IFS'}: {section['system_type']}")
        for index, cls in enumerate(section['maps']):
            self.stdout.write(f"  map[{index}]: {cls}")
        if section['block_type']:
            self.stdout.write("  block type: projections cover [0, 1]")
