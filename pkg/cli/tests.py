import json
import tempfile
from io import StringIO
from pathlib import Path

import jsonschema
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, tag

from box_dimension import __version__
from ifs_core.config import parse_config
from ifs_core.fixtures import non_separated_example

from .utils import EXIT_NOT_RIGOROUS, EXIT_VALIDATION, PipelineOptions, parse_rect, parse_schedule

CONFIGS = Path(settings.BASE_DIR) / 'configs'
NON_SEPARATED = str(CONFIGS / 'non_separated.toml')
BLOCK_TYPE = str(CONFIGS / 'block_type.toml')
OVERLAPPING = str(CONFIGS / 'overlapping.toml')


def run(*args):
    out, err = StringIO(), StringIO()
    call_command(*args, stdout=out, stderr=err)
    return out.getvalue(), err.getvalue()


class ReportSchemaMixin:
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        schema = json.loads(Path(settings.BOXDIM_REPORT_SCHEMA).read_text(encoding='utf-8'))
        jsonschema.Draft202012Validator.check_schema(schema)
        cls.validator = jsonschema.Draft202012Validator(schema)

    def assert_valid_report(self, report):
        errors = sorted(self.validator.iter_errors(report), key=str)
        self.assertEqual(errors, [], msg='\n'.join(error.message for error in errors))


class OptionParsingTests(SimpleTestCase):
    def test_schedule(self):
        self.assertEqual(parse_schedule("12, 6,24,6"), (6, 12, 24))

    def test_levels_respect_k_max(self):
        options = PipelineOptions(schedule=(6, 12, 24, 48), k_max=20)
        self.assertEqual(options.levels, (6, 12))
        self.assertEqual(options.probe, 12)
        self.assertEqual(PipelineOptions(schedule=(6, 12), k_max=4).levels, (4,))

    def test_rect(self):
        self.assertEqual(parse_rect("0,1/2,1/4,1").as_tuple()[1:3], (0.5, 0.25))


class CommandTests(ReportSchemaMixin, SimpleTestCase):
    def test_classify(self):
        out, _ = run('classify', '--config', NON_SEPARATED)
        self.assertIn("non-separated: NonSeparated", out)
        self.assertIn("map[1]: B", out)

    def test_classify_block_type(self):
        out, _ = run('classify', '--config', BLOCK_TYPE)
        self.assertIn("block type", out)

    def test_check_rosc(self):
        out, _ = run('check_rosc', '--config', NON_SEPARATED)
        self.assertIn("ROSC holds", out)
        out, err = run('check_rosc', '--config', OVERLAPPING)
        self.assertIn("overlap at maps 0, 1", out)
        self.assertIn("warning:", err)

    def test_check_rosc_custom_rectangle(self):
        out, _ = run('check_rosc', '--config', NON_SEPARATED, '--rosc', '0,1/2,0,1/2')
        self.assertIn("containment", out)

    def test_proj_dims(self):
        out, _ = run('proj_dims', '--config', NON_SEPARATED)
        self.assertIn("s1 = 0.89", out)
        self.assertIn("GraphDirected (rigorous)", out)

    def test_dim_prints_a_valid_report(self):
        out, _ = run('dim', '--config', NON_SEPARATED, '--schedule', '3,6')
        report = json.loads(out)
        self.assert_valid_report(report)
        self.assertEqual(report['version'], __version__)
        self.assertEqual(report['classification']['system_type'], 'NonSeparated')
        self.assertTrue(report['rosc']['satisfied'])
        self.assertAlmostEqual(report['projections']['s1'], 0.890959, delta=1e-4)
        self.assertEqual(report['dimension']['schedule'], [3, 6])
        self.assertEqual(report['dimension']['method_flags']['extrapolation'], 'heuristic')
        self.assertTrue(report['dimension']['method_flags']['rosc_satisfied'])
        self.assertEqual(report['gap']['level'], 6)
        self.assertEqual(report['warnings'], [])

    def test_report_echo_parses_back(self):
        out, _ = run('dim', '--config', NON_SEPARATED, '--schedule', '2')
        echoed = parse_config(json.loads(out)['ifs'])
        self.assertEqual(echoed.maps, non_separated_example().maps)

    def test_json_out_and_human_summary(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'report.json'
            out, _ = run('dim', '--config', BLOCK_TYPE, '--schedule', '2,4', '--json-out', str(path))
            report = json.loads(path.read_text(encoding='utf-8'))
        self.assert_valid_report(report)
        self.assertIn("dim_B <=", out)
        self.assertEqual(report['projections']['method'], 'BlockType')
        self.assertLessEqual(report['gap']['epsilon'], 0)

    def test_several_configs_give_a_list(self):
        out, _ = run('affinity', '--config', NON_SEPARATED, '--config', BLOCK_TYPE, '--schedule', '2')
        reports = json.loads(out)
        self.assertEqual(len(reports), 2)
        for report in reports:
            self.assert_valid_report(report)
            self.assertEqual(report['affinity']['kind'], 'affinity')

    def test_overrides(self):
        out, _ = run('dim', '--config', NON_SEPARATED, '--schedule', '2', '--override-s1', '0.5')
        report = json.loads(out)
        self.assertEqual(report['projections']['s1'], 0.5)
        self.assertEqual(report['projections']['method_s1'], 'Override')

    def test_k_max_caps_the_schedule(self):
        out, _ = run('affinity', '--config', BLOCK_TYPE, '--schedule', '2,4,8', '--k-max', '4')
        self.assertEqual(json.loads(out)['affinity']['schedule'], [2, 4])

    def test_gap(self):
        out, _ = run('gap', '--config', NON_SEPARATED, '--probe-level', '4')
        self.assertIn("k = 4", out)
        self.assertIn("epsilon", out)

    def test_every_config_validates(self):
        for path in sorted(CONFIGS.glob('*.toml')):
            out, _ = run('dim', '--config', str(path), '--schedule', '2,3')
            self.assert_valid_report(json.loads(out))


class ExitCodeTests(SimpleTestCase):
    def assert_exit(self, returncode, *args):
        with self.assertRaises(CommandError) as ctx:
            run(*args)
        self.assertEqual(ctx.exception.returncode, returncode)
        return ctx.exception

    def test_strict_passes_on_rigorous_results(self):
        run('dim', '--config', NON_SEPARATED, '--schedule', '3,6', '--strict')

    def test_strict_fails_when_rosc_fails(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'report.json'
            self.assert_exit(EXIT_NOT_RIGOROUS, 'dim', '--config', OVERLAPPING, '--schedule', '2',
                             '--strict', '--json-out', str(path))
            self.assertTrue(json.loads(path.read_text(encoding='utf-8'))['warnings'])

    def test_without_strict_warnings_do_not_fail(self):
        out, _ = run('check_rosc', '--config', OVERLAPPING)
        self.assertIn("ROSC fails", out)

    def test_malformed_toml(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'broken.toml'
            path.write_text("[[map]\nrect = 1\n", encoding='utf-8')
            error = self.assert_exit(EXIT_VALIDATION, 'classify', '--config', str(path))
        self.assertIn("broken.toml", str(error))

    def test_invalid_map(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'wide.toml'
            path.write_text('[[map]]\nrect = ["0", "1", "0", "1/2"]\n\n'
                            '[[map]]\nrect = ["0", "1/2", "1/2", "1"]\n', encoding='utf-8')
            error = self.assert_exit(EXIT_VALIDATION, 'classify', '--config', str(path))
        self.assertIn("map[0]", str(error))

    def test_missing_config(self):
        self.assert_exit(EXIT_VALIDATION, 'classify', '--config', str(CONFIGS / 'absent.toml'))

    def test_bad_options(self):
        self.assert_exit(EXIT_VALIDATION, 'check_rosc', '--config', NON_SEPARATED, '--rosc', '0,1,0')
        self.assert_exit(EXIT_VALIDATION, 'check_rosc', '--config', NON_SEPARATED, '--rosc', '0,1,1/2,1/2')
        self.assert_exit(EXIT_VALIDATION, 'dim', '--config', NON_SEPARATED, '--override-s1', '1.5')
        self.assert_exit(EXIT_VALIDATION, 'dim', '--config', NON_SEPARATED, '--schedule', '0,4')
        self.assert_exit(EXIT_VALIDATION, 'classify', '--config', NON_SEPARATED, '--threads', '0')
        self.assert_exit(EXIT_VALIDATION, 'gap', '--config', NON_SEPARATED, '--probe-level', '0')
        self.assert_exit(EXIT_VALIDATION, 'dim', '--config', NON_SEPARATED, '--k-max', '0')
        self.assert_exit(EXIT_VALIDATION, 'proj_dims', '--config', NON_SEPARATED, '--tol', '-1')
        self.assert_exit(EXIT_VALIDATION, 'affinity', '--config', NON_SEPARATED, '--tol', '0')

    def test_render_level_guard(self):
        with tempfile.TemporaryDirectory() as directory:
            self.assert_exit(EXIT_VALIDATION, 'render', '--config', NON_SEPARATED, '--level', '11',
                             '--out', str(Path(directory) / 'out.svg'))


class RenderCommandTests(ReportSchemaMixin, SimpleTestCase):
    def test_render_report(self):
        with tempfile.TemporaryDirectory() as directory:
            svg = Path(directory) / 'level3.svg'
            report_path = Path(directory) / 'report.json'
            out, _ = run('render', '--config', NON_SEPARATED, '--level', '3', '--out', str(svg),
                         '--json-out', str(report_path), '--fill', '#aa0000', '--opacity', '0.75')
            report = json.loads(report_path.read_text(encoding='utf-8'))
            self.assertIn('fill="#aa0000" fill-opacity="0.75"', svg.read_text(encoding='utf-8'))
        self.assert_valid_report(report)
        self.assertEqual(report['render']['rectangles'], 27)
        self.assertIn("27 rectangles at level 3", out)

    def test_bad_opacity(self):
        with tempfile.TemporaryDirectory() as directory:
            with self.assertRaises(CommandError) as ctx:
                run('render', '--config', NON_SEPARATED, '--level', '1', '--opacity', '2',
                    '--out', str(Path(directory) / 'out.svg'))
        self.assertEqual(ctx.exception.returncode, EXIT_VALIDATION)

    @tag('slow')
    def test_output_is_independent_of_threads(self):
        with tempfile.TemporaryDirectory() as directory:
            paths = []
            for threads in ('1', '4', '4'):
                path = Path(directory) / f'level7-{threads}-{len(paths)}.svg'
                run('render', '--config', NON_SEPARATED, '--level', '7', '--out', str(path),
                    '--threads', threads)
                paths.append(path)
            contents = [path.read_bytes() for path in paths]
        self.assertEqual(contents[0], contents[1])
        self.assertEqual(contents[1], contents[2])
        self.assertEqual(contents[0].count(b'<rect '), 2187)
