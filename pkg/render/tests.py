import tempfile
from fractions import Fraction as F
from pathlib import Path

from django.test import SimpleTestCase

from ifs_core.fixtures import full_grid, non_separated_example
from ifs_core.models import RenderLimitExceeded, RenderOutputError, UNIT_SQUARE

from .utils import emit_svg, level_rects, svg_document


class LevelRectsTests(SimpleTestCase):
    def test_count_and_order(self):
        rects = level_rects(non_separated_example(), 3)
        self.assertEqual(len(rects), 27)
        self.assertEqual([rect.word for rect in rects[:4]], [(0, 0, 0), (0, 0, 1), (0, 0, 2), (0, 1, 0)])
        self.assertTrue(all(rect.depth == 3 for rect in rects))

    def test_rectangles_stay_axis_parallel(self):
        self.assertTrue(all(rect.is_axis_parallel for rect in level_rects(non_separated_example(), 4)))

    def test_corners_follow_the_map(self):
        rotated = level_rects(non_separated_example(), 1)[1]
        self.assertEqual(rotated.corners[0], (F(1), F(3, 4)))
        self.assertEqual(rotated.bounds.as_tuple(), (F(3, 5), F(1), F(3, 4), F(1)))

    def test_children_nest_in_parents(self):
        ifs = non_separated_example()
        parents = {rect.word: rect.bounds for rect in level_rects(ifs, 4)}
        children = level_rects(ifs, 5)
        for rect in children:
            self.assertTrue(parents[rect.word[:-1]].contains(rect.bounds))
        self.assertTrue(all(UNIT_SQUARE.contains(rect.bounds) for rect in children))

    def test_areas_are_exact(self):
        rects = level_rects(full_grid(), 2)
        self.assertEqual(sum(rect.area for rect in rects), 1)

    def test_level_guard(self):
        with self.assertRaises(RenderLimitExceeded):
            level_rects(full_grid(), 0)
        with self.assertRaises(RenderLimitExceeded):
            level_rects(full_grid(), 11)
        self.assertEqual(len(level_rects(full_grid(), 3, max_level=3)), 64)


class SvgTests(SimpleTestCase):
    def test_document_layout(self):
        document = svg_document(level_rects(full_grid(), 1), viewport=800, fill='#336699', opacity=0.5)
        self.assertTrue(document.startswith('<?xml version="1.0" encoding="UTF-8"?>\n<svg '))
        self.assertIn('<path d="M0 0 H800 V800 H0 Z" fill="none"', document)
        self.assertIn('<g fill="#336699" fill-opacity="0.5">', document)
        self.assertEqual(document.count('<rect '), 4)
        # y points up: the bottom-left quarter sits in the lower half of the canvas
        self.assertIn('<rect x="0" y="400" width="400" height="400"/>', document)
        self.assertIn('<rect x="400" y="0" width="400" height="400"/>', document)

    def test_non_integer_coordinates(self):
        document = svg_document(level_rects(non_separated_example(), 1), viewport=100)
        self.assertIn('<rect x="0" y="25" width="40" height="50"/>', document)
        document = svg_document(level_rects(non_separated_example(), 1), viewport=7)
        self.assertIn('width="2.8"', document)

    def test_coordinates_round_to_six_decimals(self):
        # half of a 1/3 viewport is 1/6
        document = svg_document(level_rects(full_grid(), 1), viewport=F(1, 3))
        self.assertIn('width="0.166667"', document)

    def test_byte_identical_output(self):
        ifs = non_separated_example()
        with tempfile.TemporaryDirectory() as directory:
            first = emit_svg(level_rects(ifs, 7), Path(directory) / 'first.svg')
            second = emit_svg(level_rects(ifs, 7), Path(directory) / 'second.svg')
            self.assertEqual(first.read_bytes(), second.read_bytes())
            self.assertEqual(first.read_text().count('<rect '), 2187)

    def test_unwritable_path(self):
        with tempfile.TemporaryDirectory() as directory:
            with self.assertRaises(RenderOutputError):
                emit_svg(level_rects(full_grid(), 1), Path(directory) / 'missing' / 'out.svg')
