import math
from fractions import Fraction as F
from functools import reduce
from itertools import combinations_with_replacement, product

from django.test import SimpleTestCase
from rest_framework.exceptions import ErrorDetail

from .config import canonical_config, parse_config, parse_config_text
from .fixtures import (
    block_type_example, corner_system, full_grid, non_separated_example, overlapping_system,
)
from .models import (
    AffineMapSpec, BoxLikeIFS, ConfigError, DihedralElement, InvalidMapError,
    OrientationClass, Rect, SizeState, SystemType, UNIT_SQUARE, _matmul, from_matrix,
)
from .serializers import flatten_errors
from .utils import (
    alpha_extremes, check_rosc, classify_map, classify_system, compose_maps, extend_size,
    format_rational, from_target_rect, image_rect, parse_rational, split_index_sets,
    word_size, word_transform,
)

SWAPPING = {
    DihedralElement.ROT90, DihedralElement.ROT270,
    DihedralElement.REFLECT_DIAG, DihedralElement.REFLECT_ANTI,
}


class DihedralElementTests(SimpleTestCase):
    def test_group_table_matches_matrix_products(self):
        for g in DihedralElement:
            for h in DihedralElement:
                self.assertEqual(g.compose(h).matrix, _matmul(g.matrix, h.matrix))

    def test_every_element_has_an_inverse(self):
        for g in DihedralElement:
            self.assertIs(g.compose(g.inverse()), DihedralElement.ID)
            self.assertIs(g.inverse().compose(g), DihedralElement.ID)

    def test_rotations_are_clockwise(self):
        self.assertEqual(DihedralElement.ROT90.matrix, ((0, 1), (-1, 0)))
        self.assertIs(DihedralElement.ROT90.compose(DihedralElement.ROT90), DihedralElement.ROT180)
        self.assertIs(DihedralElement.ROT90.compose(DihedralElement.ROT270), DihedralElement.ID)

    def test_axis_swapping_elements(self):
        self.assertEqual({g for g in DihedralElement if g.swaps_axes}, SWAPPING)

    def test_swap_parity_is_a_homomorphism(self):
        for g in DihedralElement:
            for h in DihedralElement:
                self.assertEqual(g.compose(h).swaps_axes, g.swaps_axes != h.swaps_axes)

    def test_unknown_matrix_rejected(self):
        with self.assertRaises(InvalidMapError):
            from_matrix(((2, 0), (0, 1)))


class RectTests(SimpleTestCase):
    def test_shared_edges_do_not_overlap(self):
        left = Rect(0, F(1, 2), 0, 1)
        right = Rect(F(1, 2), 1, 0, 1)
        self.assertFalse(left.interiors_intersect(right))
        self.assertTrue(left.interiors_intersect(Rect(F(1, 4), F(3, 4), 0, 1)))

    def test_reversed_bounds_rejected(self):
        with self.assertRaises(InvalidMapError):
            Rect(1, 0, 0, 1)


class AffineMapSpecTests(SimpleTestCase):
    def test_contraction_bounds(self):
        with self.assertRaises(InvalidMapError):
            AffineMapSpec(F(1), F(1, 2), DihedralElement.ID, (0, 0))
        with self.assertRaises(InvalidMapError):
            AffineMapSpec(F(1, 2), F(0), DihedralElement.ID, (0, 0))

    def test_image_must_stay_in_unit_square(self):
        with self.assertRaises(InvalidMapError):
            AffineMapSpec(F(1, 2), F(1, 2), DihedralElement.ID, (F(3, 4), 0))

    def test_from_target_rect_hits_target_for_every_isometry(self):
        target = Rect(F(1, 5), F(3, 5), F(1, 10), F(7, 10))
        for g in DihedralElement:
            spec = from_target_rect(g, target)
            self.assertEqual(image_rect(spec), target)
            self.assertEqual((spec.a, spec.b), (F(2, 5), F(3, 5)))

    def test_from_target_rect_rotated_corner(self):
        spec = non_separated_example()[1]
        self.assertEqual((spec.a, spec.b), (F(2, 5), F(1, 4)))
        self.assertEqual(spec.iso, DihedralElement.ROT270)
        self.assertEqual(spec.t, (F(1), F(3, 4)))

    def test_degenerate_target_rejected(self):
        with self.assertRaises(InvalidMapError):
            from_target_rect(DihedralElement.ID, Rect(0, 0, 0, 1))

    def test_ifs_needs_two_maps(self):
        with self.assertRaises(InvalidMapError):
            BoxLikeIFS((full_grid()[0],))


class ClassificationTests(SimpleTestCase):
    def test_non_separated_example(self):
        ifs = non_separated_example()
        self.assertEqual([classify_map(spec) for spec in ifs],
                         [OrientationClass.A, OrientationClass.B, OrientationClass.B])
        self.assertEqual(split_index_sets(ifs), ((0,), (1, 2)))
        self.assertIs(classify_system(ifs), SystemType.NON_SEPARATED)

    def test_grid_is_separated(self):
        self.assertIs(classify_system(full_grid()), SystemType.SEPARATED)

    def test_block_type_example_is_non_separated(self):
        self.assertIs(classify_system(block_type_example()), SystemType.NON_SEPARATED)


class WordSizeTests(SimpleTestCase):
    """Base and height tracked through classes against exact matrix products."""

    def assert_matches_transform(self, word, ifs):
        alpha1, alpha2, cls = word_size(word, ifs)
        image = word_transform(word, ifs).image()
        sides = sorted([image.width, image.height], reverse=True)
        self.assertAlmostEqual(alpha1 / float(sides[0]), 1.0, places=12)
        self.assertAlmostEqual(alpha2 / float(sides[1]), 1.0, places=12)
        expected = OrientationClass.A if word_transform(word, ifs).is_diagonal else OrientationClass.B
        self.assertIs(cls, expected)

    def test_every_word_up_to_length_eight(self):
        for ifs in (non_separated_example(), block_type_example()):
            for length in range(1, 9):
                for word in product(range(ifs.m), repeat=length):
                    self.assert_matches_transform(word, ifs)

    def test_class_parity(self):
        ifs = non_separated_example()
        for length in range(1, 7):
            for word in product(range(ifs.m), repeat=length):
                swaps = sum(ifs[letter].swaps_axes for letter in word)
                expected = OrientationClass.A if swaps % 2 == 0 else OrientationClass.B
                self.assertIs(word_size(word, ifs)[2], expected)

    def test_sizes_multiply_across_concatenation(self):
        def state_of(word, ifs):
            return reduce(lambda state, letter: extend_size(state, letter, ifs), word, SizeState())

        seen = set()
        for ifs in (non_separated_example(), block_type_example()):
            words = [word for length in (1, 2, 3) for word in product(range(ifs.m), repeat=length)]
            for p, q in product(words, repeat=2):
                prefix, suffix, joined = state_of(p, ifs), state_of(q, ifs), state_of(p + q, ifs)
                if prefix.cls is OrientationClass.A:
                    expected = (prefix.log_base + suffix.log_base, prefix.log_height + suffix.log_height)
                else:
                    expected = (prefix.log_base + suffix.log_height, prefix.log_height + suffix.log_base)
                self.assertAlmostEqual(joined.log_base, expected[0], places=12)
                self.assertAlmostEqual(joined.log_height, expected[1], places=12)
                seen.add(prefix.cls)
        self.assertEqual(seen, {OrientationClass.A, OrientationClass.B})

    def test_two_quarter_turns_give_a_square(self):
        alpha1, alpha2, cls = word_size((1, 2), non_separated_example())
        self.assertAlmostEqual(alpha1, 0.1, places=14)
        self.assertAlmostEqual(alpha2, 0.1, places=14)
        self.assertIs(cls, OrientationClass.A)

    def test_empty_word_rejected(self):
        with self.assertRaises(ValueError):
            word_size((), full_grid())

    def test_compose_maps_is_word_transform(self):
        ifs = block_type_example()
        self.assertEqual(compose_maps(ifs[0], ifs[1]), word_transform((0, 1), ifs))

    def test_alpha_extremes(self):
        self.assertEqual(alpha_extremes(block_type_example()), (F(1, 5), F(3, 5)))


class RoscTests(SimpleTestCase):
    def test_worked_examples_satisfy_rosc(self):
        for ifs in (non_separated_example(), block_type_example()):
            result = check_rosc(ifs)
            self.assertTrue(result.satisfied)
            self.assertIsNone(result.witness)

    def test_overlap_witness(self):
        result = check_rosc(overlapping_system())
        self.assertFalse(result.satisfied)
        self.assertEqual(result.witness, {'kind': 'overlap', 'maps': [0, 1]})

    def test_containment_witness(self):
        result = check_rosc(full_grid(), Rect(0, F(1, 2), 0, F(1, 2)))
        self.assertFalse(result.satisfied)
        self.assertEqual(result.witness, {'kind': 'containment', 'maps': [1]})

    def test_shrinking_never_creates_an_overlap(self):
        quarters = [F(i, 4) for i in range(5)]
        rects = [Rect(x0, x1, y0, y1)
                 for x0, x1 in combinations_with_replacement(quarters, 2) if x0 < x1
                 for y0, y1 in combinations_with_replacement(quarters, 2) if y0 < y1]
        for ifs in (non_separated_example(), block_type_example(), full_grid(), corner_system()):
            self.assertTrue(check_rosc(ifs).satisfied)
            for rect in rects:
                result = check_rosc(ifs, rect)
                self.assertTrue(result.satisfied or result.witness['kind'] == 'containment',
                                msg=f"{ifs.name} on {rect}")

    def test_only_the_given_rectangle_is_checked(self):
        # overlapping on the unit square, disjoint on the invariant square [0, 1/2]^2
        ifs = BoxLikeIFS((
            from_target_rect(DihedralElement.ID, Rect(0, F(1, 2), 0, F(1, 2))),
            from_target_rect(DihedralElement.ID, Rect(F(1, 4), F(3, 4), 0, F(1, 2))),
        ))
        self.assertEqual(check_rosc(ifs).witness, {'kind': 'overlap', 'maps': [0, 1]})
        self.assertTrue(check_rosc(ifs, Rect(0, F(1, 2), 0, F(1, 2))).satisfied)

    def test_degenerate_rectangle_rejected(self):
        with self.assertRaises(InvalidMapError):
            check_rosc(full_grid(), Rect(0, 1, F(1, 2), F(1, 2)))


class RationalTests(SimpleTestCase):
    def test_parse(self):
        self.assertEqual(parse_rational("3/5"), F(3, 5))
        self.assertEqual(parse_rational(0.6), F(3, 5))
        self.assertEqual(parse_rational("0.25"), F(1, 4))
        self.assertEqual(parse_rational(1), F(1))
        with self.assertRaises(ValueError):
            parse_rational(True)

    def test_format(self):
        self.assertEqual(format_rational(F(6, 10)), "3/5")
        self.assertEqual(format_rational(F(2)), "2")


NON_SEPARATED_TOML = """
name = "non-separated"

[[map]]
iso = "reflect_v"
rect = ["0", "2/5", "1/4", "3/4"]

[[map]]
iso = "rot270"
rect = ["3/5", "1", "3/4", "1"]

[[map]]
iso = "rot90"
a = "2/5"
b = "1/4"
t = ["3/5", "1/4"]
"""


class ConfigTests(SimpleTestCase):
    def test_rect_and_raw_entries(self):
        ifs = parse_config_text(NON_SEPARATED_TOML)
        self.assertEqual(ifs.maps, non_separated_example().maps)
        self.assertEqual(ifs.name, "non-separated")

    def test_canonical_echo_parses_back(self):
        for ifs in (non_separated_example(), block_type_example()):
            echoed = parse_config(canonical_config(ifs))
            self.assertEqual(echoed.maps, ifs.maps)

    def test_canonical_echo_lists_images(self):
        data = canonical_config(non_separated_example())
        self.assertEqual(data['map'][0]['image'], ["0", "2/5", "1/4", "3/4"])
        self.assertEqual(data['map'][1]['iso'], "rot270")

    def test_missing_field_names_the_path(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config({'map': [{'a': "1/2", 'b': "1/2", 't': [0, 0]}, {'a': "1/2", 't': [0, 0]}]})
        self.assertIn("map[1].b", str(ctx.exception))

    def test_invalid_map_is_a_config_error(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config({'map': [{'rect': [0, 1, 0, "1/2"]}, {'rect': [0, "1/2", "1/2", 1]}]})
        self.assertIn("map[0]", str(ctx.exception))

    def test_single_map_rejected(self):
        with self.assertRaises(ConfigError):
            parse_config({'map': [{'rect': [0, "1/2", 0, "1/2"]}]})

    def test_unknown_isometry_rejected(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config({'map': [{'iso': 'rot45', 'rect': [0, "1/2", 0, "1/2"]},
                                  {'rect': ["1/2", 1, "1/2", 1]}]})
        self.assertIn("map[0].iso", str(ctx.exception))

    def test_error_paths_for_either_list_error_shape(self):
        entry = {'iso': [ErrorDetail("is not a valid choice.")]}
        for detail in ({'map': [{}, entry]}, {'map': {1: entry}}):
            self.assertEqual(list(flatten_errors(detail)), [("map[1].iso", "is not a valid choice.")])

    def test_bad_toml(self):
        with self.assertRaises(ConfigError):
            parse_config_text("[[map]\nrect = 1", source="broken.toml")

    def test_rotation_free_variant_keeps_images(self):
        ifs = non_separated_example()
        plain = ifs.with_isometries()
        self.assertEqual([image_rect(spec) for spec in plain], [image_rect(spec) for spec in ifs])
        self.assertIs(classify_system(plain), SystemType.SEPARATED)
        self.assertTrue(math.isclose(float(plain[1].a), 0.4))
        self.assertTrue(UNIT_SQUARE.contains(image_rect(plain[2])))
