import math
from fractions import Fraction as F

import numpy as np
from django.test import SimpleTestCase

from ifs_core.fixtures import (
    block_type_example, corner_system, full_grid, non_separated_example,
)
from ifs_core.models import BoxLikeIFS, DihedralElement, ReducibleSystemError, Rect
from ifs_core.utils import from_target_rect

from .models import Edge, LineMap, Method, Node, ProjectionSystem
from .utils import (
    adjacency_matrix, build_projection_system, detect_block_type, interior_disjoint,
    is_symmetric_at, node_is_separated, projection_dims, reduce_system, solve_gd_dimension,
    solve_moran, spectral_radius,
)

T_NON_SEPARATED = 0.890959


def overlapping_columns():
    """x-extents overlap, y-extents leave a gap, so the system is not of block type."""
    return BoxLikeIFS(tuple(
        from_target_rect(DihedralElement.ID, target) for target in (
            Rect(0, F(1, 2), 0, F(1, 4)),
            Rect(F(1, 4), F(3, 4), F(1, 2), F(3, 4)),
            Rect(F(1, 2), 1, 0, F(1, 4)),
        )
    ))


class LineMapTests(SimpleTestCase):
    def test_reflections(self):
        g = LineMap(F(2, 5), F(3, 5))
        self.assertEqual(g.reflect_before(), LineMap(F(2, 5), F(1), -1))
        self.assertEqual(g.reflect_after(), LineMap(F(2, 5), F(2, 5), -1))
        for x in (F(0), F(1, 3), F(1)):
            self.assertEqual(g.reflect_before()(x), g(1 - x))
            self.assertEqual(g.reflect_after()(x), 1 - g(x))

    def test_image(self):
        self.assertEqual(LineMap(F(1, 4), F(1, 4), -1).image(), (F(0), F(1, 4)))

    def test_interior_disjoint(self):
        self.assertTrue(interior_disjoint([(F(0), F(1, 4)), (F(3, 4), F(1)), (F(1, 4), F(3, 4))]))
        self.assertFalse(interior_disjoint([(F(0), F(1, 2)), (F(1, 4), F(3, 4))]))


class NonSeparatedSystemTests(SimpleTestCase):
    def setUp(self):
        self.raw = build_projection_system(non_separated_example())
        self.system = reduce_system(self.raw)

    def test_raw_edges(self):
        self.assertEqual(len(self.raw.edges), 6)
        self.assertEqual(len(self.raw.edges_into(Node.X)), 3)

    def test_symmetric_at_y_only(self):
        self.assertEqual(self.system.symmetric, frozenset({Node.Y}))
        self.assertTrue(is_symmetric_at(list(self.raw.edges), Node.Y))
        self.assertFalse(is_symmetric_at(list(self.raw.edges), Node.X))

    def test_reflected_pair_merged(self):
        self.assertEqual(len(self.system.edges), 5)
        self.assertEqual(len(self.system.dedupe_log), 1)
        self.assertIn("merged", self.system.dedupe_log[0])

    def test_reduced_matrix(self):
        t = 0.7
        expected = np.array([[0.4 ** t, 0.4 ** t], [2 * 0.25 ** t, 0.5 ** t]])
        np.testing.assert_allclose(adjacency_matrix(self.system, t), expected, rtol=1e-14)

    def test_reduction_is_idempotent(self):
        again = reduce_system(self.system)
        self.assertEqual(again.canonical(), self.system.canonical())
        self.assertEqual(again.symmetric, self.system.symmetric)
        self.assertEqual(again.dedupe_log, self.system.dedupe_log)

    def test_pieces_are_separated(self):
        self.assertTrue(node_is_separated(self.system, Node.X))
        self.assertTrue(node_is_separated(self.system, Node.Y))

    def test_graph_directed_root(self):
        root = solve_gd_dimension(self.system)
        self.assertAlmostEqual(root.value, T_NON_SEPARATED, delta=1e-4)
        self.assertFalse(root.clamped)
        self.assertAlmostEqual(spectral_radius(adjacency_matrix(self.system, T_NON_SEPARATED)), 1.0,
                               delta=1e-5)
        self.assertAlmostEqual(spectral_radius(adjacency_matrix(self.system, root.value)), 1.0,
                               delta=1e-10)


class SolverTests(SimpleTestCase):
    def test_moran(self):
        self.assertAlmostEqual(solve_moran([F(1, 2), F(1, 2)]).value, 1.0, places=10)
        self.assertAlmostEqual(solve_moran([F(1, 4), F(1, 4)]).value, 0.5, places=10)
        self.assertAlmostEqual(solve_moran([F(2, 5), F(2, 5)]).value,
                               math.log(2) / math.log(5 / 2), places=10)

    def test_moran_clamps_above_one(self):
        root = solve_moran([F(1, 2)] * 3)
        self.assertEqual(root.value, 1.0)
        self.assertTrue(root.clamped)
        self.assertAlmostEqual(root.unclamped, math.log(3) / math.log(2), places=9)

    def test_moran_single_ratio(self):
        self.assertEqual(solve_moran([F(1, 2)]).value, 0.0)

    def test_spectral_radius(self):
        self.assertAlmostEqual(spectral_radius([[1, 0], [0, 1]]), 1.0)
        self.assertAlmostEqual(spectral_radius([[0, 1], [1, 0]]), 1.0)
        self.assertAlmostEqual(spectral_radius([[2, 1], [1, 2]]), 3.0)

    def test_spectral_radius_strictly_decreases_in_t(self):
        system = reduce_system(build_projection_system(non_separated_example()))
        radii = [spectral_radius(adjacency_matrix(system, t)) for t in np.linspace(0.0, 3.0, 61)]
        for earlier, later in zip(radii, radii[1:]):
            self.assertLess(later, earlier)

    def test_spectral_radius_matches_eigvals(self):
        system = reduce_system(build_projection_system(non_separated_example()))
        for t in (0.0, 0.3, 0.89, 1.0, 1.7):
            matrix = adjacency_matrix(system, t)
            self.assertAlmostEqual(spectral_radius(matrix), max(abs(np.linalg.eigvals(matrix))), places=12)

    def test_reducible_system_rejected(self):
        half = LineMap(F(1, 2), F(0))
        system = ProjectionSystem((Edge(Node.X, Node.X, half), Edge(Node.Y, Node.Y, half)))
        with self.assertRaises(ReducibleSystemError):
            solve_gd_dimension(system)

    def test_graph_directed_root_clamped(self):
        edges = [
            Edge(Node.X, Node.X, LineMap(F(1, 2), F(0))),
            Edge(Node.X, Node.X, LineMap(F(1, 2), F(1, 2))),
            Edge(Node.Y, Node.Y, LineMap(F(1, 2), F(0))),
            Edge(Node.Y, Node.Y, LineMap(F(1, 2), F(1, 2))),
            Edge(Node.X, Node.Y, LineMap(F(1, 2), F(1, 4))),
            Edge(Node.Y, Node.X, LineMap(F(1, 2), F(1, 4))),
        ]
        root = solve_gd_dimension(ProjectionSystem(tuple(edges)))
        self.assertEqual(root.value, 1.0)
        self.assertTrue(root.clamped)
        self.assertAlmostEqual(root.unclamped, math.log(3) / math.log(2), places=9)


class BlockTypeTests(SimpleTestCase):
    def test_detection(self):
        self.assertTrue(detect_block_type(block_type_example()))
        self.assertTrue(detect_block_type(full_grid()))
        self.assertFalse(detect_block_type(non_separated_example()))
        self.assertFalse(detect_block_type(corner_system()))


class ProjectionDimsTests(SimpleTestCase):
    def test_non_separated_example(self):
        dims = projection_dims(non_separated_example())
        self.assertAlmostEqual(dims.s1, T_NON_SEPARATED, delta=1e-4)
        self.assertEqual(dims.s1, dims.s2)
        self.assertEqual(dims.method, Method.GRAPH_DIRECTED.value)
        self.assertTrue(dims.rigorous)
        self.assertFalse(dims.clamped)
        self.assertEqual(dims.symmetric_nodes, ('Y',))

    def test_block_type_example(self):
        dims = projection_dims(block_type_example())
        self.assertEqual((dims.s1, dims.s2), (1.0, 1.0))
        self.assertEqual(dims.method, Method.BLOCK_TYPE.value)
        self.assertTrue(dims.rigorous)

    def test_rotation_free_variant_is_moran(self):
        dims = projection_dims(non_separated_example().with_isometries())
        self.assertEqual(dims.method, Method.MORAN.value)
        self.assertAlmostEqual(dims.s1, math.log(2) / math.log(5 / 2), places=9)
        self.assertAlmostEqual(dims.s2, 1.0, places=9)
        self.assertEqual(len(dims.dedupe_log), 1)
        self.assertTrue(dims.rigorous)

    def test_corner_system(self):
        dims = projection_dims(corner_system())
        self.assertAlmostEqual(dims.s1, 0.5, places=10)
        self.assertAlmostEqual(dims.s2, 0.5, places=10)

    def test_literal_duplicate_removed(self):
        ifs = BoxLikeIFS((
            from_target_rect(DihedralElement.ID, Rect(0, F(1, 2), 0, F(1, 2))),
            from_target_rect(DihedralElement.ID, Rect(0, F(1, 2), F(1, 2), 1)),
        ))
        dims = projection_dims(ifs)
        self.assertEqual(dims.s1, 0.0)
        self.assertAlmostEqual(dims.s2, 1.0, places=10)
        self.assertEqual(len(dims.dedupe_log), 1)
        self.assertIn("duplicate", dims.dedupe_log[0])

    def test_overlapping_pieces_are_flagged(self):
        dims = projection_dims(overlapping_columns())
        self.assertFalse(dims.rigorous)
        self.assertTrue(dims.clamped)
        self.assertEqual(dims.s1, 1.0)
        self.assertAlmostEqual(dims.s2, 0.5, places=10)
        self.assertTrue(dims.notes)

    def test_overrides(self):
        dims = projection_dims(non_separated_example(), overrides={'s1': 0.5})
        self.assertEqual(dims.s1, 0.5)
        self.assertAlmostEqual(dims.s2, T_NON_SEPARATED, delta=1e-4)
        self.assertEqual(dims.method, "Override/GraphDirected")

        both = projection_dims(overlapping_columns(), overrides={'s1': 0.6, 's2': 0.7})
        self.assertEqual((both.s1, both.s2), (0.6, 0.7))
        self.assertTrue(both.rigorous)
        self.assertFalse(both.clamped)
