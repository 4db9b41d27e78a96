import math
import random
from itertools import product

from django.test import SimpleTestCase, tag
from scipy.optimize import brentq

from ifs_core.fixtures import (
    block_type_example, corner_system, full_grid, grid_carpet, non_separated_example,
    overlapping_system,
)
from ifs_core.models import OrientationClass, SizeState, StateLimitExceeded
from ifs_core.utils import alpha_extremes, extend_size
from projections.models import Method, ProjectionDims
from projections.utils import projection_dims

from .models import ExponentState, LevelTable, PressureParams
from .utils import (
    LevelTerms, advance_level, affinity_dimension, estimate_dimension, extrapolate,
    gap_diagnostic, iter_level_tables, level_table, multiplicative_root, phi,
    pressure_estimate, psi, psi_sum, solve_affinity_root, solve_level_root,
)

LOG3_OVER_LOG4 = math.log(3) / math.log(4)
ACCEPTANCE_SCHEDULE = (6, 12, 24, 48)


def size_of(word, ifs):
    state = SizeState()
    for letter in word:
        state = extend_size(state, letter, ifs)
    return state


def brute_force_log_psi(ifs, k, s_values, params):
    """log of the sum of psi^s over all m^k words, one value per s."""
    states = [size_of(word, ifs) for word in product(range(ifs.m), repeat=k)]
    return [
        math.log(math.fsum(math.exp(psi(s, state, params)) for state in states))
        for s in s_values
    ]


def params_for(ifs):
    return PressureParams.from_dims(projection_dims(ifs))


class SingularValueFunctionTests(SimpleTestCase):
    def test_square_word_ignores_exponent_split(self):
        ifs = non_separated_example()
        params = params_for(ifs)
        state = size_of((1, 2), ifs)
        self.assertIs(state.cls, OrientationClass.A)
        self.assertAlmostEqual(psi(1.0, state, params), math.log(0.1), places=12)

    def test_psi_at_state_dimension_has_no_short_side_factor(self):
        params = PressureParams(0.7, 0.4)
        state = SizeState(OrientationClass.A, math.log(0.5), math.log(0.2))
        self.assertAlmostEqual(psi(0.7, state, params), 0.7 * math.log(0.5), places=14)

    def test_psi_direct_substitution(self):
        state = SizeState(OrientationClass.A, math.log(0.5), math.log(0.3))
        self.assertAlmostEqual(psi(1.15, state, PressureParams(1.0, 1.0)),
                               math.log(0.5) + 0.15 * math.log(0.3), places=14)

    def test_psi_picks_projection_by_class(self):
        params = PressureParams(0.8, 0.3)
        wide = (math.log(0.5), math.log(0.1))
        self.assertAlmostEqual(psi(1.0, SizeState(OrientationClass.A, *wide), params),
                               0.8 * wide[0] + 0.2 * wide[1], places=14)
        self.assertAlmostEqual(psi(1.0, SizeState(OrientationClass.B, *wide), params),
                               0.3 * wide[0] + 0.7 * wide[1], places=14)

    def test_psi_rejects_negative_s(self):
        with self.assertRaises(ValueError):
            psi(-0.1, SizeState(), PressureParams(1.0, 1.0))

    def test_phi(self):
        self.assertAlmostEqual(phi(1.0, 0.5, 0.25), math.log(0.5))
        self.assertAlmostEqual(phi(2.0, 0.5, 0.25), math.log(0.125))
        self.assertAlmostEqual(phi(1.5, 0.5, 0.25), math.log(0.25))
        with self.assertRaises(ValueError):
            phi(2.5, 0.5, 0.25)

    def test_exponent_state_matches_word(self):
        ifs = non_separated_example()
        params = params_for(ifs)
        state = ExponentState(OrientationClass.A, (0, 1, 0), (0, 0, 1))
        self.assertEqual(state.level, 2)
        self.assertAlmostEqual(psi(1.3, state, params, ifs),
                               psi(1.3, size_of((1, 2), ifs), params), places=14)


class LevelTableTests(SimpleTestCase):
    def test_binomial_counts(self):
        ifs = grid_carpet(2, 2, [(0, 0), (1, 1)])
        table = level_table(2, ifs)
        A = OrientationClass.A
        self.assertEqual(table.states, {
            (A, (0, 2), (0, 0)): 1,
            (A, (1, 1), (0, 0)): 2,
            (A, (2, 0), (0, 0)): 1,
        })

    def test_total_count_is_m_to_the_k(self):
        ifs = non_separated_example()
        for k, table in iter_level_tables(ifs, (1, 2, 5, 9)):
            self.assertEqual(table.total_count(), 3 ** k)
            self.assertEqual(sum(state.level == k for state in table.iter_states()), len(table))

    def test_exact_counts_beyond_64_bits(self):
        table = level_table(40, full_grid())
        self.assertEqual(table.total_count(), 4 ** 40)
        multinomial = math.factorial(40) // math.factorial(10) ** 4
        key = (OrientationClass.A, (10, 10, 10, 10), (0, 0, 0, 0))
        self.assertEqual(table.states[key], multinomial)
        for log_count, count in zip(table.log_counts(), table.counts):
            self.assertAlmostEqual(log_count / math.log(count) if count > 1 else log_count + 1, 1.0,
                                   places=12)

    def test_tables_are_read_only(self):
        table = level_table(2, non_separated_example())
        self.assertFalse(table.cls.flags.writeable)
        self.assertFalse(table.limbs.flags.writeable)

    def test_single_pass_matches_separate_tables(self):
        ifs = block_type_example()
        for k, table in iter_level_tables(ifs, (3, 5)):
            self.assertEqual(table.states, level_table(k, ifs).states)

    def test_chunking_and_threads_do_not_change_tables(self):
        ifs = non_separated_example()
        plain = level_table(5, ifs)
        table = LevelTable.empty(ifs.m)
        for _ in range(6):
            table = advance_level(table, ifs, threads=4, chunk_size=5)
        self.assertEqual(table.states, advance_level(plain, ifs).states)

    def test_state_limit(self):
        ifs = non_separated_example()
        with self.assertRaises(StateLimitExceeded):
            advance_level(LevelTable.empty(ifs.m), ifs, state_limit=1)

    def test_mismatched_alphabet_rejected(self):
        with self.assertRaises(ValueError):
            advance_level(LevelTable.empty(2), non_separated_example())


class BruteForceOracleTests(SimpleTestCase):
    """Sums over level tables against explicit enumeration of every word."""

    def check(self, ifs, levels):
        params = params_for(ifs)
        s_values = (0.0, 0.5, params.total, 1.7)
        for k, table in iter_level_tables(ifs, levels):
            terms = LevelTerms(table, ifs, params)
            expected = brute_force_log_psi(ifs, k, s_values, params)
            for s, log_expected in zip(s_values, expected):
                self.assertAlmostEqual(terms.log_psi_sum(s), log_expected, delta=1e-11,
                                       msg=f"{ifs.name} k={k} s={s}")

    def test_non_separated_example(self):
        self.check(non_separated_example(), (1, 2, 3, 5, 8))

    def test_block_type_example(self):
        self.check(block_type_example(), (1, 4, 8))

    def test_rotation_free_variant(self):
        self.check(non_separated_example().with_isometries(), (3, 8))

    def test_overlapping_system(self):
        self.check(overlapping_system(), (2, 6))

    def test_two_letter_carpet(self):
        self.check(grid_carpet(3, 4, [(0, 0), (2, 3)]), (1, 8))


class MultiplicativityTests(SimpleTestCase):
    def test_level_sums_multiply_at_total_dimension(self):
        for ifs in (non_separated_example(), block_type_example()):
            params = params_for(ifs)
            s = params.total
            tables = dict(iter_level_tables(ifs, (1, 2, 3, 4, 5, 8)))
            for k, l in ((1, 1), (2, 3), (4, 4)):
                joined = psi_sum(k + l, s, ifs, params, tables[k + l])
                split = psi_sum(k, s, ifs, params, tables[k]) + psi_sum(l, s, ifs, params, tables[l])
                self.assertAlmostEqual(joined, split, delta=1e-10, msg=f"{ifs.name} k={k} l={l}")

    def test_word_level_inequalities(self):
        rng = random.Random(2024)
        for ifs in (non_separated_example(), block_type_example()):
            params = params_for(ifs)
            total = params.total
            for _ in range(100):
                i = tuple(rng.randrange(ifs.m) for _ in range(rng.randint(1, 6)))
                j = tuple(rng.randrange(ifs.m) for _ in range(rng.randint(1, 6)))
                below, above = rng.uniform(0, total), rng.uniform(total, total + 1)

                def gap(s):
                    joined = psi(s, size_of(i + j, ifs), params)
                    return joined - psi(s, size_of(i, ifs), params) - psi(s, size_of(j, ifs), params)

                self.assertLessEqual(gap(below), 1e-12)
                self.assertGreaterEqual(gap(above), -1e-12)
                self.assertAlmostEqual(gap(total), 0.0, delta=1e-10)


class PressureBoundsTests(SimpleTestCase):
    def test_shifting_s_scales_by_extreme_contractions(self):
        rng = random.Random(11)
        for ifs in (non_separated_example(), block_type_example()):
            params = params_for(ifs)
            alpha_min, alpha_max = (math.log(value) for value in alpha_extremes(ifs))
            for k, table in iter_level_tables(ifs, (1, 3, 6)):
                terms = LevelTerms(table, ifs, params)
                for _ in range(10):
                    s, t = rng.uniform(0, 1), rng.uniform(0, 2)
                    shift = terms.log_psi_sum(s + t) - terms.log_psi_sum(t)
                    self.assertGreaterEqual(shift, k * s * alpha_min - 1e-12)
                    self.assertLessEqual(shift, k * s * alpha_max + 1e-12)

    def test_level_sums_strictly_decrease(self):
        ifs = non_separated_example()
        terms = LevelTerms(level_table(5, ifs), ifs, params_for(ifs))
        values = [terms.log_psi_sum(s / 10) for s in range(0, 21)]
        for earlier, later in zip(values, values[1:]):
            self.assertLess(later, earlier)

    def test_root_is_bracketed(self):
        ifs = block_type_example()
        params = params_for(ifs)
        terms = LevelTerms(level_table(4, ifs), ifs, params)
        root = solve_level_root(4, ifs, params, terms=terms)
        self.assertGreater(terms.log_psi_sum(root.lower), 0)
        self.assertLess(terms.log_psi_sum(root.upper), 0)
        self.assertLessEqual(root.lower, root.value)
        self.assertLessEqual(root.value, root.upper)

    def test_doubling_levels_do_not_increase(self):
        for ifs in (non_separated_example(), block_type_example()):
            params = params_for(ifs)
            tables = dict(iter_level_tables(ifs, (2, 4, 8)))
            roots = [solve_level_root(k, ifs, params, table=tables[k]).value for k in (2, 4, 8)]
            affinity = [solve_affinity_root(k, ifs, table=tables[k]).value for k in (2, 4, 8)]
            for sequence in (roots, affinity):
                for earlier, later in zip(sequence, sequence[1:]):
                    self.assertLessEqual(later, earlier + 1e-9)


class LevelSumTests(SimpleTestCase):
    def test_block_type_level_one(self):
        ifs = block_type_example()
        self.assertAlmostEqual(math.exp(psi_sum(1, 1.0, ifs, PressureParams(1.0, 1.0))), 1.6,
                               places=12)

    def test_full_grid_sums_to_one(self):
        ifs = full_grid()
        params = PressureParams(1.0, 1.0)
        for k in (1, 2, 5):
            self.assertAlmostEqual(psi_sum(k, 2.0, ifs, params), 0.0, delta=1e-12)

    def test_pressure_estimate_at_level_root(self):
        ifs = non_separated_example()
        params = params_for(ifs)
        table = level_table(6, ifs)
        root = solve_level_root(6, ifs, params, table=table)
        pressure, log_pressure = pressure_estimate(6, root.value, ifs, params, table=table)
        self.assertAlmostEqual(pressure, 1.0, places=8)
        self.assertAlmostEqual(log_pressure, 0.0, places=8)

    def test_chunked_sums_are_thread_independent(self):
        ifs = non_separated_example()
        params = params_for(ifs)
        table = level_table(7, ifs)
        serial = LevelTerms(table, ifs, params, threads=1, chunk_size=11)
        pooled = LevelTerms(table, ifs, params, threads=4, chunk_size=11)
        for s in (0.3, 1.1, 1.9):
            self.assertEqual(serial.log_psi_sum(s), pooled.log_psi_sum(s))
            self.assertEqual(serial.log_phi_sum(s), pooled.log_phi_sum(s))
        self.assertAlmostEqual(serial.log_psi_sum(1.1), LevelTerms(table, ifs, params).log_psi_sum(1.1),
                               delta=1e-12)

    def test_modified_sums_need_projection_dimensions(self):
        terms = LevelTerms(level_table(1, full_grid()), full_grid())
        with self.assertRaises(ValueError):
            terms.log_psi_sum(1.0)


class ClosedFormTests(SimpleTestCase):
    def test_full_grid_is_two_at_every_level(self):
        ifs = full_grid()
        params = params_for(ifs)
        for k in (1, 2, 3, 6):
            self.assertAlmostEqual(solve_level_root(k, ifs, params).value, 2.0, delta=1e-6)
            self.assertAlmostEqual(solve_affinity_root(k, ifs).value, 2.0, delta=1e-6)

    def test_corner_system_at_every_level(self):
        ifs = corner_system()
        dims = projection_dims(ifs)
        params = PressureParams.from_dims(dims)
        for k, table in iter_level_tables(ifs, (1, 2, 4, 8)):
            self.assertAlmostEqual(solve_level_root(k, ifs, params, table=table).value,
                                   LOG3_OVER_LOG4, delta=1e-9)
        self.assertAlmostEqual(multiplicative_root(ifs, dims), LOG3_OVER_LOG4, delta=1e-9)

    def test_carpet_formula(self):
        # 3 columns, 4 rows, 4 cells in 2 occupied columns
        ifs = grid_carpet(3, 4, [(0, 0), (2, 1), (0, 3), (2, 2)])
        dims = projection_dims(ifs)
        expected = math.log(2) / math.log(3) + math.log(4 / 2) / math.log(4)
        self.assertAlmostEqual(dims.s1, math.log(2) / math.log(3), places=10)
        self.assertAlmostEqual(multiplicative_root(ifs, dims), expected, delta=1e-9)
        params = PressureParams.from_dims(dims)
        for k, table in iter_level_tables(ifs, (1, 3, 6)):
            self.assertAlmostEqual(solve_level_root(k, ifs, params, table=table).value, expected,
                                   delta=1e-9)

    def test_no_closed_form_for_non_separated_systems(self):
        ifs = non_separated_example()
        self.assertIsNone(multiplicative_root(ifs, projection_dims(ifs)))

    def test_extrapolate(self):
        self.assertAlmostEqual(extrapolate((6, 12), (1.2, 1.1)), 1.0)
        self.assertEqual(extrapolate((6,), (1.2,)), 1.2)


class EstimateTests(SimpleTestCase):
    def test_full_grid_estimate(self):
        ifs = full_grid()
        estimate = estimate_dimension(ifs, projection_dims(ifs), schedule=(2, 4))
        self.assertEqual(estimate.kind, 'modified')
        for root in estimate.roots:
            self.assertAlmostEqual(root, 2.0, delta=1e-6)
        self.assertAlmostEqual(estimate.extrapolated, 2.0, delta=1e-6)
        self.assertTrue(estimate.flags['projection_rigorous'])

    def test_affinity_level_one_oracle(self):
        pairs = [(0.5, 0.3), (0.5, 0.2), (0.6, 0.25)]

        def total(s):
            return sum(a1 ** min(s, 1) * a2 ** max(s - 1, 0) for a1, a2 in pairs) - 1

        expected = brentq(total, 1.0, 2.0, xtol=1e-14)
        self.assertAlmostEqual(solve_affinity_root(1, block_type_example()).value, expected, delta=1e-9)

    def test_block_type_modified_equals_affinity(self):
        ifs = block_type_example()
        tables = dict(iter_level_tables(ifs, (1, 2, 4, 6)))
        schedule = (1, 2, 4, 6)
        modified = estimate_dimension(ifs, projection_dims(ifs), schedule, tables)
        affinity = affinity_dimension(ifs, schedule, tables)
        for left, right in zip(modified.roots, affinity.roots):
            self.assertAlmostEqual(left, right, delta=1e-9)

    def test_overrides_drive_the_bracket(self):
        ifs = overlapping_system()
        dims = ProjectionDims(0.6, 0.6, Method.OVERRIDE, Method.OVERRIDE, rigorous=True)
        estimate = estimate_dimension(ifs, dims, schedule=(2, 4))
        for root in estimate.roots:
            self.assertLessEqual(root, 1.2 + 1e-9)
        self.assertAlmostEqual(estimate.final_upper, 1.2, delta=1e-9)
        self.assertEqual((estimate.s1, estimate.s2), (0.6, 0.6))

    def test_unrigorous_projections_widen_the_bracket(self):
        ifs = overlapping_system()
        dims = ProjectionDims(0.6, 0.6, Method.MORAN, Method.MORAN, rigorous=False)
        estimate = estimate_dimension(ifs, dims, schedule=(2,))
        self.assertGreater(estimate.final_upper, 1.2)
        self.assertIn("roots bracketed on [0, 2]", estimate.notes[-1])


class GapTests(SimpleTestCase):
    def test_block_type_has_no_room(self):
        ifs = block_type_example()
        report = gap_diagnostic(ifs, projection_dims(ifs), 4)
        self.assertLessEqual(report.epsilon, 0)
        self.assertFalse(report.gap_detected)
        self.assertIsNone(report.eta)

    def test_square_words_block_certificate(self):
        ifs = corner_system()
        report = gap_diagnostic(ifs, projection_dims(ifs), 3)
        self.assertGreater(report.epsilon, 0)
        self.assertEqual(report.eta, 1.0)
        self.assertFalse(report.gap_detected)

    def test_gap_detected_for_thin_column(self):
        ifs = grid_carpet(3, 4, [(0, 0), (0, 3)])
        report = gap_diagnostic(ifs, projection_dims(ifs), 3)
        self.assertAlmostEqual(report.affinity_upper, math.log(2) / math.log(3), delta=1e-9)
        self.assertAlmostEqual(report.epsilon, math.log(2) / math.log(3) - 0.5, delta=1e-8)
        self.assertAlmostEqual(report.eta, 0.75, places=12)
        self.assertLess(report.bound, 1)
        self.assertTrue(report.gap_detected)

    def test_non_separated_example_has_room(self):
        ifs = non_separated_example()
        report = gap_diagnostic(ifs, projection_dims(ifs), 6)
        self.assertGreater(report.epsilon, 0)
        self.assertLessEqual(report.eta, 1.0)
        self.assertLessEqual(report.bound, 1.0)


@tag('slow')
class AcceptanceTests(SimpleTestCase):
    """Full doubling schedule up to level 48 on the worked examples and their rotation-free variants."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.estimates = {}
        for key, ifs in (
            ('non_separated', non_separated_example()),
            ('non_separated_plain', non_separated_example().with_isometries()),
            ('block_type', block_type_example()),
            ('block_type_plain', block_type_example().with_isometries()),
        ):
            tables = dict(iter_level_tables(ifs, ACCEPTANCE_SCHEDULE))
            cls.estimates[key] = (
                estimate_dimension(ifs, projection_dims(ifs), ACCEPTANCE_SCHEDULE, tables),
                affinity_dimension(ifs, ACCEPTANCE_SCHEDULE, tables) if key == 'block_type' else None,
            )

    def assert_strictly_decreasing(self, roots):
        for earlier, later in zip(roots, roots[1:]):
            self.assertLess(later, earlier + 1e-9)

    def test_non_separated_estimate(self):
        estimate, _ = self.estimates['non_separated']
        self.assert_strictly_decreasing(estimate.roots)
        self.assertLessEqual(estimate.final_upper, 1.12)
        self.assertAlmostEqual(estimate.extrapolated, 1.09, delta=0.03)

    def test_block_type_estimate(self):
        estimate, affinity = self.estimates['block_type']
        self.assertEqual((estimate.s1, estimate.s2), (1.0, 1.0))
        self.assertAlmostEqual(estimate.extrapolated, 1.15, delta=0.03)
        for left, right in zip(estimate.roots, affinity.roots):
            self.assertAlmostEqual(left, right, delta=1e-9)

    def test_rotations_lower_the_non_separated_dimension(self):
        rotated, _ = self.estimates['non_separated']
        plain, _ = self.estimates['non_separated_plain']
        self.assertAlmostEqual(plain.extrapolated, 1.11349, delta=0.03)
        self.assertLess(rotated.final_upper, plain.final_upper)

    def test_rotations_lower_the_block_type_dimension(self):
        rotated, _ = self.estimates['block_type']
        plain, _ = self.estimates['block_type_plain']
        self.assertAlmostEqual(plain.extrapolated, 1.18405, delta=0.03)
        self.assertLess(rotated.final_upper, plain.final_upper)
