import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from django.conf import settings
from scipy.optimize import bisect
from scipy.special import logsumexp

from ifs_core.models import OrientationClass, SizeState, StateLimitExceeded, SystemType
from ifs_core.utils import classify_system

from .models import (
    DimensionEstimate, ExponentState, GapReport, LIMB_BITS, LIMB_MASK, LevelRoot,
    LevelTable, PressureParams,
)

logger = logging.getLogger(__name__)

# log base and log height closer than this are the same side length
TIE_TOL = 1e-9


def _setting(value, name):
    return getattr(settings, name) if value is None else value


def _chunks(n, chunk_size):
    return [slice(start, min(start + chunk_size, n)) for start in range(0, n, chunk_size)]


def _map_chunks(func, slices, threads):
    if threads > 1 and len(slices) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(func, slices))
    return [func(chunk) for chunk in slices]


# ---------------------------------------------------------------------------
# Singular value functions
# ---------------------------------------------------------------------------

def state_dimension(cls, log_base, log_height, params):
    """s(state): s1 when the longer side is the one projecting onto the x-axis of F."""
    base_longer = log_base - log_height >= -TIE_TOL
    if cls is OrientationClass.A:
        return params.s1 if base_longer else params.s2
    return params.s2 if base_longer else params.s1


def _sizes_of(state, ifs):
    if isinstance(state, SizeState):
        return state.cls, state.log_base, state.log_height
    log_base, log_height = state.log_sizes(ifs)
    return state.cls, log_base, log_height


def psi(s, state, params, ifs=None):
    """log of the modified singular value function of one state (or SizeState)."""
    if s < 0:
        raise ValueError(f"psi needs s >= 0, got {s}")
    cls, log_base, log_height = _sizes_of(state, ifs)
    s_state = state_dimension(cls, log_base, log_height, params)
    log_alpha1, log_alpha2 = max(log_base, log_height), min(log_base, log_height)
    return s_state * log_alpha1 + (s - s_state) * log_alpha2


def phi(s, alpha1, alpha2):
    """log of the singular value function of a planar map."""
    if not 0 <= s <= 2:
        raise ValueError(f"the singular value function of a planar map needs 0 <= s <= 2, got {s}")
    if alpha1 < alpha2 or alpha2 <= 0:
        raise ValueError("phi needs alpha1 >= alpha2 > 0")
    if s <= 1:
        return s * math.log(alpha1)
    return math.log(alpha1) + (s - 1) * math.log(alpha2)


# ---------------------------------------------------------------------------
# Level tables
# ---------------------------------------------------------------------------

def _normalize_limbs(limbs):
    limbs = np.array(limbs, dtype=np.uint64)
    carry = np.zeros(len(limbs), dtype=np.uint64)
    for j in range(limbs.shape[1]):
        column = limbs[:, j] + carry
        limbs[:, j] = column & np.uint64(LIMB_MASK)
        carry = column >> np.uint64(LIMB_BITS)
    while carry.any():
        limbs = np.hstack([limbs, (carry & np.uint64(LIMB_MASK))[:, None]])
        carry = carry >> np.uint64(LIMB_BITS)
    return limbs


def _pack_radix(level, m):
    """Radix for packing (cls, u, v) into one int64, or None when it would overflow."""
    radix = level + 2
    if 2 * radix ** (2 * m) < 2 ** 62:
        return radix
    return None


def _aggregate(cls, exponents, limbs, radix):
    """Merge equal states, summing counts exactly; rows come back in canonical order."""
    if radix is not None:
        weights = np.array([radix ** j for j in range(exponents.shape[1])], dtype=np.int64)
        keys = cls.astype(np.int64) + 2 * (exponents.astype(np.int64) @ weights)
        order = np.argsort(keys, kind='stable')
        keys = keys[order]
        starts = np.flatnonzero(np.concatenate(([True], keys[1:] != keys[:-1])))
        summed = np.add.reduceat(limbs[order], starts, axis=0)
        return cls[order][starts], exponents[order][starts], _normalize_limbs(summed)

    rows = np.column_stack([cls, exponents]).astype(np.int64)
    unique, inverse = np.unique(rows, axis=0, return_inverse=True)
    summed = np.zeros((len(unique), limbs.shape[1]), dtype=np.uint64)
    np.add.at(summed, inverse.reshape(-1), limbs)
    return unique[:, 0], unique[:, 1:], _normalize_limbs(summed)


def _successors(table, rows, swaps, radix):
    cls = table.cls[rows]
    exponents = table.exponents[rows]
    limbs = table.limbs[rows]
    m = table.m
    n = len(cls)
    columns = np.arange(n)
    all_cls, all_exponents = [], []
    for letter, swap in enumerate(swaps):
        grown = exponents.copy()
        # appended while the prefix is in class A counts towards u, else v
        target = np.where(cls == 0, letter, m + letter)
        grown[columns, target] += 1
        all_cls.append(cls ^ np.uint8(swap))
        all_exponents.append(grown)
    return _aggregate(
        np.concatenate(all_cls), np.concatenate(all_exponents),
        np.concatenate([limbs] * len(swaps)), radix,
    )


def advance_level(table, ifs, threads=None, chunk_size=None, state_limit=None):
    """Table of level k+1 from the table of level k."""
    threads = _setting(threads, 'BOXDIM_THREADS')
    chunk_size = _setting(chunk_size, 'BOXDIM_CHUNK_SIZE')
    state_limit = _setting(state_limit, 'BOXDIM_STATE_LIMIT')
    m = ifs.m
    if table.m != m:
        raise ValueError(f"table has {table.m} letters but the IFS has {m} maps")
    if len(table) * m > 2 * state_limit:
        raise StateLimitExceeded(
            f"level {table.k + 1} would need up to {len(table) * m} states, "
            f"above the limit of {state_limit}; lower the maximum level"
        )

    swaps = [int(spec.swaps_axes) for spec in ifs]
    radix = _pack_radix(table.k + 1, m)
    parts = _map_chunks(lambda rows: _successors(table, rows, swaps, radix),
                        _chunks(len(table), chunk_size), threads)
    if len(parts) == 1:
        cls, exponents, limbs = parts[0]
    else:
        width = max(part[2].shape[1] for part in parts)
        cls, exponents, limbs = _aggregate(
            np.concatenate([part[0] for part in parts]),
            np.concatenate([part[1] for part in parts]),
            np.concatenate([np.pad(part[2], ((0, 0), (0, width - part[2].shape[1]))) for part in parts]),
            radix,
        )

    if len(cls) > state_limit:
        raise StateLimitExceeded(
            f"level {table.k + 1} has {len(cls)} states, above the limit of {state_limit}; "
            f"lower the maximum level"
        )
    logger.debug("Level %d: %d states", table.k + 1, len(cls))
    return LevelTable(table.k + 1, cls, exponents, limbs)


def level_table(k, ifs, threads=None):
    table = LevelTable.empty(ifs.m)
    for _ in range(k):
        table = advance_level(table, ifs, threads=threads)
    return table


def iter_level_tables(ifs, levels, threads=None):
    """Yield (k, table) for each requested level from a single DP pass."""
    wanted = sorted(set(levels))
    if not wanted:
        return
    table = LevelTable.empty(ifs.m)
    for k in range(1, wanted[-1] + 1):
        table = advance_level(table, ifs, threads=threads)
        if k in wanted:
            yield k, table


# ---------------------------------------------------------------------------
# Sums over a level
# ---------------------------------------------------------------------------

class LevelTerms:
    """Per-state quantities of one level, fixed once so repeated sums are cheap."""

    def __init__(self, table, ifs, params=None, threads=None, chunk_size=None):
        self.k = table.k
        self.threads = _setting(threads, 'BOXDIM_THREADS')
        self.chunk_size = _setting(chunk_size, 'BOXDIM_CHUNK_SIZE')
        log_base, log_height = table.log_sizes(ifs)
        self.log_counts = table.log_counts()
        self.log_alpha1 = np.maximum(log_base, log_height)
        self.log_alpha2 = np.minimum(log_base, log_height)
        if params is not None:
            base_longer = log_base - log_height >= -TIE_TOL
            class_a = table.cls == 0
            use_s1 = np.where(class_a, base_longer, ~base_longer)
            self.s_state = np.where(use_s1, params.s1, params.s2)
        else:
            self.s_state = None
        self._slices = _chunks(len(self.log_counts), self.chunk_size)

    def _sum(self, exponent):
        def partial(rows):
            return logsumexp(self.log_counts[rows] + exponent(rows))

        partials = _map_chunks(partial, self._slices, self.threads)
        return float(logsumexp(np.array(partials)))

    def log_psi_sum(self, s):
        if self.s_state is None:
            raise ValueError("modified sums need projection dimensions")
        return self._sum(lambda rows: self.s_state[rows] * self.log_alpha1[rows]
                         + (s - self.s_state[rows]) * self.log_alpha2[rows])

    def log_phi_sum(self, s):
        if s <= 1:
            return self._sum(lambda rows: s * self.log_alpha1[rows])
        return self._sum(lambda rows: self.log_alpha1[rows] + (s - 1) * self.log_alpha2[rows])

    def eta(self):
        """max over states of (alpha2/alpha1)^(1/k)."""
        return float(np.exp(np.max(self.log_alpha2 - self.log_alpha1) / self.k))


def psi_sum(k, s, ifs, params, table=None, threads=None):
    """log Psi_k^s."""
    if k < 1:
        raise ValueError(f"levels start at 1, got {k}")
    table = table if table is not None else level_table(k, ifs, threads)
    return LevelTerms(table, ifs, params, threads).log_psi_sum(s)


def pressure_estimate(k, s, ifs, params, table=None, threads=None):
    """(P_k(s), P*_k(s)) = ((Psi_k^s)^(1/k), (1/k) log Psi_k^s)."""
    log_sum = psi_sum(k, s, ifs, params, table, threads)
    return math.exp(log_sum / k), log_sum / k


# ---------------------------------------------------------------------------
# Roots
# ---------------------------------------------------------------------------

def _decreasing_root(func, upper, tol, k, cap=None):
    """Root of a strictly decreasing func with func(0) > 0 by bisection."""
    lower = 0.0
    upper = max(upper, 1e-3)
    if cap is not None:
        upper = min(upper, cap)
    while func(upper) > 0:
        if cap is not None and upper >= cap:
            return LevelRoot(k, cap, cap, cap)
        lower, upper = upper, upper * 2
        if cap is not None:
            upper = min(upper, cap)
    if func(upper) == 0:
        return LevelRoot(k, upper, lower, upper)
    return LevelRoot(k, bisect(func, lower, upper, xtol=tol), lower, upper)


def solve_level_root(k, ifs, params, table=None, tol=None, rigorous=True, threads=None, terms=None):
    """s_k with Psi_k^{s_k} = 1, an upper bound for the dimension."""
    tol = _setting(tol, 'BOXDIM_ROOT_TOL')
    if terms is None:
        table = table if table is not None else level_table(k, ifs, threads)
        terms = LevelTerms(table, ifs, params, threads)
    if rigorous:
        # the root lies in [0, s1 + s2]
        return _decreasing_root(terms.log_psi_sum, params.total, tol, k, cap=params.total)
    return _decreasing_root(terms.log_psi_sum, max(2.0, params.total), tol, k)


def solve_affinity_root(k, ifs, table=None, tol=None, threads=None, terms=None):
    """Level-k upper bound for the affinity dimension, capped at 2."""
    tol = _setting(tol, 'BOXDIM_ROOT_TOL')
    if terms is None:
        table = table if table is not None else level_table(k, ifs, threads)
        terms = LevelTerms(table, ifs, None, threads)
    return _decreasing_root(terms.log_phi_sum, 2.0, tol, k, cap=2.0)


def extrapolate(schedule, roots):
    """Fit s_k = s + c/k through the last two levels."""
    if len(roots) < 2:
        return roots[-1]
    (k1, k2), (r1, r2) = schedule[-2:], roots[-2:]
    return (k2 * r2 - k1 * r1) / (k2 - k1)


def _tables_for(ifs, schedule, tables, threads):
    if tables is not None:
        missing = [k for k in schedule if k not in tables]
        if not missing:
            return ((k, tables[k]) for k in schedule)
    return iter_level_tables(ifs, schedule, threads)


def _normalise_schedule(schedule):
    schedule = tuple(sorted(set(int(k) for k in (schedule or settings.BOXDIM_SCHEDULE))))
    if not schedule or schedule[0] < 1:
        raise ValueError(f"schedule must be non-empty positive levels, got {schedule}")
    return schedule


def multiplicative_root(ifs, dims, tol=None):
    """
    One-level root when the modified singular value function is multiplicative:
    separated type with every longer side horizontal (or every longer side vertical).
    """
    tol = _setting(tol, 'BOXDIM_ROOT_TOL')
    if classify_system(ifs) is not SystemType.SEPARATED:
        return None
    if all(spec.a >= spec.b for spec in ifs):
        long_sides = [math.log(spec.a) for spec in ifs]
        short_sides = [math.log(spec.b) for spec in ifs]
        s_long = dims.s1
    elif all(spec.b >= spec.a for spec in ifs):
        long_sides = [math.log(spec.b) for spec in ifs]
        short_sides = [math.log(spec.a) for spec in ifs]
        s_long = dims.s2
    else:
        return None
    log_long, log_short = np.array(long_sides), np.array(short_sides)

    def func(s):
        return float(logsumexp(s_long * log_long + (s - s_long) * log_short))

    return _decreasing_root(func, 2.0, tol, 1).value


def estimate_dimension(ifs, dims, schedule=None, tables=None, tol=None, threads=None):
    """Decreasing upper bounds s_k for the root of P(s) = 1 along the schedule."""
    schedule = _normalise_schedule(schedule)
    params = PressureParams.from_dims(dims)
    rigorous = dims.rigorous and not dims.clamped
    roots = []
    for k, table in _tables_for(ifs, schedule, tables, threads):
        root = solve_level_root(k, ifs, params, table=table, tol=tol, rigorous=rigorous, threads=threads)
        logger.info("Level %d: s_k = %.12f", k, root.value)
        roots.append(root.value)

    notes = ["extrapolated value assumes s_k = s + c/k and is not a bound"]
    if not rigorous:
        notes.append("projection dimensions are not rigorous; roots bracketed on [0, 2]")
    estimate = DimensionEstimate(
        kind='modified', schedule=schedule, roots=tuple(roots), final_upper=roots[-1],
        extrapolated=extrapolate(schedule, roots), s1=params.s1, s2=params.s2,
        closed_form=multiplicative_root(ifs, dims, tol),
        flags={'projection_rigorous': dims.rigorous, 'projection_clamped': dims.clamped},
        notes=tuple(notes),
    )
    if not estimate.is_decreasing:
        logger.warning("Level roots %s are not decreasing along the schedule", roots)
    return estimate


def affinity_dimension(ifs, schedule=None, tables=None, tol=None, threads=None):
    """Same pipeline with the singular value function."""
    schedule = _normalise_schedule(schedule)
    roots = []
    for k, table in _tables_for(ifs, schedule, tables, threads):
        root = solve_affinity_root(k, ifs, table=table, tol=tol, threads=threads)
        logger.info("Level %d: affinity bound %.12f", k, root.value)
        roots.append(root.value)
    notes = ["extrapolated value assumes d_k = d + c/k and is not a bound"]
    if roots[-1] >= 2.0:
        notes.append("affinity roots reached 2 and were capped")
    return DimensionEstimate(
        kind='affinity', schedule=schedule, roots=tuple(roots), final_upper=roots[-1],
        extrapolated=min(extrapolate(schedule, roots), 2.0), notes=tuple(notes),
    )


def gap_diagnostic(ifs, dims, k, table=None, tol=None, threads=None):
    """Check the sufficient condition for the dimension to drop below the affinity dimension."""
    table = table if table is not None else level_table(k, ifs, threads)
    terms = LevelTerms(table, ifs, None, threads)
    affinity_upper = solve_affinity_root(k, ifs, tol=tol, terms=terms).value
    epsilon = min(1.0, affinity_upper) - max(dims.s1, dims.s2)
    if epsilon <= 0:
        return GapReport(
            level=k, affinity_upper=affinity_upper, epsilon=epsilon,
            notes=("max(s1, s2) reaches min(1, d); no gap can be certified",),
        )
    eta = terms.eta()
    bound = eta ** epsilon
    gap = bound < 1
    notes = [f"level-{k} probe of the ratio alpha2/alpha1; not a proof for all levels"]
    if not gap:
        notes.append("some word has equal singular values at this level; no gap certified")
    return GapReport(
        level=k, affinity_upper=affinity_upper, epsilon=epsilon, eta=eta,
        bound=bound, gap_detected=gap, notes=tuple(notes),
    )
