import logging
import math
from collections import Counter

import numpy as np
from django.conf import settings
from scipy.optimize import bisect

from ifs_core.models import ReducibleSystemError, SystemType
from ifs_core.utils import classify_system, image_rect

from .models import Edge, LineMap, Method, Node, ProjectionDims, ProjectionSystem, RootResult

logger = logging.getLogger(__name__)

NODE_INDEX = {Node.X: 0, Node.Y: 1}


def _line_map(coefficient, offset):
    return LineMap(abs(coefficient), offset, 1 if coefficient > 0 else -1)


def build_projection_system(ifs):
    """Graph-directed system of 1-D maps satisfied by pi_1(F) and pi_2(F)."""
    edges = []
    for index, spec in enumerate(ifs):
        (p, q), (r, s) = spec.transform.matrix
        tx, ty = spec.transform.offset
        # horizontal coordinate of the image is fed by x when q == 0, by y otherwise
        if q == 0:
            edges.append(Edge(Node.X, Node.X, _line_map(p, tx), index))
        else:
            edges.append(Edge(Node.Y, Node.X, _line_map(q, tx), index))
        if r == 0:
            edges.append(Edge(Node.Y, Node.Y, _line_map(s, ty), index))
        else:
            edges.append(Edge(Node.X, Node.Y, _line_map(r, ty), index))
    return ProjectionSystem(tuple(edges))


def conjugate_edges(edges, node):
    """Conjugate every edge touching ``node`` by r(x) = 1 - x."""
    result = []
    for edge in edges:
        line_map = edge.line_map
        if edge.source is node:
            line_map = line_map.reflect_before()
        if edge.target is node:
            line_map = line_map.reflect_after()
        result.append(Edge(edge.source, edge.target, line_map, edge.map_index))
    return sorted(result)


def is_symmetric_at(edges, node):
    return conjugate_edges(edges, node) == sorted(edges)


def reduce_system(system):
    """Remove literal duplicates and merge edges identified by a reflection symmetry."""
    log = list(system.dedupe_log)

    edges = []
    seen = {}
    for edge in system.edges:
        if edge.key in seen:
            message = f"removed duplicate {edge} (same as map {seen[edge.key].map_index})"
            logger.info(message)
            log.append(message)
            continue
        seen[edge.key] = edge
        edges.append(edge)

    symmetric = set(system.symmetric)
    for node in (Node.X, Node.Y):
        if node not in symmetric and is_symmetric_at(edges, node):
            logger.info("Projection system is reflection symmetric at node %s", node.value)
            symmetric.add(node)

    remaining = list(edges)
    for node in sorted(symmetric):
        for edge in list(remaining):
            if edge not in remaining or edge.source is not node:
                continue
            partner = Edge(edge.source, edge.target, edge.line_map.reflect_before())
            if partner == edge or partner not in remaining:
                continue
            dropped = remaining[remaining.index(partner)]
            remaining.remove(partner)
            message = f"merged {dropped} into {edge} (node {node.value} is symmetric)"
            logger.info(message)
            log.append(message)

    return ProjectionSystem(tuple(remaining), frozenset(symmetric), tuple(log))


def interior_disjoint(intervals):
    """True when the closed intervals pairwise share at most endpoints."""
    ordered = sorted(intervals)
    return all(left[1] <= right[0] for left, right in zip(ordered, ordered[1:]))


def node_is_separated(system, node):
    pieces = [edge.line_map.image() for edge in system.edges_into(node)]
    return all(0 <= lo and hi <= 1 for lo, hi in pieces) and interior_disjoint(pieces)


def _solve_decreasing(func, tol):
    """Root of a strictly decreasing function with func(0) >= 0, clamped to [0, 1]."""
    if func(0.0) <= 0:
        return RootResult(0.0)
    at_one = func(1.0)
    if at_one == 0:
        return RootResult(1.0)
    if at_one > 0:
        upper = 2.0
        while func(upper) > 0:
            upper *= 2
        unclamped = bisect(func, 1.0, upper, xtol=tol)
        logger.warning("Root %.6f exceeds 1 and was clamped; the pieces overlap", unclamped)
        return RootResult(1.0, clamped=True, unclamped=unclamped)
    return RootResult(bisect(func, 0.0, 1.0, xtol=tol))


def solve_moran(ratios, tol=None):
    """Solve sum r_i^s = 1 by bisection."""
    tol = settings.BOXDIM_PROJECTION_TOL if tol is None else tol
    if not ratios:
        raise ValueError("solve_moran needs at least one ratio")
    logs = np.log(np.array([float(ratio) for ratio in ratios]))
    return _solve_decreasing(lambda s: float(np.exp(s * logs).sum()) - 1.0, tol)


def spectral_radius(matrix):
    """Perron root of a 2x2 nonnegative matrix in closed form."""
    (a, b), (c, d) = np.asarray(matrix, dtype=float)
    half_trace = (a + d) / 2
    return half_trace + math.sqrt(((a - d) / 2) ** 2 + b * c)


def adjacency_matrix(system, t):
    """A^(t): entry (n, n') sums ratio^t over edges n' -> n."""
    matrix = np.zeros((2, 2))
    for edge in system.edges:
        matrix[NODE_INDEX[edge.target], NODE_INDEX[edge.source]] += float(edge.line_map.ratio) ** t
    return matrix


def solve_gd_dimension(system, tol=None):
    """Unique t with rho(A^(t)) = 1 for an irreducible two-node system."""
    tol = settings.BOXDIM_PROJECTION_TOL if tol is None else tol
    counts = Counter((edge.source, edge.target) for edge in system.edges)
    if not (counts[(Node.X, Node.Y)] and counts[(Node.Y, Node.X)]):
        raise ReducibleSystemError(
            "The projection system is reducible; solve each node separately with solve_moran."
        )
    return _solve_decreasing(lambda t: spectral_radius(adjacency_matrix(system, t)) - 1.0, tol)


def _covers_unit_interval(intervals):
    reach = 0
    for lo, hi in sorted(intervals):
        if lo > reach:
            return False
        reach = max(reach, hi)
    return reach >= 1


def detect_block_type(ifs):
    rects = [image_rect(spec) for spec in ifs]
    return (_covers_unit_interval([(rect.x0, rect.x1) for rect in rects])
            and _covers_unit_interval([(rect.y0, rect.y1) for rect in rects]))


def projection_dims(ifs, overrides=None, tol=None):
    """Box dimensions s1, s2 of the two coordinate projections of the attractor."""
    overrides = overrides or {}
    notes = []
    dedupe_log = ()
    symmetric = ()
    clamped = False

    if detect_block_type(ifs):
        s1 = s2 = 1.0
        method = Method.BLOCK_TYPE
        rigorous = True
    else:
        system = reduce_system(build_projection_system(ifs))
        dedupe_log = system.dedupe_log
        symmetric = tuple(node.value for node in sorted(system.symmetric))
        rigorous = node_is_separated(system, Node.X) and node_is_separated(system, Node.Y)
        if classify_system(ifs) is SystemType.SEPARATED:
            method = Method.MORAN
            root_x = solve_moran([edge.line_map.ratio for edge in system.edges_into(Node.X)], tol)
            root_y = solve_moran([edge.line_map.ratio for edge in system.edges_into(Node.Y)], tol)
            s1, s2 = root_x.value, root_y.value
            clamped = root_x.clamped or root_y.clamped
        else:
            method = Method.GRAPH_DIRECTED
            root = solve_gd_dimension(system, tol)
            s1 = s2 = root.value
            clamped = root.clamped
        if not rigorous:
            notes.append("1-D pieces overlap after reduction; open set condition assumed, "
                         "projection dimensions are upper bounds")
            logger.warning("Projection pieces of %s overlap; s1, s2 are OSC-assumed upper bounds",
                           ifs.name or 'IFS')
        if clamped:
            notes.append("a projection root exceeded 1 and was clamped")

    method_s1 = method_s2 = method
    if overrides.get('s1') is not None:
        s1, method_s1 = float(overrides['s1']), Method.OVERRIDE
    if overrides.get('s2') is not None:
        s2, method_s2 = float(overrides['s2']), Method.OVERRIDE
    if Method.OVERRIDE in (method_s1, method_s2):
        notes.append("projection dimensions supplied by the user")
        # user values are taken as given; only computed axes keep their rigor flag
        if method_s1 is Method.OVERRIDE and method_s2 is Method.OVERRIDE:
            rigorous, clamped = True, False

    return ProjectionDims(
        s1=s1, s2=s2, method_s1=method_s1, method_s2=method_s2, rigorous=rigorous,
        clamped=clamped, dedupe_log=tuple(dedupe_log), symmetric_nodes=symmetric,
        notes=tuple(notes),
    )
