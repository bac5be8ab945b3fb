"""Orbits of a box under repeated wiring, and collapse certificates."""

import math
from dataclasses import dataclass, field

import numpy as np

from boxlab import boxes, kernels, wirings
from boxlab.boxes import COLLAPSE_THRESHOLD
from boxlab.errors import DepthLimit

MAX_FULL_DEPTH = 14
MAX_TILTED_DEPTH = 20


def catalan(n):
    return math.comb(2 * n, n) // (n + 1)


@dataclass
class OrbitLevel:
    """All boxes reachable with exactly ``depth`` copies of the seed box."""

    depth: int
    boxes: list = field(default_factory=list)
    n_products: int = 0  # products enumerated before deduplication


def _dedup(items, tol):
    if tol is None:
        return list(items)
    seen = {}
    for box in items:
        key = tuple(np.round(box.reshape(16) / tol).astype(np.int64))
        if key not in seen:
            seen[key] = box
    return list(seen.values())


def orbit_depth(p, w, k, dedup_tol=1e-10):
    """The depth-k orbit via the parenthesization recurrence.

    With ``dedup_tol=None`` no deduplication is applied and the level-k list
    has exactly Catalan(k-1) members.
    """
    if k < 1:
        raise ValueError("depth must be >= 1")
    if k > MAX_FULL_DEPTH:
        raise DepthLimit(f"full orbits are capped at depth {MAX_FULL_DEPTH}")
    levels = _orbit_levels(p, w, k, dedup_tol)
    return levels[k]


def _orbit_levels(p, w, k, dedup_tol):
    w = np.ascontiguousarray(w, dtype=float)
    p = np.ascontiguousarray(p, dtype=float)
    levels = {1: OrbitLevel(depth=1, boxes=[p], n_products=1)}
    for depth in range(2, k + 1):
        produced = []
        for left in range(1, depth):
            right = depth - left
            for a in levels[left].boxes:
                for b in levels[right].boxes:
                    produced.append(kernels.box_product(a, b, w))
        levels[depth] = OrbitLevel(
            depth=depth,
            boxes=_dedup(produced, dedup_tol),
            n_products=len(produced),
        )
    return levels


def tilted_orbit(p, w, k, dedup_tol=1e-10):
    """Depth-k orbit restricted to products where one factor is the seed box
    itself (split index 1 or k-1)."""
    if k < 1:
        raise ValueError("depth must be >= 1")
    if k > MAX_TILTED_DEPTH:
        raise DepthLimit(f"tilted orbits are capped at depth {MAX_TILTED_DEPTH}")
    w = np.ascontiguousarray(w, dtype=float)
    p = np.ascontiguousarray(p, dtype=float)
    level = OrbitLevel(depth=1, boxes=[p], n_products=1)
    for depth in range(2, k + 1):
        produced = []
        for q in level.boxes:
            produced.append(kernels.box_product(p, q, w))
            produced.append(kernels.box_product(q, p, w))
        level = OrbitLevel(depth=depth, boxes=_dedup(produced, dedup_tol), n_products=len(produced))
    return level


def right_power(p, w, k):
    """(((p x p) x p) ...) x p with k factors."""
    if k < 1:
        raise ValueError("power must be >= 1")
    w = np.ascontiguousarray(w, dtype=float)
    acc = np.ascontiguousarray(p, dtype=float)
    for _ in range(k - 1):
        acc = kernels.box_product(acc, p, w)
    return acc


_SLICE_BASIS = None


def _slice_basis():
    global _SLICE_BASIS
    if _SLICE_BASIS is None:
        _SLICE_BASIS = (
            boxes.make_named_box("PR"),
            boxes.make_named_box("SR"),
            boxes.make_named_box("I"),
        )
    return _SLICE_BASIS


def convex_coords_c3(p, tol=1e-9):
    """Third affine coordinate of p in the PR, SR, I basis."""
    return boxes.slice_coordinates(p, _slice_basis(), tol=tol)[2]


def orbit_collapse_search(p, w, kmax, threshold=COLLAPSE_THRESHOLD):
    """First depth at which the tilted orbit crosses the collapse threshold.

    Walks the right-power ladder first (one product per depth); only if that
    stalls is the full tilted orbit enumerated.  Returns (k, witness box) or
    None.
    """
    w = np.ascontiguousarray(w, dtype=float)
    acc = np.ascontiguousarray(p, dtype=float)
    for k in range(1, kmax + 1):
        if kernels.chsh(acc) > threshold:
            return k, acc
        if k < kmax:
            acc = kernels.box_product(acc, p, w)
    kcap = min(kmax, MAX_TILTED_DEPTH)
    level = OrbitLevel(depth=1, boxes=[np.ascontiguousarray(p, dtype=float)], n_products=1)
    for k in range(1, kcap + 1):
        for q in level.boxes:
            if kernels.chsh(q) > threshold:
                return k, q
        if k < kcap:
            produced = []
            for q in level.boxes:
                produced.append(kernels.box_product(p, q, w))
                produced.append(kernels.box_product(q, p, w))
            level = OrbitLevel(depth=k + 1, boxes=_dedup(produced, 1e-10), n_products=len(produced))
    return None


_TRIANGLE_PATTERN = (
    # (row, col) -> coefficients of (PR, Q, R) the product must equal
    ((1.0, 0.0, 0.0), (1.0, 0.0, 0.0), (1.0, 0.0, 0.0)),
    ((0.0, 0.5, 0.5), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)),
    ((1.0, 0.0, 0.0), (0.0, 0.0, 1.0), (0.0, 1.0, 0.0)),
)


def triangle_table_certificate(w, q, r, tol=1e-10):
    """Check the 3x3 multiplication table over {PR, q, r} that certifies a
    collapsing triangle: PR absorbs on the left row, q is idempotent with
    q x PR = (q + r)/2 and q x r = r, and r swaps q and r."""
    pr = boxes.make_named_box("PR")
    basis = (pr, q, r)
    for i, row in enumerate(_TRIANGLE_PATTERN):
        for j, coeffs in enumerate(row):
            expected = coeffs[0] * pr + coeffs[1] * q + coeffs[2] * r
            got = wirings.box_product(basis[i], basis[j], w)
            if np.max(np.abs(got - expected)) > tol:
                return False
    return True


def triangle_affine_iteration(alpha0, beta0, steps):
    """Iterate the affine self-map induced by multiplying against the fixed
    triangle point (alpha0, beta0); (1, 0) is always a fixed point."""
    if not (alpha0 > 0 and beta0 >= 0 and alpha0 + beta0 <= 1):
        raise ValueError("need alpha0 > 0, beta0 >= 0, alpha0 + beta0 <= 1")
    a_mat = np.array(
        [
            [1.0 - alpha0, -alpha0],
            [-1.0 + alpha0 + beta0, -1.0 + 1.5 * alpha0 + 2.0 * beta0],
        ]
    )
    b_vec = np.array([alpha0, 1.0 - alpha0 - beta0])
    u = np.array([alpha0, beta0])
    seq = [tuple(u)]
    for _ in range(steps):
        u = a_mat @ u + b_vec
        seq.append((float(u[0]), float(u[1])))
    return seq


def orbit_dump_rows(p, w, kmax, tilted=True, dedup_tol=1e-10):
    """Rows (k, CHSH', CHSH, c1, c2, c3) for slice plots; boxes outside the
    PR-SR-I plane get NaN coordinates."""
    rows = []
    if tilted:
        levels = [tilted_orbit(p, w, k, dedup_tol) for k in range(1, kmax + 1)]
    else:
        all_levels = _orbit_levels(np.asarray(p, dtype=float), w, kmax, dedup_tol)
        levels = [all_levels[k] for k in range(1, kmax + 1)]
    basis = _slice_basis()
    for level in levels:
        for box in level.boxes:
            try:
                c1, c2, c3 = boxes.slice_coordinates(box, basis)
            except Exception:
                c1 = c2 = c3 = float("nan")
            rows.append(
                (
                    level.depth,
                    boxes.chsh_value(box, "CHSH'"),
                    boxes.chsh_value(box, "CHSH"),
                    c1,
                    c2,
                    c3,
                )
            )
    return rows
