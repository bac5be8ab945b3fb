"""Wiring search: projected gradient descent, line search with resets, and
the adaptive/constant wiring tasks built on top of them.

All stochastic paths draw from counter-based Philox streams keyed by
(seed, replica index) with counter blocks per (stage, reset round), so results
are bit-reproducible and independent of execution order.
"""

import math
from dataclasses import dataclass

import numpy as np

from boxlab import boxes, kernels, orbits
from boxlab.boxes import COLLAPSE_THRESHOLD


@dataclass
class DescentConfig:
    learning_rate: float = 0.01
    max_iters: int = 5000
    tol_eps: float = 1e-6
    k_reset: int = 100
    chi: float = 0.002
    replicas: int = 1000
    line_search_iters: int = 20
    seed: int = 0

    def __post_init__(self):
        if min(self.learning_rate, self.tol_eps, self.chi) <= 0:
            raise ValueError("learning_rate, tol_eps and chi must be positive")
        if min(self.max_iters, self.k_reset, self.replicas, self.line_search_iters) <= 0:
            raise ValueError("iteration counts and replica count must be positive")
        if not self.chi <= 1.0:
            raise ValueError("chi must lie in (0, 1]")
        if self.chi * self.replicas < 1.0:
            raise ValueError("chi * replicas must be at least 1")


def _replica_rng(seed, replica, block=0):
    key = np.array([seed % 2**64, replica % 2**64], dtype=np.uint64)
    counter = np.array([0, 0, 0, block % 2**64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))


def objective(w, p, q):
    """CHSH value of the wired product, with q as the left (accumulated)
    factor and p as the right factor."""
    wb = np.asarray(w, dtype=float).reshape(1, 32)
    return float(kernels.objective_batch(q, p, wb)[0])


def gradient(w, p, q, h=1e-6):
    """Central finite-difference gradient of the objective; the perturbed
    points are not projected."""
    wb = np.asarray(w, dtype=float).reshape(1, 32)
    return kernels.gradient_batch(q, p, wb, h)[0]


def projected_gradient_descent(cfg, p, q, return_all=False):
    """Plain projected gradient ascent from ``cfg.replicas`` random starts;
    returns the best wiring (first index wins ties), or all of them."""
    wb, _ = _pgd_run(cfg, p, q, range(cfg.replicas))
    vals = kernels.objective_batch(q, p, wb)
    if return_all:
        return [wb[i].copy() for i in range(cfg.replicas)]
    return wb[int(np.argmax(vals))].copy()


def _pgd_run(cfg, p, q, replica_indices):
    """Run independent descents for the given replica indices (used both for
    the full batch and for chunked/parallel execution tests)."""
    p = np.ascontiguousarray(p, dtype=float)
    q = np.ascontiguousarray(q, dtype=float)
    idx = list(replica_indices)
    wb = np.stack([_replica_rng(cfg.seed, i).random(32) for i in idx])
    live = np.ones(len(idx), dtype=bool)
    iters = np.zeros(len(idx), dtype=int)
    for _ in range(cfg.max_iters):
        if not live.any():
            break
        g = kernels.gradient_batch(q, p, wb[live])
        new = kernels.project_batch(wb[live] + cfg.learning_rate * g)
        step = np.abs(new - wb[live]).max(axis=1)
        sub = np.where(live)[0]
        wb[sub] = new
        iters[sub] += 1
        live[sub[step < cfg.tol_eps]] = False
    return wb, iters


def _alpha_star(eval_rows, wb, g, cfg):
    """Per-replica step size maximizing the objective along the gradient ray:
    coarse geometric grid 2^-10 .. 2^3, then one local refinement with
    ``line_search_iters`` points."""
    m = wb.shape[0]
    best_val = np.full(m, -np.inf)
    best_alpha = np.full(m, 2.0**-10)
    for a in 2.0 ** np.arange(-10, 4):
        v = eval_rows(wb + a * g)
        better = v > best_val
        best_val[better] = v[better]
        best_alpha[better] = a
    base = best_alpha.copy()
    for e in np.linspace(-1.0, 1.0, max(cfg.line_search_iters, 3)):
        a = base * 2.0**e
        v = eval_rows(wb + a[:, None] * g)
        better = v > best_val
        best_val[better] = v[better]
        best_alpha[better] = a[better]
    return best_alpha


def _line_search_core(cfg, eval_rows, grad_rows, stage=0):
    m = cfg.replicas
    wb = np.zeros((m, 32))
    rounds = int(math.floor(1.0 / cfg.chi))
    history = []
    for j in range(rounds):
        vals = eval_rows(wb)
        keep = int(math.floor(j * m * cfg.chi))
        order = np.argsort(-vals, kind="stable")
        kept = np.zeros(m, dtype=bool)
        kept[order[:keep]] = True
        for i in range(m):
            if not kept[i]:
                wb[i] = _replica_rng(cfg.seed, i, block=stage * 2**32 + j + 1).random(32)
        history.append(float(vals.max()))
        steps = cfg.k_reset if j < rounds - 1 else 10 * cfg.k_reset
        for _ in range(steps):
            g = grad_rows(wb)
            alpha = _alpha_star(eval_rows, wb, g, cfg)
            wb = kernels.project_batch(wb + alpha[:, None] * g)
    return wb, history


def line_search_with_resets(cfg, p, q):
    """Line-search gradient ascent with periodic resets of the worst
    replicas; returns all ``cfg.replicas`` resulting wirings."""
    p = np.ascontiguousarray(p, dtype=float)
    q = np.ascontiguousarray(q, dtype=float)
    wb, _ = _line_search_core(
        cfg,
        lambda rows: kernels.objective_batch(q, p, rows),
        lambda rows: kernels.gradient_batch(q, p, rows),
    )
    return [wb[i].copy() for i in range(cfg.replicas)]


def _best_column(cfg, wb, vals):
    return wb[int(np.argmax(vals))].copy()


def task_a_adaptive(p, n_products, cfg):
    """Greedy left-parenthesized wiring sequence; returns the wiring prefix
    once the accumulated box crosses the collapse threshold, else None."""
    p = np.ascontiguousarray(p, dtype=float)
    acc = p.copy()
    sequence = []
    for stage in range(1, n_products + 1):
        wb, _ = _line_search_core(
            cfg,
            lambda rows: kernels.objective_batch(acc, p, rows),
            lambda rows: kernels.gradient_batch(acc, p, rows),
            stage=stage,
        )
        vals = kernels.objective_batch(acc, p, wb)
        w = _best_column(cfg, wb, vals)
        acc = kernels.box_product(acc, p, w)
        sequence.append(w)
        if kernels.chsh(acc) > COLLAPSE_THRESHOLD:
            return sequence
    return None


def task_b_constant(p, n_max, l_max, cfg):
    """Search for a single wiring whose right powers cross the collapse
    threshold; optimizes the (l+1)-fold power for l = 1..l_max and scans
    powers up to n_max + 1."""
    p = np.ascontiguousarray(p, dtype=float)
    for level in range(1, l_max + 1):
        wb, _ = _line_search_core(
            cfg,
            lambda rows: kernels.objective_power_batch(p, rows, level + 1),
            lambda rows: kernels.gradient_power_batch(p, rows, level + 1),
            stage=level,
        )
        vals = kernels.objective_power_batch(p, wb, level + 1)
        w = _best_column(cfg, wb, vals)
        acc = p.copy()
        if kernels.chsh(acc) > COLLAPSE_THRESHOLD:
            return w
        for _ in range(n_max):
            acc = kernels.box_product(acc, p, w)
            if kernels.chsh(acc) > COLLAPSE_THRESHOLD:
                return w
    return None


def slice_scan(basis, grid_n, method, cfg=None, wiring=None, kmax=8, tol=1e-10):
    """Label every grid point of the simplex over the basis boxes.

    Returns rows (c1, c2, label, witness_kind, witness_value); points outside
    the simplex are not emitted.  Methods: 'analytic' (bias polynomial plus
    the CHSH threshold), 'right_power' (orbit ladder under ``wiring``),
    'taskA' and 'taskB' (wiring searches with ``cfg``).
    """
    if method in ("taskA", "taskB") and cfg is None:
        raise ValueError(f"method {method!r} needs a DescentConfig")
    if method == "right_power" and wiring is None:
        raise ValueError("method 'right_power' needs a wiring")
    b1, b2, b3 = (np.asarray(b, dtype=float) for b in basis)
    rows = []
    for i in range(grid_n):
        c1 = i / (grid_n - 1) if grid_n > 1 else 0.0
        for j in range(grid_n):
            c2 = j / (grid_n - 1) if grid_n > 1 else 0.0
            if c1 + c2 > 1.0 + 1e-12:
                continue
            c3 = 1.0 - c1 - c2
            box = c1 * b1 + c2 * b2 + c3 * b3
            if not boxes.is_valid_box(box, tol=1e-10):
                rows.append((c1, c2, "not-ns", "none", float("nan")))
                continue
            rows.append((c1, c2) + _scan_label(box, method, cfg, wiring, kmax))
    return rows


def _scan_label(box, method, cfg, wiring, kmax):
    if method == "analytic":
        rep = boxes.collapse_criterion(box)
        if rep.satisfied:
            return ("collapsing", "bbp", rep.A + rep.B)
        value = kernels.chsh(np.ascontiguousarray(box))
        if value > COLLAPSE_THRESHOLD:
            return ("collapsing", "chsh", value)
        return ("unknown", "none", value)
    if method == "right_power":
        hit = orbits.orbit_collapse_search(box, wiring, kmax)
        if hit is not None:
            k, witness = hit
            return ("collapsing", "power", float(k))
        return ("unknown", "none", kernels.chsh(np.ascontiguousarray(box)))
    if method == "taskA":
        seq = task_a_adaptive(box, kmax, cfg)
        if seq is not None:
            return ("collapsing", "taskA", float(len(seq)))
        return ("unknown", "none", kernels.chsh(np.ascontiguousarray(box)))
    if method == "taskB":
        w = task_b_constant(box, kmax, 2, cfg)
        if w is not None:
            return ("collapsing", "taskB", 1.0)
        return ("unknown", "none", kernels.chsh(np.ascontiguousarray(box)))
    raise ValueError(f"unknown scan method: {method!r}")
