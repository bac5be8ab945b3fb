"""Graph machinery for the isomorphism / coloring / distance games.

Vertices of the combined question/answer set V = V(G) + V(H) are indexed
0..n-1 for G and n..2n-1 for H.  Distance-game strategies are dense tables
``table[x_A, x_B, y_A, y_B]`` over V^4; homomorphism-game strategies (questions
in G, answers in H) use tables ``table[g_A, g_B, h_A, h_B]``.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from boxlab import boxes
from boxlab.errors import (
    ImperfectStrategy,
    MissingPartition,
    NotAutomorphism,
    NotSymmetric,
    ParameterTooSmall,
    TooLarge,
)

MAX_STRATEGY_VERTICES = 32  # per graph; the dense table is (2n)^4
MAX_AUTOMORPHISM_VERTICES = 10


@dataclass(frozen=True)
class Graph:
    adjacency: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=np.int8)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] == 0:
            raise ValueError("adjacency must be a non-empty square matrix")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(adj) != 0):
            raise ValueError("graph must be loopless")
        if not set(np.unique(adj)) <= {0, 1}:
            raise ValueError("adjacency entries must be 0/1")
        object.__setattr__(self, "adjacency", adj)

    @property
    def n(self):
        return self.adjacency.shape[0]

    def edges(self):
        idx = np.argwhere(np.triu(self.adjacency, 1) == 1)
        return [tuple(e) for e in idx]

    def n_edges(self):
        return int(self.adjacency.sum()) // 2


def graph_from_edges(n, edges):
    adj = np.zeros((n, n), dtype=np.int8)
    for u, v in edges:
        if u == v:
            raise ValueError("loops are not allowed")
        adj[u, v] = adj[v, u] = 1
    return Graph(adj)


def parse_edge_list(text):
    """Edge-list format: one "u v" pair per line, 0-based; blank lines and
    lines starting with '#' are skipped.  The vertex count is 1 + max index."""
    edges = []
    top = -1
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        u, v = (int(t) for t in line.split())
        edges.append((u, v))
        top = max(top, u, v)
    if top < 0:
        raise ValueError("empty edge list")
    return graph_from_edges(top + 1, edges)


def parse_adjacency_csv(text):
    rows = [
        [int(float(v)) for v in line.split(",")]
        for line in text.strip().splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    return Graph(np.asarray(rows, dtype=np.int8))


def cycle_graph(n):
    return graph_from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n):
    return graph_from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def path_graph(n):
    return graph_from_edges(n, [(i, i + 1) for i in range(n - 1)])


def empty_graph(n):
    return Graph(np.zeros((n, n), dtype=np.int8))


def disjoint_union(g, h):
    n, m = g.n, h.n
    adj = np.zeros((n + m, n + m), dtype=np.int8)
    adj[:n, :n] = g.adjacency
    adj[n:, n:] = h.adjacency
    return Graph(adj)


def complement(g):
    adj = 1 - g.adjacency
    np.fill_diagonal(adj, 0)
    return Graph(adj.astype(np.int8))


def distance_matrix(g):
    """All-pairs distances by BFS; disconnected pairs get the sentinel n+1."""
    n = g.n
    sentinel = n + 1
    dist = np.full((n, n), sentinel, dtype=np.int64)
    neighbors = [np.flatnonzero(g.adjacency[v]) for v in range(n)]
    for src in range(n):
        dist[src, src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in neighbors[u]:
                if dist[src, v] == sentinel:
                    dist[src, v] = dist[src, u] + 1
                    queue.append(v)
    return dist


def diameter(g):
    """Largest distance between two connected vertices (finite even for
    disconnected graphs; 0 when there are no edges)."""
    dist = distance_matrix(g)
    finite = dist[dist <= g.n]
    return int(finite.max())


def t_adjacency(g, t):
    """0/1 matrix of pairs at distance exactly t, via the power-of-adjacency
    recursion; the identity at t = 0 and the zero matrix beyond the diameter."""
    if t < 0:
        raise ValueError("t must be >= 0")
    n = g.n
    reached = np.eye(n, dtype=bool)  # pairs at distance <= s
    current = np.eye(n, dtype=np.int8)
    power = np.eye(n, dtype=np.int64)
    for _ in range(t):
        power = power @ g.adjacency.astype(np.int64)
        has_walk = power > 0
        current = (has_walk & ~reached).astype(np.int8)
        reached |= has_walk
    return current


def t_adjacency_stack(g, d):
    """A^(0) .. A^(d) stacked into shape (d+1, n, n)."""
    return np.stack([t_adjacency(g, t) for t in range(d + 1)])


@dataclass
class PartitionParams:
    """A D-common equitable partition of two graphs.

    counts[t, i, j] is the number of cell-j vertices at distance exactly t
    from any cell-i vertex; cbar[i, j] counts cell-j vertices farther than D.
    """

    d: int
    k: int
    sizes: np.ndarray  # (k,)
    counts: np.ndarray  # (d+1, k, k)
    cbar: np.ndarray  # (k, k)
    cells_g: list = field(default_factory=list)
    cells_h: list = field(default_factory=list)


def common_equitable_partition(g, h, d):
    """Coarsest joint partition found by distance-signature color refinement
    on the disjoint union; returns None when the refinement separates the
    graphs (unbalanced cells or mismatched counts)."""
    if g.n != h.n:
        return None
    n = g.n
    dg = distance_matrix(g)
    dh = distance_matrix(h)
    colors_g = np.zeros(n, dtype=np.int64)
    colors_h = np.zeros(n, dtype=np.int64)
    while True:
        sig_g = [_signature(dg, colors_g, v, d) for v in range(n)]
        sig_h = [_signature(dh, colors_h, v, d) for v in range(n)]
        palette = {s: i for i, s in enumerate(sorted(set(sig_g) | set(sig_h)))}
        new_g = np.array([palette[s] for s in sig_g], dtype=np.int64)
        new_h = np.array([palette[s] for s in sig_h], dtype=np.int64)
        stable = len(palette) == len(set(colors_g) | set(colors_h)) and _same_partition(
            colors_g, new_g
        ) and _same_partition(colors_h, new_h)
        colors_g, colors_h = new_g, new_h
        if stable:
            break
    k = len(set(colors_g) | set(colors_h))
    cells_g = [np.flatnonzero(colors_g == c).tolist() for c in range(k)]
    cells_h = [np.flatnonzero(colors_h == c).tolist() for c in range(k)]
    if any(len(cg) != len(ch) for cg, ch in zip(cells_g, cells_h)):
        return None
    if any(len(cg) == 0 for cg in cells_g):
        return None
    sizes = np.array([len(c) for c in cells_g], dtype=np.int64)
    counts = np.zeros((d + 1, k, k), dtype=np.int64)
    for t in range(d + 1):
        for i in range(k):
            for j in range(k):
                vals = {int(np.sum(dg[v, cells_g[j]] == t)) for v in cells_g[i]}
                vals |= {int(np.sum(dh[v, cells_h[j]] == t)) for v in cells_h[i]}
                if len(vals) != 1:
                    return None  # not equitable at distance t
                counts[t, i, j] = vals.pop()
    cbar = sizes[None, :] - counts.sum(axis=0)
    return PartitionParams(
        d=d, k=k, sizes=sizes, counts=counts, cbar=cbar, cells_g=cells_g, cells_h=cells_h
    )


def _signature(dist, colors, v, d):
    per_t = []
    for t in range(1, d + 1):
        at_t = colors[dist[v] == t]
        per_t.append(tuple(sorted(np.bincount(at_t, minlength=0).tolist())) if at_t.size else ())
    # Count multiset per (t, color): use sorted (color, count) pairs.
    per_t = []
    for t in range(1, d + 1):
        idx = np.flatnonzero(dist[v] == t)
        pairs = {}
        for u in idx:
            pairs[int(colors[u])] = pairs.get(int(colors[u]), 0) + 1
        per_t.append(tuple(sorted(pairs.items())))
    return (int(colors[v]), tuple(per_t))


def _same_partition(old, new):
    seen = {}
    for o, c in zip(old.tolist(), new.tolist()):
        if o in seen and seen[o] != c:
            return False
        seen[o] = c
    back = {}
    for o, c in zip(old.tolist(), new.tolist()):
        if c in back and back[c] != o:
            return False
        back[c] = o
    return True


def partition_witness_matrix(params):
    """Block-constant bistochastic matrix u[g, h] = 1/n_i on matched cells."""
    n = int(params.sizes.sum())
    u = np.zeros((n, n))
    for i in range(params.k):
        for gv in params.cells_g[i]:
            for hv in params.cells_h[i]:
                u[gv, hv] = 1.0 / params.sizes[i]
    return u


def d_fractionally_isomorphic(g, h, d, tol=1e-12):
    """True iff a D-common equitable partition exists; the block-constant
    witness is verified against every t-adjacency intertwining."""
    params = common_equitable_partition(g, h, d)
    if params is None:
        return False
    u = partition_witness_matrix(params)
    assert verify_intertwining(g, h, u, d, tol), "witness failed the intertwining check"
    return True


def fractional_isomorphism_witness(g, h, d):
    params = common_equitable_partition(g, h, d)
    if params is None:
        return None
    return partition_witness_matrix(params)


def verify_intertwining(g, h, u, d, tol=1e-12):
    """Check A_G^(t) u = u A_H^(t) for all t <= d, with u indexed [g, h]."""
    for t in range(d + 1):
        ag = t_adjacency(g, t).astype(float)
        ah = t_adjacency(h, t).astype(float)
        if np.max(np.abs(ag @ u - u @ ah)) > tol:
            return False
    return True


def lp_fractional_isomorphism(g, h, d):
    """Independent oracle: feasibility LP for a bistochastic u with
    A_G^(t) u = u A_H^(t) for all t <= d."""
    if g.n != h.n:
        return False
    n = g.n
    nv = n * n
    rows = []
    rhs = []
    # Row and column sums.
    for i in range(n):
        r = np.zeros(nv)
        r[i * n : (i + 1) * n] = 1.0
        rows.append(r)
        rhs.append(1.0)
    for j in range(n):
        r = np.zeros(nv)
        r[j::n] = 1.0
        rows.append(r)
        rhs.append(1.0)
    # Intertwinings (t = 0 is trivially satisfied).
    for t in range(1, d + 1):
        ag = t_adjacency(g, t).astype(float)
        ah = t_adjacency(h, t).astype(float)
        for a in range(n):
            for b in range(n):
                r = np.zeros((n, n))
                r[a, :] -= ah[:, b]
                r += np.outer(ag[a, :], np.eye(n)[b])
                rows.append(r.reshape(nv))
                rhs.append(0.0)
    res = linprog(
        np.zeros(nv),
        A_eq=np.stack(rows),
        b_eq=np.array(rhs),
        bounds=[(0, None)] * nv,
        method="highs",
    )
    return bool(res.success)


@dataclass
class NSStrategy:
    """Dense distance-game strategy over V = V(G) + V(H)."""

    table: np.ndarray  # (2n, 2n, 2n, 2n) indexed [x_A, x_B, y_A, y_B]
    g: Graph
    h: Graph
    d: int


def build_perfect_strategy(g, h, d, params=None):
    """The partition-based perfect strategy: matched-cell pairs at equal
    distance t get probability 1/(n_i c_ij^(t)), far pairs 1/(n_i cbar_ij),
    extended to mixed-side questions by swapping each party's question/answer
    pair."""
    if params is None:
        params = common_equitable_partition(g, h, d)
    if params is None:
        raise MissingPartition("graphs admit no D-common equitable partition")
    n = g.n
    if n > MAX_STRATEGY_VERTICES:
        raise TooLarge(f"dense strategies are capped at {MAX_STRATEGY_VERTICES} vertices per graph")
    dg = distance_matrix(g)
    dh = distance_matrix(h)
    cell_g = np.empty(n, dtype=np.int64)
    cell_h = np.empty(n, dtype=np.int64)
    for i, cell in enumerate(params.cells_g):
        cell_g[cell] = i
    for i, cell in enumerate(params.cells_h):
        cell_h[cell] = i
    base = np.zeros((n, n, n, n))  # [gA, gB, hA, hB]
    for ga in range(n):
        i = cell_g[ga]
        for gb in range(n):
            j = cell_g[gb]
            tg = dg[ga, gb]
            for ha in params.cells_h[i]:
                for hb in params.cells_h[j]:
                    th = dh[ha, hb]
                    if tg <= d:
                        if th == tg:
                            base[ga, gb, ha, hb] = 1.0 / (params.sizes[i] * params.counts[tg, i, j])
                    elif th > d:
                        base[ga, gb, ha, hb] = 1.0 / (params.sizes[i] * params.cbar[i, j])
    table = np.zeros((2 * n, 2 * n, 2 * n, 2 * n))
    for xa_side in (0, 1):
        for xb_side in (0, 1):
            for ga in range(n):
                for gb in range(n):
                    for ha in range(n):
                        for hb in range(n):
                            xa, ya = (ga, n + ha) if xa_side == 0 else (n + ha, ga)
                            xb, yb = (gb, n + hb) if xb_side == 0 else (n + hb, gb)
                            table[xa, xb, ya, yb] = base[ga, gb, ha, hb]
    return NSStrategy(table=table, g=g, h=h, d=d)


@dataclass
class StrategyReport:
    ok: bool
    normalization: float
    alice_marginal: float
    bob_marginal: float
    loss_mass: float
    min_entry: float
    failures: list


def validate_strategy(s, tol=1e-12):
    """Normalization, non-signaling marginals over V, and zero probability of
    losing the D-distance game."""
    t = s.table
    n = s.g.n
    nv = 2 * n
    failures = []
    min_entry = float(t.min())
    if min_entry < -tol:
        failures.append(("non-negativity", -min_entry))
    norm = float(np.abs(t.sum(axis=(2, 3)) - 1.0).max())
    if norm > tol:
        failures.append(("normalization", norm))
    ma = t.sum(axis=3)  # [xA, xB, yA]
    alice = float(np.abs(ma - ma[:, :1, :]).max())
    if alice > tol:
        failures.append(("alice-marginal", alice))
    mb = t.sum(axis=2)  # [xA, xB, yB]
    bob = float(np.abs(mb - mb[:1, :, :]).max())
    if bob > tol:
        failures.append(("bob-marginal", bob))
    loss = float(np.sum(t * _losing_mask(s)))
    if loss > tol:
        failures.append(("perfect-win", loss))
    return StrategyReport(
        ok=not failures,
        normalization=norm,
        alice_marginal=alice,
        bob_marginal=bob,
        loss_mass=loss,
        min_entry=min_entry,
        failures=failures,
    )


def _losing_mask(s):
    """1 where the (question, answer) tuple loses the D-distance game."""
    n = s.g.n
    nv = 2 * n
    dg = distance_matrix(s.g)
    dh = distance_matrix(s.h)
    d = s.d
    mask = np.zeros((nv, nv, nv, nv))
    for xa in range(nv):
        for ya in range(nv):
            a_flip = (xa < n) != (ya < n)
            for xb in range(nv):
                for yb in range(nv):
                    b_flip = (xb < n) != (yb < n)
                    if not (a_flip and b_flip):
                        mask[xa, xb, ya, yb] = 1.0
                        continue
                    ga, ha = (xa, ya - n) if xa < n else (ya, xa - n)
                    gb, hb = (xb, yb - n) if xb < n else (yb, xb - n)
                    tg = dg[ga, gb]
                    th = dh[ha, hb]
                    win = (th == tg) if tg <= d else (th > d)
                    if not win:
                        mask[xa, xb, ya, yb] = 1.0
    return mask


def hypothesis_h(params, h1_cells):
    """Cell-proportion condition: the fraction of each matched cell lying in
    the split part H1 is the same for every cell."""
    from fractions import Fraction

    h1 = set(h1_cells)
    ratios = {
        Fraction(sum(1 for v in params.cells_h[i] if v in h1), int(params.sizes[i]))
        for i in range(params.k)
    }
    return len(ratios) == 1


def component_split(h):
    """Split H into (first component's vertices, the rest); raises when H is
    connected."""
    dist = distance_matrix(h)
    first = set(np.flatnonzero(dist[0] <= h.n).tolist())
    rest = set(range(h.n)) - first
    if not rest:
        raise ValueError("graph is connected; no split available")
    return sorted(first), sorted(rest)


def symmetric_params(s, split, path, tol=1e-12):
    """Strategy weights eta and nu over the three path vertices.

    nu[(gA, gB)] is the probability that the answers land in opposite split
    parts (checked equal for both orders); eta is the common value of
    P(both in H1) + nu, checked constant over the path pairs.
    """
    h1, h2 = split
    n = s.g.n
    h1_idx = np.array([n + v for v in h1])
    h2_idx = np.array([n + v for v in h2])
    nu = {}
    etas = []
    for ga in path:
        for gb in path:
            block = s.table[ga, gb]
            v12 = float(block[np.ix_(h1_idx, h2_idx)].sum())
            v21 = float(block[np.ix_(h2_idx, h1_idx)].sum())
            if abs(v12 - v21) > tol:
                raise NotSymmetric(f"opposite-part weights differ at ({ga},{gb}): {v12} vs {v21}")
            v11 = float(block[np.ix_(h1_idx, h1_idx)].sum())
            nu[(ga, gb)] = v12
            etas.append(v11 + v12)
    if max(etas) - min(etas) > tol:
        raise NotSymmetric(f"eta varies across question pairs: {min(etas)}..{max(etas)}")
    return etas[0], nu


def pr_from_isomorphism(s, path, split, tol=1e-10):
    """Exact box simulated from a perfect symmetric strategy: questions map to
    path vertices (middle vertex for input 0, an endpoint for input 1), and
    answers to the split-part index of the received vertex."""
    report = validate_strategy(s, tol=max(tol, 1e-12))
    if report.loss_mass > tol or report.normalization > tol:
        raise ImperfectStrategy("strategy is not perfect for the distance game")
    eta, nu = symmetric_params(s, split, path, tol=tol)
    g1, g2, g3 = path
    h1, h2 = split
    n = s.g.n
    part_idx = [np.array([n + v for v in h1]), np.array([n + v for v in h2])]
    box = np.zeros(boxes.BOX_SHAPE)
    for x in (0, 1):
        ga = g2 if x == 0 else g1
        for y in (0, 1):
            gb = g2 if y == 0 else g3
            block = s.table[ga, gb]
            for a in (0, 1):
                for b in (0, 1):
                    box[a, b, x, y] = float(block[np.ix_(part_idx[a], part_idx[b])].sum())
    if not boxes.is_valid_box(box, tol=1e-10):
        raise ImperfectStrategy("simulated box violates the box constraints")
    return box


@dataclass
class HomStrategy:
    """Homomorphism-game strategy: questions in G, answers in H."""

    table: np.ndarray  # [g_A, g_B, h_A, h_B]
    g: Graph
    h: Graph


def coloring_game_box(m, n):
    """The non-signaling strategy winning the n-coloring game of the complete
    graph on m vertices: equal questions get equal colors (1/n each),
    distinct questions get distinct colors (1/(n(n-1)) each)."""
    if m < 2 or n < 2:
        raise ParameterTooSmall("coloring strategy needs m, n >= 2")
    table = np.zeros((m, m, n, n))
    for ga in range(m):
        for gb in range(m):
            for ha in range(n):
                for hb in range(n):
                    if ga == gb and ha == hb:
                        table[ga, gb, ha, hb] = 1.0 / n
                    elif ga != gb and ha != hb:
                        table[ga, gb, ha, hb] = 1.0 / (n * (n - 1))
    return HomStrategy(table=table, g=complete_graph(m), h=complete_graph(n))


def validate_hom_strategy(s, tol=1e-12):
    """Normalization, non-signaling, and perfect play of the homomorphism
    game (equal questions -> equal answers, adjacent -> adjacent)."""
    t = s.table
    failures = []
    if float(t.min()) < -tol:
        failures.append(("non-negativity", -float(t.min())))
    norm = float(np.abs(t.sum(axis=(2, 3)) - 1.0).max())
    if norm > tol:
        failures.append(("normalization", norm))
    ma = t.sum(axis=3)
    alice = float(np.abs(ma - ma[:, :1, :]).max())
    if alice > tol:
        failures.append(("alice-marginal", alice))
    mb = t.sum(axis=2)
    bob = float(np.abs(mb - mb[:1, :, :]).max())
    if bob > tol:
        failures.append(("bob-marginal", bob))
    ag = s.g.adjacency
    ah = s.h.adjacency
    loss = 0.0
    mg, nh = s.g.n, s.h.n
    for ga in range(mg):
        for gb in range(mg):
            for ha in range(nh):
                for hb in range(nh):
                    if ga == gb and ha != hb:
                        loss += t[ga, gb, ha, hb]
                    elif ag[ga, gb] and not ah[ha, hb]:
                        loss += t[ga, gb, ha, hb]
    if loss > tol:
        failures.append(("perfect-win", float(loss)))
    return StrategyReport(
        ok=not failures,
        normalization=norm,
        alice_marginal=alice,
        bob_marginal=bob,
        loss_mass=float(loss),
        min_entry=float(t.min()),
        failures=failures,
    )


def pr_from_coloring(s, tol=1e-10):
    """Exact box from a perfect 2-coloring strategy of the triangle: inputs
    pick triangle vertices sharing a middle vertex, Alice reports her color
    and Bob reports the flipped color."""
    if s.g.n != 3 or s.h.n != 2:
        raise ValueError("expected a strategy for the 2-coloring game of the 3-vertex complete graph")
    report = validate_hom_strategy(s, tol=max(tol, 1e-12))
    if report.loss_mass > tol or report.normalization > tol:
        raise ImperfectStrategy("strategy is not perfect for the coloring game")
    box = np.zeros(boxes.BOX_SHAPE)
    for x in (0, 1):
        ga = 0 if x == 0 else 1
        for y in (0, 1):
            gb = 2 if y == 0 else 1
            for ha in (0, 1):
                for hb in (0, 1):
                    a = ha
                    b = hb ^ 1
                    box[a, b, x, y] += s.table[ga, gb, ha, hb]
    if not boxes.is_valid_box(box, tol=1e-10):
        raise ImperfectStrategy("simulated box violates the box constraints")
    return box


def automorphisms(g):
    """All adjacency-preserving vertex bijections, by backtracking with
    degree/distance-profile pruning."""
    if g.n > MAX_AUTOMORPHISM_VERTICES:
        raise TooLarge(f"automorphism search is capped at {MAX_AUTOMORPHISM_VERTICES} vertices")
    n = g.n
    adj = g.adjacency
    dist = distance_matrix(g)
    profiles = [tuple(sorted(dist[v].tolist())) for v in range(n)]
    candidates = [
        [u for u in range(n) if profiles[u] == profiles[v]] for v in range(n)
    ]
    result = []
    perm = [-1] * n
    used = [False] * n

    def extend(v):
        if v == n:
            result.append(tuple(perm))
            return
        for u in candidates[v]:
            if used[u]:
                continue
            ok = True
            for w in range(v):
                if adj[v, w] != adj[u, perm[w]]:
                    ok = False
                    break
            if ok:
                perm[v] = u
                used[u] = True
                extend(v + 1)
                used[u] = False
                perm[v] = -1

    extend(0)
    return result


def strong_transitivity(g):
    """Decide strong transitivity (distance-transitive with diameter <= 2)
    and return the per-class automorphism counts (d1, d2, d3); counts are
    None where the corresponding pair class is empty."""
    if g.n > MAX_AUTOMORPHISM_VERTICES:
        raise TooLarge(f"transitivity check is capped at {MAX_AUTOMORPHISM_VERTICES} vertices")
    auts = automorphisms(g)
    dist = distance_matrix(g)
    n = g.n
    classes = {}
    for u in range(n):
        for v in range(n):
            classes.setdefault(int(dist[u, v]), []).append((u, v))
    finite = [c for c in classes if c <= n and c > 0]
    if finite and max(finite) > 2:
        return False, None
    for pairs in classes.values():
        u0, v0 = pairs[0]
        images = {(phi[u0], phi[v0]) for phi in auts}
        if not all(p in images for p in pairs):
            return False, None
    d1 = _count_maps(auts, *classes[0][0]) if 0 in classes else None
    edge_class = classes.get(1)
    d2 = _count_pair_maps(auts, edge_class[0], edge_class[0]) if edge_class else None
    non_edge = [c for c in classes if c != 0 and c != 1]
    d3 = _count_nonedge_maps(auts, dist, n) if non_edge else None
    return True, (d1, d2, d3)


def _count_maps(auts, u, v):
    return sum(1 for phi in auts if phi[u] == v)


def _count_pair_maps(auts, src, dst):
    return sum(1 for phi in auts if (phi[src[0]], phi[src[1]]) == dst)


def _count_nonedge_maps(auts, dist, n):
    # Count automorphisms sending one fixed complement edge to another; by
    # transitivity the count is pair-independent, so fix the first such pair.
    src = next((u, v) for u in range(n) for v in range(n) if u != v and dist[u, v] != 1)
    dst = src
    return sum(1 for phi in auts if (phi[src[0]], phi[src[1]]) == dst)


def symmetrize_strategy(s, auts):
    """Average the strategy over graph automorphisms of H applied to every
    H-side coordinate; preserves non-signaling and perfection."""
    ah = s.h.adjacency
    n = s.g.n
    for phi in auts:
        for u in range(s.h.n):
            for v in range(s.h.n):
                if ah[u, v] != ah[phi[u], phi[v]]:
                    raise NotAutomorphism("permutation does not preserve the adjacency of H")
    nv = 2 * n
    acc = np.zeros_like(s.table)
    for phi in auts:
        full = np.arange(nv)
        for v in range(s.h.n):
            full[n + v] = n + phi[v]
        inv = np.empty(nv, dtype=np.int64)
        inv[full] = np.arange(nv)
        acc += s.table[np.ix_(inv, inv, inv, inv)]
    return NSStrategy(table=acc / len(auts), g=s.g, h=s.h, d=s.d)


def cycle_counterexample(d):
    """The cycle pair separating depth d from depth d+1: the big cycle on
    2(2d+1) vertices against two copies of the odd cycle, plus the explicit
    half-identity-block bistochastic witness."""
    if d < 1:
        raise ValueError("d must be >= 1")
    n = 2 * d + 1
    g = cycle_graph(2 * n)
    h = disjoint_union(cycle_graph(n), cycle_graph(n))
    eye = np.eye(n)
    u = 0.5 * np.block([[eye, eye], [eye, eye]])
    return g, h, u


def strategy_dump_rows(table):
    """CSV rows (x_A, x_B, y_A, y_B, prob) for any dense strategy table."""
    rows = []
    it = np.ndindex(table.shape)
    for idx in it:
        rows.append((*idx, float(table[idx])))
    return rows
