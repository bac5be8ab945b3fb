"""Mixed wirings and the wired box product.

A wiring is a float64 array of length 32 holding the six local functions in
the order f1, g1, f2, g2, f3, g3 (arguments in lexicographic order):

    index  0..3    f1(x, a2)   input of the first box on Alice's side
    index  4..7    g1(y, b2)   input of the first box on Bob's side
    index  8..11   f2(x, a1)   input of the second box on Alice's side
    index 12..15   g2(y, b1)   input of the second box on Bob's side
    index 16..23   f3(x, a1, a2)   Alice's output
    index 24..31   g3(y, b1, b2)   Bob's output

Coordinates live in [0, 1] and are read as Bernoulli parameters; a wiring is
feasible when, for each x, at most one of f1(x, .), f2(x, .) actually depends
on its second argument (non-cyclicity), and likewise for g1, g2 over y.
"""

from dataclasses import dataclass

import numpy as np

from boxlab import boxes, kernels
from boxlab.errors import InvalidBox, InvalidWiring, UnsupportedClass

WIRING_LEN = 32

_F1, _G1, _F2, _G2, _F3, _G3 = 0, 4, 8, 12, 16, 24


def wiring_from_functions(f1, g1, f2, g2, f3, g3):
    """Assemble a wiring vector from callables.

    f1(x, a2), g1(y, b2), f2(x, a1), g2(y, b1) take two bits; f3(x, a1, a2)
    and g3(y, b1, b2) take three.  Values may be any reals in [0, 1].
    """
    w = np.zeros(WIRING_LEN)
    for u in (0, 1):
        for v in (0, 1):
            w[_F1 + 2 * u + v] = f1(u, v)
            w[_G1 + 2 * u + v] = g1(u, v)
            w[_F2 + 2 * u + v] = f2(u, v)
            w[_G2 + 2 * u + v] = g2(u, v)
    for u in (0, 1):
        for v in (0, 1):
            for s in (0, 1):
                w[_F3 + 4 * u + 2 * v + s] = f3(u, v, s)
                w[_G3 + 4 * u + 2 * v + s] = g3(u, v, s)
    return w


WIRING_NAMES = ("W_triv", "W_lin", "W_xor", "W_BS", "W_dist", "W_and", "W_or_and")


def named_wiring(name):
    """Deterministic wirings from the literature.

    W_triv ignores the boxes and outputs the global inputs; W_lin chains the
    first box's output into the second box; W_xor, W_and, W_or_and run the
    boxes in parallel and combine outputs bitwise; W_BS and W_dist are the
    adaptive distillation wirings (second input x*a1, resp. y*b1).
    """
    if name == "W_triv":
        return wiring_from_functions(
            lambda x, a2: x,
            lambda y, b2: y,
            lambda x, a1: x,
            lambda y, b1: y,
            lambda x, a1, a2: x,
            lambda y, b1, b2: y,
        )
    if name == "W_lin":
        return wiring_from_functions(
            lambda x, a2: x,
            lambda y, b2: y,
            lambda x, a1: a1,
            lambda y, b1: b1,
            lambda x, a1, a2: a2,
            lambda y, b1, b2: b2,
        )
    if name == "W_xor":
        return wiring_from_functions(
            lambda x, a2: x,
            lambda y, b2: y,
            lambda x, a1: x,
            lambda y, b1: y,
            lambda x, a1, a2: a1 ^ a2,
            lambda y, b1, b2: b1 ^ b2,
        )
    if name == "W_BS":
        return wiring_from_functions(
            lambda x, a2: x,
            lambda y, b2: y,
            lambda x, a1: x & a1,
            lambda y, b1: y & b1,
            lambda x, a1, a2: a1 ^ a2,
            lambda y, b1, b2: b1 ^ b2,
        )
    if name == "W_dist":
        # Adaptive like W_BS; output functions transcribed from the usual
        # circuit drawing: f3 = x a2 | x ~a1 | ~x a2 a1, g3 = y b2 | y ~b1.
        return wiring_from_functions(
            lambda x, a2: x,
            lambda y, b2: y,
            lambda x, a1: x & a1,
            lambda y, b1: y & b1,
            lambda x, a1, a2: (x & a2) | (x & (a1 ^ 1)) | ((x ^ 1) & a2 & a1),
            lambda y, b1, b2: (y & b2) | (y & (b1 ^ 1)),
        )
    if name == "W_and":
        return wiring_from_functions(
            lambda x, a2: x,
            lambda y, b2: y,
            lambda x, a1: x,
            lambda y, b1: y,
            lambda x, a1, a2: a1 & a2,
            lambda y, b1, b2: b1 & b2,
        )
    if name == "W_or_and":
        return wiring_from_functions(
            lambda x, a2: x,
            lambda y, b2: y,
            lambda x, a1: x,
            lambda y, b1: y,
            lambda x, a1, a2: a1 | a2,
            lambda y, b1, b2: b1 & b2,
        )
    raise ValueError(f"unknown wiring name: {name!r}")


@dataclass
class WiringReport:
    ok: bool
    range_violation: float  # max distance outside [0, 1]
    noncyclicity: dict  # ('f', x) / ('g', y) -> residual
    failures: list


def validate_wiring(w, tol=1e-12):
    """Report range and non-cyclicity residuals."""
    w = np.asarray(w, dtype=float)
    failures = []
    if w.shape != (WIRING_LEN,):
        raise InvalidWiring("wiring must have 32 coordinates")
    rng_viol = float(np.maximum(np.maximum(-w, w - 1.0), 0.0).max())
    if rng_viol > tol:
        failures.append(("range", rng_viol))
    residuals = {}
    for x in (0, 1):
        r = abs((w[_F1 + 2 * x] - w[_F1 + 2 * x + 1]) * (w[_F2 + 2 * x] - w[_F2 + 2 * x + 1]))
        residuals[("f", x)] = r
        if r > tol:
            failures.append((f"non-cyclicity f x={x}", r))
    for y in (0, 1):
        r = abs((w[_G1 + 2 * y] - w[_G1 + 2 * y + 1]) * (w[_G2 + 2 * y] - w[_G2 + 2 * y + 1]))
        residuals[("g", y)] = r
        if r > tol:
            failures.append((f"non-cyclicity g y={y}", r))
    return WiringReport(
        ok=not failures,
        range_violation=rng_viol,
        noncyclicity=residuals,
        failures=failures,
    )


def is_valid_wiring(w, tol=1e-12):
    return validate_wiring(w, tol).ok


def project_wiring(v):
    """Projection onto the feasible set: clamp to [0, 1], then for each x
    average the (f1, f2) pair with the smaller gap (f1 on ties), and likewise
    for (g1, g2) over y.  Valid wirings are fixed points."""
    v = np.asarray(v, dtype=float).reshape(1, WIRING_LEN)
    return kernels.project_batch(v)[0]


def box_product(p, q, w, tol=1e-10):
    """The box built by wiring p (first box) and q (second box) with w."""
    if not boxes.is_valid_box(p, tol):
        raise InvalidBox("left factor is not a valid non-signaling box")
    if not boxes.is_valid_box(q, tol):
        raise InvalidBox("right factor is not a valid non-signaling box")
    if not is_valid_wiring(w, tol):
        raise InvalidWiring("wiring fails range or non-cyclicity constraints")
    return kernels.box_product(
        np.ascontiguousarray(p, dtype=float),
        np.ascontiguousarray(q, dtype=float),
        np.ascontiguousarray(w, dtype=float),
    )


def multiplication_table(w, basis):
    """Table of pairwise products: cell (i, j) = basis[i] wired with basis[j]."""
    return [[box_product(bi, bj, w) for bj in basis] for bi in basis]


def _uniform_input_class(w, tol=1e-12):
    """Check f1 = f2 = f(x) and g1 = g2 = g(y) (no dependence on the other
    box's output); returns (f, g) tables or raises UnsupportedClass."""
    w = np.asarray(w, dtype=float)
    f = np.empty(2)
    g = np.empty(2)
    for x in (0, 1):
        vals = [w[_F1 + 2 * x], w[_F1 + 2 * x + 1], w[_F2 + 2 * x], w[_F2 + 2 * x + 1]]
        if max(vals) - min(vals) > tol:
            raise UnsupportedClass("wiring inputs depend on box outputs or differ between boxes")
        f[x] = vals[0]
    for y in (0, 1):
        vals = [w[_G1 + 2 * y], w[_G1 + 2 * y + 1], w[_G2 + 2 * y], w[_G2 + 2 * y + 1]]
        if max(vals) - min(vals) > tol:
            raise UnsupportedClass("wiring inputs depend on box outputs or differ between boxes")
        g[y] = vals[0]
    return f, g


def commutativity_symmetry_check(w, tol=1e-12):
    """For parallel wirings with common input functions, the induced product
    commutes iff the output functions are symmetric in the two box outputs."""
    _uniform_input_class(w, tol)
    w = np.asarray(w, dtype=float)
    for x in (0, 1):
        for a1 in (0, 1):
            for a2 in (0, 1):
                if abs(w[_F3 + 4 * x + 2 * a1 + a2] - w[_F3 + 4 * x + 2 * a2 + a1]) > tol:
                    return False
    for y in (0, 1):
        for b1 in (0, 1):
            for b2 in (0, 1):
                if abs(w[_G3 + 4 * y + 2 * b1 + b2] - w[_G3 + 4 * y + 2 * b2 + b1]) > tol:
                    return False
    return True


def _compose3(table, x, u, v):
    """table(x, u, v) with v in [0, 1] read as a Bernoulli parameter."""
    return (1.0 - v) * table[4 * x + 2 * u] + v * table[4 * x + 2 * u + 1]


def _compose3_left(table, x, u, v):
    return (1.0 - u) * table[4 * x + v] + u * table[4 * x + 2 + v]


def associativity_check(w, tol=1e-12):
    """For parallel wirings with identity input functions, the induced product
    is associative iff the output functions are associative in the two box
    outputs."""
    f, g = _uniform_input_class(w, tol)
    w = np.asarray(w, dtype=float)
    if abs(f[0]) > tol or abs(f[1] - 1.0) > tol or abs(g[0]) > tol or abs(g[1] - 1.0) > tol:
        raise UnsupportedClass("associativity predicate needs identity input functions")
    f3 = w[_F3 : _F3 + 8]
    g3 = w[_G3 : _G3 + 8]
    for table in (f3, g3):
        for x in (0, 1):
            for a1 in (0, 1):
                for a2 in (0, 1):
                    for a3 in (0, 1):
                        lhs = _compose3(table, x, a1, _compose3(table, x, a2, a3))
                        rhs = _compose3_left(table, x, _compose3(table, x, a1, a2), a3)
                        if abs(lhs - rhs) > tol:
                            return False
    return True


def is_commutative_empirical(w, n_samples=20, seed=0, tol=1e-10):
    """Compare p (x) q against q (x) p on random non-signaling boxes."""
    rng = np.random.default_rng(seed)
    pts = boxes.ns_extreme_points()
    for _ in range(n_samples):
        p = _random_ns_box(rng, pts)
        q = _random_ns_box(rng, pts)
        lhs = box_product(p, q, w)
        rhs = box_product(q, p, w)
        if np.max(np.abs(lhs - rhs)) > tol:
            return False
    return True


def is_associative_empirical(w, n_samples=20, seed=0, tol=1e-10):
    """Compare (p q) r against p (q r) on random non-signaling boxes."""
    rng = np.random.default_rng(seed)
    pts = boxes.ns_extreme_points()
    for _ in range(n_samples):
        p = _random_ns_box(rng, pts)
        q = _random_ns_box(rng, pts)
        r = _random_ns_box(rng, pts)
        lhs = box_product(box_product(p, q, w), r, w)
        rhs = box_product(p, box_product(q, r, w), w)
        if np.max(np.abs(lhs - rhs)) > tol:
            return False
    return True


def _random_ns_box(rng, pts=None):
    """Random non-signaling box: Dirichlet mixture of the 24 extreme points."""
    if pts is None:
        pts = boxes.ns_extreme_points()
    weights = rng.dirichlet(np.ones(len(pts)))
    out = np.zeros(boxes.BOX_SHAPE)
    for wgt, pt in zip(weights, pts):
        out += wgt * pt
    return out


def random_ns_box(rng):
    return _random_ns_box(rng)


def random_wiring(rng):
    """Random mixed wiring: uniform vector projected onto the feasible set."""
    return project_wiring(rng.random(WIRING_LEN))


def wiring_to_json(w):
    import json

    return json.dumps([float(v) for v in np.asarray(w, dtype=float)])


def wiring_from_json(text):
    import json

    w = np.asarray(json.loads(text), dtype=float)
    if w.shape != (WIRING_LEN,):
        raise InvalidWiring("expected 32 coordinates")
    return w


def layout_doc():
    """Human-readable index <-> (function, arguments) mapping."""
    lines = []
    for i in range(WIRING_LEN):
        if i < 4:
            fn, args = "f1", (i >> 1, i & 1)
            desc = f"x={args[0]}, a2={args[1]}"
        elif i < 8:
            j = i - 4
            fn, desc = "g1", f"y={j >> 1}, b2={j & 1}"
        elif i < 12:
            j = i - 8
            fn, desc = "f2", f"x={j >> 1}, a1={j & 1}"
        elif i < 16:
            j = i - 12
            fn, desc = "g2", f"y={j >> 1}, b1={j & 1}"
        elif i < 24:
            j = i - 16
            fn, desc = "f3", f"x={j >> 2}, a1={(j >> 1) & 1}, a2={j & 1}"
        else:
            j = i - 24
            fn, desc = "g3", f"y={j >> 2}, b1={(j >> 1) & 1}, b2={j & 1}"
        lines.append(f"{i:2d}  {fn}({desc})")
    return "\n".join(lines)
