"""CHSH-scenario nonlocal boxes.

A box is a float64 array of shape (2, 2, 2, 2) indexed ``p[a, b, x, y]`` and
holding the conditional probabilities P(a,b|x,y).  The serialized order (JSON
list and CSV) is the correlation-table flattening: row-major over (x, y, a, b),
i.e. ``flat[8x + 4y + 2a + b] = p[a, b, x, y]``, rows xy in {00,01,10,11} and
columns ab in {00,01,10,11}.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from boxlab.errors import DegenerateBasis, NotInSpan, WeightSumError
from boxlab.kernels import chsh as _chsh_kernel

BOX_SHAPE = (2, 2, 2, 2)

# (3 + sqrt(6))/6, the CHSH winning probability above which communication
# complexity is known to collapse.  Stored once at full double precision.
COLLAPSE_THRESHOLD = 0.9082482904638630


def local_extreme(alpha, beta, gamma, delta):
    """Deterministic box: a = alpha*x + beta, b = gamma*y + delta (mod 2)."""
    p = np.zeros(BOX_SHAPE)
    for x in (0, 1):
        for y in (0, 1):
            a = (alpha & x) ^ beta
            b = (gamma & y) ^ delta
            p[a, b, x, y] = 1.0
    return p


def nonlocal_extreme(alpha, beta, gamma):
    """PR-type extreme box: a + b = xy + alpha*x + beta*y + gamma (mod 2),
    uniform over the two consistent outcome pairs."""
    p = np.zeros(BOX_SHAPE)
    for x in (0, 1):
        for y in (0, 1):
            for a in (0, 1):
                for b in (0, 1):
                    if a ^ b == (x & y) ^ (alpha & x) ^ (beta & y) ^ gamma:
                        p[a, b, x, y] = 0.5
    return p


def make_named_box(name):
    """Construct a box from its name.

    Accepted names: PR, PR', SR, I, P00, P11, plus parametrized families
    ``PLabgd`` (four bits, e.g. PL0101) and ``PNLabg`` (three bits).
    """
    name = name.strip()
    if name == "PR":
        return nonlocal_extreme(0, 0, 0)
    if name in ("PR'", "PRp"):
        return nonlocal_extreme(1, 1, 1)
    if name == "I":
        return np.full(BOX_SHAPE, 0.25)
    if name == "SR":
        return 0.5 * (local_extreme(0, 0, 0, 0) + local_extreme(0, 1, 0, 1))
    if name == "P00":
        return local_extreme(0, 0, 0, 0)
    if name == "P11":
        return local_extreme(0, 1, 0, 1)
    if name.startswith("PNL") and len(name) == 6 and set(name[3:]) <= {"0", "1"}:
        return nonlocal_extreme(*(int(c) for c in name[3:]))
    if name.startswith("PL") and len(name) == 6 and set(name[2:]) <= {"0", "1"}:
        return local_extreme(*(int(c) for c in name[2:]))
    raise ValueError(f"unknown box name: {name!r}")


BOX_NAMES = ("PR", "PR'", "SR", "I", "P00", "P11")


def isotropic_box(eta):
    """eta*PR + (1-eta)*I; all four biases equal eta."""
    return eta * make_named_box("PR") + (1.0 - eta) * make_named_box("I")


def deterministic_boxes():
    """The 16 deterministic boxes, ordered by (alpha, beta, gamma, delta)."""
    return [
        local_extreme(a, b, g, d)
        for a in (0, 1)
        for b in (0, 1)
        for g in (0, 1)
        for d in (0, 1)
    ]


def ns_extreme_points():
    """All 24 extreme points of the non-signaling polytope (16 local + 8 PR
    variants)."""
    pts = deterministic_boxes()
    pts += [nonlocal_extreme(a, b, g) for a in (0, 1) for b in (0, 1) for g in (0, 1)]
    return pts


@dataclass
class NSReport:
    """Residuals of the non-signaling box constraints."""

    ok: bool
    min_entry: float
    normalization: np.ndarray  # (2,2) residual per (x,y)
    alice_marginal: float  # max_{a,x,y,y'} |sum_b p(ab|xy) - sum_b p(ab|xy')|
    bob_marginal: float  # max_{b,y,x,x'} |sum_a p(ab|xy) - sum_a p(ab|x'y)|
    failures: list


def validate_ns(p, tol=1e-12):
    """Check non-negativity, normalization and the no-signaling marginals,
    reporting each violated constraint with its residual."""
    p = np.asarray(p, dtype=float)
    failures = []
    min_entry = float(p.min())
    if min_entry < -tol:
        failures.append(("non-negativity", -min_entry))
    norm = np.abs(p.sum(axis=(0, 1)) - 1.0)
    if norm.max() > tol:
        failures.append(("normalization", float(norm.max())))
    # Alice's marginal sum_b p(a,b|x,y) must not depend on y.
    ma = p.sum(axis=1)  # (a, x, y)
    alice = float(np.abs(ma[:, :, 0] - ma[:, :, 1]).max())
    if alice > tol:
        failures.append(("alice-marginal", alice))
    mb = p.sum(axis=0)  # (b, x, y)
    bob = float(np.abs(mb[:, 0, :] - mb[:, 1, :]).max())
    if bob > tol:
        failures.append(("bob-marginal", bob))
    return NSReport(
        ok=not failures,
        min_entry=min_entry,
        normalization=norm,
        alice_marginal=alice,
        bob_marginal=bob,
        failures=failures,
    )


def is_valid_box(p, tol=1e-12):
    return validate_ns(p, tol).ok


_PREDICATES = {
    "CHSH": lambda a, b, x, y: a ^ b == x & y,
    "CHSH'": lambda a, b, x, y: a ^ b == (x ^ 1) & (y ^ 1),
    "CHSH''": lambda a, b, x, y: a ^ b == x & (y ^ 1),
}


def chsh_value(p, variant="CHSH"):
    """Winning probability at the CHSH game or one of its relabeled variants."""
    if variant == "CHSH":
        return float(_chsh_kernel(np.ascontiguousarray(p, dtype=float)))
    pred = _PREDICATES[variant]
    s = 0.0
    for a in (0, 1):
        for b in (0, 1):
            for x in (0, 1):
                for y in (0, 1):
                    if pred(a, b, x, y):
                        s += p[a, b, x, y]
    return 0.25 * s


def bias(p, x, y):
    """2*P(a+b = xy | x,y) - 1."""
    win = 0.0
    for a in (0, 1):
        for b in (0, 1):
            if a ^ b == x & y:
                win += p[a, b, x, y]
    return 2.0 * win - 1.0


def biases(p):
    """All four biases as a (2,2) array indexed [x,y]."""
    return np.array([[bias(p, x, y) for y in (0, 1)] for x in (0, 1)])


def uniformize(p):
    """Flip-average both outputs with a shared random bit; marginals become
    1/2 while every bias is preserved."""
    return 0.5 * (p + p[::-1, ::-1, :, :])


def mix(terms, tol=1e-9):
    """Affine combination sum w_i * box_i; weights must sum to 1."""
    total = sum(w for w, _ in terms)
    if abs(total - 1.0) > tol:
        raise WeightSumError(f"weights sum to {total}, expected 1")
    out = np.zeros(BOX_SHAPE)
    for w, box in terms:
        out = out + w * np.asarray(box, dtype=float)
    return out


def box_to_flat(p):
    """Serialized order: row-major over (x, y, a, b)."""
    return np.transpose(np.asarray(p, dtype=float), (2, 3, 0, 1)).reshape(16)


def box_from_flat(flat):
    flat = np.asarray(flat, dtype=float)
    if flat.shape != (16,):
        raise ValueError("expected 16 values")
    return np.transpose(flat.reshape(2, 2, 2, 2), (2, 3, 0, 1))


def box_to_json(p):
    return json.dumps({"p": [float(v) for v in box_to_flat(p)]})


def box_from_json(text):
    data = json.loads(text)
    return box_from_flat(data["p"])


def correlation_table(p):
    """4x4 table, rows xy in {00,01,10,11}, columns ab in {00,01,10,11}."""
    return box_to_flat(p).reshape(4, 4)


def box_from_table(table):
    return box_from_flat(np.asarray(table, dtype=float).reshape(16))


def box_to_csv(p):
    return "\n".join(",".join(repr(float(v)) for v in row) for row in correlation_table(p)) + "\n"


def box_from_csv(text):
    rows = [
        [float(v) for v in line.split(",")]
        for line in text.strip().splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    return box_from_table(rows)


def is_local(p, tol=1e-9):
    """Membership in the local polytope, decided by a small LP.

    Minimizes the max-norm distance from p to the convex hull of the 16
    deterministic boxes; returns (True, weights) when the distance is within
    tol, (False, None) otherwise.  The weights certify the decomposition.
    """
    dets = deterministic_boxes()
    cols = np.stack([box_to_flat(d) for d in dets], axis=1)  # (16, 16)
    target = box_to_flat(p)
    # Variables: q (16 weights) and t (distance).  Minimize t subject to
    # -t <= (Aq - target)_i <= t, q >= 0, sum q = 1.
    n = 16
    c = np.zeros(n + 1)
    c[-1] = 1.0
    a_ub = np.block(
        [
            [cols, -np.ones((16, 1))],
            [-cols, -np.ones((16, 1))],
        ]
    )
    b_ub = np.concatenate([target, -target])
    a_eq = np.zeros((1, n + 1))
    a_eq[0, :n] = 1.0
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=[1.0],
        bounds=[(0, None)] * n + [(0, None)],
        method="highs",
    )
    if not res.success:
        return False, None
    if res.x[-1] > tol:
        return False, None
    return True, res.x[:n].copy()


@dataclass
class CollapseReport:
    """Result of the bias-polynomial collapse test: the criterion holds when
    A + B > 16, and the fixed points of the bias recursion are reported."""

    A: float
    B: float
    satisfied: bool
    mu_star: float | None = None
    mu_max: float | None = None


def _ab_coefficients(p):
    e = biases(p)
    a_val = float((e[0, 0] + e[0, 1] + e[1, 0] + e[1, 1]) ** 2)
    b_val = float(2 * e[0, 0] ** 2 + 4 * e[0, 1] * e[1, 0] + 2 * e[1, 1] ** 2)
    return a_val, b_val


def collapse_criterion(p):
    a_val, b_val = _ab_coefficients(p)
    satisfied = a_val + b_val > 16.0
    mu_star = mu_max = None
    if satisfied:
        # A - B > 0 is automatic here since B <= 8.
        mu_star = math.sqrt((a_val + b_val - 16.0) / (a_val - b_val))
        mu_max = math.sqrt((a_val + b_val) / (3.0 * (a_val - b_val)))
    return CollapseReport(A=a_val, B=b_val, satisfied=satisfied, mu_star=mu_star, mu_max=mu_max)


def iterate_bias(p, mu0, steps):
    """Iterate the cubic bias recursion; returns [mu0, mu1, ..., mu_steps]."""
    if abs(mu0) > 1.0:
        raise ValueError("initial bias must lie in [-1, 1]")
    a_val, b_val = _ab_coefficients(p)
    seq = [float(mu0)]
    mu = float(mu0)
    for _ in range(steps):
        mu = (mu / 16.0) * (a_val + b_val - mu * mu * (a_val - b_val))
        seq.append(mu)
    return np.array(seq)


def slice_coordinates(p, basis, tol=1e-9):
    """Affine coordinates (c1, c2, c3) of p in the given three-box basis,
    found by least squares with an explicit residual check."""
    b1, b2, b3 = (box_to_flat(b) for b in basis)
    target = box_to_flat(p)
    # Substitute c3 = 1 - c1 - c2.
    m = np.stack([b1 - b3, b2 - b3], axis=1)  # (16, 2)
    rhs = target - b3
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[-1] < 1e-12:
        raise DegenerateBasis("basis boxes are affinely dependent")
    sol, _, _, _ = np.linalg.lstsq(m, rhs, rcond=None)
    resid = float(np.max(np.abs(m @ sol - rhs)))
    if resid > tol:
        raise NotInSpan(f"box is not in the affine span (residual {resid:.3e})")
    c1, c2 = float(sol[0]), float(sol[1])
    return c1, c2, 1.0 - c1 - c2
