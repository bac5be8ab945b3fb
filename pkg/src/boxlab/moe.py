"""Clifford-algebra machinery for the unclonable-bit game: generators,
encryption, the three-party game operator and its norm, sum-of-squares
residuals, the closed-form first-level relaxation value, and the alternating
(seesaw) lower-bound search."""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from boxlab.errors import (
    DimensionLimit,
    InvalidKey,
    NonCommuting,
    NotHermitianUnitary,
    OutOfRange,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# Memory guard on the generator dimension (dense d x d Pauli strings with
# d = 2^floor(k/2)); k = 20 keeps d at 1024.
MAX_KEYS = 20
DENSE_EIG_LIMIT = 4096


@dataclass
class CliffordSet:
    k: int
    d: int
    gammas: list


def _pauli_string(ops):
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def clifford_generators(k):
    """Pairwise anticommuting Hermitian unitaries as Pauli strings on
    floor(k/2) qubits; odd k appends the all-X string."""
    if k < 1:
        raise ValueError("need k >= 1")
    if k > MAX_KEYS:
        raise DimensionLimit(f"generator sets are capped at k = {MAX_KEYS}")
    n = k // 2
    eye = np.eye(2, dtype=complex)
    gammas = []
    for i in range(1, n + 1):
        prefix = [SIGMA_X] * (i - 1)
        suffix = [eye] * (n - i)
        gammas.append(_pauli_string(prefix + [SIGMA_Y] + suffix))
        gammas.append(_pauli_string(prefix + [SIGMA_Z] + suffix))
    if k % 2 == 1:
        gammas.append(_pauli_string([SIGMA_X] * n))
    return CliffordSet(k=k, d=2**n, gammas=gammas)


def encrypt(m, key, cs):
    """Density matrix of the encrypted bit: the normalized projector onto the
    (-1)^m eigenspace of the key's generator."""
    if not 1 <= key <= cs.k:
        raise InvalidKey(f"key must lie in 1..{cs.k}")
    if m not in (0, 1):
        raise ValueError("message must be a bit")
    gamma = cs.gammas[key - 1]
    return (np.eye(cs.d, dtype=complex) + (-1) ** m * gamma) / cs.d


def decrypt(rho, key, cs):
    """Measurement in the key generator's eigenbasis: returns (p0, p1)."""
    if not 1 <= key <= cs.k:
        raise InvalidKey(f"key must lie in 1..{cs.k}")
    gamma = cs.gammas[key - 1]
    eye = np.eye(cs.d, dtype=complex)
    probs = []
    for i in (0, 1):
        proj = 0.5 * (eye + (-1) ** i * gamma)
        probs.append(float(np.real(np.trace(proj @ rho))))
    return tuple(probs)


def _check_hermitian_unitary(u, tol=1e-10):
    u = np.asarray(u, dtype=complex)
    if np.max(np.abs(u - u.conj().T)) > tol:
        raise NotHermitianUnitary("operator is not Hermitian")
    if np.max(np.abs(u @ u - np.eye(u.shape[0]))) > tol:
        raise NotHermitianUnitary("operator does not square to the identity")
    return u


def w_k_operator(cs, u_list):
    """Dense game operator on dim d*D^2:
    sum_k Gamma_k (x) (U_k (x) I + I (x) U_k) + I (x) U_k (x) U_k."""
    if len(u_list) != cs.k:
        raise ValueError("need one operator per key")
    us = [_check_hermitian_unitary(u) for u in u_list]
    dim_d = us[0].shape[0]
    eye_d = np.eye(dim_d, dtype=complex)
    eye_g = np.eye(cs.d, dtype=complex)
    total = np.zeros((cs.d * dim_d * dim_d, cs.d * dim_d * dim_d), dtype=complex)
    for gamma, u in zip(cs.gammas, us):
        total += np.kron(gamma, np.kron(u, eye_d) + np.kron(eye_d, u))
        total += np.kron(eye_g, np.kron(u, u))
    return total


def opnorm_hermitian(h):
    """Largest absolute eigenvalue: full decomposition up to 4096, Lanczos
    iteration above."""
    if isinstance(h, spla.LinearOperator):
        hi = spla.eigsh(h, k=1, which="LA", tol=1e-10, return_eigenvectors=False)
        lo = spla.eigsh(h, k=1, which="SA", tol=1e-10, return_eigenvectors=False)
        return float(max(abs(hi[0]), abs(lo[0])))
    h = np.asarray(h)
    if h.shape[0] <= DENSE_EIG_LIMIT:
        vals = np.linalg.eigvalsh(h)
        return float(max(abs(vals[0]), abs(vals[-1])))
    hi = spla.eigsh(h, k=1, which="LA", tol=1e-10, return_eigenvectors=False)
    lo = spla.eigsh(h, k=1, which="SA", tol=1e-10, return_eigenvectors=False)
    return float(max(abs(hi[0]), abs(lo[0])))


def win_prob(k, norm):
    """Game winning probability from the operator norm: 1/4 + norm/(4k)."""
    if norm < 0:
        raise ValueError("norm must be non-negative")
    return 0.25 + norm / (4.0 * k)


def alpha_k(k):
    """Coefficient of the squared slack term in the parameterized SoS family;
    positive for k <= 7, negative from k = 8 on."""
    if k < 2:
        raise ValueError("need k >= 2")
    return ((3.0 * k - 2.0) * math.sqrt(k) - k * k) / (2.0 * k * (k - 1.0))


def game_polynomial(cs, b_list, c_list):
    """P_K = (K + 2 sqrt(K)) I - sum_k [Gamma_k (x) (b_k + c_k) + I (x) b_k c_k]
    on dim d * E, with b, c already embedded as commuting operators on E."""
    k = cs.k
    dim_e = b_list[0].shape[0]
    eye = np.eye(cs.d * dim_e, dtype=complex)
    total = (k + 2.0 * math.sqrt(k)) * eye
    eye_g = np.eye(cs.d, dtype=complex)
    for gamma, b, c in zip(cs.gammas, b_list, c_list):
        total -= np.kron(gamma, b + c) + np.kron(eye_g, b @ c)
    return total


def sos_residual(k, b_list, c_list, tol=1e-10):
    """Max-norm gap between the game polynomial and its parameterized
    sum-of-squares form; an identity (residual ~ 0) for k = 2..7."""
    if not 2 <= k <= 7:
        raise OutOfRange("the parameterized certificate family covers k = 2..7 only")
    if len(b_list) != k or len(c_list) != k:
        raise ValueError("need one b and one c per key")
    bs = [_check_hermitian_unitary(b) for b in b_list]
    cs_ops = [_check_hermitian_unitary(c) for c in c_list]
    for b in bs:
        for c in cs_ops:
            if np.max(np.abs(b @ c - c @ b)) > tol:
                raise NonCommuting("b and c operators must pairwise commute")
    cs = clifford_generators(k)
    dim_e = bs[0].shape[0]
    eye = np.eye(cs.d * dim_e, dtype=complex)
    rk = math.sqrt(k)
    q_mat = rk * eye
    for gamma, c in zip(cs.gammas, cs_ops):
        q_mat = q_mat - np.kron(gamma, c)
    rhs = alpha_k(k) * (q_mat @ q_mat)
    coeff = (k - rk) / (2.0 * k * (k - 1.0))
    for gamma, b, c in zip(cs.gammas, bs, cs_ops):
        term = q_mat + (rk + 1.0) * np.kron(gamma, c - b)
        rhs = rhs + coeff * (term @ term)
    p_mat = game_polynomial(cs, bs, cs_ops)
    return float(np.max(np.abs(p_mat - rhs)))


def sos_k2_foursquare_residual(b1, b2, c1, c2):
    """Residual of the explicit four-square certificate at k = 2, written with
    the X/Z generator pair; inputs are the embedded commuting operators."""
    cs = CliffordSet(k=2, d=2, gammas=[SIGMA_X, SIGMA_Z])
    dim_e = b1.shape[0]
    eye = np.eye(2 * dim_e, dtype=complex)
    rt2 = math.sqrt(2.0)
    p_mat = game_polynomial(cs, [b1, b2], [c1, c2])
    t1 = np.kron(SIGMA_X, b1) + np.kron(SIGMA_Z, c2) - rt2 * eye
    t2 = np.kron(SIGMA_X, c1) + np.kron(SIGMA_Z, b2) - rt2 * eye
    # b, c already live on E; the scalar-looking squares embed with I_2.
    rhs = (t1 @ t1 + t2 @ t2) / (2.0 * rt2)
    for diff in (b1 - c1, b2 - c2):
        rhs = rhs + 0.5 * np.kron(np.eye(2, dtype=complex), diff @ diff)
    return float(np.max(np.abs(p_mat - rhs)))


def random_hermitian_unitary(dim, rng, half_signs=False):
    """V diag(+-1) V* with Haar-distributed V; with ``half_signs`` the
    spectrum is balanced, otherwise signs are uniform."""
    ginibre = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(ginibre)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    if half_signs:
        signs = np.array([1.0 if i % 2 == 0 else -1.0 for i in range(dim)])
    else:
        signs = rng.choice([-1.0, 1.0], size=dim)
    return (q * signs) @ q.conj().T


def random_commuting_instance(k, dim, rng):
    """(b_list, c_list) built as B (x) I and I (x) C from random Hermitian
    unitaries of the given dimension."""
    eye = np.eye(dim, dtype=complex)
    b_list = [np.kron(random_hermitian_unitary(dim, rng), eye) for _ in range(k)]
    c_list = [np.kron(eye, random_hermitian_unitary(dim, rng)) for _ in range(k)]
    return b_list, c_list


def npa1_value(k):
    """Closed-form value of the first-level relaxation of the game."""
    if k < 2:
        raise ValueError("need k >= 2")
    if k <= 7:
        return 0.5 + 1.0 / (2.0 * math.sqrt(k))
    return 5.0 / 8.0 + 1.0 / (2.0 * (k - 2.0)) - 1.0 / (4.0 * k)


def npa1_feasible_max(k):
    """Same value recovered by maximizing the reduced one-dimensional
    objective x/2 + sqrt(2 - (k-2)x/k) over x in [0, 2]."""
    if k < 2:
        raise ValueError("need k >= 2")
    if k == 2:
        x_opt = 2.0
    else:
        x_stat = 2.0 * k / (k - 2.0) - (k - 2.0) / k
        x_opt = min(2.0, x_stat)
    lam = x_opt / 2.0 + math.sqrt(max(2.0 - (k - 2.0) * x_opt / k, 0.0))
    return 0.25 + lam / 4.0


def _pauli_action(gamma):
    """Pauli strings are generalized permutations: one nonzero per row.
    Returns (perm, phase) with gamma[i, perm[i]] = phase[i]."""
    d = gamma.shape[0]
    perm = np.argmax(np.abs(gamma) > 0.5, axis=1)
    phase = gamma[np.arange(d), perm]
    return perm, phase


def _apply_game_operator(z, gammas, b_ops, c_ops, actions=None):
    """W z for z of shape (d, D, D) without materializing W; the generator
    factor is applied as a row gather."""
    d = z.shape[0]
    if actions is None:
        actions = [_pauli_action(g) for g in gammas]
    out = np.zeros_like(z)
    for (perm, phase), b, c in zip(actions, b_ops, c_ops):
        gz = phase[:, None, None] * z[perm]
        out += np.einsum("qb,abc->aqc", b, gz)
        out += np.einsum("rc,abc->abr", c, gz)
        bz = np.einsum("qb,abc->aqc", b, z)
        out += np.einsum("rc,aqc->aqr", c, bz)
    return out


def _rayleigh(z, gammas, b_ops, c_ops, actions=None):
    wz = _apply_game_operator(z, gammas, b_ops, c_ops, actions)
    return float(np.real(np.vdot(z, wz)))


def _top_eigpair(gammas, b_ops, c_ops, z0, actions=None):
    shape = z0.shape
    dim = z0.size
    if dim <= 512:
        basis = np.eye(dim, dtype=complex)
        cols = [
            _apply_game_operator(basis[:, i].reshape(shape), gammas, b_ops, c_ops, actions).reshape(dim)
            for i in range(dim)
        ]
        w_dense = np.stack(cols, axis=1)
        vals, vecs = np.linalg.eigh(w_dense)
        return float(vals[-1]), vecs[:, -1].reshape(shape)
    op = spla.LinearOperator(
        (dim, dim),
        matvec=lambda v: _apply_game_operator(
            v.reshape(shape).astype(complex), gammas, b_ops, c_ops, actions
        ).reshape(dim),
        dtype=complex,
    )
    # Ritz values are Rayleigh quotients over a Krylov space containing z0,
    # so the step never decreases the objective and never overshoots the
    # true top eigenvalue.
    vals, vecs = spla.eigsh(op, k=1, which="LA", v0=z0.reshape(dim), tol=1e-7)
    return float(vals[0]), vecs[:, 0].reshape(shape)


def _sign_step(s_mat):
    """Optimal Hermitian contraction for max sum_ij B_ij S_ij: the sign
    matrix of conj(S); near-zero eigenvalues get +1 to keep B unitary."""
    vals, vecs = np.linalg.eigh(np.conj(s_mat))
    signs = np.where(np.abs(vals) < 1e-12, 1.0, np.sign(vals))
    return (vecs * signs) @ vecs.conj().T


@dataclass
class SeesawResult:
    best: float
    traces: list


def seesaw(k, adversary_dim, iters, restarts, seed):
    """Alternating maximization of <z|W|z> over the state and the two
    adversary observable families; every sub-step is an exact coordinate
    maximization so the objective trace is non-decreasing."""
    cs = clifford_generators(k)
    d = cs.d
    dim_adv = adversary_dim
    dim = d * dim_adv * dim_adv
    if dim > 2**20:
        raise DimensionLimit("seesaw dimension too large")
    gammas = cs.gammas
    actions = [_pauli_action(g) for g in gammas]
    traces = []
    best = -np.inf
    for restart in range(restarts):
        key = np.array([seed % 2**64, restart % 2**64], dtype=np.uint64)
        rng = np.random.Generator(np.random.Philox(key=key))
        z = rng.normal(size=(d, dim_adv, dim_adv)) + 1j * rng.normal(size=(d, dim_adv, dim_adv))
        z = z / np.linalg.norm(z)
        b_ops = [random_hermitian_unitary(dim_adv, rng, half_signs=True) for _ in range(k)]
        c_ops = [random_hermitian_unitary(dim_adv, rng, half_signs=True) for _ in range(k)]
        track = []
        for _ in range(iters):
            lam, z = _top_eigpair(gammas, b_ops, c_ops, z, actions)
            track.append(lam)
            y_b = z.transpose(0, 2, 1).reshape(d * dim_adv, dim_adv)  # rows (a, c)
            for idx in range(k):
                m_y = _mul_kron_left(actions[idx], y_b, d, dim_adv) + _mul_kron_right(
                    c_ops[idx], y_b, d, dim_adv
                )
                s_mat = y_b.conj().T @ m_y
                b_ops[idx] = _sign_step(s_mat)
            track.append(_rayleigh(z, gammas, b_ops, c_ops, actions))
            y_c = z.reshape(d * dim_adv, dim_adv)  # rows (a, b)
            for idx in range(k):
                m_y = _mul_kron_left(actions[idx], y_c, d, dim_adv) + _mul_kron_right(
                    b_ops[idx], y_c, d, dim_adv
                )
                s_mat = y_c.conj().T @ m_y
                c_ops[idx] = _sign_step(s_mat)
            track.append(_rayleigh(z, gammas, b_ops, c_ops, actions))
        traces.append(track)
        best = max(best, track[-1])
    return SeesawResult(best=max(best, 0.0), traces=traces)


def _mul_kron_left(action, y_mat, d, dim_adv):
    """(gamma (x) I) @ Y for Y with composite rows (a, c)."""
    perm, phase = action
    y3 = y_mat.reshape(d, dim_adv, -1)
    return (phase[:, None, None] * y3[perm]).reshape(d * dim_adv, -1)


def _mul_kron_right(op, y_mat, d, dim_adv):
    """(I_d (x) op) @ Y for Y with composite rows (a, c)."""
    y3 = y_mat.reshape(d, dim_adv, -1)
    return np.einsum("cs,asj->acj", op, y3).reshape(d * dim_adv, -1)


def conjecture_value(k):
    """1/2 + 1/(2 sqrt(k)), the winning probability matching the conjectured
    norm k + 2 sqrt(k)."""
    return 0.5 + 1.0 / (2.0 * math.sqrt(k))


def moe_table_rows(kmax, seesaw_params=None):
    """Rows (k, npa1, seesaw lower bound on the win prob or nan, conjecture)."""
    rows = []
    for k in range(2, kmax + 1):
        if seesaw_params is not None:
            res = seesaw(k, seesaw_params["dim"], seesaw_params["iters"], seesaw_params["restarts"], seesaw_params["seed"])
            lower = win_prob(k, max(res.best, 0.0))
        else:
            lower = float("nan")
        rows.append((k, npa1_value(k), lower, conjecture_value(k)))
    return rows
