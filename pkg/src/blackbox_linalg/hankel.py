"""Block-Hankel matrices, the order-basis (sigma-basis) algorithm, the
off-diagonal inverse representation, and its application to dense blocks.

Conventions, fixed and verified against dense oracles:

  * H is m x m blocks with block (i, j) = alpha_{i+j}; alpha_0..alpha_{2m-2}
    determine H, alpha_{2m-1} is a free trailing block (defaulted to zero,
    resampled when a residue degenerates) and the alpha_{2m} slot is accepted
    for interface completeness but never referenced.
  * q-family: A(x) Q(x) = P(x) + x^{2m-2} I  (mod x^{2m-1}),
    deg Q <= m-1, deg P <= m-2; starred version multiplies A from the left.
  * v-family: A(x) V(x) = U(x)  (mod x^{2m}), V(0) = I,
    deg V <= m, deg U <= m-1; starred version analogous.
  * H^{-1} = T1 T2 - T3 T4 with
      T1(i,j) = v_{m-1-i-j} (v_0 = I),  T2(i,j) = q*_{m-1-j+i} for j >= i,
      T3(i,j) = q_{m-2-i-j},            T4(i,j) = v*_{m-j+i} for j >= i.

The families are computed by the quadratic M-Basis: an order basis of the
stacked series [A; -I] with initial row degrees (0,...,0, 1,...,1), raised
one order at a time by constant-term elimination (pivot = minimal current
row degree, ties by lowest row index).  The q-runs use order 2m-2 and the
v-runs order 2m.  Row selection takes the s rows of smallest degree.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dense import dense_inverse
from .errors import DimensionError, HankelSingular, ResidueSingular, Singular
from .field import matmul_mod, reduce_mod
from .operators import BlackBoxOperator
from .polymat import MatrixPolynomial, polymat_mul
from .projection import BlockProjection, u_contract


@dataclass
class BlockHankel:
    """A 2m-term block sequence defining an n x n block-Hankel matrix."""
    s: int
    m: int
    alpha: list
    p: int

    def __post_init__(self):
        if len(self.alpha) < 2 * self.m - 1:
            raise DimensionError(
                f"need at least {2 * self.m - 1} blocks, got {len(self.alpha)}")
        self.alpha = [reduce_mod(a, self.p) for a in self.alpha]
        for a in self.alpha:
            if a.shape != (self.s, self.s):
                raise DimensionError(f"block shape {a.shape} != ({self.s}, {self.s})")
        # pad the free trailing blocks with zeros
        while len(self.alpha) < 2 * self.m + 1:
            self.alpha.append(np.zeros((self.s, self.s), dtype=np.int64))

    @property
    def n(self) -> int:
        return self.s * self.m

    def materialize(self) -> np.ndarray:
        H = np.zeros((self.n, self.n), dtype=np.int64)
        s = self.s
        for i in range(self.m):
            for j in range(self.m):
                H[i * s:(i + 1) * s, j * s:(j + 1) * s] = self.alpha[i + j]
        return H

    def apply(self, V: np.ndarray) -> np.ndarray:
        """H @ V through the block structure (no materialization)."""
        V = reduce_mod(V, self.p)
        if V.ndim == 1:
            return self.apply(V.reshape(-1, 1)).ravel()
        if V.shape[0] != self.n:
            raise DimensionError(f"expected {self.n} rows, got {V.shape[0]}")
        s = self.s
        out = np.zeros((self.n, V.shape[1]), dtype=np.int64)
        for i in range(self.m):
            acc = np.zeros((s, V.shape[1]), dtype=np.int64)
            for j in range(self.m):
                acc = (acc + matmul_mod(self.alpha[i + j], V[j * s:(j + 1) * s], self.p)) % self.p
            out[i * s:(i + 1) * s] = acc
        return out


def build_hankel(B: BlackBoxOperator, P: BlockProjection) -> BlockHankel:
    """The projected sequence alpha_k = u.T B^{k+1} u for k = 0..2m-2,
    from one left Krylov sweep of length 2m ((2m-1)*s vector applications)
    and O(n^2) contraction additions."""
    p = B.field.p
    alpha = []
    W = P.u_matrix()
    for _ in range(2 * P.m - 1):
        W = B.apply_transpose_matrix(W)
        alpha.append(u_contract(P, W, p).T % p)
    return BlockHankel(s=P.s, m=P.m, alpha=alpha, p=p)


@dataclass
class SigmaBasisResult:
    """Order basis: every row r of ``basis`` satisfies r(x) F(x) = 0 mod x^order."""
    basis: MatrixPolynomial
    row_degrees: list
    order: int


def _mbasis(F: np.ndarray, sigma: int, shifts, p: int, snapshot_at: int | None = None):
    """Iterative order basis on F (rows x cols x ncoeff int64 array).

    Returns (M, degrees, E, snapshot): M is (rows x rows x sigma+1), E the
    updated residual series M*F (useful one coefficient past the order for
    residues).  ``snapshot_at`` captures (M, degrees, E) copies after that
    many order steps, letting one run serve two orders.
    """
    rows, cols, ncoeff = F.shape
    E = F.copy() % p
    M = np.zeros((rows, rows, sigma + 1), dtype=np.int64)
    M[:, :, 0] = np.eye(rows, dtype=np.int64)
    deg = list(shifts)
    snapshot = None
    for k in range(sigma):
        if k == snapshot_at:
            snapshot = (M.copy(), list(deg), E.copy())
        delta = E[:, :, k] % p
        order = np.array(sorted(range(rows), key=lambda r: (deg[r], r)))
        pivots = []
        for pos, i in enumerate(order):
            nz = np.nonzero(delta[i])[0]
            if len(nz) == 0:
                continue
            pivots.append(i)
            c = int(nz[0])
            later = order[pos + 1:]
            later = later[delta[later, c] % p != 0]
            if len(later):
                f = delta[later, c] * pow(int(delta[i, c]), p - 2, p) % p
                delta[later] = (delta[later] - f[:, None] * delta[i]) % p
                M[later] = (M[later] - f[:, None, None] * M[i]) % p
                E[later] = (E[later] - f[:, None, None] * E[i]) % p
        for i in pivots:
            M[i, :, 1:] = M[i, :, :-1]
            M[i, :, 0] = 0
            E[i, :, 1:] = E[i, :, :-1]
            E[i, :, 0] = 0
            deg[i] += 1
    if snapshot_at == sigma:
        snapshot = (M.copy(), list(deg), E.copy())
    return M, deg, E, snapshot


def sigma_basis(F: MatrixPolynomial, sigma: int, shifts=None) -> SigmaBasisResult:
    """Minimal order basis of F to order ``sigma`` (left relations).

    ``shifts`` are initial row degrees (default all zero); the Pade systems
    here use (0,...,0, 1,...,1) to force the lower-degree second component.
    """
    rows = F.rows
    if shifts is None:
        shifts = [0] * rows
    ncoeff = max(len(F.coeffs), sigma + 1)
    Farr = np.zeros((rows, F.cols, ncoeff), dtype=np.int64)
    for k, c in enumerate(F.coeffs):
        if k < ncoeff:
            Farr[:, :, k] = c
    M, deg, _, _ = _mbasis(Farr, sigma, shifts, F.p)
    coeffs = [M[:, :, k].copy() for k in range(M.shape[2])]
    basis = MatrixPolynomial(coeffs, F.p).trim()
    return SigmaBasisResult(basis=basis, row_degrees=deg, order=sigma)


@dataclass
class HankelInverseRep:
    """Coefficient families feeding the off-diagonal inversion formula.

    For m = 1 the Pade machinery is bypassed and ``dense_inv`` holds the
    single inverted block.  The n x n inverse is never stored.
    """
    s: int
    m: int
    p: int
    q: list | None = None
    q_star: list | None = None
    v: list | None = None
    v_star: list | None = None
    dense_inv: np.ndarray | None = None


def _stacked_series(alpha, s: int, m: int, p: int, ncoeff: int) -> np.ndarray:
    """[A; -I] as a (2s x s x ncoeff) coefficient array."""
    F = np.zeros((2 * s, s, ncoeff), dtype=np.int64)
    for k in range(min(len(alpha), ncoeff)):
        F[:s, :, k] = alpha[k]
    F[s:, :, 0] = (p - 1) * np.eye(s, dtype=np.int64) % p
    return F


def _pade_families(alpha, s: int, m: int, p: int):
    """One attempt at the four families for a given trailing block choice.

    Raises ResidueSingular when a degree profile or a normalizer degenerates
    (the signature of a singular H or an unlucky trailing block)."""
    shifts = [0] * s + [1] * s
    alpha_t = [a.T.copy() for a in alpha]
    out = {}
    for side, al in (("star", alpha), ("plain", alpha_t)):
        F = _stacked_series(al, s, m, p, 2 * m)
        # one run serves both orders: the q-state is the v-run's prefix
        Mv, degv, _, snap = _mbasis(F, 2 * m, shifts, p, snapshot_at=2 * m - 2)
        Mq, degq, Eq = snap
        # q-family: order 2m-2, rows of degree <= m-1, residue at x^{2m-2}
        sel = sorted(range(2 * s), key=lambda i: (degq[i], i))[:s]
        if max(degq[i] for i in sel) > m - 1:
            raise ResidueSingular(f"q-run degree profile {sorted(degq)}")
        R = Eq[sel, :, 2 * m - 2] % p
        try:
            R_inv = dense_inverse(R, p)
        except Singular as exc:
            raise ResidueSingular("q-run residue singular") from exc
        qbar = [Mq[sel, :s, k] % p for k in range(m)]
        q = [matmul_mod(R_inv, c, p) for c in qbar]
        # v-family: order 2m, rows of degree <= m, normalizer = constant term
        selv = sorted(range(2 * s), key=lambda i: (degv[i], i))[:s]
        if max(degv[i] for i in selv) > m:
            raise ResidueSingular(f"v-run degree profile {sorted(degv)}")
        V0 = Mv[selv, :s, 0] % p
        try:
            V0_inv = dense_inverse(V0, p)
        except Singular as exc:
            raise ResidueSingular("v-run constant term singular") from exc
        vbar = [Mv[selv, :s, k] % p for k in range(m + 1)]
        v = [matmul_mod(V0_inv, c, p) for c in vbar]
        out[side] = (q, v)
    q_star, v_star = out["star"]
    q_t, v_t = out["plain"]
    q = [c.T.copy() % p for c in q_t]
    v = [c.T.copy() % p for c in v_t]
    return q, q_star, v, v_star


def hankel_inverse_rep(H: BlockHankel, rng=None, max_tail_resamples: int = 3) -> HankelInverseRep:
    """The four coefficient families of the inversion formula.

    Degenerate residues trigger a fresh random trailing block up to
    ``max_tail_resamples`` times; persistent failure (or a failed
    verification on a random vector) raises HankelSingular, the signature
    of a singular H."""
    s, m, p = H.s, H.m, H.p
    if rng is None:
        rng = np.random.default_rng(0)
    if m == 1:
        try:
            inv = dense_inverse(H.alpha[0], p)
        except Singular as exc:
            raise HankelSingular("single-block Hankel is singular") from exc
        return HankelInverseRep(s=s, m=m, p=p, dense_inv=inv)

    alpha = list(H.alpha)
    last_error = None
    for attempt in range(1 + max_tail_resamples):
        if attempt:
            alpha[2 * m - 1] = rng.integers(0, p, size=(s, s), dtype=np.int64)
            alpha[2 * m] = rng.integers(0, p, size=(s, s), dtype=np.int64)
        try:
            q, q_star, v, v_star = _pade_families(alpha, s, m, p)
        except ResidueSingular as exc:
            last_error = exc
            continue
        rep = HankelInverseRep(s=s, m=m, p=p, q=q, q_star=q_star, v=v, v_star=v_star)
        # Las Vegas check: rep applied to H r must give back r
        r = rng.integers(0, p, size=(H.n, 1), dtype=np.int64)
        if np.array_equal(hankel_inverse_apply(rep, H.apply(r)), r % p):
            return rep
        raise HankelSingular("inverse representation failed verification")
    raise HankelSingular(f"residues stayed singular after resampling: {last_error}")


def hankel_inverse_apply(rep: HankelInverseRep, M: np.ndarray) -> np.ndarray:
    """H^{-1} @ M from the representation: four s x s by s x k polynomial
    products on degree-O(m) operands, no black-box applications."""
    s, m, p = rep.s, rep.m, rep.p
    M = reduce_mod(M, p)
    if M.ndim == 1:
        return hankel_inverse_apply(rep, M.reshape(-1, 1)).ravel()
    if M.shape[0] != s * m:
        raise DimensionError(f"expected {s * m} rows, got {M.shape[0]}")
    if rep.dense_inv is not None:
        return matmul_mod(rep.dense_inv, M, p)

    m_rev = MatrixPolynomial(
        [M[(m - 1 - j) * s:(m - j) * s] for j in range(m)], p)
    qs_rev = MatrixPolynomial([rep.q_star[m - 1 - d] for d in range(m)], p)
    vs_rev = MatrixPolynomial([rep.v_star[m - d] for d in range(m)], p)
    v_poly = MatrixPolynomial(rep.v[:m], p)
    q_poly = MatrixPolynomial(rep.q[:m - 1], p) if m > 1 else None

    prod = polymat_mul(qs_rev, m_rev, max_degree=m - 1)
    X = MatrixPolynomial([prod.coeff(m - 1 - i) for i in range(m)], p)
    prod = polymat_mul(vs_rev, m_rev, max_degree=m - 1)
    Y = MatrixPolynomial([prod.coeff(m - 1 - i) for i in range(m)], p)

    z1 = polymat_mul(v_poly, X, max_degree=m - 1)
    z2 = polymat_mul(q_poly, Y, max_degree=m - 2)
    out = np.zeros((s * m, M.shape[1]), dtype=np.int64)
    for i in range(m):
        block = z1.coeff(m - 1 - i)
        if i < m - 1:
            block = block - z2.coeff(m - 2 - i)
        out[i * s:(i + 1) * s] = block % p
    return out
