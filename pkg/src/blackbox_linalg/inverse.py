"""Las Vegas black-box inversion and apply-inverse-to-matrix.

Pipeline per attempt, for B = D (U A) D with a random butterfly U and a
random block-constant diagonal D:

  1. one left Krylov sweep of 2m blocks ((2m-1) s transpose applications)
     yielding both the projected Hankel sequence and the stacked left
     Krylov matrix,
  2. block-Hankel inversion via the order-basis machinery (no applications),
  3. a Horner sweep for the right Krylov product ((m-1) n applications),
  4. unwrap A^{-1} = D (...) D U with one dense butterfly multiplication,
  5. verification A X = I (n applications) unless disabled.

Any internal degeneracy or a failed verification retries with completely
fresh randomness; accepted answers are always exact.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import (FieldTooSmall, HankelSingular, ResidueSingular,
                     RetriesExhausted, SingularMatrix)
from .field import reduce_mod
from .hankel import BlockHankel, hankel_inverse_apply, hankel_inverse_rep
from .operators import (BlackBoxOperator, ButterflyOperator, ComposedOperator,
                        DiagonalOperator, EmbeddedOperator, IdentityOperator)
from .projection import (BlockProjection, krylov_apply_left,
                         krylov_apply_right, u_contract)


@dataclass
class InversionConfig:
    """Knobs for the randomized inversion; s = 0 picks round(sqrt(n))."""
    s: int = 0
    seed: int = 0
    max_retries: int = 8
    verify: bool = True

    def __post_init__(self):
        if self.max_retries < 1:
            raise ValueError("max_retries must be >= 1")

    def block_size(self, n: int) -> int:
        if self.s:
            return min(max(self.s, 1), n)
        return min(max(round(math.sqrt(n)), 1), n)


@dataclass
class InversionResult:
    matrix: np.ndarray
    stats: dict = dc_field(default_factory=dict)


def field_size_bound(n: int, m: int) -> int:
    """Required field size 2 (m+1) n ceil(log2 n) for the success analysis."""
    return 2 * (m + 1) * n * math.ceil(math.log2(n)) if n > 1 else 2


def precondition(A: BlackBoxOperator, s: int, rng, identity: bool = False):
    """B = D (U A) D plus the recipe turning a B-pipeline result back into
    A^{-1} (two diagonal scalings and one dense butterfly multiplication,
    O(n^2 log n) field operations).

    ``identity`` forces U = D = I (tests).  Raises FieldTooSmall when p is
    below the 2 (m+1) n ceil(log2 n) bound."""
    n = A.n
    field = A.field
    if n % s:
        raise ValueError("blocking factor must divide n (pad first)")
    m = n // s
    bound = field_size_bound(n, m)
    if field.p <= bound:
        raise FieldTooSmall(field.p, bound)
    if identity:
        U: BlackBoxOperator = IdentityOperator(n, field)
        D = DiagonalOperator(np.ones(n, dtype=np.int64), field)
    else:
        U = ButterflyOperator(n, field, rng)
        D = DiagonalOperator.block_constant(
            rng.integers(1, field.p, size=m, dtype=np.int64), s, field)
    B = ComposedOperator([D, U, A, D])

    def unwrap(Z: np.ndarray) -> np.ndarray:
        p = field.p
        W = D.d[:, None] * Z % p * D.d[None, :] % p
        if identity:
            return W
        return U.apply_transpose_matrix(W.T).T.copy()

    return B, D, U, unwrap


def _padded(A: BlackBoxOperator, s: int):
    if A.n % s:
        n_big = ((A.n + s - 1) // s) * s
        return EmbeddedOperator(A, n_big)
    return A


def verify_inverse(A: BlackBoxOperator, X: np.ndarray) -> bool:
    """True iff A X = I exactly; costs exactly n vector applications."""
    X = reduce_mod(X, A.field.p)
    if X.shape != (A.n, A.n):
        return False
    return bool(np.array_equal(A.apply_matrix(X), np.eye(A.n, dtype=np.int64)))


def _left_sweep(B, P, want_kl: bool = True):
    """One transpose-apply sweep: the Hankel blocks alpha_k = u^T B^{k+1} u
    for k = 0..2m-2 and (optionally) the stacked left Krylov matrix."""
    p = B.field.p
    m = P.m
    alpha = []
    kl_rows = [P.u_matrix().T.copy()] if want_kl else None
    W = P.u_matrix()
    for i in range(1, 2 * m):
        W = B.apply_transpose_matrix(W)
        alpha.append(u_contract(P, W, p).T % p)
        if want_kl and i < m:
            kl_rows.append(W.T.copy())
    Kl = np.concatenate(kl_rows, axis=0) if want_kl else None
    return alpha, Kl


def blackbox_inverse(A: BlackBoxOperator, cfg: InversionConfig | None = None,
                     _certify_singular: bool = True) -> InversionResult:
    """Dense inverse of a black-box matrix (Las Vegas: never wrong).

    Raises FieldTooSmall, SingularMatrix (with a certified kernel vector)
    or RetriesExhausted."""
    cfg = cfg or InversionConfig()
    n = A.n
    s = cfg.block_size(n)
    work = _padded(A, s)
    P = BlockProjection(work.n, s)
    m = P.m
    rng = np.random.default_rng(cfg.seed)
    t0 = time.perf_counter()
    base_count = A.total_applications
    for attempt in range(cfg.max_retries):
        attempt_base = A.total_applications
        B, D, U, unwrap = precondition(work, s, rng)
        try:
            alpha, Kl = _left_sweep(B, P)
            rep = hankel_inverse_rep(
                BlockHankel(s=s, m=m, alpha=alpha, p=A.field.p), rng)
            Y = hankel_inverse_apply(rep, Kl)
            Z = krylov_apply_right(B, P, Y)
            X = unwrap(Z)[:n, :n]
        except (ResidueSingular, HankelSingular):
            continue
        if cfg.verify and not verify_inverse(A, X):
            continue
        return InversionResult(matrix=X, stats={
            "bb_apply_count": A.total_applications - base_count,
            "bb_applies_last_attempt": A.total_applications - attempt_base,
            "retries": attempt,
            "seed": cfg.seed,
            "s": s,
            "m": m,
            "verified": cfg.verify,
            "wall_time": time.perf_counter() - t0,
        })
    if _certify_singular:
        kernel = _singular_certificate(A, cfg)
        if kernel is not None:
            raise SingularMatrix(kernel)
    raise RetriesExhausted(
        f"inversion failed {cfg.max_retries} attempts without a singularity certificate")


def _singular_certificate(A: BlackBoxOperator, cfg: InversionConfig):
    """Try to prove A singular: a certified rank < n yields a kernel vector."""
    from .nullrank import nullspace_rank  # local import; nullrank uses inverse

    try:
        cert = nullspace_rank(A, InversionConfig(
            seed=cfg.seed + 0x9E3779B9, max_retries=cfg.max_retries))
    except (RetriesExhausted, FieldTooSmall):
        return None
    if cert.rank < A.n and cert.nullspace.shape[1]:
        return cert.nullspace[:, 0].copy()
    return None


def blackbox_inverse_apply(A: BlackBoxOperator, M: np.ndarray,
                           cfg: InversionConfig | None = None,
                           _certify_singular: bool = True) -> InversionResult:
    """A^{-1} M without materializing A^{-1}: the left Krylov product is
    formed directly against M, then pushed through the Hankel inverse and
    the Horner sweep."""
    cfg = cfg or InversionConfig()
    p = A.field.p
    n = A.n
    M = reduce_mod(M, p)
    if M.ndim == 1:
        res = blackbox_inverse_apply(A, M.reshape(-1, 1), cfg, _certify_singular)
        res.matrix = res.matrix.ravel()
        return res
    if M.shape[0] != n:
        raise ValueError(f"M has {M.shape[0]} rows, operator is {n}")
    s = cfg.block_size(n)
    work = _padded(A, s)
    P = BlockProjection(work.n, s)
    m = P.m
    Mpad = M
    if work.n != n:
        Mpad = np.zeros((work.n, M.shape[1]), dtype=np.int64)
        Mpad[:n] = M
    rng = np.random.default_rng(cfg.seed)
    t0 = time.perf_counter()
    base_count = A.total_applications
    for attempt in range(cfg.max_retries):
        attempt_base = A.total_applications
        B, D, U, unwrap = precondition(work, s, rng)
        try:
            alpha, _ = _left_sweep(B, P, want_kl=False)
            rep = hankel_inverse_rep(
                BlockHankel(s=s, m=m, alpha=alpha, p=p), rng)
            # A^{-1} M = D K^(r) H^{-1} K^(l) D U M
            M1 = D.apply_matrix(U.apply_matrix(Mpad))
            T = krylov_apply_left(B, P, M1)
            S = hankel_inverse_apply(rep, T)
            Z = krylov_apply_right(B, P, S)
            X = D.d[:, None] * Z % p
            X = X[:n]
        except (ResidueSingular, HankelSingular):
            continue
        if cfg.verify and not np.array_equal(A.apply_matrix(X), M):
            continue
        return InversionResult(matrix=X, stats={
            "bb_apply_count": A.total_applications - base_count,
            "bb_applies_last_attempt": A.total_applications - attempt_base,
            "retries": attempt,
            "seed": cfg.seed,
            "s": s,
            "m": m,
            "verified": cfg.verify,
            "wall_time": time.perf_counter() - t0,
        })
    if _certify_singular:
        kernel = _singular_certificate(A, cfg)
        if kernel is not None:
            raise SingularMatrix(kernel)
    raise RetriesExhausted(
        f"apply-inverse failed {cfg.max_retries} attempts without a singularity certificate")
