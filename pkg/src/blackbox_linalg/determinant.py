"""Determinant of a black-box matrix modulo a word-size prime via the
baby-steps/giant-steps block minimal matrix generator, plus Chinese-
remainder assembly of integer determinants over several primes.

Per prime: precondition B = D1 (U A) D2 (butterfly U has determinant 1 by
construction), project the power sequence alpha_i = u^T B^i v with the
stacked-identity u on the left and a dense random v on the right, compute
the minimal right matrix generator by the order-basis algorithm, and read

    det B = (-1)^n det F(0) / lead(det F)

(the generator is row-reduced, so lead(det F) is the determinant of the
constant coefficients of the un-reversed basis rows).  The diagonal
determinants divide back out exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dense import dense_det
from .errors import DegenerateSequence, InsufficientPrimes, RetriesExhausted
from .field import PrimeField, is_probable_prime, matmul_mod, reduce_mod
from .hankel import _mbasis
from .inverse import InversionConfig
from .operators import (BlackBoxOperator, ButterflyOperator, ComposedOperator,
                        DiagonalOperator, EmbeddedOperator, SparseOperator)
from .polymat import MatrixPolynomial
from .projection import BlockProjection, u_contract


@dataclass
class GeneratorResult:
    """Minimal right matrix generator of a block sequence.

    ``F`` right-annihilates the sampled sequence: for every column c with
    degree d_c, sum_j alpha_{i+j} F_j e_c = 0 for 0 <= i < samples - d_c.
    """
    F: MatrixPolynomial
    degree: int
    det_at_zero: int
    col_degrees: list
    det_lead: int


def block_generator(alpha, m: int, p: int,
                    expected_degree_sum: int | None = None) -> GeneratorResult:
    """Minimal right matrix generator from >= 2m sequence blocks.

    Raises DegenerateSequence when the degree profile falls short of
    ``expected_degree_sum`` (callers pass n = m s) or a normalizer is
    singular; callers retry with fresh projections."""
    alpha = [reduce_mod(a, p) for a in alpha]
    s = alpha[0].shape[0]
    if len(alpha) < 2 * m:
        raise ValueError(f"need at least {2 * m} sequence blocks, got {len(alpha)}")
    tau = 2 * m
    F = np.zeros((2 * s, s, tau + 1), dtype=np.int64)
    for k in range(min(len(alpha), tau + 1)):
        F[:s, :, k] = alpha[k].T
    F[s:, :, 0] = (p - 1) * np.eye(s, dtype=np.int64) % p
    M, deg, _, _ = _mbasis(F, tau, [0] * s + [1] * s, p)
    sel = sorted(range(2 * s), key=lambda i: (deg[i], i))[:s]
    degs = [deg[i] for i in sel]
    if expected_degree_sum is not None and sum(degs) != expected_degree_sum:
        raise DegenerateSequence(
            f"generator degrees {degs} sum to {sum(degs)}, need {expected_degree_sum}")
    W = [M[i, :s, :] % p for i in sel]       # row polynomials, transposed side
    W0 = np.stack([w[:, 0] for w in W])      # constant coefficients
    LC = np.stack([w[:, d] for w, d in zip(W, degs)])  # leading coefficients
    det_lead = dense_det(W0, p)
    if det_lead == 0:
        raise DegenerateSequence("generator normalizer (constant term) singular")
    # Per-row reversal, transposed back: column c of coefficient F_k is
    # row c of W at position degs[c] - k.
    dmax = max(degs) if degs else 0
    coeffs = []
    for k in range(dmax + 1):
        blk = np.zeros((s, s), dtype=np.int64)
        for c, (w, d) in enumerate(zip(W, degs)):
            if 0 <= d - k:
                blk[:, c] = w[:, d - k]
        coeffs.append(blk)
    gen = MatrixPolynomial(coeffs, p)
    # annihilation check over the sampled window, per column
    for c, d in enumerate(degs):
        for i in range(len(alpha) - d):
            acc = np.zeros(s, dtype=np.int64)
            for k in range(d + 1):
                acc = (acc + matmul_mod(alpha[i + k], gen.coeff(k)[:, c:c + 1], p).ravel()) % p
            if acc.any():
                raise DegenerateSequence("generator fails annihilation on the sample")
    return GeneratorResult(F=gen, degree=dmax, det_at_zero=dense_det(LC, p),
                           col_degrees=degs, det_lead=det_lead)


def det_mod_p(A: BlackBoxOperator, cfg: InversionConfig | None = None) -> int:
    """Determinant of A modulo the operator's prime (Monte Carlo: verified
    only by the degree checks; run twice with different seeds to confirm).

    Retries with fresh preconditioners and projections on degenerate
    sequences; if retries exhaust, a certified rank < n returns 0, else
    RetriesExhausted."""
    cfg = cfg or InversionConfig()
    field = A.field
    p = field.p
    n0 = A.n
    s = min(cfg.s, n0) if cfg.s else min(max(round(n0 ** (1 / 3)), 1), n0)
    m = (n0 + s - 1) // s
    n = m * s
    work = EmbeddedOperator(A, n) if n != n0 else A
    P = BlockProjection(n, s)
    rng = np.random.default_rng(cfg.seed)
    for attempt in range(cfg.max_retries):
        D1 = DiagonalOperator.random(n, field, rng)
        D2 = DiagonalOperator.random(n, field, rng)
        U = ButterflyOperator(n, field, rng)
        B = ComposedOperator([D1, U, work, D2])
        v = rng.integers(0, p, size=(n, s), dtype=np.int64)
        alpha = []
        w = v
        for i in range(2 * m + 1):
            alpha.append(u_contract(P, w, p))
            if i < 2 * m:
                w = B.apply_matrix(w)
        try:
            gen = block_generator(alpha, m, p, expected_degree_sum=n)
        except DegenerateSequence:
            continue
        det_B = gen.det_at_zero * field.inv(gen.det_lead) % p
        if n % 2:
            det_B = (-det_B) % p
        # det U = 1 by construction; padding contributes det 1
        scale = D1.determinant() * D2.determinant() % p
        return det_B * field.inv(scale) % p
    # exhausted: a certified rank deficiency means the determinant is 0
    from .nullrank import nullspace_rank

    try:
        cert = nullspace_rank(A, InversionConfig(
            seed=cfg.seed + 0x9E3779B9, max_retries=cfg.max_retries))
        if cert.rank < n0:
            return 0
    except RetriesExhausted:
        pass
    raise RetriesExhausted(
        f"determinant failed {cfg.max_retries} generator attempts")


def hadamard_bound(n: int, triples) -> int:
    """Integer upper bound on |det| from row 2-norms (exact, big ints)."""
    row_sq = [0] * n
    for i, _, v in triples:
        row_sq[int(i)] += int(v) * int(v)
    bound = 1
    for sq in row_sq:
        if sq:
            bound *= math.isqrt(sq - 1) + 1
    return bound


def crt_combine(residues, moduli) -> int:
    """Chinese remainder combination; result in [0, prod moduli)."""
    total = 0
    prod = 1
    for q in moduli:
        prod *= q
    for r, q in zip(residues, moduli):
        mq = prod // q
        total += r * pow(mq, -1, q) * mq
    return total % prod


def word_size_primes(count: int, below: int = (1 << 31)) -> list:
    """The largest ``count`` primes below the word bound, descending."""
    out = []
    candidate = below - 1
    while len(out) < count:
        if is_probable_prime(candidate):
            out.append(candidate)
        candidate -= 2 if candidate % 2 else 1
    return out


def det_integer_crt(n: int, triples, primes, seed: int = 0,
                    max_retries: int = 8) -> int:
    """Signed integer determinant of a sparse integer matrix by Chinese
    remaindering det_mod_p over the given primes.

    ``triples`` are (row, col, value) with arbitrary-size integer values;
    requires prod(primes) > 2 * Hadamard bound."""
    bound = hadamard_bound(n, triples)
    prod = 1
    for q in primes:
        prod *= q
    if prod <= 2 * bound:
        raise InsufficientPrimes(
            f"prime product {prod} does not exceed twice the Hadamard bound {bound}")
    residues = []
    for q in primes:
        field = PrimeField(q)
        reduced = [(i, j, v % q) for i, j, v in triples if v % q]
        op = SparseOperator(n, reduced, field)
        residues.append(det_mod_p(op, InversionConfig(seed=seed, max_retries=max_retries)))
    x = crt_combine(residues, primes)
    if 2 * x > prod:
        x -= prod
    return x
