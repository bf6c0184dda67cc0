"""Black-box operators: opaque linear maps exposing apply / transpose-apply
with application counters, plus the concrete preconditioning toolbox
(sparse, diagonal, butterfly network, unit-triangular Toeplitz, composition).

Counter accounting follows the matrix-times-vector convention: applying an
operator to an n x k block counts as k vector applications.  Counters are
lock-protected so concurrent applies lose no updates; everything else about
an operator is immutable after construction.
"""
from __future__ import annotations

import threading

import numpy as np

from .errors import DimensionError
from .field import PrimeField, matmul_mod, reduce_mod


class BlackBoxOperator:
    """An opaque n x n linear map over a prime field.

    Subclasses implement ``_apply_block(V, transposed)`` on n x k residue
    blocks; the public methods handle shape checks and counting.
    """

    def __init__(self, n: int, field: PrimeField):
        self.n = n
        self.field = field
        self._lock = threading.Lock()
        self._apply_count = 0
        self._transpose_apply_count = 0

    # -- counters ----------------------------------------------------------

    @property
    def apply_count(self) -> int:
        return self._apply_count

    @property
    def transpose_apply_count(self) -> int:
        return self._transpose_apply_count

    @property
    def total_applications(self) -> int:
        return self._apply_count + self._transpose_apply_count

    def _count(self, k: int, transposed: bool):
        with self._lock:
            if transposed:
                self._transpose_apply_count += k
            else:
                self._apply_count += k

    # -- application -------------------------------------------------------

    def _apply_block(self, V: np.ndarray, transposed: bool) -> np.ndarray:
        raise NotImplementedError

    def _check(self, V: np.ndarray) -> np.ndarray:
        V = reduce_mod(V, self.field.p)
        if V.shape[0] != self.n:
            raise DimensionError(f"operand has {V.shape[0]} rows, operator is {self.n}")
        return V

    def apply(self, v: np.ndarray) -> np.ndarray:
        """A @ v for a length-n vector."""
        v = self._check(np.asarray(v).reshape(-1, 1))
        out = self._apply_block(v, False)
        self._count(1, False)
        return out.ravel()

    def apply_transpose(self, v: np.ndarray) -> np.ndarray:
        """A.T @ v for a length-n vector."""
        v = self._check(np.asarray(v).reshape(-1, 1))
        out = self._apply_block(v, True)
        self._count(1, True)
        return out.ravel()

    def apply_matrix(self, V: np.ndarray) -> np.ndarray:
        """A @ V for an n x k block (counts k applications)."""
        V = self._check(V)
        out = self._apply_block(V, False)
        self._count(V.shape[1], False)
        return out

    def apply_transpose_matrix(self, V: np.ndarray) -> np.ndarray:
        V = self._check(V)
        out = self._apply_block(V, True)
        self._count(V.shape[1], True)
        return out

    def to_dense(self) -> np.ndarray:
        """Materialize by applying to the identity.  Test use only; counts."""
        return self.apply_matrix(np.eye(self.n, dtype=np.int64))


class IdentityOperator(BlackBoxOperator):
    def _apply_block(self, V, transposed):
        return V.copy()


class ZeroOperator(BlackBoxOperator):
    def _apply_block(self, V, transposed):
        return np.zeros_like(V)


class DenseOperator(BlackBoxOperator):
    """Wraps an explicit n x n matrix (tests, small oracles, dense inputs)."""

    def __init__(self, M: np.ndarray, field: PrimeField):
        M = reduce_mod(M, field.p)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DimensionError(f"expected square matrix, got {M.shape}")
        super().__init__(M.shape[0], field)
        self.matrix = M

    def _apply_block(self, V, transposed):
        M = self.matrix.T if transposed else self.matrix
        return matmul_mod(M, V, self.field.p)


class SparseOperator(BlackBoxOperator):
    """Coordinate-format sparse matrix; apply cost proportional to nnz."""

    def __init__(self, n: int, triples, field: PrimeField):
        super().__init__(n, field)
        p = field.p
        rows = np.array([t[0] for t in triples], dtype=np.int64)
        cols = np.array([t[1] for t in triples], dtype=np.int64)
        vals = np.array([t[2] for t in triples], dtype=np.int64) % p
        if len(rows) and (rows.min() < 0 or rows.max() >= n
                          or cols.min() < 0 or cols.max() >= n):
            raise DimensionError("triple index out of range")
        if np.any(vals == 0):
            raise ValueError("explicit zero value in sparse triples")
        keys = rows * n + cols
        if len(np.unique(keys)) != len(keys):
            raise ValueError("duplicate (row, col) in sparse triples")
        self.rows, self.cols, self.vals = rows, cols, vals
        # row-sorted and col-sorted orderings for segmented sums
        self._fw = self._plan(rows, cols, vals)
        self._bw = self._plan(cols, rows, vals)

    @staticmethod
    def _plan(outer, inner, vals):
        order = np.argsort(outer, kind="stable")
        uniq, starts = np.unique(outer[order], return_index=True)
        return inner[order], vals[order], uniq, starts

    @property
    def nnz(self) -> int:
        return len(self.vals)

    def _apply_block(self, V, transposed):
        p = self.field.p
        gather, vals, uniq, starts = self._bw if transposed else self._fw
        out = np.zeros((self.n, V.shape[1]), dtype=np.int64)
        if len(vals) == 0:
            return out
        prods = vals[:, None] * V[gather] % p
        sums = np.add.reduceat(prods, starts, axis=0)
        out[uniq] = sums % p
        return out

    def to_dense_matrix(self) -> np.ndarray:
        """Entry-level materialization (no counter; oracle/test use)."""
        M = np.zeros((self.n, self.n), dtype=np.int64)
        M[self.rows, self.cols] = self.vals
        return M


def sparse_apply(S: SparseOperator, v: np.ndarray, transposed: bool = False) -> np.ndarray:
    """Exact S v (or S.T v); increments the operator's counter."""
    return S.apply_transpose(v) if transposed else S.apply(v)


class DiagonalOperator(BlackBoxOperator):
    """Diagonal matrix with nonzero entries (hence always invertible)."""

    def __init__(self, d: np.ndarray, field: PrimeField):
        d = reduce_mod(d, field.p).ravel()
        if np.any(d == 0):
            raise ValueError("diagonal entries must be nonzero")
        super().__init__(len(d), field)
        self.d = d
        self._d_inv = None

    @classmethod
    def block_constant(cls, values, s: int, field: PrimeField) -> "DiagonalOperator":
        """diag(d_1,...,d_1,...,d_m,...,d_m): each value repeated s times."""
        return cls(np.repeat(reduce_mod(values, field.p), s), field)

    @classmethod
    def random(cls, n: int, field: PrimeField, rng) -> "DiagonalOperator":
        return cls(rng.integers(1, field.p, size=n, dtype=np.int64), field)

    @property
    def d_inv(self) -> np.ndarray:
        if self._d_inv is None:
            self._d_inv = self.field.inv_vec(self.d)
        return self._d_inv

    def _apply_block(self, V, transposed):
        return self.d[:, None] * V % self.field.p

    def apply_inverse_matrix(self, V: np.ndarray, transposed: bool = False) -> np.ndarray:
        V = self._check(V)
        self._count(V.shape[1], transposed)
        return self.d_inv[:, None] * V % self.field.p

    def determinant(self) -> int:
        det = 1
        for x in self.d.tolist():
            det = det * x % self.field.p
        return det


def _split_convolve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact np.convolve(a, b) mod p via 16-bit splitting of a."""
    hi = np.convolve(a >> 16, b)
    lo = np.convolve(a & 0xFFFF, b)
    return ((hi % p << 16) + lo) % p


class ToeplitzLowerUnit(BlackBoxOperator):
    """Unit lower-triangular Toeplitz matrix, defined by its first column
    (entry 0 forced to 1).  Apply is O(n^2) worst case via convolution;
    solves are forward/back substitution."""

    kind = "lower"

    def __init__(self, column: np.ndarray, field: PrimeField):
        c = reduce_mod(column, field.p).ravel().copy()
        c[0] = 1
        super().__init__(len(c), field)
        self.coeffs = c

    @classmethod
    def random(cls, n: int, field: PrimeField, rng):
        c = rng.integers(0, field.p, size=n, dtype=np.int64)
        return cls(c, field)

    def _conv_apply(self, V, lower: bool):
        p = self.field.p
        out = np.empty_like(V)
        for j in range(V.shape[1]):
            v = V[:, j]
            if lower:
                out[:, j] = _split_convolve(self.coeffs, v, p)[:self.n]
            else:
                w = v[::-1]
                out[:, j] = _split_convolve(self.coeffs, w, p)[:self.n][::-1]
        return out

    def _apply_block(self, V, transposed):
        # transpose of lower-Toeplitz(c) is upper-Toeplitz with first row c
        return self._conv_apply(V, lower=not transposed)

    def _solve(self, V, lower: bool):
        """Unit-triangular solve, O(n^2) per column batch."""
        p = self.field.p
        c = self.coeffs
        chi, clo = c >> 16, c & 0xFFFF
        X = V % p
        n = self.n
        if lower:
            for i in range(1, n):
                seg_hi = chi[i:0:-1] @ X[:i]
                seg_lo = clo[i:0:-1] @ X[:i]
                X[i] = (X[i] - ((seg_hi % p << 16) + seg_lo)) % p
        else:
            for i in range(n - 2, -1, -1):
                seg_hi = chi[1:n - i] @ X[i + 1:]
                seg_lo = clo[1:n - i] @ X[i + 1:]
                X[i] = (X[i] - ((seg_hi % p << 16) + seg_lo)) % p
        return X

    def apply_inverse_matrix(self, V: np.ndarray, transposed: bool = False) -> np.ndarray:
        V = self._check(V)
        self._count(V.shape[1], transposed)
        return self._solve(V, lower=not transposed)


class ToeplitzUpperUnit(ToeplitzLowerUnit):
    """Unit upper-triangular Toeplitz matrix, defined by its first row."""

    kind = "upper"

    def _apply_block(self, V, transposed):
        return self._conv_apply(V, lower=transposed)

    def apply_inverse_matrix(self, V: np.ndarray, transposed: bool = False) -> np.ndarray:
        V = self._check(V)
        self._count(V.shape[1], transposed)
        return self._solve(V, lower=transposed)


class ButterflyOperator(BlackBoxOperator):
    """Random butterfly network: log2(n) rounds of 2x2 mixing stages.

    Each pair is mixed by [[a, b], [c, d]] with random a != 0, b, c and
    d = (1 + b c) / a, so every stage has determinant exactly 1: the whole
    network is invertible by construction and det = 1 (the determinant
    pipeline divides preconditioner determinants back out relying on this).
    Pairs that would straddle n (when n is not a power of two) act as the
    identity, which keeps both properties.
    """

    def __init__(self, n: int, field: PrimeField, rng):
        super().__init__(n, field)
        p = field.p
        self.stages = []
        span = 1
        while span < n:
            los, his = [], []
            for block in range(0, n, 2 * span):
                for i in range(block, min(block + span, n)):
                    j = i + span
                    if j < n:
                        los.append(i)
                        his.append(j)
            if los:
                k = len(los)
                a = rng.integers(1, p, size=k, dtype=np.int64)
                b = rng.integers(0, p, size=k, dtype=np.int64)
                c = rng.integers(0, p, size=k, dtype=np.int64)
                d = (1 + b * c % p) % p * field.inv_vec(a) % p
                self.stages.append((np.array(los), np.array(his), a, b, c, d))
            span *= 2

    def _mix(self, V, idx_lo, idx_hi, a, b, c, d):
        p = self.field.p
        lo = V[idx_lo]
        hi = V[idx_hi]
        V[idx_lo] = (a[:, None] * lo + b[:, None] * hi) % p
        V[idx_hi] = (c[:, None] * lo + d[:, None] * hi) % p

    def _apply_block(self, V, transposed):
        V = V.copy()
        if transposed:
            for lo, hi, a, b, c, d in reversed(self.stages):
                self._mix(V, lo, hi, a, c, b, d)
        else:
            for lo, hi, a, b, c, d in self.stages:
                self._mix(V, lo, hi, a, b, c, d)
        return V

    def apply_inverse_matrix(self, V: np.ndarray, transposed: bool = False) -> np.ndarray:
        V = self._check(V).copy()
        p = self.field.p
        self._count(V.shape[1], transposed)
        if transposed:
            for lo, hi, a, b, c, d in self.stages:
                self._mix(V, lo, hi, d, (-c) % p, (-b) % p, a)
        else:
            for lo, hi, a, b, c, d in reversed(self.stages):
                self._mix(V, lo, hi, d, (-b) % p, (-c) % p, a)
        return V


def precond_apply(P: BlackBoxOperator, v: np.ndarray,
                  transposed: bool = False, inverted: bool = False) -> np.ndarray:
    """Apply a preconditioner in any of its four modes: P, P^T, P^-1, P^-T."""
    if not inverted:
        return P.apply_transpose(v) if transposed else P.apply(v)
    arr = np.asarray(v)
    V = arr.reshape(-1, 1) if arr.ndim == 1 else arr
    out = P.apply_inverse_matrix(V, transposed=transposed)
    return out.ravel() if arr.ndim == 1 else out


class ComposedOperator(BlackBoxOperator):
    """Product of operators: apply = right-to-left application; counter
    attribution flows to every constituent."""

    def __init__(self, ops):
        ops = list(ops)
        if not ops:
            raise ValueError("empty composition")
        n = ops[0].n
        if any(op.n != n for op in ops):
            raise DimensionError("composed operators must share dimension")
        super().__init__(n, ops[0].field)
        self.ops = ops

    def _apply_block(self, V, transposed):
        if transposed:
            for op in self.ops:
                V = op._apply_block(V, True)
                op._count(V.shape[1], True)
        else:
            for op in reversed(self.ops):
                V = op._apply_block(V, False)
                op._count(V.shape[1], False)
        return V


def compose(ops) -> ComposedOperator:
    return ComposedOperator(ops)


class EmbeddedOperator(BlackBoxOperator):
    """diag(A, I): A embedded in the top-left corner of a larger identity.

    Used to extend n to the nearest multiple of the blocking factor."""

    def __init__(self, inner: BlackBoxOperator, n_big: int):
        if n_big < inner.n:
            raise DimensionError("embedding must not shrink the operator")
        super().__init__(n_big, inner.field)
        self.inner = inner

    def _apply_block(self, V, transposed):
        k = self.inner.n
        out = V.copy()
        out[:k] = self.inner._apply_block(V[:k], transposed)
        self.inner._count(V.shape[1], transposed)
        return out


class LeadingMinorOperator(BlackBoxOperator):
    """The leading r x r minor of an operator, realized as embed-truncate:
    pad the input with zeros, apply, truncate the output."""

    def __init__(self, inner: BlackBoxOperator, r: int):
        if r > inner.n:
            raise DimensionError("minor larger than the operator")
        super().__init__(r, inner.field)
        self.inner = inner

    def _apply_block(self, V, transposed):
        big = np.zeros((self.inner.n, V.shape[1]), dtype=np.int64)
        big[:self.n] = V
        out = self.inner._apply_block(big, transposed)
        self.inner._count(V.shape[1], transposed)
        return out[:self.n]
