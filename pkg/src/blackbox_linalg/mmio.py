"""Matrix Market ingestion and output.

Supports coordinate and array formats with integer, real (integral values
only) or pattern fields, general or symmetric.  Duplicate coordinate
entries are summed; 1-based indices convert to 0-based.  Values are kept
as exact Python integers until a field reduction is requested.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, MalformedHeader, NonSquareWhereSquareRequired
from .field import PrimeField
from .operators import SparseOperator


@dataclass
class MatrixMarketData:
    format: str          # "coordinate" | "array"
    rows: int
    cols: int
    triples: list        # summed, 0-based (row, col, int value); zeros dropped

    @property
    def square(self) -> bool:
        return self.rows == self.cols

    def require_square(self):
        if not self.square:
            raise NonSquareWhereSquareRequired(
                f"matrix is {self.rows} x {self.cols}")
        return self


def _parse_value(token: str, field_kind: str) -> int:
    if field_kind == "pattern":
        return 1
    try:
        return int(token)
    except ValueError:
        pass
    x = float(token)
    if x != int(x):
        raise MalformedHeader(f"non-integral value {token!r} not representable exactly")
    return int(x)


def read_matrix_market(path) -> MatrixMarketData:
    """Parse a Matrix Market file (coordinate or array, general/symmetric)."""
    with open(path, "rt", encoding="utf-8") as f:
        header = f.readline()
        parts = header.strip().split()
        if (len(parts) != 5 or parts[0] != "%%MatrixMarket"
                or parts[1].lower() != "matrix"):
            raise MalformedHeader(f"bad banner: {header.strip()!r}")
        fmt = parts[2].lower()
        field_kind = parts[3].lower()
        symmetry = parts[4].lower()
        if fmt not in ("coordinate", "array"):
            raise MalformedHeader(f"unsupported format {fmt!r}")
        if field_kind not in ("integer", "real", "pattern"):
            raise MalformedHeader(f"unsupported field {field_kind!r}")
        if symmetry not in ("general", "symmetric"):
            raise MalformedHeader(f"unsupported symmetry {symmetry!r}")
        if fmt == "array" and field_kind == "pattern":
            raise MalformedHeader("array format cannot be pattern")
        lines = (ln.strip() for ln in f)
        body = [ln for ln in lines if ln and not ln.startswith("%")]
    if not body:
        raise MalformedHeader("missing size line")
    size = body[0].split()
    entries = body[1:]
    if fmt == "coordinate":
        if len(size) != 3:
            raise MalformedHeader(f"coordinate size line needs 3 fields: {body[0]!r}")
        rows, cols, nnz = (int(x) for x in size)
        if len(entries) != nnz:
            raise MalformedHeader(f"expected {nnz} entries, found {len(entries)}")
        acc: dict[tuple[int, int], int] = {}
        for ln in entries:
            toks = ln.split()
            want = 2 if field_kind == "pattern" else 3
            if len(toks) != want:
                raise MalformedHeader(f"bad entry line: {ln!r}")
            i, j = int(toks[0]) - 1, int(toks[1]) - 1
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexOutOfRange(f"entry ({i + 1}, {j + 1}) outside {rows} x {cols}")
            v = _parse_value(toks[-1], field_kind)
            acc[(i, j)] = acc.get((i, j), 0) + v
            if symmetry == "symmetric" and i != j:
                acc[(j, i)] = acc.get((j, i), 0) + v
        triples = [(i, j, v) for (i, j), v in sorted(acc.items()) if v]
        return MatrixMarketData("coordinate", rows, cols, triples)
    # array: column-major dense values
    if len(size) != 2:
        raise MalformedHeader(f"array size line needs 2 fields: {body[0]!r}")
    rows, cols = (int(x) for x in size)
    expected = rows * cols if symmetry == "general" else rows * (rows + 1) // 2
    if len(entries) != expected:
        raise MalformedHeader(f"expected {expected} values, found {len(entries)}")
    triples = []
    if symmetry == "general":
        it = iter(entries)
        for j in range(cols):
            for i in range(rows):
                v = _parse_value(next(it), "integer")
                if v:
                    triples.append((i, j, v))
    else:
        it = iter(entries)
        for j in range(cols):
            for i in range(j, rows):
                v = _parse_value(next(it), "integer")
                if v:
                    triples.append((i, j, v))
                    if i != j:
                        triples.append((j, i, v))
    triples.sort()
    return MatrixMarketData("array", rows, cols, triples)


def to_sparse_operator(data: MatrixMarketData, field: PrimeField) -> SparseOperator:
    """Reduce entries mod p (balanced input: negatives wrap) and build the
    black-box operator; entries divisible by p drop out."""
    data.require_square()
    reduced = [(i, j, v % field.p) for i, j, v in data.triples if v % field.p]
    return SparseOperator(data.rows, reduced, field)


def to_dense_residues(data: MatrixMarketData, field: PrimeField) -> np.ndarray:
    M = np.zeros((data.rows, data.cols), dtype=np.int64)
    for i, j, v in data.triples:
        M[i, j] = v % field.p
    return M


def write_matrix_market_array(M: np.ndarray, f):
    """Dense integer matrix in array format (column-major values)."""
    M = np.asarray(M)
    f.write("%%MatrixMarket matrix array integer general\n")
    f.write(f"{M.shape[0]} {M.shape[1]}\n")
    for j in range(M.shape[1]):
        for i in range(M.shape[0]):
            f.write(f"{int(M[i, j])}\n")


def write_matrix_market_coordinate(rows: int, cols: int, triples, f):
    f.write("%%MatrixMarket matrix coordinate integer general\n")
    triples = sorted(triples)
    f.write(f"{rows} {cols} {len(triples)}\n")
    for i, j, v in triples:
        f.write(f"{i + 1} {j + 1} {int(v)}\n")
