"""Dense linear algebra over F_q on int64 numpy arrays.

All routines take the ``BaseField`` first and never mutate their inputs.
"""

from __future__ import annotations

import numpy as np

from .errors import StructuralError
from .gfq import BaseField


def as_matrix(rows, ncols: int) -> np.ndarray:
    try:
        m = np.array(rows, dtype=np.int64)
    except ValueError as exc:
        raise StructuralError(f"ragged vector list: {exc}") from None
    if m.size == 0:
        return np.zeros((0, ncols), dtype=np.int64)
    if m.ndim != 2 or m.shape[1] != ncols:
        raise StructuralError(f"vectors must have length {ncols}")
    return m


def rref(gf: BaseField, mat) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with zero rows dropped, plus pivot columns."""
    m = np.array(mat, dtype=np.int64, copy=True)
    if m.ndim != 2:
        raise ValueError("rref needs a 2-d array")
    nrows, ncols = m.shape
    pivots: list[int] = []
    row = 0
    for col in range(ncols):
        if row == nrows:
            break
        nz = np.nonzero(m[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            m[[row, piv]] = m[[piv, row]]
        lead = int(m[row, col])
        if lead != 1:
            m[row] = gf.mul(int(gf.inv(lead)), m[row])
        factors = m[:, col].copy()
        factors[row] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            m[hit] = gf.sub(m[hit], gf.mul(factors[hit, None], m[row][None, :]))
        pivots.append(col)
        row += 1
    return m[:row], pivots


def rank(gf: BaseField, mat) -> int:
    m = np.asarray(mat)
    if m.size == 0:
        return 0
    return len(rref(gf, m)[1])


def nullspace(gf: BaseField, mat) -> np.ndarray:
    """Basis (as rows) of {x : mat @ x = 0}."""
    m = np.asarray(mat, dtype=np.int64)
    ncols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(ncols, dtype=np.int64)
    r, pivots = rref(gf, m)
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = gf.neg(int(r[i, f]))
    return basis


def matmul(gf: BaseField, a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if gf.r == 1:
        return (a @ b) % gf.p
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(a.shape[1]):
        out = gf.add(out, gf.mul(a[:, k, None], b[None, k, :]))
    return out


def inverse(gf: BaseField, mat) -> np.ndarray:
    m = np.asarray(mat, dtype=np.int64)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("inverse needs a square matrix")
    aug = np.concatenate([m, np.eye(n, dtype=np.int64)], axis=1)
    r, pivots = rref(gf, aug)
    if pivots[:n] != list(range(n)) or len(r) < n:
        raise ZeroDivisionError("singular matrix over F_q")
    return r[:n, n:]


def in_rowspace(gf: BaseField, basis_rref: np.ndarray, pivots: list[int], v) -> bool:
    """Membership test against an RREF basis by direct reduction."""
    v = np.asarray(v, dtype=np.int64).copy()
    for i, pc in enumerate(pivots):
        c = int(v[pc])
        if c:
            v = gf.sub(v, gf.mul(c, basis_rref[i]))
    return not np.any(v)


def coords_in_rref(basis_rref: np.ndarray, pivots: list[int], v) -> np.ndarray:
    """Coordinates of v (assumed in the row space) w.r.t. an RREF basis."""
    v = np.asarray(v, dtype=np.int64)
    return v[pivots].copy()
