"""Banded direct solvers backing both finite element modules."""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import SingularSystemError

#: pivot guard relative to the matrix infinity norm
PIVOT_FLOOR = 1e-30

#: residual contract of every solve: |Ax-b|_inf <= RESIDUAL_REL * scale
RESIDUAL_REL = 1e-10


@dataclass
class BandedMatrix:
    """Square matrix with lower/upper bandwidths (kl, ku).

    Band storage follows the LAPACK convention: data[ku + i - j, j]
    holds A[i, j] for max(0, j-ku) <= i <= min(n-1, j+kl).
    """

    n: int
    kl: int
    ku: int
    data: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("matrix dimension must be at least 1")
        if not (0 <= self.kl < self.n and 0 <= self.ku < self.n):
            raise ValueError("bandwidths must satisfy 0 <= kl, ku < n")
        if self.data is None:
            self.data = np.zeros((self.kl + self.ku + 1, self.n))
        elif self.data.shape != (self.kl + self.ku + 1, self.n):
            raise ValueError("band storage has wrong shape")

    def _check(self, i, j):
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError(f"index ({i}, {j}) out of range")
        if not -self.ku <= i - j <= self.kl:
            raise IndexError(f"entry ({i}, {j}) lies outside the band")

    def set(self, i, j, value):
        self._check(i, j)
        self.data[self.ku + i - j, j] = value

    def add(self, i, j, value):
        self._check(i, j)
        self.data[self.ku + i - j, j] += value

    def get(self, i, j):
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError(f"index ({i}, {j}) out of range")
        if not -self.ku <= i - j <= self.kl:
            return 0.0
        return self.data[self.ku + i - j, j]

    def zero_row(self, i):
        """Clear row i inside the band (essential BC row replacement)."""
        for j in range(max(0, i - self.kl), min(self.n, i + self.ku + 1)):
            self.data[self.ku + i - j, j] = 0.0

    def to_dense(self):
        a = np.zeros((self.n, self.n))
        for s in range(-self.ku, self.kl + 1):
            j = np.arange(max(0, -s), min(self.n, self.n - s))
            a[j + s, j] = self.data[self.ku + s, j]
        return a

    def norm_inf(self):
        rows = np.zeros(self.n)
        for s in range(-self.ku, self.kl + 1):
            j = np.arange(max(0, -s), min(self.n, self.n - s))
            rows[j + s] += np.abs(self.data[self.ku + s, j])
        return float(np.max(rows))

    def to_banded_rows(self):
        """Alias for the raw band storage (rows = diagonals)."""
        return self.data

    def matvec(self, x):
        y = np.zeros(self.n)
        for s in range(-self.ku, self.kl + 1):
            j = np.arange(max(0, -s), min(self.n, self.n - s))
            y[j + s] += self.data[self.ku + s, j] * x[j]
        return y


def _residual_check(a_norm, residual, x, b):
    scale = a_norm * np.max(np.abs(x), initial=0.0) + np.max(np.abs(b), initial=0.0)
    if residual > RESIDUAL_REL * max(scale, np.finfo(float).tiny):
        raise SingularSystemError(
            f"solve residual {residual} exceeds contract for scale {scale}")


def solve_banded(matrix, b):
    """Solve A x = b by banded LU with partial pivoting.

    Raises SingularSystemError on (numerically) singular systems or when
    the residual contract |Ax - b|_inf <= 1e-10 (|A| |x| + |b|) fails.
    """
    b = np.asarray(b, dtype=float)
    if b.shape != (matrix.n,):
        raise ValueError(f"rhs has shape {b.shape}, want ({matrix.n},)")
    a_norm = matrix.norm_inf()
    if a_norm == 0.0:
        raise SingularSystemError("zero matrix")
    try:
        x = scipy.linalg.solve_banded(
            (matrix.kl, matrix.ku), matrix.data, b,
            overwrite_ab=False, overwrite_b=False, check_finite=False)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystemError(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("non-finite solution from banded solve")
    residual = float(np.max(np.abs(matrix.matvec(x) - b), initial=0.0))
    _residual_check(a_norm, residual, x, b)
    return x


def solve_tridiagonal(lower, diag, upper, b):
    """Thomas algorithm for a tridiagonal system.

    lower has length n-1 (subdiagonal), diag length n, upper length n-1.
    Same residual contract and singularity guard as solve_banded.
    """
    lower = np.asarray(lower, dtype=float)
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=float)
    b = np.asarray(b, dtype=float)
    n = diag.shape[0]
    if lower.shape != (n - 1,) or upper.shape != (n - 1,) or b.shape != (n,):
        raise ValueError("inconsistent tridiagonal array lengths")
    a_norm = float(np.max(
        np.abs(diag)
        + np.abs(np.concatenate(([0.0], lower)))
        + np.abs(np.concatenate((upper, [0.0])))))
    if a_norm == 0.0:
        raise SingularSystemError("zero matrix")
    floor = PIVOT_FLOOR * a_norm

    d = diag.copy()
    rhs = b.copy()
    for k in range(1, n):
        if abs(d[k - 1]) < floor:
            raise SingularSystemError(f"pivot underflow at row {k - 1}")
        m = lower[k - 1] / d[k - 1]
        d[k] -= m * upper[k - 1]
        rhs[k] -= m * rhs[k - 1]
    if abs(d[n - 1]) < floor:
        raise SingularSystemError(f"pivot underflow at row {n - 1}")
    x = np.empty(n)
    x[n - 1] = rhs[n - 1] / d[n - 1]
    for k in range(n - 2, -1, -1):
        x[k] = (rhs[k] - upper[k] * x[k + 1]) / d[k]

    residual = float(np.max(np.abs(
        diag * x
        + np.concatenate(([0.0], lower * x[:-1]))
        + np.concatenate((upper * x[1:], [0.0]))
        - b)))
    _residual_check(a_norm, residual, x, b)
    return x


def tridiagonal_as_banded(lower, diag, upper):
    """Pack tridiagonal arrays into a BandedMatrix (kl = ku = 1)."""
    n = len(diag)
    m = BandedMatrix(n=n, kl=1, ku=1)
    m.data[0, 1:] = upper
    m.data[1, :] = diag
    m.data[2, :-1] = lower
    return m
