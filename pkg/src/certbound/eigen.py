"""Dense symmetric eigenvalues via cyclic Jacobi rotations.

Small matrices only (system dimensions, not discretizations); used for the
sampled induced-2-norm baseline and as the reference solver when checking
eigenvalue upper bounds.
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import DimensionMismatch

MatrixLike = Sequence[Sequence[float]]


def _check_square(a: MatrixLike) -> int:
    n = len(a)
    if any(len(row) != n for row in a):
        raise DimensionMismatch("matrix is not square")
    return n


def jacobi_eigenvalues(
    a: MatrixLike, tol: float = 1e-14, max_sweeps: int = 100
) -> list[float]:
    """Eigenvalues of a symmetric matrix, ascending.

    Cyclic-by-row Jacobi: zero each off-diagonal entry in turn with a Givens
    rotation until the off-diagonal Frobenius mass falls below ``tol`` times
    the matrix scale.
    """
    n = _check_square(a)
    m = [list(map(float, row)) for row in a]
    scale = max(1.0, max(abs(x) for row in m for x in row))
    for _ in range(max_sweeps):
        off = math.sqrt(sum(m[i][j] ** 2 for i in range(n) for j in range(n) if i != j))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p][q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (m[q][q] - m[p][p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(theta * theta + 1.0)
                )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = m[k][p]
                    akq = m[k][q]
                    m[k][p] = c * akp - s * akq
                    m[k][q] = s * akp + c * akq
                for k in range(n):
                    apk = m[p][k]
                    aqk = m[q][k]
                    m[p][k] = c * apk - s * aqk
                    m[q][k] = s * apk + c * aqk
    return sorted(m[i][i] for i in range(n))


def lambda_max(a: MatrixLike) -> float:
    return jacobi_eigenvalues(a)[-1]


def lambda_min(a: MatrixLike) -> float:
    return jacobi_eigenvalues(a)[0]


def induced_two_norm(a: MatrixLike) -> float:
    """Largest singular value of a (possibly rectangular) matrix, via the
    symmetric eigenproblem on A*A^T."""
    rows = len(a)
    if rows == 0:
        raise DimensionMismatch("empty matrix")
    gram = [
        [sum(ra[k] * rb[k] for k in range(len(a[0]))) for rb in a] for ra in a
    ]
    top = lambda_max(gram)
    return math.sqrt(max(top, 0.0))


def gershgorin_upper(a: MatrixLike) -> float:
    """Upper bound for the largest eigenvalue of a symmetric matrix: the
    max over rows of diagonal plus absolute off-diagonal row sum."""
    n = _check_square(a)
    return max(
        a[i][i] + sum(abs(a[i][j]) for j in range(n) if j != i) for i in range(n)
    )


def row_gap_upper(a: MatrixLike, zeta: float) -> float:
    """Upper bound for the largest eigenvalue using the dimension-dependent
    factor ``zeta`` times the largest absolute off-diagonal row entry."""
    n = _check_square(a)
    if n < 2:
        raise DimensionMismatch("bound needs dimension >= 2")
    return max(
        a[i][i] + zeta * max(abs(a[i][j]) for j in range(n) if j != i)
        for i in range(n)
    )
