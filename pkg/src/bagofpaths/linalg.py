"""Guarded dense linear solves.

Every linear system in the library goes through :func:`guarded_solve` so
that ill-conditioned systems fail loudly instead of returning garbage.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy import linalg as sla

from .errors import NumericalError

# Below this reciprocal-condition estimate a 64-bit solve carries no
# trustworthy digits.
RCOND_FLOOR = 1e-14


def guarded_solve(matrix: np.ndarray, rhs: np.ndarray, context: str = "") -> np.ndarray:
    """Solve ``matrix @ X = rhs`` by LU factorization with a conditioning guard.

    Parameters
    ----------
    matrix : (n, n) ndarray
    rhs : (n,) or (n, k) ndarray
    context : str
        Appended to the error message so callers can name the parameter
        (for example a temperature value) that produced the bad system.

    Raises
    ------
    NumericalError
        If the 1-norm reciprocal condition estimate of ``matrix`` falls
        below ``RCOND_FLOOR``.
    """
    with warnings.catch_warnings():
        # An exactly singular factor triggers a LinAlgWarning before the
        # rcond check turns it into a hard error; keep the output clean.
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(matrix)
    anorm = np.linalg.norm(matrix, 1)
    rcond, info = sla.lapack.dgecon(lu, anorm, norm="1")
    if info != 0:  # pragma: no cover - dgecon only fails on bad arguments
        raise NumericalError(f"condition estimation failed (info={info}) {context}".strip())
    if not np.isfinite(rcond) or rcond < RCOND_FLOOR:
        suffix = f" ({context})" if context else ""
        raise NumericalError(
            f"linear system is numerically singular: reciprocal condition "
            f"estimate {rcond:.3e} below {RCOND_FLOOR:.0e}{suffix}"
        )
    return sla.lu_solve((lu, piv), rhs)
