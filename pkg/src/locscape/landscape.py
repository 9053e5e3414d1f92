"""Landscape function: solve (L + V) u = 1 on the torus and invert it."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import ScalarField
from .operators import OperatorKind, apply_operator, operator_symbol
from .spectral import SymbolTable, filter_real


ROUNDOFF_FACTOR = 64.0


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap; ``residual`` holds the best residual reached."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PositivityError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LandscapeResult:
    u: ScalarField
    residual_inf: float
    iterations: int
    history: list = field(default_factory=list, repr=False)


def operator_inf_norm(kind: OperatorKind, V: ScalarField) -> float:
    """Row-sum norm of L + V (L is a circulant, so every row has the same absolute sum)."""
    delta = np.zeros((V.shape.n, V.shape.n))
    delta[0, 0] = 1.0
    row = filter_real(delta, operator_symbol(kind, V.shape))
    return float(np.abs(row).sum() + np.abs(V.values).max())


def spectral_preconditioner(kind: OperatorKind, V: ScalarField) -> SymbolTable:
    """Symbol of (L + mean(V))^-1."""
    neg = operator_symbol(kind, V.shape)
    return SymbolTable(V.shape, "precond", 1.0 / (V.values.mean() - neg.values))


def solve_landscape(kind: OperatorKind, V: ScalarField, tol: float = 1e-10,
                    maxiter: int | None = None) -> LandscapeResult:
    """Preconditioned conjugate gradients from a zero initial guess.

    Stops once ||(L + V) u - 1||_inf <= tol, or once it is below the
    round-off floor of evaluating (L + V) u when tol is smaller than that
    floor. ``history`` records the preconditioned residual norm
    sqrt(r . P r) after every iteration.
    """
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    v = V.values
    if np.any(v < 0):
        raise ValueError("landscape needs a nonnegative potential")
    if not v.mean() > 0:
        raise ValueError("singular problem: potential has zero mean")
    shape = V.shape
    maxiter = 10 * shape.n if maxiter is None else maxiter
    P = spectral_preconditioner(kind, V)
    a_norm = operator_inf_norm(kind, V)

    u = np.zeros_like(v)
    r = np.ones_like(v)
    z = filter_real(r, P)
    p = z.copy()
    rz = np.vdot(r, z)
    history = []
    best = np.inf
    for it in range(1, maxiter + 1):
        Ap = apply_operator(kind, v, shape, p)
        alpha = rz / np.vdot(p, Ap)
        u += alpha * p
        r -= alpha * Ap
        res = np.abs(r).max()
        best = min(best, res)
        if res <= tol:
            # the recursive residual drifts; confirm against the true one
            true_res = np.abs(1.0 - apply_operator(kind, v, shape, u)).max()
            floor = ROUNDOFF_FACTOR * np.finfo(float).eps * a_norm * np.abs(u).max()
            if true_res <= max(tol, floor):
                history.append(float(np.sqrt(max(np.vdot(r, filter_real(r, P)), 0.0))))
                return LandscapeResult(ScalarField(shape, u), float(true_res), it, history)
            r = 1.0 - apply_operator(kind, v, shape, u)
        z = filter_real(r, P)
        rz_new = np.vdot(r, z)
        history.append(float(np.sqrt(max(rz_new, 0.0))))
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise ConvergenceError(
        f"landscape CG did not reach {tol:g} in {maxiter} iterations (best {best:.3g})", best)


def effective_potential(result: LandscapeResult, on_nonpositive: str = "error") -> ScalarField:
    """1/u. With ``on_nonpositive='clamp'`` values u <= 0 are raised to a tiny positive floor."""
    u = result.u.values
    if np.any(u <= 0):
        if on_nonpositive == "error":
            raise PositivityError("positivity violated: landscape u has nonpositive values")
        if on_nonpositive != "clamp":
            raise ValueError(f"on_nonpositive must be 'error' or 'clamp', got {on_nonpositive!r}")
        floor = 1e-12 * np.abs(u).max()
        u = np.maximum(u, floor)
    return ScalarField(result.u.shape, 1.0 / u)
