"""Lowest eigenpairs of L + V, matrix-free, plus a dense reference solver."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh, lobpcg

from .fieldio import write_field
from .grid import ScalarField
from .landscape import ConvergenceError, spectral_preconditioner
from .operators import OperatorKind, apply_operator, dense_matrix
from .spectral import filter_real

DENSE_ORACLE_MAX_N = 24
# below this many unknowns the iterative solvers have nothing to gain
DIRECT_MAX_SIZE = 64
CLUSTER_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class EigenSet:
    lambdas: np.ndarray
    phis: list
    centers: list
    residuals: np.ndarray
    tol: float
    method: str = ""
    info: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.lambdas)

    @property
    def pairs(self):
        return list(zip(self.lambdas, self.phis))


def localization_center(phi: ScalarField) -> tuple[int, int]:
    """Grid point of largest |phi|; argmax already returns the first row-major hit on ties."""
    a = np.abs(phi.values)
    if not a.max() > 0:
        raise ValueError("localization center of the zero field")
    x, y = divmod(int(np.argmax(a)), phi.shape.n)
    return x, y


def _finalize(kind, V, lambdas, vecs, tol, method, info):
    """Normalize, fix signs, order clusters, and measure residuals.

    ``vecs`` is (n*n, m) with columns as eigenvectors.
    """
    shape = V.shape
    n, h = shape.n, shape.h
    order = np.argsort(lambdas, kind="stable")
    lambdas = np.asarray(lambdas, dtype=float)[order]
    vecs = np.asarray(vecs, dtype=float)[:, order]
    vecs = vecs / (h * np.linalg.norm(vecs, axis=0))
    peak = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[peak, np.arange(vecs.shape[1])])
    vecs = vecs * np.where(signs == 0, 1.0, signs)

    # within a cluster of (numerically) equal eigenvalues order by center index
    keys = np.empty(len(lambdas))
    start = 0
    for j in range(1, len(lambdas) + 1):
        if j == len(lambdas) or lambdas[j] - lambdas[start] > CLUSTER_RTOL * max(1.0, abs(lambdas[start])):
            keys[start:j] = start
            start = j
    reorder = np.lexsort((peak, keys))
    lambdas, vecs, peak = lambdas[reorder], vecs[:, reorder], peak[reorder]

    block = vecs.reshape(n, n, -1)
    res_block = apply_operator(kind, V.values, shape, block) - lambdas * block
    residuals = h * np.linalg.norm(res_block.reshape(n * n, -1), axis=0)
    phis = [ScalarField(shape, block[:, :, j]) for j in range(block.shape[2])]
    centers = [tuple(int(c) for c in divmod(int(p), n)) for p in peak]
    return EigenSet(lambdas, phis, centers, residuals, tol, method, info)


def dense_eigen_oracle(kind: OperatorKind, V: ScalarField, m: int) -> EigenSet:
    if V.shape.n > DENSE_ORACLE_MAX_N:
        raise ValueError(f"dense eigensolver limited to n <= {DENSE_ORACLE_MAX_N}, got n={V.shape.n}")
    A = dense_matrix(kind, V)
    w, U = np.linalg.eigh(A)
    return _finalize(kind, V, w[:m], U[:, :m], 0.0, "dense", {"trace": float(np.trace(A)), "all": w})


def _operator(kind, V):
    shape = V.shape
    n = shape.n
    counter = {"applications": 0}

    def matmat(x):
        x = np.asarray(x, dtype=float)
        cols = x.reshape(n * n, -1)
        counter["applications"] += cols.shape[1]
        y = apply_operator(kind, V.values, shape, cols.reshape(n, n, -1))
        return y.reshape(x.shape)

    return LinearOperator((n * n, n * n), matvec=matmat, matmat=matmat, dtype=float), counter


def _preconditioner(kind, V):
    n = V.shape.n
    P = spectral_preconditioner(kind, V)

    def matmat(x):
        x = np.asarray(x, dtype=float)
        return filter_real(x.reshape(n, n, -1), P).reshape(x.shape)

    return LinearOperator((n * n, n * n), matvec=matmat, matmat=matmat, dtype=float)


def smallest_eigenpairs(kind: OperatorKind, V: ScalarField, m: int = 64, tol: float = 1e-6,
                        seed: int = 0, method: str = "lanczos", maxiter: int | None = None) -> EigenSet:
    """The m algebraically smallest eigenpairs of L + V.

    ``method`` selects implicitly restarted Lanczos (``"lanczos"``, the
    default), block LOBPCG preconditioned by (L + mean V)^-1
    (``"lobpcg"``) or a dense eigendecomposition (``"dense"``, tiny grids).
    Eigenvectors are normalized in the h^2-weighted L2 norm with their
    largest entry positive. Every pair must satisfy
    ||(L + V) phi - lambda phi|| <= tol * max(1, lambda) or
    ConvergenceError is raised.
    """
    N = V.shape.size
    if not 1 <= m < N:
        raise ValueError(f"need 1 <= m < n^2, got m={m}")
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    if N <= DIRECT_MAX_SIZE and method != "dense":
        method = "dense"
    rng = np.random.Generator(np.random.Philox(key=int(seed) & ((1 << 64) - 1)))

    if method == "dense":
        A = dense_matrix(kind, V)
        w, U = np.linalg.eigh(A)
        es = _finalize(kind, V, w[:m], U[:, :m], tol, "dense", {})
    elif method == "lanczos":
        op, counter = _operator(kind, V)
        ncv = min(N, max(2 * m + 1, m + 32))
        v0 = rng.standard_normal(N)
        try:
            w, U = eigsh(op, k=m, which="SA", tol=tol * 1e-3, ncv=ncv, v0=v0,
                         maxiter=maxiter or 100 * N)
        except ArpackNoConvergence as exc:
            raise ConvergenceError(
                f"Lanczos converged {len(exc.eigenvalues)} of {m} eigenpairs", None) from exc
        es = _finalize(kind, V, w, U, tol, "lanczos", dict(counter))
    elif method == "lobpcg":
        op, counter = _operator(kind, V)
        block = min(N // 3, m + max(8, m // 4))
        if block < m:
            raise ValueError(f"grid too small for a LOBPCG block of {m} vectors; use method='dense'")
        X = rng.standard_normal((N, block))
        with warnings.catch_warnings():
            # residuals are checked below and reported through ConvergenceError
            warnings.simplefilter("ignore", UserWarning)
            w, U = lobpcg(op, X, M=_preconditioner(kind, V), largest=False,
                          tol=tol * 1e-2, maxiter=maxiter or 1000)
        es = _finalize(kind, V, w[np.argsort(w)[:m]], U[:, np.argsort(w)[:m]], tol, "lobpcg", dict(counter))
    else:
        raise ValueError(f"unknown eigensolver method {method!r}")

    bound = tol * np.maximum(1.0, np.abs(es.lambdas))
    bad = np.flatnonzero(es.residuals > bound)
    if bad.size:
        report = ", ".join(f"#{j + 1}: {es.residuals[j]:.2e}" for j in bad[:10])
        raise ConvergenceError(f"{bad.size} eigenpairs above residual tolerance ({report})",
                               es.residuals)
    return es


def write_eigenset(eigs: EigenSet, outdir) -> Path:
    """Dump phi_NNN.lsf files and an eigs.csv index (1-based eigen-index)."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "eigs.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "lambda", "center_x", "center_y", "residual"])
        for j, (lam, phi) in enumerate(eigs.pairs):
            write_field(outdir / f"phi_{j + 1:03d}.lsf", phi)
            cx, cy = eigs.centers[j]
            w.writerow([j + 1, repr(float(lam)), cx, cy, repr(float(eigs.residuals[j]))])
    return outdir / "eigs.csv"


def read_eigs_csv(path):
    """Eigenvalues and centers from an eigs.csv file, ordered by index."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append((int(row["index"]), float(row["lambda"]),
                         (int(row["center_x"]), int(row["center_y"]))))
    rows.sort()
    return np.array([r[1] for r in rows]), [r[2] for r in rows]
