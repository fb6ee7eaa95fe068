"""Small-eigenvalue solves for Laplacian operators and field canonicalization.

The solver targets the k smallest *nonzero* eigenpairs of ``L phi = lambda
M phi``. The kernel (the constant function) is excluded by explicit
deflation: the symmetrically reduced operator is shifted by a rank-one
term along the mass-weighted constant, which moves the zero eigenvalue to
the top of the spectrum. Every returned pair carries a residual that is
re-verified against the original sparse operator, independently of the
solver path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as dense_linalg
from scipy import sparse
from scipy.sparse.linalg import LinearOperator, eigsh, splu

from .laplacian import SparseSymOperator, build_laplacian

__all__ = [
    "DisconnectedMeshError",
    "EigenPair",
    "EigensolverError",
    "ScalarField",
    "canonicalize",
    "eigenfunction_field",
    "fiedler_field",
    "fix_sign",
    "smallest_nonzero_eigenpairs",
]

# above this dimension the solve switches from dense LAPACK to ARPACK
# shift-invert; both paths are deterministic (fixed starting vector)
DENSE_CUTOFF = 2048

# an eigenvalue below this fraction of the spectral scale is a second
# numerical zero, i.e. a disconnected 1-skeleton
ZERO_EIGENVALUE_FACTOR = 1e-10

_ARPACK_SEED = 0x5EED


class EigensolverError(ValueError):
    """Solve did not meet the requested residual certificate."""


class DisconnectedMeshError(ValueError):
    """Operator has a repeated zero eigenvalue (disconnected 1-skeleton)."""


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalue, mass-orthonormal eigenvector, and certified residual."""

    value: float
    vector: np.ndarray
    residual: float


@dataclass(frozen=True)
class ScalarField:
    """One real value per mesh vertex, tagged with its origin.

    ``provenance`` records which eigenfunction index (and operator
    variant) produced the field; it is carried into persistence diagrams
    and their serialized form.
    """

    values: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("field values must be a 1-D array")
        if not np.isfinite(values).all():
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)


def _starting_vector(n: int) -> np.ndarray:
    # fixed seed: corpus runs must be bit-reproducible
    rng = np.random.default_rng(_ARPACK_SEED + n)
    return rng.standard_normal(n)


def smallest_nonzero_eigenpairs(op: SparseSymOperator, k: int, tol: float = 1e-8):
    """Solve for the k smallest nonzero eigenpairs of ``L phi = lambda M phi``.

    Parameters
    ----------
    op : SparseSymOperator
        Laplacian with optional lumped-mass diagonal M. The underlying
        1-skeleton must be connected.
    k : int
        Number of pairs, ``1 <= k <= dimension - 1``.
    tol : float
        Residual certificate: every returned pair satisfies
        ``||L phi - lambda M phi||_2 <= tol * (1 + lambda)``, re-checked
        by a direct sparse apply after the solve.

    Returns
    -------
    list of EigenPair
        Sorted ascending by eigenvalue. Vectors are unit-norm in the mass
        inner product and orthogonal to the mass-weighted constant.

    Raises
    ------
    DisconnectedMeshError
        A second numerically zero eigenvalue was found.
    EigensolverError
        The residual certificate could not be met within the iteration
        budget (the achieved residual is reported).
    """
    n = op.dimension
    if k < 1:
        raise ValueError("k must be at least 1")
    if k + 1 > n:
        raise ValueError(f"k={k} needs at least k+1={k + 1} vertices, mesh has {n}")
    if tol <= 0:
        raise ValueError("tol must be positive")

    # symmetric reduction A = M^(-1/2) L M^(-1/2); kernel direction u
    if op.mass is not None:
        inv_sqrt_m = 1.0 / np.sqrt(op.mass)
        scaling = sparse.diags(inv_sqrt_m)
        reduced = (scaling @ op.matrix @ scaling).tocsr()
        u = np.sqrt(op.mass)
    else:
        inv_sqrt_m = None
        reduced = op.matrix
        u = np.ones(n)
    u = u / np.linalg.norm(u)

    gersh = float(abs(reduced).sum(axis=1).max()) if reduced.nnz else 0.0
    lam_scale = max(gersh, np.finfo(float).tiny)
    shift = 2.0 * gersh + 1.0

    if n <= DENSE_CUTOFF:
        deflated = reduced.toarray() + shift * np.outer(u, u)
        values, vectors = dense_linalg.eigh(deflated, subset_by_index=(0, k - 1))
    else:
        values, vectors = _arpack_smallest(reduced, u, shift, gersh, k, tol)

    if values[0] <= ZERO_EIGENVALUE_FACTOR * lam_scale:
        raise DisconnectedMeshError(
            "operator has a second numerically zero eigenvalue; the 1-skeleton is "
            "disconnected. Validate the mesh and enable multi-component handling "
            "or extract a single component first."
        )

    order = np.argsort(values)
    pairs = []
    for idx in order:
        lam = float(values[idx])
        psi = vectors[:, idx]
        psi = psi - (u @ psi) * u  # explicit deflation of the constant mode
        phi = psi * inv_sqrt_m if inv_sqrt_m is not None else psi
        m_diag = op.mass if op.mass is not None else 1.0
        norm_m = float(np.sqrt(np.sum(m_diag * phi * phi)))
        if norm_m == 0.0:
            raise EigensolverError("eigenvector collapsed under deflation")
        phi = phi / norm_m
        residual = float(np.linalg.norm(op.apply(phi) - lam * (m_diag * phi)))
        if residual > tol * (1.0 + lam):
            raise EigensolverError(
                f"residual {residual:.3e} exceeds certificate {tol * (1.0 + lam):.3e} "
                f"for eigenvalue {lam:.6e}"
            )
        pairs.append(EigenPair(value=lam, vector=phi, residual=residual))
    return pairs


def _arpack_smallest(reduced, u, shift, gersh, k, tol):
    """ARPACK shift-invert solve of the rank-one-deflated operator.

    The deflated operator is ``B = A + shift * u u^T``; ``(B - sigma I)^-1``
    is applied through a sparse LU factorization of ``A - sigma I`` plus a
    Sherman-Morrison correction for the rank-one term.
    """
    n = reduced.shape[0]
    sigma = -max(1e-3 * gersh, 1e-12)
    lu = splu((reduced - sigma * sparse.identity(n, format="csr")).tocsc())
    su = lu.solve(u)
    denom = 1.0 + shift * (u @ su)

    def solve_shifted(b):
        sb = lu.solve(b)
        return sb - su * (shift * (u @ sb) / denom)

    def apply_deflated(b):
        return reduced @ b + shift * (u @ b) * u

    deflated = LinearOperator((n, n), matvec=apply_deflated, dtype=float)
    op_inv = LinearOperator((n, n), matvec=solve_shifted, dtype=float)
    try:
        values, vectors = eigsh(
            deflated,
            k=k,
            sigma=sigma,
            which="LM",
            OPinv=op_inv,
            v0=_starting_vector(n),
            tol=min(tol * 1e-2, 1e-10),
            maxiter=max(50 * k, 1000),
        )
    except Exception as exc:  # ArpackNoConvergence and friends
        raise EigensolverError(f"sparse eigensolver failed to converge: {exc}") from exc
    return values, vectors


def eigenfunction_field(mesh, index: int, variant: str = "cotangent", tol: float = 1e-8) -> ScalarField:
    """Canonicalized eigenfunction ``index`` (1 = Fiedler vector) as a field."""
    if index < 1:
        raise ValueError("eigenfunction index starts at 1 (the Fiedler vector)")
    op = build_laplacian(mesh, variant)
    pairs = smallest_nonzero_eigenpairs(op, index, tol)
    raw = ScalarField(pairs[index - 1].vector, provenance=f"{variant}-eigenfunction-{index}")
    return canonicalize(raw)


def fiedler_field(mesh, variant: str = "cotangent", tol: float = 1e-8) -> ScalarField:
    """Canonicalized Fiedler vector (first nonzero eigenfunction) of a mesh."""
    return eigenfunction_field(mesh, 1, variant=variant, tol=tol)


def fix_sign(field: ScalarField) -> ScalarField:
    """Resolve the sign ambiguity of an eigenfunction field.

    The sign is fixed so the third central moment ``sum((v - mean)^3)`` is
    nonnegative; when the normalized skewness is within 1e-12 of zero the
    fallback rule makes the mean-centered entry of largest magnitude
    positive. Both rules are antisymmetric under negation, so ``fix_sign(f)``
    and ``fix_sign(-f)`` produce bit-identical value sequences. The
    amplitude is left untouched.

    Raises
    ------
    ValueError
        Constant field (zero range): the sign is undecidable.
    """
    v = field.values
    if len(v) == 0 or v.max() == v.min():
        raise ValueError("cannot fix the sign of a constant field (zero range)")
    centered = v - v.mean()
    skew = float(np.sum(centered**3))
    spread = float(np.sum(centered**2)) ** 1.5
    if abs(skew) <= 1e-12 * spread:
        flip = centered[np.argmax(np.abs(centered))] < 0
    else:
        flip = skew < 0
    return ScalarField(-v, provenance=field.provenance) if flip else field


def canonicalize(field: ScalarField) -> ScalarField:
    """Resolve sign and scale ambiguity of an eigenfunction field.

    Applies the :func:`fix_sign` rule, then affinely rescales the signed
    field to the range [0, 1] exactly. The sign decision happens before
    rescaling, so ``canonicalize(f)`` and ``canonicalize(-f)`` produce
    bit-identical value sequences. Note the rescale makes fields of
    different amplitudes indistinguishable; the descriptor pipeline
    deliberately compares diagrams of sign-fixed, mass-normalized fields
    at their natural amplitude instead.

    Raises
    ------
    ValueError
        Constant field (zero range).
    """
    signed = fix_sign(field).values
    lo = signed.min()
    rescaled = (signed - lo) / (signed.max() - lo)
    return ScalarField(rescaled, provenance=field.provenance)
