"""Hermitian matrix storage and the small dense operations built on it.

Transmit covariances are Hermitian by definition, so ``HermitianMatrix``
never stores a full complex square array: only the real diagonal and the
strictly-lower complex entries are free, packed into a real coordinate
vector of length n*n (diagonal first, then (Re, Im) per lower entry in
row-major order). Reconstruction is exactly Hermitian by construction, and
the same coordinates double as the Newton variables of the barrier solver.

Channel vectors are plain 1-D complex ndarrays; ``complex_vector`` is the
validating constructor used at the package boundaries.
"""

import numpy as np

from . import _kernels


class StructuralError(ValueError):
    """Malformed input: wrong shape, non-finite entries, broken symmetry."""


def complex_vector(values, n=None):
    """Validate and return a 1-D complex128 channel vector."""
    v = np.asarray(values, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise StructuralError("channel vector must be 1-D and non-empty")
    if n is not None and v.size != n:
        raise StructuralError(f"expected length {n}, got {v.size}")
    if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
        raise StructuralError("channel vector has non-finite entries")
    return v.copy()


class HermitianMatrix:
    """A Hermitian matrix represented by its free real coordinates."""

    __slots__ = ("coords", "n")

    def __init__(self, coords, n):
        coords = np.asarray(coords, dtype=np.float64)
        if coords.ndim != 1 or coords.size != n * n:
            raise StructuralError(
                f"coordinate vector must have length {n * n}, got {coords.size}"
            )
        if not np.all(np.isfinite(coords)):
            raise StructuralError("coordinates contain non-finite values")
        self.coords = coords.copy()
        self.n = int(n)

    @classmethod
    def from_matrix(cls, a, tol=1e-9):
        """Build from a square array, enforcing A = A^H within tol."""
        a = np.asarray(a, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise StructuralError("expected a square matrix")
        if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
            raise StructuralError("matrix has non-finite entries")
        scale = max(1.0, float(np.abs(a).max()))
        if np.abs(a - a.conj().T).max() > tol * scale:
            raise StructuralError("matrix is not Hermitian within tolerance")
        sym = 0.5 * (a + a.conj().T)
        return cls(_kernels.mat_to_coords(sym), a.shape[0])

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(n * n), n)

    @classmethod
    def identity(cls, n, scale=1.0):
        x = np.zeros(n * n)
        x[:n] = scale
        return cls(x, n)

    @property
    def matrix(self):
        """The full complex array (exactly Hermitian)."""
        return _kernels.coords_to_mat(self.coords, self.n)

    def trace(self):
        return float(self.coords[: self.n].sum())

    def __array__(self, dtype=None, copy=None):
        m = self.matrix
        if dtype is not None:
            m = m.astype(dtype)
        return m

    def __repr__(self):
        return f"HermitianMatrix(n={self.n}, trace={self.trace():.6g})"


def _as_matrix(q):
    """Accept HermitianMatrix or array-like; return a complex square array."""
    if isinstance(q, HermitianMatrix):
        return q.matrix
    a = np.asarray(q, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise StructuralError("expected a square matrix")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise StructuralError("matrix has non-finite entries")
    return a


def quadratic_form(h, q):
    """Re(h^H Q h) for a channel vector h and Hermitian Q.

    The imaginary part of h^H Q h vanishes for exactly Hermitian Q; taking
    the real part discards only rounding noise.
    """
    a = _as_matrix(q)
    h = complex_vector(h, a.shape[0])
    return float(np.vdot(h, a @ h).real)


def eig_hermitian(q):
    """Eigenvalues (descending) and orthonormal eigenvectors (columns).

    Cyclic complex Jacobi rotations; adequate and simple at the matrix
    sizes this package works with.
    """
    a = _as_matrix(q)
    w, v = _kernels.jacobi_eigh(np.ascontiguousarray(a))
    return w, v


def numeric_rank(q, rel_tol=1e-4):
    """Number of eigenvalues above rel_tol times the largest.

    Q must be positive semidefinite up to rounding; the zero matrix has
    rank 0.
    """
    w, _ = eig_hermitian(q)
    lmax = float(w[0]) if w.size else 0.0
    if lmax <= 0.0:
        if w.size and w[-1] < -1e-12:
            raise StructuralError("matrix is not positive semidefinite")
        return 0
    if w[-1] < -1e-8 * lmax:
        raise StructuralError("matrix is not positive semidefinite")
    return int(np.sum(w > rel_tol * lmax))


# ---------------------------------------------------------------------------
# serialization: complex numbers as [re, im] pairs


def complex_to_pairs(values):
    """Complex vector/matrix -> nested lists of [re, im] pairs."""
    a = np.asarray(values, dtype=np.complex128)
    stacked = np.stack([a.real, a.imag], axis=-1)
    return stacked.tolist()


def pairs_to_complex(pairs):
    """Nested [re, im] lists -> complex ndarray."""
    a = np.asarray(pairs, dtype=np.float64)
    if a.ndim < 1 or a.shape[-1] != 2:
        raise StructuralError("expected [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]
