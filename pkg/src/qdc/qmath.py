"""Dense complex linear algebra for small multiqubit density matrices.

Everything here works on plain ``numpy`` arrays of shape ``(d, d)`` with
``d = 2**n`` and ``n <= 5``.  Qubit 0 is the most-significant tensor factor,
i.e. the basis index of ``|q0 q1 ... q_{n-1}>`` is ``sum(q_k * 2**(n-1-k))``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

MAX_DIM = 32

HERMITICITY_TOL = 1e-8
TRACE_TOL = 1e-10
PSD_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class QmathError(ValueError):
    """Domain error for matrix operations (bad shape, non-Hermitian, ...)."""


def n_qubits(mat: np.ndarray) -> int:
    """Number of qubits of a square matrix whose dimension is a power of 2."""
    d = mat.shape[0]
    if mat.ndim != 2 or mat.shape[1] != d:
        raise QmathError(f"expected a square matrix, got shape {mat.shape}")
    n = d.bit_length() - 1
    if d != 2**n or not (1 <= n <= 5):
        raise QmathError(f"dimension {d} is not 2^n with 1 <= n <= 5")
    return n


def tensor(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more square matrices."""
    out = np.asarray(mats[0], dtype=complex)
    for m in mats[1:]:
        out = np.kron(out, m)
    if out.shape[0] > MAX_DIM:
        raise QmathError(f"tensor product dimension {out.shape[0]} exceeds {MAX_DIM}")
    return out


def dm_from_statevector(psi: np.ndarray) -> np.ndarray:
    """Pure-state density matrix |psi><psi| from a normalized state vector."""
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def is_hermitian(mat: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    return bool(np.max(np.abs(mat - mat.conj().T)) <= tol)


def check_density_matrix(rho: np.ndarray, tol_herm: float = 1e-10,
                         tol_trace: float = 1e-10, tol_psd: float = PSD_TOL) -> None:
    """Raise QmathError unless rho is Hermitian, unit-trace and numerically PSD."""
    n_qubits(rho)
    if not is_hermitian(rho, tol_herm):
        raise QmathError("density matrix is not Hermitian within tolerance")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol_trace:
        raise QmathError(f"density matrix trace {tr} differs from 1")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -tol_psd:
        raise QmathError(f"density matrix has eigenvalue {evals.min()} < -{tol_psd}")


def partial_trace(rho: np.ndarray, keep: set[int] | list[int] | tuple[int, ...]) -> np.ndarray:
    """Trace out all qubits not in ``keep``.

    ``keep`` is a set of qubit indices (0 = leftmost factor).  The kept qubits
    retain their relative order in the reduced matrix.
    """
    keep = sorted(set(keep))
    n = n_qubits(rho)
    if not keep:
        raise QmathError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise QmathError(f"keep indices {keep} out of range for {n} qubits")
    traced = [q for q in range(n) if q not in keep]
    # reshape to a rank-2n tensor: one (row, col) index pair per qubit
    t = rho.reshape([2] * (2 * n))
    for q in reversed(traced):
        t = np.trace(t, axis1=q, axis2=q + (t.ndim // 2))
    d = 2 ** len(keep)
    return t.reshape(d, d)


def hermitian_eigenvalues(mat: np.ndarray) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, sorted descending."""
    if not is_hermitian(mat):
        raise QmathError("matrix is not Hermitian within 1e-8")
    evals = scipy.linalg.eigvalsh(mat)
    return evals[::-1].copy()


def von_neumann_entropy(rho: np.ndarray) -> float:
    """S(rho) = -Tr(rho log2 rho) in bits.

    Eigenvalues in (-PSD_TOL, 0] are clamped to 0 (eigensolver noise on
    rank-deficient states); 0*log2(0) is taken as 0.
    """
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -PSD_TOL:
        raise QmathError(f"PSD violation: eigenvalue {evals.min()} < -{PSD_TOL}")
    evals = np.clip(evals, 0.0, None)
    nz = evals[evals > 0.0]
    return float(-np.sum(nz * np.log2(nz)))


def shannon_entropy(probs) -> float:
    """H({p_i}) = -sum p_i log2 p_i in bits, with 0 log 0 = 0."""
    p = np.asarray(probs, dtype=float)
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log2(nz)))
