"""Dense linear algebra and quantum primitives for small qubit registers.

Conventions (fixed once, used everywhere):

* ``|0> = (1, 0)^T`` and ``sigma_z = diag(+1, -1)``, so a qubit encoding a
  value ``u`` via ``|u> = sqrt(1-u)|0> + sqrt(u)|1>`` has ``<sigma_z> = 1 - 2u``.
* Qubit 1 is the leftmost tensor factor, i.e. the most significant bit of
  the computational-basis index.

All functions are pure and operate on plain complex ndarrays; density
matrices are ordinary ``(2**n, 2**n)`` arrays validated on demand with
:func:`check_density_matrix`.
"""

from __future__ import annotations

import numpy as np

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-9


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two matrices."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left to right."""
    if not factors:
        raise ValueError("kron_all needs at least one factor")
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def embed_single(op: np.ndarray, site: int, n_qubits: int) -> np.ndarray:
    """Embed a single-qubit operator at a given site of an n-qubit register.

    ``site`` is 1-based; site 1 is the leftmost tensor factor.
    """
    if not 1 <= site <= n_qubits:
        raise ValueError(f"site {site} outside register 1..{n_qubits}")
    factors = [IDENTITY_2] * n_qubits
    factors[site - 1] = np.asarray(op, dtype=complex)
    return kron_all(*factors)


def n_qubits_of(matrix: np.ndarray) -> int:
    """Number of qubits for a square matrix of dimension 2**n."""
    dim = matrix.shape[0]
    n = dim.bit_length() - 1
    if matrix.shape != (dim, dim) or 2**n != dim:
        raise ValueError(f"matrix shape {matrix.shape} is not a qubit register")
    return n


def partial_trace(rho: np.ndarray, traced_sites, n_qubits: int | None = None) -> np.ndarray:
    """Trace out a subset of qubits, returning the reduced density matrix.

    ``traced_sites`` holds 1-based qubit indices. The remaining qubits keep
    their original order.
    """
    rho = np.asarray(rho)
    if n_qubits is None:
        n_qubits = n_qubits_of(rho)
    traced = sorted(set(int(s) for s in traced_sites))
    if not traced:
        raise ValueError("traced_sites must be nonempty")
    if traced[0] < 1 or traced[-1] > n_qubits:
        raise ValueError(f"traced sites {traced} outside register 1..{n_qubits}")
    if len(traced) >= n_qubits:
        raise ValueError("cannot trace out every qubit")

    tensor = rho.reshape((2,) * (2 * n_qubits))
    row = list(range(n_qubits))
    col = list(range(n_qubits, 2 * n_qubits))
    for s in traced:
        col[s - 1] = row[s - 1]
    kept = [i for i in range(n_qubits) if (i + 1) not in traced]
    out_axes = [row[i] for i in kept] + [col[i] for i in kept]
    reduced = np.einsum(tensor, row + col, out_axes)
    dim = 2 ** len(kept)
    return np.ascontiguousarray(reduced.reshape(dim, dim))


def hermitian_eig(h: np.ndarray, tol: float = HERMITICITY_TOL):
    """Spectral decomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    ``h = V diag(w) V^dag``. Rejects matrices that are not Hermitian within
    ``tol`` (max absolute entry of ``h - h^dag``).
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    defect = np.max(np.abs(h - h.conj().T))
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian: max |h - h^dag| = {defect:.3e}")
    eigenvalues, eigenvectors = np.linalg.eigh(h)
    return eigenvalues, eigenvectors


def unitary_from_hamiltonian(h: np.ndarray, t: float) -> np.ndarray:
    """Time-evolution operator exp(-i h t) via spectral decomposition."""
    w, v = hermitian_eig(h)
    phases = np.exp(-1j * w * t)
    return (v * phases) @ v.conj().T


def expectation(rho: np.ndarray, obs: np.ndarray) -> float:
    """Real expectation value trace(rho @ obs) of a Hermitian observable."""
    rho = np.asarray(rho)
    obs = np.asarray(obs)
    if rho.shape != obs.shape:
        raise ValueError(f"dimension mismatch: state {rho.shape}, observable {obs.shape}")
    value = np.einsum("ij,ji->", rho, obs)
    if abs(value.imag) > 1e-9:
        raise ValueError(f"expectation value has imaginary part {value.imag:.3e}")
    return float(value.real)


def ground_state_density(n_qubits: int) -> np.ndarray:
    """Density matrix of |0...0><0...0| on n qubits."""
    dim = 2**n_qubits
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def basis_state_density(bits: str) -> np.ndarray:
    """Density matrix of a computational basis state, e.g. ``"0101"``."""
    if not bits or any(b not in "01" for b in bits):
        raise ValueError(f"bits must be a nonempty 01-string, got {bits!r}")
    index = int(bits, 2)
    dim = 2 ** len(bits)
    rho = np.zeros((dim, dim), dtype=complex)
    rho[index, index] = 1.0
    return rho


def check_density_matrix(
    rho: np.ndarray,
    herm_tol: float = HERMITICITY_TOL,
    trace_tol: float = TRACE_TOL,
    eig_floor: float = EIGENVALUE_FLOOR,
) -> None:
    """Validate Hermiticity, unit trace and positive semidefiniteness.

    Raises ValueError with the violated property; passes silently otherwise.
    """
    rho = np.asarray(rho)
    defect = np.max(np.abs(rho - rho.conj().T))
    if defect > herm_tol:
        raise ValueError(f"density matrix not Hermitian: deviation {defect:.3e}")
    trace = np.trace(rho)
    if abs(trace - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {trace:.15g} differs from 1")
    smallest = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)[0])
    if smallest < eig_floor:
        raise ValueError(f"density matrix has negative eigenvalue {smallest:.3e}")
