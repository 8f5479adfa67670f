"""Dense complex-matrix kernels.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Bipartite pure
states carry their local dimensions explicitly; amplitude index ``(a, b)``
maps to ``a * dimB + b`` (row-major), so the amplitude vector reshaped to
``(dimA, dimB)`` is the coefficient matrix ``M`` with
``(X (x) Y)|psi>  <->  X @ M @ Y.T``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import CapacityError, ContractError, SolverError

MAX_DIM = 4096
HERM_TOL = 1e-10
KER_REL_TOL = 1e-9


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ContractError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractError(f"{name} has non-finite entries")
    return a


def check_capacity(rows: int, cols: int, cap: int = MAX_DIM) -> None:
    if rows > cap or cols > cap:
        raise CapacityError(f"{rows}x{cols} exceeds the {cap}x{cap} matrix cap")


def is_hermitian(m: np.ndarray, tol: float = HERM_TOL) -> bool:
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T), initial=0.0) <= tol


def _require_hermitian(m, name="matrix") -> np.ndarray:
    a = as_matrix(m, name)
    if not is_hermitian(a):
        raise ContractError(f"{name} is not Hermitian within {HERM_TOL:g}")
    return a


def kron(a, b, cap: int = MAX_DIM) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    check_capacity(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1], cap)
    return np.kron(a, b)


def kron_all(*mats, cap: int = MAX_DIM) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = kron(out, m, cap=cap)
    return out


def herm_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and unitary eigenvectors of a Hermitian matrix."""
    a = _require_hermitian(m)
    a = 0.5 * (a + a.conj().T)
    try:
        w, v = scipy.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise SolverError(str(exc)) from exc
    return w[::-1].copy(), v[:, ::-1].copy()


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(u, s, v)`` with ``m = u @ diag(s) @ v^dagger``, ``s`` descending."""
    a = as_matrix(m)
    try:
        u, s, vh = scipy.linalg.svd(a, full_matrices=True, lapack_driver="gesvd")
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise SolverError(str(exc)) from exc
    return u, s, vh.conj().T


def kernel_tol(m: np.ndarray) -> float:
    return KER_REL_TOL * np.linalg.norm(m, 2)


def op_abs_signum(m) -> tuple[np.ndarray, np.ndarray]:
    """Operator absolute value ``|M|`` and signum ``M |M|^+`` of a Hermitian matrix.

    Eigenvalues below ``1e-9 * ||M||`` count as zero, so the signum vanishes
    on the (numerical) kernel.
    """
    a = _require_hermitian(m)
    w, v = herm_eig(a)
    tau = kernel_tol(a)
    sign = np.where(np.abs(w) <= tau, 0.0, np.sign(w))
    absval = np.where(np.abs(w) <= tau, 0.0, np.abs(w))
    return (v * absval) @ v.conj().T, (v * sign) @ v.conj().T


def pinv(m) -> np.ndarray:
    a = as_matrix(m)
    return np.linalg.pinv(a, rcond=KER_REL_TOL)


@dataclass(frozen=True)
class BipartiteState:
    dimA: int
    dimB: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.dimA < 1 or self.dimB < 1:
            raise ContractError("state dimensions must be positive")
        if amp.size != self.dimA * self.dimB:
            raise ContractError(
                f"{amp.size} amplitudes do not fit dims {self.dimA}x{self.dimB}"
            )
        if not np.all(np.isfinite(amp)):
            raise ContractError("state has non-finite amplitudes")
        if abs(np.linalg.norm(amp) - 1.0) > 1e-12:
            raise ContractError(f"state norm {np.linalg.norm(amp):.15g} is not 1")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def from_matrix(cls, coeffs, normalize: bool = False) -> "BipartiteState":
        c = np.asarray(coeffs, dtype=complex)
        if normalize:
            c = c / np.linalg.norm(c)
        return cls(c.shape[0], c.shape[1], c.reshape(-1))

    @property
    def matrix(self) -> np.ndarray:
        """Coefficient matrix of shape ``(dimA, dimB)``."""
        return self.amplitudes.reshape(self.dimA, self.dimB)

    def apply(self, a=None, b=None) -> np.ndarray:
        """Coefficient matrix of ``(a (x) b)|psi>``; ``None`` means identity."""
        m = self.matrix
        if a is not None:
            m = a @ m
        if b is not None:
            m = m @ np.asarray(b).T
        return m

    def expect(self, a=None, b=None) -> complex:
        return complex(np.vdot(self.matrix, self.apply(a, b)))


def max_entangled(dim: int) -> BipartiteState:
    return BipartiteState.from_matrix(np.eye(dim) / np.sqrt(dim))


def product_state(*states: BipartiteState) -> BipartiteState:
    """Tensor product regrouped as ``(A1 A2 ...) | (B1 B2 ...)``."""
    m = np.ones((1, 1), dtype=complex)
    for s in states:
        check_capacity(m.shape[0] * s.dimA, m.shape[1] * s.dimB)
        m = np.kron(m, s.matrix)
    return BipartiteState.from_matrix(m)


def partial_trace(state: BipartiteState, keep: str = "A", split=None) -> np.ndarray:
    """Reduced density matrix.

    ``keep`` is ``"A"`` or ``"B"``. With ``keep="AB"`` a ``split`` of
    ``((a1, a2), (b1, b2))`` factors each side as ``X1 (x) X2`` and the
    state of ``A1 B1`` is returned (ordered ``A1 (x) B1``).
    """
    m = state.matrix
    if keep == "A":
        rho = m @ m.conj().T
    elif keep == "B":
        rho = m.T @ m.conj()
    elif keep == "AB":
        if split is None:
            raise ContractError("keep='AB' needs split=((a1, a2), (b1, b2))")
        (a1, a2), (b1, b2) = split
        if a1 * a2 != state.dimA or b1 * b2 != state.dimB:
            raise ContractError(f"split {split} does not match dims {state.dimA}x{state.dimB}")
        t = m.reshape(a1, a2, b1, b2)
        rho = np.einsum("ipjq,kplq->ijkl", t, t.conj()).reshape(a1 * b1, a1 * b1)
    else:
        raise ContractError(f"unknown keep={keep!r}")
    return 0.5 * (rho + rho.conj().T)


def state_norm(coeffs: np.ndarray) -> float:
    """Euclidean norm of a coefficient matrix, i.e. ``|| op |psi> ||``."""
    return float(np.linalg.norm(coeffs))
