"""Exact finite-dimensional model of self-adjoint extensions and their Kreĭn resolvents

The Hilbert space H is C^dim_H with the standard inner product and the trace
space h is C^dim_h.  The dual space h' shares the coordinates of h and is paired
with it through the inverse Gram matrix, so the duality mapping J: h -> h' is
the Gram matrix itself:

    <phi, psi>_{h',h} = phi^H gram^{-1} psi

Primed operators are therefore gram-conjugations (Pi' = gram Pi gram^{-1}).
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from .exceptions import BlockSingularError, SingularShiftError

logger = logging.getLogger(__name__)

SINGULAR_RELATIVE_THRESHOLD = 1e-10
RESOLVENT_NORM_LIMIT = 1e12


def _hermitian_defect(matrix: np.ndarray) -> float:
    """Largest entry of matrix - matrix^H"""
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.conj().T)))


@dataclass
class AbstractModel:
    """Finite-dimensional (A, tau, gram, lambda0) tuple"""

    A: np.ndarray
    tau: np.ndarray
    gram: np.ndarray
    lambda0: float

    dim_H: int = field(init=False)
    dim_h: int = field(init=False)

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        self.tau = np.atleast_2d(np.asarray(self.tau, dtype=complex))
        self.gram = np.atleast_2d(np.asarray(self.gram, dtype=complex))
        self.lambda0 = float(self.lambda0)
        self.dim_H = self.A.shape[0]
        self.dim_h = self.tau.shape[0]

        if self.A.shape != (self.dim_H, self.dim_H):
            raise ValueError(f"Invalid operator shape {self.A.shape}. Must be square")
        if self.tau.shape[1] != self.dim_H:
            raise ValueError(f"Invalid trace map shape {self.tau.shape}. Must have {self.dim_H} columns")
        if self.gram.shape != (self.dim_h, self.dim_h):
            raise ValueError(f"Invalid gram shape {self.gram.shape}. Must be {self.dim_h}x{self.dim_h}")

        scale = max(1.0, float(np.max(np.abs(self.A))))
        if _hermitian_defect(self.A) > 1e-14 * scale:
            raise ValueError("Invalid operator. A must be Hermitian")

        singular_values = linalg.svdvals(self.tau)
        if self.dim_h > self.dim_H or singular_values[-1] <= 1e-10 * singular_values[0]:
            raise ValueError("Invalid trace map. tau must have full row rank")

        if _hermitian_defect(self.gram) > 1e-14 * max(1.0, float(np.max(np.abs(self.gram)))):
            raise ValueError("Invalid gram. Must be Hermitian")
        if np.min(linalg.eigvalsh(self.gram)) <= 0.0:
            raise ValueError("Invalid gram. Must be positive definite")

        spectrum = linalg.eigvalsh(self.A)
        if np.min(np.abs(spectrum - self.lambda0)) <= 1e-8:
            raise ValueError(f"Invalid lambda0 {self.lambda0}. Must lie in the resolvent set of A")

    @property
    def gram_inverse(self) -> np.ndarray:
        """Matrix of the h'-h pairing"""
        return linalg.inv(self.gram)

    def spectrum(self) -> np.ndarray:
        """Eigenvalues of A in ascending order"""
        return linalg.eigvalsh(self.A)

    def resolvent(self, z: complex) -> np.ndarray:
        """Free resolvent R_z = (-A + z)^{-1}"""
        shifted = z * np.eye(self.dim_H) - self.A
        distance = float(np.min(np.abs(self.spectrum() - z)))
        if distance == 0.0 or 1.0 / distance > RESOLVENT_NORM_LIMIT:
            raise SingularShiftError(
                f"Spectral parameter {z} is within {distance:.3e} of the spectrum of A",
                resolvent_norm=np.inf if distance == 0.0 else 1.0 / distance,
            )
        return linalg.solve(shifted, np.eye(self.dim_H))

    def pairing(self, phi: np.ndarray, psi: np.ndarray) -> complex:
        """Duality pairing <phi, psi>_{h',h}"""
        return complex(np.vdot(phi, linalg.solve(self.gram, psi)))


@dataclass
class ExtensionParams:
    """(Pi, Theta) pair labelling a self-adjoint extension"""

    Pi: np.ndarray
    Theta: np.ndarray
    gram: np.ndarray

    def __post_init__(self):
        self.Pi = np.atleast_2d(np.asarray(self.Pi, dtype=complex))
        self.Theta = np.atleast_2d(np.asarray(self.Theta, dtype=complex))
        self.gram = np.atleast_2d(np.asarray(self.gram, dtype=complex))

        if _hermitian_defect(self.Pi) > 1e-14 or np.max(np.abs(self.Pi @ self.Pi - self.Pi), initial=0.0) > 1e-14:
            raise ValueError("Invalid projection. Pi must be Hermitian and idempotent")

        theta_tilde = self.theta_tilde
        scale = max(1.0, float(np.max(np.abs(theta_tilde), initial=0.0)))
        if _hermitian_defect(theta_tilde) > 1e-12 * scale:
            raise ValueError("Invalid Theta. Theta*gram must be Hermitian")
        if np.max(np.abs(self.Pi @ theta_tilde @ self.Pi - theta_tilde), initial=0.0) > 1e-12 * scale:
            raise ValueError("Invalid Theta. Theta*gram must act on ran(Pi)")

    @classmethod
    def from_theta_tilde(cls, Pi: np.ndarray, theta_tilde: np.ndarray, gram: np.ndarray) -> "ExtensionParams":
        """Build Theta = theta_tilde * gram^{-1} from a Hermitian operator on ran(Pi)"""
        gram = np.atleast_2d(np.asarray(gram, dtype=complex))
        theta = np.asarray(theta_tilde, dtype=complex) @ linalg.inv(gram)
        return cls(Pi=Pi, Theta=theta, gram=gram)

    @property
    def theta_tilde(self) -> np.ndarray:
        """Theta composed with the duality mapping"""
        return self.Theta @ self.gram

    @property
    def Pi_dual(self) -> np.ndarray:
        """Dual projection Pi' acting on h'"""
        return self.gram @ self.Pi @ linalg.inv(self.gram)

    def range_basis(self) -> np.ndarray:
        """Orthonormal basis of ran(Pi)"""
        if np.allclose(self.Pi, 0.0):
            return np.zeros((self.Pi.shape[0], 0), dtype=complex)
        return linalg.orth(self.Pi)


def gamma_field(model: AbstractModel, z: complex) -> np.ndarray:
    """G_z = R_z tau^H gram^{-1}, the adjoint of tau R_{conj z} through the pairing"""
    return model.resolvent(z) @ model.tau.conj().T @ model.gram_inverse


def _trace_difference(model: AbstractModel, z: complex) -> np.ndarray:
    """N_z = tau (R_lambda0 - R_z) tau^H, so that M_z = N_z gram^{-1}"""
    difference = model.resolvent(model.lambda0) - model.resolvent(z)
    return model.tau @ difference @ model.tau.conj().T


def weyl_operator(model: AbstractModel, z: complex) -> np.ndarray:
    """M_z = tau (G_lambda0 - G_z)"""
    return model.tau @ (gamma_field(model, model.lambda0) - gamma_field(model, z))


def weyl_operator_product_form(model: AbstractModel, z: complex) -> np.ndarray:
    """M_z written as (z - lambda0) J G_lambda0^H G_z"""
    g_ref = gamma_field(model, model.lambda0)
    return (z - model.lambda0) * model.gram @ g_ref.conj().T @ gamma_field(model, z)


def _reduced_block(model: AbstractModel, params: ExtensionParams, z: complex) -> Tuple[np.ndarray, np.ndarray]:
    """Basis U of ran(Pi) and the block U^H (Theta~ + N_z) U"""
    basis = params.range_basis()
    block = basis.conj().T @ (params.theta_tilde + _trace_difference(model, z)) @ basis
    if basis.shape[1] > 0:
        singular_values = linalg.svdvals(block)
        if singular_values[-1] <= SINGULAR_RELATIVE_THRESHOLD * max(singular_values[0], 1.0):
            raise BlockSingularError(
                f"Theta + Pi M_z Pi' is singular at z = {z}",
                sigma_min=float(singular_values[-1]),
                sigma_max=float(singular_values[0]),
            )
    return basis, block


def boundary_density(model: AbstractModel, params: ExtensionParams, z: complex, f: np.ndarray) -> np.ndarray:
    """phi = (Theta + Pi M_z Pi')^{-1} Pi tau R_z f, an element of ran(Pi')"""
    basis, block = _reduced_block(model, params, z)
    if basis.shape[1] == 0:
        return np.zeros(model.dim_h, dtype=complex)
    rhs = basis.conj().T @ (model.tau @ (model.resolvent(z) @ f))
    coefficients = linalg.solve(block, rhs)
    return model.gram @ (basis @ coefficients)


def krein_resolvent_matrix(model: AbstractModel, params: ExtensionParams, z: complex) -> np.ndarray:
    """R_z + G_z Pi' (Theta + Pi M_z Pi')^{-1} Pi tau R_z"""
    resolvent = model.resolvent(z)
    basis, block = _reduced_block(model, params, z)
    if basis.shape[1] == 0:
        return resolvent
    left = resolvent @ model.tau.conj().T @ basis
    right = basis.conj().T @ model.tau @ resolvent
    return resolvent + left @ linalg.solve(block, right)


def krein_decomposition(model: AbstractModel, params: ExtensionParams, z: complex,
                        f: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split u = R(z) f as u0 + G_lambda0 phi; returns (u, u0, phi)"""
    phi = boundary_density(model, params, z, f)
    u = model.resolvent(z) @ f + gamma_field(model, z) @ phi
    u0 = u - gamma_field(model, model.lambda0) @ phi
    return u, u0, phi


@dataclass
class CompressedForm:
    """Operator of a Hermitian form restricted to ran(Pi), in an orthonormal basis"""

    basis: np.ndarray
    matrix: np.ndarray

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def as_operator(self) -> np.ndarray:
        """Embed back into the ambient space as U M U^H"""
        return self.basis @ self.matrix @ self.basis.conj().T

    def quadratic_form(self, x: np.ndarray) -> complex:
        """<Theta_Pi x, x> for x in ran(Pi)"""
        return complex(np.vdot(x, self.as_operator() @ x))

    def eigenvalues(self) -> np.ndarray:
        return linalg.eigvalsh(self.matrix)


def compress_form(theta_tilde: np.ndarray, Pi: np.ndarray,
                  basis: Optional[np.ndarray] = None) -> CompressedForm:
    """Compress the form of a Hermitian operator to ran(Pi)"""
    theta_tilde = np.atleast_2d(np.asarray(theta_tilde, dtype=complex))
    Pi = np.atleast_2d(np.asarray(Pi, dtype=complex))

    scale = max(1.0, float(np.max(np.abs(theta_tilde), initial=0.0)))
    if _hermitian_defect(theta_tilde) > 1e-10 * scale:
        raise ValueError("Invalid form. theta_tilde must be Hermitian")
    if _hermitian_defect(Pi) > 1e-12 or np.max(np.abs(Pi @ Pi - Pi), initial=0.0) > 1e-12:
        raise ValueError("Invalid projection. Pi must be an orthogonal projection")

    if basis is None:
        values, vectors = linalg.eigh(Pi)
        basis = vectors[:, values > 0.5]
    else:
        basis = np.atleast_2d(np.asarray(basis, dtype=complex))
        if np.max(np.abs(Pi @ basis - basis), initial=0.0) > 1e-12:
            raise ValueError("Invalid basis. Columns must lie in ran(Pi)")

    matrix = basis.conj().T @ theta_tilde @ basis
    matrix = 0.5 * (matrix + matrix.conj().T)
    logger.debug("Compressed %dx%d form to rank %d", theta_tilde.shape[0], theta_tilde.shape[1], basis.shape[1])
    return CompressedForm(basis=basis, matrix=matrix)


def random_model(rng: np.random.Generator, dim_H: int, dim_h: int) -> AbstractModel:
    """Random model with Hermitian A, orthonormal-row tau and gram = C C^H + 0.1 I"""
    if dim_h > dim_H:
        raise ValueError(f"Invalid dimensions. dim_h ({dim_h}) must not exceed dim_H ({dim_H})")

    def complex_normal(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    B = complex_normal(dim_H, dim_H)
    A = B + B.conj().T
    q, _ = linalg.qr(complex_normal(dim_H, dim_H))
    tau = q[:dim_h, :]
    C = complex_normal(dim_h, dim_h)
    gram = C @ C.conj().T + 0.1 * np.eye(dim_h)
    gram = 0.5 * (gram + gram.conj().T)
    lambda0 = float(np.max(linalg.eigvalsh(A))) + 1.0
    return AbstractModel(A=A, tau=tau, gram=gram, lambda0=lambda0)


def random_extension(rng: np.random.Generator, model: AbstractModel, rank: int) -> ExtensionParams:
    """Random (Pi, Theta) with Pi of the given rank and Theta~ Hermitian on ran(Pi)"""
    dim_h = model.dim_h
    if rank == 0:
        zero = np.zeros((dim_h, dim_h), dtype=complex)
        return ExtensionParams(Pi=zero, Theta=zero, gram=model.gram)

    raw = rng.standard_normal((dim_h, rank)) + 1j * rng.standard_normal((dim_h, rank))
    basis, _ = linalg.qr(raw, mode="economic")
    Pi = basis @ basis.conj().T
    Pi = 0.5 * (Pi + Pi.conj().T)

    small = rng.standard_normal((rank, rank)) + 1j * rng.standard_normal((rank, rank))
    small = small + small.conj().T
    theta_tilde = basis @ small @ basis.conj().T
    theta_tilde = 0.5 * (theta_tilde + theta_tilde.conj().T)
    return ExtensionParams.from_theta_tilde(Pi, theta_tilde, model.gram)
