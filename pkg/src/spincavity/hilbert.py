"""Driven V-scheme master equation on a truncated atom x Fock space.

The Hilbert space is spanned by |atom> x |n> with atom in
{ground, excited3, excited4} and n = 0 .. fock_dim-1; the flat index is
atom * fock_dim + n. Transition 3 is the higher-frequency line of the
spin-down doublet (frequency omega_x), transition 4 sits delta_h below
it. Both couple to a common cavity mode at omega_c.

In the frame rotating at the probe frequency the Hamiltonian is

    H/hbar = Dc a'a + D3 s3's3 + D4 s4's4
             + i g3 (a s3' - s3 a') + g4 (a s4' + s4 a')
             + eps (a + a')

with Dc = omega_c - omega, D3 = omega_x - omega,
D4 = omega_x - delta_h - omega, and a weak coherent probe drive eps.
Dissipation enters through the Lindblad terms

    kappa D(a) + gamma3 D(s3) + gamma4 D(s4)
    + 2 gamma_d3 D(s3's3) + 2 gamma_d4 D(s4's4),

where D(O)rho = O rho O' - {O'O, rho}/2. All user-facing rates and
frequencies are quoted values (value/2pi in GHz); internally one global
multiplication by 2pi converts them to angular units (rad/ns, with time
measured in ns).

The i g3 coupling phase is a pure gauge choice: conjugating the atomic
basis maps it to a real coupling without changing any observable. The
``real_g3`` flag of the builders switches to the real convention so the
equivalence can be asserted numerically.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import DomainError, ModelError, NumericalError, StateError
from .physcalc import TWO_PI

DEFAULT_FOCK_DIM = 4

# Density-matrix invariant tolerances.
HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = -1e-8
# steady_state escalates to a model error only below this.
_POSITIVITY_FAIL = -1e-6
_RESIDUAL_REL = 1e-9
_COND_LIMIT = 1e14


@dataclass(frozen=True)
class SystemParams:
    """All rates and frequencies of the coupled dot-cavity system.

    Rates and frequencies are value/2pi in GHz. ``drive_amp`` is the
    coherent probe amplitude; it defaults to kappa/100, which keeps the
    system deep in linear response. ``fock_dim`` is the photon-number
    cutoff (occupied levels 0 .. fock_dim-1).
    """

    kappa: float
    g3: float
    g4: float
    gamma_d3: float
    gamma_d4: float
    omega_c: float
    omega_x: float
    delta_h: float
    gamma3: float = 0.1
    gamma4: float = 0.1
    drive_amp: float | None = None
    fock_dim: int = DEFAULT_FOCK_DIM

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")
        for name in ("g3", "g4", "gamma3", "gamma4", "gamma_d3", "gamma_d4"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not (isinstance(self.fock_dim, (int, np.integer)) and self.fock_dim >= 2):
            raise DomainError(f"fock_dim must be an integer >= 2, got {self.fock_dim}")
        if self.drive_amp is None:
            object.__setattr__(self, "drive_amp", self.kappa / 100.0)
        if self.drive_amp < 0:
            raise DomainError(f"drive_amp must be >= 0, got {self.drive_amp}")
        if self.drive_amp > self.kappa / 10.0:
            warnings.warn(
                "drive_amp exceeds kappa/10; linear-response comparisons "
                "with the closed-form spectra will degrade", stacklevel=2)

    @property
    def dim(self) -> int:
        return 3 * self.fock_dim


@lru_cache(maxsize=16)
def _operators(fock_dim: int):
    """(a, sigma3, sigma4) on the full space, cached read-only."""
    a_fock = np.diag(np.sqrt(np.arange(1, fock_dim, dtype=float)), 1).astype(complex)
    a = np.kron(np.eye(3), a_fock)
    m3 = np.zeros((3, 3), dtype=complex)
    m3[0, 1] = 1.0   # |ground><excited3|
    m4 = np.zeros((3, 3), dtype=complex)
    m4[0, 2] = 1.0   # |ground><excited4|
    s3 = np.kron(m3, np.eye(fock_dim))
    s4 = np.kron(m4, np.eye(fock_dim))
    for op in (a, s3, s4):
        op.setflags(write=False)
    return a, s3, s4


def annihilation_operator(fock_dim: int) -> np.ndarray:
    """Cavity annihilation operator on the full atom x Fock space."""
    return _operators(fock_dim)[0].copy()


def lowering_operator(which: int, fock_dim: int) -> np.ndarray:
    """Atomic lowering operator for transition 3 or 4."""
    if which not in (3, 4):
        raise DomainError(f"transition index must be 3 or 4, got {which}")
    return _operators(fock_dim)[1 if which == 3 else 2].copy()


def number_operator(fock_dim: int) -> np.ndarray:
    """Photon-number operator a'a on the full space."""
    return np.kron(np.eye(3), np.diag(np.arange(fock_dim, dtype=float))).astype(complex)


def build_hamiltonian(params: SystemParams, probe_freq: float,
                      real_g3: bool = False) -> np.ndarray:
    """Hamiltonian (angular units, rad/ns) in the probe rotating frame."""
    a, s3, s4 = _operators(params.fock_dim)
    ad = a.conj().T
    h = TWO_PI * (
        (params.omega_c - probe_freq) * (ad @ a)
        + (params.omega_x - probe_freq) * (s3.conj().T @ s3)
        + (params.omega_x - params.delta_h - probe_freq) * (s4.conj().T @ s4)
        + params.g4 * (a @ s4.conj().T + s4 @ ad)
        + params.drive_amp * (a + ad)
    )
    if real_g3:
        h = h + TWO_PI * params.g3 * (a @ s3.conj().T + s3 @ ad)
    else:
        h = h + 1j * TWO_PI * params.g3 * (a @ s3.conj().T - s3 @ ad)
    return h


def _dissipator(op: np.ndarray, rate_angular: float) -> np.ndarray:
    """Column-major vectorized Lindblad dissipator rate * D(op)."""
    d = op.shape[0]
    eye = np.eye(d)
    opdop = op.conj().T @ op
    return rate_angular * (
        np.kron(op.conj(), op)
        - 0.5 * np.kron(eye, opdop)
        - 0.5 * np.kron(opdop.T, eye)
    )


def build_liouvillian(params: SystemParams, probe_freq: float,
                      real_g3: bool = False) -> np.ndarray:
    """Generator L with d vec(rho)/dt = L vec(rho), column-major vec."""
    h = build_hamiltonian(params, probe_freq, real_g3=real_g3)
    d = h.shape[0]
    eye = np.eye(d)
    liou = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    a, s3, s4 = _operators(params.fock_dim)
    liou += _dissipator(a, TWO_PI * params.kappa)
    if params.gamma3:
        liou += _dissipator(s3, TWO_PI * params.gamma3)
    if params.gamma4:
        liou += _dissipator(s4, TWO_PI * params.gamma4)
    if params.gamma_d3:
        liou += _dissipator(s3.conj().T @ s3, 2.0 * TWO_PI * params.gamma_d3)
    if params.gamma_d4:
        liou += _dissipator(s4.conj().T @ s4, 2.0 * TWO_PI * params.gamma_d4)
    return liou


def _trace_vector(d: int) -> np.ndarray:
    """Row functional t with t @ vec(rho) = Tr rho (column-major vec)."""
    t = np.zeros(d * d, dtype=complex)
    t[np.arange(d) * d + np.arange(d)] = 1.0
    return t


def validate_density_matrix(rho: np.ndarray) -> None:
    """Check hermiticity, unit trace and numerical positivity."""
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > HERMITICITY_TOL:
        raise StateError(f"density matrix not hermitian: defect {herm:.3e}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > TRACE_TOL:
        raise StateError(f"density matrix trace {tr} != 1")
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    if min_eig < POSITIVITY_TOL:
        raise StateError(f"density matrix not positive: min eigenvalue {min_eig:.3e}")


def steady_state(params: SystemParams, probe_freq: float,
                 real_g3: bool = False) -> np.ndarray:
    """Unique steady state of the driven damped system.

    Solves L vec(rho) = 0 with one row of the (singular) generator
    replaced by the trace-normalization equation, using a dense LU solve
    plus one step of iterative refinement. The result is symmetrized and
    exactly trace-normalized before the invariant checks run.
    """
    liou = build_liouvillian(params, probe_freq, real_g3=real_g3)
    d = params.dim
    m = liou.copy()
    m[0, :] = _trace_vector(d)
    b = np.zeros(d * d, dtype=complex)
    b[0] = 1.0
    try:
        x = np.linalg.solve(m, b)
        x += np.linalg.solve(m, b - m @ x)
    except np.linalg.LinAlgError as exc:
        cond = float(np.linalg.cond(m))
        raise NumericalError(
            f"steady-state solve failed ({exc}); condition estimate {cond:.3e}",
            condition_estimate=cond) from exc

    residual = float(np.linalg.norm(liou @ x))
    scale = float(np.linalg.norm(liou))
    if residual > _RESIDUAL_REL * scale:
        cond = float(np.linalg.cond(m))
        if cond > _COND_LIMIT or not math.isfinite(cond):
            raise NumericalError(
                f"ill-conditioned steady-state solve: residual {residual:.3e} "
                f"vs norm {scale:.3e}, condition estimate {cond:.3e}",
                condition_estimate=cond)
        raise NumericalError(
            f"steady-state residual {residual:.3e} exceeds {_RESIDUAL_REL} * "
            f"norm {scale:.3e}", condition_estimate=cond)

    rho = x.reshape((d, d), order="F")
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real

    min_eig = float(np.linalg.eigvalsh(rho)[0])
    if min_eig < _POSITIVITY_FAIL:
        raise ModelError(
            f"steady state has min eigenvalue {min_eig:.3e}; the Fock cutoff "
            f"fock_dim={params.fock_dim} is too small for this drive")
    return rho


def expectation_photon_number(rho: np.ndarray) -> float:
    """Tr(rho a'a); validates the state first."""
    d = rho.shape[0]
    if rho.ndim != 2 or rho.shape != (d, d) or d % 3 != 0:
        raise StateError(f"expected a square matrix on a 3*fock_dim space, got {rho.shape}")
    validate_density_matrix(rho)
    value = complex(np.trace(rho @ number_operator(d // 3)))
    if abs(value.imag) > 1e-10:
        raise StateError(f"photon number has imaginary part {value.imag:.3e}")
    return max(value.real, 0.0)


def expectation_cavity_amplitude(rho: np.ndarray) -> complex:
    """Coherent cavity amplitude Tr(rho a)."""
    d = rho.shape[0]
    if rho.ndim != 2 or rho.shape != (d, d) or d % 3 != 0:
        raise StateError(f"expected a square matrix on a 3*fock_dim space, got {rho.shape}")
    a, _, _ = _operators(d // 3)
    return complex(np.trace(rho @ a))


def ground_state(fock_dim: int) -> np.ndarray:
    """|ground, 0><ground, 0| on the full space."""
    d = 3 * fock_dim
    rho = np.zeros((d, d), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def time_evolve_oracle(params: SystemParams, probe_freq: float, t_final: float,
                       dt: float | None = None, rho0: np.ndarray | None = None,
                       real_g3: bool = False) -> np.ndarray:
    """Brute-force steady-state oracle: explicit RK4 integration to t_final.

    Integrates d vec(rho)/dt = L vec(rho) with a fixed-step classical
    Runge-Kutta scheme. Because the flow is linear, the exact kernel of L
    is a fixed point of the RK4 map, so for long times the result
    converges to the true steady state with no truncation-error floor.
    The default step is chosen from the 1-norm of L, which bounds its
    spectral radius and keeps RK4 inside its stability region.

    Time is in ns (1/GHz). t_final must be at least 20/kappa.
    """
    if t_final < 20.0 / params.kappa:
        raise DomainError(
            f"t_final={t_final} is below 20/kappa={20.0 / params.kappa}; "
            "the oracle contract needs many cavity lifetimes")
    liou = build_liouvillian(params, probe_freq, real_g3=real_g3)
    d = params.dim
    if dt is None:
        scale = float(np.linalg.norm(liou, 1))
        dt = 2.0 / scale if scale > 0 else t_final / 100.0
    if dt <= 0 or not math.isfinite(dt):
        raise NumericalError(f"invalid integration step dt={dt}")
    n_steps = int(math.ceil(t_final / dt))
    if n_steps > 50_000_000:
        raise NumericalError(
            f"step size dt={dt:.3e} underflows the time span: {n_steps} steps")
    dt = t_final / n_steps

    if rho0 is None:
        rho0 = ground_state(params.fock_dim)
    v = rho0.reshape(-1, order="F").astype(complex)
    for _ in range(n_steps):
        k1 = liou @ v
        k2 = liou @ (v + 0.5 * dt * k1)
        k3 = liou @ (v + 0.5 * dt * k2)
        k4 = liou @ (v + dt * k3)
        v = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    rho = v.reshape((d, d), order="F")
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def fock_convergence_shift(params: SystemParams, probe_freq: float,
                           extra: int = 2) -> float:
    """Relative photon-number change when the Fock cutoff grows by ``extra``.

    A shift above 1e-3 at drive_amp <= kappa/20 means the truncation is
    not converged and fock_dim should be raised.
    """
    n0 = expectation_photon_number(steady_state(params, probe_freq))
    bigger = replace(params, fock_dim=params.fock_dim + extra)
    n1 = expectation_photon_number(steady_state(bigger, probe_freq))
    if n1 == 0.0:
        return 0.0
    return abs(n1 - n0) / n1


def bare_cavity_params(params: SystemParams) -> SystemParams:
    """Same system with both couplings removed (spin-up response)."""
    return replace(params, g3=0.0, g4=0.0)
