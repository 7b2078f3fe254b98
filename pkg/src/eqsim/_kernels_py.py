"""Pure-numpy Pauli kernels. Same signatures as the compiled ``_kernels``.

A Pauli string is passed as ``(x_mask, z_mask, n_y)``; it acts on a basis
state as ``P|b> = i**n_y * (-1)**popcount(b & z_mask) |b ^ x_mask>``.
"""
import numpy as np

_I_POW = (1, 1j, -1, -1j)


def _phases(dim, z_mask, n_y):
    idx = np.arange(dim, dtype=np.int64)
    parity = np.bitwise_count(idx & z_mask) & 1
    return idx, _I_POW[n_y % 4] * (1 - 2 * parity.astype(np.float64))


def apply_pauli(psi, x_mask, z_mask, n_y):
    """Return ``P @ psi`` for a vector."""
    idx, ph = _phases(psi.shape[0], z_mask, n_y)
    return (ph * psi)[idx ^ x_mask]


def rotate_vec(psi, x_mask, z_mask, n_y, angle):
    """In place: ``psi <- exp(-i*angle*P) psi``."""
    c, s = np.cos(angle), np.sin(angle)
    ppsi = apply_pauli(psi, x_mask, z_mask, n_y)
    psi *= c
    psi -= 1j * s * ppsi


def rotate_dm(rho, x_mask, z_mask, n_y, angle):
    """In place: ``rho <- U rho U^dag`` with ``U = exp(-i*angle*P)``."""
    c, s = np.cos(angle), np.sin(angle)
    idx, ph = _phases(rho.shape[0], z_mask, n_y)
    perm = idx ^ x_mask
    p_rho = (ph[:, None] * rho)[perm, :]
    rho_p = rho[:, perm] * ph[None, :]
    p_rho_p = (ph[:, None] * rho_p)[perm, :]
    rho *= c * c
    rho += 1j * c * s * (rho_p - p_rho)
    rho += s * s * p_rho_p


def expect_vec(psi, x_mask, z_mask, n_y):
    """``<psi|P|psi>`` as a complex number."""
    return complex(np.vdot(psi, apply_pauli(psi, x_mask, z_mask, n_y)))


def expect_dm(rho, x_mask, z_mask, n_y):
    """``Tr(rho P)`` as a complex number."""
    idx, ph = _phases(rho.shape[0], z_mask, n_y)
    return complex(np.sum(rho[idx, idx ^ x_mask] * ph))


def depolarize(rho, keep):
    """In place: ``rho <- keep*rho + (1-keep)*I/d``."""
    d = rho.shape[0]
    rho *= keep
    rho[np.diag_indices(d)] += (1.0 - keep) / d
