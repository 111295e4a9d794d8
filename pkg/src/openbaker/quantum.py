"""Quantization of the triadic baker map and its opened version.

The Hilbert space has dimension N (effective hbar = 1/(2 pi N)); position
grid points sit at q_n = (n + 1/2)/N, matching the half-integer offsets of
the antiperiodic discrete Fourier transform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classical import Axis, StripRegion, opening, region_R_plus

__all__ = [
    "DiagonalProjector",
    "UnresolvedRegionError",
    "dft_matrix",
    "baker_unitary",
    "projector_for_region",
    "opening_projector",
    "escape_projector",
    "open_propagator",
    "momentum_transform",
    "parity_matrix",
]


class UnresolvedRegionError(ValueError):
    """The grid is too coarse to represent a region exactly."""


@dataclass(frozen=True)
class DiagonalProjector:
    """Diagonal 0/1 projector onto a set of position indices."""

    dim: int
    kept_indices: tuple

    def matrix(self) -> np.ndarray:
        P = np.zeros((self.dim, self.dim), dtype=complex)
        idx = np.asarray(self.kept_indices, dtype=int)
        P[idx, idx] = 1.0
        return P

    def diagonal(self) -> np.ndarray:
        d = np.zeros(self.dim)
        d[np.asarray(self.kept_indices, dtype=int)] = 1.0
        return d

    @property
    def rank(self) -> int:
        return len(self.kept_indices)

    def apply(self, state: np.ndarray) -> np.ndarray:
        out = np.zeros_like(state)
        idx = np.asarray(self.kept_indices, dtype=int)
        out[idx] = state[idx]
        return out


def dft_matrix(N: int) -> np.ndarray:
    """Antiperiodic DFT: F[n,m] = exp(-2 pi i (n+1/2)(m+1/2) / N) / sqrt(N)."""
    if N <= 0:
        raise ValueError("N must be positive")
    n = np.arange(N) + 0.5
    return np.exp(-2j * np.pi * np.outer(n, n) / N) / np.sqrt(N)


def baker_unitary(N: int) -> np.ndarray:
    """Closed baker propagator U_N = F_N^-1 diag(F_{N/3}, F_{N/3}, F_{N/3})."""
    if N % 3 != 0:
        raise ValueError("N must be divisible by 3")
    FN = dft_matrix(N)
    F3 = dft_matrix(N // 3)
    D = np.zeros((N, N), dtype=complex)
    for b in range(3):
        s = b * (N // 3)
        D[s:s + N // 3, s:s + N // 3] = F3
    return FN.conj().T @ D


def projector_for_region(region: StripRegion, N: int) -> DiagonalProjector:
    """Projector onto grid points (n+1/2)/N lying in a vertical strip.

    Raises UnresolvedRegionError when an interval of the region only
    partially covers some grid cell [n/N, (n+1)/N).
    """
    if region.axis is not Axis.POSITION:
        raise ValueError("only vertical (position) strips quantize to diagonal projectors")
    kept = []
    for a, b in region.support.intervals:
        lo, hi = a * N, b * N
        if lo.denominator != 1 or hi.denominator != 1:
            raise UnresolvedRegionError(
                f"interval [{a},{b}) not aligned with the 1/{N} grid"
            )
        kept.extend(range(int(lo), int(hi)))
    return DiagonalProjector(N, tuple(sorted(kept)))


def opening_projector(N: int) -> DiagonalProjector:
    """pi_0: projector onto the opening strip."""
    return projector_for_region(opening(), N)


def escape_projector(m: int, N: int) -> DiagonalProjector:
    """pi_m: projector onto the escape region R_+^m."""
    return projector_for_region(region_R_plus(m), N)


def open_propagator(N: int) -> np.ndarray:
    """Open propagator U_tilde = U_N (I - pi_0): middle third of the columns
    of U_N set to zero."""
    U = baker_unitary(N)
    Ut = U.copy()
    Ut[:, N // 3: 2 * N // 3] = 0.0
    return Ut


def momentum_transform(state: np.ndarray) -> np.ndarray:
    """Map a position-representation vector to the momentum representation."""
    state = np.asarray(state)
    return dft_matrix(state.shape[0]) @ state


def parity_matrix(N: int) -> np.ndarray:
    """Parity n -> N-1-n; commutes with U_N thanks to the half-integer shifts."""
    return np.eye(N)[::-1].astype(complex)


def parity_sector_basis(N: int, sector: str) -> np.ndarray:
    """Orthonormal basis (as columns) of the even or odd parity subspace.

    For odd N the even sector has dimension (N+1)/2 and the odd sector
    (N-1)/2."""
    half = N // 2
    if sector == "even":
        B = np.zeros((N, half + (N % 2)))
        for n in range(half):
            B[n, n] = B[N - 1 - n, n] = 1.0 / np.sqrt(2.0)
        if N % 2:
            B[half, half] = 1.0
        return B
    if sector == "odd":
        B = np.zeros((N, half))
        for n in range(half):
            B[n, n] = 1.0 / np.sqrt(2.0)
            B[N - 1 - n, n] = -1.0 / np.sqrt(2.0)
        return B
    raise ValueError("sector must be 'even' or 'odd'")


def sector_block(U: np.ndarray, sector: str) -> tuple:
    """Restriction of a parity-commuting matrix to one sector.

    Returns (block, basis); eigenvectors of the block lift back to the full
    space as basis @ v."""
    B = parity_sector_basis(U.shape[0], sector)
    return B.T @ U @ B, B
