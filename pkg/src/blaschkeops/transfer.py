"""Weighted preimage-sum operator attached to a finite Blaschke product.

For a degree-n product R the operator averages a function over the n circle
preimages of a point with the positive weights ``h(z)/n = R(z)/(z R'(z))``,
fixes constants, and intertwines multiplication:
``L((a o R) b) = a L(b)``.  On analytic functions it acts as the adjoint of
the composition operator, which is what :func:`transfer_matrix` truncates.

Everything here is evaluated strictly through preimage sums, never through
matrix truncation, so the matrix models in :mod:`blaschkeops.hardy` can be
tested against an independent route.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .blaschke import BlaschkeProduct, preimage_grid
from .circle import CircleGrid, FourierSymbol, fft
from .hardy import TruncatedOperator


@lru_cache(maxsize=16)
def _preimage_table(product: BlaschkeProduct, grid: CircleGrid):
    """Preimage points and weights over all grid targets; arrays are read-only."""
    points, _ = preimage_grid(product, grid.points)
    weights = 1.0 / product._log_derivative_at(points)
    points.setflags(write=False)
    weights.setflags(write=False)
    return points, weights


@dataclass(frozen=True)
class TransferOperator:
    """Preimage-averaging operator of a fixed Blaschke product."""

    product: BlaschkeProduct

    @property
    def degree(self) -> int:
        return self.product.degree

    def apply(self, f, w: complex) -> complex:
        """Value ``L(f)(w) = sum_i weight_i f(z_i)`` over the preimages of w."""
        points = np.asarray(self.product.preimages(w).points)
        weights = 1.0 / self.product._log_derivative_at(points)
        return complex(np.sum(weights * np.asarray(f(points), dtype=complex)))

    def apply_samples(self, f, grid: CircleGrid) -> np.ndarray:
        """Values of ``L(f)`` at every grid point, sharing one preimage solve."""
        points, weights = _preimage_table(self.product, grid)
        return np.sum(weights * np.asarray(f(points), dtype=complex), axis=1)

    def symbol_image(self, f, grid: CircleGrid) -> FourierSymbol:
        """Fourier coefficients of ``L(f)`` extracted on the grid."""
        values = self.apply_samples(f, grid)
        m = grid.size
        spectrum = fft(values) / m
        return FourierSymbol(
            {(k if k <= m // 2 else k - m): complex(spectrum[k]) for k in range(m)}
        )


def partial_fraction_weights(product: BlaschkeProduct, w: complex) -> np.ndarray:
    """The n positive weights ``R(z)/(z R'(z))`` over the preimages of w.

    These are the residues of ``(R(z)/z)/(R(z) - w)`` at its simple poles;
    they sum to one, which is exactly why the operator fixes constants.
    Ordered like :meth:`BlaschkeProduct.preimages` (by principal argument).
    """
    points = np.asarray(product.preimages(w).points)
    return 1.0 / product._log_derivative_at(points)


def covariance_check(op: TransferOperator, a, b, w: complex) -> float:
    """Pointwise residual ``|L((a o R) b)(w) - a(w) L(b)(w)|``."""
    product = op.product
    lhs = op.apply(lambda z: np.asarray(a(product.evaluate(z))) * np.asarray(b(z)), w)
    rhs = complex(a(np.asarray(w, dtype=complex))) * op.apply(b, w)
    return abs(lhs - rhs)


def bimodule_inner(op: TransferOperator, p, q, w: complex) -> complex:
    """Weighted pairing ``sum_z h(z) conj(p(z)) q(z)`` over the preimages of w.

    Equals ``n * L(conj(p) q)(w)``; with ``p = q = 1/sqrt(n)`` it is one.
    """
    points = np.asarray(op.product.preimages(w).points)
    h = op.degree / op.product._log_derivative_at(points)
    vals = h * np.conj(np.asarray(p(points), dtype=complex)) * np.asarray(q(points), dtype=complex)
    return complex(np.sum(vals))


def bimodule_inner_samples(op: TransferOperator, p, q, grid: CircleGrid) -> np.ndarray:
    """Values of the weighted pairing at every grid point."""
    points, weights = _preimage_table(op.product, grid)
    vals = np.conj(np.asarray(p(points), dtype=complex)) * np.asarray(q(points), dtype=complex)
    return op.degree * np.sum(weights * vals, axis=1)


def transfer_matrix(op: TransferOperator, n_trunc: int, grid: CircleGrid) -> TruncatedOperator:
    """Truncation of the operator to ``span{1, z, ..., z^(N-1)}``.

    Column j holds the first N Fourier coefficients of ``L(z^j)``, extracted
    on the grid from preimage sums.  Requires ``N <= grid.size / 4`` so the
    coefficient extraction stays alias-free.
    """
    m = grid.size
    if n_trunc > m // 4:
        raise ValueError("truncation size must not exceed a quarter of the grid")
    points, weights = _preimage_table(op.product, grid)
    rows = np.empty((n_trunc, m), dtype=complex)
    power = np.ones_like(points)
    for j in range(n_trunc):
        rows[j] = np.sum(weights * power, axis=1)
        power = power * points
    spectra = fft(rows) / m
    entries = spectra[:, :n_trunc].T
    return TruncatedOperator(entries=entries, label="L_R")
