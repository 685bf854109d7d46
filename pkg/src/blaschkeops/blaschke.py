"""Finite Blaschke products fixing the origin, and their circle geometry.

A degree-n product ``lambda * prod_k (z - z_k)/(1 - conj(z_k) z)`` with
``z_0 = 0`` maps the closed unit disk to itself and the unit circle onto
itself n-to-1.  This module provides evaluation, differentiation, the
logarithmic derivative on the circle (a strictly positive real quantity),
the normalised expansion weight ``h = n / (z R'/R)`` and a simultaneous
root solver for the n circle preimages of a circle point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# |phase| has to sit this close to 1 at construction time.
_UNIT_TOL = 1e-12
# Aberth stopping threshold on the largest root move, and iteration cap.
_ROOT_STEP_TOL = 1e-13
_ROOT_MAX_ITER = 60
_NEWTON_POLISH_STEPS = 3
# Post-hoc acceptance thresholds for a preimage solve.
_RESIDUAL_TOL = 1e-9
_CIRCLE_TOL = 1e-9
_SEPARATION_TOL = 1e-12
# Target must sit this close to the circle before we attempt a solve.
_TARGET_TOL = 1e-8


class ConvergenceError(RuntimeError):
    """An iterative numerical procedure failed to reach its tolerance."""


@dataclass(frozen=True)
class PreimageSet:
    """The n circle solutions of ``R(z) = target``, sorted by principal argument.

    ``residuals[i]`` records ``|R(points[i]) - target)|`` as solved; the
    constructor re-checks the structural invariants (distinct points, all on
    the unit circle).
    """

    target: complex
    points: tuple[complex, ...]
    residuals: tuple[float, ...]

    def __post_init__(self):
        pts = np.asarray(self.points)
        if len(pts) < 2:
            raise ValueError("a preimage set holds at least two points")
        if np.max(np.abs(np.abs(pts) - 1.0)) > _CIRCLE_TOL:
            raise ValueError("preimage points must lie on the unit circle")
        diff = pts[:, None] - pts[None, :]
        diff[np.diag_indices(len(pts))] = 1.0
        if np.min(np.abs(diff)) <= _SEPARATION_TOL:
            raise ValueError("preimage points must be pairwise distinct")


@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product with ``zeros[0] = 0`` and degree >= 2.

    The phase is renormalised to exact unit modulus at construction.  All
    methods accept scalars or numpy arrays of complex arguments and are pure,
    so instances can be shared freely between threads.
    """

    phase: complex
    zeros: tuple[complex, ...]

    def __post_init__(self):
        zeros = tuple(complex(z) for z in self.zeros)
        if len(zeros) < 2:
            raise ValueError("degree must be at least 2 (need two or more zeros)")
        if zeros[0] != 0:
            raise ValueError("zeros[0] must be exactly 0")
        if any(abs(z) >= 1.0 for z in zeros):
            raise ValueError("every zero must lie strictly inside the unit circle")
        mod = abs(complex(self.phase))
        if abs(mod - 1.0) > _UNIT_TOL:
            raise ValueError(f"phase must be unimodular within {_UNIT_TOL:g}")
        object.__setattr__(self, "phase", complex(self.phase) / mod)
        object.__setattr__(self, "zeros", zeros)

    @property
    def degree(self) -> int:
        return len(self.zeros)

    def evaluate(self, z):
        """Value of the product; unimodular whenever ``|z| = 1``."""
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.phase, dtype=complex)
        for zk in self.zeros:
            den = 1.0 - np.conj(zk) * z
            if np.any(den == 0):
                raise ValueError("evaluation at a pole of the product")
            out = out * (z - zk) / den
        return out if out.ndim else complex(out)

    def derivative(self, z):
        """Complex derivative, via the logarithmic-derivative identity.

        ``R' = R * sum_k [1/(z - z_k) + conj(z_k)/(1 - conj(z_k) z)]`` where
        the value of R is bounded away from zero; near a zero of R the
        identity degenerates and the derivative is assembled by the product
        rule instead.
        """
        z = np.asarray(z, dtype=complex)
        val = np.asarray(self.evaluate(z), dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            logsum = np.zeros(z.shape, dtype=complex)
            for zk in self.zeros:
                logsum = logsum + 1.0 / (z - zk) + np.conj(zk) / (1.0 - np.conj(zk) * z)
            out = val * logsum
        small = np.abs(val) < 1e-10
        if np.any(small):
            fallback = self._derivative_product_rule(z)
            out = np.where(small, fallback, out)
        return out if out.ndim else complex(out)

    def _derivative_product_rule(self, z):
        # Exact everywhere in the closed disk, O(n^2); used as the fallback
        # where R(z) ~ 0 and as an independent route in identity checks.
        z = np.asarray(z, dtype=complex)
        n = self.degree
        factors = np.empty((n,) + z.shape, dtype=complex)
        dfactors = np.empty_like(factors)
        for k, zk in enumerate(self.zeros):
            den = 1.0 - np.conj(zk) * z
            factors[k] = (z - zk) / den
            dfactors[k] = (1.0 - abs(zk) ** 2) / den**2
        prefix = np.ones_like(factors)
        suffix = np.ones_like(factors)
        for k in range(1, n):
            prefix[k] = prefix[k - 1] * factors[k - 1]
            suffix[n - 1 - k] = suffix[n - k] * factors[n - k]
        return self.phase * np.sum(dfactors * prefix * suffix, axis=0)

    def log_derivative(self, theta):
        """Real value of ``z R'(z)/R(z)`` at ``z = e^(i theta)``.

        Computed from the positive sum ``1 + sum_k (1-|z_k|^2)/|z-z_k|^2``
        and cross-checked against the quotient of independently evaluated
        R' and R; disagreement signals numerical breakdown.
        """
        theta = np.asarray(theta, dtype=float)
        value = self._log_derivative_at(np.exp(1j * theta))
        return value if value.ndim else float(value)

    def _log_derivative_at(self, z):
        z = np.asarray(z, dtype=complex)
        total = np.ones(z.shape, dtype=float)
        for zk in self.zeros[1:]:
            total = total + (1.0 - abs(zk) ** 2) / np.abs(z - zk) ** 2
        quotient = z * self._derivative_product_rule(z) / self.evaluate(z)
        err = np.max(np.abs(quotient - total))
        if err > 1e-8 * (1.0 + np.max(total)):
            raise ArithmeticError(
                f"circle log-derivative cross-check failed (deviation {err:.3e})"
            )
        return total

    def weight(self, theta):
        """Transfer weight ``h(e^(i theta)) = n / (z R'/R)``; strictly positive."""
        return self.degree / self.log_derivative(theta)

    def preimages(self, w: complex) -> PreimageSet:
        """All n circle solutions of ``R(z) = w`` for ``|w| = 1``."""
        pts, res = preimage_grid(self, np.asarray([w], dtype=complex))
        return PreimageSet(
            target=complex(w),
            points=tuple(complex(p) for p in pts[0]),
            residuals=tuple(float(r) for r in res[0]),
        )

    def iterate(self, m: int, z):
        """m-fold composition ``R(R(...R(z)))`` for ``m >= 1``."""
        if m < 1:
            raise ValueError("iteration count must be a positive integer")
        out = z
        for _ in range(m):
            out = self.evaluate(out)
        return out


def make_blaschke(lam: complex, zeros) -> BlaschkeProduct:
    """Validated constructor; see :class:`BlaschkeProduct` for the invariants."""
    return BlaschkeProduct(phase=complex(lam), zeros=tuple(complex(z) for z in zeros))


def _polynomial_pair(product: BlaschkeProduct):
    # R = num/den with num(z) = phase * prod (z - z_k), den(z) = prod (1 - conj(z_k) z).
    # Coefficients are stored lowest order first.
    num = np.array([product.phase], dtype=complex)
    den = np.array([1.0 + 0j])
    for zk in product.zeros:
        num = np.convolve(num, np.array([-zk, 1.0]))
        den = np.convolve(den, np.array([1.0, -np.conj(zk)]))
    return num, den


def _horner(coeffs, z):
    out = np.zeros_like(z)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


def preimage_grid(product: BlaschkeProduct, targets: np.ndarray):
    """Circle preimages of many unit-circle targets at once.

    Runs the Aberth--Ehrlich simultaneous iteration on the degree-n
    polynomial ``num(z) - w * den(z)`` for every target w, starting from the
    n-th roots of ``w / phase`` (exact for monomial products), followed by a
    fixed number of per-root Newton polish steps.  Returns a pair of arrays
    of shape ``(len(targets), n)``: the roots of each row sorted by principal
    argument, and the direct residuals ``|R(root) - w|``.

    Raises :class:`ConvergenceError` when a root ends up off the circle, a
    residual exceeds tolerance, or two roots collide - all of which signal a
    numerical breakdown rather than a valid state.
    """
    targets = np.asarray(targets, dtype=complex)
    if targets.ndim != 1:
        raise ValueError("targets must be a one-dimensional array")
    if np.max(np.abs(np.abs(targets) - 1.0)) > _TARGET_TOL:
        raise ValueError("preimage targets must lie on the unit circle")
    n = product.degree
    num, den = _polynomial_pair(product)
    dnum = num[1:] * np.arange(1, len(num))
    dden = den[1:] * np.arange(1, len(den))

    phases = np.exp(2j * np.pi * np.arange(n) / n)
    roots = (targets[:, None] / product.phase) ** (1.0 / n) * phases[None, :]

    off_diag = ~np.eye(n, dtype=bool)
    w_col = targets[:, None]
    for _ in range(_ROOT_MAX_ITER):
        p = _horner(num, roots) - w_col * _horner(den, roots)
        dp = _horner(dnum, roots) - w_col * _horner(dden, roots)
        newton = p / dp
        diff = roots[:, :, None] - roots[:, None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = np.where(off_diag[None, :, :], 1.0 / diff, 0.0)
        repulsion = inv.sum(axis=2)
        step = newton / (1.0 - newton * repulsion)
        roots = roots - step
        if np.max(np.abs(step)) < _ROOT_STEP_TOL:
            break
    for _ in range(_NEWTON_POLISH_STEPS):
        p = _horner(num, roots) - w_col * _horner(den, roots)
        dp = _horner(dnum, roots) - w_col * _horner(dden, roots)
        roots = roots - p / dp

    order = np.argsort(np.angle(roots), axis=1)
    roots = np.take_along_axis(roots, order, axis=1)

    residuals = np.abs(product.evaluate(roots) - w_col)
    worst = float(np.max(residuals))
    if worst > _RESIDUAL_TOL:
        raise ConvergenceError(f"preimage solve residual {worst:.3e} exceeds {_RESIDUAL_TOL:g}")
    off_circle = float(np.max(np.abs(np.abs(roots) - 1.0)))
    if off_circle > _CIRCLE_TOL:
        raise ConvergenceError(f"preimage root left the circle by {off_circle:.3e}")
    diff = roots[:, :, None] - roots[:, None, :]
    diff[:, np.arange(n), np.arange(n)] = 1.0
    closest = float(np.min(np.abs(diff)))
    if closest <= _SEPARATION_TOL:
        raise ConvergenceError(f"preimage roots collided (separation {closest:.3e})")
    return roots, residuals
