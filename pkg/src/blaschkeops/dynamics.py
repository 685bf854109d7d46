"""Circle dynamics of a Blaschke product restricted to the unit circle.

The restriction is an expanding degree-n covering: its lift is a strictly
increasing function climbing by 2 pi n per revolution, with derivative equal
to the circle log-derivative (hence > 1).  Branch inverses of the lift
reproduce the preimage sets, and renormalising lifts of iterates produces a
topological conjugacy to the monomial map of the same degree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blaschke import BlaschkeProduct, ConvergenceError

_TWO_PI = 2.0 * np.pi
_LIFT_TOTAL_TOL = 1e-8
_BRANCH_TOL = 1e-11


def _pchip_slopes(values: np.ndarray, h: float, periodic_jump: float | None = None) -> np.ndarray:
    """Monotonicity-preserving slopes (harmonic mean of one-sided secants)."""
    if periodic_jump is None:
        secants = np.diff(values) / h
        left = np.concatenate(([secants[0]], secants))
        right = np.concatenate((secants, [secants[-1]]))
    else:
        wrapped = np.concatenate((values, [values[0] + periodic_jump]))
        secants = np.diff(wrapped) / h
        left = np.roll(secants, 1)
        right = secants
    both = left * right
    with np.errstate(divide="ignore", invalid="ignore"):
        harmonic = 2.0 * left * right / (left + right)
    return np.where(both > 0, harmonic, 0.0)


def _hermite(u, y0, y1, m0, m1, h):
    u2 = u * u
    u3 = u2 * u
    return (
        (2 * u3 - 3 * u2 + 1) * y0
        + (u3 - 2 * u2 + u) * h * m0
        + (-2 * u3 + 3 * u2) * y1
        + (u3 - u2) * h * m1
    )


@dataclass(frozen=True)
class CircleLift:
    """Sampled lift ``psi`` on ``[theta0 - 2 pi, theta0]`` with ``R(e^(i theta)) = e^(i psi(theta))``.

    ``psi`` increases from 0 to 2 pi n; ``dpsi`` holds the analytic
    derivative samples (the circle log-derivative, real and > 1).
    """

    product: BlaschkeProduct
    theta0: float
    thetas: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray

    def __post_init__(self):
        for name in ("thetas", "psi", "dpsi"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.product.degree
        if abs(self.psi[0]) > 1e-12 or abs(self.psi[-1] - _TWO_PI * n) > _LIFT_TOTAL_TOL:
            raise ValueError("lift must rise from 0 to 2 pi n over one revolution")
        if np.any(np.diff(self.psi) <= 0):
            raise ValueError("lift samples must be strictly increasing")
        if np.min(self.dpsi) <= 1.0:
            raise ValueError("lift derivative must exceed 1 (expanding map)")

    @property
    def degree(self) -> int:
        return self.product.degree


def build_lift(product: BlaschkeProduct, grid_size: int) -> CircleLift:
    """Unwrapped argument of ``theta -> R(e^(i theta))`` over one revolution.

    The anchor ``theta0 - 2 pi`` is the smallest angle in ``[0, 2 pi)``
    whose image is 1, which pins ``psi(theta0 - 2 pi) = 0``; for monomials
    this gives ``theta0 = 2 pi`` and ``psi(theta) = n theta``.  The grid must
    resolve the fastest winding: ``max(psi') * step < pi``.
    """
    if grid_size < 256:
        raise ValueError("lift grid must have at least 256 samples")
    anchors = np.angle(np.asarray(product.preimages(1.0 + 0j).points)) % _TWO_PI
    anchors[anchors > _TWO_PI - 1e-9] -= _TWO_PI
    start = float(np.min(anchors))
    theta0 = start + _TWO_PI
    thetas = np.linspace(start, theta0, grid_size)
    dpsi = np.asarray(product.log_derivative(thetas), dtype=float)
    step = _TWO_PI / (grid_size - 1)
    if np.max(dpsi) * step >= np.pi:
        raise ValueError("grid too coarse to unwrap the lift unambiguously")
    raw = np.unwrap(np.angle(product.evaluate(np.exp(1j * thetas))))
    psi = raw - raw[0]
    total = psi[-1] - _TWO_PI * product.degree
    if abs(total) > _LIFT_TOTAL_TOL:
        raise ConvergenceError(f"lift failed to climb by 2 pi n (defect {total:.3e})")
    return CircleLift(product=product, theta0=theta0, thetas=thetas, psi=psi, dpsi=dpsi)


def _lift_value(lift: CircleLift, theta: float) -> float:
    # Exact lift value: principal argument moved onto the branch suggested by
    # the sampled lift (valid because the grid resolves every winding).
    approx = float(np.interp(theta, lift.thetas, lift.psi))
    raw = float(np.angle(lift.product.evaluate(np.exp(1j * theta))))
    return raw + _TWO_PI * round((approx - raw) / _TWO_PI)


def branch_inverse(lift: CircleLift, k: int, t: float) -> float:
    """The k-th inverse branch ``sigma_k(t) = psi^(-1)(t + 2 (k-1) pi)``.

    ``e^(i sigma_k(t))`` is a preimage of ``e^(i t)``; over k = 1..n the
    branches enumerate the full preimage set.  Seeded by monotone cubic
    interpolation of the sampled lift, then Newton-refined against the
    analytic derivative.
    """
    n = lift.degree
    if not 1 <= k <= n:
        raise ValueError("branch index must lie in 1..degree")
    if not 0.0 <= t <= _TWO_PI:
        raise ValueError("branch parameter must lie in [0, 2 pi]")
    s = t + _TWO_PI * (k - 1)
    # Monotone cubic seed for psi^(-1): theta as a function of psi, with the
    # exact inverse-function slopes 1/psi'.
    idx = int(np.clip(np.searchsorted(lift.psi, s) - 1, 0, len(lift.psi) - 2))
    h = lift.psi[idx + 1] - lift.psi[idx]
    u = (s - lift.psi[idx]) / h
    inv_slopes = 1.0 / lift.dpsi
    theta = float(
        _hermite(u, lift.thetas[idx], lift.thetas[idx + 1], inv_slopes[idx], inv_slopes[idx + 1], h)
    )
    for _ in range(8):
        value = _lift_value(lift, theta)
        if abs(value - s) <= _BRANCH_TOL:
            break
        theta -= (value - s) / float(lift.product.log_derivative(theta))
    else:
        raise ConvergenceError("branch inversion did not converge")
    return theta


@dataclass(frozen=True)
class ConjugacyMap:
    """Sampled degree-one circle map ``phi`` with ``phi o R = phi^n`` on the circle."""

    thetas: np.ndarray
    values: np.ndarray
    residual: float
    iterations: int
    last_delta: float

    def __post_init__(self):
        for name in ("thetas", "values"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def conjugacy_to_power(
    product: BlaschkeProduct,
    grid_size: int = 4096,
    max_iterations: int = 64,
    tol: float = 1e-8,
) -> ConjugacyMap:
    """Conjugacy from the circle restriction to the monomial map of equal degree.

    Iterates the renormalisation ``phi <- phi(psi(theta)) / n``, which is a
    1/n-contraction on degree-one lifts; the fixed point satisfies
    ``phi(psi(theta)) = n phi(theta)``, i.e. ``phi o R = phi^n`` on the
    circle.  Self-certifies through the sup-norm functional-equation
    residual.  For monomials the iteration is stationary at the identity.
    """
    if grid_size < 256:
        raise ValueError("conjugacy grid must have at least 256 samples")
    n = product.degree
    thetas = _TWO_PI * np.arange(grid_size) / grid_size
    h = _TWO_PI / grid_size
    raw = np.unwrap(np.angle(product.evaluate(np.exp(1j * thetas))))
    if raw[0] < 0:
        raw = raw + _TWO_PI
    psi = raw

    def periodic_eval(g: np.ndarray, x: np.ndarray) -> np.ndarray:
        # g is 2 pi periodic, sampled on thetas; cubic Hermite with monotone slopes.
        slopes = _pchip_slopes(g, h, periodic_jump=0.0)
        xm = np.mod(x, _TWO_PI)
        cell = np.minimum((xm / h).astype(int), grid_size - 1)
        u = (xm - cell * h) / h
        nxt = (cell + 1) % grid_size
        return _hermite(u, g[cell], g[nxt], slopes[cell], slopes[nxt], h)

    phi = thetas.copy()
    iterations = 0
    delta = np.inf
    for iterations in range(1, max_iterations + 1):
        gap = phi - thetas
        phi_at_psi = periodic_eval(gap, psi) + psi
        new = phi_at_psi / n
        delta = float(np.max(np.abs(new - phi)))
        phi = new
        if delta < tol:
            break
    else:
        raise ConvergenceError(
            f"conjugacy iteration missed tolerance {tol:g} (last delta {delta:.3e})"
        )
    phi = phi - _TWO_PI * np.floor(phi[0] / _TWO_PI)
    if np.any(np.diff(phi) <= 0):
        raise ConvergenceError("conjugacy iterate lost strict monotonicity")
    gap = phi - thetas
    lhs = np.exp(1j * (periodic_eval(gap, psi) + psi))
    rhs = np.exp(1j * n * phi)
    residual = float(np.max(np.abs(lhs - rhs)))
    return ConjugacyMap(
        thetas=thetas, values=phi, residual=residual, iterations=iterations, last_delta=delta
    )


def k_groups(n: int) -> tuple[str, str]:
    """K-theory of the quotient algebra: ``(Z + Z/(n-1)Z, Z)``, symbolically."""
    if not isinstance(n, int) or n < 2:
        raise ValueError("degree must be an integer >= 2")
    k0 = "Z" if n == 2 else f"Z ⊕ Z/{n - 1}Z"
    return k0, "Z"
