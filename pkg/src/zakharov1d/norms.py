"""Space-time modulation norms on windowed trajectories.

A trajectory sampled on a uniform time lattice is transformed in both
variables (unitary angular-frequency convention on each axis) and weighed
against

    <xi>^{2k} <tau + xi^2>^{2b}    (Schrodinger flavor),
    <xi>^{2s} <tau +- xi>^{2b}     (transport flavors),

either in the L^2 sense (`bourgain_norm`) or with an L^1-in-tau inner
integral against the inverse weight (`dual_norm_y`).  The time axis is
zero-padded before transforming so the tau weights see a resolved tail;
fields are expected to be windowed by a `TimeCutoff` first, which makes the
padding exact rather than an approximation.

These norms are measurement instruments for trajectories produced
elsewhere; no solver logic depends on them.  `modulation_exponents` returns the
admissible exponent combinations used when reading off estimates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .spectral import FieldError, FourierGrid, bump, make_grid, sobolev_weight

FLAVORS = ("schrodinger", "wave_plus", "wave_minus")

# spectral columns below this relative magnitude are treated as empty when
# checking whether the time lattice resolves their modulation centers
_CONTENT_RTOL = 1e-12


@dataclass(frozen=True)
class TimeCutoff:
    """Smooth window: 1 on [-scale, scale], 0 outside [-2 scale, 2 scale]."""

    scale: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.scale) and self.scale > 0.0):
            raise ValueError(
                f"scale must be positive and finite, got {self.scale!r}"
            )

    def values(self, t):
        return bump(np.asarray(t, dtype=float), self.scale, 2.0 * self.scale)

    def apply(self, field):
        """Window a trajectory in time."""
        rows = self.values(field.t_nodes)[:, None]
        return SpaceTimeField(field.grid, field.half_width, rows * field.samples)


@dataclass(frozen=True)
class SpaceTimeField:
    """Samples z(t_i, x_j) on [-half_width, half_width) x spatial grid.

    Rows are time slices on the uniform lattice t_i = -half_width + i dt;
    the row count must be a power of two so the padded time axis is itself
    a valid transform lattice.
    """

    grid: FourierGrid
    half_width: float
    samples: np.ndarray

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=complex)
        if not (np.isfinite(self.half_width) and self.half_width > 0.0):
            raise FieldError(
                f"half_width must be positive and finite, got {self.half_width!r}"
            )
        if samples.ndim != 2:
            raise FieldError(f"samples must be 2D, got shape {samples.shape}")
        num_t, num_x = samples.shape
        if num_x != self.grid.num_points:
            raise FieldError(
                f"spatial axis {num_x} does not match grid size "
                f"{self.grid.num_points}"
            )
        if num_t < 8 or num_t & (num_t - 1):
            raise FieldError(
                f"time node count must be a power of two >= 8, got {num_t}"
            )
        object.__setattr__(self, "samples", samples)

    @property
    def num_t(self):
        return self.samples.shape[0]

    @property
    def dt(self):
        return 2.0 * self.half_width / self.num_t

    @property
    def t_nodes(self):
        return -self.half_width + self.dt * np.arange(self.num_t)


@dataclass(frozen=True)
class BourgainParams:
    """Weight selection: Sobolev index (k or s by flavor) and modulation b.

    All real index/b values are admissible; `epsilon` records the margin
    used when the values came out of `modulation_exponents`.
    """

    index: float
    b: float
    flavor: str = "schrodinger"
    epsilon: float = 0.01

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise ValueError(
                f"flavor must be one of {FLAVORS}, got {self.flavor!r}"
            )


def _padded_time_grid(field, pad_factor):
    if pad_factor < 1 or pad_factor & (pad_factor - 1):
        raise ValueError(f"pad_factor must be a power of two, got {pad_factor}")
    return make_grid(pad_factor * field.num_t, pad_factor * 2.0 * field.half_width)


def _modulation(flavor, tau, xi):
    if flavor == "schrodinger":
        return tau[:, None] + xi[None, :] ** 2
    if flavor == "wave_plus":
        return tau[:, None] + xi[None, :]
    if flavor == "wave_minus":
        return tau[:, None] - xi[None, :]
    raise ValueError(f"flavor must be one of {FLAVORS}, got {flavor!r}")


def _require_time_resolution(grid, tgrid, space_spec, flavor):
    """The modulation centers of occupied columns must fit under tau Nyquist.

    Checks the centers (xi^2 or |xi| for occupied modes), not arbitrary
    temporal content; windowed trajectories of the flows measured here have
    their energy concentrated near those characteristics.
    """
    mags = np.max(np.abs(space_spec), axis=0)
    top = mags.max()
    if top == 0.0:
        return
    xi_content = np.max(np.abs(grid.wavenumbers[mags > _CONTENT_RTOL * top]))
    center = xi_content**2 if flavor == "schrodinger" else xi_content
    if center > tgrid.xi_max:
        raise ValueError(
            f"time sampling too coarse: modulation center {center:.3g} exceeds "
            f"tau Nyquist {tgrid.xi_max:.3g}; refine the time lattice"
        )


def _transform(field, flavor, pad_factor):
    """Centered zero-pad in time, then the 2D unitary transform."""
    tgrid = _padded_time_grid(field, pad_factor)
    space_spec = field.grid.to_spectrum(field.samples, axis=1)
    _require_time_resolution(field.grid, tgrid, space_spec, flavor)
    padded = np.zeros((tgrid.num_points, field.grid.num_points), dtype=complex)
    offset = (pad_factor - 1) * field.num_t // 2
    padded[offset : offset + field.num_t] = space_spec
    return tgrid, tgrid.to_spectrum(padded, axis=0)


def bourgain_norm(field, params, pad_factor=4):
    """Weighted L^2 norm of the space-time transform.

    Discrete quadrature of
    (integral <xi>^{2 index} <tau + m(xi)>^{2b} |z_hat|^2 dxi dtau)^{1/2}
    with modulation argument m selected by the flavor.
    """
    tgrid, zhat = _transform(field, params.flavor, pad_factor)
    w_space = sobolev_weight(field.grid.wavenumbers, params.index)
    w_mod = sobolev_weight(
        _modulation(params.flavor, tgrid.wavenumbers, field.grid.wavenumbers),
        params.b,
    )
    total = np.sum(w_space[None, :] * w_mod * np.abs(zhat) ** 2)
    return float(np.sqrt(total * field.grid.dxi * tgrid.dxi))


def dual_norm_y(field, params, pad_factor=4):
    """Companion norm with an L^1-in-tau inner integral.

    Discrete quadrature of
    (integral <xi>^{2 index} (integral <tau + m(xi)>^{-1} |z_hat| dtau)^2
    dxi)^{1/2}; the inner weight power is fixed, `params.b` is not used.
    """
    tgrid, zhat = _transform(field, params.flavor, pad_factor)
    w_inv = sobolev_weight(
        _modulation(params.flavor, tgrid.wavenumbers, field.grid.wavenumbers),
        -0.5,
    )
    inner = np.sum(w_inv * np.abs(zhat), axis=0) * tgrid.dxi
    w_space = sobolev_weight(field.grid.wavenumbers, params.index)
    return float(np.sqrt(np.sum(w_space * inner**2) * field.grid.dxi))


class ExponentRow(NamedTuple):
    """One admissible exponent combination (b1, c1, b, c) with its margin."""

    b1: float
    c1: float
    b: float
    c: float
    epsilon: float


def modulation_exponents(k, s, epsilon=0.01):
    """Admissible modulation exponents for a regularity pair (k, s).

    Rows are organized by the gap d = s - k; valid pairs live in the strip
    k >= 0, s >= -1/2, -1 <= d < 1/2, s <= 2k - 1/2.  The margin epsilon
    must stay below 1/12 so every exponent remains in its required open
    range (the tightest constraint is b = 3/4 - 3 epsilon > 1/2 on the
    d = -1 row).
    """
    if not 0.0 < epsilon < 1.0 / 12.0:
        raise ValueError(f"epsilon must lie in (0, 1/12), got {epsilon!r}")
    d = s - k
    if k < 0.0 or s < -0.5 or d < -1.0 or d >= 0.5 or s > 2.0 * k - 0.5:
        raise ValueError(f"no admissible exponents for (k, s) = ({k}, {s})")
    if d == -1.0:
        return ExponentRow(
            0.5 - epsilon, 0.5, 0.75 - 3.0 * epsilon, 0.25 + 2.0 * epsilon, epsilon
        )
    if d < -0.5:
        return ExponentRow(
            0.5 * d + 1.0 - epsilon,
            -0.5 * d,
            0.75 - 2.0 * epsilon,
            0.25 + epsilon,
            epsilon,
        )
    if d <= 0.0:
        return ExponentRow(
            0.75 - 2.0 * epsilon,
            0.25 + epsilon,
            0.75 - 2.0 * epsilon,
            0.25 + epsilon,
            epsilon,
        )
    return ExponentRow(
        0.75 - 2.0 * epsilon,
        0.25 + epsilon,
        0.75 - 0.5 * d - 2.0 * epsilon,
        0.25 + 0.5 * d + epsilon,
        epsilon,
    )
