"""Periodic spectral grid, unitary Fourier transforms, and Sobolev norms.

Conventions used throughout the package:

* the spatial interval is [-L/2, L/2) sampled at x_m = -L/2 + m dx;
* wavenumbers are xi_j = 2 pi j / L for j = -n/2 .. n/2 - 1, stored in
  ascending order;
* the transform is unitary with angular frequency,

      u_hat(xi_j) = (dx / sqrt(2 pi)) * sum_m u(x_m) exp(-i xi_j x_m),

  so that smooth discrete spectra converge to the continuum transform
  (1/sqrt(2 pi)) int u(x) exp(-i xi x) dx and the Plancherel identity
  sum |u_hat|^2 dxi = sum |u|^2 dx holds exactly with dxi = 2 pi / L.

Sobolev norms are frequency sums against these weights:

    |u|_{H^s}^2        = sum <xi>^{2s} |u_hat|^2 dxi,     <xi>^2 = 1 + xi^2
    |u|_{H^s,>=M}^2    = sum_{|xi| >= M} |xi|^{2s} |u_hat|^2 dxi
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SQRT_2PI = np.sqrt(2.0 * np.pi)


class GridError(ValueError):
    """Raised for inconsistent grid construction or mismatched shapes."""


class FieldError(ValueError):
    """Raised when field data violates a structural invariant."""


def next_pow2(m):
    """Smallest power of two >= max(m, 8)."""
    n = 8
    while n < m:
        n *= 2
    return n


@dataclass(frozen=True)
class FourierGrid:
    """Uniform periodic grid with precomputed transform machinery."""

    num_points: int
    length: float
    x: np.ndarray = field(init=False, repr=False, compare=False)
    wavenumbers: np.ndarray = field(init=False, repr=False, compare=False)
    mode_index: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.num_points
        if not (isinstance(n, (int, np.integer)) and n >= 8 and (n & (n - 1)) == 0):
            raise GridError(f"num_points must be a power of two >= 8, got {n!r}")
        if not (np.isfinite(self.length) and self.length > 0.0):
            raise GridError(f"length must be positive and finite, got {self.length!r}")
        j = np.arange(-n // 2, n // 2)
        object.__setattr__(self, "mode_index", j)
        object.__setattr__(self, "x", -0.5 * self.length + self.dx * np.arange(n))
        object.__setattr__(self, "wavenumbers", self.dxi * j.astype(float))
        # exp(i pi j): origin phase for the x = -L/2 sample offset
        object.__setattr__(self, "_signs", np.where(j % 2 == 0, 1.0, -1.0))
        object.__setattr__(self, "_dealias_keep", np.abs(j) <= n // 3)

    @property
    def dx(self):
        return self.length / self.num_points

    @property
    def dxi(self):
        return 2.0 * np.pi / self.length

    @property
    def xi_max(self):
        """Largest magnitude wavenumber representable on the grid."""
        return np.pi * self.num_points / self.length

    def _along(self, arr, ndim, axis):
        shape = [1] * ndim
        shape[axis] = self.num_points
        return arr.reshape(shape)

    def to_spectrum(self, samples, axis=-1):
        samples = np.asarray(samples)
        if samples.shape[axis] != self.num_points:
            raise GridError(
                f"axis length {samples.shape[axis]} != grid size {self.num_points}"
            )
        spec = np.fft.fftshift(np.fft.fft(samples, axis=axis), axes=axis)
        phase = self._along(self._signs, samples.ndim, axis)
        return spec * phase * (self.dx / SQRT_2PI)

    def from_spectrum(self, spectrum, axis=-1):
        spectrum = np.asarray(spectrum)
        if spectrum.shape[axis] != self.num_points:
            raise GridError(
                f"axis length {spectrum.shape[axis]} != grid size {self.num_points}"
            )
        phase = self._along(self._signs, spectrum.ndim, axis)
        inner = np.fft.ifftshift(spectrum * phase, axes=axis)
        return np.fft.ifft(inner, axis=axis) * (SQRT_2PI / self.dx)


def make_grid(num_points, length):
    return FourierGrid(int(num_points), float(length))


def dealias_spectrum(grid, spectrum):
    """Zero all modes above the 2/3 cutoff (quadratic products stay exact)."""
    return np.where(grid._dealias_keep, spectrum, 0.0)


def sobolev_weight(xi, s, low_cutoff=None):
    xi = np.asarray(xi, dtype=float)
    if low_cutoff is None:
        return (1.0 + xi**2) ** s
    if low_cutoff <= 0.0:
        raise ValueError("low_cutoff must be positive")
    w = np.zeros_like(xi)
    mask = np.abs(xi) >= low_cutoff
    w[mask] = np.abs(xi[mask]) ** (2.0 * s)
    return w


def spectrum_sobolev_norm(grid, spectrum, s, low_cutoff=None):
    w = sobolev_weight(grid.wavenumbers, s, low_cutoff)
    return float(np.sqrt(np.sum(w * np.abs(spectrum) ** 2) * grid.dxi))


def band_fractions(grid, lo, hi):
    """Per-mode overlap fraction of each spectral cell with [lo, hi].

    Cell j spans [xi_j - dxi/2, xi_j + dxi/2]; the returned weights are the
    cell-averaged indicator of the band.  A band edge that falls exactly on
    a grid wavenumber therefore gets weight 1/2, which keeps both discrete
    autoconvolutions and total band mass aligned with their continuum
    counterparts.
    """
    if not hi > lo:
        raise ValueError(f"empty band [{lo}, {hi}]")
    half = 0.5 * grid.dxi
    left = np.maximum(grid.wavenumbers - half, lo)
    right = np.minimum(grid.wavenumbers + half, hi)
    return np.clip((right - left) / grid.dxi, 0.0, 1.0)


class _BaseField:
    """Immutable pairing of samples and spectrum on a shared grid."""

    __slots__ = ("grid", "samples", "spectrum")

    def __init__(self, grid, samples, spectrum):
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "spectrum", spectrum)

    def __setattr__(self, name, value):
        raise AttributeError("fields are immutable")

    def l2_norm(self):
        return float(np.sqrt(np.sum(np.abs(self.samples) ** 2) * self.grid.dx))

    def sobolev_norm(self, s, low_cutoff=None):
        return spectrum_sobolev_norm(self.grid, self.spectrum, s, low_cutoff)


class ComplexField(_BaseField):
    @classmethod
    def from_samples(cls, grid, samples):
        samples = np.asarray(samples, dtype=complex)
        if samples.shape != (grid.num_points,):
            raise FieldError(f"samples shape {samples.shape} does not match grid")
        return cls(grid, samples, grid.to_spectrum(samples))

    @classmethod
    def from_spectrum(cls, grid, spectrum):
        spectrum = np.asarray(spectrum, dtype=complex)
        if spectrum.shape != (grid.num_points,):
            raise FieldError(f"spectrum shape {spectrum.shape} does not match grid")
        return cls(grid, grid.from_spectrum(spectrum), spectrum)


class RealField(_BaseField):
    """Real-valued field; construction enforces a Hermitian spectrum."""

    @classmethod
    def from_samples(cls, grid, samples):
        samples = np.asarray(samples, dtype=float)
        if samples.shape != (grid.num_points,):
            raise FieldError(f"samples shape {samples.shape} does not match grid")
        return cls(grid, samples, grid.to_spectrum(samples))

    @classmethod
    def from_spectrum(cls, grid, spectrum, rtol=1e-8):
        spectrum = np.asarray(spectrum, dtype=complex)
        if spectrum.shape != (grid.num_points,):
            raise FieldError(f"spectrum shape {spectrum.shape} does not match grid")
        values = grid.from_spectrum(spectrum)
        scale = np.max(np.abs(values)) + 1e-300
        worst = np.max(np.abs(values.imag))
        if worst > rtol * scale:
            raise FieldError(
                f"spectrum is not Hermitian: imaginary part {worst:.3e} "
                f"exceeds {rtol:.1e} of field scale {scale:.3e}"
            )
        return cls(grid, values.real, spectrum)


def derivative(fld, order=1):
    """Spectral derivative d^order/dx^order, preserving the field type."""
    mult = (1j * fld.grid.wavenumbers) ** order
    spec = fld.spectrum * mult
    if isinstance(fld, RealField):
        return RealField.from_spectrum(fld.grid, spec)
    return ComplexField.from_spectrum(fld.grid, spec)


def translate(fld, shift):
    """x -> x - shift, i.e. move the field to the right by shift."""
    spec = fld.spectrum * np.exp(-1j * fld.grid.wavenumbers * shift)
    if isinstance(fld, RealField):
        return RealField.from_spectrum(fld.grid, spec)
    return ComplexField.from_spectrum(fld.grid, spec)


def l2_inner(f, g):
    """Discrete L^2 inner product conj(f) g dx on a shared grid."""
    if f.grid != g.grid:
        raise GridError("fields live on different grids")
    return complex(np.sum(np.conj(f.samples) * g.samples) * f.grid.dx)


def smooth_step(y):
    """C-infinity monotone step: 0 for y <= 0, 1 for y >= 1."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(y > 0.0, np.exp(-1.0 / np.maximum(y, 1e-300)), 0.0)
        b = np.where(y < 1.0, np.exp(-1.0 / np.maximum(1.0 - y, 1e-300)), 0.0)
    return a / (a + b)


def bump(x, inner, outer):
    """Smooth plateau bump: 1 on [-inner, inner], 0 outside (-outer, outer)."""
    if not 0.0 < inner < outer:
        raise ValueError("need 0 < inner < outer")
    return smooth_step((outer - np.abs(np.asarray(x, dtype=float))) / (outer - inner))
