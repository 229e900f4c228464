"""Initial-data families: two-box profiles, solitons, and decoherence inputs.

All spectra follow the package's unitary transform convention.  Sharp
frequency bands are discretized by cell averaging (see band_fractions), so
band edges that fall on grid wavenumbers carry half-weight amplitudes and
band masses are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .propagators import WaveData
from .spectral import (
    ComplexField,
    FourierGrid,
    RealField,
    SQRT_2PI,
    band_fractions,
    bump,
    make_grid,
    next_pow2,
)


class DataError(ValueError):
    """Raised when a data family is requested with unusable parameters."""


def _sech(z):
    # stable at large |z| where cosh would overflow
    e = np.exp(-np.abs(z))
    return 2.0 * e / (1.0 + e * e)


def box_experiment_grid(N, xi_cover, refine=1):
    """Grid whose frequency step 1/(8 N refine) aligns every box edge.

    The length refine * 16 pi N makes N, N + 1/N, 2N + 1 + 2/N (and their
    negatives) exact grid wavenumbers; num_points is chosen so the grid
    covers |xi| <= xi_cover.
    """
    length = float(refine) * 16.0 * np.pi * float(N)
    num_points = next_pow2(int(np.ceil(length * float(xi_cover) / np.pi)))
    return make_grid(num_points, length)


def _band_spectrum(grid, bands, height):
    spec = np.zeros(grid.num_points)
    for lo, hi in bands:
        spec += band_fractions(grid, lo, hi)
    return (height * spec).astype(complex)


def make_box_data(N, k, grid, part="full"):
    """Two-box profile: height N^(1/2-k) on [-N-1/N, -N] and [N+1, N+1+1/N].

    part selects 'full', or the single boxes 'A' (negative band) and 'B'
    (positive band).  The grid must cover the bands and resolve each box
    with at least four frequency cells.
    """
    if N < 2:
        raise DataError(f"N must be >= 2, got {N}")
    N = float(N)
    width = 1.0 / N
    a = (-N - width, -N)
    b = (N + 1.0, N + 1.0 + width)
    if part == "full":
        bands = [a, b]
    elif part == "A":
        bands = [a]
    elif part == "B":
        bands = [b]
    else:
        raise DataError(f"part must be 'full', 'A' or 'B', got {part!r}")
    if width / grid.dxi < 4.0:
        raise DataError(
            f"box width {width:.4g} spans under 4 cells at dxi={grid.dxi:.4g}"
        )
    if grid.xi_max < N + 1.0 + width + grid.dxi:
        raise DataError(
            f"grid covers |xi| <= {grid.xi_max:.4g} but boxes reach "
            f"{N + 1.0 + width:.4g}"
        )
    return ComplexField.from_spectrum(
        grid, _band_spectrum(grid, bands, float(N) ** (0.5 - k))
    )


def ground_state(grid, lam=1.0):
    """Scaled line-soliton envelope lam sqrt(2) sech(lam x)."""
    if lam <= 0.0:
        raise DataError(f"lam must be positive, got {lam}")
    return RealField.from_samples(grid, lam * np.sqrt(2.0) * _sech(lam * grid.x))


@dataclass(frozen=True)
class SolitonParams:
    """Soliton scale and velocity parameter (speed is 2 * velocity).

    lam_sq can be supplied exactly when lam is derived from it by a square
    root; phases computed from lam_sq then stay accurate to rounding.
    """

    lam: float
    velocity: float
    lam_sq: float | None = None

    def __post_init__(self):
        if not (np.isfinite(self.lam) and self.lam > 0.0):
            raise DataError(f"lam must be positive, got {self.lam}")
        if not abs(self.velocity) < 0.5:
            raise DataError(f"|velocity| must be < 1/2, got {self.velocity}")
        if self.lam_sq is None:
            object.__setattr__(self, "lam_sq", self.lam * self.lam)


def soliton_fields(params, t, grid):
    """Exact traveling soliton (u, n, d_t n) at time t.

    u(t, x) = exp(it(lam^2 - N^2)) exp(iNx) sqrt(1 - 4N^2) f_lam(x - 2Nt)
    with f_lam = lam sqrt(2) sech(lam .), n = -f_lam(x - 2Nt)^2; the moving
    argument is wrapped periodically onto the grid.
    """
    lam = params.lam
    vel = params.velocity
    y = grid.x - 2.0 * vel * t
    y = (y + 0.5 * grid.length) % grid.length - 0.5 * grid.length
    sech = _sech(lam * y)
    envelope = lam * np.sqrt(2.0) * sech
    phase = np.exp(1j * (t * (params.lam_sq - vel**2) + vel * grid.x))
    u = ComplexField.from_samples(
        grid, np.sqrt(1.0 - 4.0 * vel**2) * envelope * phase
    )
    n = RealField.from_samples(grid, -(envelope**2))
    tanh = np.tanh(lam * y)
    n_t = RealField.from_samples(grid, -8.0 * vel * lam**3 * sech**2 * tanh)
    return u, n, n_t


@dataclass(frozen=True)
class DecoherencePair:
    """Two same-velocity solitons tuned a quarter-period apart at time T."""

    first: SolitonParams
    second: SolitonParams
    horizon: float


def decoherence_pair(M, T):
    """Soliton pair with scales M and sqrt(M^2 + pi/(2T)), velocity (1-1/M)/2.

    At time T the internal phases differ by exactly pi/2, so the solutions
    decohere: their L^2 cross term vanishes although each norm is O(1).
    """
    if M < 2.0:
        raise DataError(f"M must be >= 2, got {M}")
    if T <= 0.0:
        raise DataError(f"T must be positive, got {T}")
    vel = (1.0 - 1.0 / M) / 2.0
    lam2_sq = M * M + np.pi / (2.0 * T)
    return DecoherencePair(
        SolitonParams(float(M), vel, lam_sq=float(M) * float(M)),
        SolitonParams(float(np.sqrt(lam2_sq)), vel, lam_sq=lam2_sq),
        float(T),
    )


@dataclass(frozen=True)
class CCTIngredients:
    """Smooth building blocks for the compact-coefficient construction."""

    u0: ComplexField
    n0: RealField
    g_trunc: RealField


def cct_ingredients(grid):
    """Plateau bump u0, band-limited oscillatory n0, truncated sech^2 profile.

    n0 is built in frequency space: a flat band on 2 <= |xi| <= 4 scaled so
    n0(0) = 1 exactly, which reproduces cos(3x) sin(x)/x up to the periodic
    wrap.  g_trunc is 2 sech^2 with its |xi| < 1 part removed, the shape
    whose rescalings lam^2 g(lam x) stay bounded in H^s for s <= -3/2.
    """
    if grid.dxi > 0.25 + 1e-12:
        raise DataError(f"dxi={grid.dxi:.4g} too coarse for the 2<=|xi|<=4 band")
    if grid.xi_max < 6.0:
        raise DataError(f"grid covers |xi| <= {grid.xi_max:.4g}, need >= 6")
    if grid.length < 8.0:
        raise DataError(f"length {grid.length:.4g} too short for the support of u0")
    u0 = ComplexField.from_samples(grid, bump(grid.x, 1.0, 2.0).astype(complex))
    height = np.pi / (2.0 * SQRT_2PI)
    n0 = RealField.from_spectrum(
        grid, _band_spectrum(grid, [(-4.0, -2.0), (2.0, 4.0)], height)
    )
    xi = grid.wavenumbers
    arg = 0.5 * np.pi * xi
    ratio = np.where(np.abs(xi) > 1e-8, xi / np.sinh(np.where(np.abs(arg) > 1e-8, arg, 1.0)), 2.0 / np.pi)
    g_full = SQRT_2PI * ratio
    keep = 1.0 - band_fractions(grid, -1.0, 1.0)
    g_trunc = RealField.from_spectrum(grid, (g_full * keep).astype(complex))
    return CCTIngredients(u0, n0, g_trunc)


@dataclass(frozen=True)
class CCTSchedule:
    """Parameter ladder delta -> (nu, M, T, soliton pair) with feasibility."""

    delta: float
    s: float
    nu: float
    alpha: float
    M: float
    T: float
    pair: DecoherencePair
    lambda_cap: float
    feasible: bool
    frontier_delta: float


def cct_schedule(delta, s, lambda_cap=1e6):
    """Resolve the distance-delta decoherence schedule at regularity s.

    nu = exp(-pi/(4 delta)), alpha = max((1/2 - s)/(-s - 3/2), 5),
    M = nu^(-alpha), T = |ln nu| / M^2, velocity (1 - nu/M)/2.  feasible
    reports whether the soliton scale fits under lambda_cap; frontier_delta
    is the largest delta that does.
    """
    if delta <= 0.0:
        raise DataError(f"delta must be positive, got {delta}")
    if s >= -1.5:
        raise DataError(f"need s < -3/2, got {s}")
    nu = float(np.exp(-np.pi / (4.0 * delta)))
    alpha = float(max((0.5 - s) / (-s - 1.5), 5.0))
    M = float(nu**-alpha)
    T = float(abs(np.log(nu)) / M**2)
    vel = (1.0 - nu / M) / 2.0
    lam2_sq = M * M + np.pi / (2.0 * T)
    pair = DecoherencePair(
        SolitonParams(M, vel, lam_sq=M * M),
        SolitonParams(float(np.sqrt(lam2_sq)), vel, lam_sq=lam2_sq),
        T,
    )
    feasible = bool(np.sqrt(lam2_sq) <= lambda_cap)
    frontier = float(alpha * np.pi / (4.0 * np.log(lambda_cap)))
    return CCTSchedule(
        float(delta), float(s), nu, alpha, M, T, pair, float(lambda_cap),
        feasible, frontier,
    )


@dataclass(frozen=True)
class BilinearData:
    """Separated-band pair probing the second derivative of the data map."""

    u0: ComplexField
    wave: WaveData


def bilinear_experiment_grid(N, refine=1):
    """Box-aligned grid wide enough for the u0 * n0 interaction products."""
    return box_experiment_grid(N, xi_cover=3.0 * float(N) + 3.0, refine=refine)


def make_bilinear_data(N, k, s, grid):
    """One-sided u band at -N with height N^(1/2-k) and density bands at
    +/-(2N-1) with height N^(1/2-s); the velocity component is zero."""
    if N < 2:
        raise DataError(f"N must be >= 2, got {N}")
    N = float(N)
    width = 1.0 / N
    if width / grid.dxi < 4.0:
        raise DataError(
            f"band width {width:.4g} spans under 4 cells at dxi={grid.dxi:.4g}"
        )
    if grid.xi_max < 2.0 * N - 1.0 + width + grid.dxi:
        raise DataError(
            f"grid covers |xi| <= {grid.xi_max:.4g} but bands reach "
            f"{2.0 * N - 1.0 + width:.4g}"
        )
    u0 = ComplexField.from_spectrum(
        grid, _band_spectrum(grid, [(-N - width, -N)], N ** (0.5 - k))
    )
    lo = 2.0 * N - 1.0
    n0 = RealField.from_spectrum(
        grid,
        _band_spectrum(grid, [(lo, lo + width), (-lo - width, -lo)], N ** (0.5 - s)),
    )
    return BilinearData(u0, WaveData(n0))
