"""Independent reference computations used to pin expected values in tests.

Everything here is built directly from continuum formulas (closed-form
Fourier pairs, Gauss-Legendre quadrature of explicit integrals) and never
calls into the package's FFT pipeline, so agreement between the two is a
real check rather than a tautology.
"""

import numpy as np

SQRT_2PI = np.sqrt(2.0 * np.pi)


def gauss_legendre(f, a, b, order=96):
    """Integrate a smooth (possibly complex) integrand over [a, b]."""
    if b <= a:
        return 0.0
    nodes, weights = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (b - a) * nodes + 0.5 * (b + a)
    return 0.5 * (b - a) * np.sum(weights * f(x))


def box_intervals(N):
    """Frequency supports of the two-box profile at scale N."""
    return {
        "A": (-N - 1.0 / N, -N),
        "B": (N + 1.0, N + 1.0 + 1.0 / N),
    }


def box_hk_norm_continuum(N, k, parts=("A", "B")):
    """H^k norm of the continuum two-box profile, by quadrature."""
    height_sq = float(N) ** (1.0 - 2.0 * k)
    total = 0.0
    for part in parts:
        lo, hi = box_intervals(N)[part]
        total += gauss_legendre(
            lambda xi: height_sq * (1.0 + xi**2) ** k, lo, hi
        )
    return np.sqrt(total)


def phase_integral(t, theta):
    """E(t, theta) = integral_0^t exp(i s theta) ds, stable near theta = 0."""
    theta = np.asarray(theta, dtype=float)
    return t * np.exp(0.5j * theta * t) * np.sinc(theta * t / (2.0 * np.pi))


def interval_intersection(p, q):
    lo = max(p[0], q[0])
    hi = min(p[1], q[1])
    return (lo, hi) if hi > lo else None


def first_iterate_spectrum_oracle(N, k, t, xi, include_same_box=False, order=64):
    """Forced-density spectrum of the first Picard iterate at frequencies xi.

    Continuum computation: the free Schrodinger evolution of the two-box
    profile is squared, differentiated, and pushed through the retarded
    half-wave propagators, all reduced to one explicit fiber integral per
    output frequency which is then evaluated with Gauss-Legendre nodes.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    boxes = box_intervals(N)
    names = ("A", "B")
    height_sq = float(N) ** (1.0 - 2.0 * k)
    out = np.zeros(xi.shape, dtype=complex)
    for i, x in enumerate(xi):
        if x == 0.0:
            continue
        acc = 0.0 + 0.0j
        for p in names:
            for q in names:
                if not include_same_box and p == q:
                    continue
                fiber = interval_intersection(
                    boxes[p], (boxes[q][0] + x, boxes[q][1] + x)
                )
                if fiber is None:
                    continue

                def integrand(xi1, x=x):
                    xi2 = xi1 - x
                    delta = xi1**2 - xi2**2
                    fwd = np.exp(1j * x * t) * phase_integral(t, -delta - x)
                    bwd = np.exp(-1j * x * t) * phase_integral(t, -delta + x)
                    return fwd - bwd

                acc += gauss_legendre(integrand, fiber[0], fiber[1], order)
        out[i] = (1j * x / (2.0 * SQRT_2PI)) * height_sq * acc
    return out


def bilinear_bands(N):
    """Frequency supports for the second-derivative profile pair."""
    u_band = (-N - 1.0 / N, -N)
    n_right = (2.0 * N - 1.0, 2.0 * N - 1.0 + 1.0 / N)
    n_left = (-n_right[1], -n_right[0])
    return u_band, n_left, n_right


def second_derivative_u_spectrum_oracle(N, k, s, t, xi, order=64):
    """Spectrum of the second u-derivative of the data-to-solution map.

    Continuum fiber integral for -2i int_0^t U(t-t') [U(t')u0 * W(t')] dt'
    with W(t') the free wave evolution of the separated two-box density
    profile (zero initial velocity, so W has a cos(t' xi) spectrum).
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    u_band, n_left, n_right = bilinear_bands(N)
    amp = float(N) ** (0.5 - k) * float(N) ** (0.5 - s)
    out = np.zeros(xi.shape, dtype=complex)
    for i, x in enumerate(xi):
        acc = 0.0 + 0.0j
        for band in (n_left, n_right):
            # xi2 in u_band, eta = x - xi2 in band
            fiber = interval_intersection(u_band, (x - band[1], x - band[0]))
            if fiber is None:
                continue

            def integrand(xi2, x=x):
                eta = x - xi2
                base = x**2 - xi2**2
                return 0.5 * (
                    phase_integral(t, base + eta) + phase_integral(t, base - eta)
                )

            acc += gauss_legendre(integrand, fiber[0], fiber[1], order)
        out[i] = -2j / SQRT_2PI * amp * np.exp(-1j * t * xi[i] ** 2) * acc
    return out


def soliton_u_l2(lam, velocity):
    """L^2 norm of the decoherence soliton at parameter (lam, N)."""
    return 2.0 * np.sqrt(lam) * np.sqrt(1.0 - 4.0 * velocity**2)


def soliton_density_spectrum(xi, lam):
    """Spectrum of n = -f_lam^2 where f_lam = lam * sqrt(2) sech(lam x)."""
    xi = np.asarray(xi, dtype=float)
    arg = np.pi * xi / (2.0 * lam)
    out = np.empty_like(xi)
    small = np.abs(arg) < 1e-8
    out[~small] = xi[~small] / np.sinh(arg[~small])
    out[small] = (2.0 * lam / np.pi) * (1.0 - arg[small] ** 2 / 6.0)
    return -SQRT_2PI * out


def soliton_density_truncated_norm(lam, s, cutoff, xi_max=None, order=400):
    """|n|_{H^s, |xi| >= cutoff} for the soliton density, by quadrature."""
    if xi_max is None:
        xi_max = max(40.0 * lam, 10.0 * cutoff)

    def integrand(xi):
        return np.abs(xi) ** (2.0 * s) * soliton_density_spectrum(xi, lam) ** 2

    val = gauss_legendre(integrand, cutoff, xi_max, order)
    return np.sqrt(2.0 * val)


def soliton_density_truncated_norm_discrete(lam, s, cutoff, wavenumbers, dxi):
    """Same norm on a fixed frequency lattice, from the closed-form spectrum."""
    xi = np.asarray(wavenumbers, dtype=float)
    mask = np.abs(xi) >= cutoff
    spec = soliton_density_spectrum(xi[mask], lam)
    return np.sqrt(np.sum(np.abs(xi[mask]) ** (2.0 * s) * spec**2) * dxi)


def triangle_density(xi, lo, peak, hi, height):
    """Piecewise-linear pulse used by the closed-form iterate spectra."""
    xi = np.asarray(xi, dtype=float)
    up = np.clip((xi - lo) / (peak - lo), 0.0, 1.0)
    down = np.clip((hi - xi) / (hi - peak), 0.0, 1.0)
    return height * np.minimum(up, down)


def windowed_transform_oracle(window_values, sigma, support, order=512):
    """Unitary time transform of a compactly supported window, by quadrature."""
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    nodes, weights = np.polynomial.legendre.leggauss(order)
    t = support * nodes
    w = support * weights
    phases = np.exp(-1j * np.outer(sigma, t))
    return phases @ (w * window_values(t)) / SQRT_2PI


def window_modulation_l2(window_values, b, support, sigma_max=80.0, num=4001):
    """(integral <sigma>^{2b} |w_hat(sigma)|^2 dsigma)^{1/2} by quadrature."""
    sigma = np.linspace(-sigma_max, sigma_max, num)
    hat = np.abs(windowed_transform_oracle(window_values, sigma, support))
    return np.sqrt(np.trapezoid((1.0 + sigma**2) ** b * hat**2, sigma))


def window_modulation_l1_inverse(window_values, support, sigma_max=80.0, num=20001):
    """integral <sigma>^{-1} |w_hat(sigma)| dsigma by quadrature.

    |w_hat| has derivative kinks at every sign change, so this integrand
    needs a much finer trapezoid lattice than the smooth squared form.
    """
    sigma = np.linspace(-sigma_max, sigma_max, num)
    hat = np.abs(windowed_transform_oracle(window_values, sigma, support))
    return np.trapezoid(hat / np.sqrt(1.0 + sigma**2), sigma)
