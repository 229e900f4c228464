import numpy as np
import pytest

from zakharov1d.spectral import GridError, RealField, derivative, make_grid
from zakharov1d.data_families import (
    BilinearData,
    CCTIngredients,
    DataError,
    SolitonParams,
    bilinear_experiment_grid,
    box_experiment_grid,
    cct_ingredients,
    cct_schedule,
    ground_state,
    make_bilinear_data,
    make_box_data,
    decoherence_pair,
    soliton_fields,
)

from oracle_helpers import (
    box_hk_norm_continuum,
    soliton_density_truncated_norm,
    soliton_density_truncated_norm_discrete,
    soliton_u_l2,
)


def test_box_experiment_grid_alignment():
    g = box_experiment_grid(8, xi_cover=20.0)
    # frequency step 1/(8N) puts every box edge on a grid wavenumber
    assert g.dxi == pytest.approx(1.0 / 64.0)
    assert g.xi_max >= 20.0
    edges = [-8.125, -8.0, 9.0, 9.125]
    for e in edges:
        assert np.min(np.abs(g.wavenumbers - e)) < 1e-12
    g2 = box_experiment_grid(8, xi_cover=20.0, refine=4)
    assert g2.dxi == pytest.approx(1.0 / 256.0)


def test_make_box_data_norms():
    # discrete norm sits a fixed factor sqrt(7.5/8) below the continuum
    # quadrature value (half-weight edge cells), uniformly in N
    for N in (8, 16, 32):
        g = box_experiment_grid(N, xi_cover=N + 3.0)
        phi = make_box_data(N, 0.25, g)
        expect = box_hk_norm_continuum(N, 0.25) * np.sqrt(7.5 / 8.0)
        assert phi.sobolev_norm(0.25) == pytest.approx(expect, rel=1e-3)
        assert 0.5 <= phi.sobolev_norm(0.25) <= 2.0
    # single-box variants carry H^k norm close to one
    g = box_experiment_grid(16, xi_cover=19.0)
    for part in ("A", "B"):
        phi = make_box_data(16, 0.25, g, part=part)
        assert abs(phi.sobolev_norm(0.25) - 1.0) < 0.05


def test_make_box_data_spectrum_layout():
    N = 8
    g = box_experiment_grid(N, xi_cover=N + 3.0)
    phi = make_box_data(N, 0.25, g, part="A")
    xi = g.wavenumbers
    height = float(N) ** (0.5 - 0.25)
    inside = (xi > -N - 1.0 / N + 1e-12) & (xi < -N - 1e-12)
    outside = (xi < -N - 1.0 / N - g.dxi) | (xi > -N + g.dxi)
    assert np.allclose(phi.spectrum[inside], height)
    assert np.max(np.abs(phi.spectrum[outside])) == 0.0
    edge = np.isclose(xi, -N - 1.0 / N) | np.isclose(xi, -float(N))
    assert np.allclose(phi.spectrum[edge], 0.5 * height)


def test_make_box_data_validation():
    with pytest.raises(DataError):
        make_box_data(1, 0.25, box_experiment_grid(8, xi_cover=12.0))
    # too-coarse frequency step: fewer than 4 cells per box
    coarse = make_grid(64, 2.0 * np.pi)  # dxi = 1, box width 1/8
    with pytest.raises(DataError):
        make_box_data(8, 0.25, coarse)
    # box band not covered by the grid
    small = box_experiment_grid(8, xi_cover=12.0)
    with pytest.raises(DataError):
        make_box_data(32, 0.25, small)
    with pytest.raises(DataError):
        make_box_data(8, 0.25, box_experiment_grid(8, xi_cover=12.0), part="C")


def test_ground_state_identity():
    g = make_grid(1024, 60.0)
    f = ground_state(g, 1.0)
    # the profile solves f'' = f - f^3
    f2 = derivative(f, 2)
    residual = f2.samples - f.samples + f.samples**3
    assert np.max(np.abs(residual)) < 1e-9
    assert f.l2_norm() == pytest.approx(2.0, rel=1e-12)


def test_soliton_params_validation():
    with pytest.raises(DataError):
        SolitonParams(-1.0, 0.1)
    with pytest.raises(DataError):
        SolitonParams(2.0, 0.5)
    with pytest.raises(DataError):
        SolitonParams(2.0, -0.6)
    p = SolitonParams(3.0, 0.1)
    assert p.lam_sq == pytest.approx(9.0)


def test_soliton_fields_norm_and_motion():
    g = make_grid(2048, 64.0)
    p = SolitonParams(2.0, 0.1)
    u0, n0, nt0 = soliton_fields(p, 0.0, g)
    assert u0.l2_norm() == pytest.approx(soliton_u_l2(2.0, 0.1), rel=1e-10)
    # density is the negative squared envelope
    assert np.max(np.abs(n0.samples + 8.0 / np.cosh(2.0 * g.x) ** 2)) < 1e-10
    # velocity field matches a centered difference of the density
    h = 1e-5
    _, np_, _ = soliton_fields(p, h, g)
    _, nm_, _ = soliton_fields(p, -h, g)
    fd = (np_.samples - nm_.samples) / (2.0 * h)
    assert np.max(np.abs(fd - nt0.samples)) < 1e-6
    # the envelope travels at speed 2N
    t = 0.7
    ut, _, _ = soliton_fields(p, t, g)
    shift = int(round(2.0 * 0.1 * t / g.dx))
    assert shift * g.dx == pytest.approx(2.0 * 0.1 * t, abs=g.dx)
    assert np.max(np.abs(np.abs(ut.samples) - np.abs(np.roll(u0.samples, shift)))) < np.max(
        np.abs(u0.samples)
    ) * 2e-2


def test_decoherence_pair_structure():
    M = 200.0
    T = 1.0
    pair = decoherence_pair(M, T)
    assert pair.first.lam == pytest.approx(M)
    assert pair.second.lam_sq == pytest.approx(M**2 + np.pi / (2.0 * T))
    assert pair.first.velocity == pytest.approx((1.0 - 1.0 / M) / 2.0)
    assert pair.second.velocity == pair.first.velocity
    # quarter-period phase separation, held to the rounding floor of the
    # stored squares (ulp of M^2 + pi/2 at M = 200 is about 7e-12)
    phase = T * (pair.first.lam_sq - pair.second.lam_sq)
    assert phase == pytest.approx(-np.pi / 2.0, abs=1e-11)
    norm = 2.0 * np.sqrt(2.0 - 1.0 / M)
    g = make_grid(8192, 8.0)
    u1, _, _ = soliton_fields(pair.first, 0.0, g)
    u2, _, _ = soliton_fields(pair.second, 0.0, g)
    assert u1.l2_norm() == pytest.approx(norm, rel=1e-8)
    assert u2.l2_norm() == pytest.approx(norm, rel=1e-4)
    # nearby data
    diff = np.sqrt(np.sum(np.abs(u1.samples - u2.samples) ** 2) * g.dx)
    assert diff < 0.1


def test_soliton_density_truncated_norm_oracle():
    g = make_grid(8192, 8.0)
    lam = 25.0
    p = SolitonParams(lam, 0.0)
    _, n, _ = soliton_fields(p, 0.0, g)
    for s, cutoff in ((-2.0, 25.0), (-1.5, 25.0), (-2.0, 50.0)):
        got = n.sobolev_norm(s, low_cutoff=cutoff)
        # exact check against the closed-form spectrum on the same lattice
        lattice = soliton_density_truncated_norm_discrete(
            lam, s, cutoff, g.wavenumbers, g.dxi
        )
        assert got == pytest.approx(lattice, rel=1e-8)
        # the lattice sum tracks the continuum integral to a few percent
        expect = soliton_density_truncated_norm(lam, s, cutoff)
        assert got == pytest.approx(expect, rel=0.05)


def test_cct_ingredients_density():
    g = make_grid(4096, 64.0 * np.pi)
    ing = cct_ingredients(g)
    assert isinstance(ing, CCTIngredients)
    i0 = np.argmin(np.abs(g.x))
    assert ing.n0.samples[i0] == pytest.approx(1.0, abs=1e-12)
    # matches the displayed oscillatory profile up to periodization wrap
    profile = np.cos(3.0 * g.x) * np.sinc(g.x / np.pi)
    err = np.max(np.abs(ing.n0.samples - profile))
    assert err < 0.03
    g2 = make_grid(8192, 128.0 * np.pi)
    ing2 = cct_ingredients(g2)
    profile2 = np.cos(3.0 * g2.x) * np.sinc(g2.x / np.pi)
    err2 = np.max(np.abs(ing2.n0.samples - profile2))
    assert err2 < 0.7 * err
    # band-limited to 2 <= |xi| <= 4
    xi = np.abs(g.wavenumbers)
    live = np.abs(ing.n0.spectrum) > 1e-12
    assert np.all(xi[live] >= 2.0 - g.dxi)
    assert np.all(xi[live] <= 4.0 + g.dxi)


def test_cct_ingredients_bump():
    g = make_grid(4096, 64.0 * np.pi)
    ing = cct_ingredients(g)
    x = g.x
    assert np.all(ing.u0.samples.real[np.abs(x) <= 1.0] == 1.0)
    assert np.all(ing.u0.samples.real[np.abs(x) >= 2.0] == 0.0)
    assert np.max(np.abs(ing.u0.samples.imag)) == 0.0


def test_cct_ingredients_g_truncation():
    g = make_grid(4096, 64.0 * np.pi)
    ing = cct_ingredients(g)
    # full profile: spectrum of 2 sech^2 is sqrt(2 pi) xi / sinh(pi xi / 2)
    sech2 = RealField.from_samples(g, 2.0 / np.cosh(g.x) ** 2)
    xi = g.wavenumbers
    high = np.abs(xi) >= 1.0 + g.dxi
    assert np.max(np.abs(ing.g_trunc.spectrum[high] - sech2.spectrum[high])) < 1e-8
    low = np.abs(xi) < 1.0 - 1e-9
    assert np.max(np.abs(ing.g_trunc.spectrum[low])) == 0.0
    # the rescaled family lam^2 g(lam x) stays H^{-3/2}-bounded
    norms = []
    for lam in (4.0, 8.0, 16.0):
        spec = lam * np.interp(
            xi / lam, xi, ing.g_trunc.spectrum.real, left=0.0, right=0.0
        )
        norms.append(
            np.sqrt(np.sum((1.0 + xi**2) ** -1.5 * np.abs(spec) ** 2) * g.dxi)
        )
    assert max(norms) / min(norms) < 1.3


def test_cct_schedule_values_and_frontier():
    sched = cct_schedule(0.25, -2.0)
    assert sched.nu == pytest.approx(np.exp(-np.pi), rel=1e-12)
    assert sched.alpha == pytest.approx(5.0)
    assert sched.M == pytest.approx(np.exp(5.0 * np.pi), rel=1e-9)
    assert not sched.feasible
    # frontier: largest delta whose soliton scale exceeds the cap
    assert sched.frontier_delta == pytest.approx(
        5.0 * np.pi / (4.0 * np.log(1e6)), rel=1e-6
    )
    ok = cct_schedule(0.30, -2.0)
    assert ok.feasible
    assert ok.M < 1e6
    assert ok.T == pytest.approx(abs(np.log(ok.nu)) / ok.M**2, rel=1e-12)
    assert ok.pair.first.lam == pytest.approx(ok.M)
    with pytest.raises(DataError):
        cct_schedule(0.0, -2.0)
    with pytest.raises(DataError):
        cct_schedule(0.25, -1.2)
    steep = cct_schedule(0.25, -1.75)
    assert steep.alpha == pytest.approx(9.0)


def test_make_bilinear_data():
    N = 8
    g = bilinear_experiment_grid(N)
    data = make_bilinear_data(N, 0.0, -1.0, g)
    assert isinstance(data, BilinearData)
    xi = g.wavenumbers
    u_live = np.abs(data.u0.spectrum) > 0.0
    assert np.all(xi[u_live] >= -N - 1.0 / N - g.dxi)
    assert np.all(xi[u_live] <= -N + g.dxi)
    n_live = np.abs(data.wave.n0.spectrum) > 0.0
    assert np.all((np.abs(xi[n_live]) >= 2 * N - 1 - g.dxi))
    assert np.all((np.abs(xi[n_live]) <= 2 * N - 1 + 1.0 / N + g.dxi))
    assert data.wave.n1 is None
    peak_u = float(N) ** 0.5
    peak_n = float(N) ** 1.5
    assert np.max(np.abs(data.u0.spectrum)) == pytest.approx(peak_u)
    assert np.max(np.abs(data.wave.n0.spectrum)) == pytest.approx(peak_n)
