"""Time integration for the reduced Zakharov system and its modified variant.

The evolved unknowns are the Schrodinger amplitude u and the two reduced
density components n_plus, n_minus with n = n_plus + n_minus:

    i d_t u + dxx u = (n_plus + n_minus) u
    (d_t + dx) n_plus  = -1/2 dx |u|^2 + 1/2 n_1L
    (d_t - dx) n_minus = +1/2 dx |u|^2 + 1/2 n_1L

where n_1L is the frozen low-frequency part of the initial density velocity.
Two steppers are provided: an integrating-factor RK4 scheme (fourth order,
exact on the linear flow) and a Strang splitting whose substeps are both
solved exactly (second order overall).

The modified system rescales a slow, small-dispersion regime: the dispersion
coefficient shrinks to nu^2, the background density coefficient splits into
two counter-propagating copies of n0, and the reduced densities become
forced transport equations with speeds mu_pm = nu (1 -+ 2N) / lam.
`scale_lift` maps modified solutions back to candidate solutions of the
original system; the map is built so the Schrodinger equation holds
identically, which `lifted_residual` verifies by finite differences.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .propagators import phase_integral
from .spectral import ComplexField, FourierGrid, RealField, make_grid

_SCHEMES = ("if_rk4", "splitting2")
_BLOWUP_LIMIT = 1e12
_TRAJECTORY_MAGIC = b"ZAKTRJ01"


class BlowupError(RuntimeError):
    """Raised when a spectrum exceeds the overflow guard or turns non-finite."""

    def __init__(self, message, state):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class StepControl:
    """Fixed-step integration settings."""

    dt: float
    scheme: str = "if_rk4"
    dealias: bool = True

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be positive and finite, got {self.dt!r}")
        if self.scheme not in _SCHEMES:
            raise ValueError(f"scheme must be one of {_SCHEMES}, got {self.scheme!r}")


@dataclass(frozen=True)
class ZakharovState:
    u: ComplexField
    n_plus: RealField
    n_minus: RealField
    time: float

    @property
    def grid(self):
        return self.u.grid

    @property
    def n(self):
        """Total density n_plus + n_minus."""
        return RealField.from_spectrum(
            self.grid, self.n_plus.spectrum + self.n_minus.spectrum
        )


@dataclass(frozen=True)
class SolveResult:
    final: ZakharovState
    samples: list
    steps: int
    mass_drift: float = 0.0


def state_from_wave_data(u0, wave_data, time=0.0):
    """Initial reduced state: n_pm(0) = (n0 -+ nu_antiderivative) / 2."""
    grid = u0.grid
    if wave_data.grid != grid:
        raise ValueError("u0 and wave_data live on different grids")
    n0_hat = wave_data.n0.spectrum
    plus = 0.5 * (n0_hat - wave_data.nu_hat)
    minus = 0.5 * (n0_hat + wave_data.nu_hat)
    return ZakharovState(
        u=u0,
        n_plus=RealField.from_spectrum(grid, plus),
        n_minus=RealField.from_spectrum(grid, minus),
        time=time,
    )


def _keep_mask(grid, dealias):
    if dealias:
        return grid._dealias_keep
    return np.ones(grid.num_points, dtype=bool)


def _sample_schedule(dt, t_final, sample_times):
    if not (np.isfinite(t_final) and t_final >= 0.0):
        raise ValueError(f"t_final must be nonnegative, got {t_final!r}")
    n_steps = int(round(t_final / dt)) if t_final > 0.0 else 0
    if abs(n_steps * dt - t_final) > 1e-9 * max(1.0, abs(t_final)):
        raise ValueError(f"t_final={t_final!r} is not an integer multiple of dt={dt!r}")
    steps = set()
    for ts in sample_times:
        k = int(round(ts / dt))
        if k < 0 or k > n_steps or abs(k * dt - ts) > 1e-9 * max(1.0, abs(ts)):
            raise ValueError(
                f"sample time {ts!r} is not a step multiple within [0, t_final]"
            )
        steps.add(k)
    return n_steps, steps


def _check_finite(arrays, t_new, t_last, make_state, last_good):
    for arr in arrays:
        m = np.max(np.abs(arr))
        if not np.isfinite(m) or m > _BLOWUP_LIMIT:
            raise BlowupError(
                f"spectrum magnitude {m:.3e} beyond guard at t={t_new:.6g}",
                make_state(last_good, t_last),
            )


def _march(step, make_state, n_steps, dt, sample_steps, observer, keep_samples, y0):
    samples = []

    def emit(y, k):
        st = make_state(y, k * dt)
        if observer is not None:
            observer(st)
        if keep_samples:
            samples.append(st)
        return st

    if 0 in sample_steps:
        emit(y0, 0)
    y = y0
    mass0 = float(np.sum(np.abs(y0[0]) ** 2))
    drift = 0.0
    for k in range(n_steps):
        y_new = step(y, k * dt)
        _check_finite(y_new, (k + 1) * dt, k * dt, make_state, y)
        y = y_new
        if mass0 > 0.0:
            mass = float(np.sum(np.abs(y[0]) ** 2))
            drift = max(drift, abs(np.sqrt(mass / mass0) - 1.0))
        if (k + 1) in sample_steps:
            emit(y, k + 1)
    return y, samples, drift


def _ifrk4_step(half_phases, rhs):
    """Integrating-factor RK4 for d_t y = L y + N(y, t), L diagonal."""
    e2 = half_phases
    e1 = tuple(p * p for p in e2)

    def step(y, t):
        dt = step.dt
        k1 = rhs(y, t)
        y2 = tuple(e2[i] * (y[i] + 0.5 * dt * k1[i]) for i in range(len(y)))
        k2 = rhs(y2, t + 0.5 * dt)
        y3 = tuple(e2[i] * y[i] + 0.5 * dt * k2[i] for i in range(len(y)))
        k3 = rhs(y3, t + 0.5 * dt)
        y4 = tuple(e1[i] * y[i] + dt * e2[i] * k3[i] for i in range(len(y)))
        k4 = rhs(y4, t + dt)
        return tuple(
            e1[i] * y[i]
            + (dt / 6.0)
            * (e1[i] * k1[i] + 2.0 * e2[i] * (k2[i] + k3[i]) + k4[i])
            for i in range(len(y))
        )

    return step


def _full_rhs(grid, n1l, keep):
    xi = grid.wavenumbers

    def rhs(y, t):
        uh, nph, nmh = y
        u = grid.from_spectrum(uh)
        n = grid.from_spectrum(nph + nmh).real
        fu = np.where(keep, -1j * grid.to_spectrum(n * u), 0.0)
        s = np.where(keep, 1j * xi * grid.to_spectrum(u.real**2 + u.imag**2), 0.0)
        return (fu, -0.5 * s + 0.5 * n1l, 0.5 * s + 0.5 * n1l)

    return rhs


def _full_splitting_step(grid, n1l, dt, keep):
    xi = grid.wavenumbers
    h = 0.5 * dt
    eu = np.exp(-1j * h * xi**2)
    ep = np.exp(-1j * h * xi)
    em = np.exp(1j * h * xi)
    fp = 0.5 * phase_integral(h, -xi) * n1l
    fm = 0.5 * phase_integral(h, xi) * n1l

    def half_linear(uh, nph, nmh):
        return eu * uh, ep * nph + fp, em * nmh + fm

    def step(y, t):
        uh, nph, nmh = half_linear(*y)
        # nonlinear substep is exact: |u| and n are pointwise invariants
        n = grid.from_spectrum(nph + nmh).real
        u = grid.from_spectrum(uh) * np.exp(-1j * dt * n)
        uh = np.where(keep, grid.to_spectrum(u), 0.0)
        s = np.where(keep, 1j * xi * grid.to_spectrum(u.real**2 + u.imag**2), 0.0)
        nph = nph - 0.5 * dt * s
        nmh = nmh + 0.5 * dt * s
        return half_linear(uh, nph, nmh)

    return step


def _make_full_stepper(grid, n1l, dt, scheme, dealias):
    keep = _keep_mask(grid, dealias)
    if scheme == "if_rk4":
        xi = grid.wavenumbers
        half = 0.5 * dt
        phases = (
            np.exp(-1j * half * xi**2),
            np.exp(-1j * half * xi),
            np.exp(1j * half * xi),
        )
        step = _ifrk4_step(phases, _full_rhs(grid, n1l, keep))
        step.dt = dt
        return step
    return _full_splitting_step(grid, n1l, dt, keep)


def _full_make_state(grid):
    def make_state(y, t):
        return ZakharovState(
            u=ComplexField.from_spectrum(grid, y[0]),
            n_plus=RealField.from_spectrum(grid, y[1]),
            n_minus=RealField.from_spectrum(grid, y[2]),
            time=t,
        )

    return make_state


def step_full(state, control, wave_data=None, reverse=False):
    """Advance a state by a single step (dt from control).

    With reverse=True the exact inverse of one splitting2 step is applied
    (the scheme is time-symmetric); if_rk4 has no exact inverse.
    """
    grid = state.grid
    if wave_data is None:
        n1l = np.zeros(grid.num_points)
    else:
        if wave_data.grid != grid:
            raise ValueError("state and wave_data live on different grids")
        n1l = wave_data.n1_low_hat
    dt = control.dt
    if reverse:
        if control.scheme != "splitting2":
            raise ValueError("only splitting2 steps can be reversed exactly")
        dt = -dt
    step = _make_full_stepper(grid, n1l, dt, control.scheme, control.dealias)
    y = (state.u.spectrum, state.n_plus.spectrum, state.n_minus.spectrum)
    make_state = _full_make_state(grid)
    y_new = step(y, state.time)
    t_new = state.time + dt
    _check_finite(y_new, t_new, state.time, make_state, y)
    return make_state(y_new, t_new)


def solve_full(
    u0,
    wave_data,
    control,
    t_final,
    sample_times=(),
    observer: Optional[Callable] = None,
    keep_samples=True,
):
    """March the reduced system from t=0 to t_final.

    Samples (and observer calls) happen exactly at the requested times, which
    must be integer multiples of control.dt. Raises BlowupError with the last
    good state attached if any spectrum exceeds the overflow guard.
    """
    grid = u0.grid
    n_steps, sample_steps = _sample_schedule(control.dt, t_final, sample_times)
    init = state_from_wave_data(u0, wave_data)
    y0 = (init.u.spectrum, init.n_plus.spectrum, init.n_minus.spectrum)
    make_state = _full_make_state(grid)
    step = _make_full_stepper(
        grid, wave_data.n1_low_hat, control.dt, control.scheme, control.dealias
    )
    y_final, samples, drift = _march(
        step, make_state, n_steps, control.dt, sample_steps, observer,
        keep_samples, y0,
    )
    return SolveResult(
        final=make_state(y_final, n_steps * control.dt),
        samples=samples,
        steps=n_steps,
        mass_drift=drift,
    )


# ---------------------------------------------------------------------------
# modified slow system and the lift back to the original variables


@dataclass(frozen=True)
class ModifiedParams:
    """Coefficients of the slow modified system.

    nu is the residual dispersion scale, lam the amplitude scale, velocity
    the carrier frequency N of the lifted solution. couple_density toggles
    the (m_plus + m_minus) u feedback term in the Schrodinger equation.
    """

    nu: float
    lam: float
    velocity: float
    n0: RealField
    couple_density: bool = True

    def __post_init__(self):
        if not (np.isfinite(self.nu) and self.nu > 0.0):
            raise ValueError(f"nu must be positive, got {self.nu!r}")
        if not (np.isfinite(self.lam) and self.lam >= 1.0):
            raise ValueError(f"lam must be >= 1, got {self.lam!r}")
        if not (np.isfinite(self.velocity) and abs(self.velocity) < 0.5):
            raise ValueError(f"|velocity| must be < 1/2, got {self.velocity!r}")
        if not isinstance(self.n0, RealField):
            raise ValueError("n0 must be a RealField")

    @property
    def mu_plus(self):
        return self.nu * (1.0 - 2.0 * self.velocity) / self.lam

    @property
    def mu_minus(self):
        return self.nu * (1.0 + 2.0 * self.velocity) / self.lam


@dataclass(frozen=True)
class ModifiedState:
    v: ComplexField
    m_plus: RealField
    m_minus: RealField
    tau: float

    @property
    def grid(self):
        return self.v.grid


@dataclass(frozen=True)
class ModifiedResult:
    final: ModifiedState
    samples: list
    steps: int
    mass_drift: float = 0.0


def _modified_rhs(grid, params, keep):
    xi = grid.wavenumbers
    n0_hat = params.n0.spectrum
    mu_p, mu_m = params.mu_plus, params.mu_minus
    two_n = 2.0 * params.velocity
    couple = params.couple_density

    def rhs(y, tau):
        vh, mph, mmh = y
        v = grid.from_spectrum(vh)
        coeff_hat = 0.5 * n0_hat * (
            np.exp(1j * xi * mu_m * tau) + np.exp(-1j * xi * mu_p * tau)
        )
        pot = grid.from_spectrum(coeff_hat).real
        if couple:
            pot = pot + grid.from_spectrum(mph + mmh).real
        fv = np.where(keep, -1j * grid.to_spectrum(pot * v), 0.0)
        s = np.where(keep, 1j * xi * grid.to_spectrum(v.real**2 + v.imag**2), 0.0)
        return (
            fv,
            -0.5 * (1.0 + two_n) * mu_p * s,
            0.5 * (1.0 - two_n) * mu_m * s,
        )

    return rhs


def solve_modified(
    v0,
    params,
    control,
    tau_final,
    sample_times=(),
    observer: Optional[Callable] = None,
    keep_samples=True,
):
    """March the modified system in its own slow time."""
    if control.scheme != "if_rk4":
        raise ValueError("the modified system solver supports the if_rk4 scheme only")
    grid = v0.grid
    if params.n0.grid != grid:
        raise ValueError("v0 and params.n0 live on different grids")
    n_steps, sample_steps = _sample_schedule(control.dt, tau_final, sample_times)
    keep = _keep_mask(grid, control.dealias)
    zeros = np.zeros(grid.num_points, dtype=complex)
    y0 = (v0.spectrum, zeros, zeros.copy())

    def make_state(y, tau):
        return ModifiedState(
            v=ComplexField.from_spectrum(grid, y[0]),
            m_plus=RealField.from_spectrum(grid, y[1]),
            m_minus=RealField.from_spectrum(grid, y[2]),
            tau=tau,
        )

    step = _make_modified_stepper(grid, params, control.dt, keep)
    y_final, samples, drift = _march(
        step, make_state, n_steps, control.dt, sample_steps, observer,
        keep_samples, y0,
    )
    return ModifiedResult(
        final=make_state(y_final, n_steps * control.dt),
        samples=samples,
        steps=n_steps,
        mass_drift=drift,
    )


def _make_modified_stepper(grid, params, dt, keep):
    xi = grid.wavenumbers
    half = 0.5 * dt
    phases = (
        np.exp(-1j * half * params.nu**2 * xi**2),
        np.exp(-1j * half * params.mu_plus * xi),
        np.exp(1j * half * params.mu_minus * xi),
    )
    step = _ifrk4_step(phases, _modified_rhs(grid, params, keep))
    step.dt = dt
    return step


def step_modified(state, params, control):
    """Advance a modified-system state by a single if_rk4 step."""
    if control.scheme != "if_rk4":
        raise ValueError("the modified system solver supports the if_rk4 scheme only")
    grid = state.grid
    if params.n0.grid != grid:
        raise ValueError("state and params.n0 live on different grids")
    keep = _keep_mask(grid, control.dealias)
    step = _make_modified_stepper(grid, params, control.dt, keep)
    y = (state.v.spectrum, state.m_plus.spectrum, state.m_minus.spectrum)

    def make_state(yy, tau):
        return ModifiedState(
            v=ComplexField.from_spectrum(grid, yy[0]),
            m_plus=RealField.from_spectrum(grid, yy[1]),
            m_minus=RealField.from_spectrum(grid, yy[2]),
            tau=tau,
        )

    y_new = step(y, state.tau)
    _check_finite(y_new, state.tau + control.dt, state.tau, make_state, y)
    return make_state(y_new, state.tau + control.dt)


def modified_regime_flags(params, u0, horizon, k=1):
    """Booleans recording whether a run sits inside the proof-side regime.

    schedule_ok: horizon within |ln nu| and lam at least nu^-5.
    gronwall_ok: 1/sqrt(lam) below exp(-||n0||_{H^k} T) / ||u0||_{H^k}^2,
    the smallness that closes the energy argument.
    """
    norm_n0 = params.n0.sobolev_norm(k)
    norm_u0 = u0.sobolev_norm(k)
    schedule_ok = bool(
        horizon <= abs(np.log(params.nu)) and params.lam >= params.nu**-5
    )
    gronwall_ok = bool(
        params.lam**-0.5 <= np.exp(-norm_n0 * horizon) / max(norm_u0**2, 1e-300)
    )
    return {"schedule_ok": schedule_ok, "gronwall_ok": gronwall_ok}


def small_dispersion_exact(v0, n0, tau):
    """Zero-dispersion limit of the modified flow: a pure phase rotation."""
    if v0.grid != n0.grid:
        raise ValueError("v0 and n0 live on different grids")
    return ComplexField.from_samples(
        v0.grid, np.exp(-1j * tau * n0.samples) * v0.samples
    )


@dataclass(frozen=True)
class LiftedState:
    t: float
    u: ComplexField
    n: RealField


@dataclass(frozen=True)
class LiftedTrajectory:
    states: list
    grid: FourierGrid
    velocity: float
    time_factor: float


def scale_lift(states: Sequence[ModifiedState], params):
    """Map modified-system snapshots to candidate Zakharov solutions.

    With y = lam nu (x - 2 N t) and physical time t = tau / lam^2 the lifted
    pair

        u(t, x) = lam sqrt(1 - 4 N^2) e^{i(Nx - N^2 t)} v(tau, y)
        n(t, x) = lam^2 [ (n0(y + mu_minus tau) + n0(y - mu_plus tau)) / 2
                          + m_plus + m_minus ]

    satisfies i d_t u + dxx u = n u identically: the nu^2 dispersion of the
    modified flow exactly absorbs the (lam nu)^2 from the spatial scaling.
    The carrier N is snapped to the lifted grid resolution so e^{iNx} is
    periodic.
    """
    if not states:
        raise ValueError("scale_lift needs at least one snapshot")
    mod_grid = states[0].grid
    lam, nu = params.lam, params.nu
    scale = lam * nu
    lift_grid = make_grid(mod_grid.num_points, mod_grid.length / scale)
    time_factor = lam**2
    vel = round(params.velocity / lift_grid.dxi) * lift_grid.dxi
    amp = lam * np.sqrt(1.0 - 4.0 * vel**2)
    xi = mod_grid.wavenumbers
    n0_hat = params.n0.spectrum
    mu_p, mu_m = params.mu_plus, params.mu_minus

    lifted = []
    for st in states:
        if st.grid != mod_grid:
            raise ValueError("snapshots live on different grids")
        tau = st.tau
        t = tau / time_factor
        shift = np.exp(-1j * xi * (scale * 2.0 * vel * t))
        v_sh = mod_grid.from_spectrum(st.v.spectrum * shift)
        u_samples = amp * np.exp(1j * (vel * lift_grid.x - vel**2 * t)) * v_sh
        coeff_hat = 0.5 * n0_hat * (
            np.exp(1j * xi * mu_m * tau) + np.exp(-1j * xi * mu_p * tau)
        )
        n_hat = (coeff_hat + st.m_plus.spectrum + st.m_minus.spectrum) * shift
        n_samples = time_factor * mod_grid.from_spectrum(n_hat).real
        lifted.append(
            LiftedState(
                t=t,
                u=ComplexField.from_samples(lift_grid, u_samples),
                n=RealField.from_samples(lift_grid, n_samples),
            )
        )
    return LiftedTrajectory(
        states=lifted, grid=lift_grid, velocity=vel, time_factor=time_factor
    )


def lifted_residual(traj, index=2):
    """Relative Schrodinger residual at snapshot `index` by a five-point
    time derivative: || i u_t + dxx u - n u || over the sum of term norms."""
    states = traj.states
    if index < 2 or index + 2 >= len(states):
        raise ValueError("need five consecutive snapshots around index")
    window = states[index - 2 : index + 3]
    ts = np.array([s.t for s in window])
    hs = np.diff(ts)
    h = hs[0]
    if h <= 0.0 or np.max(np.abs(hs - h)) > 1e-9 * h:
        raise ValueError("snapshots must be uniformly spaced in time")
    grid = traj.grid
    u = [s.u.samples for s in window]
    u_t = (u[0] - 8.0 * u[1] + 8.0 * u[3] - u[4]) / (12.0 * h)
    mid = window[2]
    u_xx = grid.from_spectrum(-grid.wavenumbers**2 * mid.u.spectrum)
    nu_term = mid.n.samples * mid.u.samples
    resid = 1j * u_t + u_xx - nu_term
    scale = (
        np.linalg.norm(u_t) + np.linalg.norm(u_xx) + np.linalg.norm(nu_term)
    )
    return float(np.linalg.norm(resid) / scale)


# ---------------------------------------------------------------------------
# trajectory files: magic, little-endian header length, JSON header, raw
# complex128 spectra (u, n_plus, n_minus per snapshot)


def save_trajectory(path, states, meta=None):
    if not states:
        raise ValueError("refusing to save an empty trajectory")
    grid = states[0].grid
    for st in states:
        if st.grid != grid:
            raise ValueError("snapshots live on different grids")
    header = {
        "num_points": int(grid.num_points),
        "length": float(grid.length),
        "times": [float(st.time) for st in states],
        "fields": ["u", "n_plus", "n_minus"],
        "dtype": "<c16",
        "meta": dict(meta) if meta else {},
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_TRAJECTORY_MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for st in states:
            for spec in (st.u.spectrum, st.n_plus.spectrum, st.n_minus.spectrum):
                fh.write(np.ascontiguousarray(spec, dtype="<c16").tobytes())


def load_trajectory(path):
    """Read a trajectory file; returns (states, meta)."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _TRAJECTORY_MAGIC:
            raise ValueError(f"not a trajectory file: bad magic {magic!r}")
        (hlen,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        body = fh.read()
    n = header["num_points"]
    times = header["times"]
    expected = len(times) * 3 * n * 16
    if len(body) != expected:
        raise ValueError(
            f"trajectory body has {len(body)} bytes, expected {expected}"
        )
    grid = make_grid(n, header["length"])
    states = []
    offset = 0
    for t in times:
        specs = []
        for _ in range(3):
            specs.append(
                np.frombuffer(body, dtype="<c16", count=n, offset=offset).copy()
            )
            offset += n * 16
        states.append(
            ZakharovState(
                u=ComplexField.from_spectrum(grid, specs[0]),
                n_plus=RealField.from_spectrum(grid, specs[1]),
                n_minus=RealField.from_spectrum(grid, specs[2]),
                time=float(t),
            )
        )
    return states, header.get("meta", {})
