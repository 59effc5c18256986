"""Explicit phase-function algebra on the circle.

Circle modes live in Omega* = {2 pi m / N : m = 1..N-1}.  A length-nu
word of modes and times carries the complex state

    z(w; t):   z(omega; t) = (e^{-i omega} - 1) e^{-i t}          (nu = 1),
               z(w; t) = z(w'; t') e^{-i omega_nu} + z(omega_nu; t_nu),

whose modulus obeys the exact reduction

    |z(w; t)| = 2 sin(omega_nu / 2) * h(t_nu + alphahat, zhat),
    h(t, z)   = sqrt(4 |z| sin^2(t/2) + (1 - |z|)^2),

with zhat = z(w'; t') / (2 sin(omega_nu/2)) and alphahat =
arg z(w'; t') - omega_nu/2 - pi/2.  The induced main phase is

    psi1^{w,t}(e^{i xi}) = 2 a(n) Im(z(w; t) e^{i xi}).

On top of these sit the anchor-n phase fields: the small angle
perturbation

    warp(xi) = 2 da(n) (1 - da(n) cos xi) sin xi,

its circle change of variable (the inverse of eta = xi - warp(xi)),
the quadratic phase quad(xi) = -a(n) da(n) sin 2 xi, and the derived
shift/defect/residual combinations used by the second-order phase
correction.  All callables are pure and safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import ModelSpec

__all__ = [
    "omega_star",
    "PhaseState",
    "ZBoundsReport",
    "PhaseField",
    "Psi1CheckReport",
    "z_state",
    "h_frak",
    "z_bounds_check",
    "build_phase_field",
    "psi1_recursion_check",
]

TWO_PI = 2.0 * np.pi


def omega_star(N: int):
    """The admissible circle modes 2 pi m / N, m = 1..N-1."""
    if N < 2:
        raise DomainError("period N must be >= 2")
    return tuple(TWO_PI * m / N for m in range(1, N))


def _check_modes(omegas, N):
    allowed = np.asarray(omega_star(N))
    for w in omegas:
        if np.min(np.abs(allowed - w)) > 1e-9:
            raise DomainError(f"omega = {w!r} is not a mode 2 pi m/{N}, 0 < m < {N}")


def _dist_mod_2pi(t: float) -> float:
    return abs((t + np.pi) % TWO_PI - np.pi)


def _z_single(omega: float, t: float) -> complex:
    return (np.exp(-1j * omega) - 1.0) * np.exp(-1j * t)


@dataclass(frozen=True)
class PhaseState:
    """The recursion state z(w; t) with its argument and reduced data.

    ``zhat``/``alphahat`` describe the last reduction step and exist for
    nu >= 2 only.  arg 0 is taken as 0.
    """

    omegas: tuple
    times: tuple
    N: int
    z: complex
    alpha: float
    zhat: complex | None = None
    alphahat: float | None = None

    @property
    def nu(self) -> int:
        return len(self.omegas)

    @property
    def modulus(self) -> float:
        return abs(self.z)


def z_state(omegas, times, N: int) -> PhaseState:
    """Build the phase state for a word of modes and times."""
    omegas = tuple(float(w) for w in omegas)
    times = tuple(float(t) for t in times)
    if len(omegas) != len(times) or not omegas:
        raise DomainError("omegas and times must be nonempty and of equal length")
    _check_modes(omegas, N)
    z = _z_single(omegas[0], times[0])
    z_prev = None
    for w, t in zip(omegas[1:], times[1:]):
        z_prev = z
        z = z * np.exp(-1j * w) + _z_single(w, t)
    alpha = float(np.angle(z) % TWO_PI) if z != 0 else 0.0
    if z_prev is None:
        return PhaseState(omegas, times, N, complex(z), alpha)
    alpha_prev = float(np.angle(z_prev) % TWO_PI) if z_prev != 0 else 0.0
    w_last = omegas[-1]
    return PhaseState(
        omegas,
        times,
        N,
        complex(z),
        alpha,
        zhat=complex(z_prev / (2.0 * math.sin(w_last / 2.0))),
        alphahat=alpha_prev - w_last / 2.0 - np.pi / 2.0,
    )


def h_frak(t: float, z) -> float:
    """h(t, z) = sqrt(4 |z| sin^2(t/2) + (1 - |z|)^2) >= (1 + |z|) |sin(t/2)|."""
    r = abs(z)
    return math.sqrt(4.0 * r * math.sin(0.5 * t) ** 2 + (1.0 - r) ** 2)


@dataclass(frozen=True)
class ZBoundsReport:
    """Margins of the modulus identity and the two state inequalities.

    identity_dev : |  |z| - 2 sin(w_nu/2) h(t_nu + alphahat, zhat)  |
    lower_margin : |z| - (2 sin(w_nu/2)/pi) dist(t_nu + alphahat, 2 pi Z)
    deriv_margin : 6/|z| - |d/dt_nu e^{i alpha}|  (central differences,
                   Richardson-extrapolated), or nan when skipped
    """

    identity_dev: float
    lower_margin: float
    deriv_margin: float
    skipped: str | None = None


def z_bounds_check(state: PhaseState, fd_step: float = 1e-6) -> ZBoundsReport:
    """Evaluate the modulus identity and both inequalities on one state."""
    if state.nu < 2:
        raise DomainError("bounds concern reduced states, need nu >= 2")
    s = math.sin(state.omegas[-1] / 2.0)
    t_shift = state.times[-1] + state.alphahat
    identity_dev = abs(state.modulus - 2.0 * s * h_frak(t_shift, state.zhat))
    lower_margin = state.modulus - (2.0 * s / np.pi) * _dist_mod_2pi(t_shift)

    if state.modulus < 1e-9:
        return ZBoundsReport(identity_dev, lower_margin, float("nan"),
                             skipped="z vanishes at the sample; derivative undefined")

    def phase_dir(t_last: float) -> complex:
        st = z_state(state.omegas, state.times[:-1] + (t_last,), state.N)
        if st.z == 0:
            raise ZeroDivisionError
        return st.z / abs(st.z)

    t0 = state.times[-1]
    try:
        d1 = (phase_dir(t0 + fd_step) - phase_dir(t0 - fd_step)) / (2.0 * fd_step)
        half = fd_step / 2.0
        d2 = (phase_dir(t0 + half) - phase_dir(t0 - half)) / (2.0 * half)
    except ZeroDivisionError:
        return ZBoundsReport(identity_dev, lower_margin, float("nan"),
                             skipped="z vanishes at a finite-difference stencil point")
    deriv = (4.0 * d2 - d1) / 3.0
    deriv_margin = 6.0 / state.modulus - abs(deriv)
    return ZBoundsReport(identity_dev, lower_margin, float(deriv_margin))


class PhaseField:
    """Anchor-n phase callables: main phase, warp, quadratic corrections.

    Built through :func:`build_phase_field`, which verifies the warp is
    a small C^2 perturbation (norm <= 1/2) so the circle change of
    variable below is invertible by safeguarded Newton.
    """

    def __init__(self, n: int, gamma: float, a_n: float, da_n: float):
        self.n = n
        self.gamma = gamma
        self.a_n = float(a_n)
        self.da_n = float(da_n)
        xi = np.linspace(0.0, TWO_PI, 4096, endpoint=False)
        self.warp_c2_norm = float(
            max(
                np.max(np.abs(self.warp(xi))),
                np.max(np.abs(self.warp_d1(xi))),
                np.max(np.abs(self.warp_d2(xi))),
            )
        )

    # -- warp and its circle change of variable ------------------------

    def warp(self, xi):
        """2 da (1 - da cos xi) sin xi = 2 da sin xi - da^2 sin 2xi."""
        d = self.da_n
        return 2.0 * d * np.sin(xi) - d * d * np.sin(2.0 * xi)

    def warp_d1(self, xi):
        d = self.da_n
        return 2.0 * d * np.cos(xi) - 2.0 * d * d * np.cos(2.0 * xi)

    def warp_d2(self, xi):
        d = self.da_n
        return -2.0 * d * np.sin(xi) + 4.0 * d * d * np.sin(2.0 * xi)

    def forward_angle(self, xi):
        """eta(xi) = xi - warp(xi)."""
        return np.asarray(xi, dtype=float) - self.warp(np.asarray(xi, dtype=float))

    def inverse_angle(self, eta, tol: float = 1e-13, max_iter: int = 60):
        """xi(eta): Newton on xi - warp(xi) = eta with bracket clamping.

        The warp derivative is bounded by 1/2, so the target function is
        monotone with slope in [1/2, 3/2]; Newton iterates are clamped
        into the a-priori bracket eta +- (||warp|| + tol).
        """
        eta_arr = np.asarray(eta, dtype=float)
        spread = self.warp_c2_norm + tol
        lo = eta_arr - spread
        hi = eta_arr + spread
        xi = eta_arr.copy() if eta_arr.ndim else np.asarray([float(eta_arr)])
        lo = np.broadcast_to(lo, xi.shape).copy()
        hi = np.broadcast_to(hi, xi.shape).copy()
        for _ in range(max_iter):
            f = xi - self.warp(xi) - np.broadcast_to(eta_arr, xi.shape)
            hi = np.where(f > 0, np.minimum(hi, xi), hi)
            lo = np.where(f < 0, np.maximum(lo, xi), lo)
            step = f / (1.0 - self.warp_d1(xi))
            nxt = xi - step
            outside = (nxt < lo) | (nxt > hi)
            nxt = np.where(outside, 0.5 * (lo + hi), nxt)
            done = np.max(np.abs(nxt - xi)) <= tol
            xi = nxt
            if done:
                break
        return xi if np.ndim(eta) else float(xi[0])

    # -- phases ---------------------------------------------------------

    def main_phase(self, omega: float, t: float, xi):
        """psi1^{omega,t}(e^{i xi}) = -4 a(n) sin(omega/2) cos(xi - t - omega/2)."""
        return -4.0 * self.a_n * math.sin(omega / 2.0) * np.cos(np.asarray(xi, dtype=float) - t - omega / 2.0)

    def main_phase_state(self, z: complex, xi):
        """psi1 for a composite state via 2 a(n) Im(z e^{i xi})."""
        return 2.0 * self.a_n * np.imag(z * np.exp(1j * np.asarray(xi, dtype=float)))

    def quad_phase(self, xi):
        """-a(n) da(n) sin 2 xi."""
        return -self.a_n * self.da_n * np.sin(2.0 * np.asarray(xi, dtype=float))

    def quad_shift(self, omega: float, xi):
        """quad(xi - omega) - quad(xi) in closed form:
        2 a(n) da(n) sin(omega) cos(2 xi - omega)."""
        return 2.0 * self.a_n * self.da_n * math.sin(omega) * np.cos(2.0 * np.asarray(xi, dtype=float) - omega)

    def quad_shift_from_difference(self, omega: float, xi):
        """The same shift evaluated literally as a difference (identity partner)."""
        xi = np.asarray(xi, dtype=float)
        return self.quad_phase(xi - omega) - self.quad_phase(xi)

    def warp_defect(self, omega: float, eta):
        """main_phase composed with the circle change of variable, minus itself."""
        eta = np.asarray(eta, dtype=float)
        return self.main_phase(omega, 0.0, self.inverse_angle(eta)) - self.main_phase(omega, 0.0, eta)

    def shift_residual(self, omega: float, eta):
        """quad_shift composed with the change of variable, minus itself."""
        eta = np.asarray(eta, dtype=float)
        return self.quad_shift(omega, self.inverse_angle(eta)) - self.quad_shift(omega, eta)

    def corr_phase(self, omega: float, t: float, eta):
        """Second-order phase correction for a single mode:
        (warp_defect + quad_shift o change-of-variable) translated by t."""
        shifted = np.asarray(eta, dtype=float) - t
        return self.warp_defect(omega, shifted) + self.quad_shift(omega, self.inverse_angle(shifted))

    # -- deep recursion (proof-exploration surface) ---------------------

    def warp_level(self, omegas, times, xi):
        """First-order warp of a word: single-mode case
        (warp o rot_omega - warp) o change-of-variable o translate_t,
        longer words by the two-term recursion on the last mode."""
        xi = np.asarray(xi, dtype=float)
        if len(omegas) != len(times) or not len(omegas):
            raise DomainError("omegas and times must be nonempty and of equal length")
        if len(omegas) == 1:
            omega, t = omegas[0], times[0]
            inner = self.inverse_angle(xi - t)
            return self.warp(inner - omega) - self.warp(inner)
        omega, t = omegas[-1], times[-1]
        y = xi - omega
        return self.warp_level(omegas[:-1], times[:-1], y) - self.warp_level(
            (TWO_PI - omega,), (t,), y
        )

    def _inverse_angle_level(self, omega: float, t: float, eta, tol: float = 1e-12):
        """Inverse of xi -> xi - warp_level((omega,),(t,), xi) by contraction."""
        eta = np.asarray(eta, dtype=float)
        xi = eta.copy()
        for _ in range(200):
            nxt = eta + self.warp_level((omega,), (t,), xi)
            if np.max(np.abs(nxt - xi)) <= tol:
                return nxt
            xi = nxt
        raise DomainError("level-1 angle inversion did not contract; n too small")

    def corr_phase_deep(self, omegas, times, eta, N: int):
        """Second-order phase correction of a word of length nu >= 1.

        This chains changes of variable whose enclosing approximation
        theory is outside this library's validated surface; it is
        exposed for exploration only and excluded from the acceptance
        checks.
        """
        eta = np.asarray(eta, dtype=float)
        if len(omegas) == 1:
            return self.corr_phase(omegas[0], times[0], eta)
        omega, t = omegas[-1], times[-1]
        prefix_o, prefix_t = tuple(omegas[:-1]), tuple(times[:-1])
        prefix_state = z_state(prefix_o, prefix_t, N)
        y = eta - omega
        xi_theta = self._inverse_angle_level(omega, t, y)
        co_omega = TWO_PI - omega
        term_a = self.main_phase(co_omega, t, y) - self.main_phase(co_omega, t, xi_theta)
        term_b = self.corr_phase_deep(prefix_o, prefix_t, y, N) - self.corr_phase(co_omega, t, y)
        term_c = self.main_phase_state(prefix_state.z, xi_theta) - self.main_phase_state(
            prefix_state.z, y
        )
        return term_a + term_b + term_c


def build_phase_field(spec: ModelSpec, n: int) -> PhaseField:
    """Phase field at anchor n; fails while the warp is not yet a
    contraction (C^2 norm above 1/2)."""
    field = PhaseField(
        n=n,
        gamma=spec.offdiag.gamma,
        a_n=spec.offdiag.value(n),
        da_n=float(spec.offdiag.delta(n)),
    )
    if field.warp_c2_norm > 0.5:
        raise DomainError(
            f"warp C2 norm {field.warp_c2_norm:.3f} > 1/2 at n = {n}; increase n"
        )
    return field


@dataclass(frozen=True)
class Psi1CheckReport:
    max_deviation: float
    tol: float
    passed: bool


def psi1_recursion_check(omegas, times, spec: ModelSpec, n: int, grid: int = 1024) -> Psi1CheckReport:
    """Dual-path check of the composite main phase.

    Path 1 builds psi1^{w,t} by the translate-and-add recursion on the
    word; path 2 evaluates 2 a(n) Im(z(w;t) e^{i xi}) from the state.
    Both must agree to 1e-10 a(n) on a uniform grid.
    """
    field = build_phase_field(spec, n)
    N = spec.potential.period
    state = z_state(omegas, times, N)
    xi = np.linspace(0.0, TWO_PI, grid, endpoint=False)

    def recursive(om, tm, x):
        if len(om) == 1:
            return field.main_phase(om[0], tm[0], x)
        return recursive(om[:-1], tm[:-1], x - om[-1]) + field.main_phase(om[-1], tm[-1], x)

    dev = float(np.max(np.abs(recursive(tuple(omegas), tuple(times), xi) - field.main_phase_state(state.z, xi))))
    tol = 1e-10 * field.a_n
    return Psi1CheckReport(max_deviation=dev, tol=tol, passed=bool(dev < tol))
