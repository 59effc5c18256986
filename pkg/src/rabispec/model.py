"""Model specifications for the Jacobi operators under study.

The operators act on square-summable sequences by

    (J x)(k) = d(k) x(k) + a(k) x(k+1) + a(k-1) x(k-1),   k >= 1,

with the conventions x(0) = 0 and a(0) = 0.  Two entry families are
supported:

* ``H0`` mode: d(k) = k + (-1)^k rho, a(k) = a1 sqrt(k).  This is the
  form taken by the two invariant blocks of the quantum Rabi Hamiltonian
  (see :func:`rabi_to_jacobi`); rho is unrestricted.
* ``H12`` mode: d(k) = k + v(k) with v periodic of period N >= 2, and
  a(k) = a1 k^gamma + a1p k^(gamma-1) with 0 < gamma <= 1/2.  A
  smallness flag records whether max_k |v(k) - <v>| stays below 1/2
  (N = 2) or 1/(pi sqrt(N)) (N >= 3), the regime in which the
  three-term eigenvalue asymptotics is actually proven.

All objects are immutable after construction and safe to share across
threads; every operation here is a pure function.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "RabiParams",
    "PeriodicPotential",
    "OffDiagonalProfile",
    "ModelSpec",
    "RabiReduction",
    "rabi_to_jacobi",
    "entries",
    "fourier_decompose",
    "model_from_dict",
    "model_to_dict",
    "load_model",
]


@dataclass(frozen=True)
class RabiParams:
    """Physical parameters of the quantum Rabi Hamiltonian.

    omega : field frequency, E : level separation energy, g : coupling
    constant, hbar : Planck constant.  All strictly positive.
    """

    omega: float
    E: float
    g: float
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("omega", "E", "g", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"RabiParams.{name} must be finite and > 0, got {value!r}")


def fourier_decompose(values) -> "PeriodicPotential":
    """Expand a real N-periodic sequence v(1..N) in the real trigonometric basis

        v(k) = alpha0 + sum_{m<=N/2} alpha_m cos(2 pi m k / N)
                      + sum_{m<=(N-1)/2} alphat_m sin(2 pi m k / N).

    Returns a :class:`PeriodicPotential` carrying the coefficients, the
    deviation rho_N = max_k |v(k) - <v>| and the period-dependent
    smallness flag.  Reconstruction is exact to ~1e-12.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise DomainError("periodic potential needs at least N = 2 values")
    if not np.all(np.isfinite(v)):
        raise DomainError("periodic potential values must be finite")
    N = v.size
    k = np.arange(1, N + 1)
    alpha0 = float(v.mean())
    n_cos = N // 2
    n_sin = (N - 1) // 2
    alpha = []
    for m in range(1, n_cos + 1):
        basis = np.cos(2.0 * np.pi * m * k / N)
        # the half-period cosine (-1)^k has squared norm N, the others N/2
        norm = N if (2 * m == N) else N / 2.0
        alpha.append(float(np.dot(v, basis) / norm))
    alpha_tilde = []
    for m in range(1, n_sin + 1):
        basis = np.sin(2.0 * np.pi * m * k / N)
        alpha_tilde.append(float(np.dot(v, basis) / (N / 2.0)))
    return PeriodicPotential(
        values=tuple(float(x) for x in v),
        alpha0=alpha0,
        alpha=tuple(alpha),
        alpha_tilde=tuple(alpha_tilde),
    )


@dataclass(frozen=True)
class PeriodicPotential:
    """Periodic diagonal perturbation v(1..N) together with its Fourier data.

    Construct through :func:`fourier_decompose`; the coefficients stored
    here must reproduce ``values`` exactly.
    """

    values: tuple
    alpha0: float
    alpha: tuple
    alpha_tilde: tuple

    def __post_init__(self):
        recon = self.reconstruct(np.arange(1, self.period + 1))
        err = float(np.max(np.abs(recon - np.asarray(self.values))))
        if err > 1e-12:
            raise DomainError(f"Fourier data does not reconstruct values (err={err:.3e})")

    @property
    def period(self) -> int:
        return len(self.values)

    @property
    def rho_N(self) -> float:
        v = np.asarray(self.values)
        return float(np.max(np.abs(v - self.alpha0)))

    @property
    def smallness_ok(self) -> bool:
        """Whether rho_N satisfies the period-dependent smallness bound
        (< 1/2 for N = 2, < 1/(pi sqrt(N)) for N >= 3)."""
        limit = 0.5 if self.period == 2 else 1.0 / (np.pi * np.sqrt(self.period))
        return self.rho_N < limit

    def value_at(self, k):
        """v(k) for integer k (any sign), by periodic extension."""
        k = np.asarray(k)
        idx = np.mod(k - 1, self.period)
        return np.asarray(self.values)[idx]

    def centered_at(self, k):
        """v(k) - <v>, the mean-zero part used by the window transforms."""
        return self.value_at(k) - self.alpha0

    def reconstruct(self, k):
        k = np.asarray(k, dtype=float)
        out = np.full_like(k, self.alpha0, dtype=float)
        N = self.period
        for m, am in enumerate(self.alpha, start=1):
            out += am * np.cos(2.0 * np.pi * m * k / N)
        for m, am in enumerate(self.alpha_tilde, start=1):
            out += am * np.sin(2.0 * np.pi * m * k / N)
        return out


@dataclass(frozen=True)
class OffDiagonalProfile:
    """Power-law off-diagonal entries a(k) = a1 k^gamma + a1p k^(gamma-1).

    The restriction to this two-term family keeps the finite differences
    delta a(n) = a(n+1) - a(n) exactly computable, which is all the
    closed-form predictions consume.
    """

    a1: float
    gamma: float
    a1prime: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.a1) and self.a1 > 0):
            raise DomainError(f"a1 must be > 0, got {self.a1!r}")
        if not (0.0 < self.gamma <= 0.5):
            raise DomainError(f"gamma must lie in (0, 1/2], got {self.gamma!r}")
        if not math.isfinite(self.a1prime):
            raise DomainError("a1prime must be finite")

    def value(self, k):
        """a(k); a(0) = 0 by convention, negative k are rejected."""
        k_arr = np.asarray(k, dtype=float)
        if np.any(k_arr < 0):
            raise DomainError("a(k) is defined for k >= 0 only")
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(
                k_arr == 0,
                0.0,
                self.a1 * k_arr**self.gamma
                + (self.a1prime * k_arr ** (self.gamma - 1.0) if self.a1prime else 0.0),
            )
        if np.isscalar(k) or np.ndim(k) == 0:
            return float(out)
        return out

    def delta(self, k):
        """delta a(k) = a(k+1) - a(k), computed exactly from the profile."""
        k_arr = np.asarray(k, dtype=float)
        return self.value(k_arr + 1) - self.value(k_arr)

    def delta2(self, k):
        """delta^2 a(k) = a(k+2) - 2 a(k+1) + a(k)."""
        k_arr = np.asarray(k, dtype=float)
        return self.value(k_arr + 2) - 2.0 * self.value(k_arr + 1) + self.value(k_arr)

    def pair_difference(self, n):
        """a(n-1)^2 - a(n)^2, the exact two-term offset.

        For the square-root profile (gamma = 1/2, a1p = 0) this equals
        -a1^2 identically and is returned without roundoff.
        """
        if self.gamma == 0.5 and self.a1prime == 0.0:
            n_arr = np.asarray(n, dtype=float)
            out = np.full_like(n_arr, -self.a1**2)
            return float(out) if np.ndim(n) == 0 else out
        n_arr = np.asarray(n, dtype=float)
        return self.value(n_arr - 1) ** 2 - self.value(n_arr) ** 2

    def growth_constants(self, k_max: int = 4096):
        """Sampled bounds witnessing the power-law growth hypotheses.

        Returns a dict with c, C (bounds of a(k)/k^gamma), Cp (bound of
        |delta a(k)| k^(1-gamma)), Cpp (bound of |delta^2 a(k)| k^(2-gamma))
        and the first index k0 from which all four sampled bounds hold
        with a(k) > 0.  For this two-term family every bounded quantity
        is monotone for large k, so the sampled sup/inf over k <= k_max
        certifies the tail.
        """
        k = np.arange(1, k_max + 1, dtype=float)
        a = self.value(k)
        positive = a > 0
        if not positive.any():
            raise DomainError("profile is nonpositive on the sampled range")
        k0 = int(k[np.argmax(positive)])
        sel = k >= k0
        ratio = a[sel] / k[sel] ** self.gamma
        d1 = np.abs(self.delta(k[sel])) * k[sel] ** (1.0 - self.gamma)
        d2 = np.abs(self.delta2(k[sel])) * k[sel] ** (2.0 - self.gamma)
        return {
            "c": float(ratio.min()),
            "C": float(ratio.max()),
            "Cp": float(d1.max()),
            "Cpp": float(d2.max()),
            "k0": k0,
            "k_max": k_max,
        }


@dataclass(frozen=True)
class ModelSpec:
    """A complete model: off-diagonal profile + periodic diagonal part.

    ``mode`` is "H0" (alternating potential, square-root off-diagonal,
    rho unrestricted) or "H12" (general periodic potential; the
    smallness flag of the potential gates the asymptotic guarantees but
    not the numerics).
    """

    offdiag: OffDiagonalProfile
    potential: PeriodicPotential
    mode: str = "H12"

    def __post_init__(self):
        if self.mode not in ("H0", "H12"):
            raise DomainError(f"mode must be 'H0' or 'H12', got {self.mode!r}")
        if self.mode == "H0":
            if self.potential.period != 2:
                raise DomainError("H0 mode requires period N = 2")
            v1, v2 = self.potential.values
            if abs(v1 + v2) > 1e-14 * (1.0 + abs(v1) + abs(v2)):
                raise DomainError("H0 mode requires v(k) = (-1)^k rho, i.e. v(1) = -v(2)")
            if self.offdiag.gamma != 0.5 or self.offdiag.a1prime != 0.0:
                raise DomainError("H0 mode requires a(k) = a1 sqrt(k)")

    @classmethod
    def h0(cls, a1: float, rho: float) -> "ModelSpec":
        """The alternating model d(k) = k + (-1)^k rho, a(k) = a1 sqrt(k)."""
        return cls(
            offdiag=OffDiagonalProfile(a1=a1, gamma=0.5),
            potential=fourier_decompose([-rho, rho]),
            mode="H0",
        )

    @classmethod
    def h12(cls, a1: float, gamma: float, v_values, a1prime: float = 0.0) -> "ModelSpec":
        return cls(
            offdiag=OffDiagonalProfile(a1=a1, gamma=gamma, a1prime=a1prime),
            potential=fourier_decompose(v_values),
            mode="H12",
        )

    @property
    def rho(self) -> float:
        """The alternating amplitude; only meaningful for period N = 2."""
        if self.potential.period != 2:
            raise DomainError("rho is defined for period N = 2 only")
        return float(self.potential.values[1] - self.potential.alpha0)

    @property
    def asymptotics_supported(self) -> bool:
        """Whether the proven validity regime covers this spec."""
        return True if self.mode == "H0" else self.potential.smallness_ok

    def d(self, k):
        """Diagonal entry d(k) = k + v(k)."""
        k_arr = np.asarray(k, dtype=float)
        out = k_arr + self.potential.value_at(np.asarray(k))
        return float(out) if np.ndim(k) == 0 else out

    def a(self, k):
        """Off-diagonal entry a(k), with a(0) = 0."""
        return self.offdiag.value(k)


def entries(spec: ModelSpec, k_range):
    """Evaluate (d(k), a(k)) over an iterable of nonnegative integers.

    k = 0 is allowed only so callers can observe the a(0) = 0 convention;
    d(0) is not defined and requesting it raises.
    """
    k = np.asarray(list(k_range) if not isinstance(k_range, np.ndarray) else k_range)
    if k.size and k.min() < 0:
        raise DomainError("entry indices must be >= 0")
    a = spec.a(k)
    if k.size and k.min() == 0:
        d = np.empty(k.size)
        pos = k > 0
        d[pos] = spec.d(k[pos])
        d[~pos] = np.nan
    else:
        d = spec.d(k)
    return d, a


@dataclass(frozen=True)
class RabiReduction:
    """One invariant block of the Rabi Hamiltonian as a Jacobi model,
    together with the affine map lambda_phys = shift + scale * lambda_J."""

    model: ModelSpec
    sign: str
    scale: float
    shift: float

    def to_physical(self, lam):
        return self.shift + self.scale * np.asarray(lam, dtype=float)

    def to_jacobi(self, lam_phys):
        return (np.asarray(lam_phys, dtype=float) - self.shift) / self.scale


def rabi_to_jacobi(params: RabiParams, sign: str) -> RabiReduction:
    """Reduce the Rabi Hamiltonian restricted to one parity block.

    The block Hamiltonians are H_pm = -hbar omega / 2 + hbar omega J_pm
    where J_pm has entries d(k) = k + (-1)^k rho, a(k) = a1 sqrt(k) with
    a1 = g/omega and rho = +- E / (2 hbar omega).
    """
    if sign not in ("+", "-"):
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    a1 = params.g / params.omega
    rho = params.E / (2.0 * params.hbar * params.omega)
    if sign == "-":
        rho = -rho
    return RabiReduction(
        model=ModelSpec.h0(a1=a1, rho=rho),
        sign=sign,
        scale=params.hbar * params.omega,
        shift=-0.5 * params.hbar * params.omega,
    )


# --- JSON descriptors ---------------------------------------------------

def model_from_dict(data: dict) -> ModelSpec:
    """Build a ModelSpec from its JSON descriptor.

    Two shapes are accepted:
      {"mode": "H0"|"H12", "a1": .., "gamma": .., "a1prime": .., "N": .., "v": [..]}
      {"rabi": {"omega": .., "E": .., "g": .., "hbar": ..}, "sign": "+"|"-"}
    """
    if "rabi" in data:
        params = RabiParams(**data["rabi"])
        return rabi_to_jacobi(params, data.get("sign", "+")).model
    try:
        mode = data["mode"]
        a1 = float(data["a1"])
        gamma = float(data.get("gamma", 0.5))
        a1prime = float(data.get("a1prime", 0.0))
        v = list(data["v"])
    except KeyError as exc:
        raise DomainError(f"model descriptor missing field {exc}") from exc
    if "N" in data and int(data["N"]) != len(v):
        raise DomainError("descriptor field N disagrees with len(v)")
    return ModelSpec(
        offdiag=OffDiagonalProfile(a1=a1, gamma=gamma, a1prime=a1prime),
        potential=fourier_decompose(v),
        mode=mode,
    )


def model_to_dict(spec: ModelSpec) -> dict:
    return {
        "mode": spec.mode,
        "a1": spec.offdiag.a1,
        "gamma": spec.offdiag.gamma,
        "a1prime": spec.offdiag.a1prime,
        "N": spec.potential.period,
        "v": list(spec.potential.values),
    }


def load_model(path) -> ModelSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
