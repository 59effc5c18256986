"""Windowed eigenvalue computation for semi-infinite and two-sided
symmetric tridiagonal operators.

The working horse is Sturm-sequence counting (shifted LDL^T recursion)
driving bisection.  Bisection brackets are vectorized over eigenvalue
indices, so extracting a whole index range from one finite section costs
one Sturm pass per bisection step.  Truncation to a finite section uses
a plain Dirichlet cut whose adequacy is certified empirically: the
section size is doubled until the requested eigenvalues move by less
than a stability tolerance, and the observed shift is reported, never
assumed.

A dense LAPACK diagonalization (`dense_eigenvalues`) is kept as an
independent oracle for small sections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DomainError, LabelingError, TruncationError
from .model import ModelSpec

__all__ = [
    "TridiagonalWindow",
    "SpectrumSlice",
    "TruncationPolicy",
    "sturm_count",
    "eigenvalue_by_index",
    "eigenvalues_by_index",
    "dense_eigenvalues",
    "spectrum_of_J",
    "spectrum_of_window_operator",
]


@dataclass(frozen=True)
class TridiagonalWindow:
    """A finite symmetric tridiagonal section with a global index offset.

    ``offset`` is the global index of the first row, so row i of the
    section represents global index offset + i.  Only one off-diagonal
    is stored; the section is symmetric by construction.
    """

    offset: int
    diag: np.ndarray
    offdiag: np.ndarray
    boundary: str = "dirichlet-truncation"
    truncation_margin: int = 0

    def __post_init__(self):
        d = np.ascontiguousarray(np.asarray(self.diag, dtype=float))
        e = np.ascontiguousarray(np.asarray(self.offdiag, dtype=float))
        if d.ndim != 1 or d.size == 0:
            raise DomainError("diag must be a nonempty 1-d array")
        if e.shape != (d.size - 1,):
            raise DomainError("offdiag must be one entry shorter than diag")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise DomainError("window entries must be finite")
        d.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def dim(self) -> int:
        return self.diag.size

    def global_indices(self) -> np.ndarray:
        return self.offset + np.arange(self.dim)

    def gershgorin(self):
        r = np.zeros(self.dim)
        r[:-1] += np.abs(self.offdiag)
        r[1:] += np.abs(self.offdiag)
        return float(np.min(self.diag - r)), float(np.max(self.diag + r))


@dataclass(frozen=True)
class SpectrumSlice:
    """Labeled eigenvalues lambda(n) over a contiguous index window."""

    n_lo: int
    n_hi: int
    lambdas: np.ndarray
    labeling: str = "nondecreasing-count"
    truncation_size: int = 0
    est_truncation_error: float = float("nan")

    def __post_init__(self):
        lam = np.ascontiguousarray(np.asarray(self.lambdas, dtype=float))
        if lam.shape != (self.n_hi - self.n_lo + 1,):
            raise DomainError("lambdas length must match the index range")
        if np.any(np.diff(lam) < 0):
            raise DomainError("eigenvalues must be nondecreasing in n")
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.n_lo, self.n_hi + 1)

    def value(self, n: int) -> float:
        if not (self.n_lo <= n <= self.n_hi):
            raise IndexError(f"index {n} outside slice [{self.n_lo}, {self.n_hi}]")
        return float(self.lambdas[n - self.n_lo])

    def restricted(self, n_lo: int, n_hi: int) -> "SpectrumSlice":
        if n_lo < self.n_lo or n_hi > self.n_hi:
            raise IndexError("restriction exceeds the stored range")
        return SpectrumSlice(
            n_lo=n_lo,
            n_hi=n_hi,
            lambdas=self.lambdas[n_lo - self.n_lo : n_hi - self.n_lo + 1],
            labeling=self.labeling,
            truncation_size=self.truncation_size,
            est_truncation_error=self.est_truncation_error,
        )


def _sturm_counts(diag, off2, shifts, pivmin):
    """Number of eigenvalues strictly below each shift (vectorized)."""
    q = diag[0] - shifts
    count = (q < 0).astype(np.int64)
    for k in range(1, diag.size):
        small = np.abs(q) < pivmin
        if small.any():
            q = np.where(small, -pivmin, q)
        q = diag[k] - shifts - off2[k - 1] / q
        count += q < 0
    return count


def _pivmin(off2):
    safmin = np.finfo(float).tiny
    return safmin * max(1.0, float(off2.max()) if off2.size else 1.0)


def sturm_count(window: TridiagonalWindow, x: float) -> int:
    """Count eigenvalues of the section strictly below x."""
    if not np.isfinite(x):
        raise DomainError(f"shift must be finite, got {x!r}")
    off2 = window.offdiag**2
    counts = _sturm_counts(window.diag, off2, np.asarray([float(x)]), _pivmin(off2))
    return int(counts[0])


def eigenvalues_by_index(window: TridiagonalWindow, indices, tol: float = 1e-10) -> np.ndarray:
    """Eigenvalues lambda_j for a batch of 1-based local indices j.

    All indices are bisected simultaneously: the Sturm pass at each step
    evaluates every active bracket midpoint at once.  Absolute accuracy
    tol, initial brackets from Gershgorin bounds.
    """
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size == 0:
        return np.empty(0)
    if idx.min() < 1 or idx.max() > window.dim:
        raise IndexError(f"eigenvalue index out of range 1..{window.dim}")
    lo_bound, hi_bound = window.gershgorin()
    span = max(hi_bound - lo_bound, 1.0)
    lo = np.full(idx.shape, lo_bound - 1e-3 * span)
    hi = np.full(idx.shape, hi_bound + 1e-3 * span)
    off2 = window.offdiag**2
    pivmin = _pivmin(off2)
    max_iter = int(np.ceil(np.log2((hi[0] - lo[0]) / tol))) + 4
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        counts = _sturm_counts(window.diag, off2, mid, pivmin)
        below = counts >= idx  # lambda_j < mid
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
        if np.max(hi - lo) <= tol:
            break
    return 0.5 * (lo + hi)


def eigenvalue_by_index(window: TridiagonalWindow, j: int, tol: float = 1e-10) -> float:
    """lambda_j of the finite section to absolute tolerance tol (1-based j)."""
    return float(eigenvalues_by_index(window, [j], tol=tol)[0])


def dense_eigenvalues(window: TridiagonalWindow) -> np.ndarray:
    """Dense LAPACK oracle: all eigenvalues of the section, ascending."""
    if window.dim == 1:
        return np.asarray([float(window.diag[0])])
    return scipy.linalg.eigh_tridiagonal(window.diag, window.offdiag, eigvals_only=True)


@dataclass(frozen=True)
class TruncationPolicy:
    """How to pick the finite-section size for semi-infinite spectra.

    mode "double": start from ``size`` (default 2 n_hi + 200) and double
    until the requested eigenvalues shift by less than stability_tol;
    the final shift is reported on the slice.  mode "fixed": use exactly
    ``size`` and report no stabilization estimate.
    """

    mode: str = "double"
    size: int | None = None
    stability_tol: float = 1e-8
    max_doublings: int = 4

    def __post_init__(self):
        if self.mode not in ("double", "fixed"):
            raise DomainError(f"unknown truncation policy mode {self.mode!r}")
        if self.mode == "fixed" and not self.size:
            raise DomainError("fixed truncation policy needs a size")

    @classmethod
    def parse(cls, text: str) -> "TruncationPolicy":
        if text == "double":
            return cls(mode="double")
        if text.startswith("fixed:"):
            return cls(mode="fixed", size=int(text.split(":", 1)[1]))
        raise DomainError(f"cannot parse truncation policy {text!r}")


def _leading_section(spec: ModelSpec, m: int) -> TridiagonalWindow:
    k = np.arange(1, m + 1)
    return TridiagonalWindow(offset=1, diag=spec.d(k), offdiag=spec.a(k[:-1]))


def spectrum_of_J(
    spec: ModelSpec,
    n_lo: int,
    n_hi: int,
    policy: TruncationPolicy | None = None,
    tol: float = 1e-10,
) -> SpectrumSlice:
    """lambda_n of the semi-infinite operator for n in [n_lo, n_hi].

    Labeling is nondecreasing-count: lambda_n is the n-th smallest
    eigenvalue of the leading M x M Dirichlet section, with M certified
    by the truncation policy.
    """
    if not (1 <= n_lo <= n_hi):
        raise DomainError("need 1 <= n_lo <= n_hi")
    policy = policy or TruncationPolicy()
    indices = np.arange(n_lo, n_hi + 1)

    if policy.mode == "fixed":
        m = int(policy.size)
        if m < n_hi:
            raise DomainError(f"fixed section size {m} < n_hi = {n_hi}")
        lam = eigenvalues_by_index(_leading_section(spec, m), indices, tol=tol)
        return SpectrumSlice(n_lo, n_hi, lam, truncation_size=m)

    m = policy.size or (2 * n_hi + 200)
    m = max(m, n_hi + 50)
    lam = eigenvalues_by_index(_leading_section(spec, m), indices, tol=tol)
    shift = np.inf
    for _ in range(policy.max_doublings):
        m2 = 2 * m
        lam2 = eigenvalues_by_index(_leading_section(spec, m2), indices, tol=tol)
        shift = float(np.max(np.abs(lam2 - lam)))
        m, lam = m2, lam2
        if shift < policy.stability_tol:
            return SpectrumSlice(
                n_lo, n_hi, lam, truncation_size=m, est_truncation_error=shift
            )
    raise TruncationError(
        f"eigenvalues did not stabilize below {policy.stability_tol:g} "
        f"after {policy.max_doublings} doublings (last shift {shift:.3e})",
        diagnostics={"last_size": m, "last_shift": shift},
    )


def spectrum_of_window_operator(
    op: TridiagonalWindow,
    anchor: int,
    j_lo: int,
    j_hi: int,
    center: float | None = None,
    tol: float = 1e-10,
) -> SpectrumSlice:
    """Eigenvalues of a two-sided window operator, anchored at one label.

    The label ``anchor`` is assigned to the unique eigenvalue of the
    section lying in (center - 1/2, center + 1/2]; neighbors get labels
    by order.  By default the center is read off the window entries as
    anchor + e(anchor-1)^2 - e(anchor)^2 (the diagonalized two-term
    location).  If the anchoring interval holds zero or several
    eigenvalues a LabelingError is raised reporting its contents.
    """
    if not (j_lo <= j_hi):
        raise DomainError("need j_lo <= j_hi")
    i_anchor = anchor - op.offset
    if not (1 <= i_anchor < op.dim - 1):
        raise DomainError("anchor must sit strictly inside the window")
    if center is None:
        e_prev = op.offdiag[i_anchor - 1]
        e_here = op.offdiag[i_anchor]
        center = float(anchor + e_prev**2 - e_here**2)

    nudge = 1e-12 * max(1.0, abs(center))
    lo_edge, hi_edge = center - 0.5, center + 0.5
    below_lo = sturm_count(op, lo_edge + nudge)
    below_hi = sturm_count(op, hi_edge + nudge)
    inside = below_hi - below_lo
    if inside != 1:
        contents = []
        if 0 < inside <= 8:
            contents = list(
                eigenvalues_by_index(
                    op, np.arange(below_lo + 1, below_hi + 1), tol=tol
                )
            )
        raise LabelingError(
            f"anchoring interval ({lo_edge:.6g}, {hi_edge:.6g}] contains "
            f"{inside} eigenvalues, expected exactly 1",
            interval=(lo_edge, hi_edge),
            count=inside,
        )
    j_star = below_lo + 1  # local 1-based index of the anchored eigenvalue
    local = j_star + (np.arange(j_lo, j_hi + 1) - anchor)
    if local.min() < 1 or local.max() > op.dim:
        raise DomainError("requested labels run outside the window section")
    lam = eigenvalues_by_index(op, local, tol=tol)
    return SpectrumSlice(
        j_lo,
        j_hi,
        lam,
        labeling="window-anchored",
        truncation_size=op.dim,
    )
