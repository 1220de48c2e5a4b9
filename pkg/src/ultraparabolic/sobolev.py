"""Spectral Sobolev machinery on a periodic box.

Fields live on the uniform grid of the box [-pi L, pi L)^n with N points per
axis; their Fourier coefficients are indexed by frequencies k/L with integer
k in FFT layout, normalized so the constant function 1 has zero-mode
coefficient 1 and the L2 norm equals the l2 norm of the coefficients
(Plancherel with box-averaged measure).

H^s norms use the inhomogeneous Japanese-bracket weight <xi> = (1+|xi|^2)^(1/2).
The commutator and product bound tests evaluate empirical ratios

    ||[h, Lambda^s] f||_{L2} / (||h||_{H^s0} ||f||_{H^(s-1)})
    ||h f||_{H^s}          / (||h||_{H^s1} ||f||_{H^s})

with s0 = |s-1| + n/2 + 2 and s1 = |s| + n/2 + 1.  Products and commutators
are computed by exact circular convolution over the discrete frequency
lattice (equivalent to pointwise grid products for band-limited inputs, but
with the property that a constant factor or s = 0 cancels to literal zero).
Inputs must be band-limited below half Nyquist so nothing aliases.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "TorusGrid",
    "SpectralField",
    "SobolevIndexSet",
    "hs_norm",
    "bessel_apply",
    "spectral_product",
    "commutator_bound_test",
    "product_bound_test",
    "BoundTestReport",
    "peetre_gap",
    "random_band_limited",
]


@dataclass(frozen=True)
class TorusGrid:
    """Uniform periodic grid: n axes, N points per axis, box half-period pi*L."""

    n: int
    N: int
    L: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one dimension")
        if self.N < 4 or self.N % 2:
            raise ValueError("N must be an even integer >= 4 (powers of two recommended)")
        if not self.L > 0:
            raise ValueError("box scale L must be positive")

    @property
    def shape(self):
        return (self.N,) * self.n

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi * self.L / self.N

    @cached_property
    def axis_modes(self) -> np.ndarray:
        """Integer mode numbers in FFT layout: 0, 1, ..., N/2-1, -N/2, ..., -1."""
        k = np.arange(self.N)
        k[k >= self.N // 2] -= self.N
        return k

    @cached_property
    def axis_points(self) -> np.ndarray:
        return -np.pi * self.L + self.spacing * np.arange(self.N)

    def coordinate(self, axis: int) -> np.ndarray:
        """Physical coordinate array of the given axis, broadcast to the grid shape."""
        shape = [1] * self.n
        shape[axis] = self.N
        return np.broadcast_to(self.axis_points.reshape(shape), self.shape)

    def frequency(self, axis: int) -> np.ndarray:
        shape = [1] * self.n
        shape[axis] = self.N
        return np.broadcast_to((self.axis_modes / self.L).reshape(shape), self.shape)

    @cached_property
    def frequency_sq(self) -> np.ndarray:
        out = np.zeros(self.shape)
        for axis in range(self.n):
            out = out + self.frequency(axis) ** 2
        return out

    def bessel_weight(self, s: float) -> np.ndarray:
        """<xi>^s = (1 + |xi|^2)^(s/2) over the grid frequencies."""
        if s == 0:
            return np.ones(self.shape)
        return np.power(1.0 + self.frequency_sq, 0.5 * s)

    def frequency_vectors(self) -> np.ndarray:
        """All grid frequencies as an (N^n, n) array (for pointwise inequality sweeps)."""
        axes = np.meshgrid(*(self.axis_modes / self.L for _ in range(self.n)), indexing="ij")
        return np.stack([a.ravel() for a in axes], axis=-1)


class SpectralField:
    """Fourier-side field on a TorusGrid: complex coefficients in FFT layout."""

    __slots__ = ("grid", "coeffs")

    def __init__(self, grid: TorusGrid, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.shape != grid.shape:
            raise ValueError(f"coefficients must have shape {grid.shape}")
        self.grid = grid
        self.coeffs = coeffs

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, grid):
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))

    @classmethod
    def from_grid_values(cls, grid, values):
        values = np.asarray(values)
        if values.shape != grid.shape:
            raise ValueError(f"grid values must have shape {grid.shape}")
        return cls(grid, np.fft.fftn(values) / values.size)

    @classmethod
    def single_mode(cls, grid, modes, amplitude=1.0):
        """Pure exponential exp(i k.x/L) with the given integer mode numbers."""
        coeffs = np.zeros(grid.shape, dtype=np.complex128)
        idx = tuple(int(m) % grid.N for m in modes)
        coeffs[idx] = amplitude
        return cls(grid, coeffs)

    @classmethod
    def constant(cls, grid, value=1.0):
        return cls.single_mode(grid, (0,) * grid.n, value)

    # -- basics -----------------------------------------------------------------

    def copy(self):
        return SpectralField(self.grid, self.coeffs.copy())

    def grid_values(self) -> np.ndarray:
        return np.fft.ifftn(self.coeffs * self.coeffs.size)

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def is_conjugate_symmetric(self, tol=1e-14) -> bool:
        """Whether the field is real-valued: c(-k) = conj(c(k)) within tol."""
        flipped = self.coeffs
        for axis in range(self.grid.n):
            flipped = np.flip(np.roll(flipped, -1, axis=axis), axis=axis)
        scale = max(1.0, float(np.abs(self.coeffs).max()))
        return bool(np.max(np.abs(flipped.conj() - self.coeffs)) <= tol * scale)

    def band_limit_radius(self) -> int:
        """Largest |k_i| carrying a nonzero coefficient (max over axes)."""
        nz = np.argwhere(self.coeffs != 0)
        if nz.size == 0:
            return 0
        modes = self.grid.axis_modes[nz]
        return int(np.abs(modes).max())

    def partial_derivative(self, alpha) -> "SpectralField":
        """Exact spectral derivative d^alpha: multiply by prod (i xi_j)^alpha_j."""
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.grid.n or any(a < 0 for a in alpha):
            raise ValueError(f"bad derivative multi-index {alpha}")
        out = self.coeffs
        for axis, a in enumerate(alpha):
            if a:
                out = out * (1j * self.grid.frequency(axis)) ** a
        return SpectralField(self.grid, out)

    # -- arithmetic ----------------------------------------------------------------

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    def _check(self, other):
        if not isinstance(other, SpectralField) or other.grid != self.grid:
            raise ValueError("fields must share a grid")

    def __repr__(self):
        return f"SpectralField(n={self.grid.n}, N={self.grid.N}, L={self.grid.L})"


@dataclass(frozen=True)
class SobolevIndexSet:
    """The auxiliary exponents attached to a regularity s in dimension n."""

    s: float
    n: int

    @property
    def s0(self) -> float:
        """Multiplier regularity for the commutator bound: |s-1| + n/2 + 2."""
        return abs(self.s - 1.0) + 0.5 * self.n + 2.0

    @property
    def s1(self) -> float:
        """Multiplier regularity for the product bound: |s| + n/2 + 1."""
        return abs(self.s) + 0.5 * self.n + 1.0


def hs_norm(field: SpectralField, s: float) -> float:
    """Sobolev norm ||<xi>^s u^||_{l2}; equals 1 for the constant function 1."""
    w = field.grid.bessel_weight(2.0 * s)
    return float(np.sqrt(np.sum(w * (field.coeffs.real**2 + field.coeffs.imag**2))))


def bessel_apply(field: SpectralField, s: float) -> SpectralField:
    """Bessel smoothing operator Lambda^s: multiply coefficients by <xi>^s."""
    return SpectralField(field.grid, field.coeffs * field.grid.bessel_weight(s))


# ---------------------------------------------------------------------------
# exact lattice convolution and the bound tests


def _require_band_limited(field: SpectralField, label: str):
    limit = field.grid.N // 4
    radius = field.band_limit_radius()
    if radius >= limit:
        raise ValueError(
            f"{label} must be band-limited below half Nyquist (|k| < {limit}), "
            f"support reaches |k| = {radius}"
        )


def _support(coeffs: np.ndarray):
    return np.argwhere(coeffs != 0)


def spectral_product(h: SpectralField, f: SpectralField) -> SpectralField:
    """Pointwise product computed as exact circular convolution of coefficients.

    Alias-free for inputs band-limited below half Nyquist (enforced).  The sum
    runs over the support of the sparser factor.
    """
    h._check(f)
    _require_band_limited(h, "h")
    _require_band_limited(f, "f")
    a, b = h.coeffs, f.coeffs
    if np.count_nonzero(b) < np.count_nonzero(a):
        a, b = b, a
    out = np.zeros(h.grid.shape, dtype=np.complex128)
    axes = tuple(range(h.grid.n))
    for idx in _support(a):
        out += a[tuple(idx)] * np.roll(b, idx, axis=axes)
    return SpectralField(h.grid, out)


@dataclass(frozen=True)
class BoundTestReport:
    """Empirical ratio of one inequality instance (constants recorded, never asserted)."""

    kind: str
    s: float
    auxiliary_exponent: float
    numerator: float
    denominator: float
    ratio: float


def commutator_bound_test(h: SpectralField, f: SpectralField, s: float) -> BoundTestReport:
    """Ratio ||[h, Lambda^s] f||_{L2} / (||h||_{H^s0} ||f||_{H^(s-1)}).

    The commutator coefficients are the lattice sum
        sum_eta h^(eta) (<xi-eta>^s - <xi>^s) f^(xi-eta),
    so a constant h (single zero mode) or s = 0 cancels to exact zero.
    Zero h or f is rejected (the ratio would divide by zero).
    """
    h._check(f)
    if not np.any(h.coeffs) or not np.any(f.coeffs):
        raise ValueError("commutator ratio undefined for zero h or f")
    _require_band_limited(h, "h")
    _require_band_limited(f, "f")
    grid = h.grid
    m = grid.bessel_weight(s)
    mf = m * f.coeffs
    acc = np.zeros(grid.shape, dtype=np.complex128)
    axes = tuple(range(grid.n))
    for idx in _support(h.coeffs):
        shifted_mf = np.roll(mf, idx, axis=axes)
        shifted_f = np.roll(f.coeffs, idx, axis=axes)
        acc += h.coeffs[tuple(idx)] * (shifted_mf - m * shifted_f)
    idxset = SobolevIndexSet(s, grid.n)
    numerator = float(np.linalg.norm(acc))
    denominator = hs_norm(h, idxset.s0) * hs_norm(f, s - 1.0)
    return BoundTestReport(
        kind="commutator",
        s=s,
        auxiliary_exponent=idxset.s0,
        numerator=numerator,
        denominator=denominator,
        ratio=numerator / denominator,
    )


def product_bound_test(h: SpectralField, f: SpectralField, s: float) -> BoundTestReport:
    """Ratio ||h f||_{H^s} / (||h||_{H^s1} ||f||_{H^s}); h = 1 gives exactly 1."""
    h._check(f)
    if not np.any(h.coeffs) or not np.any(f.coeffs):
        raise ValueError("product ratio undefined for zero h or f")
    prod = spectral_product(h, f)
    idxset = SobolevIndexSet(s, h.grid.n)
    numerator = hs_norm(prod, s)
    denominator = hs_norm(h, idxset.s1) * hs_norm(f, s)
    return BoundTestReport(
        kind="product",
        s=s,
        auxiliary_exponent=idxset.s1,
        numerator=numerator,
        denominator=denominator,
        ratio=numerator / denominator,
    )


def peetre_gap(grid: TorusGrid, s: float) -> float:
    """Max of <xi+eta>^s / (2^|s| <xi>^s <eta>^|s|) over all grid frequency pairs.

    The pointwise inequality holds iff the returned value is <= 1 (up to
    round-off); keep N^n modest, the sweep is quadratic in the mode count.
    """
    xi = grid.frequency_vectors()
    sq = np.sum(xi**2, axis=1)
    bracket = np.sqrt(1.0 + sq)
    pair_sq = np.sum((xi[:, None, :] + xi[None, :, :]) ** 2, axis=-1)
    lhs = np.power(1.0 + pair_sq, 0.5 * s)
    rhs = (2.0 ** abs(s)) * np.power(bracket[:, None], s) * np.power(bracket[None, :], abs(s))
    return float(np.max(lhs / rhs))


def random_band_limited(grid: TorusGrid, rng: np.random.Generator, decay: float = 2.0,
                        band: int | None = None) -> SpectralField:
    """Real random field, spectrum ~ <xi>^(-decay), support |k_i| < band (< N/4)."""
    limit = grid.N // 4
    band = limit if band is None else min(int(band), limit)
    noise = rng.standard_normal(grid.shape)
    coeffs = np.fft.fftn(noise) / noise.size
    mask = np.ones(grid.shape, dtype=bool)
    for axis in range(grid.n):
        k = np.abs(grid.frequency(axis) * grid.L)
        mask &= k < band
    coeffs = np.where(mask, coeffs, 0.0)
    coeffs *= grid.bessel_weight(-decay)
    return SpectralField(grid, coeffs)
