"""Periodic grid surrogates for the continuous side.

Functions on ``R^n`` (``n`` in {1, 2}) are represented by their samples on a
torus of period ``L`` with ``M`` points per axis, ``x_j = -L/2 + j L/M``.
The frequency grid is the FFT grid of spacing ``1/L`` up to the Nyquist
radius ``M/(2L)``.  Every window here is defined through its Fourier profile,
so band limits hold exactly on the torus, and combs, the decomposition
operators and Shannon reconstruction are exact circular operations.

Conventions: ``Q`` is the unit cube ``[-1/2, 1/2]^n``; ``<x> = (1+|x|^2)^{1/2}``.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .indices import Exponent, OutOfRange, as_rational
from .lattice import Sequence

__all__ = [
    "InvalidShape",
    "BandExceeded",
    "PeriodOverflow",
    "GridMisaligned",
    "OutOfRange",
    "DEFAULT_GRIDS",
    "GridFunction",
    "BandLimit",
    "WindowKind",
    "WindowSpec",
    "PARTITION_BUMP",
    "ANALYSIS_WINDOW",
    "COMB_ATOM",
    "RECONSTRUCTION_CUTOFF",
    "make_window",
    "Partition",
    "sigma_partition",
    "box_op",
    "box_decomposition",
    "discrete_mixed_norm",
    "STFTMagnitude",
    "stft",
    "stft_magnitude",
    "mixed_norm",
    "weighted_Lp_norm",
    "modulation_norm_discrete",
    "modulation_norm_continuous",
    "wiener_norm",
    "Samples",
    "comb",
    "gabor_comb",
    "sample",
    "sample_values",
    "shannon_reconstruct",
    "fourier_transform",
    "convolve_grid",
    "wraparound",
    "band_limited_corpus",
]


class InvalidShape(ValueError):
    pass


class BandExceeded(ValueError):
    pass


class PeriodOverflow(ValueError):
    pass


class GridMisaligned(ValueError):
    pass


# (L, M) per dimension
DEFAULT_GRIDS = {1: (64.0, 4096), 2: (32.0, 256)}

BAND_TOL = 1e-8


def _bracket(sq: np.ndarray, t: float) -> np.ndarray:
    """``<x>^t`` from ``|x|^2``."""
    if t == 0:
        return np.ones_like(sq)
    return (1.0 + sq) ** (t / 2.0)


# -- grid functions -----------------------------------------------------------


class GridFunction:
    """Immutable complex samples of a function on the torus ``[-L/2, L/2)^n``.

    Parameters
    ----------
    values : array_like
        Complex samples of shape ``(M,) * dim``; entry ``j`` sits at
        ``x_j = -L/2 + j L/M`` along each axis.
    L : float
        Period.
    band : float, optional
        Declared band radius ``R`` (Fourier support in ``|xi|_inf <= R``).
        Checked against the Nyquist radius and the out-of-band energy.
    """

    __slots__ = ("_values", "_L", "_band", "__dict__")

    def __init__(self, values, L: float, band: float | None = None):
        arr = np.array(values, dtype=complex)
        if arr.ndim not in (1, 2) or len(set(arr.shape)) != 1:
            raise InvalidShape(f"need M^n samples with n in (1, 2), got {arr.shape}")
        M = arr.shape[0]
        if M < 2 or M & (M - 1):
            raise InvalidShape("samples per axis must be a power of two")
        if not L > 0:
            raise InvalidShape("period must be positive")
        if not np.all(np.isfinite(arr)):
            raise ValueError("grid values must be finite")
        arr.setflags(write=False)
        self._values = arr
        self._L = float(L)
        self._band = None
        if band is not None:
            BandLimit(float(band)).validate(self)
            self._band = float(band)

    @classmethod
    def from_callable(cls, fn, dim: int = 1, L: float | None = None,
                      M: int | None = None, band: float | None = None) -> "GridFunction":
        """Sample ``fn(x)`` where ``x`` has shape ``(..., dim)``."""
        L0, M0 = DEFAULT_GRIDS[dim]
        L = L0 if L is None else L
        M = M0 if M is None else M
        pts = _axes_mesh(x_axis(L, M), dim)
        return cls(fn(pts), L, band)

    @classmethod
    def zeros(cls, dim: int = 1, L: float | None = None, M: int | None = None) -> "GridFunction":
        L0, M0 = DEFAULT_GRIDS[dim]
        M = M0 if M is None else M
        return cls(np.zeros((M,) * dim), L0 if L is None else L, band=0.0)

    @classmethod
    def from_spectrum(cls, spectrum: np.ndarray, L: float,
                      band: float | None = None) -> "GridFunction":
        """Inverse of :meth:`spectrum`: build from ``f^`` sampled on the FFT grid."""
        M = spectrum.shape[0]
        h = L / M
        dim = spectrum.ndim
        vals = np.fft.fftshift(np.fft.ifftn(spectrum)) / h ** dim
        return cls(vals, L, band)

    # -- geometry ---------------------------------------------------------------

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def dim(self) -> int:
        return self._values.ndim

    @property
    def L(self) -> float:
        return self._L

    @property
    def M(self) -> int:
        return self._values.shape[0]

    @property
    def h(self) -> float:
        return self._L / self.M

    @property
    def nyquist(self) -> float:
        return self.M / (2.0 * self._L)

    @property
    def band(self) -> float | None:
        return self._band

    def same_grid(self, other: "GridFunction") -> bool:
        return self.dim == other.dim and self.M == other.M and self._L == other._L

    def points(self) -> np.ndarray:
        """Sample coordinates, shape ``(M,) * dim + (dim,)``."""
        return _axes_mesh(x_axis(self._L, self.M), self.dim)

    def frequencies(self) -> np.ndarray:
        """FFT-ordered frequency coordinates, shape ``(M,) * dim + (dim,)``."""
        return _axes_mesh(xi_axis(self._L, self.M), self.dim)

    # -- Fourier side -----------------------------------------------------------

    @cached_property
    def spectrum(self) -> np.ndarray:
        """``f^(xi)`` on the FFT-ordered frequency grid (Riemann-sum transform)."""
        spec = np.fft.fftn(np.fft.ifftshift(self._values)) * self.h ** self.dim
        spec.setflags(write=False)
        return spec

    def measured_band(self, tol: float = BAND_TOL) -> float:
        """Smallest grid radius ``R`` with energy outside ``|xi|_inf <= R`` at most ``tol``."""
        power = np.abs(self.spectrum) ** 2
        total = power.sum()
        if total == 0:
            return 0.0
        rad = np.abs(self.frequencies()).max(axis=-1)
        order = np.argsort(rad, axis=None)
        r_sorted = rad.ravel()[order]
        tail = np.cumsum(power.ravel()[order][::-1])[::-1] / total
        # tail[i] = energy at radius >= r_sorted[i]
        ok = np.nonzero(tail <= tol)[0]
        if ok.size == 0:
            return float(r_sorted[-1])
        i = ok[0]
        return float(r_sorted[i - 1]) if i > 0 else 0.0

    def effective_band(self) -> float:
        return self._band if self._band is not None else self.measured_band()

    def with_band(self, band: float | None) -> "GridFunction":
        return GridFunction(self._values, self._L, band)

    def apply_multiplier(self, mult: np.ndarray, band: float | None = None) -> "GridFunction":
        """``F^{-1} (mult . F f)`` with ``mult`` on the FFT-ordered grid."""
        return GridFunction.from_spectrum(self.spectrum * mult, self._L, band)

    # -- arithmetic -------------------------------------------------------------

    def _check(self, other: "GridFunction") -> None:
        if not self.same_grid(other):
            raise InvalidShape("grid functions live on different grids")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return GridFunction(self._values + other._values, self._L)

    def __mul__(self, other) -> "GridFunction":
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self._values * other._values, self._L)
        return GridFunction(self._values * other, self._L, self._band)

    __rmul__ = __mul__

    def abs(self) -> "GridFunction":
        return GridFunction(np.abs(self._values), self._L)

    def refined(self, factor: int = 2) -> "GridFunction":
        """Same function on ``M * factor`` points (exact for band-limited data)."""
        if factor < 1 or factor & (factor - 1):
            raise InvalidShape("refinement factor must be a power of two")
        M2 = self.M * factor
        spec = np.zeros((M2,) * self.dim, dtype=complex)
        src = np.fft.fftshift(self.spectrum)
        lo = (M2 - self.M) // 2
        sl = tuple(slice(lo, lo + self.M) for _ in range(self.dim))
        spec[sl] = src
        if self.M % 2 == 0:
            # split the unpaired Nyquist bin so real data stays real
            for ax in range(self.dim):
                idx = [slice(None)] * self.dim
                idx[ax] = lo
                half = spec[tuple(idx)] / 2
                spec[tuple(idx)] = half
                idx[ax] = lo + self.M
                spec[tuple(idx)] = half
        return GridFunction.from_spectrum(np.fft.ifftshift(spec), self._L, self._band)

    def __repr__(self) -> str:
        return f"GridFunction(dim={self.dim}, L={self._L}, M={self.M}, band={self._band})"

    # -- CSV exchange -------------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# dim,L,M\n")
        buf.write(f"{self.dim},{self._L!r},{self.M}\n")
        buf.write("index,re,im\n")
        for i, v in enumerate(self._values.ravel()):
            buf.write(f"{i},{float(v.real)!r},{float(v.imag)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GridFunction":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if len(lines) < 3 or lines[0].replace(" ", "") != "#dim,L,M":
            raise ValueError("grid CSV must start with '# dim,L,M'")
        dim_s, L_s, M_s = lines[1].split(",")
        dim, L, M = int(dim_s), float(L_s), int(M_s)
        if lines[2].replace(" ", "") != "index,re,im":
            raise ValueError("missing 'index,re,im' header")
        vals = np.zeros(M ** dim, dtype=complex)
        seen = np.zeros(M ** dim, dtype=bool)
        for ln in lines[3:]:
            i_s, re_s, im_s = ln.split(",")
            i = int(i_s)
            vals[i] = complex(float(re_s), float(im_s))
            seen[i] = True
        if not seen.all():
            raise ValueError("grid CSV is missing samples")
        return cls(vals.reshape((M,) * dim), L)


def x_axis(L: float, M: int) -> np.ndarray:
    return -L / 2 + np.arange(M) * (L / M)


def xi_axis(L: float, M: int) -> np.ndarray:
    return np.fft.fftfreq(M, d=L / M)


def _axes_mesh(ax: np.ndarray, dim: int) -> np.ndarray:
    return np.stack(np.meshgrid(*([ax] * dim), indexing="ij"), axis=-1)


@dataclass(frozen=True)
class BandLimit:
    """Declared Fourier support ``{|xi|_inf <= R}``."""

    R: float

    def out_of_band(self, f: GridFunction) -> float:
        """Fraction of the energy of ``f^`` outside the declared cube."""
        power = np.abs(f.spectrum) ** 2
        total = power.sum()
        if total == 0:
            return 0.0
        outside = np.abs(f.frequencies()).max(axis=-1) > self.R + 1e-12
        return float(power[outside].sum() / total)

    def validate(self, f: GridFunction) -> None:
        if self.R < 0:
            raise BandExceeded("band radius must be >= 0")
        if self.R >= f.nyquist:
            raise BandExceeded(f"band {self.R} reaches the Nyquist radius {f.nyquist}")
        frac = self.out_of_band(f)
        if frac > BAND_TOL:
            raise BandExceeded(f"{frac:.3g} of the energy lies outside |xi| <= {self.R}")


# -- windows ------------------------------------------------------------------


def bump(t) -> np.ndarray:
    """``exp(1 - 1/(1 - t^2))`` on ``|t| < 1``, zero elsewhere; ``bump(0) = 1``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    ti = t[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - ti * ti))
    return out


def smooth_step(t) -> np.ndarray:
    """C-infinity step: 1 for ``t <= 0``, 0 for ``t >= 1``, flat at both ends."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
        b = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    return a / (a + b)


class WindowKind(str, enum.Enum):
    PARTITION_BUMP = "PartitionBump"
    ANALYSIS_WINDOW = "AnalysisWindow"
    COMB_ATOM = "CombAtom"
    RECONSTRUCTION_CUTOFF = "ReconstructionCutoff"


@dataclass(frozen=True)
class WindowSpec:
    """Fourier-side shape of a window.

    ``PartitionBump``
        ``rho = 1`` on ``|xi|_inf <= inner`` and ``0`` for ``|xi|_2 >= outer``
        (a tensor product of smooth steps supported in the cube of half side
        ``outer / sqrt(n)``).
    ``ReconstructionCutoff``
        ``1`` on ``|xi|_inf <= inner``, zero for ``|xi|_inf >= outer``.
    ``AnalysisWindow``
        ``phi^ = bump(|xi|_2 / outer)``, normalised so ``||phi||_2 = 1``;
        ``inner`` must be 0.
    ``CombAtom``
        ``phi = |psi|^2`` with ``psi^ = prod_i bump(2 xi_i / outer)``, so
        ``phi >= 0`` and ``supp phi^`` is the cube ``|xi|_inf <= outer``;
        normalised to ``phi(0) = 1``.  ``inner`` must be 0.
    """

    kind: WindowKind
    inner: float = 0.0
    outer: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", WindowKind(self.kind))
        if not self.outer > 0 or self.inner < 0 or self.inner >= self.outer:
            raise InvalidShape(f"need 0 <= inner < outer, got {self.inner}, {self.outer}")
        if self.kind in (WindowKind.ANALYSIS_WINDOW, WindowKind.COMB_ATOM) and self.inner:
            raise InvalidShape(f"{self.kind.value} has no plateau")

    def _check_dim(self, dim: int) -> None:
        if self.kind is WindowKind.PARTITION_BUMP and self.inner >= self.outer / np.sqrt(dim):
            raise InvalidShape("plateau cube does not fit inside the support ball")

    @property
    def band(self) -> float:
        """Half side of a cube containing the Fourier support."""
        return self.outer

    def profile(self, xi) -> np.ndarray:
        """Fourier profile at points ``xi`` of shape ``(..., n)`` (unnormalised)."""
        xi = np.asarray(xi, dtype=float)
        dim = xi.shape[-1]
        self._check_dim(dim)
        if self.kind is WindowKind.PARTITION_BUMP:
            return _tensor_step(xi, self.inner, self.outer / np.sqrt(dim))
        if self.kind is WindowKind.RECONSTRUCTION_CUTOFF:
            return _tensor_step(xi, self.inner, self.outer)
        if self.kind is WindowKind.ANALYSIS_WINDOW:
            return bump(np.sqrt(np.sum(xi * xi, axis=-1)) / self.outer)
        # CombAtom: psi^ itself; phi^ is its autocorrelation
        return np.prod(bump(2.0 * xi / self.outer), axis=-1)


def _tensor_step(xi: np.ndarray, inner: float, outer: float) -> np.ndarray:
    t = (np.abs(xi) - inner) / (outer - inner)
    return np.prod(smooth_step(t), axis=-1)


PARTITION_BUMP = WindowSpec(WindowKind.PARTITION_BUMP, 0.5, 1.0)
ANALYSIS_WINDOW = WindowSpec(WindowKind.ANALYSIS_WINDOW, 0.0, 1.0)
COMB_ATOM = WindowSpec(WindowKind.COMB_ATOM, 0.0, 0.125)
RECONSTRUCTION_CUTOFF = WindowSpec(WindowKind.RECONSTRUCTION_CUTOFF, 0.25, 1.0 / 3.0)


def make_window(spec: WindowSpec, dim: int = 1, L: float | None = None,
                M: int | None = None) -> GridFunction:
    """Spatial window on the grid whose Fourier transform is ``spec``'s profile."""
    L0, M0 = DEFAULT_GRIDS[dim]
    L = L0 if L is None else float(L)
    M = M0 if M is None else int(M)
    xi = _axes_mesh(xi_axis(L, M), dim)
    prof = spec.profile(xi)
    if spec.band >= M / (2 * L):
        raise BandExceeded("window band reaches the Nyquist radius")
    if spec.kind is WindowKind.COMB_ATOM:
        psi = GridFunction.from_spectrum(prof.astype(complex), L)
        phi = np.abs(psi.values) ** 2
        ctr = (M // 2,) * dim
        return GridFunction(phi / phi[ctr], L, band=spec.band)
    g = GridFunction.from_spectrum(prof.astype(complex), L, band=spec.band)
    if spec.kind is WindowKind.ANALYSIS_WINDOW:
        g = g * (1.0 / weighted_Lp_norm(g, 2))
        g = g.with_band(spec.band)
    return g


# -- frequency-uniform decomposition -----------------------------------------


class Partition:
    """Multipliers ``sigma_k = rho_k / sum_l rho_l`` for ``|k|_inf <= K``.

    ``rho_k = rho(. - k)`` with ``rho`` the partition bump.  The family sums
    to one on the covered band ``|xi|_inf <= K - 1``.
    """

    def __init__(self, K: int, dim: int = 1, L: float | None = None,
                 M: int | None = None, spec: WindowSpec = PARTITION_BUMP):
        if K < 1:
            raise ValueError("K must be >= 1")
        L0, M0 = DEFAULT_GRIDS[dim]
        self.K = int(K)
        self.dim = dim
        self.L = L0 if L is None else float(L)
        self.M = M0 if M is None else int(M)
        self.spec = spec
        # edge multipliers may be cut at the Nyquist radius; the covered band may not
        if K - 1 >= self.M / (2 * self.L):
            raise BandExceeded(f"covered band of K={K} reaches the Nyquist radius")
        spec._check_dim(dim)
        self._ax = xi_axis(self.L, self.M)
        if spec.kind is not WindowKind.PARTITION_BUMP:
            raise InvalidShape("a partition needs a PartitionBump spec")
        # rho is a tensor product, so the denominator factorises per axis
        half = spec.outer / np.sqrt(dim)
        span = int(np.ceil(np.abs(self._ax).max() + half)) + 1
        ls = np.arange(-span, span + 1)
        self._den_1d = sum(self._rho_1d(l) for l in ls)
        self._keys = [tuple(int(c) for c in k)
                      for k in np.ndindex(*((2 * K + 1,) * dim))]
        self._keys = [tuple(c - K for c in k) for k in self._keys]

    def _rho_1d(self, shift: float) -> np.ndarray:
        half = self.spec.outer / np.sqrt(self.dim)
        t = (np.abs(self._ax - shift) - self.spec.inner) / (half - self.spec.inner)
        return smooth_step(t)

    @property
    def keys(self) -> list[tuple[int, ...]]:
        return list(self._keys)

    @property
    def covered_radius(self) -> float:
        return float(self.K - 1)

    def matches(self, f: GridFunction) -> bool:
        return f.dim == self.dim and f.M == self.M and f.L == self.L

    def sigma(self, k) -> np.ndarray:
        """``sigma_k`` on the FFT-ordered frequency grid."""
        k = tuple(int(c) for c in np.atleast_1d(k))
        if len(k) != self.dim:
            raise ValueError("lattice point has the wrong dimension")
        if max(abs(c) for c in k) > self.K:
            raise OutOfRange(f"k={k} outside the partition range |k| <= {self.K}")
        out = np.ones((self.M,) * self.dim)
        for ax, c in enumerate(k):
            fac = self._rho_1d(c) / self._den_1d
            shape = [1] * self.dim
            shape[ax] = self.M
            out = out * fac.reshape(shape)
        return out

    def total(self) -> np.ndarray:
        return sum(self.sigma(k) for k in self._keys)

    def defect(self) -> float:
        """``max |sum_k sigma_k - 1|`` over the covered band."""
        xi = _axes_mesh(self._ax, self.dim)
        inside = np.abs(xi).max(axis=-1) <= self.covered_radius + 1e-12
        return float(np.abs(self.total()[inside] - 1.0).max())

    def support_leak(self) -> float:
        """Largest ``sigma_k(xi)`` with ``|xi - k|_2 >= 1``; zero by construction."""
        xi = _axes_mesh(self._ax, self.dim)
        worst = 0.0
        for k in self._keys:
            far = np.sqrt(np.sum((xi - np.array(k)) ** 2, axis=-1)) >= 1.0
            if far.any():
                worst = max(worst, float(self.sigma(k)[far].max()))
        return worst


def sigma_partition(K: int, dim: int = 1, L: float | None = None,
                    M: int | None = None) -> Partition:
    return Partition(K, dim, L, M)


def box_op(f: GridFunction, k, partition: Partition) -> GridFunction:
    """``F^{-1} sigma_k F f``."""
    if not partition.matches(f):
        raise InvalidShape("partition and function live on different grids")
    return f.apply_multiplier(partition.sigma(k))


# -- weighted norms -------------------------------------------------------------


def _lp(vals: np.ndarray, p: Exponent, cell: float, axis=None) -> np.ndarray | float:
    """``(sum |v|^p cell)^{1/p}``, or the max for ``p = inf``; scaled for stability."""
    if p.is_infinite:
        return np.max(vals, axis=axis)
    top = np.max(vals, axis=axis, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    ex = float(p.p)
    s = np.sum((vals / safe) ** ex, axis=axis, keepdims=True) * cell
    out = safe * s ** (1.0 / ex)
    out = np.where(top > 0, out, 0.0)
    return out.squeeze(axis) if axis is not None else float(out.squeeze())


def weighted_Lp_norm(f: GridFunction, p, t=0) -> float:
    """``(int |f(x)|^p <x>^{tp} dx)^{1/p}`` as a Riemann sum; grid max at ``p = inf``."""
    p = Exponent.of(p)
    t = float(as_rational(t))
    sq = np.sum(f.points() ** 2, axis=-1)
    vals = np.abs(f.values) * _bracket(sq, t)
    return float(_lp(vals.ravel(), p, f.h ** f.dim))


def _check_band(f: GridFunction, partition: Partition) -> None:
    band = f.effective_band()
    if band > partition.covered_radius + 1e-12:
        raise BandExceeded(f"band {band} exceeds the covered radius {partition.covered_radius}")


def box_decomposition(f: GridFunction, partition: Partition) -> list[GridFunction]:
    """``[box_k f for k in partition.keys]``."""
    if not partition.matches(f):
        raise InvalidShape("partition and function live on different grids")
    return [f.apply_multiplier(partition.sigma(k)) for k in partition.keys]


def discrete_mixed_norm(pieces, keys, p, q, t=0, s=0) -> float:
    """``(sum_k ||pieces_k||_{L_p,<.>^t}^q <k>^{sq})^{1/q}`` for a given decomposition."""
    p, q = Exponent.of(p), Exponent.of(q)
    norms = np.array([weighted_Lp_norm(g, p, t) for g in pieces])
    w = _bracket(np.sum(np.asarray(keys, dtype=float) ** 2, axis=-1), float(as_rational(s)))
    return float(_lp(norms * w, q, 1.0))


def modulation_norm_discrete(f: GridFunction, p, q, t=0, s=0,
                             partition: Partition | None = None) -> float:
    """``(sum_k ||box_k f||_{L_p,<.>^t}^q <k>^{sq})^{1/q}``.

    Without an explicit partition one just wide enough for the band of ``f``
    is built on its grid.
    """
    if partition is None:
        partition = sigma_partition(int(np.floor(f.effective_band())) + 2, f.dim, f.L, f.M)
    if not partition.matches(f):
        raise InvalidShape("partition and function live on different grids")
    _check_band(f, partition)
    return discrete_mixed_norm(box_decomposition(f, partition), partition.keys, p, q, t, s)


# -- short-time Fourier transform ------------------------------------------------


def _origin_first(vals: np.ndarray) -> np.ndarray:
    """Reorder samples so index 0 is ``x = 0``."""
    return np.fft.ifftshift(vals)


def _xi_bins(f: GridFunction, radius: float, stride: int) -> np.ndarray:
    """Integer bin offsets ``b`` (``xi = b / L``) with ``|xi|_inf <= radius``."""
    nmax = min(int(np.floor(radius * f.L + 1e-9)), f.M // 2 - 1)
    ax = np.arange(-nmax, nmax + 1)
    ax = ax[ax % stride == 0]
    return _axes_mesh(ax, f.dim).reshape(-1, f.dim)


def _x_coords(f: GridFunction, stride: int) -> np.ndarray:
    """Coordinates of origin-first samples kept at the given stride."""
    idx = np.arange(0, f.M, stride)
    ax = np.where(idx < f.M // 2, idx, idx - f.M) * f.h
    return _axes_mesh(ax, f.dim).reshape(-1, f.dim)


def stft(f: GridFunction, window: GridFunction, x_stride: int = 1,
         xi_bins=None) -> np.ndarray:
    """``V_phi f(x, xi) = int f(y) conj(phi(y - x)) e^{-2 pi i y.xi} dy``.

    Rows follow ``xi_bins`` (integer offsets; ``xi = b / L``) and columns the
    sample points ``x`` taken every ``x_stride`` samples in origin-first order
    (see :func:`stft_magnitude` for their coordinates).  Computed per
    frequency as a circular cross-correlation through the FFT.
    """
    if not f.same_grid(window):
        raise InvalidShape("window and function live on different grids")
    if xi_bins is None:
        xi_bins = _xi_bins(f, f.effective_band() + window.effective_band(), 1)
    xi_bins = np.atleast_2d(np.asarray(xi_bins))
    if xi_bins.shape[-1] != f.dim or not np.issubdtype(xi_bins.dtype, np.integer):
        raise GridMisaligned("frequencies must be whole bins of spacing 1/L")
    F = np.fft.fftn(_origin_first(f.values))
    Phi_c = np.conj(np.fft.fftn(_origin_first(window.values)))
    sl = tuple(slice(None, None, x_stride) for _ in range(f.dim))
    axes = tuple(range(f.dim))
    rows = []
    for b in xi_bins:
        prod = np.roll(F, tuple(-int(c) for c in b), axis=axes) * Phi_c
        rows.append(np.fft.ifftn(prod)[sl].ravel())
    return np.array(rows) * f.h ** f.dim


@dataclass(frozen=True)
class STFTMagnitude:
    """``|V_phi f|`` on a sampled time-frequency grid with Riemann cells."""

    values: np.ndarray  # (n_xi, n_x)
    x: np.ndarray  # (n_x, dim)
    xi: np.ndarray  # (n_xi, dim)
    dx: float
    dxi: float


def stft_magnitude(f: GridFunction, window: GridFunction, x_stride: int | None = None,
                   xi_stride: int | None = None, xi_radius: float | None = None) -> STFTMagnitude:
    """Sampled ``|V_phi f|`` covering every frequency where it can be nonzero.

    ``V_phi f(., xi)`` vanishes unless ``xi`` lies within
    ``band(f) + band(phi)``, so only those rows are computed.
    """
    if x_stride is None:
        x_stride = 1 if f.dim == 1 else 2
    if xi_stride is None:
        xi_stride = 1 if f.dim == 1 else max(1, int(f.L) // 8)
    if xi_radius is None:
        xi_radius = f.effective_band() + window.effective_band()
    bins = _xi_bins(f, xi_radius, xi_stride)
    V = np.abs(stft(f, window, x_stride, bins))
    return STFTMagnitude(V, _x_coords(f, x_stride), bins / f.L,
                         (f.h * x_stride) ** f.dim, (xi_stride / f.L) ** f.dim)


def mixed_norm(V: STFTMagnitude, p, q, t=0, s=0, order: str = "modulation") -> float:
    """Weighted mixed norm of a sampled STFT magnitude.

    ``order="modulation"``: inner ``L_p`` in ``x`` (weight ``<x>^t``), outer
    ``L_q`` in ``xi`` (weight ``<xi>^s``).  ``order="wiener"`` swaps the
    integration order and keeps each weight on its own variable.
    """
    p, q = Exponent.of(p), Exponent.of(q)
    wx = _bracket(np.sum(V.x ** 2, axis=-1), float(as_rational(t)))
    wxi = _bracket(np.sum(V.xi ** 2, axis=-1), float(as_rational(s)))
    A = V.values * wx[None, :] * wxi[:, None]
    if order == "modulation":
        inner = _lp(A, p, V.dx, axis=1)
        return float(_lp(inner, q, V.dxi))
    if order == "wiener":
        inner = _lp(A, q, V.dxi, axis=0)
        return float(_lp(inner, p, V.dx))
    raise ValueError("order must be 'modulation' or 'wiener'")


def modulation_norm_continuous(f: GridFunction, window: GridFunction, p, q, t=0, s=0,
                               x_stride: int | None = None,
                               xi_stride: int | None = None) -> float:
    """``|| ||V_phi f||_{L_{x;p,<.>^t}} ||_{L_{xi;q,<.>^s}}`` by nested Riemann sums."""
    return mixed_norm(stft_magnitude(f, window, x_stride, xi_stride), p, q, t, s)


def wiener_norm(f: GridFunction, window: GridFunction, p, q, t=0, s=0,
                x_stride: int | None = None, xi_stride: int | None = None) -> float:
    """``|| ||V_phi f||_{L_{xi;q,<.>^s}} ||_{L_{x;p,<.>^t}}`` (reversed order)."""
    return mixed_norm(stft_magnitude(f, window, x_stride, xi_stride), p, q, t, s,
                      order="wiener")


def fourier_transform(f: GridFunction) -> GridFunction:
    """``f^`` as a grid function on the dual torus of period ``M / L``.

    The FFT frequency grid of ``f`` (spacing ``1/L``) becomes the sample grid
    of the result, so ``|V_{phi^} f^(xi, -x)| = |V_phi f(x, xi)|`` holds
    between the two grids.
    """
    Ld = f.M / f.L
    return GridFunction(np.fft.fftshift(f.spectrum), Ld)


# -- lattice trains and sampling ------------------------------------------------


def _spike_train(values: dict, dim: int, L: float, M: int) -> np.ndarray:
    """Origin-first array with ``values[k]`` at the sample of integer point ``k``."""
    step = _integer_step(L, M)
    arr = np.zeros((M,) * dim, dtype=complex)
    for k, v in values.items():
        idx = tuple((int(c) * step) % M for c in k)
        arr[idx] += v
    return arr


def _integer_step(L: float, M: int) -> int:
    step = M / L
    if abs(step - round(step)) > 1e-12 or abs(L / 2 - round(L / 2)) > 1e-12:
        raise GridMisaligned(f"integer points are not grid points for L={L}, M={M}")
    return int(round(step))


def _check_fits(a: Sequence, L: float) -> None:
    if a.is_empty:
        return
    pts = a.support()
    diam = int((pts.max(axis=0) - pts.min(axis=0)).max())
    if diam > L / 8 or np.abs(pts).max() >= L / 2:
        raise PeriodOverflow(f"support diameter {diam} needs a period of at least {8 * diam}")


def comb(a: Sequence, atom: GridFunction) -> GridFunction:
    """``sum_k a_k phi(x - k)`` (circular on the torus)."""
    if a.dim != atom.dim:
        raise InvalidShape("sequence and atom dimensions differ")
    _check_fits(a, atom.L)
    spikes = _spike_train(a.to_dict(), atom.dim, atom.L, atom.M)
    out = np.fft.ifftn(np.fft.fftn(spikes) * np.fft.fftn(_origin_first(atom.values)))
    return GridFunction(np.fft.fftshift(out), atom.L, atom.band)


def gabor_comb(a: Sequence, h: GridFunction) -> GridFunction:
    """``h(x) sum_k a_k e^{2 pi i k.x}``."""
    if a.dim != h.dim:
        raise InvalidShape("sequence and atom dimensions differ")
    hb = h.effective_band()
    band = hb + (a.support_bound if not a.is_empty else 0)
    if band >= h.nyquist:
        raise PeriodOverflow(f"frequencies up to {band} exceed the Nyquist radius")
    x = h.points()
    acc = np.zeros(h.values.shape, dtype=complex)
    for k, v in a.items():
        acc += v * np.exp(2j * np.pi * (x @ np.array(k, dtype=float)))
    return GridFunction(h.values * acc, h.L, band if h.band is not None else None)


@dataclass(frozen=True)
class Samples:
    """Complex values ``f(k)`` on the integer points of one period."""

    values: np.ndarray
    offset: tuple[int, ...]

    def to_dict(self) -> dict:
        out = {}
        for idx in np.ndindex(self.values.shape):
            v = self.values[idx]
            if v != 0:
                out[tuple(int(i + o) for i, o in zip(idx, self.offset))] = complex(v)
        return out


def sample(f: GridFunction) -> Samples:
    """``f(k)`` for integer ``k`` in ``[-L/2, L/2)^n``."""
    step = _integer_step(f.L, f.M)
    sl = tuple(slice(None, None, step) for _ in range(f.dim))
    half = int(round(f.L / 2))
    return Samples(np.array(f.values[sl]), (-half,) * f.dim)


def sample_values(f: GridFunction) -> Sequence:
    """``{|f(k)|}`` on one period, thresholded at ``1e-12`` of the peak."""
    s = sample(f)
    mag = np.abs(s.values)
    top = mag.max() if mag.size else 0.0
    mag = np.where(mag > 1e-12 * top, mag, 0.0)
    return Sequence(mag, s.offset)


def shannon_reconstruct(samples, cutoff: GridFunction) -> GridFunction:
    """``sum_k f(k) psi(x - k)`` with ``psi`` the reconstruction cutoff.

    ``samples`` is a :class:`Samples` (complex values, as from :func:`sample`)
    or a nonnegative :class:`Sequence`.
    """
    if isinstance(samples, Samples):
        vals = samples.to_dict()
    elif isinstance(samples, Sequence):
        if samples.dim != cutoff.dim:
            raise InvalidShape("sample and cutoff dimensions differ")
        vals = samples.to_dict()
    else:
        raise TypeError("samples must be Samples or Sequence")
    half = cutoff.L / 2
    if any(abs(c) > half or c == half for k in vals for c in k):
        raise PeriodOverflow("samples lie outside one period")
    spikes = _spike_train(vals, cutoff.dim, cutoff.L, cutoff.M)
    out = np.fft.ifftn(np.fft.fftn(spikes) * np.fft.fftn(_origin_first(cutoff.values)))
    return GridFunction(np.fft.fftshift(out), cutoff.L)


def convolve_grid(f: GridFunction, g: GridFunction) -> GridFunction:
    """``(f * g)(x) = int f(y) g(x - y) dy`` on the torus."""
    if not f.same_grid(g):
        raise InvalidShape("grid functions live on different grids")
    return GridFunction.from_spectrum(f.spectrum * g.spectrum, f.L)


def wraparound(f: GridFunction) -> float:
    """``max |f|`` on the outer eighth of the period relative to ``max |f|``."""
    mag = np.abs(f.values)
    top = mag.max()
    if top == 0:
        return 0.0
    edge = np.abs(f.points()).max(axis=-1) >= 3 * f.L / 8
    return float(mag[edge].max() / top)


def band_limited_corpus(count: int = 20, seed: int = 0, dim: int = 1,
                        L: float | None = None, M: int | None = None,
                        max_band: float = 3.0, nonnegative: bool = False) -> list[GridFunction]:
    """Random band-limited test functions: lattice combs and Gabor combs.

    Coefficients are drawn with a seeded generator, so the corpus is
    reproducible.  Every member has band at most ``max_band``.
    """
    L0, M0 = DEFAULT_GRIDS[dim]
    L = L0 if L is None else L
    M = M0 if M is None else M
    rng = np.random.default_rng(seed)
    atom = make_window(COMB_ATOM, dim, L, M)
    reach = max(1, int(L // 16))
    kmax = max(0, int(np.floor(max_band - COMB_ATOM.outer)))
    out = []
    for i in range(count):
        n_terms = int(rng.integers(1, 4))
        coeffs = {}
        for _ in range(n_terms):
            k = tuple(int(c) for c in rng.integers(-reach, reach + 1, size=dim))
            coeffs[k] = coeffs.get(k, 0.0) + float(rng.uniform(0.2, 1.0))
        base = comb(Sequence.from_dict(coeffs, dim=dim), atom)
        if nonnegative or i % 2 == 0:
            f = base
        else:
            freqs = {tuple(int(c) for c in rng.integers(-kmax, kmax + 1, size=dim)):
                     float(rng.uniform(0.2, 1.0)) for _ in range(int(rng.integers(1, 4)))}
            f = gabor_comb(Sequence.from_dict(freqs, dim=dim), base)
        out.append(f.with_band(min(max_band, f.effective_band())) if f.band is None else f)
    return out
