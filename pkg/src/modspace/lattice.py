"""Finitely supported nonnegative sequences on ``Z^n``.

A :class:`Sequence` stores its values densely on the bounding box of its
support (``values[idx]`` sits at lattice point ``offset + idx``); entries equal
to zero are treated as absent.  Norms use the power weight ``<k>^s``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

import numpy as np
from scipy import signal

from .indices import Exponent, as_rational

__all__ = [
    "DIRECT_WORK_LIMIT",
    "DimensionMismatch",
    "PowerWeightFn",
    "Sequence",
    "weighted_norm",
    "convolve",
    "pointwise_product",
]


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class PowerWeightFn:
    """``k -> <k>^s = (1 + |k|^2)^(s/2)``."""

    s: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "s", as_rational(self.s))

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        sq = np.sum(pts * pts, axis=-1)
        if self.s == 0:
            return np.ones_like(sq)
        return (1.0 + sq) ** (float(self.s) / 2.0)


def _as_weight(w) -> PowerWeightFn:
    if isinstance(w, PowerWeightFn):
        return w
    return PowerWeightFn(as_rational(w))


class Sequence:
    """Immutable nonnegative function on ``Z^n`` with finite support."""

    __slots__ = ("_values", "_offset")

    def __init__(self, values, offset=None):
        arr = np.array(values, dtype=float)
        if arr.ndim == 0:
            raise ValueError("values must have at least one axis")
        if not np.all(np.isfinite(arr)):
            raise ValueError("sequence values must be finite")
        if np.any(arr < 0):
            raise ValueError("sequence values must be nonnegative")
        if offset is None:
            offset = (0,) * arr.ndim
        offset = tuple(int(o) for o in offset)
        if len(offset) != arr.ndim:
            raise DimensionMismatch("offset length must equal the number of axes")
        arr, offset = _trim(arr, offset)
        arr.setflags(write=False)
        self._values = arr
        self._offset = offset

    # -- construction ---------------------------------------------------------

    @classmethod
    def empty(cls, dim: int) -> "Sequence":
        return cls(np.zeros((1,) * dim))

    @classmethod
    def delta(cls, k, value: float = 1.0) -> "Sequence":
        k = tuple(int(c) for c in np.atleast_1d(k))
        return cls(np.full((1,) * len(k), float(value)), k)

    @classmethod
    def from_dict(cls, entries: Mapping, dim: int | None = None) -> "Sequence":
        keys = [tuple(int(c) for c in np.atleast_1d(k)) for k in entries]
        if not keys:
            if dim is None:
                raise ValueError("dimension needed for an empty sequence")
            return cls.empty(dim)
        dims = {len(k) for k in keys}
        if len(dims) != 1 or (dim is not None and dims != {dim}):
            raise DimensionMismatch("lattice points of inconsistent dimension")
        pts = np.array(keys)
        lo = pts.min(axis=0)
        arr = np.zeros(tuple(pts.max(axis=0) - lo + 1))
        for key, val in zip(keys, entries.values()):
            arr[tuple(np.array(key) - lo)] = val
        return cls(arr, tuple(lo))

    # -- accessors --------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self._values.ndim

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def offset(self) -> tuple[int, ...]:
        return self._offset

    @property
    def is_empty(self) -> bool:
        return not np.any(self._values)

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self._values))

    @property
    def support_bound(self) -> int:
        """``max |k|_inf`` over the support (0 for the empty sequence)."""
        if self.is_empty:
            return 0
        pts = self.support()
        return int(np.abs(pts).max())

    def support(self) -> np.ndarray:
        """Support points as an integer array of shape ``(m, n)``."""
        idx = np.argwhere(self._values > 0)
        return idx + np.array(self._offset)

    def items(self) -> Iterator[tuple[tuple[int, ...], float]]:
        for pt in self.support():
            idx = tuple(pt - np.array(self._offset))
            yield tuple(int(c) for c in pt), float(self._values[idx])

    def to_dict(self) -> dict:
        return dict(self.items())

    def __getitem__(self, k) -> float:
        k = np.atleast_1d(np.asarray(k, dtype=int))
        if k.size != self.dim:
            raise DimensionMismatch("lattice point has the wrong dimension")
        idx = k - np.array(self._offset)
        if np.any(idx < 0) or np.any(idx >= self._values.shape):
            return 0.0
        return float(self._values[tuple(idx)])

    def grid_points(self) -> np.ndarray:
        """Lattice coordinates of every stored slot, shape ``values.shape + (n,)``."""
        axes = [np.arange(o, o + m) for o, m in zip(self._offset, self._values.shape)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sequence):
            return NotImplemented
        return (self.dim == other.dim and self._offset == other._offset
                and self._values.shape == other._values.shape
                and np.array_equal(self._values, other._values))

    def __hash__(self):
        return hash((self._offset, self._values.shape, self._values.tobytes()))

    def allclose(self, other: "Sequence", rtol: float = 1e-12, atol: float = 0.0) -> bool:
        if self.dim != other.dim:
            return False
        keys = set(self.to_dict()) | set(other.to_dict())
        return all(np.isclose(self[k], other[k], rtol=rtol, atol=atol) for k in keys)

    def scaled(self, c: float) -> "Sequence":
        if c < 0:
            raise ValueError("scale factor must be nonnegative")
        return Sequence(self._values * c, self._offset)

    def __repr__(self) -> str:
        return (f"Sequence(dim={self.dim}, support={self.support_size}, "
                f"offset={self._offset})")

    # -- CSV exchange -----------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"k{i + 1}" for i in range(self.dim)] + ["value"])
        for k, v in self.items():
            w.writerow([*k, repr(v)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Sequence":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty CSV")
        header = [h.strip() for h in rows[0]]
        dim = len(header) - 1
        if dim < 1 or header[-1] != "value" or header[:-1] != [f"k{i + 1}" for i in range(dim)]:
            raise ValueError(f"bad lattice CSV header: {rows[0]}")
        entries = {}
        for row in rows[1:]:
            if not row:
                continue
            if len(row) != dim + 1:
                raise ValueError(f"bad lattice CSV row: {row}")
            entries[tuple(int(c) for c in row[:-1])] = float(row[-1])
        return cls.from_dict(entries, dim=dim)


def _trim(arr: np.ndarray, offset: tuple[int, ...]):
    nz = np.argwhere(arr > 0)
    if nz.size == 0:
        return np.zeros((1,) * arr.ndim), (0,) * arr.ndim
    lo = nz.min(axis=0)
    hi = nz.max(axis=0) + 1
    sl = tuple(slice(a, b) for a, b in zip(lo, hi))
    return np.ascontiguousarray(arr[sl]), tuple(int(o + l) for o, l in zip(offset, lo))


def weighted_norm(a: Sequence, p, w=0) -> float:
    """``(sum_k |a_k|^p <k>^{sp})^{1/p}``, or ``sup_k |a_k| <k>^s`` for ``p = inf``.

    ``w`` is a :class:`PowerWeightFn` or the weight order ``s``.
    """
    p = Exponent.of(p)
    w = _as_weight(w)
    if a.is_empty:
        return 0.0
    vals = a.values
    if w.s != 0:
        vals = vals * w(a.grid_points())
    if p.is_infinite:
        return float(vals.max())
    top = vals.max()
    x = vals[vals > 0] / top
    ex = float(p.p)
    return float(top * np.sum(x ** ex) ** (1.0 / ex))


def _same_dim(a: Sequence, b: Sequence) -> None:
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions differ: {a.dim} vs {b.dim}")


DIRECT_WORK_LIMIT = 2 ** 26


def convolve(a: Sequence, b: Sequence, method: str = "auto") -> Sequence:
    """Finite convolution ``(a * b)(k) = sum_j a_j b_{k-j}``.

    ``method="direct"`` sums every product; ``"fft"`` goes through the FFT,
    whose rounding is about ``1e-16`` times the peak value.  ``"auto"`` sums
    directly unless the number of products exceeds ``DIRECT_WORK_LIMIT``.
    """
    _same_dim(a, b)
    if a.is_empty or b.is_empty:
        return Sequence.empty(a.dim)
    if method not in ("auto", "direct", "fft"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        work = a.values.size * b.values.size
        method = "direct" if work <= DIRECT_WORK_LIMIT else "fft"
    if method == "direct":
        vals = signal.convolve(a.values, b.values, mode="full", method="direct")
    else:
        vals = signal.fftconvolve(a.values, b.values, mode="full")
    # the exact result is nonnegative; clip rounding noise
    vals = np.maximum(vals, 0.0)
    offset = tuple(x + y for x, y in zip(a.offset, b.offset))
    return Sequence(vals, offset)


def pointwise_product(a: Sequence, b: Sequence) -> Sequence:
    """``(a . b)(k) = a_k b_k``; support is the intersection of supports."""
    _same_dim(a, b)
    lo = np.maximum(a.offset, b.offset)
    hi = np.minimum(np.array(a.offset) + a.values.shape,
                    np.array(b.offset) + b.values.shape)
    if np.any(hi <= lo):
        return Sequence.empty(a.dim)
    sa = tuple(slice(l - o, h - o) for l, h, o in zip(lo, hi, a.offset))
    sb = tuple(slice(l - o, h - o) for l, h, o in zip(lo, hi, b.offset))
    return Sequence(a.values[sa] * b.values[sb], tuple(lo))
