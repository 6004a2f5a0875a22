"""Real trigonometric polynomials a0/2 + sum_k (a_k cos(k w x) + b_k sin(k w x))."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


def next_pow2(n: int) -> int:
    return 1 << max(0, int(math.ceil(math.log2(max(n, 1)))))


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """Element of Q(n) on a circle of the given circumference.

    ``a`` and ``b`` hold the coefficients for k = 1..n; the angular unit is
    ``2*pi/circumference`` so that every mode is periodic on the domain.
    """

    a0: float
    a: np.ndarray
    b: np.ndarray
    circumference: float = TWO_PI
    _freq: float = field(init=False, repr=False)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).ravel()
        b = np.asarray(self.b, dtype=float).ravel()
        if a.shape != b.shape:
            raise ValueError("cosine and sine coefficient lists differ in length")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "_freq", TWO_PI / self.circumference)

    @property
    def degree(self) -> int:
        return len(self.a)

    @classmethod
    def zero(cls, degree: int = 0, circumference: float = TWO_PI) -> "TrigPolynomial":
        return cls(0.0, np.zeros(degree), np.zeros(degree), circumference)

    @classmethod
    def from_complex(cls, c: np.ndarray, circumference: float = TWO_PI) -> "TrigPolynomial":
        """Build from one-sided complex coefficients c_0..c_n of sum c_k e^{ikwx} + c.c."""
        c = np.asarray(c, dtype=complex)
        return cls(2.0 * c[0].real, 2.0 * c[1:].real, -2.0 * c[1:].imag, circumference)

    def complex_coeffs(self) -> np.ndarray:
        c = np.empty(self.degree + 1, dtype=complex)
        c[0] = 0.5 * self.a0
        c[1:] = 0.5 * (self.a - 1j * self.b)
        return c

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, 0.5 * self.a0)
        if self.degree == 0:
            return out
        k = np.arange(1, self.degree + 1)
        phase = self._freq * np.multiply.outer(x, k)
        out = out + np.cos(phase) @ self.a + np.sin(phase) @ self.b
        return out

    def samples(self, n_points: int, offset: float = 0.0) -> np.ndarray:
        """Values at x_j = (j + offset) * L / N via one inverse real FFT."""
        if n_points <= 2 * self.degree:
            raise ValueError(f"{n_points} samples cannot resolve degree {self.degree}")
        spec = np.zeros(n_points // 2 + 1, dtype=complex)
        c = self.complex_coeffs()
        if offset:
            c = c * np.exp(TWO_PI * 1j * np.arange(len(c)) * offset / n_points)
        spec[: len(c)] = c * n_points
        return np.fft.irfft(spec, n=n_points)

    def shift(self, h: float) -> "TrigPolynomial":
        """Coefficients of x -> U(x + h)."""
        k = np.arange(1, self.degree + 1)
        ch, sh = np.cos(self._freq * k * h), np.sin(self._freq * k * h)
        return TrigPolynomial(
            self.a0, self.a * ch + self.b * sh, self.b * ch - self.a * sh, self.circumference
        )

    def padded(self, degree: int) -> "TrigPolynomial":
        if degree < self.degree:
            return TrigPolynomial(self.a0, self.a[:degree], self.b[:degree], self.circumference)
        extra = degree - self.degree
        return TrigPolynomial(
            self.a0,
            np.concatenate([self.a, np.zeros(extra)]),
            np.concatenate([self.b, np.zeros(extra)]),
            self.circumference,
        )

    def effective_degree(self, tol: float = 0.0) -> int:
        """Largest k with a nonzero mode (0 for a constant)."""
        mag = np.hypot(self.a, self.b)
        nz = np.nonzero(mag > tol)[0]
        return int(nz[-1]) + 1 if nz.size else 0

    def _check(self, other: "TrigPolynomial"):
        if not math.isclose(self.circumference, other.circumference):
            raise ValueError("polynomials live on different circles")

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        self._check(other)
        n = max(self.degree, other.degree)
        u, v = self.padded(n), other.padded(n)
        return TrigPolynomial(u.a0 + v.a0, u.a + v.a, u.b + v.b, self.circumference)

    def __neg__(self) -> "TrigPolynomial":
        return TrigPolynomial(-self.a0, -self.a, -self.b, self.circumference)

    def __sub__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        return self + (-other)

    def __mul__(self, c: float) -> "TrigPolynomial":
        return TrigPolynomial(c * self.a0, c * self.a, c * self.b, self.circumference)

    __rmul__ = __mul__

    def max_coeff_diff(self, other: "TrigPolynomial") -> float:
        n = max(self.degree, other.degree)
        u, v = self.padded(n), other.padded(n)
        diffs = [abs(u.a0 - v.a0) / 2.0]
        if n:
            diffs += [np.max(np.abs(u.a - v.a)), np.max(np.abs(u.b - v.b))]
        return float(max(diffs))

    def to_rows(self) -> list[tuple[int, float, float]]:
        """CSV rows (k, a_k, b_k); row 0 carries a0 and a zero sine term."""
        rows = [(0, self.a0, 0.0)]
        rows += [(k + 1, float(self.a[k]), float(self.b[k])) for k in range(self.degree)]
        return rows

    @classmethod
    def from_rows(cls, rows, circumference: float = TWO_PI) -> "TrigPolynomial":
        rows = sorted((int(k), float(a), float(b)) for k, a, b in rows)
        n = rows[-1][0] if rows else 0
        a, b = np.zeros(n), np.zeros(n)
        a0 = 0.0
        for k, ak, bk in rows:
            if k == 0:
                a0 = ak
            else:
                a[k - 1], b[k - 1] = ak, bk
        return cls(a0, a, b, circumference)
