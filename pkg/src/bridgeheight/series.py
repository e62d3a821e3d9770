"""Truncated power series and Newton expansion of the conjugate kernel branches.

At the square-root singularity ``z = 1`` of a centered walk the two kernel
roots ``u_1`` and ``v_1`` meet at ``u = 1``.  With ``z = 1 - X**2`` both are
power series in ``X`` and ``v_1(X) = u_1(-X)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from ._num import DEFAULT_PRECISION, dec, to_mp
from .errors import BranchPointError, NotCenteredError, NotLukasiewiczError, PrecisionError
from .walk import JumpPolynomial


def _is_exact(values) -> bool:
    return all(isinstance(v, (Fraction, int)) for v in values)


@dataclass(frozen=True)
class TruncatedSeries:
    """``a_0 + a_1 v + ... + a_N v**N + O(v**(N+1))``.

    Coefficients are Fractions (exact) or mpmath numbers.  Arithmetic
    truncates to the smaller operand order.
    """

    coeffs: tuple
    var: str = "X"

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def exact(self) -> bool:
        return _is_exact(self.coeffs)

    def __getitem__(self, i: int):
        return self.coeffs[i] if i <= self.order else self._zero()

    def _zero(self):
        return Fraction(0) if self.exact else mpmath.mpf(0)

    @classmethod
    def constant(cls, value, order: int, var: str = "X") -> "TruncatedSeries":
        zero = Fraction(0) if isinstance(value, (Fraction, int)) else mpmath.mpf(0)
        return cls((value,) + (zero,) * order, var)

    @classmethod
    def variable(cls, order: int, var: str = "X", exact: bool = True) -> "TruncatedSeries":
        zero, one = (Fraction(0), Fraction(1)) if exact else (mpmath.mpf(0), mpmath.mpf(1))
        c = [zero] * (order + 1)
        if order >= 1:
            c[1] = one
        return cls(tuple(c), var)

    def truncate(self, order: int) -> "TruncatedSeries":
        order = min(order, self.order)
        return TruncatedSeries(self.coeffs[: order + 1], self.var)

    def padded(self, order: int) -> "TruncatedSeries":
        """Extend with zeros (only valid when the tail is known to vanish)."""
        z = self._zero()
        return TruncatedSeries(tuple(self.coeffs) + (z,) * (order - self.order), self.var)

    def to_float(self) -> "TruncatedSeries":
        return TruncatedSeries(tuple(to_mp(a) for a in self.coeffs), self.var)

    def valuation(self, tol=0) -> int:
        """Index of the first coefficient larger than ``tol`` in modulus."""
        for i, a in enumerate(self.coeffs):
            if abs(a) > tol:
                return i
        return self.order + 1

    # -- arithmetic --------------------------------------------------------
    def _check(self, other: "TruncatedSeries") -> int:
        if self.var != other.var:
            raise ValueError(f"variable mismatch {self.var} vs {other.var}")
        return min(self.order, other.order)

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries((self.coeffs[0] + other,) + self.coeffs[1:], self.var)
        n = self._check(other)
        return TruncatedSeries(tuple(self.coeffs[i] + other.coeffs[i] for i in range(n + 1)), self.var)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(tuple(-a for a in self.coeffs), self.var)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(tuple(a * other for a in self.coeffs), self.var)
        n = self._check(other)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(n + 1):
            acc = a[0] * b[k]
            for i in range(1, k + 1):
                acc += a[i] * b[k - i]
            out.append(acc)
        return TruncatedSeries(tuple(out), self.var)

    __rmul__ = __mul__

    def inverse(self) -> "TruncatedSeries":
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("series with zero constant term has no inverse")
        inv0 = 1 / a[0] if not isinstance(a[0], int) else Fraction(1, a[0])
        b = [inv0]
        for k in range(1, self.order + 1):
            acc = a[1] * b[k - 1]
            for i in range(2, k + 1):
                acc += a[i] * b[k - i]
            b.append(-acc * inv0)
        return TruncatedSeries(tuple(b), self.var)

    def __truediv__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self * (1 / other if not isinstance(other, int) else Fraction(1, other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers")
        if k < 0:
            return self.inverse() ** (-k)
        out = TruncatedSeries.constant(Fraction(1) if self.exact else mpmath.mpf(1), self.order, self.var)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def derivative(self) -> "TruncatedSeries":
        """Term-wise derivative; the order drops by one."""
        c = tuple(i * self.coeffs[i] for i in range(1, self.order + 1))
        return TruncatedSeries(c or (self._zero(),), self.var)

    def integral(self, constant=0) -> "TruncatedSeries":
        c = [constant] + [
            (Fraction(self.coeffs[i]) / (i + 1)) if self.exact else self.coeffs[i] / (i + 1)
            for i in range(self.order + 1)
        ]
        return TruncatedSeries(tuple(c), self.var)

    def log(self) -> "TruncatedSeries":
        a0 = self.coeffs[0]
        if a0 == 0:
            raise ZeroDivisionError("log of a series with zero constant term")
        if self.exact:
            if a0 != 1:
                raise ValueError("exact log needs constant term 1")
            c0 = Fraction(0)
        else:
            c0 = mpmath.log(a0)
        return (self.derivative() / self.truncate(self.order - 1)).integral(c0)

    def exp(self) -> "TruncatedSeries":
        a = self.coeffs
        if self.exact:
            if a[0] != 0:
                raise ValueError("exact exp needs zero constant term")
            b = [Fraction(1)]
        else:
            b = [mpmath.exp(a[0])]
        for k in range(1, self.order + 1):
            acc = 1 * a[1] * b[k - 1]
            for i in range(2, k + 1):
                acc += i * a[i] * b[k - i]
            b.append(acc / k if not self.exact else Fraction(acc) / k)
        return TruncatedSeries(tuple(b), self.var)

    def sqrt(self, root0=None) -> "TruncatedSeries":
        """Square root; ``root0`` selects the branch of the constant term."""
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("sqrt of a series with zero constant term")
        if root0 is None:
            if self.exact:
                num, den = a[0].numerator, a[0].denominator
                rn, rd = math.isqrt(num), math.isqrt(den)
                if rn * rn != num or rd * rd != den:
                    raise ValueError("constant term is not a rational square")
                root0 = Fraction(rn, rd)
            else:
                root0 = mpmath.sqrt(a[0])
        if root0 * root0 - a[0] != 0 and self.exact:
            raise ValueError("root0 is not a square root of the constant term")
        b = [root0]
        for k in range(1, self.order + 1):
            acc = a[k]
            for i in range(1, k):
                acc -= b[i] * b[k - i]
            b.append(acc / (2 * root0))
        return TruncatedSeries(tuple(b), self.var)

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """``self(inner(v))``; requires ``inner`` to have zero constant term."""
        if inner.coeffs[0] != 0:
            raise ValueError("inner series must have zero constant term")
        n = min(self.order, inner.order)
        inner = inner.truncate(n)
        out = TruncatedSeries.constant(self.coeffs[n], n, inner.var)
        for i in range(n - 1, -1, -1):
            out = out * inner + self.coeffs[i]
        return out

    def reflect(self) -> "TruncatedSeries":
        """``f(-v)``."""
        return TruncatedSeries(tuple(a if i % 2 == 0 else -a for i, a in enumerate(self.coeffs)), self.var)

    def rescale(self, factor) -> "TruncatedSeries":
        """``f(factor * v)``."""
        return TruncatedSeries(tuple(a * factor**i for i, a in enumerate(self.coeffs)), self.var)

    def __call__(self, v):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * v + a
        return acc

    def to_json(self, digits: int = DEFAULT_PRECISION) -> dict:
        return {
            "variable": self.var,
            "order": self.order,
            "coefficients": [dec(a, digits) if not isinstance(a, Fraction) else str(a) for a in self.coeffs],
        }


_BINARY = {"add", "sub", "mul", "div", "compose"}
_UNARY = {"log", "exp", "sqrt", "inv", "neg"}


def series_arith(op: str, lhs: TruncatedSeries, rhs: TruncatedSeries | None = None, **kw) -> TruncatedSeries:
    """Dispatch one of ``add, sub, mul, div, log, exp, sqrt, inv, neg, compose``."""
    if op in _BINARY:
        if rhs is None:
            raise ValueError(f"{op} needs two operands")
        return {
            "add": lambda: lhs + rhs,
            "sub": lambda: lhs - rhs,
            "mul": lambda: lhs * rhs,
            "div": lambda: lhs / rhs,
            "compose": lambda: lhs.compose(rhs),
        }[op]()
    if op in _UNARY:
        return {
            "log": lhs.log,
            "exp": lhs.exp,
            "sqrt": lambda: lhs.sqrt(kw.get("root0")),
            "inv": lhs.inverse,
            "neg": lambda: -lhs,
        }[op]()
    raise ValueError(f"unknown series operation {op!r}")


# -- kernel branches --------------------------------------------------------
@dataclass(frozen=True)
class BranchExpansion:
    """Expansion of one kernel branch at ``z = 1``.

    Attributes
    ----------
    series : TruncatedSeries
        The branch in ``X`` with ``z = 1 - X**2`` (float coefficients).
    scaled : TruncatedSeries
        The same branch in ``Y = sqrt(2) X / sigma``, so ``z = 1 - sigma**2 Y**2 / 2``;
        exact rationals in rational mode.
    residual_valuations : tuple of int
        Valuation (in the expansion variable) of ``1 - z P(w)`` after each
        Newton iteration.
    """

    branch: str
    series: TruncatedSeries
    scaled: TruncatedSeries
    residual_valuations: tuple[int, ...]
    sigma2: Fraction
    precision: int


def _taylor_series_at_one(poly: JumpPolynomial, n: int, exact: bool) -> list:
    raw = [poly.taylor_at_one(k) for k in range(n + 1)]
    return raw if exact else [to_mp(r) for r in raw]


def _newton_y(poly, order, exact, s_const, y0, var):
    """Solve ``s - (1 - s T^2) sum_{k>=2} tau_k T^(k-2) y^k = 0`` for ``y(T)``.

    ``tau_k = P^(k)(1)/k!``.  Returns the series ``y`` to ``order`` and the
    residual valuations of the kernel equation after each step.
    """
    n = order
    tau = _taylor_series_at_one(poly, n + 2, exact)
    one = Fraction(1) if exact else mpmath.mpf(1)
    zero = one - one
    T = TruncatedSeries.variable(n, var, exact)
    factor = TruncatedSeries.constant(one, n, var) - T * T * s_const
    # G(q) = sum_k tau_k q^(k-2) ; dG(q) = sum_k k tau_k q^(k-2)
    G = TruncatedSeries(tuple(tau[k + 2] for k in range(n + 1)), var)
    dG = TruncatedSeries(tuple((k + 2) * tau[k + 2] for k in range(n + 1)), var)
    y = TruncatedSeries.constant(y0, n, var)
    vals = []
    prec = 1
    tol = zero if exact else mpmath.mpf(10) ** (-(mpmath.mp.dps - 8))
    for _ in range(2 * max(1, n).bit_length() + 4):
        q = T * y
        F = s_const - factor * y * y * G.compose(q)
        Fy = -(factor * y * dG.compose(q))
        kernel_val = F.valuation(tol) + 2
        vals.append(kernel_val)
        if F.valuation(tol) > n:
            return y, tuple(vals)
        y = y - F / Fy
        prec *= 2
    raise PrecisionError("Newton iteration for the kernel branch did not converge")


def newton_branch(
    poly: JumpPolynomial,
    branch: str = "u1",
    order: int = 10,
    mode: str = "float",
    precision: int = DEFAULT_PRECISION,
) -> BranchExpansion:
    """Expand ``u_1`` or ``v_1`` at ``z = 1`` for a centered walk.

    Parameters
    ----------
    branch : {"u1", "v1"}
        ``u1`` is seeded with slope ``-sqrt(2)/sigma`` in ``X``, ``v1`` with
        ``+sqrt(2)/sigma``.
    mode : {"float", "exact"}
        ``exact`` runs the iteration over the rationals in the scaled
        variable ``Y``; ``float`` works in ``X`` at ``precision`` digits.
    """
    if not poly.is_centered():
        raise NotCenteredError("newton_branch needs P(1) = 1 and P'(1) = 0")
    if order < 1:
        raise ValueError("order must be at least 1")
    if branch not in ("u1", "v1"):
        raise ValueError("branch must be 'u1' or 'v1'")
    sign = -1 if branch == "u1" else 1
    sigma2 = poly.derivative_at_one(2)
    if sigma2 <= 0:
        raise BranchPointError("P''(1) must be positive")
    with mpmath.workdps(precision + 15):
        sigma = mpmath.sqrt(to_mp(sigma2))
        # scaled variable: exact in rational mode
        exact = mode == "exact"
        if mode not in ("float", "exact"):
            raise ValueError(f"unknown mode {mode!r}")
        s_y = sigma2 / 2 if exact else to_mp(sigma2) / 2
        y0 = Fraction(sign) if exact else mpmath.mpf(sign)
        yY, vals_y = _newton_y(poly, order - 1, exact, s_y, y0, "Y")
        one = Fraction(1) if exact else mpmath.mpf(1)
        scaled = TruncatedSeries((one,) + yY.coeffs, "Y")
        if exact:
            X_series = TruncatedSeries(
                tuple(to_mp(a) * (mpmath.sqrt(2) / sigma) ** i for i, a in enumerate(scaled.coeffs)), "X"
            )
            vals = vals_y
        else:
            yX, vals = _newton_y(poly, order - 1, False, mpmath.mpf(1), sign * mpmath.sqrt(2) / sigma, "X")
            X_series = TruncatedSeries((mpmath.mpf(1),) + yX.coeffs, "X")
        # wrong-branch guard: slope sign after the first step
        if (X_series.coeffs[1] > 0) != (sign > 0):
            raise BranchPointError("Newton iteration converged to the conjugate branch")
        X_series = TruncatedSeries(tuple(+a for a in X_series.coeffs), "X")
        return BranchExpansion(branch, X_series, scaled, tuple(vals), sigma2, precision)


def kernel_residual(
    poly: JumpPolynomial, w: TruncatedSeries, z_scale=1, precision: int = DEFAULT_PRECISION
) -> TruncatedSeries:
    """Coefficients of ``1 - (1 - z_scale v^2) P(w(v))`` by direct Laurent evaluation.

    Independent of the Newton route: negative powers of ``w`` come from
    series inversion.
    """
    with mpmath.workdps(precision + 10):
        return _kernel_residual(poly, w, z_scale)


def _kernel_residual(poly, w, z_scale):
    exact = w.exact
    inv = w.inverse()
    n = w.order
    one = Fraction(1) if exact else mpmath.mpf(1)
    conv = (lambda q: q) if exact else to_mp
    total = TruncatedSeries.constant(one - one, n, w.var)
    for j, p in poly.weights:
        total = total + (w**j if j >= 0 else inv ** (-j)) * conv(p)
    v = TruncatedSeries.variable(n, w.var, exact)
    z = TruncatedSeries.constant(one, n, w.var) - v * v * (z_scale if exact else to_mp(z_scale))
    return TruncatedSeries.constant(one, n, w.var) - z * total


# -- Lukasiewicz integrand --------------------------------------------------
@dataclass(frozen=True)
class LukaIntegrand:
    """Pieces of the height-tail integrand of a centered Lukasiewicz walk.

    With ``X = sqrt(1 - z)``, ``eps = n**-0.5`` and ``s = sqrt(t)`` (so
    ``X = s * eps``):

    ``log_ratio``
        ``L(X) = log(u_1 / v_1)``, an odd series with slope ``-2 sqrt(2)/sigma``.
    ``prefactor``
        ``r(X) = X * (-u_1 v_1' / v_1**2)`` where ``'`` is ``d/dz``.
    ``family``
        ``{(k, a, b): coeff}``: the integrand correction
        ``r(s eps) exp(x sigma sum_{i>=3} l_i s^i eps^(i-1)) exp(sum_{j>=2} s^(2j) eps^(2j-2)/j)``
        as a sum of ``coeff * eps**k * s**a * x**b``.
    """

    order: int
    sigma: object
    u1: TruncatedSeries
    v1: TruncatedSeries
    log_ratio: TruncatedSeries
    prefactor: TruncatedSeries
    family: dict = field(repr=False)

    def slice(self, k: int) -> dict:
        """Terms of ``family`` at power ``eps**k`` as ``{(a, b): coeff}``."""
        return {(a, b): v for (kk, a, b), v in self.family.items() if kk == k}


def _fam_mul(f: dict, g: dict, kmax: int) -> dict:
    out: dict = {}
    for (k1, a1, b1), c1 in f.items():
        for (k2, a2, b2), c2 in g.items():
            k = k1 + k2
            if k > kmax:
                continue
            key = (k, a1 + a2, b1 + b2)
            out[key] = out.get(key, 0) + c1 * c2
    return out


def _fam_exp(f: dict, kmax: int) -> dict:
    """``exp(f)`` for a family whose terms all have ``k >= 1``."""
    out = {(0, 0, 0): mpmath.mpf(1)}
    term = {(0, 0, 0): mpmath.mpf(1)}
    for m in range(1, kmax + 1):
        term = _fam_mul(term, f, kmax)
        term = {key: v / m for key, v in term.items()}
        if not term:
            break
        for key, v in term.items():
            out[key] = out.get(key, 0) + v
    return out


def luka_integrand(poly: JumpPolynomial, order: int, precision: int = DEFAULT_PRECISION) -> LukaIntegrand:
    """Build the integrand family through ``eps**order``."""
    if not poly.is_lukasiewicz:
        raise NotLukasiewiczError("integrand needs the only negative jump to be -1")
    if not poly.is_centered():
        raise NotCenteredError("integrand needs a centered walk")
    K = order
    N = K + 3
    with mpmath.workdps(precision + 15):
        u1 = newton_branch(poly, "u1", N, "float", precision + 10).series
        v1 = u1.reflect()
        L = (u1 / v1).log()
        # r(X) = -U(X) U'(-X) / (2 U(-X)^2), where U' = dU/dX
        dU = u1.derivative()
        dU_neg = dU.reflect()
        r = -(u1.truncate(N - 1) * dU_neg) / (v1.truncate(N - 1) ** 2 * 2)
        sigma = mpmath.sqrt(to_mp(poly.derivative_at_one(2)))
        fam = {(k, k, 0): r[k] for k in range(K + 1)}
        expo = {}
        for i in range(3, K + 2, 2):
            expo[(i - 1, i, 1)] = sigma * L[i]
        expo_z = {}
        for j in range(2, K // 2 + 2):
            if 2 * j - 2 <= K:
                expo_z[(2 * j - 2, 2 * j, 0)] = mpmath.mpf(1) / j
        fam = _fam_mul(fam, _fam_exp(expo, K), K)
        fam = _fam_mul(fam, _fam_exp(expo_z, K), K)
        fam = {key: +v for key, v in fam.items() if v != 0}
        return LukaIntegrand(K, +sigma, u1, v1, L, r, fam)
