"""Numerical theta constants with characteristics, the weight-18 modular
form chi_18 (product of the 36 even theta nullwerte in degree three), its
primitive scaling chi'_18 = 2^-28 chi_18, the Hodge norm, and best-effort
Siegel-domain reduction.

Values are complex doubles; lattice sums are truncated with a certified
shell tail bound and accumulated with compensated summation, so results
are deterministic for fixed parameters.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import (
    NotInSiegelSpace,
    NotSymplectic,
    OddCharacteristic,
    SingularDenominator,
    TruncationRadiusExceeded,
    WrongGenus,
)

SYMMETRY_TOL = 1e-8

LOG_2PI = math.log(2 * math.pi)
# chi'_18 = 2^-28 chi_18; Hodge norm of a weight-18 degree-3 form carries
# the frame factor (2pi)^(g*h) = (2pi)^54 and (det Im Omega)^9.
CHI18_PRIME_LOG_SCALE = 54 * LOG_2PI - 28 * math.log(2)


@dataclass(frozen=True)
class EvalParams:
    """Evaluation knobs for theta lattice sums."""

    tol: float = 1e-12
    max_radius: float = 60.0
    reduce: bool = True

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")


class SiegelPoint:
    """A point of Siegel upper half space: g x g symmetric complex matrix
    with positive definite imaginary part."""

    __slots__ = ("omega", "_chol")

    def __init__(self, omega):
        omega = np.asarray(omega, dtype=complex)
        if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
            raise NotInSiegelSpace(f"expected a square matrix, got {omega.shape}")
        asym = np.max(np.abs(omega - omega.T)) if omega.size else 0.0
        scale = max(1.0, float(np.max(np.abs(omega))))
        if asym > SYMMETRY_TOL * scale:
            raise NotInSiegelSpace(f"asymmetry {asym:.3e} exceeds tolerance")
        omega = (omega + omega.T) / 2
        try:
            chol = np.linalg.cholesky(omega.imag)
        except np.linalg.LinAlgError:
            raise NotInSiegelSpace("imaginary part is not positive definite") from None
        omega.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "_chol", chol)

    def __setattr__(self, *a):
        raise AttributeError("SiegelPoint is immutable")

    @property
    def g(self) -> int:
        return self.omega.shape[0]

    @property
    def im(self) -> np.ndarray:
        return self.omega.imag

    @property
    def re(self) -> np.ndarray:
        return self.omega.real

    def det_im(self) -> float:
        return float(np.prod(np.diag(self._chol)) ** 2)

    def log_det_im(self) -> float:
        return float(2 * np.sum(np.log(np.diag(self._chol))))

    def to_dict(self) -> dict:
        return {
            "g": self.g,
            "re": self.omega.real.tolist(),
            "im": self.omega.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, data) -> "SiegelPoint":
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
        if "g" in data and re.shape != (data["g"], data["g"]):
            raise NotInSiegelSpace("matrix shape disagrees with declared g")
        return cls(re + 1j * im)


@dataclass(frozen=True)
class ThetaCharacteristic:
    """Half-integer characteristic (eps1, eps2) = (a/2, b/2), a, b in {0,1}^g."""

    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        if not all(x in (0, 1) for x in self.a + self.b):
            raise ValueError("characteristic entries must be 0 or 1")
        if len(self.a) != len(self.b):
            raise ValueError("characteristic halves have different lengths")

    @property
    def g(self) -> int:
        return len(self.a)

    @property
    def parity(self) -> int:
        """4 eps1 . eps2 mod 2; zero for even characteristics."""
        return sum(x * y for x, y in zip(self.a, self.b)) % 2

    @property
    def is_even(self) -> bool:
        return self.parity == 0


def even_characteristics(g: int) -> list[ThetaCharacteristic]:
    """All even characteristics in degree g; count 2^(g-1) (2^g + 1)."""
    if g < 1:
        raise ValueError("g must be at least 1")
    out = [
        ThetaCharacteristic(a, b)
        for a in product((0, 1), repeat=g)
        for b in product((0, 1), repeat=g)
    ]
    return [c for c in out if c.is_even]


def _truncation_radius(im_min_eig: float, g: int, tol: float, max_radius: float) -> float:
    """Smallest integer radius whose shell tail bound drops below tol.

    Tail over lattice vectors v with |v| >= R is bounded by
    sum_k N(k) exp(-pi lam k^2) with N(k) a cube-shell count.
    """
    lam = im_min_eig
    k = 1
    while k <= max_radius:
        tail = 0.0
        j = k
        while True:
            shell = (2 * j + 3) ** g - max(2 * j - 1, 0) ** g
            term = shell * math.exp(-math.pi * lam * j * j)
            tail += term
            j += 1
            if term < tol * 1e-6 or j > k + 400:
                break
        if tail <= tol:
            return float(k)
        k += 1
    raise TruncationRadiusExceeded(
        f"no radius <= {max_radius} meets tolerance {tol}; smallest eigenvalue {lam:.3e}"
    )


def _lattice_points(g: int, box: int) -> np.ndarray:
    axes = [np.arange(-box, box + 1)] * g
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([a.ravel() for a in grid], axis=-1).astype(float)


def theta_null(char: ThetaCharacteristic, point: SiegelPoint, params: EvalParams) -> complex:
    """Thetanullwert theta_eps(0, Omega) by truncated lattice sum.

    Sums exp(pi i (n+eps1)' Omega (n+eps1) + 2 pi i (n+eps1) . eps2) over
    integer vectors with (n+eps1)' Im(Omega) (n+eps1) <= R^2, R chosen from
    the tail bound.
    """
    if char.g != point.g:
        raise ValueError(f"characteristic degree {char.g} != point degree {point.g}")
    if not char.is_even:
        raise OddCharacteristic(f"characteristic {char} is odd")
    Y = point.im
    eigs = np.linalg.eigvalsh(Y)
    lam = float(eigs[0])
    R = _truncation_radius(lam, point.g, params.tol, params.max_radius)
    box = int(math.ceil(R / math.sqrt(lam) + 0.5)) + 1
    if (2 * box + 1) ** point.g > 2**22:
        raise TruncationRadiusExceeded(
            f"lattice box {box} too large (smallest eigenvalue {lam:.3e}); "
            "reduce the point first"
        )
    eps1 = np.array(char.a, dtype=float) / 2
    eps2 = np.array(char.b, dtype=float) / 2
    v = _lattice_points(point.g, box) + eps1
    norms = np.einsum("ki,ij,kj->k", v, Y, v)
    v = v[norms <= R * R]
    quad = np.einsum("ki,ij,kj->k", v, point.omega, v)
    phases = np.exp(1j * math.pi * quad + 2j * math.pi * (v @ eps2))
    return complex(math.fsum(phases.real), math.fsum(phases.imag))


# -- symplectic action and reduction -------------------------------------------


def _sym_j(g: int) -> np.ndarray:
    J = np.zeros((2 * g, 2 * g), dtype=np.int64)
    J[:g, g:] = np.eye(g, dtype=np.int64)
    J[g:, :g] = -np.eye(g, dtype=np.int64)
    return J


def is_symplectic(gamma: np.ndarray) -> bool:
    gamma = np.asarray(gamma)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1] or gamma.shape[0] % 2:
        return False
    if not np.issubdtype(gamma.dtype, np.integer):
        if not np.all(gamma == np.round(gamma)):
            return False
        gamma = np.round(gamma).astype(np.int64)
    g = gamma.shape[0] // 2
    J = _sym_j(g)
    return bool(np.array_equal(gamma.T @ J @ gamma, J))


def sp_transform(point: SiegelPoint, gamma) -> SiegelPoint:
    """Omega -> (A Omega + B)(C Omega + D)^-1 for integer symplectic gamma."""
    gamma = np.asarray(gamma)
    if not is_symplectic(gamma):
        raise NotSymplectic("gamma' J gamma != J")
    gamma = np.round(gamma).astype(np.int64)
    g = point.g
    if gamma.shape != (2 * g, 2 * g):
        raise NotSymplectic(f"expected shape {(2*g, 2*g)}, got {gamma.shape}")
    A, B = gamma[:g, :g], gamma[:g, g:]
    C, D = gamma[g:, :g], gamma[g:, g:]
    den = C @ point.omega + D
    sign, logabsdet = np.linalg.slogdet(den)
    if sign == 0 or logabsdet < -300:
        raise SingularDenominator("C Omega + D is numerically singular")
    new = (A @ point.omega + B) @ np.linalg.inv(den)
    return SiegelPoint((new + new.T) / 2)


def _lll_gram(Y: np.ndarray, delta: float = 0.99) -> np.ndarray:
    """Integer unimodular U such that U Y U' is LLL-reduced (Y = Gram matrix)."""
    g = Y.shape[0]
    B = np.linalg.cholesky(Y).copy()  # rows are basis vectors
    U = [[int(i == j) for j in range(g)] for i in range(g)]

    def gso():
        mu = np.zeros((g, g))
        ortho = B.copy()
        for i in range(g):
            for j in range(i):
                mu[i, j] = ortho[j] @ B[i] / (ortho[j] @ ortho[j])
                ortho[i] = ortho[i] - mu[i, j] * ortho[j]
        norms = np.einsum("ij,ij->i", ortho, ortho)
        return mu, norms

    k = 1
    steps = 0
    while k < g and steps < 1000:
        steps += 1
        mu, norms = gso()
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q:
                B[k] -= q * B[j]
                for c in range(g):
                    U[k][c] -= q * U[j][c]
                mu, norms = gso()
        if norms[k] >= (delta - mu[k, k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            B[[k - 1, k]] = B[[k, k - 1]]
            U[k - 1], U[k] = U[k], U[k - 1]
            k = max(k - 1, 1)
    return np.array(U, dtype=np.int64)


def _gl_embed(U: np.ndarray) -> np.ndarray:
    """diag(U, U^-T) as an integer symplectic matrix."""
    g = U.shape[0]
    Uinv = np.linalg.inv(U)
    UinvT = np.round(Uinv.T).astype(np.int64)
    assert np.array_equal(U.astype(np.int64) @ UinvT.T, np.eye(g, dtype=np.int64))
    out = np.zeros((2 * g, 2 * g), dtype=np.int64)
    out[:g, :g] = U
    out[g:, g:] = UinvT
    return out


def _translation(Bmat: np.ndarray) -> np.ndarray:
    g = Bmat.shape[0]
    out = np.eye(2 * g, dtype=np.int64)
    out[:g, g:] = Bmat
    return out


@dataclass(frozen=True)
class ReductionResult:
    point: SiegelPoint
    gamma: np.ndarray
    converged: bool


def siegel_reduce(point: SiegelPoint, max_iter: int = 64) -> ReductionResult:
    """Best-effort reduction: integral translation of the real part, LLL on
    the imaginary Gram matrix, and full inversion while it grows det Im.

    Correctness of downstream norms relies on modular invariance, not on
    reaching the exact fundamental domain.  When the iteration cap is hit
    the best point so far is returned with converged=False.
    """
    g = point.g
    gamma = np.eye(2 * g, dtype=np.int64)
    cur = point
    J = _sym_j(g)
    for _ in range(max_iter):
        changed = False
        shift = -np.round(cur.re).astype(np.int64)
        shift = (shift + shift.T) // 2  # symmetrize away rounding ties
        if np.any(shift):
            t = _translation(shift)
            cur = sp_transform(cur, t)
            gamma = t @ gamma
            changed = True
        U = _lll_gram(cur.im)
        if not np.array_equal(U, np.eye(g, dtype=np.int64)):
            e = _gl_embed(U)
            cur = sp_transform(cur, e)
            gamma = e @ gamma
            changed = True
        try:
            inv = sp_transform(cur, J)
        except SingularDenominator:
            inv = None
        if inv is not None and inv.det_im() > cur.det_im() * (1 + 1e-9):
            cur = inv
            gamma = J @ gamma
            changed = True
        if not changed:
            return ReductionResult(cur, gamma, True)
    return ReductionResult(cur, gamma, False)


# -- chi_18 ---------------------------------------------------------------------


def chi18_factors(point: SiegelPoint, params: EvalParams) -> list[complex]:
    if point.g != 3:
        raise WrongGenus(f"chi_18 lives in degree 3, got {point.g}")
    return [theta_null(c, point, params) for c in even_characteristics(3)]


def chi18_scale(factors) -> float:
    """Geometric mean of the nonzero theta factors, as a size reference."""
    mags = [abs(f) for f in factors if abs(f) > 0]
    if not mags:
        return 0.0
    return math.exp(math.fsum(math.log(m) for m in mags) / len(mags))


def chi18_is_zero(value: complex, factors, tol: float) -> bool:
    """Scale-aware vanishing test: |chi~_18| below tol times the 18th power
    of the geometric mean of the nonzero factors."""
    scale = chi18_scale(factors)
    if scale == 0.0:
        return True
    return abs(value) < tol * scale**18


def chi18_tilde(point: SiegelPoint, params: EvalParams = EvalParams()) -> complex:
    """Product of the 36 even theta nullwerte at Omega.

    With params.reduce the product is evaluated at a reduced point and
    mapped back through the automorphy factor det(C Omega + D)^18.
    """
    if point.g != 3:
        raise WrongGenus(f"chi_18 lives in degree 3, got {point.g}")
    if params.reduce:
        red = siegel_reduce(point)
        factors = chi18_factors(red.point, params)
        if chi18_is_zero(complex(np.prod(factors)), factors, params.tol):
            return 0j
        C = red.gamma[3:, :3]
        D = red.gamma[3:, 3:]
        den = complex(np.linalg.det(C @ point.omega + D))
        # automorphy factor in log form to dodge overflow of den**18
        log_mag = math.fsum(math.log(abs(f)) for f in factors) - 18 * math.log(abs(den))
        phase = math.fsum(cmath.phase(f) for f in factors) - 18 * cmath.phase(den)
        return cmath.rect(math.exp(log_mag), phase)
    return complex(np.prod(chi18_factors(point, params)))


def hodge_norm_chi18_prime(point: SiegelPoint, params: EvalParams = EvalParams()) -> float:
    """log of the Hodge norm of chi'_18 at Omega:
    log ||chi'_18|| = -28 log 2 + 54 log(2 pi) + log|chi~_18| + 9 log det Im.

    Returns -inf when chi~_18 vanishes at the scale-aware threshold.  The
    value is invariant under the modular group, so it is computed at a
    reduced point when params.reduce is set.
    """
    if point.g != 3:
        raise WrongGenus(f"chi'_18 lives in degree 3, got {point.g}")
    target = siegel_reduce(point).point if params.reduce else point
    factors = chi18_factors(target, params)
    value = complex(np.prod(factors))
    if chi18_is_zero(value, factors, params.tol):
        return float("-inf")
    log_abs = math.fsum(math.log(abs(f)) for f in factors)
    return CHI18_PRIME_LOG_SCALE + log_abs + 9 * target.log_det_im()
