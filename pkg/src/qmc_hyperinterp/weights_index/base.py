import math
from collections.abc import Sequence
from fractions import Fraction

import numpy as np
from loguru import logger

from qmc_hyperinterp.exceptions import ConfigError, ResourceCapError
from qmc_hyperinterp.settings import settings
from qmc_hyperinterp.types import BasisKind

from .schemas import IndexSet, ProductWeights, Provenance

# B_2, B_4, ..., B_12 for the Euler-Maclaurin tail of zeta
_EM_BERNOULLI = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
)
_EM_CUTOFF = 16

_MEMBER_RTOL = 1e-12


def r_korobov(h: Sequence[int], w: ProductWeights) -> float:
    """Korobov decay r_{alpha,gamma}(h); math.inf when a zero weight meets h_j != 0"""
    r = 1.0
    for j, hj in enumerate(h, start=1):
        if hj == 0:
            continue
        gamma = w.gamma(j)
        if gamma == 0.0:
            return math.inf
        r *= abs(hj) ** w.alpha / gamma
    return r


def mu1(h: int, b: int) -> int:
    """Position of the most significant base-b digit of h (0 for h = 0)"""
    if h < 0:
        raise ValueError("mu1 is defined on non-negative integers")
    c = 0
    while h:
        h //= b
        c += 1
    return c


def mu1_array(h: np.ndarray, b: int) -> np.ndarray:
    x = np.asarray(h, dtype=np.int64).copy()
    c = np.zeros_like(x)
    while np.any(x > 0):
        c += x > 0
        x //= b
    return c


def r_walsh(h: Sequence[int], w: ProductWeights, b: int) -> float:
    """Walsh decay r_{alpha,gamma}(h) = prod b^{alpha mu1(h_j)} / gamma_j"""
    r = 1.0
    for j, hj in enumerate(h, start=1):
        if hj < 0:
            raise ValueError("walsh frequencies must be non-negative")
        if hj == 0:
            continue
        gamma = w.gamma(j)
        if gamma == 0.0:
            return math.inf
        r *= float(b) ** (w.alpha * mu1(hj, b)) / gamma
    return r


def r_squared_array(
    members: np.ndarray, w: ProductWeights, basis_kind: BasisKind, b: int = 2
) -> np.ndarray:
    """r(h)^2 for every row of members"""
    members = np.asarray(members, dtype=np.int64)
    gam = w.gammas(members.shape[1])
    if basis_kind == "trig":
        magnitude = np.abs(members).astype(np.float64) ** w.alpha
    else:
        magnitude = float(b) ** (w.alpha * mu1_array(members, b).astype(np.float64))
    with np.errstate(divide="ignore", invalid="ignore"):
        factors = np.where(members != 0, (magnitude / gam) ** 2, 1.0)
    return np.prod(factors, axis=1)


def _coordinate_values(
    gamma: float, budget: float, w: ProductWeights, basis_kind: BasisKind, b: int
) -> list[tuple[int, float]]:
    """Admissible values of one coordinate with their r^2 factor, ascending"""
    values = [(0, 1.0)]
    if gamma == 0.0 or budget < 1.0:
        return values
    limit = budget * (1 + _MEMBER_RTOL)

    if basis_kind == "walsh":
        level = 1
        while (float(b) ** (w.alpha * level) / gamma) ** 2 <= limit:
            factor = (float(b) ** (w.alpha * level) / gamma) ** 2
            values.extend((h, factor) for h in range(b ** (level - 1), b**level))
            level += 1
        return values

    def factor(h: int) -> float:
        return (h**w.alpha / gamma) ** 2

    hmax = int(math.floor((gamma * math.sqrt(limit)) ** (1.0 / w.alpha)))
    while factor(hmax + 1) <= limit:
        hmax += 1
    while hmax > 0 and factor(hmax) > limit:
        hmax -= 1
    positive = [(h, factor(h)) for h in range(1, hmax + 1)]
    return [(-h, f) for h, f in reversed(positive)] + values + positive


def enumerate_cross(
    d: int,
    M: float,
    w: ProductWeights,
    basis_kind: BasisKind = "trig",
    b: int = 2,
    cap: int | None = None,
) -> IndexSet:
    """
    Hyperbolic cross {h : r(h)^2 <= M}, enumerated coordinate by coordinate.

    Each coordinate is bounded by the remaining budget M / (partial product),
    so nothing outside the finite box is visited. Output is sorted
    lexicographically.
    """
    if M < 1:
        raise ConfigError(f"hyperbolic threshold must be >= 1, got {M}")
    if d < 1:
        raise ConfigError("dimension must be positive")
    cap = cap or settings.compute.cardinality_cap
    gam = w.gammas(d)
    members: list[tuple[int, ...]] = []

    def walk(j: int, prefix: tuple[int, ...], partial: float) -> None:
        budget = M / partial
        for h, f in _coordinate_values(gam[j], budget, w, basis_kind, b):
            if partial * f > M * (1 + _MEMBER_RTOL):
                continue
            if j + 1 == d:
                members.append(prefix + (h,))
                if len(members) > cap:
                    raise ResourceCapError(
                        f"hyperbolic cross exceeds the cardinality cap {cap}"
                    )
            else:
                walk(j + 1, prefix + (h,), partial * f)

    walk(0, (), 1.0)
    logger.debug(f"enumerated {basis_kind} cross d={d} M={M:g}: {len(members)} members")
    return IndexSet(
        basis_kind=basis_kind,
        members=np.array(members, dtype=np.int64),
        provenance=Provenance(kind="hyperbolic", M=M, weights=w, b=b),
    )


def enumerate_box(d: int, T: int, basis_kind: BasisKind = "trig") -> IndexSet:
    """The hypercube {max |h_j| <= T} (or {0..T}^d for walsh)"""
    if T < 0:
        raise ConfigError("box half-width must be non-negative")
    side = np.arange(-T, T + 1) if basis_kind == "trig" else np.arange(0, T + 1)
    if side.size**d > settings.compute.cardinality_cap:
        raise ResourceCapError(f"box of side {side.size} in d={d} exceeds the cap")
    grid = np.stack(np.meshgrid(*([side] * d), indexing="ij"), axis=-1).reshape(-1, d)
    return IndexSet(
        basis_kind=basis_kind, members=grid, provenance=Provenance(kind="box", T=T)
    )


def zeta(s: float) -> float:
    """Riemann zeta for real s > 1: partial sum plus Euler-Maclaurin tail"""
    if s <= 1:
        raise ConfigError(f"zeta needs s > 1, got {s}")
    n = _EM_CUTOFF
    head = sum(k ** (-s) for k in range(1, n))
    tail = n ** (1 - s) / (s - 1) + 0.5 * n ** (-s)
    rising = s
    for k, bern in enumerate(_EM_BERNOULLI, start=1):
        tail += float(bern) / math.factorial(2 * k) * rising * n ** (-s - 2 * k + 1)
        rising *= (s + 2 * k - 1) * (s + 2 * k)
    return head + tail


def cardinality_bound(
    d: int,
    M: float,
    w: ProductWeights,
    lam: float,
    basis_kind: BasisKind = "trig",
    b: int = 2,
) -> float:
    """Upper bound on the size of the hyperbolic cross, valid for lam > 1/(2 alpha)"""
    if lam <= 1.0 / (2.0 * w.alpha):
        raise ConfigError(f"lambda must exceed 1/(2 alpha) = {1 / (2 * w.alpha):g}")
    gam = w.gammas(d)
    if basis_kind == "trig":
        z = zeta(2 * w.alpha * lam)
        factors = 1.0 + 2.0 * gam ** (2 * lam) * z
    else:
        if lam > 1:
            raise ConfigError("the walsh bound needs lambda <= 1")
        factors = 1.0 + gam**2 * (b - 1) / (float(b) ** (2 * w.alpha * lam) - b)
    return float(M**lam * np.prod(factors))


def digit_add(h: int | np.ndarray, k: int | np.ndarray, b: int):
    """Digit-wise addition modulo b"""
    return _digitwise(h, k, b, 1)


def digit_sub(h: int | np.ndarray, k: int | np.ndarray, b: int):
    """Digit-wise subtraction modulo b"""
    return _digitwise(h, k, b, -1)


def _digitwise(h, k, b: int, sign: int):
    scalar = np.isscalar(h) and np.isscalar(k)
    x = np.array(h, dtype=np.int64, copy=True)
    y = np.array(k, dtype=np.int64, copy=True)
    result = np.zeros(np.broadcast(x, y).shape, dtype=np.int64)
    place = 1
    while np.any(x > 0) or np.any(y > 0):
        result += ((x % b + sign * (y % b)) % b) * place
        x //= b
        y //= b
        place *= b
    return int(result) if scalar else result


def minkowski_double(I: IndexSet) -> IndexSet:
    """{a + b : a, b in I}"""
    sums = (I.members[:, None, :] + I.members[None, :, :]).reshape(-1, I.dim)
    return IndexSet(
        basis_kind=I.basis_kind,
        members=sums if sums.size else np.zeros((0, I.dim), dtype=np.int64),
        provenance=Provenance(kind="doubled", parent_size=I.size),
    )


def minkowski_difference(I: IndexSet, b: int = 2) -> IndexSet:
    """{a - b} for trig sets, the digit-wise {a (-) b} for walsh sets"""
    left = np.repeat(I.members, I.size, axis=0)
    right = np.tile(I.members, (I.size, 1))
    if I.basis_kind == "trig":
        diffs = left - right
    else:
        diffs = digit_sub(left, right, b)
    return IndexSet(
        basis_kind=I.basis_kind,
        members=diffs if diffs.size else np.zeros((0, I.dim), dtype=np.int64),
        provenance=Provenance(kind="difference", parent_size=I.size, b=b),
    )


def dumps_index_set(I: IndexSet) -> str:
    lines = [f"{I.basis_kind} {I.dim} {I.size}"]
    lines.extend(" ".join(str(int(c)) for c in row) for row in I.members)
    return "\n".join(lines) + "\n"


def loads_index_set(text: str) -> IndexSet:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows:
        raise ConfigError("empty index-set document")
    basis_kind, d, count = rows[0][0], int(rows[0][1]), int(rows[0][2])
    body = rows[1:]
    if len(body) != count or any(len(r) != d for r in body):
        raise ConfigError("index-set document does not match its header")
    members = np.array(body, dtype=np.int64).reshape(count, d)
    return IndexSet(basis_kind=basis_kind, members=members)
