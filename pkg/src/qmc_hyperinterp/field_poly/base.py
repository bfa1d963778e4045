from fractions import Fraction

from qmc_hyperinterp.exceptions import ConfigError

from .schemas import FieldPoly, LaurentFraction, trim

Coeffs = tuple[int, ...]


def add(a: Coeffs, c: Coeffs, b: int) -> Coeffs:
    n = max(len(a), len(c))
    return trim(
        tuple(
            ((a[i] if i < len(a) else 0) + (c[i] if i < len(c) else 0)) % b
            for i in range(n)
        )
    )


def sub(a: Coeffs, c: Coeffs, b: int) -> Coeffs:
    n = max(len(a), len(c))
    return trim(
        tuple(
            ((a[i] if i < len(a) else 0) - (c[i] if i < len(c) else 0)) % b
            for i in range(n)
        )
    )


def mul(a: Coeffs, c: Coeffs, b: int) -> Coeffs:
    if not a or not c:
        return ()
    out = [0] * (len(a) + len(c) - 1)
    for i, ai in enumerate(a):
        if ai:
            for k, ck in enumerate(c):
                out[i + k] = (out[i + k] + ai * ck) % b
    return trim(tuple(out))


def divmod_coeffs(a: Coeffs, p: Coeffs, b: int) -> tuple[Coeffs, Coeffs]:
    """Long division a = q p + r with deg r < deg p"""
    if not p:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(p[-1], b - 2, b)
    rem = list(a)
    dp = len(p) - 1
    quot = [0] * max(len(a) - dp, 0)
    for k in range(len(rem) - 1, dp - 1, -1):
        coef = rem[k] * inv % b
        if coef:
            quot[k - dp] = coef
            for i, pi in enumerate(p):
                rem[k - dp + i] = (rem[k - dp + i] - coef * pi) % b
    return trim(tuple(quot)), trim(tuple(rem[:dp]))


def poly_mul_mod(a: FieldPoly, c: FieldPoly, p: FieldPoly) -> FieldPoly:
    """(a c) mod p over F_b"""
    if a.b != c.b or a.b != p.b:
        raise ConfigError(f"base mismatch: {a.b}, {c.b}, {p.b}")
    if p.is_zero():
        raise ConfigError("modulus must be nonzero")
    _, r = divmod_coeffs(mul(a.coeffs, c.coeffs, a.b), p.coeffs, a.b)
    return FieldPoly(b=a.b, coeffs=r)


def is_irreducible(p: FieldPoly) -> bool:
    """Trial division by every monic polynomial of degree 1..deg(p)//2"""
    m = p.degree
    if m < 1:
        raise ConfigError("irreducibility needs degree >= 1")
    b = p.b
    for k in range(1, m // 2 + 1):
        for n in range(b**k, 2 * b**k):
            divisor = FieldPoly.from_int(n, b).coeffs
            if not divmod_coeffs(p.coeffs, divisor, b)[1]:
                return False
    return True


def smallest_irreducible(m: int, b: int) -> FieldPoly:
    """First monic irreducible of degree m in integer-encoding order"""
    for n in range(b**m, 2 * b**m):
        candidate = FieldPoly.from_int(n, b)
        if is_irreducible(candidate):
            return candidate
    raise ConfigError(f"no irreducible polynomial of degree {m} over F_{b}")


def fibonacci_poly(n: int, b: int) -> FieldPoly:
    """F_1 = 1, F_2 = x, F_n = x F_{n-1} + F_{n-2}"""
    if n < 1:
        raise ConfigError("Fibonacci polynomials start at n = 1")
    prev, cur = (1,), (0, 1)
    if n == 1:
        return FieldPoly(b=b, coeffs=prev)
    for _ in range(n - 2):
        prev, cur = cur, add((0,) + cur, prev, b)
    return FieldPoly(b=b, coeffs=cur)


def laurent_digits(frac: LaurentFraction, count: int) -> list[int]:
    """Coefficients a_1, ..., a_count of x^{-1}, ..., x^{-count} in num/den"""
    b = frac.denominator.b
    den = frac.denominator.coeffs
    dd = len(den) - 1
    inv = pow(den[-1], b - 2, b)
    rem = list(frac.numerator.coeffs)
    digits = []
    for _ in range(count):
        rem = [0] + rem
        if len(rem) - 1 == dd and any(rem):
            a = rem[-1] * inv % b
            rem = [(r - a * p) % b for r, p in zip(rem, den)]
        else:
            a = 0
        digits.append(a)
        rem = list(trim(tuple(rem[:dd]))) if len(rem) > dd else list(trim(tuple(rem)))
    return digits


def nu_m(frac: LaurentFraction, m: int) -> Fraction:
    """Truncate the Laurent expansion after m digits and read it in base b"""
    b = frac.denominator.b
    value = 0
    for a in laurent_digits(frac, m):
        value = value * b + a
    return Fraction(value, b**m)


def tr_m(h: int, m: int, b: int) -> FieldPoly:
    """Polynomial of the lowest m base-b digits of h"""
    return FieldPoly.from_int(h % b**m, b)
