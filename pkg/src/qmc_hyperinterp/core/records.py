"""
Line-oriented text stores.

Vector records (one per line):
    <kind> N d alpha gamma_spec z1 ... zd              kind in R, S, recon
    poly b m [p0,...,pm] alpha gamma_spec [q1...] ...  polynomial lattices
Coefficient cache:
    # tol=1e-12
    name h re im
"""

from pathlib import Path

from loguru import logger


def format_number(value: float) -> str:
    value = float(value)
    return str(int(value)) if value.is_integer() else repr(value)


def format_coeffs(coeffs) -> str:
    return "[" + ",".join(str(int(c)) for c in coeffs) + "]"


def parse_coeffs(token: str) -> tuple[int, ...]:
    body = token.strip()[1:-1]
    return tuple(int(c) for c in body.split(",")) if body else ()


class VectorRecordStore:
    """Generating vectors found by CBC searches, keyed by their construction parameters"""

    def __init__(self, path: Path):
        self.path = Path(path)

    def _lines(self) -> list[list[str]]:
        if not self.path.exists():
            return []
        return [
            line.split()
            for line in self.path.read_text().splitlines()
            if line.strip() and not line.startswith("#")
        ]

    def _append(self, tokens: list[str]) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a") as fh:
            fh.write(" ".join(tokens) + "\n")
        logger.debug(f"stored vector record in {self.path}: {' '.join(tokens[:5])}")

    def lookup_rank1(
        self, kind: str, n: int, d: int, alpha: float, gamma_spec: str
    ) -> tuple[int, ...] | None:
        """CBC vectors are extensible in d: a longer record answers a shorter query"""
        for tokens in self._lines():
            if tokens[0] != kind or len(tokens) < 5:
                continue
            if (
                int(tokens[1]) == n
                and tokens[3] == format_number(alpha)
                and tokens[4] == gamma_spec
                and int(tokens[2]) >= d
            ):
                return tuple(int(z) for z in tokens[5 : 5 + d])
        return None

    def store_rank1(
        self, kind: str, n: int, alpha: float, gamma_spec: str, z: tuple[int, ...]
    ) -> None:
        if self.lookup_rank1(kind, n, len(z), alpha, gamma_spec) is not None:
            return
        self._append(
            [kind, str(n), str(len(z)), format_number(alpha), gamma_spec]
            + [str(int(c)) for c in z]
        )

    def lookup_poly(
        self, b: int, m: int, p: tuple[int, ...], d: int, alpha: float, gamma_spec: str
    ) -> tuple[tuple[int, ...], ...] | None:
        for tokens in self._lines():
            if tokens[0] != "poly" or len(tokens) < 6:
                continue
            if (
                int(tokens[1]) == b
                and int(tokens[2]) == m
                and parse_coeffs(tokens[3]) == tuple(p)
                and tokens[4] == format_number(alpha)
                and tokens[5] == gamma_spec
                and len(tokens) - 6 >= d
            ):
                return tuple(parse_coeffs(t) for t in tokens[6 : 6 + d])
        return None

    def store_poly(
        self,
        b: int,
        m: int,
        p: tuple[int, ...],
        alpha: float,
        gamma_spec: str,
        q: tuple[tuple[int, ...], ...],
    ) -> None:
        if self.lookup_poly(b, m, p, len(q), alpha, gamma_spec) is not None:
            return
        self._append(
            ["poly", str(b), str(m), format_coeffs(p), format_number(alpha), gamma_spec]
            + [format_coeffs(c) for c in q]
        )


class CoefficientFile:
    """Text cache of oracle coefficients: `name h re im` lines under a tolerance header"""

    def __init__(self, path: Path, tol: float = 1e-12):
        self.path = Path(path)
        self.tol = tol

    def load(self) -> dict[tuple[str, int], complex]:
        values: dict[tuple[str, int], complex] = {}
        if not self.path.exists():
            return values
        for line in self.path.read_text().splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            name, h, re, im = line.split()
            values[(name, int(h))] = complex(float(re), float(im))
        return values

    def write(self, name: str, values: dict[int, complex]) -> None:
        """Append entries not yet present; existing keys are left untouched"""
        known = self.load()
        fresh = {h: v for h, v in sorted(values.items()) if (name, h) not in known}
        if not fresh:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        new_file = not self.path.exists()
        with self.path.open("a") as fh:
            if new_file:
                fh.write(f"# tol={float(self.tol)!r}\n")
            for h, v in fresh.items():
                fh.write(f"{name} {h} {float(v.real)!r} {float(v.imag)!r}\n")
