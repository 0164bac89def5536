"""Reed-Solomon codes over prime fields GF(q), evaluation form at the powers of
the smallest primitive element."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence


class DecodeFailure(Exception):
    """The received word is farther than the decoding radius from every codeword."""


def is_prime(x: int) -> bool:
    if x < 2:
        return False
    if x % 2 == 0:
        return x == 2
    f = 3
    while f * f <= x:
        if x % f == 0:
            return False
        f += 2
    return True


def select_field(ec_size: int) -> int:
    """Largest prime ``q <= ec_size``; always ``q > ec_size / 2``."""
    if ec_size < 3:
        raise ValueError(f"need at least 3 inner codewords for a usable field, got {ec_size}")
    q = ec_size
    while not is_prime(q):
        q -= 1
    assert 2 * q > ec_size
    return q


def _prime_factors(x: int) -> list[int]:
    out, f = [], 2
    while f * f <= x:
        if x % f == 0:
            out.append(f)
            while x % f == 0:
                x //= f
        f += 1
    if x > 1:
        out.append(x)
    return out


def primitive_element(q: int) -> int:
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if q == 2:
        return 1
    fac = _prime_factors(q - 1)
    for g in range(2, q):
        if all(pow(g, (q - 1) // p, q) != 1 for p in fac):
            return g
    raise AssertionError("no primitive element")  # unreachable for prime q


@dataclass(frozen=True)
class RSCode:
    q: int
    k: int

    def __post_init__(self):
        if not is_prime(self.q) or self.q < 3:
            raise ValueError(f"field size must be a prime >= 3, got {self.q}")
        if not 1 <= self.k <= self.q - 1:
            raise ValueError(f"dimension must lie in [1, {self.q - 1}], got {self.k}")

    @property
    def length(self) -> int:
        return self.q - 1

    @property
    def distance(self) -> int:
        return self.length - self.k + 1

    @property
    def radius(self) -> int:
        return (self.distance - 1) // 2

    @cached_property
    def g(self) -> int:
        return primitive_element(self.q)

    @cached_property
    def points(self) -> tuple[int, ...]:
        return tuple(pow(self.g, j, self.q) for j in range(self.length))

    def _check(self, word: Sequence[int], length: int, what: str):
        if len(word) != length:
            raise ValueError(f"{what} must have {length} symbols, got {len(word)}")
        for s in word:
            if not 0 <= int(s) < self.q:
                raise ValueError(f"symbol {s} outside GF({self.q})")

    def encode(self, msg: Sequence[int]) -> tuple[int, ...]:
        self._check(msg, self.k, "message")
        q = self.q
        out = []
        for x in self.points:
            acc = 0
            for c in reversed(msg):
                acc = (acc * x + c) % q
            out.append(acc)
        return tuple(out)

    def syndromes(self, word: Sequence[int]) -> list[int]:
        q, n = self.q, self.length
        return [
            sum(r * pow(self.g, (j * l) % n, q) for j, r in enumerate(word)) % q
            for l in range(1, n - self.k + 1)
        ]

    def decode(self, word: Sequence[int]) -> tuple[int, ...]:
        """Errors-only bounded-distance decoding (Berlekamp-Massey, Chien search, Forney)."""
        self._check(word, self.length, "received word")
        q, n = self.q, self.length
        r = [int(x) for x in word]
        synd = self.syndromes(r)
        if any(synd):
            lam = _berlekamp_massey(synd, q)
            nu = len(lam) - 1
            if nu > self.radius:
                raise DecodeFailure(f"error locator degree {nu} exceeds radius {self.radius}")
            # Omega = S(x) Lambda(x) mod x^(2t), with S(x) = sum_l S_l x^(l-1)
            two_t = len(synd)
            omega = [0] * two_t
            for i, s in enumerate(synd):
                for j, c in enumerate(lam):
                    if i + j < two_t:
                        omega[i + j] = (omega[i + j] + s * c) % q
            dlam = [(i * lam[i]) % q for i in range(1, len(lam))]
            found = 0
            for j in range(n):
                xinv = pow(self.g, (n - j) % n, q)
                if _eval(lam, xinv, q) == 0:
                    den = _eval(dlam, xinv, q)
                    if den == 0:
                        raise DecodeFailure("repeated error-locator root")
                    mag = (-_eval(omega, xinv, q) * pow(den, q - 2, q)) % q
                    r[j] = (r[j] - mag) % q
                    found += 1
            if found != nu:
                raise DecodeFailure("error locator does not split over the evaluation points")
            if any(self.syndromes(r)):
                raise DecodeFailure("correction did not reach a codeword")
        # inverse transform: m_i = (1/n) sum_j c_j g^(-ij), and 1/n = -1 in GF(q)
        coeffs = [
            (-sum(c * pow(self.g, (-(i * j)) % n, q) for j, c in enumerate(r))) % q for i in range(n)
        ]
        if any(coeffs[self.k :]):
            raise DecodeFailure("corrected word has degree >= K")
        return tuple(coeffs[: self.k])


def _eval(poly: Sequence[int], x: int, q: int) -> int:
    acc = 0
    for c in reversed(poly):
        acc = (acc * x + c) % q
    return acc


def _berlekamp_massey(s: Sequence[int], q: int) -> list[int]:
    """Shortest LFSR connection polynomial ``Lambda`` (``Lambda[0] = 1``) generating ``s``."""
    c, b = [1], [1]
    ell, m, bb = 0, 1, 1
    for i in range(len(s)):
        d = s[i]
        for j in range(1, ell + 1):
            if j < len(c):
                d = (d + c[j] * s[i - j]) % q
        if d == 0:
            m += 1
            continue
        coef = d * pow(bb, q - 2, q) % q
        t = list(c)
        need = len(b) + m
        if len(c) < need:
            c = c + [0] * (need - len(c))
        for j, bj in enumerate(b):
            c[j + m] = (c[j + m] - coef * bj) % q
        if 2 * ell <= i:
            ell, b, bb, m = i + 1 - ell, t, d, 1
        else:
            m += 1
    c = c[: ell + 1] + [0] * max(0, ell + 1 - len(c))
    return c
