"""Z2 x Z2 degrees and the sign rule used by every graded bracket.

The four degrees are kept in the block order 00, 01, 11, 10; that order is
also the order of the four spin sectors of C^4 everywhere in the package.
"""

from __future__ import annotations

from enum import Enum


class Degree(Enum):
    D00 = (0, 0)
    D01 = (0, 1)
    D11 = (1, 1)
    D10 = (1, 0)

    @property
    def gamma1(self) -> int:
        return self.value[0]

    @property
    def gamma2(self) -> int:
        return self.value[1]

    def __add__(self, other: Degree) -> Degree:
        return deg_add(self, other)

    def __str__(self) -> str:
        return f"{self.gamma1}{self.gamma2}"

    @classmethod
    def parse(cls, text: str) -> Degree:
        """Inverse of ``str``: ``Degree.parse("01") is Degree.D01``."""
        try:
            return _BY_LABEL[text.strip()]
        except KeyError:
            raise ValueError(f"not a Z2^2 degree: {text!r}") from None


#: Canonical sector order; sector k of C^4 carries SECTORS[k].
SECTORS: tuple[Degree, ...] = (Degree.D00, Degree.D01, Degree.D11, Degree.D10)

_BY_LABEL = {str(d): d for d in Degree}
_BY_BITS = {d.value: d for d in Degree}

EVEN = "even"
ODD = "odd"


def degree(gamma1: int, gamma2: int) -> Degree:
    return _BY_BITS[(gamma1 % 2, gamma2 % 2)]


def deg_add(a: Degree, b: Degree) -> Degree:
    return _BY_BITS[(a.gamma1 ^ b.gamma1, a.gamma2 ^ b.gamma2)]


def scalar_product(a: Degree, b: Degree) -> int:
    """Standard scalar product on Z2^2, as a bit."""
    return (a.gamma1 * b.gamma1 + a.gamma2 * b.gamma2) % 2


def bracket_sign(a: Degree, b: Degree) -> int:
    """(-1)^<a,b>; +1 means the bracket is a commutator, -1 an anticommutator."""
    return -1 if scalar_product(a, b) else 1


def total_parity(a: Degree) -> str:
    return ODD if (a.gamma1 + a.gamma2) % 2 else EVEN


def sector_index(d: Degree) -> int:
    return SECTORS.index(d)
