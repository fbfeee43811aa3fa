"""
Classes in equivariant K-theory of a point, written as finite sums of weights.

A weight is a Monomial in the equivariant parameters (u1, L1, q1, x1, z, ...);
a class maps weights to integer multiplicities.
"""

from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple

from engine.ring import LaurentPoly, Monomial, sorted_symbols


class KClass:
    __slots__ = ("_weights",)

    def __init__(self, weights: Optional[Mapping[Monomial, int]] = None):
        self._weights: Dict[Monomial, int] = {m: n for m, n in (weights or {}).items() if n != 0}

    @classmethod
    def of(cls, *weights: Monomial) -> "KClass":
        out: Dict[Monomial, int] = {}
        for m in weights:
            out[m] = out.get(m, 0) + 1
        return cls(out)

    @classmethod
    def tautological(cls, rank: int, prefix: str = "u") -> "KClass":
        """U = u1 + ... + ur"""
        return cls.of(*(Monomial.symbol(f"{prefix}{i}") for i in range(1, rank + 1)))

    @classmethod
    def koszul(cls, line1: Monomial, line2: Monomial) -> "KClass":
        """O_Delta = (1 - L1)(1 - L2) = 1 - L1 - L2 + L1 L2"""
        return cls({Monomial.one(): 1, line1: -1, line2: -1, line1 * line2: 1})

    def items(self) -> Iterator[Tuple[Monomial, int]]:
        return iter(sorted(self._weights.items(), key=lambda item: str(item[0])))

    def weights(self) -> Dict[Monomial, int]:
        return dict(self._weights)

    def rank(self) -> int:
        return sum(self._weights.values())

    def determinant(self) -> Monomial:
        det = Monomial.one()
        for m, n in self._weights.items():
            det = det * m ** n
        return det

    def is_zero(self) -> bool:
        return not self._weights

    def __add__(self, other: "KClass") -> "KClass":
        out = dict(self._weights)
        for m, n in other._weights.items():
            out[m] = out.get(m, 0) + n
        return KClass(out)

    def __neg__(self) -> "KClass":
        return KClass({m: -n for m, n in self._weights.items()})

    def __sub__(self, other: "KClass") -> "KClass":
        return self + (-other)

    def __mul__(self, other: "KClass") -> "KClass":
        out: Dict[Monomial, int] = {}
        for m1, n1 in self._weights.items():
            for m2, n2 in other._weights.items():
                m = m1 * m2
                out[m] = out.get(m, 0) + n1 * n2
        return KClass(out)

    def scaled(self, factor: Monomial) -> "KClass":
        """Tensor with a line of weight factor"""
        return KClass({m * factor: n for m, n in self._weights.items()})

    def dual(self) -> "KClass":
        return KClass({m.inverse(): n for m, n in self._weights.items()})

    def substitute(self, mapping: Mapping[str, Monomial]) -> "KClass":
        out: Dict[Monomial, int] = {}
        for m, n in self._weights.items():
            image = Monomial.one()
            for s, e in m.items():
                image = image * (mapping[s] ** e if s in mapping else Monomial.symbol(s, e))
            out[image] = out.get(image, 0) + n
        return KClass(out)

    def character(self) -> LaurentPoly:
        return LaurentPoly({m: n for m, n in self._weights.items()})

    def symbols(self) -> Iterable[str]:
        names = set()
        for m in self._weights:
            names.update(m.symbols())
        return sorted_symbols(names)

    def __eq__(self, other) -> bool:
        return isinstance(other, KClass) and self._weights == other._weights

    def __hash__(self) -> int:
        return hash(frozenset(self._weights.items()))

    def __str__(self) -> str:
        if not self._weights:
            return "0"
        parts = []
        for m, n in self.items():
            coeff = "" if abs(n) == 1 else f"{abs(n)}*"
            sign = "-" if n < 0 else "+"
            parts.append(f"{sign} {coeff}{m}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self) -> str:
        return f"KClass({self})"
