"""Sparse univariate and bivariate polynomials with exact coefficient arithmetic.

Bivariate coefficients are stored as a map ``(i, j) -> c`` for the monomial
``x**i * y**j``. Exact zeros are dropped on construction so that two
polynomials compare equal iff their coefficient maps do.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping
from types import MappingProxyType

__all__ = ["UnivariatePoly", "BivariatePoly"]


class UnivariatePoly:
    """Polynomial in one variable, constant term first."""

    __slots__ = ("_coeffs",)

    def __init__(self, coefficients: Iterable[float] = ()):
        coeffs = [float(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0.0:
            coeffs.pop()
        self._coeffs = tuple(coeffs)

    @classmethod
    def constant(cls, c: float) -> UnivariatePoly:
        return cls([c])

    @property
    def coefficients(self) -> tuple[float, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self._coeffs) - 1

    def __call__(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self._coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> UnivariatePoly:
        return UnivariatePoly(k * c for k, c in enumerate(self._coeffs) if k > 0)

    def abs_bound(self, r: float) -> float:
        """Upper bound of ``|p(x)|`` on ``[-r, r]`` (sum of absolute terms)."""
        return sum(abs(c) * r**k for k, c in enumerate(self._coeffs))

    def __add__(self, other):
        if not isinstance(other, UnivariatePoly):
            other = UnivariatePoly([other])
        n = max(len(self._coeffs), len(other._coeffs))
        a = self._coeffs + (0.0,) * (n - len(self._coeffs))
        b = other._coeffs + (0.0,) * (n - len(other._coeffs))
        return UnivariatePoly(p + q for p, q in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return UnivariatePoly(-c for c in self._coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, UnivariatePoly):
            return UnivariatePoly(c * other for c in self._coeffs)
        if not self._coeffs or not other._coeffs:
            return UnivariatePoly()
        out = [0.0] * (len(self._coeffs) + len(other._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            for j, b in enumerate(other._coeffs):
                out[i + j] += a * b
        return UnivariatePoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, UnivariatePoly):
            return self._coeffs == other._coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self._coeffs)

    def __repr__(self):
        return f"UnivariatePoly({list(self._coeffs)!r})"

    def to_json_obj(self) -> dict:
        return {"terms": [{"i": i, "j": 0, "c": c}
                          for i, c in enumerate(self._coeffs) if c != 0.0]}

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> UnivariatePoly:
        terms = obj["terms"]
        if any(int(t.get("j", 0)) != 0 for t in terms):
            raise ValueError("univariate polynomial cannot carry y-exponents")
        n = 1 + max((int(t["i"]) for t in terms), default=-1)
        coeffs = [0.0] * n
        for t in terms:
            coeffs[int(t["i"])] += float(t["c"])
        return cls(coeffs)


class BivariatePoly:
    """Sparse polynomial in ``(x, y)`` with a total-degree bound.

    Products and shifts drop every monomial whose total degree exceeds
    ``max_degree``; sums keep the larger bound. Evaluation is a nested Horner
    scheme over the stored monomials and never truncates.
    """

    __slots__ = ("_terms", "max_degree", "_rows")

    def __init__(self, coefficients: Mapping[tuple[int, int], float] | None = None,
                 max_degree: int | None = None):
        terms: dict[tuple[int, int], float] = {}
        for (i, j), c in (coefficients or {}).items():
            i, j = int(i), int(j)
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in monomial {(i, j)}")
            c = float(c)
            if c != 0.0:
                terms[(i, j)] = c
        top = max((i + j for i, j in terms), default=0)
        if max_degree is None:
            max_degree = top
        elif top > max_degree:
            raise ValueError(f"monomial of degree {top} exceeds bound {max_degree}")
        self._terms = dict(sorted(terms.items()))
        self.max_degree = int(max_degree)
        # rows[j] holds the x-coefficients multiplying y**j, for Horner evaluation
        ny = 1 + max((j for _, j in self._terms), default=-1)
        rows = [[] for _ in range(ny)]
        for (i, j), c in self._terms.items():
            row = rows[j]
            row.extend([0.0] * (i + 1 - len(row)))
            row[i] = c
        self._rows = tuple(tuple(r) for r in rows)

    @classmethod
    def constant(cls, c: float, max_degree: int = 0) -> BivariatePoly:
        return cls({(0, 0): c}, max_degree)

    @property
    def coefficients(self) -> Mapping[tuple[int, int], float]:
        return MappingProxyType(self._terms)

    @property
    def degree(self) -> int:
        return max((i + j for i, j in self._terms), default=-1)

    def __call__(self, x: float, y: float) -> float:
        acc = 0.0
        for row in reversed(self._rows):
            px = 0.0
            for c in reversed(row):
                px = px * x + c
            acc = acc * y + px
        return acc

    def __getitem__(self, key: tuple[int, int]) -> float:
        return self._terms.get(key, 0.0)

    def restrict_y0(self) -> UnivariatePoly:
        """The univariate polynomial ``x -> P(x, 0)``."""
        return UnivariatePoly(self._rows[0] if self._rows else ())

    def shift(self, di: int, dj: int) -> BivariatePoly:
        """Multiply by ``x**di * y**dj``; negative shifts need every term divisible."""
        out = {}
        for (i, j), c in self._terms.items():
            if i + di < 0 or j + dj < 0:
                raise ValueError(f"monomial {(i, j)} not divisible by shift {(di, dj)}")
            out[(i + di, j + dj)] = c
        bound = self.max_degree + di + dj
        return BivariatePoly(out, max(bound, max((i + j for i, j in out), default=0)))

    def truncate(self, degree: int) -> BivariatePoly:
        return BivariatePoly({k: c for k, c in self._terms.items() if sum(k) <= degree},
                             degree)

    def scale_variables(self, rx: float, ry: float) -> BivariatePoly:
        """The polynomial ``(x, y) -> P(rx * x, ry * y)``."""
        return BivariatePoly({(i, j): c * rx**i * ry**j
                              for (i, j), c in self._terms.items()}, self.max_degree)

    def _coerce(self, other) -> BivariatePoly:
        if isinstance(other, BivariatePoly):
            return other
        return BivariatePoly.constant(other, 0)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0.0) + c
        return BivariatePoly(out, max(self.max_degree, other.max_degree))

    __radd__ = __add__

    def __neg__(self):
        return BivariatePoly({k: -c for k, c in self._terms.items()}, self.max_degree)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, BivariatePoly):
            return BivariatePoly({k: c * other for k, c in self._terms.items()},
                                 self.max_degree)
        bound = max(self.max_degree, other.max_degree)
        out: dict[tuple[int, int], float] = {}
        for (i1, j1), a in self._terms.items():
            for (i2, j2), b in other._terms.items():
                if i1 + i2 + j1 + j2 <= bound:
                    k = (i1 + i2, j1 + j2)
                    out[k] = out.get(k, 0.0) + a * b
        return BivariatePoly(out, bound)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, BivariatePoly):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __repr__(self):
        return f"BivariatePoly({self._terms!r}, max_degree={self.max_degree})"

    def to_json_obj(self) -> dict:
        return {"terms": [{"i": i, "j": j, "c": c} for (i, j), c in self._terms.items()],
                "max_degree": self.max_degree}

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> BivariatePoly:
        terms: dict[tuple[int, int], float] = {}
        for t in obj["terms"]:
            k = (int(t["i"]), int(t["j"]))
            terms[k] = terms.get(k, 0.0) + float(t["c"])
        return cls(terms, obj.get("max_degree"))

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json(cls, text: str) -> BivariatePoly:
        return cls.from_json_obj(json.loads(text))
