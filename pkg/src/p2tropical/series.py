"""Truncated series in a formal parameter t with Laurent-monomial coefficients.

Terms are keyed by ``(k, (mx, my))`` meaning ``t**k * x**mx * y**my`` and carry
``Fraction`` coefficients.  Every product drops terms with ``k > order``.
"""
from __future__ import annotations

from fractions import Fraction


class TruncatedSeries:
    __slots__ = ("terms", "order")

    def __init__(self, terms=None, order: int = 0):
        self.order = order
        self.terms = {}
        for key, c in (terms or {}).items():
            k, m = key
            if k <= order and c:
                self.terms[(k, tuple(m))] = Fraction(c)

    @classmethod
    def one(cls, order: int) -> "TruncatedSeries":
        return cls({(0, (0, 0)): 1}, order)

    @classmethod
    def monomial(cls, m, k: int = 0, c=1, order: int = 0) -> "TruncatedSeries":
        return cls({(k, tuple(m)): c}, order)

    def copy(self) -> "TruncatedSeries":
        out = TruncatedSeries(order=self.order)
        out.terms = dict(self.terms)
        return out

    def __eq__(self, other):
        return isinstance(other, TruncatedSeries) and self.terms == other.terms

    def __repr__(self):
        return f"TruncatedSeries({self.pretty()}, order={self.order})"

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (k, (a, b)), c in sorted(self.terms.items()):
            mono = "".join(
                f"{v}^{e}" if e != 1 else v for v, e in (("t", k), ("x", a), ("y", b)) if e
            )
            parts.append(f"{c}{'*' + mono if mono else ''}" if c != 1 or not mono else mono)
        return " + ".join(parts)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        out = TruncatedSeries(order=min(self.order, other.order))
        out.terms = {key: c for key, c in self.terms.items() if key[0] <= out.order}
        for key, c in other.terms.items():
            if key[0] <= out.order:
                v = out.terms.get(key, 0) + c
                if v:
                    out.terms[key] = v
                else:
                    out.terms.pop(key, None)
        return out

    def __neg__(self):
        out = TruncatedSeries(order=self.order)
        out.terms = {key: -c for key, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            out = TruncatedSeries(order=self.order)
            out.terms = {key: c * other for key, c in self.terms.items() if c * other}
            return out
        K = min(self.order, other.order)
        acc = {}
        for (k1, (a1, b1)), c1 in self.terms.items():
            for (k2, (a2, b2)), c2 in other.terms.items():
                k = k1 + k2
                if k > K:
                    continue
                key = (k, (a1 + a2, b1 + b2))
                acc[key] = acc.get(key, 0) + c1 * c2
        out = TruncatedSeries(order=K)
        out.terms = {key: c for key, c in acc.items() if c}
        return out

    __rmul__ = __mul__

    def shift(self, m, k: int = 0) -> "TruncatedSeries":
        """Multiply by ``t**k z**m``."""
        out = TruncatedSeries(order=self.order)
        out.terms = {
            (kk + k, (a + m[0], b + m[1])): c
            for (kk, (a, b)), c in self.terms.items()
            if kk + k <= self.order
        }
        return out

    def constant_part(self) -> Fraction:
        return self.terms.get((0, (0, 0)), Fraction(0))

    def degree_part(self, k: int) -> dict:
        return {m: c for (kk, m), c in self.terms.items() if kk == k}

    def min_positive_degree(self):
        ks = [k for (k, _), c in self.terms.items() if k > 0]
        return min(ks) if ks else None

    def __pow__(self, n: int) -> "TruncatedSeries":
        """Integer power of a unit ``1 + g`` with ``g`` of positive t-degree (binomial series)."""
        if n == 0:
            return TruncatedSeries.one(self.order)
        if n > 0 and len(self.terms) == 1:
            (k, m), c = next(iter(self.terms.items()))
            return TruncatedSeries({(k * n, (m[0] * n, m[1] * n)): c ** n}, self.order)
        if self.constant_part() != 1 or any(k == 0 and m != (0, 0) for k, m in self.terms):
            if n < 0:
                raise ValueError("only units 1 + O(t) can be inverted")
            out = TruncatedSeries.one(self.order)
            for _ in range(n):
                out = out * self
            return out
        g = self - TruncatedSeries.one(self.order)
        out = TruncatedSeries.one(self.order)
        gp = TruncatedSeries.one(self.order)
        binom = Fraction(1)
        j = 0
        while True:
            j += 1
            gp = gp * g
            if not gp.terms:
                break
            binom = binom * (n - j + 1) / j
            if binom == 0:
                break
            out = out + gp * binom
        return out

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.terms, min(order, self.order))

    def at_t1(self) -> dict:
        """Set ``t = 1``: a map exponent -> coefficient."""
        acc = {}
        for (_, m), c in self.terms.items():
            acc[m] = acc.get(m, 0) + c
        return {m: c for m, c in acc.items() if c}
