"""Multivariate polynomials with exact rational coefficients.

Variables are identified by sorted tuples of positive ints (``VarId``);
for the volume computation a variable is the label of a flat, so ``(1, 4)``
stands for x_{14}.  A ``Monomial`` is a frozen sorted tuple of
(variable, exponent) pairs and a ``RationalPoly`` maps monomials to
``Fraction`` coefficients, dropping zeros eagerly.

Canonical term order (used by serialization and pretty printing) is graded
lexicographic: lower total degree first, ties broken by the per-variable
key (cardinality, then lexicographic on the label) with higher powers of
an earlier variable first.  A formal product of partial derivatives is
represented by the same ``Monomial`` type (``DerivativeMonomial`` alias).
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence, Union

VarId = tuple[int, ...]

# Monomial expansion in __pow__ switches to repeated squaring above this
# many base terms to avoid enumerating huge composition sets.
_MULTINOMIAL_TERM_LIMIT = 16


def var_key(v: VarId) -> tuple[int, VarId]:
    return (len(v), v)


def label_str(v: VarId) -> str:
    return ",".join(str(i) for i in v)


def parse_label(s: str) -> VarId:
    try:
        parts = tuple(int(p) for p in s.split(","))
    except ValueError as exc:
        raise ValueError(f"bad variable label {s!r}") from exc
    if not parts or any(p <= 0 for p in parts) or list(parts) != sorted(set(parts)):
        raise ValueError(f"variable label must be distinct ascending positive ints: {s!r}")
    return parts


def fresh_label(labels: Iterable[VarId]) -> VarId:
    """A singleton label guaranteed not to collide with any given label."""
    top = 0
    for lab in labels:
        for i in lab:
            top = max(top, i)
    return (top + 1,)


def frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def parse_frac(s: str) -> Fraction:
    return Fraction(s)


class Monomial:
    """Immutable product of variable powers; the empty product is 1."""

    __slots__ = ("_items", "_degree", "_hash")

    def __init__(self, exponents: Mapping[VarId, int] | Iterable[tuple[VarId, int]] = ()):
        pairs = exponents.items() if isinstance(exponents, Mapping) else exponents
        merged: dict[VarId, int] = {}
        for v, e in pairs:
            if e < 0:
                raise ValueError("negative exponent")
            if e:
                merged[v] = merged.get(v, 0) + e
        items = tuple(sorted(merged.items(), key=lambda ve: var_key(ve[0])))
        self._items: tuple[tuple[VarId, int], ...] = items
        self._degree = sum(e for _, e in items)
        self._hash = hash(items)

    @classmethod
    def from_vars(cls, vs: Iterable[VarId]) -> "Monomial":
        return cls([(v, 1) for v in vs])

    @classmethod
    def _from_sorted(cls, items: tuple[tuple[VarId, int], ...]) -> "Monomial":
        """Trusted constructor: items already sorted by var_key, exponents
        positive, variables distinct."""
        m = cls.__new__(cls)
        m._items = items
        m._degree = sum(e for _, e in items)
        m._hash = hash(items)
        return m

    @property
    def degree(self) -> int:
        return self._degree

    def items(self) -> tuple[tuple[VarId, int], ...]:
        return self._items

    def variables(self) -> tuple[VarId, ...]:
        return tuple(v for v, _ in self._items)

    def exponent(self, v: VarId) -> int:
        for w, e in self._items:
            if w == v:
                return e
        return 0

    def __mul__(self, other: "Monomial") -> "Monomial":
        a, b = self._items, other._items
        if not a:
            return other
        if not b:
            return self
        out: list[tuple[VarId, int]] = []
        i = j = 0
        while i < len(a) and j < len(b):
            va, ea = a[i]
            vb, eb = b[j]
            if va == vb:
                out.append((va, ea + eb))
                i += 1
                j += 1
            elif var_key(va) < var_key(vb):
                out.append(a[i])
                i += 1
            else:
                out.append(b[j])
                j += 1
        out.extend(a[i:])
        out.extend(b[j:])
        return Monomial._from_sorted(tuple(out))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Monomial) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def sort_key(self):
        return (self._degree, tuple((var_key(v), -e) for v, e in self._items))

    def __repr__(self) -> str:
        if not self._items:
            return "1"
        return "".join(
            f"x{{{label_str(v)}}}" + (f"^{e}" if e > 1 else "") for v, e in self._items
        )


DerivativeMonomial = Monomial

ONE = Monomial()

Scalar = Union[Fraction, int]
PolyLike = Union["RationalPoly", Fraction, int]


class RationalPoly:
    """Polynomial as a monomial -> Fraction map; immutable by convention."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                c = Fraction(c)
                if c:
                    clean[m] = c
        self._terms = clean

    @classmethod
    def zero(cls) -> "RationalPoly":
        return cls()

    @classmethod
    def constant(cls, c: Scalar) -> "RationalPoly":
        return cls({ONE: Fraction(c)})

    @classmethod
    def variable(cls, v: VarId) -> "RationalPoly":
        return cls({Monomial({v: 1}): Fraction(1)})

    @classmethod
    def linear_form(cls, coeffs: Mapping[VarId, Scalar]) -> "RationalPoly":
        return cls({Monomial({v: 1}): Fraction(c) for v, c in coeffs.items()})

    @classmethod
    def sum(cls, pieces: Iterable["RationalPoly"]) -> "RationalPoly":
        """Sum many polynomials into one dict (repeated + copies every term)."""
        out: dict[Monomial, Fraction] = {}
        for piece in pieces:
            for m, c in piece._terms.items():
                s = out.get(m, Fraction(0)) + c
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        res = cls.__new__(cls)
        res._terms = out
        return res

    def terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in canonical graded-lex order."""
        return sorted(self._terms.items(), key=lambda mc: mc[0].sort_key())

    def monomials(self) -> Iterator[Monomial]:
        return iter(self._terms)

    def coefficient(self, m: Monomial) -> Fraction:
        return self._terms.get(m, Fraction(0))

    def variables(self) -> frozenset[VarId]:
        return frozenset(v for m in self._terms for v in m.variables())

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((m.degree for m in self._terms), default=-1)

    def is_homogeneous(self, d: int) -> bool:
        return all(m.degree == d for m in self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RationalPoly.constant(other)
        return isinstance(other, RationalPoly) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: PolyLike) -> "RationalPoly":
        if isinstance(other, (int, Fraction)):
            other = RationalPoly.constant(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, Fraction(0)) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        res = RationalPoly.__new__(RationalPoly)
        res._terms = out
        return res

    __radd__ = __add__

    def __neg__(self) -> "RationalPoly":
        res = RationalPoly.__new__(RationalPoly)
        res._terms = {m: -c for m, c in self._terms.items()}
        return res

    def __sub__(self, other: PolyLike) -> "RationalPoly":
        if isinstance(other, (int, Fraction)):
            other = RationalPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other: PolyLike) -> "RationalPoly":
        return (-self) + other

    def scale(self, c: Scalar) -> "RationalPoly":
        c = Fraction(c)
        if not c:
            return RationalPoly.zero()
        res = RationalPoly.__new__(RationalPoly)
        res._terms = {m: c * k for m, k in self._terms.items()}
        return res

    def __mul__(self, other: PolyLike) -> "RationalPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = m1 * m2
                s = out.get(m, Fraction(0)) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        res = RationalPoly.__new__(RationalPoly)
        res._terms = out
        return res

    def __rmul__(self, other: Scalar) -> "RationalPoly":
        return self.scale(other)

    def __truediv__(self, c: Scalar) -> "RationalPoly":
        return self.scale(Fraction(1, 1) / Fraction(c))

    def __pow__(self, k: int) -> "RationalPoly":
        if k < 0:
            raise ValueError("negative power")
        if k == 0:
            return RationalPoly.constant(1)
        items = list(self._terms.items())
        if len(items) <= _MULTINOMIAL_TERM_LIMIT:
            return self._pow_multinomial(items, k)
        half = self ** (k // 2)
        sq = half * half
        return sq * self if k % 2 else sq

    @staticmethod
    def _pow_multinomial(items: list[tuple[Monomial, Fraction]], k: int) -> "RationalPoly":
        t = len(items)
        if t == 0:
            return RationalPoly.zero()
        # A product of distinct single variables (the linear-form case)
        # yields presorted result monomials directly.
        linear = all(
            len(m.items()) == 1 and m.items()[0][1] == 1 for m, _ in items
        )
        if linear:
            items = sorted(items, key=lambda mc: var_key(mc[0].items()[0][0]))
            vs = [m.items()[0][0] for m, _ in items]
            linear = len(set(vs)) == t
        nums = [c.numerator for _, c in items]
        dens = [c.denominator for _, c in items]
        out: dict[Monomial, Fraction] = {}
        kfact = math.factorial(k)
        # Compositions of k into t parts via stars and bars; the term
        # coefficient k!/prod(a!) prod(c^a) is assembled in integers and
        # normalized once.
        for bars in combinations(range(k + t - 1), t - 1):
            alpha = []
            prev = -1
            for b in bars:
                alpha.append(b - prev - 1)
                prev = b
            alpha.append(k + t - 2 - prev)
            num, den = kfact, 1
            for n, d, a in zip(nums, dens, alpha):
                if a:
                    num *= n**a
                    den *= d**a * math.factorial(a)
            if linear:
                mono = Monomial._from_sorted(
                    tuple((v, a) for v, a in zip(vs, alpha) if a)
                )
            else:
                mono = ONE
                for (m, _), a in zip(items, alpha):
                    if a:
                        mono = mono * Monomial({v: e * a for v, e in m.items()})
            s = out.get(mono, Fraction(0)) + Fraction(num, den)
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        res = RationalPoly.__new__(RationalPoly)
        res._terms = out
        return res

    def derivative(self, spec: VarId | Monomial | Mapping[VarId, int]) -> "RationalPoly":
        """Apply the formal product of partials given by spec.

        spec may be a single variable, a DerivativeMonomial, or a map
        variable -> order.
        """
        if isinstance(spec, tuple):
            orders: dict[VarId, int] = {spec: 1}
        elif isinstance(spec, Monomial):
            orders = dict(spec.items())
        else:
            orders = {v: e for v, e in spec.items() if e}
        out: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            factor = 1
            hit = 0
            items: list[tuple[VarId, int]] = []
            for v, e in m.items():
                order = orders.get(v)
                if order is None:
                    items.append((v, e))
                    continue
                hit += 1
                if e < order:
                    factor = 0
                    break
                for t in range(order):
                    factor *= e - t
                if e > order:
                    items.append((v, e - order))
            if not factor or hit != len(orders):
                continue
            mono = Monomial._from_sorted(tuple(items))
            s = out.get(mono, Fraction(0)) + c * factor
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        res = RationalPoly.__new__(RationalPoly)
        res._terms = out
        return res

    def antiderivative(self, v: VarId) -> "RationalPoly":
        """Antiderivative in v with zero constant term in v."""
        out: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            e = m.exponent(v)
            exps = dict(m.items())
            exps[v] = e + 1
            out[Monomial(exps)] = c / (e + 1)
        res = RationalPoly.__new__(RationalPoly)
        res._terms = out
        return res

    def substitute(self, mapping: Mapping[VarId, PolyLike]) -> "RationalPoly":
        """Replace every variable by the given polynomial (or scalar).

        Every variable occurring in self must be mapped; raises KeyError
        otherwise.
        """
        table: dict[VarId, RationalPoly] = {}
        for v, val in mapping.items():
            table[v] = val if isinstance(val, RationalPoly) else RationalPoly.constant(val)
        missing = self.variables() - set(table)
        if missing:
            raise KeyError(f"substitute: unmapped variables {sorted(missing, key=var_key)}")
        powers: dict[tuple[VarId, int], RationalPoly] = {}

        def power(v: VarId, e: int) -> "RationalPoly":
            got = powers.get((v, e))
            if got is None:
                got = powers[(v, e)] = table[v] ** e
            return got

        def piece(mc):
            m, c = mc
            out = RationalPoly.constant(c)
            for v, e in m.items():
                out = out * power(v, e)
            return out

        return RationalPoly.sum(map(piece, self._terms.items()))

    def rename(self, mapping: Mapping[VarId, VarId]) -> "RationalPoly":
        """Substitute variables by variables (injective on self's support)."""
        return self.substitute({v: RationalPoly.variable(w) for v, w in mapping.items()})

    def evaluate(self, point: Mapping[VarId, Scalar]) -> Fraction:
        missing = self.variables() - set(point)
        if missing:
            raise KeyError(f"evaluate: unmapped variables {sorted(missing, key=var_key)}")
        total = Fraction(0)
        for m, c in self._terms.items():
            val = c
            for v, e in m.items():
                val *= Fraction(point[v]) ** e
            total += val
        return total

    def __repr__(self) -> str:
        return f"RationalPoly({pretty(self)})"


def pretty(p: RationalPoly) -> str:
    """Human form, canonical order: -1/2·x{4}^2 + 1·x{4}x{1,4} + ..."""
    if p.is_zero:
        return "0"
    return " + ".join(
        frac_str(c) if m == ONE else f"{frac_str(c)}·{m!r}" for m, c in p.terms()
    )


def diff_terms(a: RationalPoly, b: RationalPoly) -> list[str]:
    """Human-readable term-by-term differences, canonical order."""
    lines = []
    monomials = sorted(
        set(a.monomials()) | set(b.monomials()), key=Monomial.sort_key
    )
    for m in monomials:
        ca, cb = a.coefficient(m), b.coefficient(m)
        if ca == cb:
            continue
        lines.append(f"{m!r}: {frac_str(ca)} vs {frac_str(cb)}")
    return lines


def poly_to_json_dict(p: RationalPoly, degree: int) -> dict:
    terms = [
        {
            "coeff": frac_str(c),
            "exponents": {label_str(v): e for v, e in m.items()},
        }
        for m, c in p.terms()
    ]
    return {"degree": degree, "terms": terms}


def poly_from_json_dict(doc: Mapping) -> tuple[RationalPoly, int]:
    if not isinstance(doc, Mapping) or "degree" not in doc or "terms" not in doc:
        raise ValueError("polynomial document needs 'degree' and 'terms'")
    degree = doc["degree"]
    if not isinstance(degree, int) or degree < 0:
        raise ValueError("'degree' must be a nonnegative int")
    terms: dict[Monomial, Fraction] = {}
    for entry in doc["terms"]:
        coeff = parse_frac(entry["coeff"])
        exps = {parse_label(k): int(e) for k, e in entry["exponents"].items()}
        if any(e <= 0 for e in exps.values()):
            raise ValueError("exponents must be positive")
        m = Monomial(exps)
        if m in terms:
            raise ValueError(f"duplicate monomial {m!r}")
        terms[m] = coeff
    return RationalPoly(terms), degree
