"""Multilinear pseudo-Boolean polynomials over 0/1 variables.

A polynomial is a map from canonical variable tuples to real coefficients;
the empty tuple holds the constant. Keys are duplicate-free and sorted under
the total order on variable ids, so x*x collapses to x on insertion and
iteration order is reproducible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

ZERO_TOL = 1e-12


class PolynomialError(ValueError):
    pass


class MissingVariableError(PolynomialError):
    """An evaluation did not cover every variable of the polynomial."""


class _VarBase:
    """Mixin giving every variable kind a shared total order."""

    __slots__ = ()

    def sort_key(self) -> tuple:
        raise NotImplementedError

    def __lt__(self, other: "_VarBase"):
        return self.sort_key() < other.sort_key()

    def __le__(self, other: "_VarBase"):
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other: "_VarBase"):
        return self.sort_key() > other.sort_key()

    def __ge__(self, other: "_VarBase"):
        return self.sort_key() >= other.sort_key()


@dataclass(frozen=True)
class JoinVar(_VarBase):
    """Edge (u, v) joined at a given rank; u < v."""

    u: int
    v: int
    rank: int

    def sort_key(self):
        return (0, self.u, self.v, self.rank)

    def __str__(self):
        return f"x{self.u}-{self.v}r{self.rank}"


@dataclass(frozen=True)
class CountSlack(_VarBase):
    """Unary slack: table appears k extra times among active join variables."""

    table: int
    k: int

    def sort_key(self):
        return (1, self.table, self.k, 0)

    def __str__(self):
        return f"y{self.table}k{self.k}"


@dataclass(frozen=True)
class AuxVar(_VarBase):
    """Auxiliary variable introduced by quadratization."""

    serial: int

    def sort_key(self):
        return (2, self.serial, 0, 0)

    def __str__(self):
        return f"w{self.serial}"


VariableId = JoinVar | CountSlack | AuxVar

_VAR_RE = re.compile(r"^(?:x(\d+)-(\d+)r(\d+)|y(\d+)k(\d+)|w(\d+))$")


def parse_variable(text: str) -> VariableId:
    m = _VAR_RE.match(text)
    if not m:
        raise PolynomialError(f"cannot parse variable name {text!r}")
    if m.group(1) is not None:
        return JoinVar(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    if m.group(4) is not None:
        return CountSlack(int(m.group(4)), int(m.group(5)))
    return AuxVar(int(m.group(6)))


TermKey = tuple  # tuple[VariableId, ...], sorted, duplicate-free


def term_key(vars: Iterable[VariableId]) -> TermKey:
    """Canonical key for a product of variables: sorted and deduplicated."""
    return tuple(sorted(set(vars)))


class Polynomial:
    """Value-semantic multilinear polynomial; all operations return new values."""

    __slots__ = ("_terms", "_vars")

    def __init__(self, terms: Mapping | None = None):
        acc: dict = {}
        if terms:
            for key, coeff in terms.items():
                k = term_key(key)
                acc[k] = acc.get(k, 0.0) + float(coeff)
        self._terms = {k: c for k, c in acc.items() if abs(c) > ZERO_TOL or (k == () and c != 0.0)}
        self._vars = None

    @classmethod
    def _wrap(cls, terms: dict) -> "Polynomial":
        """Trusted constructor: terms already canonical and pruned."""
        p = cls.__new__(cls)
        p._terms = terms
        p._vars = None
        return p

    @classmethod
    def from_accumulator(cls, acc: Mapping) -> "Polynomial":
        """Build from a dict whose keys are already canonical term keys."""
        return cls._wrap({k: float(c) for k, c in acc.items() if abs(c) > ZERO_TOL})

    @property
    def terms(self) -> dict:
        return self._terms

    @property
    def constant(self) -> float:
        return self._terms.get((), 0.0)

    def coefficient(self, vars: Iterable[VariableId]) -> float:
        return self._terms.get(term_key(vars), 0.0)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self._terms == other._terms

    def __repr__(self):
        return f"Polynomial({len(self._terms)} terms, degree {self.degree()})"

    def add_term(self, vars: Iterable[VariableId], coeff: float) -> "Polynomial":
        d = dict(self._terms)
        k = term_key(vars)
        c = d.get(k, 0.0) + coeff
        if abs(c) <= ZERO_TOL:
            d.pop(k, None)
        else:
            d[k] = c
        return Polynomial._wrap(d)

    def variables(self) -> frozenset:
        if self._vars is None:
            vs: set = set()
            for k in self._terms:
                vs.update(k)
            self._vars = frozenset(vs)
        return self._vars

    def degree(self) -> int:
        return max((len(k) for k in self._terms), default=0)

    def max_abs_coeff(self) -> float:
        """Largest |coefficient| over non-constant terms."""
        best = 0.0
        for k, c in self._terms.items():
            if k and abs(c) > best:
                best = abs(c)
        if best == 0.0:
            raise PolynomialError("polynomial has no non-constant terms")
        return best

    def scale(self, s: float) -> "Polynomial":
        return Polynomial._wrap(
            {k: c * s for k, c in self._terms.items() if abs(c * s) > ZERO_TOL}
        )

    def __add__(self, other: "Polynomial") -> "Polynomial":
        d = dict(self._terms)
        for k, c in other._terms.items():
            nc = d.get(k, 0.0) + c
            if abs(nc) <= ZERO_TOL:
                d.pop(k, None)
            else:
                d[k] = nc
        return Polynomial._wrap(d)

    def normalize(self) -> tuple["Polynomial", float]:
        """Divide by the largest |coefficient| so coefficients land in [-1, 1].

        Returns (scaled polynomial, the scale factor). The minimizer set is
        unchanged by positive scaling.
        """
        m = self.max_abs_coeff()
        return self.scale(1.0 / m), m

    def evaluate(self, assignment: Mapping) -> float:
        """Value at a 0/1 assignment. Every variable must be assigned.

        Uses whichever is cheaper: scanning terms, or enumerating subsets of
        the active variables and looking them up.
        """
        for v in self.variables():
            if v not in assignment:
                raise MissingVariableError(f"assignment is missing {v}")
        active = sorted(v for v in self.variables() if assignment[v])
        n_active = len(active)
        if n_active < 62 and (1 << n_active) < len(self._terms):
            total = self._terms.get((), 0.0)
            for size in range(1, n_active + 1):
                for combo in combinations(active, size):
                    c = self._terms.get(combo)
                    if c is not None:
                        total += c
            return total
        total = 0.0
        for k, c in self._terms.items():
            if all(assignment[v] for v in k):
                total += c
        return total

    def dump(self) -> str:
        """Text form: one `coeff<TAB>v1,v2,...` line per term, sorted."""
        lines = [
            "# pseudo-boolean polynomial",
            f"# terms {len(self._terms)} degree {self.degree()}",
        ]
        for k in sorted(self._terms, key=lambda t: (len(t), tuple(v.sort_key() for v in t))):
            names = ",".join(str(v) for v in k)
            lines.append(f"{self._terms[k]!r}\t{names}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "Polynomial":
        acc: dict = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            # split before stripping: the constant term dumps as "coeff\t"
            # and a full strip would eat its tab
            parts = raw.split("\t")
            if len(parts) == 1:
                parts = [stripped, ""]  # bare coefficient = constant term
            if len(parts) != 2:
                raise PolynomialError(f"line {lineno}: expected coeff<TAB>vars")
            try:
                coeff = float(parts[0])
            except ValueError:
                raise PolynomialError(f"line {lineno}: bad coefficient {parts[0]!r}") from None
            names = parts[1].strip()
            vars = tuple(parse_variable(t) for t in names.split(",")) if names else ()
            k = term_key(vars)
            acc[k] = acc.get(k, 0.0) + coeff
        return cls.from_accumulator(acc)


def expand_squared_linear(constant: float, linterms: Iterable[tuple]) -> Polynomial:
    """Multilinear expansion of (constant + sum_i coeff_i * prod(term_i))**2.

    Each entry of linterms is (variables, coeff) where variables is an
    iterable of VariableId forming one product. Idempotence is applied, so
    the diagonal of the square folds back onto the original terms.
    """
    items = [(term_key(vs), float(c)) for vs, c in linterms]
    acc: dict = {}

    def put(key, c):
        acc[key] = acc.get(key, 0.0) + c

    if constant:
        put((), constant * constant)
    for key, c in items:
        # 2*constant*c from the cross term, plus c^2 from the diagonal
        put(key, 2.0 * constant * c + c * c)
    for i in range(len(items)):
        ki, ci = items[i]
        si = set(ki)
        for j in range(i + 1, len(items)):
            kj, cj = items[j]
            union = ki if si.issuperset(kj) else term_key(si.union(kj))
            put(union, 2.0 * ci * cj)
    return Polynomial.from_accumulator(acc)
