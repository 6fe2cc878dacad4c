"""Degree reduction of pseudo-Boolean polynomials to quadratic form.

Two schemes, both minima-preserving:

* minimum selection — a negative term c*prod(x) (c < 0, degree d >= 3)
  becomes min over w of c*w*(sum(x) - (d-1)), which is already quadratic.
  Positive terms are handled by flipping one variable out of the product
  (c*prod = c*prod(rest) - c*(1-x0)*prod(rest)) so the complemented part is
  negative, then recursing on the shrunken remainder.
* substitution — replace a variable pair (a, b) with a fresh w and add the
  penalty M*(ab - 2aw - 2bw + 3w), which is 0 iff w = ab and >= M otherwise.
  M exceeds the total weight the replaced terms could gain, so no violating
  state can undercut the source minimum.

The default mixed strategy routes negative terms through minimum selection
and whatever remains through substitution.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .pbpoly import ZERO_TOL, AuxVar, Polynomial, term_key


class ReductionError(ValueError):
    pass


class ReductionMethod(str, Enum):
    MIN_SELECTION = "min_selection"
    SUBSTITUTION = "substitution"
    MIXED = "mixed"


@dataclass(frozen=True)
class IntroducedAux:
    """One auxiliary variable and what it stands for.

    w should equal the product of `defines`, with entries whose flip bit is
    set entering as (1 - x). Violations are possible in penalty-violating
    states and are reported by lift as warnings.
    """

    aux: AuxVar
    defines: tuple
    flips: tuple
    penalty_weight: float
    scheme: str


@dataclass(frozen=True)
class ReductionMap:
    method: ReductionMethod
    introduced: tuple

    def aux_variables(self) -> frozenset:
        return frozenset(entry.aux for entry in self.introduced)


@dataclass(frozen=True)
class LiftResult:
    assignment: dict
    inconsistent: tuple

    @property
    def warning(self) -> bool:
        return bool(self.inconsistent)


def _term_order(key) -> tuple:
    return (len(key), tuple(v.sort_key() for v in key))


def _put(acc: dict, key, coeff: float) -> None:
    acc[key] = acc.get(key, 0.0) + coeff


def _next_serial(p: Polynomial) -> int:
    top = -1
    for v in p.variables():
        if isinstance(v, AuxVar) and v.serial > top:
            top = v.serial
    return top + 1


def _min_selection_pass(acc: dict, serial: int, introduced: list,
                        positives_too: bool) -> int:
    while True:
        target = None
        for key in sorted(acc, key=_term_order):
            coeff = acc[key]
            if len(key) < 3 or abs(coeff) <= ZERO_TOL:
                continue
            if coeff < 0 or positives_too:
                target = key
                break
        if target is None:
            return serial
        coeff = acc.pop(target)
        d = len(target)
        w = AuxVar(serial)
        serial += 1
        if coeff < 0:
            for v in target:
                _put(acc, term_key((w, v)), coeff)
            _put(acc, (w,), -coeff * (d - 1))
            introduced.append(IntroducedAux(
                aux=w, defines=target, flips=(False,) * d,
                penalty_weight=abs(coeff), scheme="min_selection"))
        else:
            # flip the smallest variable: the complemented copy is negative
            # and quadratizes directly, the rest shrinks by one degree
            x0 = target[0]
            rest = target[1:]
            _put(acc, term_key((w, x0)), coeff)
            for v in rest:
                _put(acc, term_key((w, v)), -coeff)
            _put(acc, (w,), coeff * (d - 2))
            _put(acc, rest, coeff)
            introduced.append(IntroducedAux(
                aux=w, defines=target, flips=(True,) + (False,) * (d - 1),
                penalty_weight=abs(coeff), scheme="min_selection"))


def _substitution_pass(acc: dict, serial: int, introduced: list) -> int:
    while True:
        big = [(k, c) for k, c in acc.items()
               if len(k) >= 3 and abs(c) > ZERO_TOL]
        if not big:
            return serial
        counts: dict = {}
        for key, _coeff in big:
            for i in range(len(key)):
                for j in range(i + 1, len(key)):
                    pair = (key[i], key[j])
                    counts[pair] = counts.get(pair, 0) + 1
        a, b = min(counts, key=lambda pr: (-counts[pr], pr[0].sort_key(),
                                           pr[1].sort_key()))
        affected = [(k, c) for k, c in big if a in k and b in k]
        weight = 1.0 + sum(abs(c) for _k, c in affected)
        w = AuxVar(serial)
        serial += 1
        for key, coeff in affected:
            del acc[key]
            shrunk = term_key(tuple(v for v in key if v != a and v != b) + (w,))
            _put(acc, shrunk, coeff)
        _put(acc, term_key((a, b)), weight)
        _put(acc, term_key((a, w)), -2.0 * weight)
        _put(acc, term_key((b, w)), -2.0 * weight)
        _put(acc, (w,), 3.0 * weight)
        introduced.append(IntroducedAux(
            aux=w, defines=(a, b), flips=(False, False),
            penalty_weight=weight, scheme="substitution"))


def reduce(p: Polynomial, method=ReductionMethod.MIXED):
    """Rewrite p as a degree <= 2 polynomial with the same minimum value.

    Returns (reduced polynomial, ReductionMap). Already-quadratic input is
    returned unchanged with an empty map. Deterministic for a given input.
    """
    method = ReductionMethod(method)
    if p.degree() <= 2:
        return p, ReductionMap(method, ())
    acc = dict(p.terms)
    introduced: list = []
    serial = _next_serial(p)
    if method is ReductionMethod.MIN_SELECTION:
        serial = _min_selection_pass(acc, serial, introduced, positives_too=True)
    elif method is ReductionMethod.SUBSTITUTION:
        serial = _substitution_pass(acc, serial, introduced)
    else:
        serial = _min_selection_pass(acc, serial, introduced, positives_too=False)
        serial = _substitution_pass(acc, serial, introduced)
    return Polynomial.from_accumulator(acc), ReductionMap(method, tuple(introduced))


def lift(x_reduced: Mapping, m: ReductionMap) -> LiftResult:
    """Project a reduced assignment back onto the source variables.

    Auxiliaries whose value disagrees with the product they stand for are
    listed in `inconsistent`; that is a warning, not an error.
    """
    aux = m.aux_variables()
    assignment = {v: x_reduced[v] for v in x_reduced if v not in aux}
    bad = []
    for entry in m.introduced:
        if entry.aux not in x_reduced:
            continue
        prod = 1
        for v, flip in zip(entry.defines, entry.flips):
            if v not in x_reduced:
                prod = -1
                break
            bit = x_reduced[v]
            if flip:
                bit = 1 - bit
            prod &= bit
        if prod >= 0 and x_reduced[entry.aux] != prod:
            bad.append(entry.aux)
    return LiftResult(assignment=assignment, inconsistent=tuple(bad))


def export_qubo(p: Polynomial) -> str:
    """Coordinate-list text form of a quadratic polynomial.

    Header `# vars N`, one `i j coeff` line per term with i <= j (i = j for
    linear terms), constant offset and the variable legend as comments.
    """
    if p.degree() > 2:
        raise ReductionError("polynomial has degree > 2; reduce it first")
    variables = sorted(p.variables())
    index = {v: i for i, v in enumerate(variables)}
    lines = [f"# vars {len(variables)}"]
    if p.constant:
        lines.append(f"# offset {p.constant!r}")
    entries = []
    for key, coeff in p.terms.items():
        if not key:
            continue
        if len(key) == 1:
            i = j = index[key[0]]
        else:
            i, j = sorted((index[key[0]], index[key[1]]))
        entries.append((i, j, coeff))
    entries.sort()
    lines.extend(f"{i} {j} {coeff!r}" for i, j, coeff in entries)
    lines.append("# legend")
    lines.extend(f"# {i} {v}" for v, i in index.items())
    return "\n".join(lines) + "\n"
