"""Mean-field reduction of operator products onto a finite basis.

The basis span is the set of normal-ordered monomials that are linear
combinations of basis elements. A product outside the span is reduced by
replacing some of its factors with their mean values; factors of one
normal-ordered monomial are treated as commuting c-number-like objects.

Rules (``x``, ``y``, ``z`` are span monomials, bars denote means):

* pair: ``xy -> (xbar y + ybar x) / 2``
* triple, when ``yz`` is in the span:
  ``xyz -> (xbar yz + xbar ybar z + ybar zbar x + zbar xbar y) / 4``
* number substitution: number-operator factors ``ad a`` are replaced by
  their occupation.
"""
# pylint: disable=missing-type-doc
import itertools
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import sympy

from hilange.algebra.operators import Monomial, OperatorExpr, Zero, commute
from hilange.constants import ReductionPolicy
from hilange.exceptions import IrreducibleTermException, ParameterException
from hilange.utilities import to_complex

_logger = logging.getLogger(__name__)

Quarter = sympy.Rational(1, 4)
Half = sympy.Rational(1, 2)


# --------------------------------------------------------------------------- #
# Context
# --------------------------------------------------------------------------- #


class MeanFieldContext:
    """Mean occupations and amplitudes per mode.

    Means of monomials follow the coherent assignment
    ``<ad^p a^q> = nbar^k abar^(q-k) conj(abar)^(p-k)`` with
    ``k = min(p, q)``. The amplitude defaults to ``sqrt(nbar)``.

    Ladders of ``classical`` modes may be replaced by their amplitude
    alone, leaving the rest of a product as an operator.
    """

    def __init__(self, occupations, amplitudes=None, policy=ReductionPolicy.SYMMETRIC, classical=()):
        """Initialize.

        :param occupations: mapping mode -> mean occupation (>= 0)
        :param amplitudes: optional mapping mode -> complex amplitude
        :param policy: one of :class:`ReductionPolicy`
        :param classical: modes treated as classical fields
        :raises ParameterException: on negative occupations, unknown policy
            or classical modes without occupation
        """
        if policy not in ReductionPolicy.values():
            raise ParameterException(f"unknown reduction policy {policy!r}")
        self.policy = policy
        self.classical = tuple(classical)
        for mode in self.classical:
            if mode not in occupations:
                raise ParameterException(f"classical mode {mode!r} has no occupation")
        self.occupations = {}
        for mode, value in occupations.items():
            value = sympy.sympify(value)
            if value.is_number and (not value.is_real or value < 0):
                raise ParameterException(f"occupation of mode {mode} must be >= 0, got {value}")
            self.occupations[mode] = value
        self.amplitudes = {mode: sympy.sqrt(value) for mode, value in self.occupations.items()}
        for mode, value in (amplitudes or {}).items():
            self.amplitudes[mode] = sympy.sympify(value)

    def with_policy(self, policy):
        """Return a copy using another reduction policy."""
        return MeanFieldContext(self.occupations, self.amplitudes, policy, self.classical)

    def occupation(self, mode):
        """Return the occupation of a mode.

        :raises ParameterException: if the mode has no occupation
        """
        try:
            return self.occupations[mode]
        except KeyError as exc:
            raise ParameterException(f"no mean occupation for mode {mode!r}") from exc

    def mean(self, monomial):
        """Return the mean of a normal-ordered monomial."""
        value = sympy.S.One
        for mode, cre, ann in monomial.factors:
            units = min(cre, ann)
            amplitude = self.amplitudes.get(mode)
            if amplitude is None:
                amplitude = sympy.sqrt(self.occupation(mode))
            value *= (
                self.occupation(mode) ** units
                * amplitude ** (ann - units)
                * sympy.conjugate(amplitude) ** (cre - units)
            )
        return sympy.expand(value)

    def expectation(self, expr):
        """Return the mean of an operator."""
        return sympy.expand(sum((coeff * self.mean(key) for key, coeff in expr.terms.items()), Zero))


# --------------------------------------------------------------------------- #
# Basis
# --------------------------------------------------------------------------- #


class BasisSet:
    """Ordered, labelled list of linearly independent operators."""

    def __init__(self, elements):
        """Initialize.

        :param elements: sequence of (label, OperatorExpr)
        :raises ParameterException: on empty, duplicate or dependent elements
        """
        elements = list(elements)
        if not elements:
            raise ParameterException("basis must not be empty")
        labels = [label for label, _ in elements]
        if len(set(labels)) != len(labels):
            raise ParameterException(f"duplicate basis labels in {labels}")
        for label, expr in elements:
            if expr.without_constant().is_zero:
                raise ParameterException(f"basis element {label} is a scalar")
        self.labels = tuple(labels)
        self.elements = tuple(expr for _, expr in elements)
        self._index = {label: pos for pos, label in enumerate(self.labels)}
        self._span = self._eliminate()

    def _eliminate(self):
        """Express every reachable monomial in basis coordinates."""
        monomials = sorted(
            {key for expr in self.elements for key in expr.terms if not key.is_identity},
            key=Monomial.sort_key,
        )
        matrix = sympy.Matrix(
            [[expr.coefficient(key) for expr in self.elements] for key in monomials]
        )
        if matrix.rank() != len(self.elements):
            raise ParameterException(f"basis elements {self.labels} are linearly dependent")
        constants = [expr.constant for expr in self.elements]
        span = {}
        for row, key in enumerate(monomials):
            target = sympy.zeros(len(monomials), 1)
            target[row] = 1
            try:
                solution, free = matrix.gauss_jordan_solve(target)
            except ValueError:
                continue
            if free.shape[0]:
                solution = solution.subs({sym: 0 for sym in free})
            coords = tuple(sympy.expand(value) for value in solution)
            offset = -sympy.expand(sum((c * k for c, k in zip(coords, constants)), Zero))
            span[key] = (coords, offset)
        return span

    def __len__(self):
        """Return the basis size."""
        return len(self.labels)

    def __iter__(self):
        """Iterate (label, element) pairs."""
        return iter(zip(self.labels, self.elements))

    def index(self, label):
        """Return the position of a label.

        :raises ParameterException: if the label is unknown
        """
        try:
            return self._index[label]
        except KeyError as exc:
            raise ParameterException(f"unknown basis label {label!r}") from exc

    def element(self, label):
        """Return the operator behind a label."""
        return self.elements[self.index(label)]

    def find(self, expr):
        """Return the label whose element equals expr, or None."""
        for label, element in self:
            if element == expr:
                return label
        return None

    @property
    def modes(self):
        """Modes acted on by the basis."""
        return tuple(sorted({mode for expr in self.elements for mode in expr.modes}))

    @property
    def span_monomials(self):
        """Monomials that are individually in the span, in canonical order."""
        return sorted(self._span, key=Monomial.sort_key)

    def contains(self, monomial):
        """Return True if the monomial is in the span (identity included)."""
        return monomial.is_identity or monomial in self._span

    def express(self, expr):
        """Write an operator in basis coordinates.

        :returns: AffineForm
        :raises IrreducibleTermException: if a monomial is outside the span
        """
        coords = [Zero] * len(self.labels)
        constant = Zero
        for key, coeff in expr.terms.items():
            if key.is_identity:
                constant += coeff
                continue
            if key not in self._span:
                raise IrreducibleTermException(
                    f"monomial {key} is not in the span of {self.labels}", monomial=key
                )
            vector, offset = self._span[key]
            for pos, value in enumerate(vector):
                coords[pos] += coeff * value
            constant += coeff * offset
        return AffineForm(self.labels, tuple(sympy.expand(c) for c in coords), sympy.expand(constant))


@dataclass(frozen=True)
class AffineForm:
    """Exact affine combination of basis elements."""

    labels: Tuple[str, ...]
    coefficients: Tuple[object, ...]
    constant: object = Zero

    def coefficient(self, label):
        """Return the coefficient of a label."""
        return self.coefficients[self.labels.index(label)]

    def as_operator(self, basis):
        """Rebuild the operator from the basis."""
        result = OperatorExpr.scalar(self.constant)
        for coeff, element in zip(self.coefficients, basis.elements):
            result = result + element * coeff
        return result

    def subs(self, mapping):
        """Substitute symbols."""
        return AffineForm(
            self.labels,
            tuple(sympy.sympify(c).subs(mapping) for c in self.coefficients),
            sympy.sympify(self.constant).subs(mapping),
        )

    def equals(self, other):
        """Exact comparison."""
        if self.labels != other.labels:
            return False
        pairs = list(zip(self.coefficients, other.coefficients))
        pairs.append((self.constant, other.constant))
        return all(sympy.simplify(sympy.expand(left - right)) == 0 for left, right in pairs)

    def to_complex(self):
        """Return (coefficient list, constant) as python complex numbers."""
        return [to_complex(c) for c in self.coefficients], to_complex(self.constant)

    def __str__(self):
        """Return a readable combination."""
        parts = [f"({c})*{label}" for label, c in zip(self.labels, self.coefficients) if c != 0]
        if self.constant != 0:
            parts.append(f"({self.constant})")
        return " + ".join(parts) if parts else "0"


# --------------------------------------------------------------------------- #
# Reduction
# --------------------------------------------------------------------------- #


class Reducer:
    """Reduce monomials into the span of one basis under one context.

    Results are memoised per monomial; reductions are expressed in span
    monomials as ``(dict monomial -> coefficient, constant)``.

    Factors that commute with each other, such as powers of a number
    operator, are factorised on their operator product: ``bd^2 b^2`` is
    handled as ``m*m - m``, so ``n*m^2`` reduces exactly as the product
    ``n*m*m`` does.
    """

    def __init__(self, context, basis):
        """Initialize.

        :param context: MeanFieldContext
        :param basis: BasisSet
        """
        self.context = context
        self.basis = basis
        self._memo = {}
        self._span = [key for key in basis.span_monomials]

    def reduce(self, expr):
        """Reduce an operator to an affine basis combination."""
        terms, constant = self._reduce_terms(expr)
        return self.basis.express(OperatorExpr(terms) + constant)

    def _reduce_terms(self, expr):
        terms = {}
        constant = Zero
        for key, coeff in expr.terms.items():
            if key.is_identity:
                constant += coeff
                continue
            linear, offset = self.reduce_monomial(key)
            constant += coeff * offset
            for mono, value in linear.items():
                terms[mono] = terms.get(mono, Zero) + coeff * value
        return terms, constant

    def reduce_monomial(self, monomial):
        """Reduce one monomial.

        :raises IrreducibleTermException: if no rule applies
        """
        if monomial in self._memo:
            return self._memo[monomial]
        if self.basis.contains(monomial):
            result = ({monomial: sympy.S.One}, Zero)
        else:
            result = self._apply_rules(monomial)
            if result is None:
                raise IrreducibleTermException(
                    f"no mean-field rule brings {monomial} into the span of {self.basis.labels}",
                    monomial=monomial,
                )
            _logger.debug("reduced %s -> %s", monomial, result)
        self._memo[monomial] = result
        return result

    def _apply_rules(self, monomial):
        """Try the rules in policy order."""
        policy = self.context.policy
        if policy == ReductionPolicy.FIELD:
            order = (self._classical_full, self._triple, self._pair, self._substitute_recursive)
        elif policy == ReductionPolicy.FIELD_MINIMAL:
            order = (self._classical_minimal, self._triple, self._pair, self._substitute_recursive)
        elif policy == ReductionPolicy.NUMBER_FIRST:
            order = (self._substitute_direct, self._triple, self._pair, self._substitute_recursive)
            order += (self._classical_minimal,)
        else:
            order = (self._triple, self._pair, self._substitute_recursive, self._classical_minimal)
        for rule in order:
            result = rule(monomial)
            if result is not None:
                return result
        return None

    def _mean(self, monomial):
        return self.context.mean(monomial)

    def _divisors(self, monomial):
        """Span monomials dividing the monomial, excluding itself."""
        return [key for key in self._span if key != monomial and key.divides(monomial)]

    def _factorised(self, monomial, factors, rule):
        """Reduce a monomial split into factors by a mean-field rule.

        :param factors: monomials whose joined powers give the monomial
        :param rule: sequence of (scalar, tuple of factors) products
        :returns: (linear, constant), reduced exactly on the operator
            products when the factors commute, on the joined monomials
            otherwise
        """
        exprs = [OperatorExpr.from_monomial(key) for key in factors]
        if all(commute(left, right).is_zero for left, right in itertools.combinations(exprs, 2)):
            expr = OperatorExpr.from_monomial(monomial) - _product(factors)
            for scale, keys in rule:
                expr = expr + _product(keys) * scale
            try:
                return self._reduce_terms(expr)
            except IrreducibleTermException as exc:
                _logger.debug("product form of %s leaves the span: %s", monomial, exc)
        linear = {}
        for scale, keys in rule:
            key = _joined(keys)
            linear[key] = linear.get(key, Zero) + scale
        return linear, Zero

    def _triple(self, monomial):
        candidates = []
        for first in self._divisors(monomial):
            rest = monomial.quotient(first)
            if not self.basis.contains(rest) or rest.is_identity:
                continue
            for second in self._divisors(rest):
                third = rest.quotient(second)
                if third.is_identity or third not in self._span or third < second:
                    continue
                rank = (
                    0 if first.is_number else 1,
                    -rest.degree,
                    first.sort_key(),
                    second.sort_key(),
                )
                candidates.append((rank, first, second, third))
        if not candidates:
            return None
        _, first, second, third = min(candidates, key=lambda item: item[0])
        mx, my, mz = self._mean(first), self._mean(second), self._mean(third)
        rule = (
            (Quarter * mx, (second, third)),
            (Quarter * mx * my, (third,)),
            (Quarter * my * mz, (first,)),
            (Quarter * mz * mx, (second,)),
        )
        return self._factorised(monomial, (first, second, third), rule)

    def _pair(self, monomial):
        candidates = []
        for first in self._divisors(monomial):
            second = monomial.quotient(first)
            if second.is_identity or second not in self._span or second < first:
                continue
            rank = (0 if (first.is_number or second.is_number) else 1, first.sort_key())
            candidates.append((rank, first, second))
        if not candidates:
            return None
        _, first, second = min(candidates, key=lambda item: item[0])
        rule = (
            (Half * self._mean(first), (second,)),
            (Half * self._mean(second), (first,)),
        )
        return self._factorised(monomial, (first, second), rule)

    def _strips(self, monomial):
        """Number-operator extractions ordered by size, earliest mode first."""
        units = monomial.number_units()
        ranges = [range(count + 1) for _, count in units]
        options = []
        for counts in itertools.product(*ranges):
            if not any(counts):
                continue
            stripped = Monomial((mode, k, k) for (mode, _), k in zip(units, counts))
            options.append(((sum(counts), tuple(-k for k in counts)), stripped))
        options.sort(key=lambda item: item[0])
        return [stripped for _, stripped in options]

    def _substitute_direct(self, monomial):
        for stripped in self._strips(monomial):
            rest = monomial.quotient(stripped)
            if self.basis.contains(rest):
                factor = self._mean(stripped)
                if rest.is_identity:
                    return {}, factor
                return self._factorised(monomial, (stripped, rest), ((factor, (rest,)),))
        return None

    def _substitute_recursive(self, monomial):
        for stripped in self._strips(monomial):
            rest = monomial.quotient(stripped)
            factor = self._mean(stripped)
            if rest.is_identity:
                return {}, factor
            try:
                linear, constant = self._factorised(monomial, (stripped, rest), ((factor, (rest,)),))
                for key in list(linear):
                    if not self.basis.contains(key):
                        reduced, offset = self.reduce_monomial(key)
                        scale = linear.pop(key)
                        constant += scale * offset
                        for mono, value in reduced.items():
                            linear[mono] = linear.get(mono, Zero) + scale * value
                return linear, constant
            except IrreducibleTermException:
                continue
        return None

    def _classical_strips(self, monomial):
        """Classical ladder extractions ordered by ladder count."""
        factors = [item for item in monomial.factors if item[0] in self.context.classical]
        ranges = [itertools.product(range(cre + 1), range(ann + 1)) for _, cre, ann in factors]
        options = []
        for powers in itertools.product(*ranges):
            count = sum(cre + ann for cre, ann in powers)
            if not count:
                continue
            stripped = Monomial((mode, cre, ann) for (mode, _, _), (cre, ann) in zip(factors, powers))
            options.append(((count, stripped.sort_key()), stripped))
        options.sort(key=lambda item: item[0])
        return [stripped for _, stripped in options]

    def _classical_full(self, monomial):
        strips = self._classical_strips(monomial)
        if not strips:
            return None
        stripped = strips[-1]
        rest = monomial.quotient(stripped)
        factor = self._mean(stripped)
        if rest.is_identity:
            return {}, factor
        try:
            linear, offset = self.reduce_monomial(rest)
        except IrreducibleTermException:
            return None
        return {key: factor * value for key, value in linear.items()}, factor * offset

    def _classical_minimal(self, monomial):
        for stripped in self._classical_strips(monomial):
            rest = monomial.quotient(stripped)
            if self.basis.contains(rest):
                factor = self._mean(stripped)
                if rest.is_identity:
                    return {}, factor
                return {rest: factor}, Zero
        return None


def _joined(keys):
    result = Monomial.identity()
    for key in keys:
        result = result.joined(key)
    return result


def _product(keys):
    result = OperatorExpr.scalar(1)
    for key in keys:
        result = result * OperatorExpr.from_monomial(key)
    return result


def mean_field_reduce(expr, context, basis):
    """Reduce an operator into an exact affine combination of the basis.

    :param expr: OperatorExpr
    :param context: MeanFieldContext
    :param basis: BasisSet
    :returns: AffineForm
    :raises IrreducibleTermException: naming the first monomial no rule reaches
    """
    return Reducer(context, basis).reduce(expr)


# --------------------------------------------------------------------------- #
# Closure
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class ClosureEntry:
    """Commutator of two basis elements and its reduction."""

    left: str
    right: str
    form: Optional[AffineForm] = None
    exact: bool = False
    error: Optional[str] = None

    @property
    def closed(self):
        """Return True if the commutator reached the span."""
        return self.form is not None


@dataclass(frozen=True)
class ClosureReport:
    """Result of a closure scan over all basis pairs."""

    labels: Tuple[str, ...]
    entries: Tuple[ClosureEntry, ...] = field(default_factory=tuple)

    @property
    def closed(self):
        """Return True if every pair closed."""
        return all(entry.closed for entry in self.entries)

    @property
    def failures(self):
        """Return the entries that did not close."""
        return [entry for entry in self.entries if not entry.closed]

    def entry(self, left, right):
        """Return the entry of a pair in either order."""
        for item in self.entries:
            if (item.left, item.right) in ((left, right), (right, left)):
                return item
        raise ParameterException(f"no closure entry for ({left}, {right})")

    @classmethod
    def from_table(cls, labels, table):
        """Build a report from a precomputed commutator table.

        :param labels: basis labels
        :param table: mapping (left, right) -> AffineForm or None
        """
        entries = []
        for left, right in itertools.combinations(labels, 2):
            form = table.get((left, right))
            if form is None and (right, left) in table:
                mirrored = table[(right, left)]
                form = AffineForm(
                    mirrored.labels,
                    tuple(-c for c in mirrored.coefficients),
                    -mirrored.constant,
                ) if mirrored is not None else None
            error = None if form is not None else "missing from commutator table"
            entries.append(ClosureEntry(left, right, form, exact=False, error=error))
        return cls(tuple(labels), tuple(entries))


def verify_closure(basis, context):
    """Reduce the commutator of every basis pair.

    :returns: ClosureReport
    """
    reducer = Reducer(context, basis)
    entries = []
    for (left, lexpr), (right, rexpr) in itertools.combinations(list(basis), 2):
        bracket = commute(lexpr, rexpr)
        exact = all(basis.contains(key) for key in bracket.terms)
        try:
            form = reducer.reduce(bracket)
            entries.append(ClosureEntry(left, right, form, exact=exact))
        except IrreducibleTermException as exc:
            _logger.debug("closure fails for [%s, %s]: %s", left, right, exc)
            entries.append(ClosureEntry(left, right, None, exact=False, error=str(exc)))
    report = ClosureReport(basis.labels, tuple(entries))
    _logger.debug("closure of %s: %s", basis.labels, "closed" if report.closed else "open")
    return report
