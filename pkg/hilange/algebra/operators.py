"""Normal-ordered boson operator polynomials.

An operator is stored as a mapping from normal-ordered monomials to exact
sympy coefficients. A monomial is a sorted tuple of ``(mode, p, q)``
entries standing for ``ad^p a^q`` of that mode; modes with ``p == q == 0``
are omitted, so the empty tuple is the identity.
"""
# pylint: disable=missing-type-doc
import itertools
import logging
from math import comb, factorial

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    rationalize,
    standard_transformations,
)

from hilange.exceptions import ParameterException

_logger = logging.getLogger(__name__)

Zero = sympy.S.Zero
One = sympy.S.One

ADJOINT_SUFFIXES = ("d", "†")


def _clean(value):
    """Return the expanded coefficient."""
    return sympy.expand(value)


# --------------------------------------------------------------------------- #
# Monomials
# --------------------------------------------------------------------------- #


class Monomial:
    """Normal-ordered product of ladder operators.

    Factors of different modes commute, so a monomial is fully described
    by the creator and annihilator power of each mode.
    """

    __slots__ = ("factors", "_hash")

    def __init__(self, factors=()):
        """Initialize.

        :param factors: iterable of (mode, creator power, annihilator power)
        """
        merged = {}
        for mode, cre, ann in factors:
            if cre < 0 or ann < 0:
                raise ParameterException(f"negative power in monomial for mode {mode}")
            old = merged.get(mode, (0, 0))
            merged[mode] = (old[0] + cre, old[1] + ann)
        self.factors = tuple(
            (mode, cre, ann)
            for mode, (cre, ann) in sorted(merged.items())
            if cre or ann
        )
        self._hash = hash(self.factors)

    @classmethod
    def identity(cls):
        """Return the identity monomial."""
        return cls(())

    @classmethod
    def ladder(cls, mode, adjoint=False):
        """Return a single creation or annihilation operator."""
        return cls([(mode, 1, 0)] if adjoint else [(mode, 0, 1)])

    def __hash__(self):
        """Hash by factors."""
        return self._hash

    def __eq__(self, other):
        """Compare factors."""
        return isinstance(other, Monomial) and self.factors == other.factors

    def __lt__(self, other):
        """Order by sort key."""
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        """Return the debug representation."""
        return f"Monomial({self.factors!r})"

    def __str__(self):
        """Return the monomial in operator syntax."""
        if not self.factors:
            return "1"
        parts = []
        for mode, cre, ann in self.factors:
            if cre:
                parts.append(f"{mode}d" if cre == 1 else f"{mode}d^{cre}")
            if ann:
                parts.append(mode if ann == 1 else f"{mode}^{ann}")
        return "*".join(parts)

    def sort_key(self):
        """Return a total order key: degree first, then factors."""
        return (self.degree, self.factors)

    @property
    def degree(self):
        """Total number of ladder operators."""
        return sum(cre + ann for _, cre, ann in self.factors)

    @property
    def modes(self):
        """Modes the monomial acts on."""
        return tuple(mode for mode, _, _ in self.factors)

    @property
    def is_identity(self):
        """Return True for the identity."""
        return not self.factors

    @property
    def is_number(self):
        """Return True for products of number operators."""
        return bool(self.factors) and all(cre == ann for _, cre, ann in self.factors)

    def powers(self, mode):
        """Return (creator, annihilator) powers of a mode."""
        for name, cre, ann in self.factors:
            if name == mode:
                return cre, ann
        return 0, 0

    def adjoint(self):
        """Return the adjoint monomial."""
        return Monomial((mode, ann, cre) for mode, cre, ann in self.factors)

    def divides(self, other):
        """Return True if every power of self is bounded by other."""
        for mode, cre, ann in self.factors:
            ocre, oann = other.powers(mode)
            if cre > ocre or ann > oann:
                return False
        return True

    def joined(self, other):
        """Return the monomial with added powers (factors treated as commuting)."""
        return Monomial(self.factors + other.factors)

    def quotient(self, other):
        """Return self with the powers of other removed."""
        if not other.divides(self):
            raise ParameterException(f"{other} does not divide {self}")
        factors = []
        for mode, cre, ann in self.factors:
            ocre, oann = other.powers(mode)
            factors.append((mode, cre - ocre, ann - oann))
        return Monomial(factors)

    def number_units(self):
        """Return per-mode counts of extractable number operators."""
        return tuple((mode, min(cre, ann)) for mode, cre, ann in self.factors)


def _product_single(left, right):
    """Multiply ad^p a^q by ad^r a^s and normal order the result.

    :returns: list of ((creator, annihilator), multiplicity)
    """
    (cre_l, ann_l), (cre_r, ann_r) = left, right
    terms = []
    for k in range(min(ann_l, cre_r) + 1):
        weight = comb(ann_l, k) * comb(cre_r, k) * factorial(k)
        terms.append(((cre_l + cre_r - k, ann_l + ann_r - k), weight))
    return terms


def multiply_monomials(left, right):
    """Return the normal-ordered product of two monomials.

    :returns: dict Monomial -> integer multiplicity
    """
    modes = sorted(set(left.modes) | set(right.modes))
    per_mode = [
        [(mode, powers, weight) for powers, weight in _product_single(left.powers(mode), right.powers(mode))]
        for mode in modes
    ]
    result = {}
    for combo in itertools.product(*per_mode):
        weight = 1
        factors = []
        for mode, (cre, ann), part in combo:
            weight *= part
            factors.append((mode, cre, ann))
        key = Monomial(factors)
        result[key] = result.get(key, 0) + weight
    return result


# --------------------------------------------------------------------------- #
# Operator expressions
# --------------------------------------------------------------------------- #


class OperatorExpr:
    """Finite sum of normal-ordered monomials with exact coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        """Initialize.

        :param terms: mapping Monomial -> coefficient
        """
        clean = {}
        for key, coeff in (terms or {}).items():
            coeff = _clean(coeff)
            if coeff != 0:
                clean[key] = coeff
        self._terms = clean

    # ------------------------------------------------------------------ #
    # Constructors
    # ------------------------------------------------------------------ #
    @classmethod
    def scalar(cls, value):
        """Return value times the identity."""
        return cls({Monomial.identity(): sympy.sympify(value)})

    @classmethod
    def ladder(cls, mode, adjoint=False):
        """Return a creation or annihilation operator."""
        return cls({Monomial.ladder(mode, adjoint): One})

    @classmethod
    def number(cls, mode):
        """Return the number operator of a mode."""
        return cls({Monomial([(mode, 1, 1)]): One})

    @classmethod
    def from_monomial(cls, monomial, coeff=One):
        """Return a single term."""
        return cls({monomial: coeff})

    # ------------------------------------------------------------------ #
    # Access
    # ------------------------------------------------------------------ #
    @property
    def terms(self):
        """Return a copy of the term mapping."""
        return dict(self._terms)

    def items(self):
        """Iterate terms in canonical order."""
        return sorted(self._terms.items(), key=lambda item: item[0].sort_key())

    def coefficient(self, monomial):
        """Return the coefficient of a monomial."""
        return self._terms.get(monomial, Zero)

    @property
    def constant(self):
        """Return the identity coefficient."""
        return self._terms.get(Monomial.identity(), Zero)

    @property
    def is_zero(self):
        """Return True for the zero operator."""
        return not self._terms

    @property
    def degree(self):
        """Largest monomial degree."""
        return max((key.degree for key in self._terms), default=0)

    @property
    def modes(self):
        """Sorted modes acted on."""
        return tuple(sorted({mode for key in self._terms for mode in key.modes}))

    @property
    def free_symbols(self):
        """Symbols in the coefficients."""
        found = set()
        for coeff in self._terms.values():
            found |= coeff.free_symbols
        return found

    def __len__(self):
        """Return the number of terms."""
        return len(self._terms)

    # ------------------------------------------------------------------ #
    # Arithmetic
    # ------------------------------------------------------------------ #
    def __add__(self, other):
        """Add operators or scalars."""
        other = _as_expr(other)
        terms = dict(self._terms)
        for key, coeff in other._terms.items():  # pylint: disable=protected-access
            terms[key] = terms.get(key, Zero) + coeff
        return OperatorExpr(terms)

    __radd__ = __add__

    def __neg__(self):
        """Negate."""
        return OperatorExpr({key: -coeff for key, coeff in self._terms.items()})

    def __sub__(self, other):
        """Subtract."""
        return self + (-_as_expr(other))

    def __rsub__(self, other):
        """Subtract from a scalar."""
        return _as_expr(other) - self

    def __mul__(self, other):
        """Operator product (normal ordered) or scalar multiple."""
        if not isinstance(other, OperatorExpr):
            factor = sympy.sympify(other)
            return OperatorExpr({key: coeff * factor for key, coeff in self._terms.items()})
        terms = {}
        for lkey, lcoeff in self._terms.items():
            for rkey, rcoeff in other._terms.items():  # pylint: disable=protected-access
                for key, weight in multiply_monomials(lkey, rkey).items():
                    terms[key] = terms.get(key, Zero) + weight * lcoeff * rcoeff
        return OperatorExpr(terms)

    def __rmul__(self, other):
        """Scalar multiple from the left."""
        factor = sympy.sympify(other)
        return OperatorExpr({key: factor * coeff for key, coeff in self._terms.items()})

    def __truediv__(self, other):
        """Divide by a scalar."""
        return self * (One / sympy.sympify(other))

    def __pow__(self, exponent):
        """Integer power."""
        if not isinstance(exponent, int) or exponent < 0:
            raise ParameterException(f"operator power must be a non-negative integer, got {exponent}")
        result = OperatorExpr.scalar(1)
        for _ in range(exponent):
            result = result * self
        return result

    def adjoint(self):
        """Return the hermitian adjoint."""
        return OperatorExpr(
            {key.adjoint(): sympy.conjugate(coeff) for key, coeff in self._terms.items()}
        )

    def is_hermitian(self):
        """Return True if the operator equals its adjoint."""
        return self == self.adjoint()

    def subs(self, mapping):
        """Substitute symbols in the coefficients."""
        return OperatorExpr({key: coeff.subs(mapping) for key, coeff in self._terms.items()})

    def without_constant(self):
        """Return the operator with the identity term removed."""
        terms = dict(self._terms)
        terms.pop(Monomial.identity(), None)
        return OperatorExpr(terms)

    def __eq__(self, other):
        """Exact equality after expansion."""
        if not isinstance(other, OperatorExpr):
            try:
                other = _as_expr(other)
            except (TypeError, sympy.SympifyError):
                return NotImplemented
        difference = self - other
        return difference.is_zero

    __hash__ = None

    def __repr__(self):
        """Return the debug representation."""
        return f"OperatorExpr({self})"

    def __str__(self):
        """Return the expression in operator syntax."""
        if not self._terms:
            return "0"
        parts = []
        for key, coeff in self.items():
            if key.is_identity:
                parts.append(f"({coeff})")
            elif coeff == 1:
                parts.append(str(key))
            else:
                parts.append(f"({coeff})*{key}")
        return " + ".join(parts)


def _as_expr(value):
    """Promote a scalar to an operator."""
    if isinstance(value, OperatorExpr):
        return value
    return OperatorExpr.scalar(value)


# --------------------------------------------------------------------------- #
# Ordering
# --------------------------------------------------------------------------- #


def normal_order(sequence, coefficient=1, modes=("a", "b")):
    """Normal order a product of ladder operators.

    :param sequence: iterable of (mode, adjoint) pairs or names such as
        ``"a"`` and ``"ad"``, left to right
    :param coefficient: scalar prefactor
    :param modes: Declared mode names
    :returns: OperatorExpr
    :raises ParameterException: on ladders of undeclared modes
    """
    result = OperatorExpr.scalar(coefficient)
    for item in sequence:
        if isinstance(item, str):
            mode, adjoint = _split_adjoint(item, modes)
        else:
            mode, adjoint = item
        if mode not in modes:
            raise ParameterException(f"unknown mode {mode!r}; declared: {', '.join(modes)}")
        result = result * OperatorExpr.ladder(mode, adjoint)
    return result


def _split_adjoint(name, modes):
    """Split a ladder name into (mode, adjoint)."""
    if name in modes:
        return name, False
    for suffix in ADJOINT_SUFFIXES:
        if name.endswith(suffix) and len(name) > len(suffix):
            return name[: -len(suffix)], True
    return name, False


def commute(left, right):
    """Return the exact commutator [left, right]."""
    return left * right - right * left


class AntinormalExpr:
    """Operator written with all annihilators to the left.

    Keys reuse :class:`Monomial`; ``(mode, p, q)`` stands for ``a^q ad^p``.
    """

    def __init__(self, terms):
        """Initialize.

        :param terms: mapping Monomial -> coefficient
        """
        self.terms = {key: _clean(coeff) for key, coeff in terms.items() if _clean(coeff) != 0}

    def items(self):
        """Iterate terms in canonical order."""
        return sorted(self.terms.items(), key=lambda item: item[0].sort_key())

    def to_normal(self):
        """Convert back to normal order."""
        result = OperatorExpr()
        for key, coeff in self.terms.items():
            term = OperatorExpr.scalar(coeff)
            for mode, cre, ann in key.factors:
                part = OperatorExpr(
                    {
                        Monomial([(mode, cre - k, ann - k)]): comb(ann, k) * comb(cre, k) * factorial(k)
                        for k in range(min(cre, ann) + 1)
                    }
                )
                term = term * part
            result = result + term
        return result

    def __str__(self):
        """Return the expression with annihilators written first."""
        if not self.terms:
            return "0"
        parts = []
        for key, coeff in self.items():
            ops = []
            for mode, cre, ann in key.factors:
                ops.extend([mode] * ann)
                ops.extend([f"{mode}d"] * cre)
            body = "*".join(ops) if ops else "1"
            parts.append(body if coeff == 1 else f"({coeff})*{body}")
        return " + ".join(parts)


def antinormal_order(expr):
    """Rewrite a normal-ordered operator in anti-normal order.

    Each mode factor ``ad^p a^q`` becomes
    ``sum_k (-1)^k C(p,k) C(q,k) k! a^(q-k) ad^(p-k)``.
    """
    terms = {}
    for key, coeff in expr.terms.items():
        per_mode = [
            [
                ((mode, cre - k, ann - k), (-1) ** k * comb(cre, k) * comb(ann, k) * factorial(k))
                for k in range(min(cre, ann) + 1)
            ]
            for mode, cre, ann in key.factors
        ]
        for combo in itertools.product(*per_mode):
            weight = 1
            factors = []
            for factor, part in combo:
                weight *= part
                factors.append(factor)
            mono = Monomial(factors)
            terms[mono] = terms.get(mono, Zero) + weight * coeff
    return AntinormalExpr(terms)


# --------------------------------------------------------------------------- #
# Parsing
# --------------------------------------------------------------------------- #


def standard_aliases(modes):
    """Return the named composite operators for the given modes.

    ``n`` and ``c`` belong to mode ``a``, ``m`` and ``d`` to mode ``b``.
    """
    aliases = {}
    if "a" in modes:
        aliases["n"] = OperatorExpr.number("a")
        aliases["c"] = normal_order(["a", "a"], sympy.Rational(1, 2))
    if "b" in modes:
        aliases["m"] = OperatorExpr.number("b")
        aliases["d"] = normal_order(["b", "b"], sympy.Rational(1, 2))
    return aliases


def _symbol_table(modes, aliases):
    """Build name -> operator lookup including adjoint names."""
    table = {}
    for mode in modes:
        table[mode] = OperatorExpr.ladder(mode)
        table[f"{mode}d"] = OperatorExpr.ladder(mode, adjoint=True)
    for name, expr in aliases.items():
        if name in table:
            continue
        table[name] = expr
        table.setdefault(f"{name}d", expr.adjoint())
    return table


_TRANSFORMS = standard_transformations + (convert_xor, rationalize)


def parse_operator(text, modes=("a", "b"), aliases=None):
    """Parse an operator written in text form.

    ``+ - * / ^`` and parentheses are supported, ``I`` is the imaginary
    unit, a trailing ``d`` or ``†`` marks the adjoint (``ad``, ``cd``).
    Products need an explicit ``*``. Names that are neither modes nor
    aliases become scalar symbols.

    :param text: The expression, e.g. ``"a^2/2"`` or ``"bd*b"``
    :param modes: Declared mode names
    :param aliases: Extra named operators, merged over the standard ones
    :returns: OperatorExpr
    :raises ParameterException: on syntax errors
    """
    names = dict(standard_aliases(modes))
    names.update(aliases or {})
    table = _symbol_table(modes, names)
    local = {name: sympy.Symbol(name, commutative=False) for name in table}
    source = text.replace("†", "d")
    try:
        tree = parse_expr(source, local_dict=local, transformations=_TRANSFORMS, evaluate=True)
    except (SyntaxError, TypeError, ValueError, sympy.SympifyError) as exc:
        raise ParameterException(f"cannot parse operator {text!r}: {exc}") from exc
    result = _convert(tree, table, text)
    _logger.debug("parsed %r -> %s", text, result)
    return result


def _convert(node, table, text):
    """Convert a sympy tree over non-commutative symbols."""
    if node.is_commutative:
        return OperatorExpr.scalar(node)
    if node.is_Symbol:
        try:
            return table[node.name]
        except KeyError as exc:
            raise ParameterException(f"unknown operator {node.name!r} in {text!r}") from exc
    if node.is_Add:
        result = OperatorExpr()
        for arg in node.args:
            result = result + _convert(arg, table, text)
        return result
    if node.is_Mul:
        scalars, ordered = node.args_cnc()
        result = OperatorExpr.scalar(sympy.Mul(*scalars))
        for arg in ordered:
            result = result * _convert(arg, table, text)
        return result
    if node.is_Pow:
        base, exponent = node.args
        if not (exponent.is_Integer and exponent >= 0):
            raise ParameterException(f"operator power must be a non-negative integer in {text!r}")
        return _convert(base, table, text) ** int(exponent)
    raise ParameterException(f"unsupported construct {node} in {text!r}")
