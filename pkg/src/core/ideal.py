#!/usr/bin/env python3
"""
Circuit polynomials, their weight deformation and the initial ideal.

For a circuit C with relation sum_i alpha_i L[:, i] = 0 the polynomial
f_C = sum_{i in C} alpha_i prod_{j in C \\ i} y_j vanishes on the reciprocal
linear space, and the f_C form a universal Groebner basis of its ideal.
All f_C are multilinear, so monomials are stored as index tuples.
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Rational

from src.core.arrangement import ArrangementMatrix
from src.core.errors import InternalInconsistency
from src.core.matroid import (
    Circuit,
    LinearMatroid,
    broken_circuits,
    circuits,
    nbc_bases,
    reciprocal_degree,
    validate_omega,
)
from src.utils.exact_linalg import format_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Term:
    omitted: int
    coefficient: Rational
    monomial: Tuple[int, ...]


@dataclass(frozen=True)
class CircuitPolynomial:
    circuit: Circuit
    terms: Tuple[Term, ...]
    t_exponents: Optional[Tuple[int, ...]] = None

    @property
    def degree(self) -> int:
        return len(self.circuit.support) - 1

    def __str__(self) -> str:
        parts = []
        exponents = self.t_exponents or (0,) * len(self.terms)
        for term, e in zip(self.terms, exponents):
            monomial = "*".join(f"y{j}" for j in term.monomial) or "1"
            t_part = "" if e == 0 else ("t*" if e == 1 else f"t^{e}*")
            parts.append(f"({format_rational(term.coefficient)})*{t_part}{monomial}")
        return " + ".join(parts) if parts else "0"

    def to_dict(self) -> Dict:
        return {
            'support': list(self.circuit.support),
            'terms': [
                {'omitted': t.omitted, 'coefficient': format_rational(t.coefficient), 'monomial': list(t.monomial)}
                for t in self.terms
            ],
            't_exponents': list(self.t_exponents) if self.t_exponents is not None else None,
        }


@dataclass(frozen=True)
class InitialIdeal:
    """The monomial ideal J = in_omega(I(R_L)) and its prime decomposition."""
    omega: Tuple[int, ...]
    generators: Tuple[Tuple[int, ...], ...]
    bases: Tuple[Tuple[int, ...], ...]
    minimal_primes: Tuple[Tuple[int, ...], ...]

    def to_dict(self) -> Dict:
        return {
            'omega': list(self.omega),
            'generators': [list(g) for g in self.generators],
            'minimal_primes': [list(p) for p in self.minimal_primes],
        }


def circuit_polynomial(circuit: Circuit) -> CircuitPolynomial:
    terms = tuple(
        Term(omitted=i, coefficient=a, monomial=tuple(j for j in circuit.support if j != i))
        for i, a in zip(circuit.support, circuit.alpha)
    )
    return CircuitPolynomial(circuit=circuit, terms=terms)


def circuit_polynomials(arrangement: ArrangementMatrix,
                        circuit_list: Optional[Sequence[Circuit]] = None,
                        matroid: Optional[LinearMatroid] = None) -> List[CircuitPolynomial]:
    """One polynomial f_C per circuit, terms ordered by omitted index."""
    if circuit_list is None:
        circuit_list = circuits(arrangement, matroid)
    return [circuit_polynomial(c) for c in circuit_list]


def deform(poly: CircuitPolynomial, omega: Sequence[int]) -> CircuitPolynomial:
    """
    Attach t-exponents omega(f) - weight(term).

    The weight of the term omitting i is sum(omega_C) - omega_i, so the
    exponent reduces to omega_i - min(omega_C); it is zero exactly on the
    initial term.
    """
    lowest = min(omega[i] for i in poly.circuit.support)
    exponents = tuple(int(omega[term.omitted] - lowest) for term in poly.terms)
    return replace(poly, t_exponents=exponents)


def leading_term(poly: CircuitPolynomial, omega: Sequence[int]) -> Term:
    """The term of maximal omega-weight: the one omitting the omega-minimal index."""
    return min(poly.terms, key=lambda term: omega[term.omitted])


def evaluate(poly: CircuitPolynomial, y: Sequence[complex], t: complex = 1.0) -> complex:
    y = np.asarray(y, dtype=complex)
    exponents = poly.t_exponents or (0,) * len(poly.terms)
    total = 0j
    for term, e in zip(poly.terms, exponents):
        total += complex(term.coefficient) * t ** e * np.prod(y[list(term.monomial)])
    return complex(total)


def evaluate_exact(poly: CircuitPolynomial, y: Sequence, t=1) -> Rational:
    t = Rational(t)
    exponents = poly.t_exponents or (0,) * len(poly.terms)
    total = Rational(0)
    for term, e in zip(poly.terms, exponents):
        product = Rational(1)
        for j in term.monomial:
            product *= Rational(y[j])
        total += term.coefficient * t ** e * product
    return total


def initial_ideal(arrangement: ArrangementMatrix, omega: Sequence[int],
                  matroid: Optional[LinearMatroid] = None,
                  circuit_list: Optional[Sequence[Circuit]] = None) -> InitialIdeal:
    """Broken-circuit monomials and the primes <y_i : i not in B> for nbc bases B."""
    size = arrangement.n + 1
    omega = validate_omega(omega, size)
    matroid = matroid or LinearMatroid(arrangement)
    if circuit_list is None:
        circuit_list = circuits(arrangement, matroid)

    generators = tuple(broken_circuits(circuit_list, omega))
    bases = tuple(nbc_bases(arrangement, omega, matroid, circuit_list))
    primes = tuple(tuple(i for i in range(size) if i not in basis) for basis in bases)

    degree = reciprocal_degree(arrangement, matroid=matroid)
    if len(primes) != degree:
        raise InternalInconsistency(f"{len(primes)} minimal primes but reciprocal degree {degree}",
                                    {'primes': len(primes), 'degree': degree})
    logger.debug(f"Initial ideal: {len(generators)} generators, {len(primes)} minimal primes")
    return InitialIdeal(omega=omega, generators=generators, bases=bases, minimal_primes=primes)


class PolynomialBlock:
    """
    Vectorized evaluation of deformed circuit polynomials.

    Terms of all polynomials are flattened into one table; factor slots past
    the end of a monomial point at an extra coordinate fixed to 1.
    """

    def __init__(self, polys: Sequence[CircuitPolynomial], nvars: int):
        self.nvars = nvars
        self.count = len(polys)
        owner, coeff, exponent, factors = [], [], [], []
        width = max([len(t.monomial) for p in polys for t in p.terms] + [1])
        for k, poly in enumerate(polys):
            exps = poly.t_exponents or (0,) * len(poly.terms)
            for term, e in zip(poly.terms, exps):
                owner.append(k)
                coeff.append(complex(term.coefficient))
                exponent.append(e)
                factors.append(list(term.monomial) + [nvars] * (width - len(term.monomial)))

        self.owner = np.array(owner, dtype=int)
        self.coeff = np.array(coeff, dtype=complex)
        self.exponent = np.array(exponent, dtype=int)
        self.factors = np.array(factors, dtype=int).reshape(len(owner), width)
        self._jac_index = (self.owner[:, None] * (nvars + 1) + self.factors).ravel()
        self.degree = np.array([len(p.terms[0].monomial) if p.terms else 0 for p in polys], dtype=int)
        self.weight = np.bincount(self.owner, weights=np.abs(self.coeff), minlength=self.count)

    def evaluate(self, y: np.ndarray, t: complex) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Values, Jacobian in y and derivative in t of every polynomial."""
        if self.count == 0:
            return (np.zeros(0, dtype=complex), np.zeros((0, self.nvars), dtype=complex),
                    np.zeros(0, dtype=complex))
        extended = np.append(np.asarray(y, dtype=complex), 1.0 + 0j)
        F = extended[self.factors]
        ones = np.ones((F.shape[0], 1), dtype=complex)
        prefix = np.cumprod(np.hstack([ones, F[:, :-1]]), axis=1)
        suffix = np.cumprod(np.hstack([ones, F[:, :0:-1]]), axis=1)[:, ::-1]
        products = prefix[:, -1] * F[:, -1]

        t = complex(t)
        scaled = self.coeff * np.power(t, self.exponent)
        t_slope = self.coeff * self.exponent * np.power(t, np.maximum(self.exponent - 1, 0))

        values = _scatter(self.owner, scaled * products, self.count)
        d_t = _scatter(self.owner, t_slope * products, self.count)
        partials = (prefix * suffix) * scaled[:, None]
        jacobian = _scatter(self._jac_index, partials.ravel(), self.count * (self.nvars + 1))
        jacobian = jacobian.reshape(self.count, self.nvars + 1)[:, :self.nvars]
        return values, jacobian, d_t

    def scales(self, y: np.ndarray) -> np.ndarray:
        """sum_i |alpha_i| * max|y|**deg per polynomial, a residual scale at t = 1."""
        if self.count == 0:
            return np.zeros(0)
        top = float(np.max(np.abs(np.asarray(y, dtype=complex)), initial=0.0))
        return self.weight * top ** self.degree


def _scatter(index: np.ndarray, weights: np.ndarray, length: int) -> np.ndarray:
    real = np.bincount(index, weights=weights.real, minlength=length)
    imag = np.bincount(index, weights=weights.imag, minlength=length)
    return real + 1j * imag
