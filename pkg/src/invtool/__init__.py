"""invtool: exact invariant theory of finite matrix groups.

Invariant and relative-invariant rings, Molien and Hilbert series, truncated
minimal free resolutions and Koszul homology with group action, character
identities in the Grothendieck ring, and cyclic sieving checks, over Q,
cyclotomic fields, and finite fields.
"""

__version__ = "0.1.0"

from .numbers import (
    QQ,
    BrauerLiftContext,
    Char0LiftContext,
    CyclotomicField,
    CyclotomicNumber,
    FieldEmbedding,
    FiniteField,
    FiniteFieldElement,
    brauer_lift,
    cyclotomic_embed,
    cyclotomic_polynomial,
    element_order,
)
