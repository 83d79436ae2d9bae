"""schurlab: exact q-Schur algebras of type A, their affine versions,
type-B coideal analogues, canonical bases, and machine-checkable
positivity certificates, all at desk scale over Z[v, v^-1]."""

__version__ = "0.1.0"
