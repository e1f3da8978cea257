"""qdual: dual families of q-orthogonal polynomials on countable point
sets — series/recurrence evaluation, Jacobi-matrix spectra, orthogonality
and duality unitarity checks, and a registry of verifiable identities."""

__version__ = "0.1.0"
