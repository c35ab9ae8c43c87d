"""dynalaw: discovery of interpretable elastoplastic constitutive laws from
observed particle dynamics, via an evolutionary search over symbolic law
expressions with a simulation-based parameter fit scoring each candidate."""

__version__ = "0.1.0"
