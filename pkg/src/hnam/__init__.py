"""Interpretable demand forecasting: a learned level plus per-covariate
additive effects whose interactions follow a user-specified hierarchy."""

__version__ = "0.1.0"
