"""Core detection pipeline for hoginator.

Modules:
- approx_math: CORDIC vectoring + Newton-Raphson rsqrt, with exact oracles
- gradient_field: central-difference gradients and their polar form
- descriptor: cell histograms, block normalization, 3780-feature assembly
- classifier: linear SVM decision, Pegasos trainer, evaluation
- cycle_model: cycle budgets and timings of the streaming datapath
"""
