"""
Numerical core: spectral substrate, parameter choice rules, test problems, theory checks, experiments
"""
