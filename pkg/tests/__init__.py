"""
Subspace Witness - test package
"""
