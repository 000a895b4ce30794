"""Typed rewriting for the Calculus of Looping Sequences.

Modules, from the bottom up: ``syntax`` (terms, patterns, canonical forms),
``matching`` (matching modulo congruence, contexts), ``rewrite`` (rules and
state exploration), ``typesys`` (environments and the type checker),
``inference`` (principal typing and the typed step) and ``cli``.
"""
__version__ = "0.1.0"
