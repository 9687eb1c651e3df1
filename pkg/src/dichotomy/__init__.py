"""Finite-model toolkit for the simple/complicated dichotomy of relation families.

Subpackages: ``logic`` (formulas), ``probes`` (detectors, census, arithmetic);
modules: ``structures``, ``typelab``, ``splitting``, ``decompose2``, ``sunflower``,
``acceptance`` and ``cli``.
"""
__version__ = "0.1.0"
