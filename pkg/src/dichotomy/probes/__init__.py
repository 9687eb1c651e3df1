"""Detectors for the complicated case, the trend probe, the census and the arithmetic search."""
from .arith import (ArithCheck, ArithSearchResult, ArithWitness, EquivalencePartition, grid_base,
                    mutate_witness, search_arithmetic_interpretation, verify_arithmetic_interpretation)
from .census import CensusReport, count_census
from .configs import (BudgetExhausted, ConfigResult, find_big_equivalence, find_matching_configuration,
                      find_order_configuration)
from .dichotomy import ProbeReport, dichotomy_probe, verdict
from .families import FamilyDescriptor, Instance, eval_lambda, generate
from .symmetry import SymmetryReport, cyclic_triple_model, symmetry_instance_check

__all__ = [n for n in dir() if not n.startswith("_")]
