"""Generalized modal logics with Boolean and finite-language box operators."""

from .formula import (Box, Formula, FormulaSyntaxError, Not, Or, Registry, SizeBudget,
                      UnknownOperatorError, Var, modal_depth, parse, size)
from .equivalence import EquivVerdict, equivalent
from .kripke import KripkeModel, ModelClass, PointedModel, class_satisfies, extension, satisfies

__version__ = "0.1.0"

__all__ = [
    "Box", "EquivVerdict", "Formula", "FormulaSyntaxError", "KripkeModel", "ModelClass", "Not", "Or", "PointedModel",
    "Registry", "SizeBudget", "UnknownOperatorError", "Var", "class_satisfies", "equivalent", "extension",
    "modal_depth", "parse", "satisfies", "size",
]
