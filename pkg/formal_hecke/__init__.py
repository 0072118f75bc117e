#!/usr/bin/env python3
"""
formal_hecke
Formal modular points and Hecke operators over imaginary quadratic fields
"""

from .classgroup import ClassGroup, class_group
from .errors import FormalHeckeError
from .heckeops import OperatorDescriptor, evaluate
from .ideals import FractionalIdeal, Ideal
from .modpts import FormalSum
from .qfield import FieldDesc, FieldElement

__version__ = "0.1.0"

__all__ = [
    "ClassGroup",
    "FieldDesc",
    "FieldElement",
    "FormalHeckeError",
    "FormalSum",
    "FractionalIdeal",
    "Ideal",
    "OperatorDescriptor",
    "class_group",
    "evaluate",
]
