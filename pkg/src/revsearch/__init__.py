"""Toolkit for a small reversible imperative language and the reversible
linear and binary searches written in it."""

from .checker import CheckError, CheckFailed, CheckedProgram, check, check_errors, free_names
from .interpreter import (
    BACKWARD, FORWARD, BindingError, Machine, Outcome, RuntimeFault, StepLog, Tracer,
    evaluate, run,
)
from .inverter import invert_procedure, invert_program, invert_stmts
from .parser import ParseError, parse
from .pretty import pretty

__version__ = "0.1.0"

__all__ = [
    "BACKWARD", "FORWARD", "BindingError", "CheckError", "CheckFailed", "CheckedProgram",
    "Machine", "Outcome", "ParseError", "RuntimeFault", "StepLog", "Tracer", "check",
    "check_errors", "evaluate", "free_names", "invert_procedure", "invert_program",
    "invert_stmts", "parse", "pretty", "run",
]
