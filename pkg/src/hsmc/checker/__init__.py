"""The model checking procedure: valuation-table recursion plus track oracle."""
from .mc import (
    BACKWARD,
    FORWARD,
    OracleAnswer,
    OracleConfig,
    Stats,
    ValuationTables,
    Verdict,
    mc,
    model_check,
    oracle_exists,
)
from .program import ColumnProgram, compile_program, eval_column_step

__all__ = [
    "BACKWARD",
    "FORWARD",
    "ColumnProgram",
    "OracleAnswer",
    "OracleConfig",
    "Stats",
    "ValuationTables",
    "Verdict",
    "compile_program",
    "eval_column_step",
    "mc",
    "model_check",
    "oracle_exists",
]
