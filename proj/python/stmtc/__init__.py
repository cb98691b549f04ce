"""Statement completion over abstracted token models."""

from ._stmtc import Engine, StmtcError, evaluate, gen_corpus

__all__ = ["Engine", "StmtcError", "evaluate", "gen_corpus"]
