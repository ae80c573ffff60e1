from typing import List, Literal, Optional

from pydantic import BaseModel, Field


class ProgramRequest(BaseModel):
    program: str
    oracles: List[str] = Field(default_factory=list)


class SolveRequest(ProgramRequest):
    mode: Optional[Literal["full", "no-decomposition", "no-criterion", "brute"]] = None
    engine: Optional[Literal["exhaustive", "propagate"]] = None
    max_answers: Optional[int] = Field(default=None, ge=1)


class AnalyzeRequest(ProgramRequest):
    pass


class CheckUfsRequest(ProgramRequest):
    interpretation: str = ""
