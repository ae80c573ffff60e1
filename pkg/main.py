# load app from terminal: uvicorn main:app --reload
import logging
import time

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from hexufs import config
from hexufs.cli import parse_interpretation
from hexufs.depgraph import analyze as analyze_program
from hexufs.errors import HexError
from hexufs.external_sources import default_registry, parse_table_oracle
from hexufs.parser import load_program
from hexufs.pipeline import EvaluationOptions, evaluate
from hexufs.syntax import sort_atoms
from hexufs.ufs import UfsQuery, find_unfounded_set
from utils.app_utils import AnalyzeRequest, CheckUfsRequest, ProgramRequest, SolveRequest
from utils.logging_utils import init_db, log_run

logging.basicConfig(level=config.LOG_LEVEL)
logger = logging.getLogger(__name__)

app = FastAPI()
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Initialize database on startup
init_db()


def _load(request: ProgramRequest):
    registry = default_registry()
    for text in request.oracles:
        registry.register(parse_table_oracle(text).to_spec())
    return load_program(request.program, registry), registry


def _error(command: str, request: ProgramRequest, e: Exception, **extra):
    logger.error(f"{command} failed: {e}")
    log_run(command, request.program, status=f"error: {e}")
    return {"status": "error", "message": str(e), **extra}


@app.get("/ping")
async def ping():
    return {"status": "ok"}


@app.post("/solve")
def solve(request: SolveRequest):
    """
    Evaluate a program and return its answer sets with the evaluation counters.
    """
    try:
        program, registry = _load(request)
        overrides = {k: v for k, v in (("mode", request.mode), ("engine", request.engine)) if v}
        options = EvaluationOptions(max_answers=request.max_answers, **overrides)
        report = evaluate(program, registry, options)
    except HexError as e:
        return _error("solve", request, e, answer_sets=[], stats={})

    stats = report.to_stats()
    log_run("solve", request.program, stats, "ok", report.phase_times_ms.get("total"))
    return {
        "status": "ok",
        "answer_sets": [[str(a) for a in sort_atoms(s)] for s in report.answer_sets],
        "stats": stats,
        "message": f"{len(report.answer_sets)} answer set(s)",
    }


@app.post("/analyze")
def analyze(request: AnalyzeRequest):
    started = time.perf_counter()
    try:
        program, _ = _load(request)
        analysis = analyze_program(program)
    except HexError as e:
        return _error("analyze", request, e)

    log_run("analyze", request.program, status="ok", total_ms=(time.perf_counter() - started) * 1000)
    return {"status": "ok", **analysis.to_dict()}


@app.post("/check-ufs")
def check_ufs(request: CheckUfsRequest):
    """
    Search an unfounded set of the program that meets the given true atoms.
    """
    started = time.perf_counter()
    try:
        program, registry = _load(request)
        interpretation = parse_interpretation(request.interpretation, program)
        query = UfsQuery(program, interpretation, interpretation.true_atoms)
        witness = find_unfounded_set(query, registry)
    except HexError as e:
        return _error("check-ufs", request, e, witness=None)

    log_run("check-ufs", request.program, status="ok", total_ms=(time.perf_counter() - started) * 1000)
    return {
        "status": "ok",
        "witness": [str(a) for a in sort_atoms(witness)] if witness is not None else None,
    }
