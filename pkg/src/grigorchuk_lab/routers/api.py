"""API routes for batch analyses."""

import json
from typing import Annotated

from fastapi import APIRouter, Depends, HTTPException
from sqlmodel import Session

from grigorchuk_lab.database import get_session
from grigorchuk_lab.errors import GrigorchukLabError
from grigorchuk_lab.models import RunStatus
from grigorchuk_lab.schemas import (
    AnalyzeRequest,
    AnalyzeResponse,
    ErrorResponse,
    ExponentReport,
    FrReport,
    MatrixReport,
    RunResponse,
    VerifyReport,
)
from grigorchuk_lab.services.analysis import analyze_omega, matrix_table
from grigorchuk_lab.services.ledger import get_run_by_code, is_valid_code, record_run
from grigorchuk_lab.services.verify import run_suite

router = APIRouter()


@router.post(
    "/analyze-omega",
    response_model=AnalyzeResponse,
    responses={400: {"model": ErrorResponse}},
)
def analyze(
    request: AnalyzeRequest,
    session: Annotated[Session, Depends(get_session)],
):
    """Fr(D) scan and growth exponent of an omega string."""
    try:
        analysis = analyze_omega(request.omega, request.D)
    except GrigorchukLabError as exc:
        raise HTTPException(status_code=400, detail=str(exc))

    exponent = None
    if analysis.exponent is not None:
        exponent = ExponentReport.from_data(str(analysis.omega), analysis.exponent, analysis.tails)
    response = AnalyzeResponse(
        fr=FrReport.from_analysis(analysis.fr), exponent=exponent, volume_exponent=analysis.volume_exponent
    )

    status = RunStatus.OK if analysis.fr.passed else RunStatus.FR_FAILURE
    config = {"command": "analyze-omega", "omega": str(analysis.omega), "D": request.D}
    run = record_run(session, "analyze-omega", config, response.model_dump(mode="json"), status)
    response.code = run.code
    return response


@router.post(
    "/verify/{suite}",
    response_model=VerifyReport,
    responses={400: {"model": ErrorResponse}},
)
def verify(
    suite: str,
    session: Annotated[Session, Depends(get_session)],
):
    """Run one verification suite and return its pass/fail table."""
    try:
        checks = run_suite(suite)
    except GrigorchukLabError as exc:
        raise HTTPException(status_code=400, detail=str(exc))

    report = VerifyReport.from_checks(suite, checks)
    status = RunStatus.OK if report.passed else RunStatus.FAILED
    record_run(session, "verify", {"command": "verify", "suite": suite}, report.model_dump(mode="json"), status)
    return report


@router.get("/matrices", response_model=list[MatrixReport])
def matrices():
    """Substitution matrices with their Perron values."""
    return [
        MatrixReport(name=name, matrix=[[int(x) for x in row] for row in matrix], spectral_radius=value)
        for name, matrix, value in matrix_table()
    ]


@router.get(
    "/runs/{code}",
    response_model=RunResponse,
    responses={400: {"model": ErrorResponse}, 404: {"model": ErrorResponse}},
)
def get_run(
    code: str,
    session: Annotated[Session, Depends(get_session)],
):
    """Get a ledger row by its run code."""
    if not is_valid_code(code):
        raise HTTPException(status_code=400, detail="Invalid run code format")

    run = get_run_by_code(session, code)
    if not run:
        raise HTTPException(status_code=404, detail="Run code not found")

    return RunResponse(
        code=run.code,
        command=run.command,
        omega=run.omega,
        seed=run.seed,
        status=run.status,
        config=json.loads(run.config_json),
        result=json.loads(run.result_json),
        created_at=run.created_at,
    )
