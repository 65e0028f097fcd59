"""Contiguous equations and system extraction endpoints."""
from fastapi import APIRouter, HTTPException
import logging

from qfe.config import settings
from qfe.contiguous import BoxError, IndexBox, count_equations, count_series, enumerate_box, rect_sizes
from qfe.schemas import BoxRequest, EquationsResponse, SolveRequest, SystemResponse
from qfe.series import InadmissibleParamsError
from qfe.solver import ExtractionError, solve_keep_set, verify_system

router = APIRouter()
logger = logging.getLogger(__name__)


@router.post("/contiguous", response_model=EquationsResponse)
def list_contiguous(request: BoxRequest):
    """All primary relation instances inside the box, with the counting quantities."""
    try:
        box = IndexBox.for_params(request.params, request.box)
    except BoxError as e:
        raise HTTPException(status_code=400, detail=str(e))
    dm1, dm2 = box.widths
    return EquationsResponse(
        equations=[str(eq) for eq in enumerate_box(request.params, box)],
        count_equations=count_equations(request.params, dm1, dm2),
        count_series=count_series(request.params, dm1, dm2),
        rect_sizes=rect_sizes(request.params),
    )


@router.post("/solve", response_model=SystemResponse)
def solve_system(request: SolveRequest):
    """
    Extract the closed system for a keep-set and verify it numerically.

    **Example:**
    ```json
    {
        "params": {"B11": 2, "B22": 1, "B12": 1, "D1": 2},
        "box": [0, 2, 0, 1],
        "keep": [[0, 0], [1, 0]]
    }
    ```
    """
    try:
        box = IndexBox.for_params(request.params, request.box)
        basis, system = solve_keep_set(request.params, box, request.keep)
        order = request.verify_order or settings.QFE_ORDER
        report = verify_system(request.params, system, order)
    except (BoxError, ExtractionError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    except InadmissibleParamsError as e:
        raise HTTPException(status_code=422, detail=str(e))

    logger.info(f"✅ Solved keep {request.keep} for {request.params}")
    return SystemResponse(
        basis_dimension=basis.dimension,
        reduced=system.reduced_lines(),
        equations=system.lines(),
        system=system.to_dict(report.first_residual),
        residual_orders=report.residual_orders,
        verified=report.ok,
    )
