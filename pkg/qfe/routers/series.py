"""Series and product expansion endpoints."""
from fastapi import APIRouter, HTTPException
import logging

from qfe.algebra import TruncSeries
from qfe.schemas import ExpandRequest, ProductRequest, ProductSpec, SeriesResponse
from qfe.series import InadmissibleParamsError, eval_series, expand_product

router = APIRouter()
logger = logging.getLogger(__name__)


def _response(series: TruncSeries) -> SeriesResponse:
    return SeriesResponse(
        order=series.order,
        terms=[(x, q, c) for (x, q), c in series.items()],
        q_coefficients=series.q_coefficients(),
    )


@router.post("/expand", response_model=SeriesResponse)
def expand_series(request: ExpandRequest):
    """
    Expand S_{C1,C2} to q^order, with x symbolic or x = q^x_power.

    **Example:**
    ```json
    {"params": {"B11": 2, "B22": 1, "B12": 1, "D1": 2}, "order": 20, "x_power": 0}
    ```
    """
    try:
        series = eval_series(request.params, request.order, request.x_power)
    except InadmissibleParamsError as e:
        raise HTTPException(status_code=422, detail=str(e))
    return _response(series)


@router.post("/product", response_model=SeriesResponse)
def expand_periodic_product(request: ProductRequest):
    """Expand a product such as ``(q^1,q^2,q^3;q^4)_inf^-1``."""
    try:
        spec = ProductSpec.parse(request.product)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return _response(expand_product(spec, request.order))
