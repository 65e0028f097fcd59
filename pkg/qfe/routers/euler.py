"""Euler product scan endpoint."""
from fastapi import APIRouter

from qfe.euler import product_scan
from qfe.schemas import EulerScanRequest, ProductHit

router = APIRouter()


@router.post("/scan", response_model=list[ProductHit])
def scan_products(request: EulerScanRequest):
    """Periodic products among the series of [-B11, B11] x [-B22, B22]."""
    hits = product_scan(request.params, request.order, request.kmax, request.x_powers)
    return [hit.to_record() for hit in hits]
