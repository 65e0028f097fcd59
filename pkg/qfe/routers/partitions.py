"""Partition count endpoints."""
from fastapi import APIRouter, Query

from qfe.partitions import verify_thm12
from qfe.schemas import PartitionReport

router = APIRouter()


@router.get("/thm12", response_model=PartitionReport)
def compare_three_classes(N: int = Query(25, ge=0, le=40)):
    """Counts of the at-most-three, matching and gap classes for n = 0..N."""
    report = verify_thm12(N)
    return PartitionReport(N=N, rows=report.rows, ok=report.ok, first_mismatch=report.first_mismatch)
