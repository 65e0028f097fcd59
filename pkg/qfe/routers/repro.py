"""Reference result endpoints."""
from fastapi import APIRouter, HTTPException

from qfe.golden import UnknownArtifactError, artifact_names, run_artifact
from qfe.schemas import ReproResult

router = APIRouter()


@router.get("", response_model=list[str])
def list_artifacts():
    return artifact_names()


@router.get("/{name}", response_model=ReproResult)
def reproduce(name: str):
    try:
        return run_artifact(name)
    except UnknownArtifactError as e:
        raise HTTPException(status_code=404, detail=str(e))
