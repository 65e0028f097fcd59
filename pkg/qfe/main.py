"""
FastAPI application entry point.
"""
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from qfe.routers import series, systems, euler, partitions, repro


# Create FastAPI app
app = FastAPI(
    title="q-Functional Equation Finder",
    description="Contiguous relations, closed systems and product forms of double q-series",
    version="1.0.0",
)

# Add CORS middleware (allow all for local use)
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers with /api prefix
app.include_router(series.router, prefix="/api/series", tags=["series"])
app.include_router(systems.router, prefix="/api/systems", tags=["systems"])
app.include_router(euler.router, prefix="/api/euler", tags=["euler"])
app.include_router(partitions.router, prefix="/api/partitions", tags=["partitions"])
app.include_router(repro.router, prefix="/api/repro", tags=["repro"])


@app.get("/")
async def root():
    """
    Root endpoint.
    """
    return {
        "status": "ok",
        "message": "q-functional equation finder"
    }
