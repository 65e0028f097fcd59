"""
Simple script to run the FastAPI server.
Alternative to: uvicorn qfe.main:app --reload
"""
import uvicorn

if __name__ == "__main__":
    uvicorn.run(
        "qfe.main:app",
        host="0.0.0.0",
        port=8000,
        reload=True,
        log_level="info"
    )
