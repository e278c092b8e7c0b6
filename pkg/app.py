import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
import uvicorn

from config import settings
from routes import bracket_router
from services.command_runner import get_command_runner

logging.basicConfig(level=settings.LOG_LEVEL)

app = FastAPI(
    title="Homotopy N-Lie Bracket API",
    description="Exact constructors and verifiers for N-ary skew brackets",
    version="1.0.0",
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(bracket_router, prefix="/api")


@app.get("/")
async def root():
    return {
        "message": "Homotopy N-Lie Bracket API is running",
        "version": "1.0.0",
        "subcommands": get_command_runner().subcommands,
        "endpoints": {
            "run": "/api/run",
            "subcommands": "/api/subcommands",
            "health": "/health",
            "docs": "/docs",
        },
    }


@app.get("/health")
async def health_check():
    return {"status": "ok"}


if __name__ == "__main__":
    uvicorn.run("app:app", host="0.0.0.0", port=settings.PORT, reload=settings.DEBUG)
