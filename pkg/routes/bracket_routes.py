from fastapi import APIRouter, HTTPException
import logging
from typing import Any, Dict

from models.reports import RunConfig
from services.command_runner import EXIT_BUDGET, EXIT_CONFIG, get_command_runner

logger = logging.getLogger(__name__)

router = APIRouter(tags=["brackets"])


@router.get("/subcommands")
async def list_subcommands() -> Dict[str, Any]:
    runner = get_command_runner()
    return {"subcommands": runner.subcommands}


@router.post("/run")
async def run_command(config: RunConfig) -> Dict[str, Any]:
    """
    Run one subcommand through the same runner as the CLI.

    Failed checks are reported with 200 and ``passed = false``.
    """
    runner = get_command_runner()
    result = runner.run(config)

    if result.exit_code == EXIT_CONFIG:
        logger.warning(f"[API] {config.command}: {result.error}")
        raise HTTPException(status_code=422, detail=result.error)
    if result.exit_code == EXIT_BUDGET:
        logger.warning(f"[API] {config.command}: {result.error}")
        raise HTTPException(status_code=413, detail=result.error)

    return {"exit_code": result.exit_code, "report": result.report}
