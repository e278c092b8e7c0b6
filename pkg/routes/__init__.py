from .bracket_routes import router as bracket_router

__all__ = ["bracket_router"]
