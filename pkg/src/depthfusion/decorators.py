# Custom Decorators - Depth Fusion Application
# Decoradores Customizados - Aplicação Depth Fusion

"""
Logging decorators for the long-running stages of the harness.

Decoradores de logging para as etapas demoradas do harness.

Examples:
    @log_execution_time
    def make_dataset(config, n_scenes, out_dir):
        ...

    @log_errors
    def train(config):
        ...
"""

import functools
import logging
import time

logger = logging.getLogger(__name__)


# Logging Decorators / Decoradores de Logging


def log_execution_time(func):
    """
    Decorator to log function execution time.
    Decorador para logar tempo de execução da função.

    Usage:
        @log_execution_time
        def slow_function():
            ...
    """

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.perf_counter()

        result = func(*args, **kwargs)

        execution_time = time.perf_counter() - start_time
        logger.info(f"{func.__name__} executed in {execution_time:.4f} seconds")

        return result

    return wrapper


def log_errors(func):
    """
    Decorator to log exceptions that occur in a function, then re-raise.
    Decorador para logar exceções que ocorrem em uma função e relançá-las.

    Errors from the depth fusion hierarchy are logged with their category.
    Erros da hierarquia depth fusion são logados com sua categoria.
    """

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except Exception as e:
            category = getattr(e, "category", type(e).__name__)
            logger.error(
                f"Error in {func.__name__}: [{category}] {e!s}",
                exc_info=True,
                extra={"function": func.__name__, "category": category},
            )
            raise

    return wrapper
