"""Thread pool with order-preserving map for deterministic reductions."""

from typing import Callable, Iterable, List, TypeVar

from joblib import Parallel, delayed

from src.config import config
from src.utils.logger import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class WorkerPool:
    """Runs independent work items on threads; results come back in input order."""

    def __init__(self, threads: int = 1):
        self.threads = max(1, int(threads))

    def resize(self, threads: int) -> None:
        """Change the number of worker threads."""
        self.threads = max(1, int(threads))
        logger.debug(f"Worker pool resized to {self.threads} threads")

    def map(self, func: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """Apply func to every item; the output order matches the input order."""
        items = list(items)
        if self.threads == 1 or len(items) <= 1:
            return [func(item) for item in items]

        # numpy kernels release the GIL, so threads are enough
        return Parallel(n_jobs=self.threads, prefer="threads")(
            delayed(func)(item) for item in items
        )


def chunk_ranges(total: int, chunk: int) -> List[range]:
    """Split range(total) into consecutive ranges of at most chunk items."""
    chunk = max(1, chunk)
    return [range(start, min(start + chunk, total)) for start in range(0, total, chunk)]


# Global worker pool instance
worker_pool = WorkerPool(config.threads)
