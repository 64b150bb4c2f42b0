import logging
from queue import Queue
from threading import Thread
from typing import Any, Callable, Optional

import numpy as np

from cesarolab.config import worker_count

logger = logging.getLogger(__name__)

EOF = Exception("__EOF__")
"""EOF tells a worker that no more blocks will arrive."""

BLOCK_ROWS = 1024


def is_EOF(value: Any) -> bool:
    return isinstance(value, Exception) and value.args[0] == "__EOF__"


def map_blocks(
    fn: Callable[[np.ndarray], np.ndarray],
    rows: np.ndarray,
    threads: Optional[int] = None,
    block_rows: int = BLOCK_ROWS,
) -> np.ndarray:
    """Apply a vectorised fn to row blocks of `rows` on worker threads.

    Results are reassembled in block order, so the output does not depend on scheduling.
    The exception of the lowest failing block is re-raised here.
    """
    threads = worker_count() if threads is None else max(1, threads)
    blocks = [rows[i : i + block_rows] for i in range(0, rows.shape[0], block_rows)]
    if not blocks:
        return np.asarray(fn(rows))
    if threads == 1 or len(blocks) == 1:
        return np.concatenate([np.asarray(fn(b)) for b in blocks])

    tasks: Queue = Queue()
    for i, b in enumerate(blocks):
        tasks.put((i, b))
    workers = min(threads, len(blocks))
    for _ in range(workers):
        tasks.put(EOF)

    results: list[Optional[np.ndarray]] = [None] * len(blocks)
    errors: dict[int, BaseException] = {}

    def worker():
        while True:
            item = tasks.get()
            if is_EOF(item):
                break
            i, block = item
            try:
                results[i] = np.asarray(fn(block))
            except Exception as e:  # re-raised on the calling thread
                logger.debug(f"Worker failed on block {i}: {e}")
                errors[i] = e

    logger.debug(f"Evaluating {len(blocks)} blocks on {workers} threads")
    pool = [Thread(target=worker, daemon=True) for _ in range(workers)]
    for t in pool:
        t.start()
    for t in pool:
        t.join()
    if errors:
        raise errors[min(errors)]
    return np.concatenate(results)  # type: ignore[arg-type]
