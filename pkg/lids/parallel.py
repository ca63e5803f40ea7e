"""Map a pure function over partitions, in-process or on a process pool."""
import logging
import os
from concurrent.futures import ProcessPoolExecutor

logger = logging.getLogger(__name__)


def _bootstrap(initializer, initargs):
    # spawned workers start without Django configured
    import django

    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "lidsforge.settings")
    django.setup()
    if initializer is not None:
        initializer(*initargs)


def partition(items, size):
    items = list(items)
    size = max(1, int(size))
    return [items[i:i + size] for i in range(0, len(items), size)]


def map_partitions(func, partitions, workers=1, initializer=None, initargs=()):
    """``[func(p) for p in partitions]``; results keep partition order."""
    partitions = list(partitions)
    if workers <= 1 or len(partitions) <= 1:
        if initializer is not None:
            initializer(*initargs)
        return [func(part) for part in partitions]
    logger.debug("mapping %d partitions over %d workers", len(partitions), workers)
    with ProcessPoolExecutor(max_workers=workers, initializer=_bootstrap,
                             initargs=(initializer, initargs)) as pool:
        return list(pool.map(func, partitions))
