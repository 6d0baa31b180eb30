import os


def thread_count(requested=None) -> int:
    """Worker count: explicit value, else ``TDS_PSA_THREADS`` (0 = one per CPU)."""
    if requested is None:
        raw = os.environ.get("TDS_PSA_THREADS", "1").strip() or "1"
        try:
            requested = int(raw)
        except ValueError:
            raise ValueError(f"TDS_PSA_THREADS must be an integer, got {raw!r}") from None
    if requested < 0:
        raise ValueError(f"thread count must be >= 0, got {requested}")
    if requested == 0:
        return os.cpu_count() or 1
    return requested
