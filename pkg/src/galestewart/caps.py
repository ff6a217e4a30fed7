"""Enumeration caps shared by every exhaustive sweep."""

import os

DEFAULT_CAP = 10**6


class CapExceeded(Exception):
    """An enumeration would produce more objects than the configured cap."""

    def __init__(self, what: str, count: int, cap: int):
        super().__init__(f"{what}: {count} objects exceeds cap {cap}")
        self.what = what
        self.count = count
        self.cap = cap


def enumeration_cap() -> int:
    """The cap in force, overridable through the GS_CAPS environment variable."""
    raw = os.environ.get("GS_CAPS")
    if not raw:
        return DEFAULT_CAP
    try:
        value = int(float(raw))
    except ValueError:
        raise ValueError(f"GS_CAPS must be a number, got {raw!r}") from None
    if value < 1:
        raise ValueError("GS_CAPS must be positive")
    return value


def check_cap(what: str, count: int, cap: int | None = None) -> None:
    if cap is None:
        cap = enumeration_cap()
    if count > cap:
        raise CapExceeded(what, count, cap)
