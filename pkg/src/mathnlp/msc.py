"""Top-level subject classification codes and their validation.

The classification scheme has exactly 63 two-character top-level codes.
The table ships as a static data file so validation never touches the
network.
"""

from __future__ import annotations

from importlib import resources


class UnknownMscCodeError(ValueError):
    """Raised when a code is not one of the 63 top-level classes."""


def _load_table() -> dict[str, str]:
    table = {}
    text = resources.files("mathnlp.data").joinpath("msc_top_levels.tsv").read_text("utf-8")
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        code, label = line.split("\t", 1)
        table[code] = label
    return table


MSC_LABELS: dict[str, str] = _load_table()
MSC_TOP_LEVELS: tuple[str, ...] = tuple(sorted(MSC_LABELS))

assert len(MSC_TOP_LEVELS) == 63


def is_valid_code(code: str) -> bool:
    return code in MSC_LABELS


def validate_code(code: str) -> str:
    """Return ``code`` unchanged, raising UnknownMscCodeError if absent from the table."""
    if code not in MSC_LABELS:
        raise UnknownMscCodeError(f"unknown MSC top-level code: {code!r}")
    return code


def msc_label(code: str) -> str:
    return MSC_LABELS[validate_code(code)]
