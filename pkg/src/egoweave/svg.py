"""Minimal deterministic SVG 1.1 writer.

Attributes render in the order given, numbers with a fixed two-decimal
format, so identical scenes serialize byte-for-byte identically.
"""

from __future__ import annotations

from typing import Iterable
from xml.sax.saxutils import escape, quoteattr


def fmt(value: float) -> str:
    return f"{value:.2f}"


def tag(name: str, attrs: dict[str, object], text: str | None = None) -> str:
    parts = [name]
    for key, value in attrs.items():
        if value is None:
            continue
        if isinstance(value, float):
            rendered = fmt(value)
        else:
            rendered = str(value)
        parts.append(f"{key}={quoteattr(rendered)}")
    opening = " ".join(parts)
    if text is None:
        return f"<{opening}/>"
    return f"<{opening}>{escape(text)}</{name}>"


def group(class_name: str, children: Iterable[str]) -> str:
    body = "\n".join(children)
    if body:
        return f'<g class="{class_name}">\n{body}\n</g>'
    return f'<g class="{class_name}"/>'


def document(width: float, height: float, children: Iterable[str]) -> str:
    body = "\n".join(children)
    head = (
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{fmt(width)}" height="{fmt(height)}" '
        f'viewBox="0 0 {fmt(width)} {fmt(height)}">'
    )
    if body:
        return f"{head}\n{body}\n</svg>\n"
    return f"{head}</svg>\n"
