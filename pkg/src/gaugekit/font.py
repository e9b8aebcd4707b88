"""Embedded stroke font for instrument faces.

Glyphs are polylines on a 6-unit-tall grid (baseline y=0, cap height y=6,
descenders to y=-2) and render as round-capped strokes. Shipping the font
inside the package keeps text rendering byte-identical everywhere; system
font stacks do not guarantee that.

Coverage: digits, basic Latin letters, and the unit symbols an instrument
face needs. Kanji and the like are deliberately out.
"""

from __future__ import annotations

import math

from .core import GaugekitError

GRID = 6.0  # glyph units per cap height
SPACING = 1.2  # gap added to each advance, in glyph units
STROKE_FRAC = 0.13  # stroke width as a fraction of the text size


class FontCoverageError(GaugekitError):
    def __init__(self, char: str):
        super().__init__(f"character {char!r} is not covered by the embedded font")
        self.char = char


def _circle(cx: float, cy: float, r: float, n: int = 8) -> tuple:
    pts = []
    for i in range(n + 1):
        a = 2.0 * math.pi * i / n
        pts.append((cx + r * math.cos(a), cy + r * math.sin(a)))
    return tuple(pts)


# char -> (advance width in glyph units, strokes)
_GLYPHS: dict[str, tuple[float, tuple]] = {
    " ": (2.4, ()),
    "0": (4, (((1, 0), (3, 0), (4, 1), (4, 5), (3, 6), (1, 6), (0, 5), (0, 1), (1, 0)),)),
    "1": (4, (((1, 5), (2, 6), (2, 0)), ((1, 0), (3, 0)))),
    "2": (4, (((0, 5), (1, 6), (3, 6), (4, 5), (4, 4), (0, 1), (0, 0), (4, 0)),)),
    "3": (
        4,
        (
            ((0, 5.4), (1, 6), (3, 6), (4, 5), (4, 4.2), (3, 3.3), (1.6, 3.3)),
            ((3, 3.3), (4, 2.4), (4, 1), (3, 0), (1, 0), (0, 0.7)),
        ),
    ),
    "4": (4, (((3, 0), (3, 6), (0, 2), (4, 2)),)),
    "5": (4, (((4, 6), (0, 6), (0, 3.5), (2.5, 3.5), (4, 2.4), (4, 1), (3, 0), (1, 0), (0, 1)),)),
    "6": (
        4,
        (((3.5, 6), (1.5, 6), (0, 4), (0, 1), (1, 0), (3, 0), (4, 1), (4, 2), (3, 3), (1, 3), (0, 2)),),
    ),
    "7": (4, (((0, 6), (4, 6), (1.5, 0)),)),
    "8": (
        4,
        (
            ((1, 3.2), (0.3, 4), (0.3, 5.2), (1, 6), (3, 6), (3.7, 5.2), (3.7, 4), (3, 3.2), (1, 3.2)),
            ((1, 3.2), (0, 2.4), (0, 1), (1, 0), (3, 0), (4, 1), (4, 2.4), (3, 3.2)),
        ),
    ),
    "9": (
        4,
        (((0.5, 0), (2.5, 0), (4, 2), (4, 5), (3, 6), (1, 6), (0, 5), (0, 4), (1, 3), (3, 3), (4, 4)),),
    ),
    "A": (4, (((0, 0), (2, 6), (4, 0)), ((0.7, 2), (3.3, 2)))),
    "B": (
        4,
        (
            ((0, 0), (0, 6), (3, 6), (4, 5), (4, 4.2), (3, 3.3), (0, 3.3)),
            ((3, 3.3), (4, 2.4), (4, 1), (3, 0), (0, 0)),
        ),
    ),
    "C": (4, (((4, 5), (3, 6), (1, 6), (0, 5), (0, 1), (1, 0), (3, 0), (4, 1)),)),
    "D": (4, (((0, 0), (0, 6), (2.5, 6), (4, 4.5), (4, 1.5), (2.5, 0), (0, 0)),)),
    "E": (4, (((4, 0), (0, 0), (0, 6), (4, 6)), ((0, 3.2), (2.8, 3.2)))),
    "F": (4, (((0, 0), (0, 6), (4, 6)), ((0, 3.2), (2.8, 3.2)))),
    "G": (
        4,
        (((4, 5), (3, 6), (1, 6), (0, 5), (0, 1), (1, 0), (3, 0), (4, 1), (4, 2.6), (2.4, 2.6)),),
    ),
    "H": (4, (((0, 0), (0, 6)), ((4, 0), (4, 6)), ((0, 3.2), (4, 3.2)))),
    "I": (2, (((0, 0), (2, 0)), ((1, 0), (1, 6)), ((0, 6), (2, 6)))),
    "J": (4, (((0, 1.2), (1, 0), (2.5, 0), (3.5, 1.2), (3.5, 6)),)),
    "K": (4, (((0, 0), (0, 6)), ((4, 6), (0, 2.6)), ((1.6, 3.8), (4, 0)))),
    "L": (4, (((0, 6), (0, 0), (4, 0)),)),
    "M": (4.6, (((0, 0), (0, 6), (2.3, 3), (4.6, 6), (4.6, 0)),)),
    "N": (4, (((0, 0), (0, 6), (4, 0), (4, 6)),)),
    "O": (4, (((1, 0), (3, 0), (4, 1), (4, 5), (3, 6), (1, 6), (0, 5), (0, 1), (1, 0)),)),
    "P": (4, (((0, 0), (0, 6), (3, 6), (4, 5), (4, 3.8), (3, 2.8), (0, 2.8)),)),
    "Q": (
        4,
        (
            ((1, 0), (3, 0), (4, 1), (4, 5), (3, 6), (1, 6), (0, 5), (0, 1), (1, 0)),
            ((2.6, 1.4), (4.2, -0.3)),
        ),
    ),
    "R": (
        4,
        (((0, 0), (0, 6), (3, 6), (4, 5), (4, 3.8), (3, 2.8), (0, 2.8)), ((1.6, 2.8), (4, 0))),
    ),
    "S": (
        4,
        (((4, 5), (3, 6), (1, 6), (0, 5), (0, 4.2), (1, 3.4), (3, 2.8), (4, 2), (4, 1), (3, 0), (1, 0), (0, 1)),),
    ),
    "T": (4, (((0, 6), (4, 6)), ((2, 6), (2, 0)))),
    "U": (4, (((0, 6), (0, 1), (1, 0), (3, 0), (4, 1), (4, 6)),)),
    "V": (4, (((0, 6), (2, 0), (4, 6)),)),
    "W": (4.6, (((0, 6), (1.1, 0), (2.3, 4), (3.5, 0), (4.6, 6)),)),
    "X": (4, (((0, 0), (4, 6)), ((0, 6), (4, 0)))),
    "Y": (4, (((0, 6), (2, 3), (4, 6)), ((2, 3), (2, 0)))),
    "Z": (4, (((0, 6), (4, 6), (0, 0), (4, 0)),)),
    "a": (
        3.5,
        (
            ((3.5, 4), (3.5, 0)),
            ((3.5, 3.2), (2.6, 4), (1, 4), (0, 3), (0, 1), (1, 0), (2.6, 0), (3.5, 0.8)),
        ),
    ),
    "b": (
        3.5,
        (((0, 6), (0, 0)), ((0, 0.8), (1, 0), (2.5, 0), (3.5, 1), (3.5, 3), (2.5, 4), (1, 4), (0, 3.2))),
    ),
    "c": (3.5, (((3.5, 3.4), (2.7, 4), (1, 4), (0, 3), (0, 1), (1, 0), (2.7, 0), (3.5, 0.6)),)),
    "d": (
        3.5,
        (((3.5, 6), (3.5, 0)), ((3.5, 0.8), (2.5, 0), (1, 0), (0, 1), (0, 3), (1, 4), (2.5, 4), (3.5, 3.2))),
    ),
    "e": (3.5, (((0, 2.2), (3.5, 2.2), (3.5, 3), (2.5, 4), (1, 4), (0, 3), (0, 1), (1, 0), (3, 0)),)),
    "f": (3, (((1, 0), (1, 5), (2, 6), (3, 6)), ((0, 4), (2.5, 4)))),
    "g": (
        3.5,
        (
            ((3.5, 4), (3.5, -1), (2.5, -2), (1, -2), (0.2, -1.4)),
            ((3.5, 3.2), (2.5, 4), (1, 4), (0, 3), (0, 1), (1, 0), (2.5, 0), (3.5, 0.8)),
        ),
    ),
    "h": (3.5, (((0, 6), (0, 0)), ((0, 3), (1, 4), (2.5, 4), (3.5, 3), (3.5, 0)))),
    "i": (1, (((0.5, 0), (0.5, 4)), ((0.5, 5.2), (0.5, 5.5)))),
    "j": (2, (((1, 4), (1, -1), (0, -2)), ((1, 5.2), (1, 5.5)))),
    "k": (3.5, (((0, 6), (0, 0)), ((3, 4), (0, 1.6)), ((1.2, 2.6), (3.2, 0)))),
    "l": (1, (((0.5, 6), (0.5, 0)),)),
    "m": (
        4.6,
        (
            ((0, 0), (0, 4)),
            ((0, 3.1), (0.8, 4), (1.7, 4), (2.3, 3.2), (2.3, 0)),
            ((2.3, 3.2), (3.1, 4), (3.8, 4), (4.6, 3.2), (4.6, 0)),
        ),
    ),
    "n": (3.5, (((0, 0), (0, 4)), ((0, 3), (1, 4), (2.5, 4), (3.5, 3), (3.5, 0)))),
    "o": (3.5, (((1, 0), (2.5, 0), (3.5, 1), (3.5, 3), (2.5, 4), (1, 4), (0, 3), (0, 1), (1, 0)),)),
    "p": (
        3.5,
        (((0, 4), (0, -2)), ((0, 3.2), (1, 4), (2.5, 4), (3.5, 3), (3.5, 1), (2.5, 0), (1, 0), (0, 0.8))),
    ),
    "q": (
        3.5,
        (((3.5, 4), (3.5, -2)), ((3.5, 3.2), (2.5, 4), (1, 4), (0, 3), (0, 1), (1, 0), (2.5, 0), (3.5, 0.8))),
    ),
    "r": (3, (((0, 0), (0, 4)), ((0, 2.8), (1, 4), (2.4, 4), (3, 3.4)))),
    "s": (
        3.5,
        (((3.3, 3.4), (2.5, 4), (1, 4), (0.2, 3.3), (1, 2.2), (2.5, 1.8), (3.3, 1), (2.5, 0), (1, 0), (0.2, 0.6)),),
    ),
    "t": (3, (((1, 6), (1, 1), (2, 0), (3, 0.4)), ((0, 4), (2.5, 4)))),
    "u": (3.5, (((0, 4), (0, 1), (1, 0), (2.5, 0), (3.5, 1)), ((3.5, 4), (3.5, 0)))),
    "v": (3.5, (((0, 4), (1.75, 0), (3.5, 4)),)),
    "w": (4.6, (((0, 4), (1.1, 0), (2.3, 3), (3.5, 0), (4.6, 4)),)),
    "x": (3.5, (((0, 0), (3.5, 4)), ((0, 4), (3.5, 0)))),
    "y": (3.5, (((0, 4), (1.75, 0.4)), ((3.5, 4), (1, -2), (0.2, -2)))),
    "z": (3.5, (((0, 4), (3.5, 4), (0, 0), (3.5, 0)),)),
    "°": (2.8, (_circle(1.4, 5.0, 0.8),)),
    "%": (4.4, (((0, 0), (4.4, 6)), _circle(1.0, 5.0, 0.9), _circle(3.4, 1.0, 0.9))),
    "μ": (3.5, (((0, 4), (0, -2)), ((0, 1), (1, 0), (2.5, 0), (3.5, 1)), ((3.5, 4), (3.5, 0)))),
    "Ω": (
        4.2,
        (
            (
                (0.2, 0),
                (1.5, 0),
                (1.5, 0.9),
                (0.7, 1.8),
                (0.5, 3.4),
                (1.3, 5.4),
                (2.1, 5.9),
                (2.9, 5.4),
                (3.7, 3.4),
                (3.5, 1.8),
                (2.7, 0.9),
                (2.7, 0),
                (4.0, 0),
            ),
        ),
    ),
    "·": (1.2, (((0.5, 2.7), (0.7, 2.9)),)),
    "/": (2.6, (((0, -0.4), (2.6, 6)),)),
    ".": (1.2, (((0.5, 0), (0.6, 0.25)),)),
    ",": (1.2, (((0.6, 0.5), (0.3, -0.8)),)),
    ":": (1.2, (((0.5, 0.5), (0.5, 0.9)), ((0.5, 3.3), (0.5, 3.7)))),
    "-": (2.8, (((0, 2.6), (2.8, 2.6)),)),
    "+": (2.8, (((0, 2.6), (2.8, 2.6)), ((1.4, 1.2), (1.4, 4.0)))),
    "(": (1.8, (((1.5, 6.4), (0.6, 5), (0.3, 3), (0.6, 1), (1.5, -0.4)),)),
    ")": (1.8, (((0.3, 6.4), (1.2, 5), (1.5, 3), (1.2, 1), (0.3, -0.4)),)),
}

# Unicode aliases so both encodings of a symbol draw the same glyph.
_GLYPHS["µ"] = _GLYPHS["μ"]  # micro sign -> greek mu
_GLYPHS["Ω"] = _GLYPHS["Ω"]  # ohm sign -> greek omega


def glyph(char: str) -> tuple[float, tuple]:
    try:
        return _GLYPHS[char]
    except KeyError:
        raise FontCoverageError(char) from None


def covered(char: str) -> bool:
    return char in _GLYPHS


def char_advance(char: str) -> float:
    """Advance in glyph units; the documented advance table is _GLYPHS."""
    return glyph(char)[0] + SPACING


def text_advance(text: str, size: float) -> float:
    """Total advance of a string in pixels at the given cap height."""
    return sum(char_advance(c) for c in text) * (size / GRID)


def layout_text(
    text: str,
    x: float,
    y: float,
    size: float,
    align: str = "center",
    rotation: float = 0.0,
) -> list[tuple[float, float, float, float]]:
    """Resolve a string to stroke segments (x0, y0, x1, y1) in pixels.

    The anchor (x, y) sits on the baseline; align picks which end of the
    string it pins. Rotation turns the whole run clockwise about the anchor.
    """
    s = size / GRID
    total = text_advance(text, size)
    if align == "center":
        cursor = -total / 2.0
    elif align == "right":
        cursor = -total
    elif align == "left":
        cursor = 0.0
    else:
        raise ValueError(f"unknown align {align!r}")
    cos_r = math.cos(rotation)
    sin_r = math.sin(rotation)
    segs: list[tuple[float, float, float, float]] = []
    for char in text:
        width, strokes = glyph(char)
        for line in strokes:
            for (ax, ay), (bx, by) in zip(line, line[1:]):
                pts = []
                for gx, gy in ((ax, ay), (bx, by)):
                    dx = cursor + gx * s
                    dy = -gy * s
                    if rotation:
                        dx, dy = dx * cos_r - dy * sin_r, dx * sin_r + dy * cos_r
                    pts.append((x + dx, y + dy))
                segs.append((pts[0][0], pts[0][1], pts[1][0], pts[1][1]))
        cursor += (width + SPACING) * s
    return segs
