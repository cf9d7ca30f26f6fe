"""Integer frequency-combination labels over the five modulated elements."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

ELEMENTS = ("A", "B", "C", "E", "F")


@dataclass(frozen=True, order=True)
class CombinationLabel:
    """Coefficients ``n_X`` of a combination frequency sum_X n_X f_X.

    Stored in canonical sign: the realized frequency for the owning config is
    non-negative, and a label and its negation are the same label.
    """

    coefficients: tuple

    @property
    def order(self):
        """Sum of |n_X|: the lowest amplitude order that can produce it."""
        return int(sum(abs(n) for n in self.coefficients))

    def coefficient(self, element):
        return self.coefficients[ELEMENTS.index(element)]

    @property
    def path(self):
        n = dict(zip(ELEMENTS, self.coefficients))
        if n["A"] == n["B"] == n["E"] == n["F"] == 0:
            return "C"
        if n["C"] == 0 and n["B"] == 0 and n["A"] != 0:
            return "A-arm"
        if n["C"] == 0 and n["A"] == 0 and n["B"] != 0:
            return "B-arm"
        if n["A"] == n["B"] == n["C"] == 0:
            return "common"
        return "mixed"

    def uses_only(self, elements):
        return all(n == 0 or x in elements for x, n in zip(ELEMENTS, self.coefficients))

    def frequency(self, freqs):
        return abs(int(np.dot(self.coefficients, freqs)))

    def render(self):
        """Canonical text form, e.g. ``1*fA + 2*fE`` or ``2*fB - 1*fA``."""
        parts = []
        for x, n in zip(ELEMENTS, self.coefficients):
            if n == 0:
                continue
            sign = "-" if n < 0 else "+"
            parts.append((sign, f"{abs(n)}*f{x}"))
        if not parts:
            return "0"
        text = parts[0][1] if parts[0][0] == "+" else "-" + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self):
        return self.render()


def canonical(coefficients, freqs):
    """Return the label for ``coefficients`` with non-negative realized frequency.

    For zero realized frequency the first nonzero coefficient is made positive.
    """
    c = tuple(int(n) for n in coefficients)
    value = int(np.dot(c, freqs))
    if value < 0 or (value == 0 and next((n for n in c if n), 0) < 0):
        c = tuple(-n for n in c)
    return CombinationLabel(c)


def _vectors(slots, budget):
    if slots == 0:
        yield ()
        return
    for n in range(-budget, budget + 1):
        for rest in _vectors(slots - 1, budget - abs(n)):
            yield (n,) + rest


@lru_cache(maxsize=64)
def _enumerate(freqs, max_order, allowed):
    active = [x in allowed for x in ELEMENTS]
    seen = set()
    for v in _vectors(sum(active), max_order):
        if not any(v):
            continue
        it = iter(v)
        c = tuple(next(it) if a else 0 for a in active)
        seen.add(canonical(c, freqs))
    return tuple(sorted(seen, key=lambda lab: (lab.order, lab.frequency(freqs), lab.coefficients)))


def enumerate_labels(freqs, max_order, allowed=ELEMENTS):
    """All distinct labels with 1 <= sum |n_X| <= max_order over ``allowed``."""
    return list(_enumerate(tuple(int(f) for f in freqs), int(max_order), tuple(allowed)))


def path_labels(freqs, max_order):
    """Labels with the path structure of the phase variant (C-only, A-arm, B-arm)."""
    return [
        lab
        for lab in enumerate_labels(freqs, max_order)
        if lab.path in ("C", "A-arm", "B-arm")
    ]


def parse_label(text):
    """Inverse of :meth:`CombinationLabel.render` (canonical sign not enforced)."""
    coeffs = dict.fromkeys(ELEMENTS, 0)
    tokens = text.replace("-", " - ").replace("+", " + ").split()
    sign = 1
    for tok in tokens:
        if tok in "+-":
            sign = -1 if tok == "-" else 1
            continue
        n, name = tok.split("*f")
        coeffs[name] += sign * int(n)
        sign = 1
    return CombinationLabel(tuple(coeffs[x] for x in ELEMENTS))
