"""Shared fixtures: the running 4-element example, its golden volume, and
the hand-built intermediate polynomials of the deletion pipeline."""

from __future__ import annotations

from fractions import Fraction

import pytest

from mixedvol import Matroid, RationalPoly


def x(*lab) -> RationalPoly:
    return RationalPoly.variable(tuple(lab))


@pytest.fixture(scope="session")
def ex_matroid() -> Matroid:
    """Rank 3 on {1,2,3,4}: the triangle {1,2,3} (any two of them span)
    plus the coloop 4.  Nontrivial flats: 1, 2, 3, 4, 14, 24, 34, 123."""
    return Matroid.from_bases([1, 2, 3, 4], [[1, 2, 4], [1, 3, 4], [2, 3, 4]])


@pytest.fixture(scope="session")
def ex_volume() -> RationalPoly:
    """-(x1^2+x2^2+x3^2+2 x4^2+x14^2+x24^2+x34^2+x123^2)/2
    + x4(x14+x24+x34) + x123(x1+x2+x3) + x1 x14 + x2 x24 + x3 x34."""
    half = Fraction(1, 2)
    p = RationalPoly.zero()
    for lab in [(1,), (2,), (3,), (1, 4), (2, 4), (3, 4), (1, 2, 3)]:
        p = p - x(*lab) * x(*lab) * half
    p = p - x(4) * x(4)
    p = p + x(4) * (x(1, 4) + x(2, 4) + x(3, 4))
    p = p + x(1, 2, 3) * (x(1) + x(2) + x(3))
    p = p + x(1) * x(1, 4) + x(2) * x(2, 4) + x(3) * x(3, 4)
    return p


@pytest.fixture(scope="session")
def boolean3_volume() -> RationalPoly:
    """Volume of the Boolean matroid on {1, 2, 4}:
    -(x1^2+x2^2+x4^2+x12^2+x14^2+x24^2)/2 + x1(x12+x14) + x2(x12+x24)
    + x4(x14+x24)."""
    half = Fraction(1, 2)
    p = RationalPoly.zero()
    for lab in [(1,), (2,), (4,), (1, 2), (1, 4), (2, 4)]:
        p = p - x(*lab) * x(*lab) * half
    p = p + x(1) * (x(1, 2) + x(1, 4))
    p = p + x(2) * (x(1, 2) + x(2, 4))
    p = p + x(4) * (x(1, 4) + x(2, 4))
    return p


@pytest.fixture(scope="session")
def delta3_volume() -> RationalPoly:
    """The coloop lift of x1+x2+x3 for i=4 on the running example:
    x4(x1+x2+x3+x4/2) + x123(x1+x2+x3-x123/2)."""
    half = Fraction(1, 2)
    s = x(1) + x(2) + x(3)
    return x(4) * (s + x(4) * half) + x(1, 2, 3) * (s - x(1, 2, 3) * half)
