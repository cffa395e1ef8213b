#!/usr/bin/env python3
"""Regenerates the frozen reference values quoted in tests/.

Everything is evaluated with mpmath at 30 significant digits through
formulas kept deliberately independent of the C++ code paths: the profile
slope factor is stabilized with expm1/log1p instead of the library's series
window, heights use a sin^2 substitution of the integrand, and the critical
points come from bisection on a high-precision finite-difference slope
rather than the library's bracketed solver.

Run:  python3 tools/make_reference_values.py   (takes a couple of minutes;
the critical-point section dominates)
"""
from mpmath import (mp, mpf, quad, sin, cos, sqrt, pi, gamma, asin, expm1,
                    log1p)

mp.dps = 30


def q_factor(t, n):
    t = mpf(t)
    if t == 1:
        return mpf(n - 1) / n
    return (1 - t**(n - 1)) / (1 - t**n)


def shape(xt, delta, t, n):
    """Profile slope shape at radius coordinate xt, with delta = 1 - xt
    passed separately so the endpoints stay fully accurate."""
    t = mpf(t)
    if t == 1:
        return sqrt((n - 1) * xt * delta)
    eps = 1 - t
    q = q_factor(t, n)
    if xt <= mpf('0.5'):
        lny = log1p(-eps * xt)
        e1 = expm1((n - 1) * lny)
        e2 = expm1(n * lny)
        amb = e1 - q * e2
    else:
        l1p = log1p(eps * delta / t)
        s1 = expm1((n - 1) * l1p)
        s2 = expm1(n * l1p)
        tn1 = t**(n - 1)
        tn = tn1 * t
        amb = tn1 * s1 - q * tn * s2
        e1 = tn1 * (1 + s1) - 1
        e2 = tn * (1 + s2) - 1
    b = 1 + q * e2
    apb = 2 + e1 + q * e2
    return sqrt(amb * apb / (b * b)) / abs(eps)


def height(x, t, n):
    """Height of the profile above radius coordinate x (the integral of the
    reciprocal shape over (x, 1), substituted xt = x + (1-x) sin^2 th)."""
    x = mpf(x)

    def f(th):
        s = sin(th)
        c = cos(th)
        return 2 * (1 - x) * s * c / shape(x + (1 - x) * s * s,
                                           (1 - x) * c * c, t, n)
    return quad(f, [0, pi / 2])


def span(t, n):
    return height(0, t, n)


def ball(m):
    return pi**(mpf(m) / 2) / gamma(mpf(m) / 2 + 1)


def geom_integral(t, n, kind):
    t = mpf(t)

    def f(th):
        s = sin(th)
        c = cos(th)
        r = shape(s * s, c * c, t, n)
        y = 1 - (1 - t) * s * s
        if kind == 'volume':
            return 2 * s * c * y**n / r
        return 2 * s * c * y**(n - 1) * sqrt(1 / (r * r) + (1 - t)**2)
    return quad(f, [0, pi / 2])


def volume(t, n, d=1):
    p = span(t, n)
    return ball(n) * mpf(d)**(n + 1) / p**(n + 1) * geom_integral(t, n,
                                                                  'volume')


def lateral_area(t, n, d=1):
    p = span(t, n)
    return n * ball(n) * mpf(d)**n / p**n * geom_integral(t, n, 'area')


def curvature(t, n, d=1):
    return n * q_factor(t, n) * span(t, n) / d


def invariant(t, n):
    return curvature(t, n)**(n + 1) * volume(t, n)


def profile_point(z, r, t, n, d=1):
    """Two-parameter profile: radius and slope at height z for neck radius
    parameter r and period parameter t (bisection on the height map)."""
    z, r, t = mpf(z), mpf(r), mpf(t)
    y = q_factor(t, n) * span(t, n) * z / (q_factor(r, n) * d)
    lo, hi = mpf(0), mpf(1)
    for _ in range(110):
        mid = (lo + hi) / 2
        if height(mid, r, n) > y:
            lo = mid
        else:
            hi = mid
    x = (lo + hi) / 2
    u = q_factor(r, n) * d / (span(t, n) * q_factor(t, n)) * (1 - (1 - r) * x)
    uz = (1 - r) * shape(x, 1 - x, r, n)
    return u, uz


def show(label, value, digits=22):
    print(f"  {label:<34s} {mp.nstr(value, digits)}")


def main():
    print("== family: spans and heights (substituted quadrature) ==")
    show("span t=0.5  n=8", span('0.5', 8))
    show("span t=2    n=8", span(2, 8))
    show("span t=0.5  n=3", span('0.5', 3))
    show("height x=0.25 t=0.5  n=8", height('0.25', '0.5', 8))
    show("height x=0.6  t=0.25 n=11", height('0.6', '0.25', 11))
    show("span t=1 n=8 (closed pi/sqrt 7)", pi / sqrt(7))

    print("== family: slope shape ==")
    show("shape x=0.3  t=0.5 n=8", shape(mpf('0.3'), mpf('0.7'), '0.5', 8))
    show("shape x=0.85 t=0.5 n=8", shape(mpf('0.85'), mpf('0.15'), '0.5', 8))
    show("shape x=0.5  t=0.2 n=3", shape(mpf('0.5'), mpf('0.5'), '0.2', 3))
    for t in ('0.999901', '1.000099', '0.99988', '1.00012'):
        show(f"shape x=0.37 t={t} n=8",
             shape(mpf('0.37'), mpf('0.63'), t, 8))

    print("== family: two-parameter point (z=0.3, r=0.7, t=0.5, n=8) ==")
    # binary doubles on purpose: the C++ test passes these as double literals
    u, uz = profile_point(0.3, 0.7, 0.5, 8)
    show("radius", u)
    show("slope", uz)

    print("== geometry: t=0.5, n=8, d=1 ==")
    show("volume", volume('0.5', 8))
    show("lateral area", lateral_area('0.5', 8))
    show("mean curvature", curvature('0.5', 8))
    show("shape invariant", invariant('0.5', 8))
    show("cylinder radius t=1 (sqrt 7/pi)", sqrt(7) / pi)
    show("mean curvature t=1 (pi sqrt 7)", pi * sqrt(7))

    print("== calculus: volume-critical parameters, n=8 ==")
    mp.dps = 25
    h = mpf('1e-7')

    def slope(t):
        return (volume(t + h, 8) - volume(t - h, 8)) / (2 * h)

    grid = [mpf('0.02') + mpf('0.02') * i for i in range(49)]
    signs = [(t, slope(t)) for t in grid]
    for (ta, sa), (tb, sb) in zip(signs, signs[1:]):
        if sa * sb >= 0:
            continue
        lo, hi, flo = ta, tb, sa
        for _ in range(60):
            mid = (lo + hi) / 2
            fm = slope(mid)
            if fm * flo > 0:
                lo, flo = mid, fm
            else:
                hi = mid
        t0 = (lo + hi) / 2
        v2 = (volume(t0 + mpf('1e-4'), 8) - 2 * volume(t0, 8) +
              volume(t0 - mpf('1e-4'), 8)) / mpf('1e-8')
        e1 = (curvature(t0 + h, 8) - curvature(t0 - h, 8)) / (2 * h)
        show("t0", t0, 18)
        show("  volume curvature there", v2, 8)
        show("  mean-curvature slope there", e1, 8)

    print("== classification spot slopes ==")
    show("volume slope t=0.99 n=8", slope(mpf('0.99')), 8)

    def slope11(t):
        return (volume(t + h, 11) - volume(t - h, 11)) / (2 * h)
    show("volume slope t=0.99 n=11", slope11(mpf('0.99')), 8)


if __name__ == '__main__':
    main()
