import math

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI2 = (3 - math.sqrt(5)) / 2  # 1 / phi^2


def golden_max(f, lo, hi, tol=1e-12, max_iter=500):
    """Golden-section search for the maximum of a unimodal ``f`` on [lo, hi].

    Returns ``(x, f(x))`` for the best point seen, endpoints included.
    """
    lo, hi = min(lo, hi), max(lo, hi)
    best_x, best_y = lo, f(lo)
    y_hi = f(hi)
    if y_hi > best_y:
        best_x, best_y = hi, y_hi

    h = hi - lo
    c = lo + INV_PHI2 * h
    d = lo + INV_PHI * h
    yc, yd = f(c), f(d)
    for _ in range(max_iter):
        if h <= tol:
            break
        if yc > yd:
            hi, d, yd = d, c, yc
            h = INV_PHI * h
            c = lo + INV_PHI2 * h
            yc = f(c)
        else:
            lo, c, yc = c, d, yd
            h = INV_PHI * h
            d = lo + INV_PHI * h
            yd = f(d)

    for x, y in ((c, yc), (d, yd)):
        if y > best_y:
            best_x, best_y = x, y
    return best_x, best_y


def golden_min(f, lo, hi, tol=1e-12, max_iter=500):
    x, y = golden_max(lambda t: -f(t), lo, hi, tol=tol, max_iter=max_iter)
    return x, -y
