"""Pure-Python integration kernels.

Line-for-line twin of ``_core.pyx``: a Dormand–Prince 5(4) pair with a
stiffness guard that hands over to implicit midpoint (damped Newton,
step-doubling error control), dense output, and section/chart events.
"""
import math

# DOPRI5 tableau
A21 = 1.0 / 5
A31, A32 = 3.0 / 40, 9.0 / 40
A41, A42, A43 = 44.0 / 45, -56.0 / 15, 32.0 / 9
A51, A52, A53, A54 = 19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729
A61, A62, A63, A64, A65 = 9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656
B1, B3, B4, B5, B6 = 35.0 / 384, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84
E1, E3, E4, E5, E6, E7 = (-71.0 / 57600, 71.0 / 16695, -71.0 / 1920, 17253.0 / 339200,
                          -22.0 / 525, 1.0 / 40)
# dense output coefficients, rows per stage, columns per power of theta
P = (
    (1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933, 87487479700.0 / 32700410799),
    (0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072),
    (0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408, 701980252875.0 / 199316789632),
    (0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844),
    (0.0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423),
)

STATUS_TIME_END, STATUS_SECTION, STATUS_CHART, STATUS_FAILURE = 0, 1, 2, 3
EVENT_TOL = 1e-12
MAX_STACK = 64


def eval_program(ops, args, consts, x, y, eps):
    """Evaluate a stack program on dual numbers; returns (value, d/dx, d/dy)."""
    sv = [0.0] * MAX_STACK
    sx = [0.0] * MAX_STACK
    sy = [0.0] * MAX_STACK
    sp = 0
    try:
        for i in range(len(ops)):
            op = ops[i]
            if op == 0:
                sv[sp] = consts[args[i]]
                sx[sp] = 0.0
                sy[sp] = 0.0
                sp += 1
            elif op == 1:
                a = args[i]
                if a == 0:
                    sv[sp], sx[sp], sy[sp] = x, 1.0, 0.0
                elif a == 1:
                    sv[sp], sx[sp], sy[sp] = y, 0.0, 1.0
                else:
                    sv[sp], sx[sp], sy[sp] = eps, 0.0, 0.0
                sp += 1
            elif op == 2:
                sp -= 1
                sv[sp - 1] += sv[sp]
                sx[sp - 1] += sx[sp]
                sy[sp - 1] += sy[sp]
            elif op == 3:
                sp -= 1
                sv[sp - 1] -= sv[sp]
                sx[sp - 1] -= sx[sp]
                sy[sp - 1] -= sy[sp]
            elif op == 4:
                sp -= 1
                a, b = sv[sp - 1], sv[sp]
                sx[sp - 1] = sx[sp - 1] * b + a * sx[sp]
                sy[sp - 1] = sy[sp - 1] * b + a * sy[sp]
                sv[sp - 1] = a * b
            elif op == 5:
                sp -= 1
                b = sv[sp]
                q = sv[sp - 1] / b
                sx[sp - 1] = (sx[sp - 1] - q * sx[sp]) / b
                sy[sp - 1] = (sy[sp - 1] - q * sy[sp]) / b
                sv[sp - 1] = q
            elif op == 6:
                sv[sp - 1] = -sv[sp - 1]
                sx[sp - 1] = -sx[sp - 1]
                sy[sp - 1] = -sy[sp - 1]
            elif op == 7:
                n = args[i]
                v = sv[sp - 1]
                if n == 0:
                    sv[sp - 1], sx[sp - 1], sy[sp - 1] = 1.0, 0.0, 0.0
                else:
                    p = math.pow(v, n - 1)
                    sx[sp - 1] = n * p * sx[sp - 1]
                    sy[sp - 1] = n * p * sy[sp - 1]
                    sv[sp - 1] = p * v
            else:
                e = math.exp(sv[sp - 1])
                sx[sp - 1] = e * sx[sp - 1]
                sy[sp - 1] = e * sy[sp - 1]
                sv[sp - 1] = e
    except (ZeroDivisionError, OverflowError, ValueError):
        return math.nan, math.nan, math.nan
    return sv[0], sx[0], sy[0]


class _Field:
    def __init__(self, ops1, args1, ops2, args2, consts, eps, s1, s2):
        self.p1 = (list(ops1), list(args1))
        self.p2 = (list(ops2), list(args2))
        self.consts = list(consts)
        self.eps = eps
        self.s1 = s1
        self.s2 = s2
        self.nfev = 0

    def rhs(self, x, y):
        self.nfev += 1
        a = eval_program(self.p1[0], self.p1[1], self.consts, x, y, self.eps)
        b = eval_program(self.p2[0], self.p2[1], self.consts, x, y, self.eps)
        return self.s1 * a[0], self.s2 * b[0]

    def rhs_jac(self, x, y):
        self.nfev += 1
        a = eval_program(self.p1[0], self.p1[1], self.consts, x, y, self.eps)
        b = eval_program(self.p2[0], self.p2[1], self.consts, x, y, self.eps)
        return (self.s1 * a[0], self.s2 * b[0],
                self.s1 * a[1], self.s1 * a[2], self.s2 * b[1], self.s2 * b[2])


def _finite(*vals):
    for v in vals:
        if not math.isfinite(v):
            return False
    return True


def _err_norm(ex, ey, x0, y0, x1, y1, rtol, atol):
    sx = atol + rtol * max(abs(x0), abs(x1))
    sy = atol + rtol * max(abs(y0), abs(y1))
    return math.sqrt(0.5 * ((ex / sx) ** 2 + (ey / sy) ** 2))


def _midpoint(fld, x, y, h, rtol, atol):
    """One implicit-midpoint step by damped Newton; returns (ok, x1, y1)."""
    X, Y = x, y
    for _ in range(30):
        mx, my = 0.5 * (x + X), 0.5 * (y + Y)
        f1, f2, j11, j12, j21, j22 = fld.rhs_jac(mx, my)
        if not _finite(f1, f2, j11, j12, j21, j22):
            return False, X, Y
        g1 = X - x - h * f1
        g2 = Y - y - h * f2
        m11, m12 = 1.0 - 0.5 * h * j11, -0.5 * h * j12
        m21, m22 = -0.5 * h * j21, 1.0 - 0.5 * h * j22
        det = m11 * m22 - m12 * m21
        if det == 0.0 or not math.isfinite(det):
            return False, X, Y
        dx = (m22 * g1 - m12 * g2) / det
        dy = (m11 * g2 - m21 * g1) / det
        gnorm = math.hypot(g1, g2)
        lam = 1.0
        for _ in range(12):
            Xn, Yn = X - lam * dx, Y - lam * dy
            f1n, f2n = fld.rhs(0.5 * (x + Xn), 0.5 * (y + Yn))
            if _finite(f1n, f2n):
                gn = math.hypot(Xn - x - h * f1n, Yn - y - h * f2n)
                if gn < gnorm or gn == 0.0:
                    break
            lam *= 0.5
        X, Y = Xn, Yn
        step = math.sqrt(0.5 * ((lam * dx / (atol + rtol * abs(X))) ** 2
                                + (lam * dy / (atol + rtol * abs(Y))) ** 2))
        if step < 1e-6:
            return True, X, Y
    return False, X, Y


def _dopri_dense(x, y, h, kx, ky, th):
    t2 = th * th
    t3 = t2 * th
    t4 = t3 * th
    sx = 0.0
    sy = 0.0
    for i in range(7):
        w = P[i][0] * th + P[i][1] * t2 + P[i][2] * t3 + P[i][3] * t4
        sx += kx[i] * w
        sy += ky[i] * w
    return x + h * sx, y + h * sy


def _hermite(x0, y0, fx0, fy0, x1, y1, fx1, fy1, h, th):
    h00 = (1 + 2 * th) * (1 - th) ** 2
    h10 = th * (1 - th) ** 2
    h01 = th * th * (3 - 2 * th)
    h11 = th * th * (th - 1)
    return (h00 * x0 + h10 * h * fx0 + h01 * x1 + h11 * h * fx1,
            h00 * y0 + h10 * h * fy0 + h01 * y1 + h11 * h * fy1)


class _Dense:
    def __init__(self, kind, data):
        self.kind = kind
        self.data = data

    def __call__(self, th):
        if self.kind == 0:
            return _dopri_dense(*self.data, th)
        return _hermite(*self.data, th)


def _locate(dense, coord, level, s0):
    """Bisection in theta for coordinate(theta) = level, starting from sign s0."""
    lo, hi = 0.0, 1.0
    th = 1.0
    px, py = dense(1.0)
    for _ in range(200):
        th = 0.5 * (lo + hi)
        px, py = dense(th)
        v = (px if coord == 0 else py) - level
        if abs(v) < EVENT_TOL:
            break
        if (v > 0) == (s0 > 0):
            lo = th
        else:
            hi = th
        if hi - lo < 1e-17:
            break
    return th, px, py


def integrate(ops1, args1, ops2, args2, consts, eps, s1, s2, x0, y0, t_end, rtol, atol, h0,
              max_steps, ev_kind, ev_c, ev_lo, ev_hi, chart_on, chart_lo, chart_hi,
              stiff_h, stiff_count, record):
    fld = _Field(ops1, args1, ops2, args2, consts, eps, s1, s2)
    ts, xs, ys = [0.0], [x0], [y0]
    t, x, y = 0.0, x0, y0
    status = STATUS_TIME_END
    n_acc = n_rej = 0
    implicit = 0
    small = 0
    kx = [0.0] * 7
    ky = [0.0] * 7
    kx[0], ky[0] = fld.rhs(x, y)
    if not _finite(kx[0], ky[0]):
        return ts, xs, ys, STATUS_FAILURE, 0, 0, 0
    h = h0
    if h <= 0.0:
        d0 = math.sqrt(0.5 * ((x / (atol + rtol * abs(x))) ** 2 + (y / (atol + rtol * abs(y))) ** 2))
        d1 = math.sqrt(0.5 * ((kx[0] / (atol + rtol * abs(x))) ** 2 + (ky[0] / (atol + rtol * abs(y))) ** 2))
        h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h = min(h, t_end)
    while True:
        if t >= t_end:
            status = STATUS_TIME_END
            break
        if n_acc >= max_steps:
            status = STATUS_FAILURE
            break
        if t + h > t_end:
            h = t_end - t
        if h <= 1e-15 * max(1.0, abs(t)):
            status = STATUS_FAILURE
            break
        if not implicit:
            if h < stiff_h:
                small += 1
                if small >= stiff_count:
                    implicit = 1
                    continue
            else:
                small = 0
            k1x, k1y = kx[0], ky[0]
            k2x, k2y = fld.rhs(x + h * A21 * k1x, y + h * A21 * k1y)
            k3x, k3y = fld.rhs(x + h * (A31 * k1x + A32 * k2x), y + h * (A31 * k1y + A32 * k2y))
            k4x, k4y = fld.rhs(x + h * (A41 * k1x + A42 * k2x + A43 * k3x),
                               y + h * (A41 * k1y + A42 * k2y + A43 * k3y))
            k5x, k5y = fld.rhs(x + h * (A51 * k1x + A52 * k2x + A53 * k3x + A54 * k4x),
                               y + h * (A51 * k1y + A52 * k2y + A53 * k3y + A54 * k4y))
            k6x, k6y = fld.rhs(x + h * (A61 * k1x + A62 * k2x + A63 * k3x + A64 * k4x + A65 * k5x),
                               y + h * (A61 * k1y + A62 * k2y + A63 * k3y + A64 * k4y + A65 * k5y))
            xn = x + h * (B1 * k1x + B3 * k3x + B4 * k4x + B5 * k5x + B6 * k6x)
            yn = y + h * (B1 * k1y + B3 * k3y + B4 * k4y + B5 * k5y + B6 * k6y)
            k7x, k7y = fld.rhs(xn, yn)
            if not _finite(k2x, k2y, k3x, k3y, k4x, k4y, k5x, k5y, k6x, k6y, xn, yn, k7x, k7y):
                n_rej += 1
                h *= 0.25
                continue
            ex = h * (E1 * k1x + E3 * k3x + E4 * k4x + E5 * k5x + E6 * k6x + E7 * k7x)
            ey = h * (E1 * k1y + E3 * k3y + E4 * k4y + E5 * k5y + E6 * k6y + E7 * k7y)
            err = _err_norm(ex, ey, x, y, xn, yn, rtol, atol)
            if err > 1.0:
                n_rej += 1
                h *= max(0.2, 0.9 * err ** -0.2)
                continue
            dense = _Dense(0, (x, y, h, [k1x, k2x, k3x, k4x, k5x, k6x, k7x],
                               [k1y, k2y, k3y, k4y, k5y, k6y, k7y]))
            h_next = h * (10.0 if err == 0.0 else min(10.0, max(0.2, 0.9 * err ** -0.2)))
            f_new = (k7x, k7y)
        else:
            ok1, xf, yf = _midpoint(fld, x, y, h, rtol, atol)
            ok2, xm, ym = _midpoint(fld, x, y, 0.5 * h, rtol, atol) if ok1 else (False, x, y)
            ok3, xn, yn = _midpoint(fld, xm, ym, 0.5 * h, rtol, atol) if ok2 else (False, x, y)
            if not ok3:
                n_rej += 1
                h *= 0.5
                continue
            f_new = fld.rhs(xn, yn)
            if not _finite(xn, yn, f_new[0], f_new[1]):
                n_rej += 1
                h *= 0.5
                continue
            err = _err_norm((xn - xf) / 3.0, (yn - yf) / 3.0, x, y, xn, yn, rtol, atol)
            if err > 1.0:
                n_rej += 1
                h *= max(0.2, 0.9 * err ** (-1.0 / 3.0))
                continue
            dense = _Dense(1, (x, y, kx[0], ky[0], xn, yn, f_new[0], f_new[1], h))
            h_next = h * (5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** (-1.0 / 3.0))))

        # events inside the accepted step
        best = 2.0
        ev_status = -1
        ex_x = ex_y = 0.0
        if chart_on and (xn < chart_lo or xn > chart_hi):
            bound = chart_hi if xn > chart_hi else chart_lo
            th, px, py = _locate(dense, 0, bound, x - bound)
            best, ev_status, ex_x, ex_y = th, STATUS_CHART, px, py
        if ev_kind:
            coord = 0 if ev_kind == 1 else 1
            s_old = (x if coord == 0 else y) - ev_c
            s_new = (xn if coord == 0 else yn) - ev_c
            if s_old != 0.0 and (s_new == 0.0 or (s_new > 0) != (s_old > 0)):
                th, px, py = _locate(dense, coord, ev_c, s_old)
                free = py if coord == 0 else px
                if ev_lo <= free <= ev_hi and th <= best:
                    best, ev_status, ex_x, ex_y = th, STATUS_SECTION, px, py
        n_acc += 1
        if ev_status >= 0:
            t = t + best * h
            ts.append(t)
            xs.append(ex_x)
            ys.append(ex_y)
            status = ev_status
            break
        t = t + h
        x, y = xn, yn
        kx[0], ky[0] = f_new
        if record:
            ts.append(t)
            xs.append(x)
            ys.append(y)
        h = h_next
    if not record and (ts[-1] != t or len(ts) == 1) and status != STATUS_SECTION and status != STATUS_CHART:
        ts.append(t)
        xs.append(x)
        ys.append(y)
    return ts, xs, ys, status, n_acc, n_rej, implicit
