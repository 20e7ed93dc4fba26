# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled integration kernels; same API and algorithm as ``_core_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, pow, sqrt, fabs, hypot, isfinite, NAN
from libc.stdlib cimport malloc, realloc, free

cnp.import_array()

cdef enum:
    MAX_STACK = 64

cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176
cdef double A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = -71.0 / 57600, E3 = 71.0 / 16695, E4 = -71.0 / 1920, E5 = 17253.0 / 339200
cdef double E6 = -22.0 / 525, E7 = 1.0 / 40
cdef double P[7][4]
_P_ROWS = (
    (1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933, 87487479700.0 / 32700410799),
    (0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072),
    (0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408, 701980252875.0 / 199316789632),
    (0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844),
    (0.0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423),
)
for _i in range(7):
    for _j in range(4):
        P[_i][_j] = _P_ROWS[_i][_j]

cdef double EVENT_TOL = 1e-12


cdef struct Prog:
    const int *ops
    const int *args
    int n


cdef struct Field:
    Prog p1
    Prog p2
    const double *consts
    double eps
    double s1
    double s2


cdef struct Dense:
    int kind
    double x, y, h
    double kx[7]
    double ky[7]
    double x1, y1, fx0, fy0, fx1, fy1


cdef void run(Prog p, const double *consts, double x, double y, double eps,
              double *out) noexcept nogil:
    cdef double sv[MAX_STACK]
    cdef double sx[MAX_STACK]
    cdef double sy[MAX_STACK]
    cdef int sp = 0, i, op, a, n
    cdef double u, b, q, v, pw, e
    for i in range(p.n):
        op = p.ops[i]
        if op == 0:
            sv[sp] = consts[p.args[i]]
            sx[sp] = 0.0
            sy[sp] = 0.0
            sp += 1
        elif op == 1:
            a = p.args[i]
            if a == 0:
                sv[sp] = x; sx[sp] = 1.0; sy[sp] = 0.0
            elif a == 1:
                sv[sp] = y; sx[sp] = 0.0; sy[sp] = 1.0
            else:
                sv[sp] = eps; sx[sp] = 0.0; sy[sp] = 0.0
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
            u = sv[sp - 1]
            b = sv[sp]
            sx[sp - 1] = sx[sp - 1] * b + u * sx[sp]
            sy[sp - 1] = sy[sp - 1] * b + u * sy[sp]
            sv[sp - 1] = u * b
        elif op == 5:
            sp -= 1
            b = sv[sp]
            if b == 0.0:
                out[0] = NAN; out[1] = NAN; out[2] = NAN
                return
            q = sv[sp - 1] / b
            sx[sp - 1] = (sx[sp - 1] - q * sx[sp]) / b
            sy[sp - 1] = (sy[sp - 1] - q * sy[sp]) / b
            sv[sp - 1] = q
        elif op == 6:
            sv[sp - 1] = -sv[sp - 1]
            sx[sp - 1] = -sx[sp - 1]
            sy[sp - 1] = -sy[sp - 1]
        elif op == 7:
            n = p.args[i]
            v = sv[sp - 1]
            if n == 0:
                sv[sp - 1] = 1.0; sx[sp - 1] = 0.0; sy[sp - 1] = 0.0
            else:
                if v == 0.0 and n < 1:
                    out[0] = NAN; out[1] = NAN; out[2] = NAN
                    return
                pw = pow(v, <double>(n - 1))
                sx[sp - 1] = n * pw * sx[sp - 1]
                sy[sp - 1] = n * pw * sy[sp - 1]
                sv[sp - 1] = pw * v
        else:
            e = exp(sv[sp - 1])
            sx[sp - 1] = e * sx[sp - 1]
            sy[sp - 1] = e * sy[sp - 1]
            sv[sp - 1] = e
    out[0] = sv[0]
    out[1] = sx[0]
    out[2] = sy[0]


def eval_program(ops, args, consts, double x, double y, double eps):
    """Evaluate a stack program on dual numbers; returns (value, d/dx, d/dy)."""
    cdef int[::1] o = np.ascontiguousarray(ops, dtype=np.int32)
    cdef int[::1] a = np.ascontiguousarray(args, dtype=np.int32)
    cdef double[::1] c = np.ascontiguousarray(consts, dtype=np.float64)
    cdef Prog p
    cdef double out[3]
    p.ops = &o[0] if o.shape[0] else NULL
    p.args = &a[0] if a.shape[0] else NULL
    p.n = o.shape[0]
    run(p, &c[0], x, y, eps, out)
    return out[0], out[1], out[2]


cdef inline void rhs(Field *f, double x, double y, double *fx, double *fy) noexcept nogil:
    cdef double a[3]
    cdef double b[3]
    run(f.p1, f.consts, x, y, f.eps, a)
    run(f.p2, f.consts, x, y, f.eps, b)
    fx[0] = f.s1 * a[0]
    fy[0] = f.s2 * b[0]


cdef inline void rhs_jac(Field *f, double x, double y, double *out) noexcept nogil:
    cdef double a[3]
    cdef double b[3]
    run(f.p1, f.consts, x, y, f.eps, a)
    run(f.p2, f.consts, x, y, f.eps, b)
    out[0] = f.s1 * a[0]
    out[1] = f.s2 * b[0]
    out[2] = f.s1 * a[1]
    out[3] = f.s1 * a[2]
    out[4] = f.s2 * b[1]
    out[5] = f.s2 * b[2]


cdef inline double err_norm(double ex, double ey, double x0, double y0, double x1, double y1,
                            double rtol, double atol) noexcept nogil:
    cdef double sx = atol + rtol * max(fabs(x0), fabs(x1))
    cdef double sy = atol + rtol * max(fabs(y0), fabs(y1))
    return sqrt(0.5 * ((ex / sx) * (ex / sx) + (ey / sy) * (ey / sy)))


cdef int midpoint(Field *f, double x, double y, double h, double rtol, double atol,
                  double *X, double *Y) noexcept nogil:
    cdef double j[6]
    cdef double g1, g2, m11, m12, m21, m22, det, dx, dy, gnorm, lam, Xn = x, Yn = y
    cdef double f1n, f2n, gn, step
    cdef int it, k
    X[0] = x
    Y[0] = y
    for it in range(30):
        rhs_jac(f, 0.5 * (x + X[0]), 0.5 * (y + Y[0]), j)
        for k in range(6):
            if not isfinite(j[k]):
                return 0
        g1 = X[0] - x - h * j[0]
        g2 = Y[0] - y - h * j[1]
        m11 = 1.0 - 0.5 * h * j[2]
        m12 = -0.5 * h * j[3]
        m21 = -0.5 * h * j[4]
        m22 = 1.0 - 0.5 * h * j[5]
        det = m11 * m22 - m12 * m21
        if det == 0.0 or not isfinite(det):
            return 0
        dx = (m22 * g1 - m12 * g2) / det
        dy = (m11 * g2 - m21 * g1) / det
        gnorm = hypot(g1, g2)
        lam = 1.0
        for k in range(12):
            Xn = X[0] - lam * dx
            Yn = Y[0] - lam * dy
            rhs(f, 0.5 * (x + Xn), 0.5 * (y + Yn), &f1n, &f2n)
            if isfinite(f1n) and isfinite(f2n):
                gn = hypot(Xn - x - h * f1n, Yn - y - h * f2n)
                if gn < gnorm or gn == 0.0:
                    break
            lam *= 0.5
        X[0] = Xn
        Y[0] = Yn
        step = sqrt(0.5 * ((lam * dx / (atol + rtol * fabs(Xn))) ** 2
                           + (lam * dy / (atol + rtol * fabs(Yn))) ** 2))
        if step < 1e-6:
            return 1
    return 0


cdef void dense_eval(Dense *d, double th, double *px, double *py) noexcept nogil:
    cdef double t2, t3, t4, sx = 0.0, sy = 0.0, w
    cdef double h00, h10, h01, h11
    cdef int i
    if d.kind == 0:
        t2 = th * th
        t3 = t2 * th
        t4 = t3 * th
        for i in range(7):
            w = P[i][0] * th + P[i][1] * t2 + P[i][2] * t3 + P[i][3] * t4
            sx += d.kx[i] * w
            sy += d.ky[i] * w
        px[0] = d.x + d.h * sx
        py[0] = d.y + d.h * sy
    else:
        h00 = (1 + 2 * th) * (1 - th) * (1 - th)
        h10 = th * (1 - th) * (1 - th)
        h01 = th * th * (3 - 2 * th)
        h11 = th * th * (th - 1)
        px[0] = h00 * d.x + h10 * d.h * d.fx0 + h01 * d.x1 + h11 * d.h * d.fx1
        py[0] = h00 * d.y + h10 * d.h * d.fy0 + h01 * d.y1 + h11 * d.h * d.fy1


cdef double locate(Dense *d, int coord, double level, double s0,
                   double *px, double *py) noexcept nogil:
    cdef double lo = 0.0, hi = 1.0, th = 1.0, v
    cdef int it
    dense_eval(d, 1.0, px, py)
    for it in range(200):
        th = 0.5 * (lo + hi)
        dense_eval(d, th, px, py)
        v = (px[0] if coord == 0 else py[0]) - level
        if fabs(v) < EVENT_TOL:
            break
        if (v > 0) == (s0 > 0):
            lo = th
        else:
            hi = th
        if hi - lo < 1e-17:
            break
    return th


cdef struct Buf:
    double *t
    double *x
    double *y
    Py_ssize_t n
    Py_ssize_t cap


cdef int push(Buf *b, double t, double x, double y) noexcept nogil:
    cdef Py_ssize_t cap
    cdef double *nt
    cdef double *nx
    cdef double *ny
    if b.n == b.cap:
        cap = 2 * b.cap
        nt = <double *> realloc(b.t, cap * sizeof(double))
        if nt == NULL:
            return 0
        b.t = nt
        nx = <double *> realloc(b.x, cap * sizeof(double))
        if nx == NULL:
            return 0
        b.x = nx
        ny = <double *> realloc(b.y, cap * sizeof(double))
        if ny == NULL:
            return 0
        b.y = ny
        b.cap = cap
    b.t[b.n] = t
    b.x[b.n] = x
    b.y[b.n] = y
    b.n += 1
    return 1


cdef int all_finite(double *v, int n) noexcept nogil:
    cdef int i
    for i in range(n):
        if not isfinite(v[i]):
            return 0
    return 1


cdef void core(Field *fld, Buf *buf, double x0, double y0, double t_end, double rtol,
               double atol, double h0, long max_steps, int ev_kind, double ev_c, double ev_lo,
               double ev_hi, int chart_on, double chart_lo, double chart_hi, double stiff_h,
               int stiff_count, int record, int *status, long *n_acc, long *n_rej,
               int *implicit) noexcept nogil:
    cdef double t = 0.0, x = x0, y = y0, h = h0, h_next = 0.0, err, xn = 0.0, yn = 0.0
    cdef double kx[7]
    cdef double ky[7]
    cdef double chk[14]
    cdef double d0, d1, sx, sy, ex, ey, xf, yf, xm, ym, fnx = 0.0, fny = 0.0
    cdef double best, ex_x, ex_y, bound, th, px, py, s_old, s_new, free
    cdef int small = 0, ev_status, coord, ok, i
    cdef Dense d
    status[0] = 0
    n_acc[0] = 0
    n_rej[0] = 0
    implicit[0] = 0
    rhs(fld, x, y, &kx[0], &ky[0])
    if not (isfinite(kx[0]) and isfinite(ky[0])):
        status[0] = 3
        return
    if h <= 0.0:
        sx = atol + rtol * fabs(x)
        sy = atol + rtol * fabs(y)
        d0 = sqrt(0.5 * ((x / sx) ** 2 + (y / sy) ** 2))
        d1 = sqrt(0.5 * ((kx[0] / sx) ** 2 + (ky[0] / sy) ** 2))
        h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h = min(h, t_end)
    while True:
        if t >= t_end:
            status[0] = 0
            break
        if n_acc[0] >= max_steps:
            status[0] = 3
            break
        if t + h > t_end:
            h = t_end - t
        if h <= 1e-15 * max(1.0, fabs(t)):
            status[0] = 3
            break
        if not implicit[0]:
            if h < stiff_h:
                small += 1
                if small >= stiff_count:
                    implicit[0] = 1
                    continue
            else:
                small = 0
            rhs(fld, x + h * A21 * kx[0], y + h * A21 * ky[0], &kx[1], &ky[1])
            rhs(fld, x + h * (A31 * kx[0] + A32 * kx[1]), y + h * (A31 * ky[0] + A32 * ky[1]),
                &kx[2], &ky[2])
            rhs(fld, x + h * (A41 * kx[0] + A42 * kx[1] + A43 * kx[2]),
                y + h * (A41 * ky[0] + A42 * ky[1] + A43 * ky[2]), &kx[3], &ky[3])
            rhs(fld, x + h * (A51 * kx[0] + A52 * kx[1] + A53 * kx[2] + A54 * kx[3]),
                y + h * (A51 * ky[0] + A52 * ky[1] + A53 * ky[2] + A54 * ky[3]), &kx[4], &ky[4])
            rhs(fld, x + h * (A61 * kx[0] + A62 * kx[1] + A63 * kx[2] + A64 * kx[3] + A65 * kx[4]),
                y + h * (A61 * ky[0] + A62 * ky[1] + A63 * ky[2] + A64 * ky[3] + A65 * ky[4]),
                &kx[5], &ky[5])
            xn = x + h * (B1 * kx[0] + B3 * kx[2] + B4 * kx[3] + B5 * kx[4] + B6 * kx[5])
            yn = y + h * (B1 * ky[0] + B3 * ky[2] + B4 * ky[3] + B5 * ky[4] + B6 * ky[5])
            rhs(fld, xn, yn, &kx[6], &ky[6])
            for i in range(1, 7):
                chk[2 * i] = kx[i]
                chk[2 * i + 1] = ky[i]
            chk[0] = xn
            chk[1] = yn
            if not all_finite(chk, 14):
                n_rej[0] += 1
                h *= 0.25
                continue
            ex = h * (E1 * kx[0] + E3 * kx[2] + E4 * kx[3] + E5 * kx[4] + E6 * kx[5] + E7 * kx[6])
            ey = h * (E1 * ky[0] + E3 * ky[2] + E4 * ky[3] + E5 * ky[4] + E6 * ky[5] + E7 * ky[6])
            err = err_norm(ex, ey, x, y, xn, yn, rtol, atol)
            if err > 1.0:
                n_rej[0] += 1
                h *= max(0.2, 0.9 * pow(err, -0.2))
                continue
            d.kind = 0
            d.x = x
            d.y = y
            d.h = h
            for i in range(7):
                d.kx[i] = kx[i]
                d.ky[i] = ky[i]
            h_next = h * (10.0 if err == 0.0 else min(10.0, max(0.2, 0.9 * pow(err, -0.2))))
            fnx = kx[6]
            fny = ky[6]
        else:
            ok = midpoint(fld, x, y, h, rtol, atol, &xf, &yf)
            if ok:
                ok = midpoint(fld, x, y, 0.5 * h, rtol, atol, &xm, &ym)
            if ok:
                ok = midpoint(fld, xm, ym, 0.5 * h, rtol, atol, &xn, &yn)
            if not ok:
                n_rej[0] += 1
                h *= 0.5
                continue
            rhs(fld, xn, yn, &fnx, &fny)
            if not (isfinite(xn) and isfinite(yn) and isfinite(fnx) and isfinite(fny)):
                n_rej[0] += 1
                h *= 0.5
                continue
            err = err_norm((xn - xf) / 3.0, (yn - yf) / 3.0, x, y, xn, yn, rtol, atol)
            if err > 1.0:
                n_rej[0] += 1
                h *= max(0.2, 0.9 * pow(err, -1.0 / 3.0))
                continue
            d.kind = 1
            d.x = x
            d.y = y
            d.fx0 = kx[0]
            d.fy0 = ky[0]
            d.x1 = xn
            d.y1 = yn
            d.fx1 = fnx
            d.fy1 = fny
            d.h = h
            h_next = h * (5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * pow(err, -1.0 / 3.0))))

        best = 2.0
        ev_status = -1
        ex_x = 0.0
        ex_y = 0.0
        if chart_on and (xn < chart_lo or xn > chart_hi):
            bound = chart_hi if xn > chart_hi else chart_lo
            th = locate(&d, 0, bound, x - bound, &px, &py)
            best = th
            ev_status = 2
            ex_x = px
            ex_y = py
        if ev_kind:
            coord = 0 if ev_kind == 1 else 1
            s_old = (x if coord == 0 else y) - ev_c
            s_new = (xn if coord == 0 else yn) - ev_c
            if s_old != 0.0 and (s_new == 0.0 or (s_new > 0) != (s_old > 0)):
                th = locate(&d, coord, ev_c, s_old, &px, &py)
                free = py if coord == 0 else px
                if ev_lo <= free <= ev_hi and th <= best:
                    best = th
                    ev_status = 1
                    ex_x = px
                    ex_y = py
        n_acc[0] += 1
        if ev_status >= 0:
            t = t + best * h
            push(buf, t, ex_x, ex_y)
            status[0] = ev_status
            return
        t = t + h
        x = xn
        y = yn
        kx[0] = fnx
        ky[0] = fny
        if record:
            push(buf, t, x, y)
        h = h_next
    if not record and (buf.t[buf.n - 1] != t or buf.n == 1):
        push(buf, t, x, y)


def integrate(ops1, args1, ops2, args2, consts, double eps, double s1, double s2, double x0,
              double y0, double t_end, double rtol, double atol, double h0, long max_steps,
              int ev_kind, double ev_c, double ev_lo, double ev_hi, int chart_on,
              double chart_lo, double chart_hi, double stiff_h, int stiff_count, int record):
    cdef int[::1] o1 = np.ascontiguousarray(ops1, dtype=np.int32)
    cdef int[::1] a1 = np.ascontiguousarray(args1, dtype=np.int32)
    cdef int[::1] o2 = np.ascontiguousarray(ops2, dtype=np.int32)
    cdef int[::1] a2 = np.ascontiguousarray(args2, dtype=np.int32)
    cdef double[::1] c = np.ascontiguousarray(consts, dtype=np.float64)
    cdef Field fld
    cdef Buf buf
    cdef int status = 0, implicit = 0
    cdef long n_acc = 0, n_rej = 0
    cdef Py_ssize_t i
    fld.p1.ops = &o1[0]
    fld.p1.args = &a1[0]
    fld.p1.n = o1.shape[0]
    fld.p2.ops = &o2[0]
    fld.p2.args = &a2[0]
    fld.p2.n = o2.shape[0]
    fld.consts = &c[0]
    fld.eps = eps
    fld.s1 = s1
    fld.s2 = s2
    buf.cap = 256
    buf.n = 0
    buf.t = <double *> malloc(buf.cap * sizeof(double))
    buf.x = <double *> malloc(buf.cap * sizeof(double))
    buf.y = <double *> malloc(buf.cap * sizeof(double))
    if buf.t == NULL or buf.x == NULL or buf.y == NULL:
        free(buf.t); free(buf.x); free(buf.y)
        raise MemoryError()
    push(&buf, 0.0, x0, y0)
    with nogil:
        core(&fld, &buf, x0, y0, t_end, rtol, atol, h0, max_steps, ev_kind, ev_c, ev_lo, ev_hi,
             chart_on, chart_lo, chart_hi, stiff_h, stiff_count, record, &status, &n_acc,
             &n_rej, &implicit)
    ts = np.empty(buf.n)
    xs = np.empty(buf.n)
    ys = np.empty(buf.n)
    cdef double[::1] tv = ts
    cdef double[::1] xv = xs
    cdef double[::1] yv = ys
    for i in range(buf.n):
        tv[i] = buf.t[i]
        xv[i] = buf.x[i]
        yv[i] = buf.y[i]
    free(buf.t)
    free(buf.x)
    free(buf.y)
    return ts, xs, ys, status, n_acc, n_rej, implicit
