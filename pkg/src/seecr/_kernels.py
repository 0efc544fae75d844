"""Hot numeric kernels.

Everything in this module is written as plain numpy code that numba can
compile in nopython mode; ``seecr.backend.maybe_njit`` decides at import
time whether the functions are jitted (default) or run as-is (pure numpy,
``SEECR_BACKEND=numpy``). No numpy.linalg calls are made here: the small
dense factorizations the solver needs (complex Cholesky, cyclic Jacobi
eigensolver, regularized real Cholesky) are implemented directly, which
keeps the kernels self-contained and cheap for the tiny matrices involved
(antenna counts of 2..8).

Hermitian matrices are handled in a real coordinate vector of length n*n:
the n real diagonal entries first, then (Re, Im) of each strictly-lower
entry in row-major order. All linear functionals tr(B_k M) of that
parameterization are produced by ``tr_coords``.
"""

import numpy as np

from .backend import maybe_njit

# ---------------------------------------------------------------------------
# coordinate mapping


@maybe_njit
def coords_to_mat(x, n):
    """Rebuild the Hermitian matrix from its real coordinate vector."""
    q = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        q[i, i] = x[i]
    idx = n
    for i in range(1, n):
        for j in range(i):
            re = x[idx]
            im = x[idx + 1]
            idx += 2
            q[i, j] = complex(re, im)
            q[j, i] = complex(re, -im)
    return q


@maybe_njit
def mat_to_coords(q):
    """Extract the free real coordinates of a Hermitian matrix."""
    n = q.shape[0]
    x = np.empty(n * n, dtype=np.float64)
    for i in range(n):
        x[i] = q[i, i].real
    idx = n
    for i in range(1, n):
        for j in range(i):
            x[idx] = q[i, j].real
            x[idx + 1] = q[i, j].imag
            idx += 2
    return x


@maybe_njit
def tr_coords(m):
    """Coordinates of the linear functional X -> tr(X M), M Hermitian.

    Entry k equals tr(B_k M) for the k-th coordinate basis matrix B_k, so
    the returned vector is simultaneously the gradient of x -> tr(Q(x) M).
    """
    n = m.shape[0]
    out = np.empty(n * n, dtype=np.float64)
    for i in range(n):
        out[i] = m[i, i].real
    idx = n
    for i in range(1, n):
        for j in range(i):
            out[idx] = 2.0 * m[i, j].real
            out[idx + 1] = 2.0 * m[i, j].imag
            idx += 2
    return out


@maybe_njit
def qf_coords(h):
    """Coordinates of x -> h^H Q(x) h (equals tr_coords of h h^H)."""
    n = h.shape[0]
    out = np.empty(n * n, dtype=np.float64)
    for i in range(n):
        out[i] = (h[i] * np.conj(h[i])).real
    idx = n
    for i in range(1, n):
        for j in range(i):
            z = h[i] * np.conj(h[j])  # (h h^H)_{ij}
            out[idx] = 2.0 * z.real
            out[idx + 1] = 2.0 * z.imag
            idx += 2
    return out


@maybe_njit
def trace_coords(n):
    """Coordinates of x -> tr Q(x)."""
    out = np.zeros(n * n, dtype=np.float64)
    for i in range(n):
        out[i] = 1.0
    return out


# ---------------------------------------------------------------------------
# small dense complex helpers (manual, contiguity-safe for numba)


@maybe_njit
def _cmatmul(a, b):
    n = a.shape[0]
    m = b.shape[1]
    k = a.shape[1]
    out = np.zeros((n, m), dtype=np.complex128)
    for i in range(n):
        for l in range(k):
            ail = a[i, l]
            if ail != 0.0:
                for j in range(m):
                    out[i, j] += ail * b[l, j]
    return out


@maybe_njit
def _conj_t(a):
    n = a.shape[0]
    m = a.shape[1]
    out = np.empty((m, n), dtype=np.complex128)
    for i in range(n):
        for j in range(m):
            out[j, i] = np.conj(a[i, j])
    return out


@maybe_njit
def chol_factor(a):
    """Lower Cholesky of a Hermitian matrix; flag is False when not PD."""
    n = a.shape[0]
    l = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        d = a[j, j].real
        for k in range(j):
            d -= (l[j, k] * np.conj(l[j, k])).real
        if d <= 0.0 or not np.isfinite(d):
            return False, l
        dj = np.sqrt(d)
        l[j, j] = dj
        for i in range(j + 1, n):
            s = a[i, j]
            for k in range(j):
                s -= l[i, k] * np.conj(l[j, k])
            l[i, j] = s / dj
    return True, l


@maybe_njit
def chol_logdet(l):
    n = l.shape[0]
    acc = 0.0
    for i in range(n):
        acc += np.log(l[i, i].real)
    return 2.0 * acc


@maybe_njit
def lower_inv(l):
    """Invert a lower-triangular complex matrix by forward substitution."""
    n = l.shape[0]
    k = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        k[j, j] = 1.0 / l[j, j]
        for i in range(j + 1, n):
            s = 0.0 + 0.0j
            for p in range(j, i):
                s += l[i, p] * k[p, j]
            k[i, j] = -s / l[i, i]
    return k


@maybe_njit
def inv_from_chol(k):
    """M^{-1} = K^H K for K = L^{-1}, M = L L^H."""
    n = k.shape[0]
    out = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            s = 0.0 + 0.0j
            for p in range(max(i, j), n):  # K is lower triangular
                s += np.conj(k[p, i]) * k[p, j]
            out[i, j] = s
    return out


# ---------------------------------------------------------------------------
# cyclic complex Jacobi eigensolver


@maybe_njit
def jacobi_eigh(a_in, tol=1e-13, max_sweeps=100):
    """Eigendecomposition of a complex Hermitian matrix.

    Cyclic-by-row Jacobi with complex Givens rotations: the off-diagonal
    phase is absorbed first, then the standard real rotation angle zeroes
    the pivot. Returns eigenvalues in descending order and the matching
    orthonormal eigenvectors as columns.
    """
    n = a_in.shape[0]
    a = a_in.copy()
    v = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        v[i, i] = 1.0

    nrm = 0.0
    for i in range(n):
        for j in range(n):
            nrm += (a[i, j] * np.conj(a[i, j])).real
    nrm = np.sqrt(nrm)
    if nrm == 0.0 or n == 1:
        w = np.empty(n, dtype=np.float64)
        for i in range(n):
            w[i] = a[i, i].real
        return _sorted_desc(w, v)

    thresh = tol * nrm
    for _sweep in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += (a[p, q] * np.conj(a[p, q])).real
        if np.sqrt(2.0 * off) <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                aabs = np.abs(apq)
                if aabs <= 1e-300:
                    continue
                w_ph = apq / aabs  # unit phase of the pivot
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * aabs)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                swc = s * np.conj(w_ph)

                # rows/columns outside the (p, q) plane
                for i in range(n):
                    if i == p or i == q:
                        continue
                    aip = a[i, p]
                    aiq = a[i, q]
                    a[i, p] = c * aip - swc * aiq
                    a[i, q] = s * aip + c * np.conj(w_ph) * aiq
                    a[p, i] = np.conj(a[i, p])
                    a[q, i] = np.conj(a[i, q])
                # the 2x2 pivot block
                a[p, p] = app - t * aabs
                a[q, q] = aqq + t * aabs
                a[p, q] = 0.0
                a[q, p] = 0.0
                # accumulate eigenvectors
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = c * vip - swc * viq
                    v[i, q] = s * vip + c * np.conj(w_ph) * viq

    w = np.empty(n, dtype=np.float64)
    for i in range(n):
        w[i] = a[i, i].real
    return _sorted_desc(w, v)


@maybe_njit
def _sorted_desc(w, v):
    n = w.shape[0]
    order = np.argsort(-w)
    ws = np.empty(n, dtype=np.float64)
    vs = np.empty((n, n), dtype=np.complex128)
    for c in range(n):
        oc = order[c]
        ws[c] = w[oc]
        for r in range(n):
            vs[r, c] = v[r, oc]
    return ws, vs


# ---------------------------------------------------------------------------
# regularized real SPD solve (Newton systems)


@maybe_njit
def _chol_real(a):
    n = a.shape[0]
    l = np.zeros((n, n), dtype=np.float64)
    for j in range(n):
        d = a[j, j]
        for k in range(j):
            d -= l[j, k] * l[j, k]
        if d <= 0.0 or not np.isfinite(d):
            return False, l
        dj = np.sqrt(d)
        l[j, j] = dj
        for i in range(j + 1, n):
            s = a[i, j]
            for k in range(j):
                s -= l[i, k] * l[j, k]
            l[i, j] = s / dj
    return True, l


@maybe_njit
def _chol_solve_real(l, rhs):
    n = l.shape[0]
    y = np.empty(n, dtype=np.float64)
    for i in range(n):
        s = rhs[i]
        for k in range(i):
            s -= l[i, k] * y[k]
        y[i] = s / l[i, i]
    x = np.empty(n, dtype=np.float64)
    for i in range(n - 1, -1, -1):
        s = y[i]
        for k in range(i + 1, n):
            s -= l[k, i] * x[k]
        x[i] = s / l[i, i]
    return x


@maybe_njit
def solve_newton_system(h, g):
    """Newton step d = -H^{-1} g for a (near) SPD Hessian.

    The system is Jacobi-scaled to unit diagonal and factored with an
    escalating ridge; interior-point end-game Hessians mix curvatures of
    wildly different magnitude and a raw factorization can fail in float64.
    Returns (d, decrement^2, ok).
    """
    m = h.shape[0]
    scale = np.empty(m, dtype=np.float64)
    for i in range(m):
        dii = h[i, i]
        if dii > 1e-300:
            scale[i] = 1.0 / np.sqrt(dii)
        else:
            scale[i] = 1.0
    hs = np.empty((m, m), dtype=np.float64)
    for i in range(m):
        for j in range(m):
            hs[i, j] = h[i, j] * scale[i] * scale[j]
    gs = np.empty(m, dtype=np.float64)
    for i in range(m):
        gs[i] = -g[i] * scale[i]

    regs = np.array([0.0, 1e-14, 1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1.0])
    for r in range(regs.shape[0]):
        if regs[r] > 0.0:
            for i in range(m):
                hs[i, i] += regs[r] - (regs[r - 1] if r > 1 else 0.0)
        ok, l = _chol_real(hs)
        if ok:
            z = _chol_solve_real(l, gs)
            d = np.empty(m, dtype=np.float64)
            for i in range(m):
                d[i] = z[i] * scale[i]
            dec2 = 0.0
            for i in range(m):
                dec2 -= g[i] * d[i]
            if dec2 < 0.0:
                dec2 = 0.0
            return d, dec2, True
    d = np.zeros(m, dtype=np.float64)
    return d, 0.0, False


# ---------------------------------------------------------------------------
# the log-barrier solver


@maybe_njit
def _build_mat(y, nmat, extra):
    m = coords_to_mat(y[: nmat * nmat], nmat)
    if extra == 1:
        u = y[y.shape[0] - 1]
        for i in range(nmat):
            m[i, i] += u
    return m


@maybe_njit
def _phi_eval(y, nmat, extra, a_rows, b_rows, c_lin, w_log, c_log, g0, t):
    """Barrier-augmented objective at y; ok=False outside the domain."""
    m = _build_mat(y, nmat, extra)
    ok, l = chol_factor(m)
    if not ok:
        return False, 0.0
    phi = -chol_logdet(l)
    n_ineq = a_rows.shape[0]
    for j in range(n_ineq):
        s = b_rows[j]
        for i in range(y.shape[0]):
            s += a_rows[j, i] * y[i]
        if s <= 0.0:
            return False, 0.0
        phi -= np.log(s)
    lin = 0.0
    for i in range(y.shape[0]):
        lin += c_lin[i] * y[i]
    f = lin
    if w_log > 0.0:
        arg = g0
        for i in range(y.shape[0]):
            arg += c_log[i] * y[i]
        if arg <= 0.0:
            return False, 0.0
        f -= w_log * np.log(arg)
    return True, t * f + phi


@maybe_njit
def barrier_solve(nmat, extra, a_rows, b_rows, c_lin, w_log, c_log, g0, y0,
                  t0, t_mult, gap_tol, newton_tol, newton_cap, stage_cap,
                  trace_out, record_trace):
    """Path-following log-barrier minimizer.

    minimize   c_lin . y  -  w_log * ln(g0 + c_log . y)
    subject to a_rows y + b_rows >= 0 (componentwise)
               Q(y) (+ y[-1] I if extra) positive definite

    Damped Newton centering at each barrier weight t, t multiplied by
    t_mult per stage until nu / t <= gap_tol with nu = (#rows + nmat), the
    barrier parameter, which bounds the duality gap at the central point.
    y0 must be strictly feasible. Status: 0 optimal, 1 iteration caps hit,
    4 bad start. trace_out rows are (stage, step, phi) when record_trace.
    """
    mdim = y0.shape[0]
    ncq = nmat * nmat
    n_ineq = a_rows.shape[0]
    nu = float(n_ineq + nmat)
    y = y0.copy()

    ok0, _phi0 = _phi_eval(y, nmat, extra, a_rows, b_rows, c_lin, w_log,
                           c_log, g0, t0)
    if not ok0:
        return y, 4, 0, 0, nu / t0, 0.0, 0

    # pair index tables for the PSD Hessian block
    npair = (nmat * (nmat - 1)) // 2
    pi = np.empty(npair, dtype=np.int64)
    pj = np.empty(npair, dtype=np.int64)
    idx = 0
    for i in range(1, nmat):
        for j in range(i):
            pi[idx] = i
            pj[idx] = j
            idx += 1

    t = t0
    stages = 0
    newton_total = 0
    trace_len = 0
    trace_cap = trace_out.shape[0]
    clean = True
    kkt = 0.0

    while True:
        stages += 1
        centered = False
        for step in range(newton_cap):
            # --- assemble at y
            mmat = _build_mat(y, nmat, extra)
            okc, l = chol_factor(mmat)
            if not okc:  # cannot happen while iterates stay interior
                return y, 4, newton_total, stages, nu / t, kkt, trace_len
            logdet = chol_logdet(l)
            k = lower_inv(l)
            minv = inv_from_chol(k)

            slacks = np.empty(n_ineq, dtype=np.float64)
            for j in range(n_ineq):
                s = b_rows[j]
                for i in range(mdim):
                    s += a_rows[j, i] * y[i]
                slacks[j] = s

            lin = 0.0
            for i in range(mdim):
                lin += c_lin[i] * y[i]
            arg = g0
            if w_log > 0.0:
                for i in range(mdim):
                    arg += c_log[i] * y[i]
            phi = t * (lin - (w_log * np.log(arg) if w_log > 0.0 else 0.0))
            phi -= logdet
            for j in range(n_ineq):
                phi -= np.log(slacks[j])

            # gradient
            g = np.empty(mdim, dtype=np.float64)
            for i in range(mdim):
                g[i] = t * c_lin[i]
            if w_log > 0.0:
                coef = t * w_log / arg
                for i in range(mdim):
                    g[i] -= coef * c_log[i]
            gb = tr_coords(minv)
            for i in range(ncq):
                g[i] -= gb[i]
            if extra == 1:
                tr_minv = 0.0
                for i in range(nmat):
                    tr_minv += minv[i, i].real
                g[mdim - 1] -= tr_minv
            for j in range(n_ineq):
                inv_s = 1.0 / slacks[j]
                for i in range(mdim):
                    g[i] -= a_rows[j, i] * inv_s

            # Hessian
            h = np.zeros((mdim, mdim), dtype=np.float64)
            if w_log > 0.0:
                coef = t * w_log / (arg * arg)
                for i in range(mdim):
                    ci = coef * c_log[i]
                    if ci != 0.0:
                        for jj in range(mdim):
                            h[i, jj] += ci * c_log[jj]
            # PSD block rows: H[k, l] = tr(Minv B_k Minv B_l)
            w_tmp = np.empty((nmat, nmat), dtype=np.complex128)
            for kc in range(ncq):
                if kc < nmat:
                    ii = kc
                    for aa in range(nmat):
                        for bb in range(nmat):
                            w_tmp[aa, bb] = minv[aa, ii] * minv[ii, bb]
                else:
                    pr = (kc - nmat) // 2
                    is_im = (kc - nmat) % 2
                    ii = pi[pr]
                    jj2 = pj[pr]
                    if is_im == 0:
                        for aa in range(nmat):
                            for bb in range(nmat):
                                w_tmp[aa, bb] = (minv[aa, ii] * minv[jj2, bb]
                                                 + minv[aa, jj2] * minv[ii, bb])
                    else:
                        for aa in range(nmat):
                            for bb in range(nmat):
                                w_tmp[aa, bb] = 1j * (
                                    minv[aa, ii] * minv[jj2, bb]
                                    - minv[aa, jj2] * minv[ii, bb])
                row = tr_coords(w_tmp)
                for ll in range(ncq):
                    h[kc, ll] += row[ll]
                if extra == 1:
                    trw = 0.0
                    for aa in range(nmat):
                        trw += w_tmp[aa, aa].real
                    h[kc, mdim - 1] += trw
                    h[mdim - 1, kc] += trw
            if extra == 1:
                tr_p2 = 0.0
                for aa in range(nmat):
                    for bb in range(nmat):
                        tr_p2 += (minv[aa, bb] * np.conj(minv[aa, bb])).real
                h[mdim - 1, mdim - 1] += tr_p2
            for j in range(n_ineq):
                inv_s2 = 1.0 / (slacks[j] * slacks[j])
                for i in range(mdim):
                    ai = a_rows[j, i] * inv_s2
                    if ai != 0.0:
                        for jj in range(mdim):
                            h[i, jj] += ai * a_rows[j, jj]

            gnorm = 0.0
            for i in range(mdim):
                gnorm += g[i] * g[i]
            kkt = np.sqrt(gnorm) / t

            d, dec2, oks = solve_newton_system(h, g)
            if record_trace == 1 and trace_len < trace_cap:
                trace_out[trace_len, 0] = float(stages)
                trace_out[trace_len, 1] = float(step)
                trace_out[trace_len, 2] = phi
                trace_len += 1
            if not oks:
                centered = True  # numerical floor; accept current point
                break
            if 0.5 * dec2 <= newton_tol:
                centered = True
                break

            # fraction-to-boundary cap on the linear slacks
            alpha = 1.0
            for j in range(n_ineq):
                adj = 0.0
                for i in range(mdim):
                    adj += a_rows[j, i] * d[i]
                if adj < 0.0:
                    cap = 0.99 * slacks[j] / (-adj)
                    if cap < alpha:
                        alpha = cap
            # ... and on the PSD cone via the smallest generalized eigenvalue
            dmat = _build_mat(d, nmat, extra)
            c_gen = _cmatmul(_cmatmul(k, dmat), _conj_t(k))
            weig, _vv = jacobi_eigh(c_gen, 1e-10, 60)
            numin = weig[nmat - 1]
            if numin < 0.0:
                cap = 0.99 / (-numin)
                if cap < alpha:
                    alpha = cap

            gd = 0.0
            for i in range(mdim):
                gd += g[i] * d[i]
            accepted = False
            y_try = y
            for _ls in range(60):
                y_try = y + alpha * d
                okt, phi_try = _phi_eval(y_try, nmat, extra, a_rows, b_rows,
                                         c_lin, w_log, c_log, g0, t)
                if okt and phi_try <= phi + 0.01 * alpha * gd:
                    accepted = True
                    break
                alpha *= 0.5
                if alpha < 1e-18:
                    break
            if not accepted:
                centered = True  # float64 floor near the central point
                break
            y = y_try
            newton_total += 1
            if alpha < 1e-13:
                centered = True
                break
        if not centered:
            clean = False
        if nu / t <= gap_tol:
            break
        if stages >= stage_cap:
            clean = False
            break
        t *= t_mult

    status = 0 if clean else 1
    return y, status, newton_total, stages, nu / t, kkt, trace_len


# ---------------------------------------------------------------------------
# oracle grid scan

OBJ_SEE = 0
OBJ_DINKELBACH = 1
OBJ_MIN_TRACE = 2
OBJ_RATE = 3
OBJ_MIN_MARGIN = 4


@maybe_njit
def grid_scan(qsu, qsv, qeu, qev, qpu, qpv, p_vals, mu_vals, obj_code, lam,
              rd_lin, e_s, eta_eh, p_f, p_tx, p_c, xi, include_rate,
              feas_slack):
    """Scan the rank-two beam grid and return the best point.

    The direction tables hold |h^H u|^2 and |h^H u_perp|^2 per (theta, phi)
    sample for the three channels; candidate covariances are
    p (mu u u^H + (1-mu) u_perp u_perp^H). Objective codes: 0 ratio of
    secrecy rate to total power, 1 rate - lam * power, 2 trace
    minimization, 3 rate alone (rate target row dropped), 4 max-min
    constraint margin (no feasibility filter).
    Returns (found, d_idx, mu_idx, p_idx, value).
    """
    dcount = qsu.shape[0]
    ucount = mu_vals.shape[0]
    pcount = p_vals.shape[0]
    best = -np.inf
    best_margin = -np.inf
    bd = -1
    bu = -1
    bp = -1
    found = 0
    ln2 = np.log(2.0)
    for d in range(dcount):
        au = qsu[d]
        av = qsv[d]
        eu = qeu[d]
        ev = qev[d]
        pu = qpu[d]
        pv = qpv[d]
        for iu in range(ucount):
            mu = mu_vals[iu]
            om = 1.0 - mu
            sa = mu * au + om * av
            se = mu * eu + om * ev
            sp = mu * pu + om * pv
            for ip in range(pcount):
                p = p_vals[ip]
                qs = p * sa
                qe = p * se
                qp = p * sp
                m1 = (1.0 + qs) - rd_lin * (1.0 + qe)
                m2 = eta_eh * (qe + 1.0) - e_s
                m3 = p_f - qp
                m4 = p_tx - p
                if obj_code == OBJ_MIN_MARGIN:
                    val = m2
                    if include_rate == 1 and m1 < val:
                        val = m1
                    if m3 < val:
                        val = m3
                    if m4 < val:
                        val = m4
                    m5 = p * om  # smallest eigenvalue of the candidate
                    if m5 < val:
                        val = m5
                else:
                    if include_rate == 1 and m1 < -feas_slack:
                        continue
                    if m2 < -feas_slack or m3 < -feas_slack or m4 < -feas_slack:
                        continue
                    if obj_code == OBJ_MIN_TRACE:
                        val = -p
                    else:
                        rate = (np.log1p(qs) - np.log1p(qe)) / ln2
                        if obj_code == OBJ_RATE:
                            val = rate
                        else:
                            power = (p + p_c) / xi
                            if obj_code == OBJ_SEE:
                                val = rate / power
                            else:
                                val = rate - lam * power
                if obj_code == OBJ_MIN_TRACE:
                    # many directions share the same trace; keep the most
                    # interior one so refinement recenters sensibly
                    margin = m2
                    if include_rate == 1 and m1 < margin:
                        margin = m1
                    if m3 < margin:
                        margin = m3
                    if val > best or (val == best and margin > best_margin):
                        best = val
                        best_margin = margin
                        bd = d
                        bu = iu
                        bp = ip
                        found = 1
                elif val > best:
                    best = val
                    bd = d
                    bu = iu
                    bp = ip
                    found = 1
    return found, bd, bu, bp, best


def grid_scan_numpy(qsu, qsv, qeu, qev, qpu, qpv, p_vals, mu_vals, obj_code,
                    lam, rd_lin, e_s, eta_eh, p_f, p_tx, p_c, xi,
                    include_rate, feas_slack):
    """Vectorized twin of ``grid_scan`` for the numpy backend.

    Iterates the (mu, p) combinations and broadcasts over the direction
    axis; value computations are elementwise-identical to the scalar loop,
    so the best value matches bit for bit (tie-breaking order may differ).
    """
    best = -np.inf
    best_margin = -np.inf
    bd = bu = bp = -1
    found = 0
    ln2 = np.log(2.0)
    for iu, mu in enumerate(mu_vals):
        om = 1.0 - mu
        sa = mu * qsu + om * qsv
        se = mu * qeu + om * qev
        sp = mu * qpu + om * qpv
        for ip, p in enumerate(p_vals):
            qs = p * sa
            qe = p * se
            qp = p * sp
            m1 = (1.0 + qs) - rd_lin * (1.0 + qe)
            m2 = eta_eh * (qe + 1.0) - e_s
            m3 = p_f - qp
            m4 = p_tx - p
            if obj_code == OBJ_MIN_MARGIN:
                val = np.minimum(m2, np.minimum(m3, m4))
                if include_rate == 1:
                    val = np.minimum(val, m1)
                val = np.minimum(val, p * om)
            else:
                mask = (m2 >= -feas_slack) & (m3 >= -feas_slack) & (m4 >= -feas_slack)
                if include_rate == 1:
                    mask &= m1 >= -feas_slack
                if not mask.any():
                    continue
                if obj_code == OBJ_MIN_TRACE:
                    # same trace for every feasible direction at this p:
                    # keep the most interior one (see the scalar twin)
                    margin = np.minimum(m2, m3)
                    if include_rate == 1:
                        margin = np.minimum(margin, m1)
                    margin = np.where(mask, margin, -np.inf)
                    d = int(np.argmax(margin))
                    v = -p
                    if v > best or (v == best and float(margin[d]) > best_margin):
                        best = v
                        best_margin = float(margin[d])
                        bd, bu, bp = d, iu, ip
                        found = 1
                    continue
                rate = (np.log1p(qs) - np.log1p(qe)) / ln2
                if obj_code == OBJ_RATE:
                    val = np.where(mask, rate, -np.inf)
                elif obj_code == OBJ_SEE:
                    val = np.where(mask, rate / ((p + p_c) / xi), -np.inf)
                else:
                    val = np.where(mask, rate - lam * ((p + p_c) / xi),
                                   -np.inf)
            d = int(np.argmax(val))
            v = float(val[d])
            if np.isfinite(v) and v > best:
                best = v
                bd, bu, bp = d, iu, ip
                found = 1
    return found, bd, bu, bp, best
