"""Numba kernels for the 22 canonical time series characteristics.

Each kernel takes a contiguous float64 window and returns a float. The
numerical conventions (sample standard deviation, biased FFT autocorrelation,
quantile interpolation, histogram binning) follow the catch22 C reference so
that values agree to floating point noise when the reference is given the
same input. Kernels never raise; undefined cases come back as NaN and are
sanitised by the caller.
"""

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True, error_model="numpy")


# --------------------------------------------------------------------------
# shared helpers
# --------------------------------------------------------------------------


@njit(**_JIT)
def _mean(y):
    s = 0.0
    for i in range(y.size):
        s += y[i]
    return s / y.size


@njit(**_JIT)
def _std(y):
    # sample (n - 1) convention, as in the reference stats helpers
    m = _mean(y)
    s = 0.0
    for i in range(y.size):
        s += (y[i] - m) ** 2
    return np.sqrt(s / (y.size - 1))


@njit(**_JIT)
def _median(y):
    b = np.sort(y)
    n = b.size
    if n % 2 == 1:
        return b[n // 2]
    return (b[n // 2] + b[n // 2 - 1]) / 2.0


@njit(**_JIT)
def _nextpow2(n):
    p = 1
    while p < n:
        p <<= 1
    return p


@njit(**_JIT)
def _fft(re, im):
    """In-place iterative radix-2 FFT (forward, no scaling)."""
    n = re.size
    if n < 2:
        return
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j ^= bit
        if i < j:
            re[i], re[j] = re[j], re[i]
            im[i], im[j] = im[j], im[i]
    half = n // 2
    twr = np.empty(half)
    twi = np.empty(half)
    for k in range(half):
        a = -2.0 * np.pi * k / n
        twr[k] = np.cos(a)
        twi[k] = np.sin(a)
    length = 2
    while length <= n:
        h = length // 2
        step = n // length
        for start in range(0, n, length):
            for k in range(h):
                wr = twr[k * step]
                wi = twi[k * step]
                a = start + k
                b = a + h
                tr = wr * re[b] - wi * im[b]
                ti = wr * im[b] + wi * re[b]
                re[b] = re[a] - tr
                im[b] = im[a] - ti
                re[a] += tr
                im[a] += ti
        length <<= 1


@njit(**_JIT)
def _autocorrs(y):
    """Biased autocorrelation via zero-padded FFT, normalised by lag 0."""
    n = y.size
    nfft = _nextpow2(n) * 2
    m = _mean(y)
    re = np.zeros(nfft)
    im = np.zeros(nfft)
    for i in range(n):
        re[i] = y[i] - m
    _fft(re, im)
    for i in range(nfft):
        re[i] = re[i] * re[i] + im[i] * im[i]
        im[i] = 0.0
    _fft(re, im)
    c = re[0]
    d = im[0]
    den = c * c + d * d
    out = np.empty(nfft)
    for i in range(nfft):
        out[i] = (re[i] * c + im[i] * d) / den
    return out


@njit(**_JIT)
def _firstzero(y, maxtau):
    ac = _autocorrs(y)
    i = 0
    while ac[i] > 0 and i < maxtau:
        i += 1
    return i


@njit(**_JIT)
def _corr(x, y):
    mx = _mean(x)
    my = _mean(y)
    nom = 0.0
    dx = 0.0
    dy = 0.0
    for i in range(x.size):
        nom += (x[i] - mx) * (y[i] - my)
        dx += (x[i] - mx) ** 2
        dy += (y[i] - my) ** 2
    return nom / np.sqrt(dx * dy)


@njit(**_JIT)
def _quantile(sorted_y, quant):
    size = sorted_y.size
    q = 0.5 / size
    if quant < q:
        return sorted_y[0]
    if quant > 1.0 - q:
        return sorted_y[size - 1]
    idx = size * quant - 0.5
    left = int(np.floor(idx))
    right = int(np.ceil(idx))
    if left == right:
        return sorted_y[left]
    return sorted_y[left] + (idx - left) * (sorted_y[right] - sorted_y[left]) / (right - left)


@njit(**_JIT)
def _coarsegrain3(y):
    """Quantile alphabet of size 3 (labels 1..3)."""
    n_groups = 3
    s = np.sort(y)
    th = np.empty(n_groups + 1)
    step = 1.0 / n_groups
    ls = 0.0
    for i in range(n_groups + 1):
        th[i] = _quantile(s, ls)
        ls += step
    th[0] -= 1.0
    labels = np.zeros(y.size, dtype=np.int64)
    for i in range(n_groups):
        for j in range(y.size):
            if y[j] > th[i] and y[j] <= th[i + 1]:
                labels[j] = i + 1
    return labels


@njit(**_JIT)
def _linreg(x, y):
    n = x.size
    sx = 0.0
    sx2 = 0.0
    sxy = 0.0
    sy = 0.0
    for i in range(n):
        sx += x[i]
        sx2 += x[i] * x[i]
        sxy += x[i] * y[i]
        sy += y[i]
    den = n * sx2 - sx * sx
    if den == 0:
        return 0.0, 0.0
    return (n * sxy - sx * sy) / den, (sy * sx2 - sx * sxy) / den


# --------------------------------------------------------------------------
# distribution
# --------------------------------------------------------------------------


@njit(**_JIT)
def histogram_mode(y, n_bins):
    lo = y.min()
    hi = y.max()
    step = (hi - lo) / n_bins
    counts = np.zeros(n_bins, dtype=np.int64)
    for i in range(y.size):
        if step > 0:
            b = int((y[i] - lo) / step)
        else:
            b = 0
        if b < 0:
            b = 0
        if b >= n_bins:
            b = n_bins - 1
        counts[b] += 1
    max_count = 0
    n_max = 1
    out = 0.0
    for i in range(n_bins):
        centre = ((i * step + lo) + ((i + 1) * step + lo)) * 0.5
        if counts[i] > max_count:
            max_count = counts[i]
            n_max = 1
            out = centre
        elif counts[i] == max_count:
            n_max += 1
            out += centre
    return out / n_max


@njit(**_JIT)
def outlier_include(y, sign):
    """Median-relative timing of points beyond increasing thresholds."""
    size = y.size
    inc = 0.01
    w = sign * y
    constant = True
    tot = 0
    for i in range(size):
        if y[i] != y[0]:
            constant = False
        if w[i] >= 0:
            tot += 1
    if constant:
        return 0.0
    max_val = w.max()
    if max_val < inc:
        return 0.0
    n_thresh = int(max_val / inc + 1)

    # highest threshold index each point satisfies
    level = np.empty(size, dtype=np.int64)
    for i in range(size):
        v = w[i]
        q = v / inc
        if q >= n_thresh - 1:
            j = n_thresh - 1
        elif q < 0:
            j = -1
        else:
            j = int(q)
        while j + 1 < n_thresh and v >= (j + 1) * inc:
            j += 1
        while j >= 0 and v < j * inc:
            j -= 1
        level[i] = j

    cnt = np.zeros(n_thresh, dtype=np.int64)
    for i in range(size):
        if level[i] >= 0:
            cnt[level[i]] += 1
    above = np.empty(n_thresh, dtype=np.int64)
    run = 0
    for j in range(n_thresh - 1, -1, -1):
        run += cnt[j]
        above[j] = run

    mj = 0
    for j in range(n_thresh):
        if (above[j] - 1) * 100.0 / tot > 2:
            mj = j
    fbi = n_thresh - 1
    for j in range(n_thresh - 1, -1, -1):
        if above[j] == 1:
            fbi = j
    trim = min(mj, fbi)

    denom = size / 2.0
    med_rel = np.empty(trim + 1)
    idx = np.empty(size)
    for j in range(trim + 1):
        m = 0
        for i in range(size):
            if level[i] >= j:
                idx[m] = i + 1
                m += 1
        if m % 2 == 1:
            med = idx[m // 2]
        else:
            med = (idx[m // 2 - 1] + idx[m // 2]) / 2.0
        med_rel[j] = med / denom - 1.0
    return _median(med_rel)


# --------------------------------------------------------------------------
# linear autocorrelation
# --------------------------------------------------------------------------


@njit(**_JIT)
def f1ecac(y):
    size = y.size
    ac = _autocorrs(y)
    thresh = 1.0 / np.exp(1.0)
    for i in range(size - 2):
        if ac[i + 1] < thresh:
            m = ac[i + 1] - ac[i]
            return i + (thresh - ac[i]) / m
    return float(size)


@njit(**_JIT)
def first_min_ac(y):
    size = y.size
    ac = _autocorrs(y)
    for i in range(1, size - 1):
        if ac[i] < ac[i - 1] and ac[i] < ac[i + 1]:
            return float(i)
    return float(size)


@njit(**_JIT)
def trev_1_num(y):
    s = 0.0
    for i in range(y.size - 1):
        s += (y[i + 1] - y[i]) ** 3
    return s / (y.size - 1)


@njit(**_JIT)
def histogram_ami_even_2_5(y):
    tau = 2
    n_bins = 5
    size = y.size
    if size <= tau:
        return np.nan
    hi = y.max()
    lo = y.min()
    step = (hi - lo + 0.2) / 5
    edges = np.empty(n_bins + 1)
    for i in range(n_bins + 1):
        edges[i] = lo + step * i - 0.1
    joint = np.zeros((n_bins + 1, n_bins + 1))
    for i in range(size - tau):
        b1 = 0
        b2 = 0
        for j in range(n_bins + 1):
            if y[i] < edges[j]:
                b1 = j
                break
        for j in range(n_bins + 1):
            if y[i + tau] < edges[j]:
                b2 = j
                break
        if b1 >= 1 and b2 >= 1:
            joint[b1 - 1, b2 - 1] += 1
    total = 0.0
    for i in range(n_bins):
        for j in range(n_bins):
            total += joint[i, j]
    pi = np.zeros(n_bins)
    pj = np.zeros(n_bins)
    for i in range(n_bins):
        for j in range(n_bins):
            joint[i, j] /= total
            pi[i] += joint[i, j]
            pj[j] += joint[i, j]
    ami = 0.0
    for i in range(n_bins):
        for j in range(n_bins):
            if joint[i, j] > 0:
                ami += joint[i, j] * np.log(joint[i, j] / (pi[i] * pj[j]))
    return ami


@njit(**_JIT)
def ami_gaussian_fmmi(y):
    size = y.size
    tau = 40
    max_tau = (size + 1) // 2
    if tau > max_tau:
        tau = max_tau
    if tau < 3:
        return float(tau)
    ac = _corr(y[: size - 1], y[1:])
    prev = -0.5 * np.log(1.0 - ac * ac)
    ac = _corr(y[: size - 2], y[2:])
    curr = -0.5 * np.log(1.0 - ac * ac)
    for i in range(1, tau - 1):
        lag = i + 2
        ac = _corr(y[: size - lag], y[lag:])
        nxt = -0.5 * np.log(1.0 - ac * ac)
        if curr < prev and curr < nxt:
            return float(i)
        prev = curr
        curr = nxt
    return float(tau)


@njit(**_JIT)
def embed2_dist_expfit_meandiff(y):
    size = y.size
    tau = _firstzero(y, size)
    if tau > size / 10.0:
        tau = int(np.floor(size / 10.0))
    nd = size - tau - 1
    if nd < 2:
        return np.nan
    d = np.empty(nd)
    for i in range(nd):
        a = y[i + 1] - y[i]
        b = y[i + tau] - y[i + tau + 1]
        d[i] = np.sqrt(a * a + b * b)
    lam = _mean(d)
    sd = _std(d)
    if sd < 0.001:
        return 0.0
    lo = d.min()
    hi = d.max()
    n_bins = int(np.ceil((hi - lo) / (3.5 * sd / nd ** (1.0 / 3.0))))
    if n_bins <= 0:
        return np.nan
    step = (hi - lo) / n_bins
    counts = np.zeros(n_bins)
    for i in range(nd):
        b = int((d[i] - lo) / step)
        if b < 0:
            b = 0
        if b >= n_bins:
            b = n_bins - 1
        counts[b] += 1
    s = 0.0
    for i in range(n_bins):
        e0 = i * step + lo
        e1 = (i + 1) * step + lo
        expf = np.exp(-(e0 + e1) * 0.5 / lam) / lam
        if expf < 0:
            expf = 0.0
        s += abs(counts[i] / nd - expf)
    return s / n_bins


# --------------------------------------------------------------------------
# successive differences and symbolic
# --------------------------------------------------------------------------


@njit(**_JIT)
def hrv_pnn40(y):
    c = 0.0
    for i in range(y.size - 1):
        if abs(y[i + 1] - y[i]) * 1000 > 40:
            c += 1
    return c / (y.size - 1)


@njit(**_JIT)
def binary_mean_longstretch1(y):
    size = y.size
    m = _mean(y)
    best = 0
    last = 0
    for i in range(size - 1):
        is_low = y[i] - m <= 0
        if is_low or i == size - 2:
            stretch = i - last
            if stretch > best:
                best = stretch
            last = i
    return float(best)


@njit(**_JIT)
def binary_diff_longstretch0(y):
    size = y.size
    best = 0
    last = 0
    for i in range(size - 1):
        rising = not (y[i + 1] - y[i] < 0)
        if rising or i == size - 2:
            stretch = i - last
            if stretch > best:
                best = stretch
            last = i
    return float(best)


@njit(**_JIT)
def transition_matrix_3ac_sumdiagcov(y):
    size = y.size
    constant = True
    for i in range(size):
        if y[i] != y[0]:
            constant = False
            break
    if constant:
        return np.nan
    tau = _firstzero(y, size)
    if tau < 1:
        return np.nan
    n_down = (size - 1) // tau + 1
    if n_down < 2:
        return np.nan
    y_down = np.empty(n_down)
    for i in range(n_down):
        y_down[i] = y[i * tau]
    cg = _coarsegrain3(y_down)
    t = np.zeros((3, 3))
    for j in range(n_down - 1):
        a = cg[j] - 1
        b = cg[j + 1] - 1
        if a >= 0 and b >= 0:
            t[a, b] += 1
    t /= n_down - 1
    out = 0.0
    for c in range(3):
        mc = (t[0, c] + t[1, c] + t[2, c]) / 3.0
        v = 0.0
        for r in range(3):
            v += (t[r, c] - mc) ** 2
        out += v / 2.0
    return out


@njit(**_JIT)
def motif_three_quantile_hh(y):
    size = y.size
    if size < 2:
        return np.nan
    yt = _coarsegrain3(y)
    counts = np.zeros((3, 3))
    for k in range(size - 1):
        a = yt[k] - 1
        b = yt[k + 1] - 1
        if a >= 0 and b >= 0:
            counts[a, b] += 1
    hh = 0.0
    for i in range(3):
        for j in range(3):
            p = counts[i, j] / (size - 1.0)
            if p > 0:
                hh -= p * np.log(p)
    return hh


# --------------------------------------------------------------------------
# forecasting
# --------------------------------------------------------------------------


@njit(**_JIT)
def _mean_residuals(y, train_length):
    n = y.size - train_length
    res = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(train_length):
            s += y[i + j]
        res[i] = y[i + train_length] - s / train_length
    return res


@njit(**_JIT)
def local_simple_mean1_tauresrat(y):
    size = y.size
    if size <= 1:
        return np.nan
    res = _mean_residuals(y, 1)
    return _firstzero(res, res.size) / _firstzero(y, size)


@njit(**_JIT)
def local_simple_mean3_stderr(y):
    if y.size <= 3:
        return np.nan
    res = _mean_residuals(y, 3)
    if res.size < 2:
        return np.nan
    return _std(res)


# --------------------------------------------------------------------------
# periodicity
# --------------------------------------------------------------------------


@njit(**_JIT)
def _spline_trend(y):
    """Least-squares cubic spline with one interior knot at floor(n/2) - 1.

    The fit is a projection, so any basis of the spline space gives the
    same curve; a scaled truncated power basis keeps the system well
    conditioned.
    """
    n = y.size
    knot = np.floor(n / 2.0) - 1
    scale = max(n - 1.0, 1.0)
    a = np.empty((n, 5))
    tk = knot / scale
    for i in range(n):
        t = i / scale
        a[i, 0] = 1.0
        a[i, 1] = t
        a[i, 2] = t * t
        a[i, 3] = t * t * t
        r = t - tk
        a[i, 4] = r * r * r if r > 0 else 0.0
    coef = np.linalg.lstsq(a, y.copy())[0]
    return a @ coef


@njit(**_JIT)
def periodicity_wang_th0_01(y):
    size = y.size
    ac_max = int(np.ceil(size / 3.0))
    if ac_max < 3 or size < 7:
        return 0.0
    th = 0.01
    ys = y - _spline_trend(y)
    acf = np.empty(ac_max)
    for tau in range(1, ac_max + 1):
        s = 0.0
        for i in range(size - tau):
            s += ys[i] * ys[i + tau]
        acf[tau - 1] = s / (size - tau)
    trough = -1
    for i in range(1, ac_max - 1):
        slope_in = acf[i] - acf[i - 1]
        slope_out = acf[i + 1] - acf[i]
        if slope_in < 0 and slope_out > 0:
            trough = i
        elif slope_in > 0 and slope_out < 0:
            if trough == -1:
                continue
            if acf[i] - acf[trough] < th:
                continue
            if acf[i] < 0:
                continue
            return float(i)
    return 0.0


# --------------------------------------------------------------------------
# spectral
# --------------------------------------------------------------------------


@njit(**_JIT)
def _welch_rect(y):
    """One-segment rectangular-window Welch spectrum on angular frequency."""
    size = y.size
    nfft = _nextpow2(size)
    m = _mean(y)
    re = np.zeros(nfft)
    im = np.zeros(nfft)
    for i in range(size):
        re[i] = y[i] - m
    _fft(re, im)
    n_out = nfft // 2 + 1
    df = 1.0 / nfft
    w = np.empty(n_out)
    sw = np.empty(n_out)
    for i in range(n_out):
        p = (re[i] * re[i] + im[i] * im[i]) / size
        if i > 0 and i < n_out - 1:
            p *= 2
        w[i] = 2 * np.pi * i * df
        sw[i] = p / (2 * np.pi)
    return w, sw


@njit(**_JIT)
def welch_rect_area_5_1(y):
    w, sw = _welch_rect(y)
    n = w.size
    if n < 2:
        return np.nan
    dw = w[1] - w[0]
    s = 0.0
    for i in range(n // 5):
        s += sw[i]
    return s * dw


@njit(**_JIT)
def welch_rect_centroid(y):
    w, sw = _welch_rect(y)
    cs = np.cumsum(sw)
    thr = cs[cs.size - 1] * 0.5
    for i in range(cs.size):
        if cs[i] > thr:
            return w[i]
    return 0.0


# --------------------------------------------------------------------------
# fluctuation analysis
# --------------------------------------------------------------------------


@njit(**_JIT)
def fluct_anal_prop_r1(y, lag, dfa):
    size = y.size
    if size < 4:
        return 0.0
    lin_low = np.log(5.0)
    lin_high = np.log(float(size // 2))
    n_steps = 50
    tau_step = (lin_high - lin_low) / (n_steps - 1)
    tau = np.empty(n_steps, dtype=np.int64)
    for i in range(n_steps):
        tau[i] = int(np.floor(np.exp(lin_low + i * tau_step) + 0.5))
    n_tau = n_steps
    for i in range(n_steps - 1):
        while tau[i] == tau[i + 1] and i < n_tau - 1:
            for j in range(i + 1, n_steps - 1):
                tau[j] = tau[j + 1]
            n_tau -= 1
    if n_tau < 12:
        return 0.0

    size_cs = size // lag
    ycs = np.empty(size_cs)
    ycs[0] = y[0]
    for i in range(size_cs - 1):
        ycs[i + 1] = ycs[i] + y[(i + 1) * lag]

    f = np.empty(n_tau)
    for i in range(n_tau):
        t = tau[i]
        n_buf = size_cs // t
        sx = 0.0
        sx2 = 0.0
        for k in range(t):
            xv = k + 1.0
            sx += xv
            sx2 += xv * xv
        den = t * sx2 - sx * sx
        fi = 0.0
        for j in range(n_buf):
            off = j * t
            sxy = 0.0
            sy = 0.0
            for k in range(t):
                sxy += (k + 1.0) * ycs[off + k]
                sy += ycs[off + k]
            mm = 0.0
            bb = 0.0
            if den != 0:
                mm = (t * sxy - sx * sy) / den
                bb = (sy * sx2 - sx * sxy) / den
            if dfa:
                for k in range(t):
                    r = ycs[off + k] - (mm * (k + 1) + bb)
                    fi += r * r
            else:
                r = ycs[off] - (mm + bb)
                mx = r
                mn = r
                for k in range(1, t):
                    r = ycs[off + k] - (mm * (k + 1) + bb)
                    if r > mx:
                        mx = r
                    if r < mn:
                        mn = r
                fi += (mx - mn) ** 2
        if dfa:
            f[i] = np.sqrt(fi / (n_buf * t))
        else:
            f[i] = np.sqrt(fi / n_buf)

    log_t = np.empty(n_tau)
    log_f = np.empty(n_tau)
    for i in range(n_tau):
        log_t[i] = np.log(float(tau[i]))
        log_f[i] = np.log(f[i])

    min_points = 6
    n_err = n_tau - 2 * min_points + 1
    sserr = np.empty(n_err)
    for i in range(min_points, n_tau - min_points + 1):
        m1, b1 = _linreg(log_t[:i], log_f[:i])
        m2, b2 = _linreg(log_t[i - 1 :], log_f[i - 1 :])
        s1 = 0.0
        for j in range(i):
            r = log_t[j] * m1 + b1 - log_f[j]
            s1 += r * r
        s2 = 0.0
        for j in range(i - 1, n_tau):
            r = log_t[j] * m2 + b2 - log_f[j]
            s2 += r * r
        sserr[i - min_points] = np.sqrt(s1) + np.sqrt(s2)

    # first-element seeded scan, as in the reference min_
    minimum = sserr[0]
    for i in range(1, n_err):
        if sserr[i] < minimum:
            minimum = sserr[i]
    first = 0.0
    for i in range(n_err):
        if sserr[i] == minimum:
            first = i + min_points - 1.0
            break
    return (first + 1) / n_tau
