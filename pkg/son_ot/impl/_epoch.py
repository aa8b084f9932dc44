"""一个 epoch 的逐项迭代（numba 编译）。

迭代规则：
  X_{t+1} = prox / proj(X_t + step·g_t)          （只作用于该项的两行 / 两列 / 一行 / 一列）
  a_t     = rho_acc·(X_t − X_{t+1})/step − alpha_scale·total   （total 取更新前的值，限制在支撑上）
  g_t += a_t,  total += a_t
"""
import numpy as np
from numba import njit

from son_ot.numerics._kernels import pair_prox_into, penalty_prox_into, project_simplex_into


@njit(cache=True, nogil=True)
def _finite(v):
    for i in range(v.shape[0]):
        if not np.isfinite(v[i]):
            return False
    return True


@njit(cache=True, nogil=True)
def _decode_pair(idx, size):
    l = idx // (size - 1)
    r = idx % (size - 1)
    k = r if r < l else r + 1
    return l, k


@njit(cache=True, nogil=True)
def _pair_step(xa, xb, ga, gb, ta, tb, za, zb, rho, step, rho_acc, alpha_scale, buf_a, buf_b, out_a, out_b):
    """对一对切片 (xa, xb) 做模板近端一步（阈值 step·rho）并更新记忆；切片可以是非连续视图"""
    d = xa.shape[0]
    for j in range(d):
        buf_a[j] = xa[j] + step * ga[j] - step * za[j]
        buf_b[j] = xb[j] + step * gb[j] - step * zb[j]
    pair_prox_into(step * rho, buf_a, buf_b, out_a, out_b)
    for j in range(d):
        a0 = rho_acc * (xa[j] - out_a[j]) / step - alpha_scale * ta[j]
        a1 = rho_acc * (xb[j] - out_b[j]) / step - alpha_scale * tb[j]
        xa[j] = out_a[j]
        xb[j] = out_b[j]
        ga[j] += a0
        gb[j] += a1
        ta[j] += a0
        tb[j] += a1


@njit(cache=True, nogil=True)
def _constraint_step(x, h, tot, mass, step, rho_acc, alpha_scale, relaxed, theta, buf, out):
    d = x.shape[0]
    for j in range(d):
        buf[j] = x[j] + step * h[j]
    if relaxed:
        penalty_prox_into(buf, mass, step * theta, out)
    else:
        project_simplex_into(buf, mass, out)
    for j in range(d):
        a = rho_acc * (x[j] - out[j]) / step - alpha_scale * tot[j]
        x[j] = out[j]
        h[j] += a
        tot[j] += a


@njit(cache=True, nogil=True)
def run_epoch(X, g_row, g_col, h_row, h_col, total, terms, D, R, S, mu, nu,
              lam, row_div, col_div, step, rho_acc, alpha_scale, relaxed, theta):
    """依次执行 terms 中的每一项；返回首个出现非有限值的位置，全部有限时返回 −1"""
    m, n = X.shape
    n_row = m * (m - 1)
    n_col = n * (n - 1)
    buf_n0 = np.empty(n)
    buf_n1 = np.empty(n)
    out_n0 = np.empty(n)
    out_n1 = np.empty(n)
    buf_m0 = np.empty(m)
    buf_m1 = np.empty(m)
    out_m0 = np.empty(m)
    out_m1 = np.empty(m)
    za = np.empty(max(m, n))
    zb = np.empty(max(m, n))
    for it in range(terms.shape[0]):
        idx = terms[it]
        if idx < n_row:
            l, k = _decode_pair(idx, m)
            for j in range(n):
                za[j] = D[l, j] / row_div
                zb[j] = D[k, j] / row_div
            _pair_step(X[l], X[k], g_row[l, k, 0], g_row[l, k, 1], total[l], total[k],
                       za[:n], zb[:n], lam * R[l, k], step, rho_acc, alpha_scale,
                       buf_n0, buf_n1, out_n0, out_n1)
            if not (_finite(X[l]) and _finite(X[k])):
                return it
        elif idx < n_row + n_col:
            l, k = _decode_pair(idx - n_row, n)
            for i in range(m):
                za[i] = D[i, l] / col_div
                zb[i] = D[i, k] / col_div
            _pair_step(X[:, l], X[:, k], g_col[l, k, 0], g_col[l, k, 1], total[:, l], total[:, k],
                       za[:m], zb[:m], lam * S[l, k], step, rho_acc, alpha_scale,
                       buf_m0, buf_m1, out_m0, out_m1)
            if not (_finite(X[:, l]) and _finite(X[:, k])):
                return it
        elif idx < n_row + n_col + m:
            l = idx - n_row - n_col
            _constraint_step(X[l], h_row[l], total[l], mu[l], step, rho_acc, alpha_scale,
                             relaxed, theta, buf_n0, out_n0)
            if not _finite(X[l]):
                return it
        else:
            k = idx - n_row - n_col - m
            _constraint_step(X[:, k], h_col[k], total[:, k], nu[k], step, rho_acc, alpha_scale,
                             relaxed, theta, buf_m0, out_m0)
            if not _finite(X[:, k]):
                return it
    return -1
