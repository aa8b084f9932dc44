"""numba 编译的底层数值核：块软阈值、成对近端、单纯形投影、带惩罚的非负近端。

这里只做计算，不做参数校验；校验由 prox.py / simplex.py 的公开函数负责。
"""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def vec_norm(c):
    acc = 0.0
    for i in range(c.shape[0]):
        acc += c[i] * c[i]
    return np.sqrt(acc)


@njit(cache=True, nogil=True)
def shrink_factor(lam, c):
    """shrink(λ, c) = factor·c；‖c‖ < λ 或 c = 0 时 factor = 0"""
    nc = vec_norm(c)
    if nc == 0.0 or nc < lam:
        return 0.0
    return (nc - lam) / nc


@njit(cache=True, nogil=True)
def pair_prox_into(lam, a, b, out_x, out_y):
    """(a+b)/2 ± shrink(λ, (a−b)/2)，结果写入 out_x / out_y（允许与 a、b 同址）"""
    d = a.shape[0]
    half = np.empty(d)
    mid = np.empty(d)
    for i in range(d):
        half[i] = 0.5 * (a[i] - b[i])
        mid[i] = 0.5 * (a[i] + b[i])
    f = shrink_factor(lam, half)
    for i in range(d):
        s = f * half[i]
        out_x[i] = mid[i] + s
        out_y[i] = mid[i] - s


@njit(cache=True, nogil=True)
def project_simplex_into(v, mass, out):
    """排序阈值法：找 τ 使 Σ max(v_i − τ, 0) = mass"""
    d = v.shape[0]
    u = np.sort(v)[::-1]
    css = 0.0
    tau = 0.0
    for k in range(d):
        css += u[k]
        t = (css - mass) / (k + 1)
        if u[k] - t > 0.0:
            tau = t
    for i in range(d):
        x = v[i] - tau
        out[i] = x if x > 0.0 else 0.0


@njit(cache=True, nogil=True)
def penalty_prox_into(v, mass, weight, out):
    """argmin_{x≥0} ½‖x − v‖² + (weight/2)(Σx − mass)²

    KKT: x_i = max(v_i − t, 0)，t = weight·(Σx − mass)；t 关于活跃集单调，按排序断点求解。
    """
    d = v.shape[0]
    u = np.sort(v)[::-1]
    t = -weight * mass
    if u[0] > t:
        css = 0.0
        for k in range(1, d + 1):
            css += u[k - 1]
            t = weight * (css - mass) / (1.0 + weight * k)
            if k == d or u[k] <= t:
                break
    for i in range(d):
        x = v[i] - t
        out[i] = x if x > 0.0 else 0.0
