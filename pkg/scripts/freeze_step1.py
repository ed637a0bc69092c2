"""Standalone reference computation: first implicit step of the square-slider
spin-down scenario (m=0.5, I_z=5e-4, q_z=0.08, g=9.8, mu=0.31, e_t=e_o=1,
e_r=0.01, h=0.01, v=(0.7,0.9), w_z=10, no applied wrench).

Written independently of the package (plain floats, fixed-point iteration in
end-of-step velocity space) to freeze expected values for tests.  The four
residuals of the per-step quadratic system are evaluated at the result as a
self-check.
"""

import math

m = 0.5
I_z = 5.0e-4
q_z = 0.08
g = 9.8
mu = 0.31
e_t = 1.0
e_o = 1.0
e_r = 0.01
h = 0.01
v_x0, v_y0, w_z0 = 0.7, 0.9, 10.0
p_x = p_y = p_xtau = p_ytau = p_ztau = 0.0
p_n = h * m * g

nu = [v_x0, v_y0, w_z0]
p_t = p_o = p_r = 0.0
sigma = 0.0
for it in range(200000):
    dx = (p_ytau - p_t * q_z) / p_n
    dy = (-p_xtau - p_o * q_z) / p_n
    v_t = nu[0] - nu[2] * dy
    v_o = nu[1] + nu[2] * dx
    v_r = nu[2]
    sigma = math.sqrt((e_t * v_t) ** 2 + (e_o * v_o) ** 2 + (e_r * v_r) ** 2)
    p_t = -mu * p_n * e_t ** 2 * v_t / sigma
    p_o = -mu * p_n * e_o ** 2 * v_o / sigma
    p_r = -mu * p_n * e_r ** 2 * v_r / sigma
    nu_new = [
        v_x0 + (p_t + p_x) / m,
        v_y0 + (p_o + p_y) / m,
        w_z0 + (p_r + p_ztau) / I_z,
    ]
    delta = max(abs(a - b) for a, b in zip(nu, nu_new))
    nu = [0.5 * a + 0.5 * b for a, b in zip(nu, nu_new)]
    if delta < 1e-16:
        break

print("iterations:", it)
print("p_t   =", repr(p_t))
print("p_o   =", repr(p_o))
print("p_r   =", repr(p_r))
print("sigma =", repr(sigma))
print("v_x'  =", repr(v_x0 + (p_t + p_x) / m))
print("v_y'  =", repr(v_y0 + (p_o + p_y) / m))
print("w_z'  =", repr(w_z0 + (p_r + p_ztau) / I_z))

# residuals of the quadratic system at the frozen point
W = w_z0 + (p_r + p_ztau) / I_z
F1 = mu * p_n * e_t ** 2 * (v_x0 + (p_t + p_x) / m + (p_xtau + p_o * q_z) * W / p_n) + p_t * sigma
F2 = mu * p_n * e_o ** 2 * (v_y0 + (p_o + p_y) / m + (p_ytau - p_t * q_z) * W / p_n) + p_o * sigma
F3 = mu * p_n * e_r ** 2 * W + p_r * sigma
F4 = (mu * p_n) ** 2 - (p_r / e_r) ** 2 - (p_t / e_t) ** 2 - (p_o / e_o) ** 2
print("residual:", F1, F2, F3, F4)
print("scale mu^2 pn^2 =", (mu * p_n) ** 2)

# cross product sanity for the pusher moment example: r x f
import numpy as np

r = np.array([-0.025, 0.0, -0.0025])
f = np.array([1.0, 0.0, 0.0])
print("tau for unit push:", np.cross(r, f))
r2 = np.array([-0.025, -0.0025, 0.0])
print("tau for in-plane offset:", np.cross(r2, f))
