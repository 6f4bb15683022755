# SPDX-License-Identifier: Apache-2.0
#
# qce - channel estimation for coarsely quantized MIMO receivers
# Copyright (C) 2026 The qce authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------
"""Reference values for the unit tests, computed with SciPy/NumPy.

Run from this directory: python3 generate.py > ../unit/oracle_values.hpp
"""

import numpy as np
from scipy import integrate, optimize, special, stats


def quantizer(bits, step):
    half = 2 ** (bits - 1)
    thresholds = np.array([(i - half) * step for i in range(1, 2 * half)])
    labels = np.array([(i - half - 0.5) * step for i in range(1, 2 * half + 1)])
    return thresholds, labels


def q_real(x, bits, step):
    half = 2 ** (bits - 1)
    idx = np.clip(np.floor(x / step) + half, 0, 2 * half - 1)
    return (idx - half + 0.5) * step


def cell_integral(bits, step, sd, f):
    """sum over cells of integral f(x, label) N(x; 0, sd^2) dx."""
    thresholds, labels = quantizer(bits, step)
    edges = np.concatenate([[-np.inf], thresholds, [np.inf]])
    total = 0.0
    for i, label in enumerate(labels):
        val, _ = integrate.quad(lambda x: f(x, label) * stats.norm.pdf(x, scale=sd), edges[i], edges[i + 1],
                                epsabs=1e-14, epsrel=1e-13, limit=200)
        total += val
    return total


def mse(bits, step):
    return cell_integral(bits, step, 1.0, lambda x, l: (x - l) ** 2)


def optimal_step(bits):
    res = optimize.minimize_scalar(lambda s: mse(bits, s), bounds=(0.01, 4.0), method="bounded",
                                   options={"xatol": 1e-10})
    return res.x


def gain(bits, step, variance):
    sd = np.sqrt(variance / 2.0)
    return cell_integral(bits, step, sd, lambda x, l: l * x) / (variance / 2.0)


def quant_variance(bits, step, variance):
    sd = np.sqrt(variance / 2.0)
    return 2.0 * cell_integral(bits, step, sd, lambda x, l: l * l)


def genie_column(angles, gains, spread, n):
    b = spread / np.sqrt(2.0)
    col = np.zeros(n, dtype=complex)
    for mu, g in zip(angles, gains):
        lim = min(np.pi, 12.0 * spread)
        mass, _ = integrate.quad(lambda u: np.exp(-abs(u) / b) / (2 * b), -lim, lim, points=[0.0])
        for m in range(n):
            re, _ = integrate.quad(lambda u: np.exp(-abs(u) / b) / (2 * b) * np.cos(np.pi * m * np.sin(mu + u)),
                                   -lim, lim, points=[0.0], limit=400, epsabs=1e-13)
            im, _ = integrate.quad(lambda u: np.exp(-abs(u) / b) / (2 * b) * np.sin(np.pi * m * np.sin(mu + u)),
                                   -lim, lim, points=[0.0], limit=400, epsabs=1e-13)
            col[m] += g / mass * (re + 1j * im)
    return col * (1.0 / col[0].real)


def pilots(p):
    if p == 1:
        return np.array([1.0 + 0j])
    i = np.arange(p)
    a = (0.5 + i / (2.0 * (p - 1))) * np.exp(1j * np.pi * i / (2 * p))
    return a * np.sqrt(p / np.sum(np.abs(a) ** 2))


def lmmse_one_bit(c_h, a, sigma2):
    n = c_h.shape[0]
    A = np.kron(a.reshape(-1, 1), np.eye(n))
    c_y = A @ c_h @ A.conj().T + sigma2 * np.eye(A.shape[0])
    d = np.diag(c_y).real
    dinv = np.diag(1.0 / np.sqrt(d))
    cn = dinv @ c_y @ dinv
    c_r = 2.0 / np.pi * (np.arcsin(np.clip(cn.real, -1, 1)) + 1j * np.arcsin(np.clip(cn.imag, -1, 1)))
    np.fill_diagonal(c_r, 1.0)  # arcsin(1 - eps) would lose sqrt(eps) here
    B = np.sqrt(2.0 / np.pi) * dinv
    return c_h @ A.conj().T @ B @ np.linalg.inv(c_r)


def lmmse_approx(c_h, a, sigma2, bits, step):
    n = c_h.shape[0]
    A = np.kron(a.reshape(-1, 1), np.eye(n))
    c_y = A @ c_h @ A.conj().T + sigma2 * np.eye(A.shape[0])
    g = np.array([gain(bits, step, v) for v in np.diag(c_y).real])
    rho = min(g.mean(), 1.0)
    c_r = rho ** 2 * c_y + (1 - rho ** 2) * np.diag(np.diag(c_y))
    return c_h @ A.conj().T @ np.diag(g) @ np.linalg.inv(c_r)


def half_normal_fit(thresholds, probs):
    res = optimize.least_squares(lambda xi: special.erf(np.array(thresholds) / (np.sqrt(2.0) * xi[0])) - probs,
                                 x0=[1.0], xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return res.x[0]


def cplx(z):
    return f"{{{z.real:.17g}, {z.imag:.17g}}}"


def vec(name, values, kind="double"):
    body = ", ".join(f"{v:.17g}" for v in values)
    return f"inline const std::vector<{kind}> {name}{{{body}}};"


def cvec(name, values):
    body = ", ".join(cplx(v) for v in values)
    return f"inline const std::vector<std::complex<double>> {name}{{{body}}};"


def cmat(name, m):
    rows = ",\n    ".join("{" + ", ".join(cplx(v) for v in row) + "}" for row in m)
    return f"inline const std::vector<std::vector<std::complex<double>>> {name}{{\n    {rows}}};"


LICENSE = """// SPDX-License-Identifier: Apache-2.0
//
// qce - channel estimation for coarsely quantized MIMO receivers
// Copyright (C) 2026 The qce authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
"""

out = [LICENSE.rstrip("\n")]
out.append("// Generated by tests/oracles/generate.py (SciPy/NumPy). Do not edit.")
out.append("#pragma once\n\n#include <complex>\n#include <vector>\n\nnamespace oracle {\n")

xs = [-6.0, -2.5, -1.0, -0.1, 0.0, 0.3, 1.7, 4.0]
out.append(vec("kCdfX", xs))
out.append(vec("kCdf", stats.norm.cdf(xs)))
ps = [1e-9, 0.1, 0.5, 0.6826894921370859, 0.9, 0.999, 1 - 1e-12]
out.append(vec("kErfInvP", ps))
out.append(vec("kErfInv", special.erfinv(ps)))

steps = [optimal_step(b) for b in range(1, 6)]
out.append(vec("kOptimalStep", steps))
out.append(vec("kOptimalMse", [mse(b, s) for b, s in zip(range(1, 6), steps)]))

cases = [(1, np.sqrt(2.0), 1.0), (1, np.sqrt(2.0), 2.5), (2, 0.9957, 1.0), (2, 0.7, 3.0), (3, 0.586, 1.0),
         (3, 0.4, 0.5), (4, 0.3352, 1.0), (8, 0.0308, 1.0)]
out.append(vec("kGainBits", [c[0] for c in cases], "int"))
out.append(vec("kGainStep", [c[1] for c in cases]))
out.append(vec("kGainVariance", [c[2] for c in cases]))
out.append(vec("kGain", [gain(*c) for c in cases]))
out.append(vec("kQuantVariance", [quant_variance(*c) for c in cases]))

out.append(cvec("kGenieOneCluster", genie_column([0.7], [1.0], np.deg2rad(2.0), 8)))
out.append(cvec("kGenieTwoClusters", genie_column([0.3, 2.6], [0.35, 0.65], np.deg2rad(5.0), 8)))

out.append(cvec("kPilots2", pilots(2)))
out.append(cvec("kPilots4", pilots(4)))

c_h = np.array([[1.0, 0.6 + 0.3j, 0.2 - 0.1j], [0.6 - 0.3j, 1.2, 0.5 + 0.2j], [0.2 + 0.1j, 0.5 - 0.2j, 0.8]])
out.append(cmat("kLmmseCh", c_h))
out.append(cmat("kLmmseOneBitP1", lmmse_one_bit(c_h, pilots(1), 0.5)))
out.append(cmat("kLmmseOneBitP2", lmmse_one_bit(c_h, pilots(2), 0.5)))
out.append(cmat("kLmmseThreeBitP1", lmmse_approx(c_h, pilots(1), 0.5, 3, 0.5)))

thr = [0.5, 1.0, 1.5]
probs = np.array([0.30, 0.56, 0.76])
out.append(vec("kHalfNormalThresholds", thr))
out.append(vec("kHalfNormalProbs", probs))
out.append(f"inline constexpr double kHalfNormalXi = {half_normal_fit(thr, probs):.17g};")

r = np.array([0.3 - 0.2j, -1.1 + 0.4j, 0.7 + 0.9j])
cinv = np.linalg.inv(c_h)
logdens = (-3 * np.log(np.pi) - np.log(np.linalg.det(c_h).real) - (r.conj() @ cinv @ r).real)
out.append(cvec("kDensitySample", r))
out.append(f"inline constexpr double kLogDensity = {logdens:.17g};")

out.append("\n}  // namespace oracle")
print("\n".join(out))
