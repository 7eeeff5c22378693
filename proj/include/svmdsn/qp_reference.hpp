// Copyright 2026 The svmdsn authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Reference solver used to validate the SMO path.
//
// It attacks the *primal* of the mixed objective as an explicit convex QP
// over (w, b, slacks) with a Mehrotra predictor-corrector interior-point
// method -- a completely different algorithm family from SMO, and one that
// never touches the dual derivation the production solver rests on.  If the
// two agree on the objective, both the dual mapping and the decomposition
// are confirmed independently.
//
// Dense linear algebra throughout; intended for small instances only.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "svmdsn/errors.hpp"
#include "svmdsn/solver.hpp"

namespace svmdsn {

struct QpProblem {
    Eigen::MatrixXd P;  // quadratic term (PSD)
    Eigen::VectorXd q;  // linear term
    Eigen::MatrixXd G;  // inequality matrix, G v <= h
    Eigen::VectorXd h;
};

struct QpResult {
    Eigen::VectorXd v;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Mehrotra predictor-corrector for  min 1/2 v'Pv + q'v  s.t.  Gv <= h.
inline QpResult solve_qp(const QpProblem& prob, double tol = 1e-10, int max_iter = 100) {
    const Eigen::Index n = prob.P.rows();
    const Eigen::Index m = prob.G.rows();
    if (prob.P.cols() != n || prob.q.size() != n || prob.G.cols() != n ||
        prob.h.size() != m)
        throw shape_error("solve_qp: inconsistent problem dimensions");
    if (m == 0) throw validation_error("solve_qp: need at least one constraint");

    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd s = (prob.h - prob.G * v).cwiseMax(1.0);
    Eigen::VectorXd z = Eigen::VectorXd::Ones(m);

    QpResult res;
    const double reg = 1e-10;  // keeps the reduced system factorizable
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it;
        Eigen::VectorXd rd = prob.P * v + prob.q + prob.G.transpose() * z;
        Eigen::VectorXd rp = prob.G * v + s - prob.h;
        double mu = s.dot(z) / static_cast<double>(m);
        if (rd.lpNorm<Eigen::Infinity>() < tol && rp.lpNorm<Eigen::Infinity>() < tol &&
            mu < tol) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd w = z.cwiseQuotient(s);  // diag weights z/s
        Eigen::MatrixXd M = prob.P;
        M.noalias() += prob.G.transpose() * w.asDiagonal() * prob.G;
        M.diagonal().array() += reg;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(M);

        struct Step {
            Eigen::VectorXd dv, ds, dz;
        };
        // rc is the complementarity residual target: Z ds + S dz = -rc.
        auto solve_step = [&](const Eigen::VectorXd& rc) {
            Step st;
            Eigen::VectorXd rhs =
                -rd + prob.G.transpose() * (rc.cwiseQuotient(s) - w.cwiseProduct(rp));
            st.dv = ldlt.solve(rhs);
            st.ds = -rp - prob.G * st.dv;
            st.dz = -(rc + z.cwiseProduct(st.ds)).cwiseQuotient(s);
            return st;
        };
        auto max_step = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& dx) {
            double a = 1.0;
            for (Eigen::Index i = 0; i < x.size(); ++i)
                if (dx[i] < 0.0) a = std::min(a, -x[i] / dx[i]);
            return a;
        };

        // Predictor (affine scaling).
        Step aff = solve_step(s.cwiseProduct(z));
        double a_aff = std::min(max_step(s, aff.ds), max_step(z, aff.dz));
        double mu_aff =
            (s + a_aff * aff.ds).dot(z + a_aff * aff.dz) / static_cast<double>(m);
        double sigma = std::pow(mu_aff / mu, 3.0);

        // Corrector with centering.
        Step st = solve_step(s.cwiseProduct(z) + aff.ds.cwiseProduct(aff.dz) -
                             Eigen::VectorXd::Constant(m, sigma * mu));
        double alpha = 0.99 * std::min(max_step(s, st.ds), max_step(z, st.dz));
        v += alpha * st.dv;
        s += alpha * st.ds;
        z += alpha * st.dz;
    }
    res.v = v;
    res.objective = 0.5 * v.dot(prob.P * v) + prob.q.dot(v);
    return res;
}

// Assemble the mixed-objective primal as a QP and solve it.
//
// Variables are packed (w[0..d), b, one slack per Theta sample, then the
// down/up tube slacks per interior sample).
inline LinearHyperplane reference_train_mixed(std::span<const VirtualSample> samples,
                                              const SolverConfig& cfg,
                                              QpResult* info = nullptr) {
    cfg.validate();
    validate_virtual_samples(samples);
    const std::size_t n = samples.size();
    const std::size_t d = samples.front().input.size();
    if (n > 500 || d > 64)
        throw config_error("reference solver is limited to small instances");

    std::size_t n_theta = 0;
    for (const auto& smp : samples) n_theta += smp.in_theta ? 1 : 0;
    const std::size_t n_tube = n - n_theta;
    const Eigen::Index nv = static_cast<Eigen::Index>(d + 1 + n_theta + 2 * n_tube);
    const Eigen::Index nc = static_cast<Eigen::Index>(2 * n_theta + 4 * n_tube);

    QpProblem prob;
    prob.P = Eigen::MatrixXd::Zero(nv, nv);
    for (std::size_t i = 0; i < d; ++i) prob.P(i, i) = 1.0;
    prob.q = Eigen::VectorXd::Zero(nv);
    prob.G = Eigen::MatrixXd::Zero(nc, nv);
    prob.h = Eigen::VectorXd::Zero(nc);

    const Eigen::Index bcol = static_cast<Eigen::Index>(d);
    Eigen::Index slack = bcol + 1;
    Eigen::Index row = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const VirtualSample& smp = samples[k];
        const double t = smp.virtual_label;
        if (smp.in_theta) {
            prob.q(slack) = cfg.c_hinge;
            // t*(w.x + b) >= 1 - slack  ->  -t*w.x - t*b - slack <= -1
            for (std::size_t i = 0; i < d; ++i)
                prob.G(row, static_cast<Eigen::Index>(i)) = -t * smp.input[i];
            prob.G(row, bcol) = -t;
            prob.G(row, slack) = -1.0;
            prob.h(row) = -1.0;
            ++row;
            prob.G(row, slack) = -1.0;  // slack >= 0
            prob.h(row) = 0.0;
            ++row;
            ++slack;
        } else {
            // xi_dn: t - u <= eps + xi_dn; xi_up: u - t <= eps + xi_up.
            const Eigen::Index dn = slack, up = slack + 1;
            prob.q(dn) = cfg.c_svr;
            prob.q(up) = cfg.c_svr;
            for (std::size_t i = 0; i < d; ++i)
                prob.G(row, static_cast<Eigen::Index>(i)) = -smp.input[i];
            prob.G(row, bcol) = -1.0;
            prob.G(row, dn) = -1.0;
            prob.h(row) = cfg.epsilon - t;
            ++row;
            for (std::size_t i = 0; i < d; ++i)
                prob.G(row, static_cast<Eigen::Index>(i)) = smp.input[i];
            prob.G(row, bcol) = 1.0;
            prob.G(row, up) = -1.0;
            prob.h(row) = cfg.epsilon + t;
            ++row;
            prob.G(row, dn) = -1.0;
            prob.h(row) = 0.0;
            ++row;
            prob.G(row, up) = -1.0;
            prob.h(row) = 0.0;
            ++row;
            slack += 2;
        }
    }

    QpResult res = solve_qp(prob);
    if (info) *info = res;
    Vector w(d);
    for (std::size_t i = 0; i < d; ++i) w[i] = res.v(static_cast<Eigen::Index>(i));
    return LinearHyperplane(std::move(w), res.v(bcol));
}

}  // namespace svmdsn
