// SPDX-License-Identifier: Apache-2.0
//
// canyon-sim: interference and capacity simulation for mm-wave picocells in street canyons
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

#ifndef CANYON_LP_HPP
#define CANYON_LP_HPP

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace canyon {

/// Dense linear program: optimize c^T x subject to A_eq x = b_eq, A_ub x <= b_ub, x >= lower.
struct LinearProgram
{
    Eigen::VectorXd objective;
    Eigen::MatrixXd a_eq;
    Eigen::VectorXd b_eq;
    Eigen::MatrixXd a_ub;
    Eigen::VectorXd b_ub;
    Eigen::VectorXd lower_bounds; // empty means all zero
    bool maximize = false;

    Eigen::Index num_vars() const { return objective.size(); }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult
{
    LpStatus status = LpStatus::infeasible;
    Eigen::VectorXd x;
    double value = 0.0;
    int pivots = 0;
};

namespace detail {

// Dense tableau with Bland's rule: lowest-index entering column, lowest-index leaving basic
// variable among ratio ties. Row `m` of `t` holds reduced costs, column `cols` the right-hand side.
class SimplexTableau
{
public:
    SimplexTableau(Eigen::MatrixXd tableau, std::vector<Eigen::Index> basis, Eigen::Index allowed_cols)
        : t_(std::move(tableau)), basis_(std::move(basis)), allowed_(allowed_cols)
    {
    }

    // Minimizes the objective row; returns false when unbounded.
    bool run(int &pivots)
    {
        constexpr double cost_eps = 1e-10;
        constexpr double pivot_eps = 1e-11;
        const Eigen::Index m = rows();
        const Eigen::Index rhs = t_.cols() - 1;
        for (int guard = 0; guard < 1000000; ++guard)
        {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < allowed_; ++j)
                if (t_(m, j) < -cost_eps)
                {
                    enter = j;
                    break;
                }
            if (enter < 0)
                return true;
            Eigen::Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < m; ++i)
            {
                const double a = t_(i, enter);
                if (a <= pivot_eps)
                    continue;
                const double ratio = t_(i, rhs) / a;
                if (ratio < best - 1e-12 || (std::abs(ratio - best) <= 1e-12 && basis_[i] < basis_[leave]))
                {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave < 0)
                return false;
            pivot(leave, enter);
            ++pivots;
        }
        throw std::runtime_error("simplex: iteration guard exceeded");
    }

    void pivot(Eigen::Index r, Eigen::Index c)
    {
        t_.row(r) /= t_(r, c);
        for (Eigen::Index i = 0; i < t_.rows(); ++i)
            if (i != r && t_(i, c) != 0.0)
                t_.row(i) -= t_(i, c) * t_.row(r);
        basis_[r] = c;
    }

    Eigen::Index rows() const { return t_.rows() - 1; }
    Eigen::MatrixXd &table() { return t_; }
    std::vector<Eigen::Index> &basis() { return basis_; }
    void set_allowed(Eigen::Index cols) { allowed_ = cols; }

private:
    Eigen::MatrixXd t_;
    std::vector<Eigen::Index> basis_;
    Eigen::Index allowed_;
};

} // namespace detail

/// Two-phase primal simplex. Infeasible and unbounded outcomes are reported as statuses.
inline LpResult solve_lp(const LinearProgram &lp)
{
    const Eigen::Index n = lp.num_vars();
    const Eigen::Index m_ub = lp.a_ub.rows();
    const Eigen::Index m_eq = lp.a_eq.rows();
    if (n == 0)
        throw std::invalid_argument("solve_lp: no variables");
    if ((m_ub > 0 && (lp.a_ub.cols() != n || lp.b_ub.size() != m_ub)) ||
        (m_eq > 0 && (lp.a_eq.cols() != n || lp.b_eq.size() != m_eq)) ||
        (lp.lower_bounds.size() != 0 && lp.lower_bounds.size() != n))
        throw std::invalid_argument("solve_lp: inconsistent dimensions");
    auto finite = [](const auto &m) { return m.size() == 0 || m.allFinite(); };
    if (!finite(lp.objective) || !finite(lp.a_eq) || !finite(lp.b_eq) || !finite(lp.a_ub) || !finite(lp.b_ub) ||
        !finite(lp.lower_bounds))
        throw std::invalid_argument("solve_lp: non-finite input");

    const Eigen::VectorXd lower = lp.lower_bounds.size() ? lp.lower_bounds : Eigen::VectorXd::Zero(n);
    const Eigen::Index m = m_ub + m_eq;

    // shift x = y + lower, y >= 0
    Eigen::MatrixXd A(m, n);
    Eigen::VectorXd b(m);
    if (m_ub)
    {
        A.topRows(m_ub) = lp.a_ub;
        b.head(m_ub) = lp.b_ub - lp.a_ub * lower;
    }
    if (m_eq)
    {
        A.bottomRows(m_eq) = lp.a_eq;
        b.tail(m_eq) = lp.b_eq - lp.a_eq * lower;
    }

    // columns: y (n) | slacks (m_ub) | artificials (one per row that lacks a +1 slack)
    std::vector<Eigen::Index> needs_artificial;
    for (Eigen::Index i = 0; i < m; ++i)
        if (i >= m_ub || b(i) < 0.0)
            needs_artificial.push_back(i);
    const Eigen::Index n_art = static_cast<Eigen::Index>(needs_artificial.size());
    const Eigen::Index n_real = n + m_ub;
    const Eigen::Index cols = n_real + n_art;

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, cols + 1);
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i)
    {
        const double sign = b(i) < 0.0 ? -1.0 : 1.0;
        t.row(i).head(n) = sign * A.row(i);
        if (i < m_ub)
            t(i, n + i) = sign;
        t(i, cols) = sign * b(i);
        basis[static_cast<std::size_t>(i)] = n + i;
    }
    for (Eigen::Index a = 0; a < n_art; ++a)
    {
        const Eigen::Index row = needs_artificial[static_cast<std::size_t>(a)];
        t(row, n_real + a) = 1.0;
        basis[static_cast<std::size_t>(row)] = n_real + a;
    }

    LpResult result;
    detail::SimplexTableau tab(std::move(t), std::move(basis), cols);

    if (n_art > 0)
    {
        // phase 1: minimize the sum of artificials; reduced costs = -(sum of their rows)
        Eigen::MatrixXd &T = tab.table();
        T.row(m).setZero();
        for (Eigen::Index a = 0; a < n_art; ++a)
            T(m, n_real + a) = 1.0;
        for (Eigen::Index a = 0; a < n_art; ++a)
            T.row(m) -= T.row(needs_artificial[static_cast<std::size_t>(a)]);
        tab.run(result.pivots);
        if (-T(m, cols) > 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff()))
        {
            result.status = LpStatus::infeasible;
            return result;
        }
        // drive zero-level artificials out of the basis; rows with no real pivot are redundant
        for (Eigen::Index i = 0; i < m; ++i)
        {
            if (tab.basis()[static_cast<std::size_t>(i)] < n_real)
                continue;
            for (Eigen::Index j = 0; j < n_real; ++j)
                if (std::abs(T(i, j)) > 1e-9)
                {
                    tab.pivot(i, j);
                    break;
                }
        }
        tab.set_allowed(n_real);
    }

    // phase 2
    Eigen::MatrixXd &T = tab.table();
    const double sense = lp.maximize ? -1.0 : 1.0;
    T.row(m).setZero();
    T.row(m).head(n) = sense * lp.objective.transpose();
    for (Eigen::Index i = 0; i < m; ++i)
    {
        const Eigen::Index bv = tab.basis()[static_cast<std::size_t>(i)];
        if (bv < n && T(m, bv) != 0.0)
            T.row(m) -= T(m, bv) * T.row(i);
    }
    if (!tab.run(result.pivots))
    {
        result.status = LpStatus::unbounded;
        return result;
    }

    // Re-solve the final basis against the original data; the tableau accumulates rounding
    // over long degenerate pivot sequences. Rows still held by an artificial are redundant.
    std::vector<Eigen::Index> rows_kept, basic;
    for (Eigen::Index i = 0; i < m; ++i)
    {
        const Eigen::Index bv = tab.basis()[static_cast<std::size_t>(i)];
        if (bv < n_real)
        {
            rows_kept.push_back(i);
            basic.push_back(bv);
        }
    }
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_kept.size()), static_cast<Eigen::Index>(basic.size()));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(rows_kept.size()));
    for (std::size_t r = 0; r < rows_kept.size(); ++r)
    {
        const Eigen::Index i = rows_kept[r];
        rhs(static_cast<Eigen::Index>(r)) = b(i);
        for (std::size_t c = 0; c < basic.size(); ++c)
        {
            const Eigen::Index j = basic[c];
            B(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j < n ? A(i, j) : (j - n == i ? 1.0 : 0.0);
        }
    }
    const Eigen::VectorXd xb = basic.empty() ? Eigen::VectorXd() : Eigen::VectorXd(B.colPivHouseholderQr().solve(rhs));
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    for (std::size_t c = 0; c < basic.size(); ++c)
    {
        const Eigen::Index bv = basic[c];
        if (bv < n)
            y(bv) = std::max(xb(static_cast<Eigen::Index>(c)), 0.0);
    }
    result.x = y + lower;
    result.value = lp.objective.dot(result.x);
    result.status = LpStatus::optimal;

    // post-hoc feasibility of the reported point
    const double tol = 1e-7;
    const auto scale = [](const Eigen::VectorXd &v) { return 1.0 + (v.size() ? v.cwiseAbs().maxCoeff() : 0.0); };
    bool ok = ((result.x - lower).array() >= -tol).all();
    if (m_ub)
        ok = ok && ((lp.a_ub * result.x - lp.b_ub).array() <= tol * scale(lp.b_ub)).all();
    if (m_eq)
        ok = ok && ((lp.a_eq * result.x - lp.b_eq).cwiseAbs().array() <= tol * scale(lp.b_eq)).all();
    if (!ok)
        throw std::runtime_error("solve_lp: optimal point fails the feasibility check");
    return result;
}

} // namespace canyon

#endif // CANYON_LP_HPP
