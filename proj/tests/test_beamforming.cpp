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

#include "canyon/beamforming.hpp"
#include "canyon/channel.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace canyon;

namespace {

std::vector<double> unit_noise(std::size_t k) { return std::vector<double>(k, 1.0); }

} // namespace

TEST(Sinr, MatchesLonghandFormula)
{
    std::mt19937_64 rng(1);
    const auto h = oracle::random_channels(8, 3, rng);
    const auto w = oracle::random_channels(8, 3, rng);
    const std::vector<double> noise{0.5, 1.0, 2.0};
    const Eigen::VectorXd got = compute_sinr(w, h, noise);
    const auto want = oracle::sinr(w, h, noise);
    for (int k = 0; k < 3; ++k)
        EXPECT_NEAR(got(k) / want[static_cast<std::size_t>(k)], 1.0, 1e-12);
    EXPECT_THROW(compute_sinr(w, h, {1.0}), std::invalid_argument);
}

TEST(Lmmse, UnitResponseAndOptimality)
{
    std::mt19937_64 rng(2);
    const auto h = oracle::random_channels(6, 3, rng);
    const Eigen::VectorXd p = Eigen::Vector3d(0.7, 2.0, 5.0);
    for (std::size_t k = 0; k < 3; ++k)
    {
        const cvec w = lmmse_beamformer(k, h, p);
        EXPECT_NEAR(std::abs(w.dot(h[k]) - 1.0), 0.0, 1e-12);
        // dense reference: (I + sum_{j != k} p_j h_j h_j^H)^{-1} h_k, normalized to unit response
        cmat A = cmat::Identity(6, 6);
        for (std::size_t j = 0; j < 3; ++j)
            if (j != k)
                A += p(static_cast<Eigen::Index>(j)) * h[j] * h[j].adjoint();
        cvec ref = A.fullPivLu().solve(h[k]);
        ref /= std::conj(ref.dot(h[k]));
        EXPECT_LT((w - ref).norm(), 1e-10 * ref.norm());
        // any feasible perturbation is no better
        for (int t = 0; t < 20; ++t)
        {
            cvec z = w + 0.1 * oracle::random_cn(6, rng);
            z /= std::conj(z.dot(h[k]));
            EXPECT_GE(oracle::lmmse_objective(z, k, h, p), oracle::lmmse_objective(w, k, h, p) - 1e-12);
        }
    }
}

TEST(PowerProblem, SingleUserClosedForm)
{
    std::mt19937_64 rng(3);
    const auto h = oracle::random_channels(16, 1, rng);
    const double sigma2 = 2.5, gamma = 7.0;
    const PowerSolution sol = solve_power_problem(h, {sigma2}, gamma, Eigen::VectorXd::Ones(1));
    ASSERT_TRUE(sol.feasible());
    EXPECT_NEAR(sol.total_power() / (gamma * sigma2 / h[0].squaredNorm()), 1.0, 1e-9);
    EXPECT_NEAR(compute_sinr(sol.beamformers, h, {sigma2})(0) / gamma, 1.0, 1e-9);
}

TEST(PowerProblem, OrthogonalUsersDecouple)
{
    cvec a = cvec::Zero(4), b = cvec::Zero(4);
    a(0) = {2.0, 0.0};
    b(2) = {0.0, 3.0};
    const PowerSolution sol = solve_power_problem({a, b}, {1.0, 1.0}, 10.0, Eigen::Vector2d(1, 1));
    ASSERT_TRUE(sol.feasible());
    EXPECT_NEAR(sol.transmit_powers(0), 10.0 / 4.0, 1e-9);
    EXPECT_NEAR(sol.transmit_powers(1), 10.0 / 9.0, 1e-9);
}

TEST(PowerProblem, ReachesTargetAndIsStationary)
{
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 30; ++trial)
    {
        const int N = 8, K = 1 + trial % 4;
        const auto h = oracle::random_channels(N, K, rng);
        const auto noise = unit_noise(static_cast<std::size_t>(K));
        const double gamma = db_to_linear(-5.0 + 0.5 * trial);
        const PowerSolution sol = solve_power_problem(h, noise, gamma, Eigen::VectorXd::Ones(K));
        ASSERT_TRUE(sol.feasible()) << "trial " << trial;
        const auto s = oracle::sinr(sol.beamformers, h, noise);
        for (double v : s)
            EXPECT_NEAR(v / gamma, 1.0, 1e-6);
        // one more update leaves the uplink powers unchanged
        std::vector<cvec> rx;
        const Eigen::VectorXd hn_p = detail::power_update(detail::normalize_channels(h, noise), sol.uplink_powers, gamma, rx);
        EXPECT_LT(((hn_p - sol.uplink_powers).array().abs() / sol.uplink_powers.array()).maxCoeff(), 1e-7);
        // uplink and downlink spend the same total power
        EXPECT_NEAR(sol.uplink_powers.sum() / sol.total_power(), 1.0, 1e-6);
    }
}

TEST(PowerProblem, InitialisationIndependent)
{
    std::mt19937_64 rng(5);
    const auto h = oracle::random_channels(8, 4, rng);
    const auto noise = unit_noise(4);
    const PowerSolution a = solve_power_problem(h, noise, 4.0, Eigen::VectorXd::Constant(4, 1e-6));
    const PowerSolution b = solve_power_problem(h, noise, 4.0, Eigen::VectorXd::Constant(4, 1e3));
    const PowerSolution c = solve_power_problem(h, noise, 4.0, Eigen::Vector4d(0.1, 7, 0, 2));
    ASSERT_TRUE(a.feasible() && b.feasible() && c.feasible());
    EXPECT_LT((a.transmit_powers - b.transmit_powers).norm(), 1e-6 * a.transmit_powers.norm());
    EXPECT_LT((a.transmit_powers - c.transmit_powers).norm(), 1e-6 * a.transmit_powers.norm());
}

TEST(PowerProblem, ColinearUsersCannotBothExceedUnitSinr)
{
    std::mt19937_64 rng(6);
    const cvec h = oracle::random_cn(4, rng);
    PowerSolveOptions opt;
    opt.max_iterations = 5000;
    const PowerSolution sol = solve_power_problem({h, 2.0 * h}, {1.0, 1.0}, 1.5, Eigen::Vector2d(1, 1), opt);
    EXPECT_EQ(sol.status, PowerStatus::infeasible);
    EXPECT_FALSE(sol.feasible());
}

TEST(PowerProblem, RejectsBadInput)
{
    std::mt19937_64 rng(7);
    const auto h = oracle::random_channels(4, 2, rng);
    EXPECT_THROW(solve_power_problem(h, {1.0, 1.0}, 0.0, Eigen::Vector2d(1, 1)), std::invalid_argument);
    EXPECT_THROW(solve_power_problem(h, {1.0, 1.0}, 1.0, Eigen::VectorXd::Ones(3)), std::invalid_argument);
    EXPECT_THROW(solve_power_problem(h, {1.0, -1.0}, 1.0, Eigen::Vector2d(1, 1)), std::invalid_argument);
    EXPECT_THROW(solve_power_problem({}, {}, 1.0, Eigen::VectorXd()), std::invalid_argument);
}

TEST(MaxMin, SingleUserHitsTheEirpBudget)
{
    std::mt19937_64 rng(8);
    RfConstants rf;
    for (int t = 0; t < 10; ++t)
    {
        const auto h = oracle::random_channels(64, 1, rng);
        const double sigma2 = 1e-3 * (t + 1);
        const BeamformerSolution sol = solve_maxmin_sinr(h, {sigma2}, rf);
        ASSERT_TRUE(sol.converged);
        const double target = rf.eirp_watts() * h[0].squaredNorm() / (64.0 * sigma2);
        EXPECT_LE(sol.achieved_gamma, target * (1 + 1e-9));
        EXPECT_GT(sol.achieved_gamma, target / db_to_linear(0.1) * (1 - 1e-9));
        EXPECT_LE(sol.powers(0) * 64.0, rf.eirp_watts() * (1 + 1e-9));
    }
}

TEST(MaxMin, EqualSinrAcrossUsers)
{
    std::mt19937_64 rng(9);
    RfConstants rf;
    for (int t = 0; t < 20; ++t)
    {
        const int K = 2 + t % 3;
        const auto h = oracle::random_channels(16, K, rng);
        const std::vector<double> noise(static_cast<std::size_t>(K), 0.01);
        const BeamformerSolution sol = solve_maxmin_sinr(h, noise, rf);
        ASSERT_TRUE(sol.converged);
        EXPECT_LE(sol.per_user_sinr.maxCoeff() / sol.per_user_sinr.minCoeff(), 1 + 1e-6);
        EXPECT_NEAR(sol.per_user_sinr.minCoeff() / sol.achieved_gamma, 1.0, 1e-6);
        EXPECT_LE(sol.powers.maxCoeff() * 16.0, rf.eirp_watts() * (1 + 1e-9));
    }
}

TEST(MaxMin, WithinOneStepOfTheEirpOptimum)
{
    std::mt19937_64 rng(10);
    RfConstants rf;
    const auto h = oracle::random_channels(8, 3, rng);
    const std::vector<double> noise(3, 0.05);
    const BeamformerSolution sol = solve_maxmin_sinr(h, noise, rf);
    ASSERT_TRUE(sol.converged);
    // one grid step higher must violate the per-subarray EIRP limit
    const PowerSolution next = solve_power_problem(h, noise, sol.achieved_gamma * db_to_linear(0.1), Eigen::VectorXd::Ones(3));
    EXPECT_TRUE(!next.feasible() || next.transmit_powers.maxCoeff() * 8.0 > rf.eirp_watts());
}

TEST(MaxMin, AddingUsersNeverHelps)
{
    std::mt19937_64 rng(11);
    RfConstants rf;
    for (int t = 0; t < 10; ++t)
    {
        const auto h = oracle::random_channels(8, 4, rng);
        double prev = std::numeric_limits<double>::infinity();
        for (int K = 1; K <= 4; ++K)
        {
            const std::vector<cvec> sub(h.begin(), h.begin() + K);
            const double g = solve_maxmin_sinr(sub, std::vector<double>(static_cast<std::size_t>(K), 0.1), rf).achieved_gamma;
            EXPECT_LE(g, prev * (1 + 1e-9));
            prev = g;
        }
    }
}

TEST(MaxMin, InfeasibleFloorGivesZeroSolution)
{
    std::mt19937_64 rng(12);
    RfConstants rf;
    const auto h = oracle::random_channels(4, 2, rng);
    const BeamformerSolution sol = solve_maxmin_sinr(h, {1e6, 1e6}, rf);
    EXPECT_FALSE(sol.converged);
    EXPECT_EQ(sol.powers.sum(), 0.0);
    for (const cvec &w : sol.beamformers)
        EXPECT_EQ(w.norm(), 0.0);
}

TEST(MaxMin, LmmseSteersNullsTowardOtherUsers)
{
    // two users at distinct angles of a 16-element line array; at high SINR the beam toward one
    // user leaves at least 20 dB less gain toward the other
    ArrayGeometry a{1, 16, 0.5, Vec3::UnitX()};
    const cvec h1 = steering_vector(a, Vec3(1, 0.3, 0).normalized()).conjugate();
    const cvec h2 = steering_vector(a, Vec3(1, -0.1, 0).normalized()).conjugate();
    RfConstants rf;
    const BeamformerSolution sol = solve_maxmin_sinr({h1, h2}, {1e-6, 1e-6}, rf);
    ASSERT_TRUE(sol.converged);
    const double own = std::norm(sol.beamformers[0].dot(h1));
    const double leak = std::norm(sol.beamformers[0].dot(h2));
    EXPECT_LE(linear_to_db(leak / own), -20.0);
}

TEST(SumPower, SingleUserIsMatchedFilter)
{
    std::mt19937_64 rng(13);
    const auto h = oracle::random_channels(8, 1, rng);
    const BeamformerSolution sol = solve_maxmin_sum_power(h, {0.5}, 3.0);
    EXPECT_NEAR(sol.achieved_gamma / (3.0 * h[0].squaredNorm() / 0.5), 1.0, 1e-9);
    EXPECT_NEAR(sol.powers.sum(), 3.0, 1e-9);
}

TEST(SumPower, BudgetIsSpentAndSinrBalanced)
{
    std::mt19937_64 rng(14);
    for (int t = 0; t < 10; ++t)
    {
        const auto h = oracle::random_channels(4, 3, rng);
        const BeamformerSolution sol = solve_maxmin_sum_power(h, {1.0, 1.0, 1.0}, 10.0);
        EXPECT_TRUE(sol.converged);
        EXPECT_NEAR(sol.powers.sum() / 10.0, 1.0, 1e-8);
        EXPECT_LE(sol.per_user_sinr.maxCoeff() / sol.per_user_sinr.minCoeff(), 1 + 1e-8);
    }
}
