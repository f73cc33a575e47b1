#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "persist/errors.hpp"
#include "persist/optim/sgd.hpp"

using namespace persist;
using namespace persist::optim;

namespace {

struct Scalar {
    std::vector<double> theta;
    OptimizerState state;

    Scalar(double theta0, double v0, double gamma) : theta{theta0}, state{{v0}, gamma, 0} {}
    void step(double g, double lr) {
        const std::vector<double> grad{g};
        optim::step(theta, grad, state, lr);
    }
};

} // namespace

TEST_CASE("plain SGD when momentum is zero") {
    Scalar s(1.0, 0.0, 0.0);
    s.step(2.0, 0.001);
    CHECK(s.state.velocity[0] == doctest::Approx(-0.002).epsilon(1e-15));
    CHECK(s.theta[0] == doctest::Approx(0.998).epsilon(1e-15));
    CHECK(s.state.step_count == 1);
}

TEST_CASE("zero gradient coasts on momentum") {
    Scalar s(3.0, 0.1, 0.5);
    s.step(0.0, 0.001);
    CHECK(s.state.velocity[0] == 0.05);
    CHECK(s.theta[0] == 3.0 + 0.05);
}

TEST_CASE("two steps with constant gradient") {
    // v1 = -lr g, v2 = -gamma lr g - lr g, theta2 = -lr g (2 + gamma) = -0.0025
    Scalar s(0.0, 0.0, 0.5);
    s.step(1.0, 0.001);
    s.step(1.0, 0.001);
    CHECK(s.theta[0] == doctest::Approx(-0.0025).epsilon(1e-14));
    CHECK(s.theta[0] == doctest::Approx(-0.001 * 1.0 * (2.0 + 0.5)).epsilon(1e-14));
}

TEST_CASE("step rejects non-finite values with the step index") {
    Scalar s(0.0, 0.0, 0.5);
    s.step(1.0, 0.1);
    try {
        s.step(std::numeric_limits<double>::quiet_NaN(), 0.1);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(std::string(e.what()).find("step 1") != std::string::npos);
    }
    Scalar big(1e308, 0.0, 0.0);
    CHECK_THROWS_AS(big.step(-1e308, 1e10), DivergenceError);
    CHECK_THROWS_AS(s.step(1.0, 0.0), ConfigError);
}

TEST_CASE("step requires matching lengths") {
    std::vector<double> theta(3, 0.0);
    std::vector<double> grad(2, 0.0);
    auto state = OptimizerState::zeros(3, 0.5);
    CHECK_THROWS_AS(step(theta, grad, state, 0.1), std::invalid_argument);
}

TEST_CASE("effective_lr policies") {
    OptimizerConfig constant{0.001, 0.5, LrPolicy::Constant};
    OptimizerConfig adaptive{0.001, 0.5, LrPolicy::AdaptivePersistency};
    CHECK(effective_lr(constant, 5) == 0.001);
    CHECK(effective_lr(adaptive, 3) == doctest::Approx(0.003).epsilon(1e-15));
    for (double mu : {0.001, 0.37, 1e-7}) {
        adaptive.learning_rate = mu;
        CHECK(effective_lr(adaptive, 1) == mu);
    }
    CHECK_THROWS_AS(effective_lr(constant, 0), std::out_of_range);
}

TEST_CASE("config validation") {
    CHECK_NOTHROW(OptimizerConfig{}.validate());
    CHECK_THROWS_AS((OptimizerConfig{0.0, 0.5}.validate()), ConfigError);
    CHECK_THROWS_AS((OptimizerConfig{0.1, 1.0}.validate()), ConfigError);
    CHECK_THROWS_AS((OptimizerConfig{0.1, -0.1}.validate()), ConfigError);
    const OptimizerConfig defaults;
    CHECK(defaults.learning_rate == 0.001);
    CHECK(defaults.momentum == 0.5);
}

TEST_CASE("reset_velocity zeroes v and keeps the step count") {
    auto state = OptimizerState::zeros(4, 0.9);
    std::vector<double> theta(4, 1.0);
    const std::vector<double> g{1, 2, 3, 4};
    step(theta, g, state, 0.1);
    reset_velocity(state);
    CHECK(state.velocity == std::vector<double>(4, 0.0));
    CHECK(state.step_count == 1);

    // After a reset the next step equals a momentum-free step from the same point.
    auto theta_a = theta;
    auto theta_b = theta;
    auto fresh = OptimizerState::zeros(4, 0.0);
    step(theta_a, g, state, 0.1);
    step(theta_b, g, fresh, 0.1);
    CHECK(theta_a == theta_b);
}

TEST_CASE("reset mid-trajectory changes the rest of the trajectory") {
    // f(theta) = 0.5 * theta^2, gradient theta.
    auto run = [](bool reset) {
        std::vector<double> theta{1.0};
        auto state = OptimizerState::zeros(1, 0.9);
        for (int t = 0; t < 20; ++t) {
            if (reset && t == 10) reset_velocity(state);
            const std::vector<double> g{theta[0]};
            step(theta, g, state, 0.1);
        }
        return theta[0];
    };
    CHECK(run(true) != run(false));
}

TEST_CASE("trajectory is bitwise equal to the scalar-loop recursion") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const double gamma = 0.05 * static_cast<double>(seed % 19);
        std::vector<double> theta = oracle::random_vector(16, seed);
        std::vector<double> ref_theta = theta;
        std::vector<double> ref_v(16, 0.0);
        auto state = OptimizerState::zeros(16, gamma);
        for (int t = 0; t < 100; ++t) {
            const auto g = oracle::random_vector(16, seed * 1000 + t, -5.0, 5.0);
            const double lr = 0.001 * (1 + t % 5);
            step(theta, g, state, lr);
            oracle::momentum_step(ref_theta, ref_v, g, gamma, lr);
        }
        CHECK(theta == ref_theta);
        CHECK(state.velocity == ref_v);
    }
}

TEST_CASE("gamma = 0 is vanilla gradient descent bitwise") {
    std::vector<double> theta = oracle::random_vector(8, 1);
    std::vector<double> gd = theta;
    auto state = OptimizerState::zeros(8, 0.0);
    for (int t = 0; t < 50; ++t) {
        const auto g = oracle::random_vector(8, 100 + t);
        step(theta, g, state, 0.01);
        for (std::size_t i = 0; i < gd.size(); ++i) gd[i] = gd[i] - 0.01 * g[i];
    }
    CHECK(theta == gd);
}

TEST_CASE("scaling the gradient by 2^j and the rate by 2^-j is exact") {
    for (int j : {-3, 1, 4, 10}) {
        const double c = std::ldexp(1.0, j);
        std::vector<double> a = oracle::random_vector(8, 5);
        std::vector<double> b = a;
        auto sa = OptimizerState::zeros(8, 0.5);
        auto sb = OptimizerState::zeros(8, 0.5);
        for (int t = 0; t < 30; ++t) {
            auto g = oracle::random_vector(8, 200 + t);
            step(a, g, sa, 0.01);
            for (double& x : g) x *= c;
            step(b, g, sb, 0.01 / c);
        }
        CHECK(a == b);
        CHECK(sa.velocity == sb.velocity);
    }
}
