#include "persist/optim/sgd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "persist/errors.hpp"

namespace persist::optim {

void OptimizerConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        throw ConfigError("learning rate must be positive and finite, got " + std::to_string(learning_rate));
    if (!(momentum >= 0.0 && momentum < 1.0))
        throw ConfigError("momentum must lie in [0, 1), got " + std::to_string(momentum));
}

OptimizerState OptimizerState::zeros(std::size_t parameter_count, double momentum) {
    return {std::vector<double>(parameter_count, 0.0), momentum, 0};
}

void step(std::span<double> params, std::span<const double> grad_sum, OptimizerState& state,
          double effective_lr) {
    if (params.size() != grad_sum.size() || params.size() != state.velocity.size())
        throw std::invalid_argument("optimizer step: parameter, gradient and velocity lengths differ");
    if (!(effective_lr > 0.0)) throw ConfigError("optimizer step: learning rate must be positive");

    const auto where = [&] { return " at step " + std::to_string(state.step_count); };
    for (std::size_t i = 0; i < grad_sum.size(); ++i) {
        if (!std::isfinite(grad_sum[i]))
            throw DivergenceError("non-finite gradient entry " + std::to_string(i) + where());
    }

    const double gamma = state.momentum;
    auto& v = state.velocity;
    for (std::size_t i = 0; i < params.size(); ++i) {
        v[i] = gamma * v[i] - effective_lr * grad_sum[i];
        params[i] = params[i] + v[i];
    }
    ++state.step_count;

    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!std::isfinite(params[i]) || !std::isfinite(v[i]))
            throw DivergenceError("parameter " + std::to_string(i) + " became non-finite" + where());
    }
}

double effective_lr(const OptimizerConfig& config, int reuse_index) {
    if (reuse_index < 1)
        throw std::out_of_range("reuse index must be >= 1, got " + std::to_string(reuse_index));
    switch (config.lr_policy) {
    case LrPolicy::Constant: return config.learning_rate;
    case LrPolicy::AdaptivePersistency: return static_cast<double>(reuse_index) * config.learning_rate;
    }
    return config.learning_rate;
}

void reset_velocity(OptimizerState& state) {
    std::fill(state.velocity.begin(), state.velocity.end(), 0.0);
}

} // namespace persist::optim
