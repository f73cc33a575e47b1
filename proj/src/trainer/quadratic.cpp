#include "persist/trainer/trainer.hpp"

#include <cmath>

#include "persist/errors.hpp"

namespace persist::train {

namespace {

double quadratic_value(const std::vector<double>& curvatures, const std::vector<double>& theta) {
    double f = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) f += 0.5 * curvatures[i] * theta[i] * theta[i];
    return f;
}

} // namespace

QuadraticTrace run_quadratic_oracle(std::size_t dim, double condition_number, const data::PersistencyPolicy& policy,
                                    const optim::OptimizerConfig& optimizer, std::size_t steps, std::uint64_t seed) {
    if (dim < 1) throw ConfigError("quadratic dimension must be >= 1");
    if (!(condition_number >= 1.0)) throw ConfigError("condition number must be >= 1");
    policy.validate();
    optimizer.validate();

    QuadraticTrace trace;
    trace.curvatures.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        trace.curvatures[i] =
            dim == 1 ? 1.0 : std::pow(condition_number, static_cast<double>(i) / static_cast<double>(dim - 1));
    }

    std::vector<double> theta(dim, 1.0);
    std::vector<double> grad(dim);
    auto state = optim::OptimizerState::zeros(dim, optimizer.momentum);
    trace.thetas.push_back(theta);
    trace.losses.push_back(quadratic_value(trace.curvatures, theta));

    for (std::uint64_t epoch = 0; trace.losses.size() <= steps; ++epoch) {
        const auto schedule = data::make_epoch_schedule(dim, policy, epoch, seed);
        for (const auto& entry : schedule.entries) {
            if (trace.losses.size() > steps) break;
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i : schedule.example_indices(entry)) grad[i] = trace.curvatures[i] * theta[i];
            optim::step(theta, grad, state, optim::effective_lr(optimizer, entry.reuse_index));
            trace.thetas.push_back(theta);
            trace.losses.push_back(quadratic_value(trace.curvatures, theta));
        }
    }
    return trace;
}

} // namespace persist::train
