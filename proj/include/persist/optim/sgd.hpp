#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace persist::optim {

enum class LrPolicy {
    Constant,            ///< mu on every use of a minibatch
    AdaptivePersistency, ///< k * mu on the k-th consecutive use of a minibatch
};

struct OptimizerConfig {
    double learning_rate = 0.001;
    double momentum = 0.5;
    LrPolicy lr_policy = LrPolicy::Constant;

    /// Throws ConfigError unless learning_rate > 0 and 0 <= momentum < 1.
    void validate() const;
};

struct OptimizerState {
    std::vector<double> velocity;
    double momentum = 0.0;
    std::uint64_t step_count = 0;

    static OptimizerState zeros(std::size_t parameter_count, double momentum);
};

/// One momentum-SGD update, elementwise:
///   v <- momentum * v - lr * grad_sum
///   theta <- theta + v
/// `grad_sum` is the SUM of per-example gradients over the minibatch.
/// Throws DivergenceError (tagged with the step index) if the gradient or the
/// updated parameters are not finite.
void step(std::span<double> params, std::span<const double> grad_sum, OptimizerState& state,
          double effective_lr);

/// Learning rate for the k-th use (k >= 1) of the current minibatch.
double effective_lr(const OptimizerConfig& config, int reuse_index);

/// Zeroes the velocity; step_count is kept. Never called by the trainer.
void reset_velocity(OptimizerState& state);

} // namespace persist::optim
