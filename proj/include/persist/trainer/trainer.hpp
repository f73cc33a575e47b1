#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "persist/data/dataset.hpp"
#include "persist/data/schedule.hpp"
#include "persist/nn/network.hpp"
#include "persist/optim/sgd.hpp"

namespace persist::train {

struct ExperimentConfig {
    data::PersistencyPolicy policy;
    optim::OptimizerConfig optimizer;
    int epochs = 100;
    std::uint64_t seed = 0;
    std::vector<nn::LayerSpec> architecture;
    int eval_every = 1;

    void validate() const;
};

/// Test-set metrics after an epoch. Counters are cumulative from the start of training.
struct MetricsRecord {
    int epoch = 0;
    double wall_clock_s = 0.0;  // training time only, evaluation excluded
    double train_loss = 0.0;    // mean of the epoch's minibatch mean losses
    double test_loss = 0.0;     // mean per-example cross entropy
    double test_acc = 0.0;      // top-1
    std::uint64_t updates = 0;
    std::uint64_t minibatch_loads = 0;
    double effective_lr_last = 0.0;

    friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

/// Emitted after every optimizer step. `gradient` is only valid during the callback.
struct StepEvent {
    int epoch = 0;
    std::uint64_t step = 0;
    std::size_t minibatch_id = 0;
    int reuse_index = 1;
    double learning_rate = 0.0;
    double batch_loss = 0.0; // mean over the minibatch, before the step
    std::span<const double> gradient;
};

struct TrainObserver {
    std::function<void(const MetricsRecord&)> on_record;
    std::function<void(const StepEvent&)> on_step;
};

struct TrainResult {
    std::vector<MetricsRecord> records;
    nn::Network network;
};

struct MinibatchGradient {
    double loss_sum = 0.0;
    nn::GradientVector gradient; // sum over examples
};

/// Summed loss and gradient of `net` over the chosen examples.
MinibatchGradient minibatch_gradient(const nn::Network& net, const data::Dataset& dataset,
                                     std::span<const std::size_t> indices);

/// Runs the persistent-minibatch training loop. Every schedule entry
/// recomputes the gradient at the current parameters and takes one momentum
/// step at effective_lr(k); the velocity is never reset. A record is emitted
/// every `eval_every` epochs and after the final epoch. Throws
/// DivergenceError on a non-finite loss or parameter.
TrainResult train(const ExperimentConfig& config, const data::Dataset& train_set, const data::Dataset& test_set,
                  const TrainObserver& observer = {});

struct Evaluation {
    double accuracy = 0.0;
    double mean_loss = 0.0;
};

/// Top-1 accuracy (lowest class wins ties) and mean cross entropy.
Evaluation evaluate(const nn::Network& net, const data::Dataset& dataset);

/// Per-step trace of the optimizer on f(theta) = 0.5 * sum_i d_i theta_i^2.
struct QuadraticTrace {
    std::vector<double> curvatures;          // d_i, geometric from 1 to the condition number
    std::vector<double> losses;              // f(theta_t), t = 0..steps
    std::vector<std::vector<double>> thetas; // theta_t, t = 0..steps
};

/// Minimises the diagonal quadratic from theta_0 = (1, ..., 1). Coordinates
/// play the role of examples: each schedule entry takes a step using the
/// gradient restricted to its coordinate block.
QuadraticTrace run_quadratic_oracle(std::size_t dim, double condition_number, const data::PersistencyPolicy& policy,
                                    const optim::OptimizerConfig& optimizer, std::size_t steps,
                                    std::uint64_t seed = 0);

} // namespace persist::train
