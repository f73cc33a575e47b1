#include "persist/trainer/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "persist/errors.hpp"
#include "persist/nn/loss.hpp"
#include "persist/rng.hpp"

namespace persist::train {

void ExperimentConfig::validate() const {
    policy.validate();
    optimizer.validate();
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
    if (architecture.empty()) throw ConfigError("architecture is empty");
}

MinibatchGradient minibatch_gradient(const nn::Network& net, const data::Dataset& dataset,
                                     std::span<const std::size_t> indices) {
    auto pass = nn::forward(net, dataset.gather(indices));
    MinibatchGradient out;
    std::vector<std::vector<double>> dlogits;
    dlogits.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        auto lg = nn::softmax_cross_entropy(pass.logits[i], static_cast<std::size_t>(dataset.label(indices[i])));
        out.loss_sum += lg.loss;
        dlogits.push_back(std::move(lg.dlogits));
    }
    out.gradient = nn::backward(net, pass.cache, dlogits);
    return out;
}

Evaluation evaluate(const nn::Network& net, const data::Dataset& dataset) {
    constexpr std::size_t kChunk = 512;
    std::size_t correct = 0;
    double loss_sum = 0.0;
    std::vector<std::size_t> indices;
    for (std::size_t begin = 0; begin < dataset.size(); begin += kChunk) {
        const std::size_t end = std::min(dataset.size(), begin + kChunk);
        indices.resize(end - begin);
        for (std::size_t i = begin; i < end; ++i) indices[i - begin] = i;
        const auto pass = nn::forward(net, dataset.gather(indices));
        for (std::size_t i = begin; i < end; ++i) {
            const auto& logits = pass.logits[i - begin];
            const auto label = static_cast<std::size_t>(dataset.label(i));
            if (nn::argmax(logits) == label) ++correct;
            loss_sum += nn::softmax_cross_entropy(logits, label).loss;
        }
    }
    const auto n = static_cast<double>(dataset.size());
    return {static_cast<double>(correct) / n, loss_sum / n};
}

TrainResult train(const ExperimentConfig& config, const data::Dataset& train_set, const data::Dataset& test_set,
                  const TrainObserver& observer) {
    config.validate();
    if (train_set.shape() != test_set.shape())
        throw ShapeError("train shape " + train_set.shape().to_string() + " differs from test shape " +
                         test_set.shape().to_string());

    TrainResult result{{}, nn::init_network(train_set.shape(), config.architecture,
                                            derive_seed(config.seed, streams::kInit))};
    nn::Network& net = result.network;
    if (net.num_classes() != static_cast<std::size_t>(train_set.num_classes()))
        throw ConfigError("network emits " + std::to_string(net.num_classes()) + " logits but the dataset has " +
                          std::to_string(train_set.num_classes()) + " classes");

    auto state = optim::OptimizerState::zeros(net.parameter_count(), config.optimizer.momentum);
    std::uint64_t updates = 0;
    std::uint64_t loads = 0;
    double lr = 0.0;
    using Clock = std::chrono::steady_clock;
    Clock::duration training_time{};

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto started = Clock::now();
        const auto schedule = data::make_epoch_schedule(train_set.size(), config.policy,
                                                        static_cast<std::uint64_t>(epoch - 1), config.seed);
        double loss_total = 0.0;
        for (const auto& entry : schedule.entries) {
            if (entry.reuse_index == 1) ++loads;
            const auto indices = schedule.example_indices(entry);
            const auto grad = minibatch_gradient(net, train_set, indices);
            const double batch_loss = grad.loss_sum / static_cast<double>(indices.size());
            if (!std::isfinite(batch_loss))
                throw DivergenceError("non-finite training loss at epoch " + std::to_string(epoch) + ", step " +
                                      std::to_string(updates));
            lr = optim::effective_lr(config.optimizer, entry.reuse_index);
            try {
                optim::step(net.mutable_params(), grad.gradient, state, lr);
            } catch (const DivergenceError& e) {
                throw DivergenceError("epoch " + std::to_string(epoch) + ": " + e.what());
            }
            loss_total += batch_loss;
            if (observer.on_step)
                observer.on_step({epoch, updates, entry.minibatch_id, entry.reuse_index, lr, batch_loss, grad.gradient});
            ++updates;
        }
        training_time += Clock::now() - started;

        if (epoch % config.eval_every == 0 || epoch == config.epochs) {
            const auto eval = evaluate(net, test_set);
            MetricsRecord record{epoch,
                                 std::chrono::duration<double>(training_time).count(),
                                 loss_total / static_cast<double>(schedule.entries.size()),
                                 eval.mean_loss,
                                 eval.accuracy,
                                 updates,
                                 loads,
                                 lr};
            if (!std::isfinite(record.test_loss))
                throw DivergenceError("non-finite test loss at epoch " + std::to_string(epoch));
            if (observer.on_record) observer.on_record(record);
            result.records.push_back(record);
        }
    }
    return result;
}

} // namespace persist::train
