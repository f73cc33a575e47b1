#include "persist/data/schedule.hpp"

#include <numeric>
#include <string>

#include "persist/errors.hpp"
#include "persist/rng.hpp"

namespace persist::data {

void PersistencyPolicy::validate() const {
    if (persistency < 1) throw ConfigError("persistency K must be >= 1, got " + std::to_string(persistency));
    if (batch_size < 1) throw ConfigError("minibatch size must be >= 1");
}

std::size_t minibatches_per_epoch(std::size_t n, std::size_t batch_size) {
    return (n + batch_size - 1) / batch_size;
}

std::vector<std::size_t> epoch_permutation(std::size_t n, bool reshuffle_each_epoch, std::uint64_t epoch,
                                           std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 rng(derive_seed(seed, streams::kSchedule, reshuffle_each_epoch ? epoch : 0));
    shuffle(order, rng);
    return order;
}

std::vector<std::vector<std::size_t>> standard_minibatches(std::size_t n, std::size_t batch_size,
                                                           bool reshuffle_each_epoch, std::uint64_t epoch,
                                                           std::uint64_t seed) {
    const auto order = epoch_permutation(n, reshuffle_each_epoch, epoch, seed);
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t begin = 0; begin < n; begin += batch_size) {
        const std::size_t end = std::min(n, begin + batch_size);
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(begin),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return batches;
}

EpochSchedule make_epoch_schedule(std::size_t n, const PersistencyPolicy& policy, std::uint64_t epoch,
                                  std::uint64_t seed) {
    policy.validate();
    if (n == 0) throw ConfigError("cannot schedule an empty dataset");
    EpochSchedule schedule;
    schedule.order = epoch_permutation(n, policy.reshuffle_each_epoch, epoch, seed);
    schedule.num_minibatches = minibatches_per_epoch(n, policy.batch_size);
    schedule.entries.reserve(schedule.num_minibatches * static_cast<std::size_t>(policy.persistency));
    for (std::size_t b = 0; b < schedule.num_minibatches; ++b) {
        const std::size_t begin = b * policy.batch_size;
        const std::size_t count = std::min(policy.batch_size, n - begin);
        for (int k = 1; k <= policy.persistency; ++k) schedule.entries.push_back({b, begin, count, k});
    }
    return schedule;
}

} // namespace persist::data
