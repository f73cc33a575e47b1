#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace persist::data {

/// How minibatches are drawn and reused. K = 1 is the usual disposable-minibatch rule.
struct PersistencyPolicy {
    int persistency = 1;       // K
    std::size_t batch_size = 1; // m
    bool reshuffle_each_epoch = true;

    /// Throws ConfigError unless K >= 1 and m >= 1.
    void validate() const;
};

/// One optimizer step: which minibatch to use and how many times it has been used so far.
struct ScheduleEntry {
    std::size_t minibatch_id = 0;
    std::size_t begin = 0; // slice [begin, begin + count) of EpochSchedule::order
    std::size_t count = 0;
    int reuse_index = 1;   // k in [1, K]
};

struct EpochSchedule {
    std::vector<std::size_t> order; // permuted dataset indices
    std::vector<ScheduleEntry> entries;
    std::size_t num_minibatches = 0;

    std::span<const std::size_t> example_indices(const ScheduleEntry& entry) const {
        return std::span<const std::size_t>(order).subspan(entry.begin, entry.count);
    }
};

/// Number of minibatches per epoch, ceil(N / m).
std::size_t minibatches_per_epoch(std::size_t n, std::size_t batch_size);

/// Epoch permutation of [0, n): seeded by (seed, epoch) when reshuffling,
/// otherwise by seed alone.
std::vector<std::size_t> epoch_permutation(std::size_t n, bool reshuffle_each_epoch, std::uint64_t epoch,
                                           std::uint64_t seed);

/// The disposable-minibatch partition: contiguous slices of the epoch permutation.
std::vector<std::vector<std::size_t>> standard_minibatches(std::size_t n, std::size_t batch_size,
                                                           bool reshuffle_each_epoch, std::uint64_t epoch,
                                                           std::uint64_t seed);

/// The persistent schedule: each minibatch of the partition appears at K
/// consecutive positions with k = 1..K, so every example is evaluated K times
/// per epoch and there are K * ceil(N / m) steps. A short final minibatch is
/// kept and persisted like the others.
EpochSchedule make_epoch_schedule(std::size_t n, const PersistencyPolicy& policy, std::uint64_t epoch,
                                  std::uint64_t seed);

} // namespace persist::data
