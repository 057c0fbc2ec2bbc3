#include "polyes/oracle.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <thread>

#include "polyes/error.hpp"

namespace polyes {

namespace {

std::vector<std::vector<double>> enumerate_chords(int low, int high, std::size_t notes) {
    std::vector<std::vector<double>> chords;
    std::vector<int> tuple(notes, low);
    while (true) {
        chords.emplace_back(tuple.begin(), tuple.end());
        // Advance the rightmost position that can still grow, then reset the
        // tail to keep the tuple non-decreasing.
        std::size_t i = notes;
        while (i > 0 && tuple[i - 1] == high) --i;
        if (i == 0) break;
        ++tuple[i - 1];
        std::fill(tuple.begin() + static_cast<std::ptrdiff_t>(i), tuple.end(), tuple[i - 1]);
    }
    return chords;
}

}  // namespace

OracleResult brute_force_oracle(const FitnessContext& ctx, int low, int high, std::size_t notes, std::size_t threads) {
    if (notes < 1 || low > high || low < kLowestPitch || high > kHighestPitch) {
        throw Error(Errc::InvalidConfig, "oracle range must lie within [21, 108] with at least one note");
    }
    const auto chords = enumerate_chords(low, high, notes);
    std::vector<double> costs(chords.size());

    threads = std::clamp<std::size_t>(threads, 1, chords.size());
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> workers;
        for (std::size_t w = 0; w < threads; ++w) {
            workers.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < chords.size(); i += threads) {
                        costs[i] = chromosome_cost(chords[i], ctx);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    const auto best = static_cast<std::size_t>(std::min_element(costs.begin(), costs.end()) - costs.begin());
    OracleResult result;
    result.argmin.assign(chords[best].begin(), chords[best].end());
    result.best_cost = costs[best];
    result.runner_up_cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < costs.size(); ++i) {
        if (i != best) result.runner_up_cost = std::min(result.runner_up_cost, costs[i]);
    }
    result.evaluated = chords.size();
    return result;
}

}  // namespace polyes
