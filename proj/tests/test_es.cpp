#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include "polyes/error.hpp"
#include "polyes/es.hpp"

using namespace polyes;

namespace {

Individual evaluated(std::vector<double> genes, double cost, double sigma = 0.01) {
    return {std::move(genes), sigma, cost};
}

double sphere(std::span<const double> x) {
    double s = 0.0;
    for (double g : x) s += (g - 64.0) * (g - 64.0);
    return s;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

TEST_CASE("initial population respects bounds and the sigma range") {
    const EsConfig config;
    Rng rng(5);
    const auto pop = initialize_population(config, 3, rng);
    REQUIRE(pop.size() == 100);
    for (const auto& ind : pop) {
        REQUIRE(ind.genes.size() == 3);
        for (double g : ind.genes) REQUIRE((g >= 21.0 && g <= 108.0));
        REQUIRE((ind.sigma >= 0.005 && ind.sigma <= 0.05));
        REQUIRE(!ind.fitness);
    }

    EsConfig fixed;
    fixed.sigma_init_low = fixed.sigma_init_high = 0.05;
    Rng r2(5);
    for (const auto& ind : initialize_population(fixed, 2, r2)) CHECK(ind.sigma == 0.05);

    Rng a(9), b(9);
    const auto pa = initialize_population(config, 4, a);
    const auto pb = initialize_population(config, 4, b);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(pa[i].genes == pb[i].genes);
        CHECK(pa[i].sigma == pb[i].sigma);
    }
    CHECK_THROWS_AS(initialize_population(config, 0, a), Error);
}

TEST_CASE("config validation") {
    auto code = [](EsConfig c) {
        try {
            c.validate();
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::IoError;
    };
    EsConfig c;
    c.rho = 101;
    CHECK(code(c) == Errc::InvalidConfig);
    c = {};
    c.alpha_es = 1.0;
    CHECK(code(c) == Errc::InvalidConfig);
    c.alpha_es = 2.5;
    CHECK(code(c) == Errc::InvalidConfig);
    c = {};
    c.sigma_init_low = 0.1;
    c.sigma_init_high = 0.05;
    CHECK(code(c) == Errc::InvalidConfig);
    c = {};
    c.selection = Selection::Comma;
    CHECK(code(c) == Errc::InsufficientOffspring);
    c.lambda = 100;
    CHECK(code(c) == Errc::IoError);  // valid
}

TEST_CASE("mutation") {
    const EsConfig config;
    Rng rng(1);

    const Individual frozen{{60.0, 21.0, 108.0}, 1e-300, std::nullopt};
    const auto still = mutate(frozen, config, rng);
    CHECK(still.genes == frozen.genes);
    CHECK(still.sigma == frozen.sigma);

    const Individual top{{108.0}, 1.0, 3.0};
    for (int i = 0; i < 1000; ++i) {
        const auto child = mutate(top, config, rng);
        REQUIRE(child.genes[0] <= 108.0);
        REQUIRE(!child.fitness);
    }

    const Individual mid{{60.0}, 1.0, std::nullopt};
    std::vector<double> draws;
    for (int i = 0; i < 10000; ++i) draws.push_back(mutate(mid, config, rng).genes[0]);
    const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / draws.size();
    double var = 0.0;
    for (double d : draws) var += (d - mean) * (d - mean);
    const double sd = std::sqrt(var / (draws.size() - 1));
    CHECK(std::abs(mean - 60.0) <= 0.05);
    CHECK(std::abs(sd - 1.0) <= 0.05);
}

TEST_CASE("bounds hold over 1e5 mutations with large steps") {
    const EsConfig config;
    Rng rng(2);
    std::uniform_real_distribution<double> start(21.0, 108.0);
    for (int i = 0; i < 100000; ++i) {
        const Individual parent{{start(rng), 21.0, 108.0}, 40.0, std::nullopt};
        for (double g : mutate(parent, config, rng).genes) REQUIRE((g >= 21.0 && g <= 108.0));
    }
}

TEST_CASE("sigma adaptation") {
    EsConfig config;
    config.alpha_es = 1.5;
    CHECK(adapt_sigma(0.05, true, config) == doctest::Approx(0.075).epsilon(1e-14));
    // 0.05 * 1.5^-0.25, 30-digit reference.
    CHECK(adapt_sigma(0.05, false, config) == doctest::Approx(0.0451801001804922416).epsilon(1e-14));

    config.alpha_es = 1.0 + 1e-12;
    CHECK(adapt_sigma(0.05, true, config) == doctest::Approx(0.05));
    CHECK(adapt_sigma(0.05, false, config) == doctest::Approx(0.05));

    config = {};
    for (double s : {1e-3, 0.05, 1.0, 10.0}) {
        CHECK(adapt_sigma(s, true, config) > s);
        CHECK(adapt_sigma(s, false, config) < s);
    }
    CHECK(adapt_sigma(config.sigma_floor, false, config) == config.sigma_floor);
    CHECK(adapt_sigma(config.effective_sigma_ceiling(), true, config) == config.effective_sigma_ceiling());
}

TEST_CASE("intermediate recombination") {
    Rng rng(0);
    const std::vector<Individual> same{evaluated({60, 64, 67}, 1.0, 0.02), evaluated({60, 64, 67}, 1.0, 0.02)};
    const auto twin = recombine(same, rng);
    CHECK(twin.genes == same[0].genes);
    CHECK(twin.sigma == doctest::Approx(0.02));
    CHECK(!twin.fitness);

    const std::vector<Individual> pair{evaluated({60, 64, 67}, 1.0, 0.01), evaluated({62, 66, 69}, 1.0, 0.04)};
    const auto mid = recombine(pair, rng);
    CHECK(mid.genes == std::vector<double>{61, 65, 68});
    CHECK(mid.sigma == doctest::Approx(0.02).epsilon(1e-14));

    const std::vector<Individual> ragged{evaluated({60}, 1.0), evaluated({60, 61}, 1.0)};
    CHECK_THROWS_AS(recombine(ragged, rng), Error);
    CHECK_THROWS_AS(recombine({}, rng), Error);
}

TEST_CASE("plus and comma selection") {
    EsConfig config;
    config.mu = 2;
    config.lambda = 3;
    const std::vector<Individual> parents{evaluated({1}, 5.0), evaluated({2}, 9.0)};
    const std::vector<Individual> offspring{evaluated({3}, 7.0), evaluated({4}, 4.0), evaluated({5}, 11.0)};

    const auto plus = select(parents, offspring, config);
    REQUIRE(plus.size() == 2);
    CHECK(*plus[0].fitness == 4.0);
    CHECK(*plus[1].fitness == 5.0);

    const std::vector<Individual> worse{evaluated({6}, 20.0), evaluated({7}, 30.0), evaluated({8}, 25.0)};
    const auto elite = select(parents, worse, config);
    CHECK(elite[0].genes == parents[0].genes);
    CHECK(elite[1].genes == parents[1].genes);

    config.selection = Selection::Comma;
    const auto comma = select(parents, worse, config);
    CHECK(*comma[0].fitness == 20.0);
    CHECK(*comma[1].fitness == 25.0);

    // Equal costs: the earlier candidate wins, parents before offspring.
    config.selection = Selection::Plus;
    config.mu = 1;
    const std::vector<Individual> tie{evaluated({9}, 5.0)};
    CHECK(select(parents, tie, config)[0].genes == parents[0].genes);

    config.selection = Selection::Comma;
    config.mu = 4;
    try {
        select(parents, offspring, config);
        FAIL("expected InsufficientOffspring");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InsufficientOffspring);
    }
}

TEST_CASE("evolve on the sphere function") {
    EsConfig config;
    std::vector<double> errors;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        const auto result = evolve(config, 3, sphere, rng);
        double worst = 0.0;
        for (double g : result.best.genes) worst = std::max(worst, std::abs(g - 64.0));
        errors.push_back(worst);

        const auto& gens = result.trace.generations;
        for (std::size_t g = 1; g < gens.size(); ++g) REQUIRE(gens[g].best_cost <= gens[g - 1].best_cost);
        CHECK(*result.best.fitness == doctest::Approx(gens.back().best_cost));
    }
    CHECK(median(errors) <= 0.1);
}

TEST_CASE("longer runs reach lower sphere costs") {
    auto median_cost = [](std::size_t generations) {
        EsConfig config;
        config.max_generations = generations;
        std::vector<double> costs;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            Rng rng(seed);
            costs.push_back(*evolve(config, 3, sphere, rng).best.fitness);
        }
        return median(costs);
    };
    CHECK(median_cost(300) < median_cost(50));
}

TEST_CASE("evolve invariants and determinism") {
    EsConfig config;
    config.mu = 10;
    config.lambda = 10;
    config.max_generations = 40;
    config.sigma_init_low = 5.0;
    config.sigma_init_high = 20.0;

    std::size_t calls = 0;
    auto checked = [&](std::span<const double> x) {
        ++calls;
        for (double g : x) REQUIRE((g >= 21.0 && g <= 108.0));
        return sphere(x);
    };
    Rng a(44);
    const auto first = evolve(config, 2, checked, a);
    CHECK(calls == 10 + 40 * 10);
    CHECK(first.trace.generations.size() == 41);
    for (const auto& g : first.trace.generations) {
        REQUIRE((g.best_sigma >= config.sigma_floor && g.best_sigma <= config.effective_sigma_ceiling()));
    }

    Rng b(44);
    const auto second = evolve(config, 2, sphere, b, 3);
    REQUIRE(second.trace.generations.size() == first.trace.generations.size());
    for (std::size_t g = 0; g < first.trace.generations.size(); ++g) {
        REQUIRE(first.trace.generations[g].best_cost == second.trace.generations[g].best_cost);
        REQUIRE(first.trace.generations[g].mean_cost == second.trace.generations[g].mean_cost);
        REQUIRE(first.trace.generations[g].best_genes == second.trace.generations[g].best_genes);
    }

    config.max_generations = 0;
    Rng c(1);
    const auto none = evolve(config, 2, sphere, c);
    CHECK(none.trace.generations.size() == 1);
    CHECK(*none.best.fitness == none.trace.generations[0].best_cost);
}

TEST_CASE("comma selection and the windowed one-fifth rule both run") {
    EsConfig config;
    config.mu = 10;
    config.lambda = 40;
    config.selection = Selection::Comma;
    config.sigma_rule = SigmaRule::OneFifthWindow;
    config.sigma_init_low = 1.0;
    config.sigma_init_high = 2.0;
    config.max_generations = 150;
    Rng rng(3);
    const auto result = evolve(config, 3, sphere, rng);
    CHECK(*result.best.fitness < 1e-2);
}

TEST_CASE("stagnation window stops early") {
    EsConfig config;
    config.mu = 5;
    config.lambda = 5;
    config.stagnation_window = 7;
    Rng rng(1);
    const auto flat = evolve(config, 2, [](std::span<const double>) { return 1.0; }, rng);
    CHECK(flat.trace.generations_run() == 7);
}

TEST_CASE("cost function failures propagate") {
    EsConfig config;
    config.mu = 4;
    config.lambda = 4;
    std::atomic<int> calls{0};
    auto failing = [&](std::span<const double>) -> double {
        if (++calls > 6) throw std::runtime_error("boom");
        return 1.0;
    };
    Rng rng(1);
    CHECK_THROWS_WITH_AS(evolve(config, 1, failing, rng), "boom", std::runtime_error);
    calls = 0;
    Rng rng2(1);
    CHECK_THROWS_AS(evolve(config, 1, failing, rng2, 2), std::runtime_error);
}
