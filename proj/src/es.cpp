#include "polyes/es.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <exception>
#include <numeric>
#include <thread>

#include "polyes/error.hpp"

namespace polyes {

std::string to_string(Selection s) {
    return s == Selection::Plus ? "plus" : "comma";
}

std::string to_string(SigmaRule r) {
    return r == SigmaRule::PerOffspring ? "per-offspring" : "one-fifth";
}

Selection parse_selection(const std::string& text) {
    if (text == "plus") return Selection::Plus;
    if (text == "comma") return Selection::Comma;
    throw Error(Errc::InvalidConfig, "selection must be plus or comma, got '" + text + "'");
}

SigmaRule parse_sigma_rule(const std::string& text) {
    if (text == "per-offspring") return SigmaRule::PerOffspring;
    if (text == "one-fifth") return SigmaRule::OneFifthWindow;
    throw Error(Errc::InvalidConfig, "sigma rule must be per-offspring or one-fifth, got '" + text + "'");
}

void EsConfig::validate() const {
    auto fail = [](const std::string& why) { throw Error(Errc::InvalidConfig, why); };
    if (mu < 1 || lambda < 1) fail("mu and lambda must be at least 1");
    if (rho < 1 || rho > mu) fail("rho must lie in [1, mu]");
    if (!(alpha_es > 1.0 && alpha_es <= 2.0)) fail("alpha_es must lie in (1, 2]");
    if (!(sigma_init_low > 0.0 && sigma_init_low <= sigma_init_high)) fail("sigma init range must satisfy 0 < low <= high");
    if (!(lower_bound < upper_bound)) fail("lower bound must be below upper bound");
    if (!(sigma_floor > 0.0 && sigma_floor <= effective_sigma_ceiling())) fail("need 0 < sigma_floor <= sigma_ceiling");
    if (selection == Selection::Comma && lambda < mu) {
        throw Error(Errc::InsufficientOffspring, "comma selection needs lambda >= mu");
    }
    if (sigma_rule == SigmaRule::OneFifthWindow && success_window < 1) fail("success window must be at least 1");
}

std::vector<Individual> initialize_population(const EsConfig& config, std::size_t n_genes, Rng& rng) {
    config.validate();
    if (n_genes < 1) {
        throw Error(Errc::InvalidConfig, "need at least one gene");
    }
    std::uniform_real_distribution<double> gene(config.lower_bound, config.upper_bound);
    std::uniform_real_distribution<double> step(config.sigma_init_low, config.sigma_init_high);

    std::vector<Individual> population(config.mu);
    for (auto& ind : population) {
        ind.genes.resize(n_genes);
        for (double& g : ind.genes) {
            g = gene(rng);
        }
        // uniform_real_distribution on a degenerate range is undefined.
        ind.sigma = config.sigma_init_low == config.sigma_init_high ? config.sigma_init_low : step(rng);
        ind.sigma = std::clamp(ind.sigma, config.sigma_floor, config.effective_sigma_ceiling());
    }
    return population;
}

Individual mutate(const Individual& parent, const EsConfig& config, Rng& rng) {
    std::normal_distribution<double> noise(0.0, 1.0);
    Individual child;
    child.sigma = parent.sigma;
    child.genes.resize(parent.genes.size());
    for (std::size_t i = 0; i < parent.genes.size(); ++i) {
        child.genes[i] = std::clamp(parent.genes[i] + parent.sigma * noise(rng), config.lower_bound, config.upper_bound);
    }
    return child;
}

double adapt_sigma(double sigma, bool success, const EsConfig& config) {
    const double next = success ? sigma * config.alpha_es : sigma * std::pow(config.alpha_es, -0.25);
    return std::clamp(next, config.sigma_floor, config.effective_sigma_ceiling());
}

Individual recombine(std::span<const Individual> parents, Rng& /*rng*/) {
    if (parents.empty()) {
        throw Error(Errc::ArityMismatch, "recombination needs at least one parent");
    }
    const std::size_t n = parents.front().genes.size();
    Individual child;
    child.genes.assign(n, 0.0);
    double log_sigma = 0.0;
    for (const auto& p : parents) {
        if (p.genes.size() != n) {
            throw Error(Errc::ArityMismatch, "parents differ in gene count");
        }
        for (std::size_t i = 0; i < n; ++i) {
            child.genes[i] += p.genes[i];
        }
        log_sigma += std::log(p.sigma);
    }
    const auto count = static_cast<double>(parents.size());
    for (double& g : child.genes) {
        g /= count;
    }
    child.sigma = std::exp(log_sigma / count);
    return child;
}

std::vector<Individual> select(std::span<const Individual> parents, std::span<const Individual> offspring,
                               const EsConfig& config) {
    if (config.selection == Selection::Comma && offspring.size() < config.mu) {
        throw Error(Errc::InsufficientOffspring, "comma selection needs at least mu offspring");
    }
    std::vector<const Individual*> pool;
    if (config.selection == Selection::Plus) {
        for (const auto& p : parents) pool.push_back(&p);
    }
    for (const auto& o : offspring) pool.push_back(&o);

    for (const auto* ind : pool) {
        if (!ind->fitness) {
            throw Error(Errc::InvalidConfig, "selection over an unevaluated individual");
        }
    }
    std::stable_sort(pool.begin(), pool.end(),
                     [](const Individual* a, const Individual* b) { return *a->fitness < *b->fitness; });

    std::vector<Individual> next;
    const std::size_t keep = std::min(config.mu, pool.size());
    next.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        next.push_back(*pool[i]);
    }
    return next;
}

namespace {

void evaluate(std::span<Individual> batch, const CostFunction& cost, std::size_t threads) {
    threads = std::clamp<std::size_t>(threads, 1, batch.size());
    if (threads == 1) {
        for (auto& ind : batch) {
            ind.fitness = cost(ind.genes);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            workers.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < batch.size(); i += threads) {
                        batch[i].fitness = cost(batch[i].genes);
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
}

GenerationRecord summarize(std::span<const Individual> population) {
    const auto best = std::min_element(population.begin(), population.end(),
                                       [](const Individual& a, const Individual& b) { return *a.fitness < *b.fitness; });
    double sum = 0.0;
    for (const auto& ind : population) sum += *ind.fitness;
    return {*best->fitness, sum / static_cast<double>(population.size()), best->genes, best->sigma};
}

}  // namespace

EvolutionResult evolve(const EsConfig& config, std::size_t n_genes, const CostFunction& cost, Rng& rng,
                       std::size_t eval_threads) {
    std::vector<Individual> parents = initialize_population(config, n_genes, rng);
    evaluate(parents, cost, eval_threads);

    EvolutionResult result;
    result.trace.generations.push_back(summarize(parents));
    result.best = *std::min_element(parents.begin(), parents.end(),
                                    [](const Individual& a, const Individual& b) { return *a.fitness < *b.fitness; });

    std::uniform_int_distribution<std::size_t> pick(0, config.mu - 1);
    std::vector<std::size_t> chosen(config.rho);
    std::vector<Individual> mates(config.rho);
    std::vector<Individual> offspring(config.lambda);
    std::vector<std::size_t> primary(config.lambda);
    std::deque<double> window_rates;
    std::size_t since_improvement = 0;

    for (std::size_t gen = 0; gen < config.max_generations; ++gen) {
        for (std::size_t j = 0; j < config.lambda; ++j) {
            // Distinct parents, drawn in order; the first is the primary one.
            for (std::size_t r = 0; r < config.rho; ++r) {
                std::size_t idx = 0;
                do {
                    idx = pick(rng);
                } while (std::find(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(r), idx) !=
                         chosen.begin() + static_cast<std::ptrdiff_t>(r));
                chosen[r] = idx;
                mates[r] = parents[idx];
            }
            primary[j] = chosen[0];
            offspring[j] = mutate(recombine(mates, rng), config, rng);
        }

        evaluate(offspring, cost, eval_threads);

        std::size_t successes = 0;
        std::vector<bool> improved(config.lambda);
        for (std::size_t j = 0; j < config.lambda; ++j) {
            improved[j] = *offspring[j].fitness < *parents[primary[j]].fitness;
            successes += improved[j] ? 1 : 0;
        }
        if (config.sigma_rule == SigmaRule::PerOffspring) {
            for (std::size_t j = 0; j < config.lambda; ++j) {
                offspring[j].sigma = adapt_sigma(offspring[j].sigma, improved[j], config);
            }
        } else {
            window_rates.push_back(static_cast<double>(successes) / static_cast<double>(config.lambda));
            if (window_rates.size() > config.success_window) window_rates.pop_front();
            const double rate =
                std::accumulate(window_rates.begin(), window_rates.end(), 0.0) / static_cast<double>(window_rates.size());
            for (auto& child : offspring) {
                child.sigma = adapt_sigma(child.sigma, rate > 0.2, config);
            }
        }

        parents = select(parents, offspring, config);
        result.trace.generations.push_back(summarize(parents));

        const auto& gen_best = *std::min_element(
            parents.begin(), parents.end(), [](const Individual& a, const Individual& b) { return *a.fitness < *b.fitness; });
        if (*gen_best.fitness < *result.best.fitness) {
            result.best = gen_best;
            since_improvement = 0;
        } else if (config.stagnation_window > 0 && ++since_improvement >= config.stagnation_window) {
            break;
        }
    }
    return result;
}

}  // namespace polyes
