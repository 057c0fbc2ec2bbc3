#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace polyes {

using Rng = std::mt19937_64;

/// A search point: candidate pitches plus the step size used to mutate it.
/// Fitness is a cost, lower is better; empty until evaluated.
struct Individual {
    std::vector<double> genes;
    double sigma = 0.0;
    std::optional<double> fitness;
};

enum class Selection { Plus, Comma };

enum class SigmaRule {
    // Each offspring compares itself with its primary parent.
    PerOffspring,
    // The success ratio over the last success_window generations is tested
    // against 1/5 and applied to every offspring alike.
    OneFifthWindow,
};

std::string to_string(Selection s);
std::string to_string(SigmaRule r);
Selection parse_selection(const std::string& text);
SigmaRule parse_sigma_rule(const std::string& text);

struct EsConfig {
    std::size_t mu = 100;
    std::size_t lambda = 80;
    std::size_t rho = 2;
    double alpha_es = 2.0;
    double sigma_init_low = 0.005;
    double sigma_init_high = 0.05;
    std::size_t max_generations = 300;
    double lower_bound = 21.0;
    double upper_bound = 108.0;
    Selection selection = Selection::Plus;
    SigmaRule sigma_rule = SigmaRule::PerOffspring;
    std::size_t success_window = 10;
    double sigma_floor = 1e-4;
    // Unset means half the bound width.
    std::optional<double> sigma_ceiling;
    // Generations without a strict improvement of the best-ever cost before
    // stopping early; 0 disables the check.
    std::size_t stagnation_window = 0;
    std::uint64_t seed = 1;

    double effective_sigma_ceiling() const { return sigma_ceiling.value_or((upper_bound - lower_bound) / 2.0); }
    void validate() const;
};

struct GenerationRecord {
    double best_cost = 0.0;
    double mean_cost = 0.0;
    std::vector<double> best_genes;
    double best_sigma = 0.0;
};

/// One record per generation; entry 0 describes the initial population.
struct EvolutionTrace {
    std::vector<GenerationRecord> generations;

    std::size_t generations_run() const { return generations.empty() ? 0 : generations.size() - 1; }
};

struct EvolutionResult {
    Individual best;
    EvolutionTrace trace;
};

using CostFunction = std::function<double(std::span<const double>)>;

std::vector<Individual> initialize_population(const EsConfig& config, std::size_t n_genes, Rng& rng);

/// Gaussian perturbation of every gene by parent.sigma, clamped to bounds.
/// Sigma is copied unchanged; adaptation is a separate step.
Individual mutate(const Individual& parent, const EsConfig& config, Rng& rng);

double adapt_sigma(double sigma, bool success, const EsConfig& config);

/// Intermediate recombination: arithmetic mean of genes, geometric mean of
/// sigmas. The rng is unused by this operator but kept in the signature so
/// alternative (discrete) recombination can slot in.
Individual recombine(std::span<const Individual> parents, Rng& rng);

/// Truncation selection of the mu lowest costs. Plus draws from parents then
/// offspring, comma from offspring only; ties keep the earlier candidate.
std::vector<Individual> select(std::span<const Individual> parents, std::span<const Individual> offspring,
                               const EsConfig& config);

/// Full generational loop. Offspring costs are evaluated on up to
/// eval_threads threads; all random draws stay on the calling thread, so the
/// result does not depend on the thread count.
EvolutionResult evolve(const EsConfig& config, std::size_t n_genes, const CostFunction& cost, Rng& rng,
                       std::size_t eval_threads = 1);

}  // namespace polyes
