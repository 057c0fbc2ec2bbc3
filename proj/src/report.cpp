#include "polyes/report.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "polyes/error.hpp"

namespace polyes {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "polyes-report";
constexpr int kVersion = 1;

json config_to_json(const TranscriptionConfig& c) {
    const EsConfig& es = c.es;
    return {
        {"es",
         {{"mu", es.mu},
          {"lambda", es.lambda},
          {"rho", es.rho},
          {"alpha_es", es.alpha_es},
          {"sigma_init", {es.sigma_init_low, es.sigma_init_high}},
          {"max_generations", es.max_generations},
          {"bounds", {es.lower_bound, es.upper_bound}},
          {"selection", to_string(es.selection)},
          {"sigma_rule", to_string(es.sigma_rule)},
          {"success_window", es.success_window},
          {"sigma_floor", es.sigma_floor},
          {"sigma_ceiling", es.sigma_ceiling ? json(*es.sigma_ceiling) : json(nullptr)},
          {"stagnation_window", es.stagnation_window},
          {"seed", es.seed}}},
        {"spectral",
         {{"window_size", c.spectral.window_size},
          {"sample_rate", c.spectral.sample_rate},
          {"f_min", c.spectral.f_min},
          {"f_max", c.spectral.f_max}}},
        {"synth", {{"harmonic_count", c.synth.harmonic_count}, {"master_gain", c.synth.master_gain}}},
        {"notes_per_chord", c.notes_per_chord},
        {"epsilon", c.epsilon},
        {"quantize_candidates", c.quantize_candidates},
    };
}

TranscriptionConfig config_from_json(const json& j) {
    TranscriptionConfig c;
    const json& es = j.at("es");
    es.at("mu").get_to(c.es.mu);
    es.at("lambda").get_to(c.es.lambda);
    es.at("rho").get_to(c.es.rho);
    es.at("alpha_es").get_to(c.es.alpha_es);
    es.at("sigma_init").at(0).get_to(c.es.sigma_init_low);
    es.at("sigma_init").at(1).get_to(c.es.sigma_init_high);
    es.at("max_generations").get_to(c.es.max_generations);
    es.at("bounds").at(0).get_to(c.es.lower_bound);
    es.at("bounds").at(1).get_to(c.es.upper_bound);
    c.es.selection = parse_selection(es.at("selection").get<std::string>());
    c.es.sigma_rule = parse_sigma_rule(es.at("sigma_rule").get<std::string>());
    es.at("success_window").get_to(c.es.success_window);
    es.at("sigma_floor").get_to(c.es.sigma_floor);
    if (!es.at("sigma_ceiling").is_null()) {
        c.es.sigma_ceiling = es.at("sigma_ceiling").get<double>();
    }
    es.at("stagnation_window").get_to(c.es.stagnation_window);
    es.at("seed").get_to(c.es.seed);

    const json& sp = j.at("spectral");
    sp.at("window_size").get_to(c.spectral.window_size);
    sp.at("sample_rate").get_to(c.spectral.sample_rate);
    sp.at("f_min").get_to(c.spectral.f_min);
    sp.at("f_max").get_to(c.spectral.f_max);
    j.at("synth").at("harmonic_count").get_to(c.synth.harmonic_count);
    j.at("synth").at("master_gain").get_to(c.synth.master_gain);
    j.at("notes_per_chord").get_to(c.notes_per_chord);
    j.at("epsilon").get_to(c.epsilon);
    j.at("quantize_candidates").get_to(c.quantize_candidates);
    return c;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
    }
    return out;
}

}  // namespace

std::string report_json(const TranscriptionResult& result, const ReportOptions& options) {
    json segments = json::array();
    for (std::size_t i = 0; i < result.segments.size(); ++i) {
        const auto& s = result.segments[i];
        json trace = json::array();
        for (const auto& g : s.trace.generations) {
            trace.push_back({{"best_cost", g.best_cost},
                             {"mean_cost", g.mean_cost},
                             {"best_sigma", g.best_sigma},
                             {"best_genes", g.best_genes}});
        }
        json seg = {{"index", i},
                    {"start", s.start},
                    {"duration", s.duration},
                    {"seed", s.seed},
                    {"raw_genes", s.raw_genes},
                    {"rounded_pitches", s.rounded_pitches},
                    {"generations_run", s.generations_run()},
                    {"best_cost", s.best_cost},
                    {"best_sigma", s.best_sigma},
                    {"trace", std::move(trace)}};
        if (options.include_timing) {
            seg["runtime_seconds"] = s.runtime_seconds;
        }
        segments.push_back(std::move(seg));
    }

    json events = json::array();
    for (const auto& e : result.events) {
        events.push_back({{"start", e.start}, {"duration", e.duration}, {"pitches", e.pitches}});
    }

    json doc = {{"format", kFormat},
                {"version", kVersion},
                {"config", config_to_json(result.config)},
                {"segments", std::move(segments)},
                {"events", std::move(events)}};
    if (options.include_timing) {
        doc["total_runtime_seconds"] = result.total_runtime;
    }
    return doc.dump(2) + "\n";
}

TranscriptionResult parse_report(const std::string& text) {
    try {
        const json doc = json::parse(text);
        if (doc.at("format") != kFormat || doc.at("version") != kVersion) {
            throw Error(Errc::MalformedReport, "not a version 1 report");
        }
        TranscriptionResult result;
        result.config = config_from_json(doc.at("config"));
        for (const json& js : doc.at("segments")) {
            SegmentResult s;
            js.at("start").get_to(s.start);
            js.at("duration").get_to(s.duration);
            js.at("seed").get_to(s.seed);
            js.at("raw_genes").get_to(s.raw_genes);
            js.at("rounded_pitches").get_to(s.rounded_pitches);
            js.at("best_cost").get_to(s.best_cost);
            js.at("best_sigma").get_to(s.best_sigma);
            s.runtime_seconds = js.value("runtime_seconds", 0.0);
            for (const json& jg : js.at("trace")) {
                GenerationRecord g;
                jg.at("best_cost").get_to(g.best_cost);
                jg.at("mean_cost").get_to(g.mean_cost);
                jg.at("best_sigma").get_to(g.best_sigma);
                jg.at("best_genes").get_to(g.best_genes);
                s.trace.generations.push_back(std::move(g));
            }
            if (js.at("generations_run").get<std::size_t>() != s.generations_run()) {
                throw Error(Errc::MalformedReport, "generations_run disagrees with the trace");
            }
            result.segments.push_back(std::move(s));
        }
        for (const json& je : doc.at("events")) {
            NoteEvent e;
            je.at("start").get_to(e.start);
            je.at("duration").get_to(e.duration);
            je.at("pitches").get_to(e.pitches);
            result.events.push_back(std::move(e));
        }
        result.total_runtime = doc.value("total_runtime_seconds", 0.0);
        return result;
    } catch (const json::exception& e) {
        throw Error(Errc::MalformedReport, e.what());
    }
}

void write_report(const TranscriptionResult& result, const std::filesystem::path& path, const ReportOptions& options) {
    auto out = open_for_write(path);
    out << report_json(result, options);
    if (!out) {
        throw Error(Errc::IoError, "write failed for " + path.string());
    }
}

TranscriptionResult read_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::IoError, "cannot open " + path.string());
    }
    return parse_report(std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
}

std::string fitness_csv(const TranscriptionResult& result) {
    std::ostringstream out;
    out.precision(17);
    out << "segment,generation,best_cost,mean_cost,best_sigma\n";
    for (std::size_t i = 0; i < result.segments.size(); ++i) {
        const auto& gens = result.segments[i].trace.generations;
        for (std::size_t g = 1; g < gens.size(); ++g) {
            out << i << ',' << g << ',' << gens[g].best_cost << ',' << gens[g].mean_cost << ',' << gens[g].best_sigma
                << '\n';
        }
    }
    return out.str();
}

void write_fitness_csv(const TranscriptionResult& result, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << fitness_csv(result);
    if (!out) {
        throw Error(Errc::IoError, "write failed for " + path.string());
    }
}

}  // namespace polyes
