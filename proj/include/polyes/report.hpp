#pragma once

#include <filesystem>
#include <string>

#include "polyes/transcriber.hpp"

namespace polyes {

struct ReportOptions {
    // Wall-clock fields are the only nondeterministic part of a report.
    bool include_timing = true;
};

std::string report_json(const TranscriptionResult& result, const ReportOptions& options = {});
TranscriptionResult parse_report(const std::string& json);

void write_report(const TranscriptionResult& result, const std::filesystem::path& path,
                  const ReportOptions& options = {});
TranscriptionResult read_report(const std::filesystem::path& path);

/// One row per evolved generation and segment:
/// segment,generation,best_cost,mean_cost,best_sigma
std::string fitness_csv(const TranscriptionResult& result);
void write_fitness_csv(const TranscriptionResult& result, const std::filesystem::path& path);

}  // namespace polyes
