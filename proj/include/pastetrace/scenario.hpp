#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pastetrace/report.hpp"

namespace pastetrace {

enum class ScenarioKind { P2P, Collaboration, Theft, Search, Expert, Organic };

std::string_view to_string(ScenarioKind k);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view text);

struct Scenario {
    ScenarioKind kind = ScenarioKind::Organic;
    std::uint64_t seed = 0;
    /// Students in the cohort, including the ones acting out the scenario.
    std::size_t cohort_size = 4;
    /// Edits made after a planted paste.
    std::size_t tweaks = 5;
};

struct ExpectedOutcome {
    Verdict verdict = Verdict::NoPlagiarismDetected;
    std::string role;
    std::optional<std::uint64_t> edits_after;

    friend bool operator==(const ExpectedOutcome&, const ExpectedOutcome&) = default;
};

struct Manifest {
    ScenarioKind kind = ScenarioKind::Organic;
    std::uint64_t seed = 0;
    std::map<std::string, ExpectedOutcome> students;
    std::vector<std::pair<std::string, std::string>> collaboration_pairs;

    friend bool operator==(const Manifest&, const Manifest&) = default;
};

std::string render_manifest(const Manifest& m);
Manifest parse_manifest(std::string_view text);

/// Writes `<out>/submissions/<student>/...`, `<out>/machines/<name>/install_id`
/// and `<out>/manifest.json`. Same scenario gives byte-identical output.
Manifest generate_scenario(const Scenario& scenario, const std::filesystem::path& out_dir);

struct ManifestComparison {
    bool match = true;
    std::vector<std::string> mismatches;
    std::size_t true_positives = 0, false_positives = 0, false_negatives = 0;
};

ManifestComparison compare(const Manifest& manifest, const Report& report);

}  // namespace pastetrace
