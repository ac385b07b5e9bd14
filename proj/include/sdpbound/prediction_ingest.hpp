#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sdpbound {

enum class Label { clean, defective };

std::string_view to_string(Label label);

struct ConfusionCounts {
    std::uint64_t fn_count = 0;  // defective, predicted clean
    std::uint64_t tn_count = 0;  // clean, predicted clean
    std::optional<std::uint64_t> fp_count;
    std::optional<std::uint64_t> tp_count;

    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct PredictionRecord {
    std::string module_id;
    Label predicted = Label::clean;
    std::optional<Label> actual;  // absent in new-project mode
};

struct ProjectSummary {
    std::uint64_t n_total = 0;
    std::uint64_t l_clean = 0;
};

// Result of checking the data-verifiable model preconditions. Only the
// "at least one FN and one TN" condition can be checked; the remaining
// modelling assumptions are carried along as caveats.
struct AssumptionVerdict {
    bool ok = false;
    std::vector<std::string> violations;
    std::vector<std::string> caveats;
};

/// Parses the records layout `module_id,predicted[,actual]` with an optional
/// header line. Labels are case-insensitive; blank lines are skipped. The
/// `actual` column must be present on every row or on none.
std::vector<PredictionRecord> parse_records(std::istream& source);
std::vector<PredictionRecord> parse_records(std::string_view text);
std::vector<PredictionRecord> read_records_file(const std::string& path);

/// Parses `{"fn": <int>, "tn": <int>[, "fp": <int>, "tp": <int>]}`.
ConfusionCounts parse_confusion(std::string_view text);
ConfusionCounts read_confusion_file(const std::string& path);

/// Requires every record to carry an actual label.
ConfusionCounts tally_confusion(std::span<const PredictionRecord> records);

/// FN / (FN + TN). Throws DomainError when there are no predicted-clean modules.
double false_omission_rate(const ConfusionCounts& counts);

AssumptionVerdict validate_assumptions(const ConfusionCounts& counts);

ProjectSummary summarize_project(std::span<const PredictionRecord> records);

}  // namespace sdpbound
