#include "sdpbound/prediction_ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "sdpbound/error.hpp"

namespace sdpbound {
namespace {

std::string trim(std::string_view s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return {};
    auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        auto comma = line.find(',', start);
        fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::optional<Label> parse_label(const std::string& field) {
    auto s = lower(field);
    if (s == "clean") return Label::clean;
    if (s == "defective") return Label::defective;
    return std::nullopt;
}

bool is_header(const std::vector<std::string>& fields) {
    return !fields.empty() && lower(fields[0]) == "module_id";
}

std::uint64_t count_field(const nlohmann::json& obj, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ParseError(std::string("field '") + key + "' must be an integer");
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    auto s = v.get<std::int64_t>();
    if (s < 0) throw ParseError(std::string("field '") + key + "' must be non-negative");
    return static_cast<std::uint64_t>(s);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

std::string_view to_string(Label label) {
    return label == Label::clean ? "clean" : "defective";
}

std::vector<PredictionRecord> parse_records(std::istream& source) {
    std::vector<PredictionRecord> records;
    std::optional<std::size_t> arity;
    std::string line;
    bool first_line = true;
    std::size_t row = 0;
    while (std::getline(source, line)) {
        if (first_line && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (first_line) {
            first_line = false;
            if (is_header(fields)) {
                if (fields.size() < 2 || fields.size() > 3) throw ParseError("header must be module_id,predicted[,actual]");
                arity = fields.size();
                continue;
            }
        }
        ++row;
        if (fields.size() < 2 || fields.size() > 3)
            throw ParseError("expected 2 or 3 fields, got " + std::to_string(fields.size()), row);
        if (!arity) arity = fields.size();
        if (fields.size() != *arity)
            throw ParseError("expected " + std::to_string(*arity) + " fields, got " + std::to_string(fields.size()), row);

        PredictionRecord rec;
        rec.module_id = fields[0];
        auto predicted = parse_label(fields[1]);
        if (!predicted) throw ParseError("unknown label '" + fields[1] + "'", row);
        rec.predicted = *predicted;
        if (fields.size() == 3) {
            auto actual = parse_label(fields[2]);
            if (!actual) throw ParseError("unknown label '" + fields[2] + "'", row);
            rec.actual = *actual;
        }
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw ParseError("no prediction records in input");
    return records;
}

std::vector<PredictionRecord> parse_records(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_records(in);
}

std::vector<PredictionRecord> read_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return parse_records(in);
}

ConfusionCounts parse_confusion(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("confusion file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("confusion file must hold a single object");
    for (const char* key : {"fn", "tn"})
        if (!doc.contains(key)) throw ParseError(std::string("confusion file lacks '") + key + "'");
    ConfusionCounts counts;
    counts.fn_count = count_field(doc, "fn");
    counts.tn_count = count_field(doc, "tn");
    if (doc.contains("fp")) counts.fp_count = count_field(doc, "fp");
    if (doc.contains("tp")) counts.tp_count = count_field(doc, "tp");
    return counts;
}

ConfusionCounts read_confusion_file(const std::string& path) {
    return parse_confusion(slurp(path));
}

ConfusionCounts tally_confusion(std::span<const PredictionRecord> records) {
    if (records.empty()) throw ParseError("no prediction records to tally");
    ConfusionCounts counts;
    counts.fp_count = 0;
    counts.tp_count = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (!r.actual)
            throw ParseError("record '" + r.module_id + "' has no actual label", i + 1);
        bool predicted_clean = r.predicted == Label::clean;
        bool actually_clean = *r.actual == Label::clean;
        if (predicted_clean && !actually_clean) ++counts.fn_count;
        else if (predicted_clean) ++counts.tn_count;
        else if (actually_clean) ++*counts.fp_count;
        else ++*counts.tp_count;
    }
    return counts;
}

double false_omission_rate(const ConfusionCounts& counts) {
    auto predicted_clean = counts.fn_count + counts.tn_count;
    if (predicted_clean == 0) throw DomainError("no predicted-clean modules");
    return static_cast<double>(counts.fn_count) / static_cast<double>(predicted_clean);
}

AssumptionVerdict validate_assumptions(const ConfusionCounts& counts) {
    AssumptionVerdict v;
    if (counts.fn_count == 0 && counts.tn_count == 0)
        v.violations.push_back("no predicted-clean modules (FN + TN = 0), p undefined");
    else if (counts.fn_count == 0)
        v.violations.push_back("no false negatives: p = 0, bounds undefined (need FN >= 1 and TN >= 1)");
    else if (counts.tn_count == 0)
        v.violations.push_back("no true negatives: p = 1, bounds undefined (need FN >= 1 and TN >= 1)");
    v.ok = v.violations.empty();
    v.caveats = {
        "each misclassified defective module is assumed to cause exactly one failure",
        "integration, system and acceptance testing are assumed not to expose defects in missed modules",
        "the model is assumed trained on historical data of the same distribution, so p = FOR carries over",
        "predictions are assumed independent across modules",
        "the hazard of the remaining modules is assumed Weibull",
        "the SDP-tested and manually tested software are assumed identical",
    };
    return v;
}

ProjectSummary summarize_project(std::span<const PredictionRecord> records) {
    ProjectSummary s;
    s.n_total = records.size();
    s.l_clean = static_cast<std::uint64_t>(std::count_if(
        records.begin(), records.end(), [](const auto& r) { return r.predicted == Label::clean; }));
    return s;
}

}  // namespace sdpbound
