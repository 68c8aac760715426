#include "pira/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace pira::eval {

namespace {

using ojson = nlohmann::ordered_json;

ojson intent_to_json(const Intent& intent) {
    ojson j;
    j["text"] = intent.text;
    ojson slots = ojson::object();
    for (const auto& [k, v] : intent.slots) slots[k] = v;
    j["slots"] = std::move(slots);
    return j;
}

Intent intent_from_json(const ojson& j) {
    Intent intent;
    intent.text = j.at("text").get<std::string>();
    if (j.contains("slots"))
        for (const auto& [k, v] : j["slots"].items())
            intent.slots.emplace_back(k, v.get<std::string>());
    return intent;
}

std::string percent_cell(const std::optional<double>& ratio) {
    if (!ratio) return "-";
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << round_half_up(*ratio * 100.0, 2);
    return out.str();
}

void set_optional(ojson& j, const char* key, const std::optional<double>& value) {
    if (value)
        j[key] = *value;
    else
        j[key] = nullptr;
}

std::optional<double> get_optional(const ojson& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<double>();
}

}  // namespace

std::optional<double> f1_avg(const std::vector<MatchReport>& reports) {
    double sum = 0.0;
    int count = 0;
    for (const auto& r : reports) {
        if (r.negative_pair) continue;
        sum += r.f1;
        ++count;
    }
    if (count == 0) return std::nullopt;
    return sum / count;
}

std::optional<double> fps(const std::vector<MatchReport>& reports) {
    double sum = 0.0;
    int count = 0;
    for (const auto& r : reports) {
        if (!r.negative_pair) continue;
        sum += r.hallucination_count;
        ++count;
    }
    if (count == 0) return std::nullopt;
    return sum / count;
}

double fps_norm(double fps_value) {
    if (fps_value < 0.0)
        throw std::invalid_argument("fps must be non-negative");
    return 1.0 / (1.0 + std::log1p(fps_value));
}

double s_final(double f1_avg_value, double fps_norm_value) {
    if (f1_avg_value < 0.0 || f1_avg_value > 1.0)
        throw std::invalid_argument("f1_avg must be in [0, 1]");
    if (fps_norm_value < 0.0 || fps_norm_value > 1.0)
        throw std::invalid_argument("fps_norm must be in [0, 1]");
    return f1_avg_value * fps_norm_value;
}

double round_half_up(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::floor(value * scale + 0.5) / scale;
}

RunReport aggregate_run(const std::string& label, std::vector<MatchReport> pairs,
                        int failed_runs, int skipped_pairs, int excluded_pairs) {
    RunReport report;
    report.label = label;
    report.failed_runs = failed_runs;
    report.skipped_pairs = skipped_pairs;
    report.excluded_pairs = excluded_pairs;

    double precision_sum = 0.0;
    double recall_sum = 0.0;
    for (const auto& pair : pairs) {
        if (pair.negative_pair) {
            ++report.negative_pairs;
        } else {
            ++report.positive_pairs;
            precision_sum += pair.precision;
            recall_sum += pair.recall;
        }
    }
    if (report.positive_pairs > 0) {
        report.precision_avg = precision_sum / report.positive_pairs;
        report.recall_avg = recall_sum / report.positive_pairs;
    }
    report.f1_avg = f1_avg(pairs);
    report.fps = fps(pairs);
    if (report.fps) report.fps_norm = fps_norm(*report.fps);
    if (report.f1_avg && report.fps_norm)
        report.s_final = s_final(*report.f1_avg, *report.fps_norm);

    report.pairs = std::move(pairs);
    return report;
}

ojson RunReport::to_json() const {
    ojson doc;
    doc["schema_version"] = schema_version;
    doc["label"] = label;
    doc["counts"] = {{"positive_pairs", positive_pairs},
                     {"negative_pairs", negative_pairs},
                     {"failed_runs", failed_runs},
                     {"skipped_pairs", skipped_pairs},
                     {"excluded_pairs", excluded_pairs}};
    ojson metrics;
    set_optional(metrics, "precision_avg", precision_avg);
    set_optional(metrics, "recall_avg", recall_avg);
    set_optional(metrics, "f1_avg", f1_avg);
    set_optional(metrics, "fps", fps);
    set_optional(metrics, "fps_norm", fps_norm);
    set_optional(metrics, "s_final", s_final);
    doc["metrics"] = std::move(metrics);

    doc["pairs"] = ojson::array();
    for (const auto& pair : pairs) {
        ojson jp;
        jp["trajectory_id"] = pair.trajectory_id;
        jp["profile_id"] = pair.profile_id;
        jp["negative"] = pair.negative_pair;
        if (pair.negative_pair) {
            jp["hallucinations"] = pair.hallucination_count;
        } else {
            jp["precision"] = pair.precision;
            jp["recall"] = pair.recall;
            jp["f1"] = pair.f1;
        }
        ojson tp = ojson::array();
        for (const auto& [pred, ref] : pair.tp_pairs)
            tp.push_back({{"predicted", intent_to_json(pred)},
                          {"reference", intent_to_json(ref)}});
        jp["tp"] = std::move(tp);
        ojson fp_arr = ojson::array();
        for (const auto& intent : pair.fp) fp_arr.push_back(intent_to_json(intent));
        jp["fp"] = std::move(fp_arr);
        ojson fn_arr = ojson::array();
        for (const auto& intent : pair.fn) fn_arr.push_back(intent_to_json(intent));
        jp["fn"] = std::move(fn_arr);
        doc["pairs"].push_back(std::move(jp));
    }
    return doc;
}

RunReport RunReport::from_json(const ojson& doc) {
    RunReport report;
    report.schema_version = doc.at("schema_version").get<std::string>();
    report.label = doc.value("label", "");
    const auto& counts = doc.at("counts");
    report.positive_pairs = counts.value("positive_pairs", 0);
    report.negative_pairs = counts.value("negative_pairs", 0);
    report.failed_runs = counts.value("failed_runs", 0);
    report.skipped_pairs = counts.value("skipped_pairs", 0);
    report.excluded_pairs = counts.value("excluded_pairs", 0);
    const auto& metrics = doc.at("metrics");
    report.precision_avg = get_optional(metrics, "precision_avg");
    report.recall_avg = get_optional(metrics, "recall_avg");
    report.f1_avg = get_optional(metrics, "f1_avg");
    report.fps = get_optional(metrics, "fps");
    report.fps_norm = get_optional(metrics, "fps_norm");
    report.s_final = get_optional(metrics, "s_final");

    for (const auto& jp : doc.value("pairs", ojson::array())) {
        MatchReport pair;
        pair.trajectory_id = jp.value("trajectory_id", "");
        pair.profile_id = jp.value("profile_id", "");
        pair.negative_pair = jp.value("negative", false);
        pair.hallucination_count = jp.value("hallucinations", 0);
        pair.precision = jp.value("precision", 0.0);
        pair.recall = jp.value("recall", 0.0);
        pair.f1 = jp.value("f1", 0.0);
        for (const auto& jt : jp.value("tp", ojson::array()))
            pair.tp_pairs.emplace_back(intent_from_json(jt.at("predicted")),
                                       intent_from_json(jt.at("reference")));
        for (const auto& ji : jp.value("fp", ojson::array()))
            pair.fp.push_back(intent_from_json(ji));
        for (const auto& ji : jp.value("fn", ojson::array()))
            pair.fn.push_back(intent_from_json(ji));
        report.pairs.push_back(std::move(pair));
    }
    return report;
}

std::string render_report_table(std::vector<RunReport> reports) {
    std::sort(reports.begin(), reports.end(), [](const RunReport& a, const RunReport& b) {
        const double sa = a.s_final.value_or(-1.0);
        const double sb = b.s_final.value_or(-1.0);
        if (sa != sb) return sa > sb;
        return a.label < b.label;
    });

    std::size_t label_width = std::string("Run").size();
    for (const auto& r : reports) label_width = std::max(label_width, r.label.size());

    std::ostringstream out;
    auto row = [&](const std::string& label, const std::string& p, const std::string& r,
                   const std::string& f1, const std::string& fpsn, const std::string& s) {
        out << std::left << std::setw(static_cast<int>(label_width) + 2) << label
            << std::right << std::setw(10) << p << std::setw(9) << r << std::setw(9) << f1
            << std::setw(10) << fpsn << std::setw(10) << s << "\n";
    };
    row("Run", "Precision", "Recall", "F1_avg", "FPS_norm", "S_final");
    out << std::string(label_width + 2 + 10 + 9 + 9 + 10 + 10, '-') << "\n";
    for (const auto& r : reports) {
        row(r.label, percent_cell(r.precision_avg), percent_cell(r.recall_avg),
            percent_cell(r.f1_avg), percent_cell(r.fps_norm), percent_cell(r.s_final));
    }
    return out.str();
}

}  // namespace pira::eval
