#include "mtsdvgan/eval/detect.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "mtsdvgan/archive.hpp"
#include "mtsdvgan/config.hpp"
#include "mtsdvgan/error.hpp"

namespace mtsdvgan::eval {

DetectionReport detect(const nn::Model<float>& model, const data::WindowSet& eval, const data::WindowSet& reference,
                       const DetectOptions& options) {
    if ((!options.lambda || !options.threshold) && !eval.window_labels)
        throw ValidationError("detect: automatic lambda or threshold selection needs labeled windows");
    if (options.lambda && !(*options.lambda >= 0 && *options.lambda <= 1))
        throw ValidationError("detect: lambda must lie in [0, 1]");

    DetectionReport r;
    r.start_indices = eval.start_indices;
    r.labels = eval.window_labels;
    const auto raw = score_windows(model, eval, options.scoring);
    const auto ref = score_windows(model, reference, options.scoring);
    r.l_r_raw = raw.l_r;
    r.l_d_raw = raw.l_d;
    r.l_r = normalize_scores(ref.l_r, raw.l_r, "l_r");
    r.l_d = normalize_scores(ref.l_d, raw.l_d, "l_d");

    if (options.lambda) {
        r.lambda = *options.lambda;
    } else {
        r.lambda = sweep_lambda(r.l_d, r.l_r, *r.labels).lambda;
        r.lambda_auto = true;
    }
    r.rd = rd_score(r.l_d, r.l_r, r.lambda);

    if (options.threshold) {
        r.threshold = *options.threshold;
        if (r.labels) r.metrics = evaluate_threshold(r.rd, *r.labels, r.threshold);
    } else {
        r.metrics = select_threshold(r.rd, *r.labels);
        r.threshold = r.metrics->threshold;
        r.threshold_auto = true;
    }
    if (r.labels) {
        const auto pos = std::count(r.labels->begin(), r.labels->end(), std::uint8_t{1});
        if (pos > 0 && pos < static_cast<std::ptrdiff_t>(r.labels->size())) {
            r.roc = roc_auc(r.rd, *r.labels);
            r.metrics->auc = r.roc->auc;
        }
    }
    return r;
}

std::string metrics_json(const DetectionReport& r, int indent) {
    nlohmann::ordered_json j;
    j["format_version"] = kArchiveFormatVersion;
    j["windows"] = r.rd.size();
    j["lambda"] = r.lambda;
    j["lambda_auto"] = r.lambda_auto;
    j["threshold"] = r.threshold;
    j["threshold_auto"] = r.threshold_auto;
    if (r.metrics) {
        const auto& m = *r.metrics;
        j["precision"] = m.precision;
        j["accuracy"] = m.accuracy;
        j["recall"] = m.recall;
        j["f1"] = m.f1;
        j["auc"] = m.auc ? nlohmann::ordered_json(*m.auc) : nlohmann::ordered_json(nullptr);
        j["tp"] = m.tp;
        j["fp"] = m.fp;
        j["fn"] = m.fn;
        j["tn"] = m.tn;
        j["degenerate"] = {{"precision", m.precision_degenerate},
                           {"recall", m.recall_degenerate},
                           {"f1", m.f1_degenerate}};
    }
    return j.dump(indent) + "\n";
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

void write_metrics_json(const std::filesystem::path& path, const DetectionReport& report) {
    auto out = open_out(path);
    out << metrics_json(report);
}

void write_roc_csv(const std::filesystem::path& path, const RocResult& roc) {
    auto out = open_out(path);
    out << "fpr,tpr,threshold\n";
    for (const auto& p : roc.points)
        out << format_double(p.fpr) << ',' << format_double(p.tpr) << ',' << format_double(p.threshold) << '\n';
}

void write_scores_csv(const std::filesystem::path& path, const DetectionReport& r) {
    auto out = open_out(path);
    out << "start_index,l_r,l_d,rd,label\n";
    for (std::size_t i = 0; i < r.rd.size(); ++i) {
        out << r.start_indices[i] << ',' << format_double(r.l_r[i]) << ',' << format_double(r.l_d[i]) << ','
            << format_double(r.rd[i]) << ',';
        if (r.labels) out << static_cast<int>((*r.labels)[i]);
        out << '\n';
    }
}

}  // namespace mtsdvgan::eval
