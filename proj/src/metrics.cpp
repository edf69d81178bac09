#include "kandistill/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "kandistill/errors.hpp"

namespace kandistill {

EvalReport report_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn,
                              std::uint64_t fn) {
    EvalReport r;
    r.tp = tp;
    r.fp = fp;
    r.tn = tn;
    r.fn = fn;
    const auto total = r.total();
    r.accuracy = total ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
    if (tp + fp > 0) {
        r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    } else {
        r.precision = 0.0;
        r.precision_defined = false;
    }
    if (tp + fn > 0) {
        r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    } else {
        r.recall = 0.0;
        r.recall_defined = false;
    }
    if (r.precision + r.recall > 0.0) {
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    } else {
        r.f1 = 0.0;
        r.f1_defined = false;
    }
    return r;
}

namespace {

int argmax(std::span<const double> v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i) {
        if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
    }
    return best;
}

} // namespace

EvalReport evaluate(const Model& model, const Dataset& data) {
    if (data.n_rows == 0) throw InvalidArgument("cannot evaluate on an empty dataset");
    if (static_cast<std::size_t>(model.input_dim()) != data.n_features) {
        throw DimensionError("model input dimension does not match dataset feature count");
    }
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t r = 0; r < data.n_rows; ++r) {
        const auto logits = model.forward(data.row(r));
        const int pred = argmax(logits) == 1 ? 1 : 0;
        const int truth = data.labels[r] ? 1 : 0;
        if (pred == 1 && truth == 1) ++tp;
        else if (pred == 1 && truth == 0) ++fp;
        else if (pred == 0 && truth == 0) ++tn;
        else ++fn;
    }
    return report_from_counts(tp, fp, tn, fn);
}

void export_embeddings(const Model& model, const Dataset& data, const std::string& layer_tag,
                       const std::string& path) {
    const bool logits = layer_tag == "logits";
    if (!logits && layer_tag != "penultimate") {
        throw InvalidArgument("unknown embedding layer tag: " + layer_tag +
                              " (expected \"penultimate\" or \"logits\")");
    }
    if (static_cast<std::size_t>(model.input_dim()) != data.n_features) {
        throw DimensionError("model input dimension does not match dataset feature count");
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    char buf[48];
    for (std::size_t r = 0; r < data.n_rows; ++r) {
        const auto emb = logits ? model.forward(data.row(r)) : model.penultimate(data.row(r));
        for (double v : emb) {
            std::snprintf(buf, sizeof(buf), "%.10g", v);
            out << buf << ',';
        }
        out << static_cast<int>(data.labels[r]) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::string format_report_table(const EvalReport& report, std::size_t parameter_count) {
    std::ostringstream os;
    char line[160];
    os << "              predicted\n";
    os << "              normal   attack\n";
    std::snprintf(line, sizeof(line), "true normal %8llu %8llu\n",
                  static_cast<unsigned long long>(report.tn),
                  static_cast<unsigned long long>(report.fp));
    os << line;
    std::snprintf(line, sizeof(line), "true attack %8llu %8llu\n",
                  static_cast<unsigned long long>(report.fn),
                  static_cast<unsigned long long>(report.tp));
    os << line;
    std::snprintf(line, sizeof(line),
                  "accuracy %.4f  precision %.4f%s  recall %.4f%s  f1 %.4f%s\n", report.accuracy,
                  report.precision, report.precision_defined ? "" : "*", report.recall,
                  report.recall_defined ? "" : "*", report.f1, report.f1_defined ? "" : "*");
    os << line;
    os << "parameters " << parameter_count << "\n";
    if (!report.precision_defined || !report.recall_defined || !report.f1_defined) {
        os << "(* zero denominator, reported as 0)\n";
    }
    return os.str();
}

std::string format_report_kv(const EvalReport& report, std::size_t parameter_count) {
    std::ostringstream os;
    char line[64];
    os << "tp=" << report.tp << "\nfp=" << report.fp << "\ntn=" << report.tn
       << "\nfn=" << report.fn << "\n";
    std::snprintf(line, sizeof(line), "accuracy=%.17g\n", report.accuracy);
    os << line;
    std::snprintf(line, sizeof(line), "precision=%.17g\n", report.precision);
    os << line;
    std::snprintf(line, sizeof(line), "recall=%.17g\n", report.recall);
    os << line;
    std::snprintf(line, sizeof(line), "f1=%.17g\n", report.f1);
    os << line;
    os << "precision_defined=" << (report.precision_defined ? 1 : 0) << "\n";
    os << "recall_defined=" << (report.recall_defined ? 1 : 0) << "\n";
    os << "f1_defined=" << (report.f1_defined ? 1 : 0) << "\n";
    os << "parameters=" << parameter_count << "\n";
    return os.str();
}

std::string format_confusion_csv(const EvalReport& report) {
    std::ostringstream os;
    os << report.tn << "," << report.fp << "\n" << report.fn << "," << report.tp << "\n";
    return os.str();
}

} // namespace kandistill
