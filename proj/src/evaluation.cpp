#include "lipvessel/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace lipvessel {

namespace {

std::string format_ratio(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string cell(const std::optional<double>& v) {
    return v ? format_ratio(*v) : std::string();
}

}  // namespace

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& ref,
                          const BinaryMask& fov) {
    if (!pred.same_size(ref) || !pred.same_size(fov))
        throw std::invalid_argument("confusion: mask dimensions differ");
    ConfusionCounts c;
    const auto& p = pred.pixels();
    const auto& r = ref.pixels();
    const auto& m = fov.pixels();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!m[i]) continue;
        if (p[i] && r[i]) ++c.tp;
        else if (!p[i] && !r[i]) ++c.tn;
        else if (p[i]) ++c.fp;
        else ++c.fn;
    }
    return c;
}

MetricsRecord metrics(const ConfusionCounts& c, std::string image_id) {
    const auto total = c.total();
    if (total <= 0) throw std::invalid_argument("metrics: no evaluated pixel");
    MetricsRecord rec;
    rec.image_id = std::move(image_id);
    if (c.tp + c.fn > 0)
        rec.se = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    if (c.tn + c.fp > 0)
        rec.sp = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
    rec.acc = static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
    return rec;
}

EvalSummary aggregate(std::span<const MetricsRecord> records) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");

    EvalSummary s;
    s.count = records.size();
    double se_sum = 0.0, sp_sum = 0.0, acc_sum = 0.0;
    int se_n = 0, sp_n = 0;
    for (const auto& r : records) {
        if (r.se) { se_sum += *r.se; ++se_n; }
        if (r.sp) { sp_sum += *r.sp; ++sp_n; }
        acc_sum += r.acc;
    }
    if (se_n > 0) s.mean_se = se_sum / se_n;
    if (sp_n > 0) s.mean_sp = sp_sum / sp_n;
    s.mean_acc = acc_sum / s.count;

    s.acc_std = 0.0;
    if (s.count > 1) {
        double ss = 0.0;
        for (const auto& r : records) {
            const double d = r.acc - s.mean_acc;
            ss += d * d;
        }
        s.acc_std = std::sqrt(ss / (s.count - 1));
    }
    return s;
}

void write_metrics_csv(std::ostream& os,
                       std::span<const std::pair<ConfusionCounts, MetricsRecord>> rows,
                       const EvalSummary& summary) {
    os << "image_id,tp,tn,fp,fn,se,sp,acc,acc_std\n";
    for (const auto& [c, rec] : rows) {
        os << rec.image_id << ',' << c.tp << ',' << c.tn << ',' << c.fp << ','
           << c.fn << ',' << cell(rec.se) << ',' << cell(rec.sp) << ','
           << format_ratio(rec.acc) << ",\n";
    }
    os << "summary,,,,," << cell(summary.mean_se) << ',' << cell(summary.mean_sp)
       << ',' << format_ratio(summary.mean_acc) << ',' << format_ratio(summary.acc_std)
       << '\n';
}

}  // namespace lipvessel
