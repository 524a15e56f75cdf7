#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lipvessel/image.hpp"

namespace lipvessel {

struct ConfusionCounts {
    std::int64_t tp = 0, tn = 0, fp = 0, fn = 0;
    std::int64_t total() const { return tp + tn + fp + fn; }
};

// se/sp are absent when their denominator is zero.
struct MetricsRecord {
    std::string image_id;
    std::optional<double> se;
    std::optional<double> sp;
    double acc = 0.0;
};

struct EvalSummary {
    std::optional<double> mean_se;
    std::optional<double> mean_sp;
    double mean_acc = 0.0;
    double acc_std = 0.0;  // sample std (n-1); 0 for a single record
    std::size_t count = 0;
};

// Pixel counts restricted to the set pixels of fov. Throws on dimension
// mismatch.
ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& ref,
                          const BinaryMask& fov);

// Se = tp/(tp+fn), Sp = tn/(tn+fp), Acc = (tp+tn)/total. Throws when no
// pixel was evaluated.
MetricsRecord metrics(const ConfusionCounts& c, std::string image_id = {});

// Unweighted per-image means; absent Se/Sp values are skipped.
EvalSummary aggregate(std::span<const MetricsRecord> records);

// CSV: image_id,tp,tn,fp,fn,se,sp,acc,acc_std. One row per image (acc_std
// empty), then a "summary" row with the count cells empty, the mean ratios
// and the sample std of Acc.
void write_metrics_csv(std::ostream& out,
                       std::span<const std::pair<ConfusionCounts, MetricsRecord>> rows,
                       const EvalSummary& summary);

// Agreement picture: true positives black, true negatives white, false
// positives cyan, false negatives red; pixels outside the FOV white.
ColorImage render_overlay(const BinaryMask& pred, const BinaryMask& ref,
                          const BinaryMask& fov);

}  // namespace lipvessel
