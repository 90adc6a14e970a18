#pragma once

#include <cstdint>
#include <vector>

namespace se2conv {

// 2*TP / (2*TP + FP + FN); 0 when that denominator is 0. Counts must be
// nonnegative.
double f1_score(long long tp, long long fp, long long fn);

// Area under the ROC curve as the Mann-Whitney statistic: the fraction of
// (positive, negative) pairs ranked correctly, ties counting one half.
// Computed with tie-averaged ranks in O(n log n). Labels are {0,1}; both
// classes must be present.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Fraction of unordered element pairs on which two partitions agree
// (same-cluster in both, or split in both). Labels are arbitrary ints.
double rand_index(const std::vector<int>& a, const std::vector<int>& b);

// 4-connected components of a binary h x w mask (nonzero = foreground).
// Labels start at 1 and are assigned in row-major first-appearance order;
// background stays 0. Optionally reports the component count.
std::vector<int> connected_components(const std::vector<std::uint8_t>& mask, int h, int w,
                                      int* count = nullptr);

}  // namespace se2conv
