#include "se2conv/metrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace se2conv {

double f1_score(long long tp, long long fp, long long fn) {
  if (tp < 0 || fp < 0 || fn < 0)
    throw std::invalid_argument("f1_score: counts must be nonnegative");
  long long denom = 2 * tp + fp + fn;
  if (denom == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("roc_auc: scores and labels differ in length");
  std::size_t n = scores.size();
  std::size_t pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw std::invalid_argument("roc_auc: labels must be 0 or 1");
    pos += static_cast<std::size_t>(l);
  }
  if (pos == 0 || pos == n)
    throw std::invalid_argument("roc_auc: both classes must be present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Tie-averaged ranks (1-based); sum over positives gives the U statistic.
  double pos_rank_sum = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    double rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) pos_rank_sum += rank;
    i = j;
  }
  double u = pos_rank_sum - 0.5 * static_cast<double>(pos) * static_cast<double>(pos + 1);
  return u / (static_cast<double>(pos) * static_cast<double>(n - pos));
}

double rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("rand_index: partitions differ in length");
  std::size_t n = a.size();
  if (n < 2) throw std::invalid_argument("rand_index: needs at least 2 elements");

  auto pairs = [](double m) { return m * (m - 1) * 0.5; };
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ca, cb;
  for (std::size_t i = 0; i < n; ++i) {
    joint[{a[i], b[i]}] += 1;
    ca[a[i]] += 1;
    cb[b[i]] += 1;
  }
  double sum_joint = 0, sum_a = 0, sum_b = 0;
  for (auto& [k, v] : joint) sum_joint += pairs(v);
  for (auto& [k, v] : ca) sum_a += pairs(v);
  for (auto& [k, v] : cb) sum_b += pairs(v);
  double total = pairs(static_cast<double>(n));
  // agreements = pairs together in both + pairs apart in both
  double agree = total + 2 * sum_joint - sum_a - sum_b;
  return agree / total;
}

std::vector<int> connected_components(const std::vector<std::uint8_t>& mask, int h, int w,
                                      int* count) {
  if (mask.size() != static_cast<std::size_t>(h) * w)
    throw std::invalid_argument("connected_components: mask size does not match h*w");
  std::vector<int> parent;
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[std::size_t(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  auto unite = [&](int x, int y) {
    x = find(x);
    y = find(y);
    if (x != y) parent[static_cast<std::size_t>(std::max(x, y))] = std::min(x, y);
  };

  // First pass: provisional labels with union of left/up neighbors.
  std::vector<int> label(mask.size(), -1);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      std::size_t idx = static_cast<std::size_t>(r) * w + c;
      if (!mask[idx]) continue;
      int left = c > 0 && mask[idx - 1] ? label[idx - 1] : -1;
      int up = r > 0 && mask[idx - static_cast<std::size_t>(w)]
                   ? label[idx - static_cast<std::size_t>(w)]
                   : -1;
      if (left < 0 && up < 0) {
        label[idx] = static_cast<int>(parent.size());
        parent.push_back(label[idx]);
      } else if (left >= 0 && up >= 0) {
        label[idx] = std::min(find(left), find(up));
        unite(left, up);
      } else {
        label[idx] = find(std::max(left, up));
      }
    }

  // Second pass: compact roots to 1..k in row-major first-appearance order.
  std::vector<int> compact(parent.size(), 0);
  std::vector<int> out(mask.size(), 0);
  int next = 0;
  for (std::size_t idx = 0; idx < mask.size(); ++idx) {
    if (label[idx] < 0) continue;
    int root = find(label[idx]);
    if (compact[static_cast<std::size_t>(root)] == 0) compact[static_cast<std::size_t>(root)] = ++next;
    out[idx] = compact[static_cast<std::size_t>(root)];
  }
  if (count) *count = next;
  return out;
}

}  // namespace se2conv
