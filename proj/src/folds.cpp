#include "tumseg/folds.hpp"

#include <cmath>

#include "tumseg/errors.hpp"
#include "tumseg/rng.hpp"

namespace tumseg {

std::vector<FoldSplit> make_folds(const std::vector<std::string> &subject_ids,
                                  int k, double val_fraction,
                                  std::uint64_t seed) {
  if (k < 2)
    throw ConfigError("make_folds: k must be >= 2");
  if (val_fraction <= 0 || val_fraction >= 1)
    throw ConfigError("make_folds: val_fraction must be in (0,1)");
  const std::int64_t n = std::int64_t(subject_ids.size());
  if (n < k)
    throw TooFewSubjects("make_folds: " + std::to_string(n) +
                         " subjects for " + std::to_string(k) + " folds");

  std::vector<std::string> ids = subject_ids;
  Rng rng(seed);
  rng.shuffle(ids);

  const std::int64_t base = n / k;
  std::vector<FoldSplit> folds(k);
  for (int f = 0; f < k; ++f) {
    const std::int64_t lo = f * base;
    const std::int64_t hi = (f == k - 1) ? n : lo + base;
    FoldSplit &split = folds[f];
    split.test.assign(ids.begin() + lo, ids.begin() + hi);

    std::vector<std::string> rest;
    rest.reserve(n - (hi - lo));
    rest.insert(rest.end(), ids.begin(), ids.begin() + lo);
    rest.insert(rest.end(), ids.begin() + hi, ids.end());

    const std::int64_t val_n = std::lround(val_fraction * double(rest.size()));
    if (val_n >= std::int64_t(rest.size()))
      throw TooFewSubjects("make_folds: no training subjects left in fold " +
                           std::to_string(f));
    split.val.assign(rest.begin(), rest.begin() + val_n);
    split.train.assign(rest.begin() + val_n, rest.end());
  }
  return folds;
}

} // namespace tumseg
