#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tumseg {

/// One cross-validation fold; the three id lists are disjoint and
/// train+val+test covers every subject.
struct FoldSplit {
  std::vector<std::string> train, val, test;
};

/// Deterministic shuffled k-fold partition. Test blocks are floor(n/k)
/// subjects for the first k-1 folds with the remainder in the last fold
/// (369/5 -> 73,73,73,73,77); within each fold, round(val_fraction * rest)
/// of the non-test subjects become validation.
std::vector<FoldSplit> make_folds(const std::vector<std::string> &subject_ids,
                                  int k, double val_fraction,
                                  std::uint64_t seed);

} // namespace tumseg
