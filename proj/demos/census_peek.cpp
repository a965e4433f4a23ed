// Enumerate the rationals of the middle-thirds set bucket by bucket and print
// the growth/period diagnostics that the census reports are built from.

#include <cmath>
#include <iostream>

#include "rifs/census.hpp"

int main() {
  using namespace rifs;

  std::vector<std::vector<CensusRecord>> buckets;
  for (int n = 1; n <= 4; ++n) buckets.push_back(brute_census(n));

  std::cout << "members with q < 9:\n";
  for (int n = 0; n < 2; ++n)
    for (const auto& rec : buckets[n])
      std::cout << "  " << rec.p.get_str() << "/" << rec.q_red.get_str() << "  word "
                << RationalIFS::cantor().render(rec.word) << "  (r,m)=(" << rec.r.get_str()
                << "," << rec.m.get_str() << ")  q_int " << rec.q_int.get_str() << "\n";

  double K = 2.0 / std::log(1.5);
  std::cout << "\nper-bucket diagnostics (K = " << K << "):\n";
  for (const auto& row : conjecture_diagnostics(buckets, K))
    std::cout << "  n=" << row.n << "  total=" << row.count_total << "  growth=" << row.growth
              << "  max m/log q=" << row.max_ratio << "  exceptions=" << row.exceptions << "\n";
  return 0;
}
