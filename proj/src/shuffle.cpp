#include "curvchen/shuffle.hpp"

#include <algorithm>
#include <stdexcept>

namespace curvchen {

int inversion_parity(const std::vector<int>& perm) {
  int inv = 0;
  for (size_t i = 0; i < perm.size(); ++i)
    for (size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) ++inv;
  return inv % 2;
}

std::vector<Shuffle> enumerate_shuffles(int n, int m) {
  if (n < 0 || m < 0) throw std::invalid_argument("shuffles: negative block size");
  std::vector<Shuffle> out;
  // choose which of the n+m slots receive the left block, in lexicographic order
  std::vector<bool> pick(static_cast<size_t>(n + m), false);
  std::fill(pick.begin(), pick.begin() + n, true);
  do {
    Shuffle s{n, m, {}, 0};
    std::vector<int> left, right;
    for (int i = 0; i < n + m; ++i) (pick[i] ? left : right).push_back(i + 1);
    s.image = left;
    s.image.insert(s.image.end(), right.begin(), right.end());
    s.parity = inversion_parity(s.image);
    out.push_back(std::move(s));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return out;
}

}  // namespace curvchen
