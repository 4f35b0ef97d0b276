#pragma once

#include <vector>

namespace curvchen {

// An (n,m)-shuffle: image[i] = sigma(i+1), 1-based targets.
struct Shuffle {
  int n = 0, m = 0;
  std::vector<int> image;
  int parity = 0;  // inversion count mod 2

  // sign of the reversed-order shuffle used on zags: (-1)^{nm + |sigma|}
  int sh_parity() const { return (n * m + parity) % 2; }
};

std::vector<Shuffle> enumerate_shuffles(int n, int m);

int inversion_parity(const std::vector<int>& perm);

}  // namespace curvchen
