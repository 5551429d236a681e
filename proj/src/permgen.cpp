#include "pdcsq/permgen.hpp"

#include <numeric>
#include <stdexcept>

namespace pdcsq {

Row uniformPermutation(int n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("uniformPermutation: n must be >= 1");
  Row p(n);
  std::iota(p.begin(), p.end(), 1);
  rng.shuffle(p);
  return p;
}

bool isDerangement(const Row& perm) {
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (perm[i] == static_cast<int>(i) + 1) return false;
  return true;
}

Row uniformDerangement(int n, RngStream& rng) {
  if (n < 2) throw std::invalid_argument("uniformDerangement: n must be >= 2");
  for (;;) {
    Row p = uniformPermutation(n, rng);
    if (isDerangement(p)) return p;
  }
}

Row uniformDerangementStartingWith(int n, int i, RngStream& rng) {
  if (n < 3) throw std::invalid_argument("uniformDerangementStartingWith: n must be >= 3");
  if (i < 2 || i > n)
    throw std::invalid_argument("uniformDerangementStartingWith: first entry must be in 2..n");
  for (;;) {
    Row p = uniformDerangement(n, rng);
    if (p[0] == i) return p;
  }
}

mpz_class derangementCount(int n) {
  if (n < 0) throw std::invalid_argument("derangementCount: n must be >= 0");
  mpz_class prev2 = 1, prev1 = 0;  // D_0, D_1
  if (n == 0) return prev2;
  if (n == 1) return prev1;
  mpz_class d;
  for (int k = 2; k <= n; ++k) {
    d = mpz_class(k - 1) * (prev1 + prev2);
    prev2 = prev1;
    prev1 = d;
  }
  return d;
}

mpz_class derangementCountStartingWith(int n) {
  if (n < 3) throw std::invalid_argument("derangementCountStartingWith: n must be >= 3");
  mpz_class d = derangementCount(n);
  mpz_class q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), d.get_mpz_t(), mpz_class(n - 1).get_mpz_t());
  if (r != 0) throw std::logic_error("derangement count not divisible by n-1");
  return q;
}

}  // namespace pdcsq
