#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace grpcomb {

using Elt = uint32_t;

// GF(p^k). Elements are integers in [0, q) whose base-p digits are the
// coefficients of a polynomial in the generator x (digit 0 = constant term).
// The defining polynomial is the lexicographically first primitive one, so
// the generator x has order q - 1 and log/exp tables are exact.
class Field {
public:
  static std::shared_ptr<const Field> get(uint32_t p, uint32_t k = 1);
  static std::shared_ptr<const Field> of_order(uint32_t q);

  uint32_t p() const { return p_; }
  uint32_t k() const { return k_; }
  uint32_t q() const { return q_; }
  std::string name() const;

  Elt add(Elt a, Elt b) const
  {
    if (p_ == 2)
      return a ^ b;
    if (k_ == 1) {
      Elt s = a + b;
      return s >= p_ ? s - p_ : s;
    }
    if (!addtab_.empty())
      return addtab_[size_t(a) * q_ + b];
    return add_slow(a, b);
  }
  Elt neg(Elt a) const { return negtab_[a]; }
  Elt sub(Elt a, Elt b) const { return add(a, negtab_[b]); }
  Elt mul(Elt a, Elt b) const
  {
    if (a == 0 || b == 0)
      return 0;
    return exp_[log_[a] + log_[b]];
  }
  Elt inv(Elt a) const;
  Elt div(Elt a, Elt b) const { return mul(a, inv(b)); }
  Elt pow(Elt a, uint64_t e) const;
  Elt from_int(int64_t v) const;     // image of the integer v (prime subfield)
  Elt generator() const { return exp_[1]; }
  uint32_t log(Elt a) const { return log_[a]; }
  Elt exp(uint64_t e) const { return exp_[e % (q_ - 1)]; }

  // defining polynomial coefficients c_0..c_k (monic, c_k = 1) over F_p
  const std::vector<uint32_t> &modulus() const { return modulus_; }

  // ring embedding of this field into `big`; needs k | big.k()
  std::vector<Elt> embedding_into(const Field &big) const;

  Field(uint32_t p, uint32_t k);

private:
  Elt add_slow(Elt a, Elt b) const;

  uint32_t p_, k_, q_;
  std::vector<uint32_t> modulus_;
  std::vector<Elt> exp_;      // length 2(q-1)
  std::vector<uint32_t> log_; // log_[0] unused
  std::vector<Elt> negtab_;
  std::vector<Elt> addtab_;   // only for small non-prime fields
};

using FieldPtr = std::shared_ptr<const Field>;

bool is_prime(uint64_t n);
// (p, k) with q = p^k, or {0,0} if q is not a prime power
std::pair<uint32_t, uint32_t> prime_power(uint64_t q);

} // namespace grpcomb
