#include <map>
#include <mutex>

#include "grpcomb/error.hpp"
#include "grpcomb/field.hpp"

namespace grpcomb {

bool is_prime(uint64_t n)
{
  if (n < 2)
    return false;
  for (uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0)
      return false;
  return true;
}

std::pair<uint32_t, uint32_t> prime_power(uint64_t q)
{
  if (q < 2)
    return {0, 0};
  uint64_t p = 2;
  while (q % p)
    ++p;
  uint32_t k = 0;
  while (q % p == 0) {
    q /= p;
    ++k;
  }
  if (q != 1)
    return {0, 0};
  return {uint32_t(p), k};
}

namespace {

constexpr uint32_t kMaxOrder = 1u << 20;

std::vector<uint32_t> digits_of(uint32_t v, uint32_t p, uint32_t k)
{
  std::vector<uint32_t> d(k);
  for (uint32_t i = 0; i < k; ++i) {
    d[i] = v % p;
    v /= p;
  }
  return d;
}

} // namespace

Field::Field(uint32_t p, uint32_t k) : p_(p), k_(k)
{
  require(is_prime(p) && k >= 1, ErrorCode::invalid_argument,
          "field characteristic must be prime");
  uint64_t q = 1;
  for (uint32_t i = 0; i < k; ++i) {
    q *= p;
    require(q <= kMaxOrder, ErrorCode::cap_exceeded, "field too large");
  }
  q_ = uint32_t(q);

  // search monic polynomials x^k + c_{k-1}x^{k-1} + ... + c_0, smallest
  // coefficient vector first, for one in which x has order q - 1
  std::vector<uint32_t> pw(k, 0), cur(k);
  for (uint32_t t = 1; t < q_; ++t) {
    auto c = digits_of(t, p, k);
    if (c[0] == 0)
      continue;
    // powers of x, starting at x^0 = 1
    std::fill(cur.begin(), cur.end(), 0);
    cur[0] = 1;
    uint32_t order = 0;
    for (uint32_t step = 1; step < q_; ++step) {
      uint32_t top = cur[k - 1];
      for (uint32_t i = k - 1; i > 0; --i)
        cur[i] = cur[i - 1];
      cur[0] = 0;
      for (uint32_t i = 0; i < k; ++i)
        cur[i] = (cur[i] + (p - c[i]) * top) % p;
      bool one = cur[0] == 1;
      for (uint32_t i = 1; one && i < k; ++i)
        one = cur[i] == 0;
      if (one) {
        order = step;
        break;
      }
    }
    if (order != q_ - 1)
      continue;
    modulus_ = c;
    modulus_.push_back(1);
    break;
  }
  require(!modulus_.empty(), ErrorCode::internal, "no primitive polynomial");

  exp_.assign(2 * size_t(q_ - 1), 0);
  log_.assign(q_, 0);
  std::fill(cur.begin(), cur.end(), 0);
  cur[0] = 1;
  for (uint32_t e = 0; e < q_ - 1; ++e) {
    uint32_t v = 0;
    for (uint32_t i = k; i-- > 0;)
      v = v * p + cur[i];
    exp_[e] = exp_[e + q_ - 1] = v;
    log_[v] = e;
    uint32_t top = cur[k - 1];
    for (uint32_t i = k - 1; i > 0; --i)
      cur[i] = cur[i - 1];
    cur[0] = 0;
    for (uint32_t i = 0; i < k; ++i)
      cur[i] = (cur[i] + (p - modulus_[i]) * top) % p;
  }

  negtab_.resize(q_);
  for (uint32_t a = 0; a < q_; ++a) {
    auto d = digits_of(a, p, k);
    uint32_t v = 0;
    for (uint32_t i = k; i-- > 0;)
      v = v * p + (p - d[i]) % p;
    negtab_[a] = v;
  }

  if (p != 2 && k > 1 && q_ <= 1024) {
    addtab_.resize(size_t(q_) * q_);
    for (uint32_t a = 0; a < q_; ++a)
      for (uint32_t b = 0; b < q_; ++b)
        addtab_[size_t(a) * q_ + b] = add_slow(a, b);
  }
}

Elt Field::add_slow(Elt a, Elt b) const
{
  uint32_t v = 0, scale = 1;
  for (uint32_t i = 0; i < k_; ++i) {
    v += ((a % p_ + b % p_) % p_) * scale;
    a /= p_;
    b /= p_;
    scale *= p_;
  }
  return v;
}

Elt Field::inv(Elt a) const
{
  require(a != 0, ErrorCode::invalid_argument, "inverse of zero");
  return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
}

Elt Field::pow(Elt a, uint64_t e) const
{
  if (e == 0)
    return 1;
  if (a == 0)
    return 0;
  return exp_[(uint64_t(log_[a]) * (e % (q_ - 1))) % (q_ - 1)];
}

Elt Field::from_int(int64_t v) const
{
  int64_t r = v % int64_t(p_);
  if (r < 0)
    r += p_;
  return Elt(r);
}

std::string Field::name() const
{
  return "F" + std::to_string(q_);
}

std::vector<Elt> Field::embedding_into(const Field &big) const
{
  require(big.p_ == p_ && big.k_ % k_ == 0, ErrorCode::invalid_argument,
          "no embedding " + name() + " -> " + big.name());
  // smallest root of our defining polynomial inside big
  Elt root = 0;
  bool found = false;
  for (Elt r = 1; r < big.q_ && !found; ++r) {
    Elt acc = 0;
    for (size_t i = modulus_.size(); i-- > 0;)
      acc = big.add(big.mul(acc, r), big.from_int(modulus_[i]));
    if (acc == 0) {
      root = r;
      found = true;
    }
  }
  require(found, ErrorCode::internal, "embedding root not found");
  std::vector<Elt> map(q_);
  for (uint32_t a = 0; a < q_; ++a) {
    auto d = digits_of(a, p_, k_);
    Elt acc = 0;
    for (size_t i = k_; i-- > 0;)
      acc = big.add(big.mul(acc, root), big.from_int(d[i]));
    map[a] = acc;
  }
  return map;
}

std::shared_ptr<const Field> Field::get(uint32_t p, uint32_t k)
{
  static std::mutex mu;
  static std::map<std::pair<uint32_t, uint32_t>, std::shared_ptr<const Field>>
    cache;
  std::lock_guard<std::mutex> lock(mu);
  auto &slot = cache[{p, k}];
  if (!slot)
    slot = std::make_shared<const Field>(p, k);
  return slot;
}

std::shared_ptr<const Field> Field::of_order(uint32_t q)
{
  auto [p, k] = prime_power(q);
  require(p != 0, ErrorCode::invalid_argument,
          "field order must be a prime power: " + std::to_string(q));
  return get(p, k);
}

} // namespace grpcomb
