#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

#include "grpcomb/error.hpp"
#include "grpcomb/group.hpp"

namespace grpcomb {

const char *backend_name(Backend b)
{
  switch (b) {
  case Backend::table: return "table";
  case Backend::permutation: return "permutation";
  case Backend::tuple: return "tuple";
  case Backend::matrix: return "matrix";
  case Backend::product: return "product";
  case Backend::subgroup: return "subgroup";
  }
  return "?";
}

namespace {

// below this order the Cayley table is materialized
constexpr Id kTableLimit = 1024;

std::vector<uint64_t> prime_factors(uint64_t n)
{
  std::vector<uint64_t> ps;
  for (uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      ps.push_back(p);
      while (n % p == 0)
        n /= p;
    }
  if (n > 1)
    ps.push_back(n);
  return ps;
}

} // namespace

void FiniteGroup::finalize(Id n)
{
  n_ = n;
  inv_.resize(n);
  for (Id a = 0; a < n; ++a)
    inv_[a] = inv_raw(a);
  if (n <= kTableLimit) {
    std::vector<Id> t(size_t(n) * n);
    for (Id a = 0; a < n; ++a)
      for (Id b = 0; b < n; ++b)
        t[size_t(a) * n + b] = mul_raw(a, b);
    table_ = std::move(t);
  }
}

Id FiniteGroup::inv_raw(Id a) const
{
  Id prev = 0, x = a;
  while (x != 0) {
    prev = x;
    x = mul_raw(x, a);
  }
  return a == 0 ? 0 : prev;
}

Id FiniteGroup::pow(Id a, int64_t e) const
{
  if (e < 0) {
    a = inv(a);
    e = -e;
  }
  Id r = 0;
  while (e) {
    if (e & 1)
      r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

const std::vector<Id> &FiniteGroup::orders() const
{
  std::call_once(orders_once_, [this] {
    auto ps = prime_factors(n_);
    orders_.resize(n_);
    for (Id a = 0; a < n_; ++a) {
      uint64_t o = n_;
      for (uint64_t p : ps)
        while (o % p == 0 && pow(a, int64_t(o / p)) == 0)
          o /= p;
      orders_[a] = Id(o);
    }
  });
  return orders_;
}

bool FiniteGroup::is_abelian() const
{
  // greedy generating set, then pairwise commutation
  std::vector<char> in(n_, 0);
  std::vector<Id> members{0}, gens;
  in[0] = 1;
  for (Id a = 1; a < n_; ++a) {
    if (in[a])
      continue;
    for (Id g : gens)
      if (!commute(a, g))
        return false;
    gens.push_back(a);
    // extend closure
    std::vector<Id> frontier = members;
    for (size_t i = 0; i < frontier.size(); ++i)
      for (Id g : gens) {
        Id y = mul(frontier[i], g);
        if (!in[y]) {
          in[y] = 1;
          frontier.push_back(y);
        }
      }
    members = std::move(frontier);
  }
  return true;
}

// ---------------------------------------------------------------- TableGroup

TableGroup::TableGroup(std::string spec, Id n, std::vector<Id> table, bool validate)
  : FiniteGroup(std::move(spec), Backend::table), size_(n), tab_(std::move(table))
{
  require(n >= 1 && tab_.size() == size_t(n) * n, ErrorCode::not_a_group,
          "table has wrong size");
  if (validate) {
    for (Id v : tab_)
      require(v < n, ErrorCode::not_a_group, "table entry out of range");
    for (Id x = 0; x < n; ++x)
      require(tab_[x] == x && tab_[size_t(x) * n] == x, ErrorCode::not_a_group,
              "id 0 is not the identity");
    std::vector<char> seen(n);
    for (Id x = 0; x < n; ++x) {
      std::fill(seen.begin(), seen.end(), 0);
      for (Id y = 0; y < n; ++y) {
        Id v = tab_[size_t(x) * n + y];
        require(!seen[v], ErrorCode::not_a_group, "row is not a permutation");
        seen[v] = 1;
      }
    }
    auto at = [&](Id x, Id y) { return tab_[size_t(x) * n + y]; };
    if (n <= 512) {
      for (Id x = 0; x < n; ++x)
        for (Id y = 0; y < n; ++y) {
          Id xy = at(x, y);
          for (Id z = 0; z < n; ++z)
            require(at(xy, z) == at(x, at(y, z)), ErrorCode::not_a_group,
                    "table is not associative");
        }
    } else {
      uint64_t s = 0x12345;
      for (int t = 0; t < 2000000; ++t) {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        Id x = Id((s >> 33) % n), y = Id((s >> 13) % n), z = Id((s >> 43) % n);
        require(at(at(x, y), z) == at(x, at(y, z)), ErrorCode::not_a_group,
                "table is not associative");
      }
    }
  }
  finalize(n);
}

// ---------------------------------------------------------------- KeyedGroup

Id KeyedGroup::find(const uint8_t *k) const
{
  auto it = index_.find(std::string(reinterpret_cast<const char *>(k), stride_));
  return it == index_.end() ? order() : it->second;
}

Id KeyedGroup::mul_raw(Id a, Id b) const
{
  uint8_t buf[256];
  compose(key(a), key(b), buf);
  Id r = find(buf);
  require(r != order(), ErrorCode::internal, "product left the group");
  return r;
}

void KeyedGroup::populate(const std::vector<std::vector<uint8_t>> &gens,
                          const std::vector<uint8_t> &identity, uint64_t cap)
{
  require(stride_ > 0 && stride_ <= 256, ErrorCode::invalid_argument, "key width");
  std::vector<uint8_t> keys(identity);
  std::unordered_map<std::string, Id> index;
  index.emplace(std::string(identity.begin(), identity.end()), 0);
  uint8_t buf[256];
  size_t count = 1;
  for (size_t i = 0; i < count; ++i) {
    for (auto const &g : gens) {
      compose(&keys[i * stride_], g.data(), buf);
      std::string k(reinterpret_cast<const char *>(buf), stride_);
      if (index.count(k))
        continue;
      require(count < cap, ErrorCode::cap_exceeded,
              "group order exceeds cap " + std::to_string(cap));
      index.emplace(std::move(k), Id(count));
      keys.insert(keys.end(), buf, buf + stride_);
      ++count;
    }
  }

  std::vector<Id> perm(count);
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin() + 1, perm.end(), [&](Id a, Id b) {
    return std::lexicographical_compare(
      &keys[a * size_t(stride_)], &keys[a * size_t(stride_)] + stride_,
      &keys[b * size_t(stride_)], &keys[b * size_t(stride_)] + stride_);
  });
  keys_.resize(count * stride_);
  index_.clear();
  index_.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    std::copy_n(&keys[perm[i] * size_t(stride_)], stride_, &keys_[i * stride_]);
    index_.emplace(std::string(reinterpret_cast<const char *>(&keys_[i * stride_]),
                               stride_),
                   Id(i));
  }
  finalize(Id(count));
}

// ---------------------------------------------------------------- PermGroup

PermGroup::PermGroup(std::string spec, int degree,
                     const std::vector<std::vector<uint8_t>> &gens, uint64_t cap)
  : KeyedGroup(std::move(spec), Backend::permutation, std::max(degree, 1))
{
  std::vector<uint8_t> id(stride());
  std::iota(id.begin(), id.end(), 0);
  populate(gens, id, cap);
}

void PermGroup::compose(const uint8_t *x, const uint8_t *y, uint8_t *out) const
{
  for (int i = 0; i < stride(); ++i)
    out[i] = x[y[i]];
}

std::string PermGroup::label(Id a) const
{
  const uint8_t *p = key(a);
  std::vector<char> seen(stride(), 0);
  std::string s;
  for (int i = 0; i < stride(); ++i) {
    if (seen[i] || p[i] == i)
      continue;
    s += "(";
    int j = i;
    bool first = true;
    while (!seen[j]) {
      seen[j] = 1;
      if (!first)
        s += " ";
      s += std::to_string(j + 1);
      first = false;
      j = p[j];
    }
    s += ")";
  }
  return s.empty() ? "()" : s;
}

// ---------------------------------------------------------------- MatrixGroup

namespace {

std::vector<uint8_t> mat_key(const Mat &m)
{
  std::vector<uint8_t> k(m.a.size());
  for (size_t i = 0; i < k.size(); ++i) {
    require(m.a[i] < 256, ErrorCode::invalid_argument, "matrix entry too large");
    k[i] = uint8_t(m.a[i]);
  }
  return k;
}

} // namespace

MatrixGroup::MatrixGroup(std::string spec, FieldPtr field, int d,
                         const std::vector<Mat> &gens, uint64_t cap)
  : KeyedGroup(std::move(spec), Backend::matrix, d * d), field_(std::move(field)),
    d_(d)
{
  require(field_->q() <= 256, ErrorCode::invalid_argument,
          "matrix groups need q <= 256");
  std::vector<std::vector<uint8_t>> keys;
  for (auto const &g : gens)
    keys.push_back(mat_key(g));
  populate(keys, mat_key(identity(d)), cap);
}

void MatrixGroup::compose(const uint8_t *x, const uint8_t *y, uint8_t *out) const
{
  const Field &F = *field_;
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) {
      Elt s = 0;
      for (int l = 0; l < d_; ++l)
        s = F.add(s, F.mul(x[i * d_ + l], y[l * d_ + j]));
      out[i * d_ + j] = uint8_t(s);
    }
}

Mat MatrixGroup::matrix(Id a) const
{
  Mat m(d_, d_);
  const uint8_t *k = key(a);
  for (int i = 0; i < d_ * d_; ++i)
    m.a[i] = k[i];
  return m;
}

Id MatrixGroup::id_of(const Mat &m) const
{
  if (m.rows != d_ || m.cols != d_)
    return order();
  for (Elt v : m.a)
    if (v >= 256)
      return order();
  auto k = mat_key(m);
  return find(k.data());
}

std::string MatrixGroup::label(Id a) const
{
  std::string s = "[";
  const uint8_t *k = key(a);
  for (int i = 0; i < d_; ++i) {
    s += i ? ",[" : "[";
    for (int j = 0; j < d_; ++j) {
      if (j)
        s += ",";
      s += std::to_string(k[i * d_ + j]);
    }
    s += "]";
  }
  return s + "]";
}

// ---------------------------------------------------------------- TupleGroup

TupleGroup::TupleGroup(std::string spec, std::vector<uint32_t> radices, Cocycle cocycle)
  : FiniteGroup(std::move(spec), Backend::tuple), radix_(std::move(radices)),
    cocycle_(std::move(cocycle))
{
  uint64_t n = 1;
  for (uint32_t r : radix_) {
    require(r >= 1, ErrorCode::invalid_argument, "radix must be positive");
    n *= r;
    require(n <= (1ull << 31), ErrorCode::cap_exceeded, "tuple group too large");
  }
  finalize(Id(n));
}

std::vector<uint32_t> TupleGroup::coords(Id a) const
{
  std::vector<uint32_t> c(radix_.size());
  for (size_t i = radix_.size(); i-- > 0;) {
    c[i] = a % radix_[i];
    a /= radix_[i];
  }
  return c;
}

Id TupleGroup::from_coords(const std::vector<uint32_t> &c) const
{
  Id a = 0;
  for (size_t i = 0; i < radix_.size(); ++i)
    a = a * radix_[i] + c[i] % radix_[i];
  return a;
}

Id TupleGroup::mul_raw(Id a, Id b) const
{
  size_t s = radix_.size();
  uint32_t x[64], y[64], z[64];
  require(s <= 64, ErrorCode::invalid_argument, "too many coordinates");
  for (size_t i = s; i-- > 0;) {
    x[i] = a % radix_[i];
    a /= radix_[i];
    y[i] = b % radix_[i];
    b /= radix_[i];
    z[i] = x[i] + y[i];
  }
  if (cocycle_)
    cocycle_(x, y, z);
  Id r = 0;
  for (size_t i = 0; i < s; ++i)
    r = r * radix_[i] + z[i] % radix_[i];
  return r;
}

Id TupleGroup::inv_raw(Id a) const
{
  if (cocycle_)
    return FiniteGroup::inv_raw(a);
  auto c = coords(a);
  for (size_t i = 0; i < c.size(); ++i)
    c[i] = (radix_[i] - c[i]) % radix_[i];
  return from_coords(c);
}

std::string TupleGroup::label(Id a) const
{
  auto c = coords(a);
  std::string s = "(";
  for (size_t i = 0; i < c.size(); ++i)
    s += (i ? "," : "") + std::to_string(c[i]);
  return s + ")";
}

// ---------------------------------------------------------------- ProductGroup

ProductGroup::ProductGroup(std::string spec, GroupPtr g1, GroupPtr g2)
  : FiniteGroup(std::move(spec), Backend::product), g1_(std::move(g1)),
    g2_(std::move(g2)), n2_(g2_->order())
{
  uint64_t n = uint64_t(g1_->order()) * n2_;
  require(n <= (1ull << 31), ErrorCode::cap_exceeded, "product too large");
  finalize(Id(n));
}

Id ProductGroup::mul_raw(Id a, Id b) const
{
  return g1_->mul(a / n2_, b / n2_) * n2_ + g2_->mul(a % n2_, b % n2_);
}

std::string ProductGroup::label(Id a) const
{
  return "<" + g1_->label(a / n2_) + "; " + g2_->label(a % n2_) + ">";
}

// ---------------------------------------------------------------- SubgroupGroup

SubgroupGroup::SubgroupGroup(std::string spec, GroupPtr parent, std::vector<Id> members)
  : FiniteGroup(std::move(spec), Backend::subgroup), parent_(std::move(parent)),
    members_(std::move(members))
{
  require(!members_.empty() && members_[0] == 0, ErrorCode::invalid_argument,
          "subgroup must contain the identity");
  require(std::is_sorted(members_.begin(), members_.end()), ErrorCode::invalid_argument,
          "subgroup members must be sorted");
  finalize(Id(members_.size()));
}

Id SubgroupGroup::from_parent(Id g) const
{
  auto it = std::lower_bound(members_.begin(), members_.end(), g);
  if (it == members_.end() || *it != g)
    return order();
  return Id(it - members_.begin());
}

Id SubgroupGroup::mul_raw(Id a, Id b) const
{
  Id r = from_parent(parent_->mul(members_[a], members_[b]));
  require(r != order(), ErrorCode::not_a_group, "subgroup not closed");
  return r;
}

// ---------------------------------------------------------------- QuotientGroup

QuotientGroup::QuotientGroup(std::string spec, GroupPtr parent, std::vector<Id> reps,
                             std::vector<Id> projection)
  : FiniteGroup(std::move(spec), Backend::table), parent_(std::move(parent)),
    reps_(std::move(reps)), proj_(std::move(projection))
{
  finalize(Id(reps_.size()));
}

Id QuotientGroup::mul_raw(Id a, Id b) const
{
  return proj_[parent_->mul(reps_[a], reps_[b])];
}

// ---------------------------------------------------------------- checks

std::string check_axioms(const FiniteGroup &g)
{
  Id n = g.order();
  for (Id x = 0; x < n; ++x) {
    if (g.mul(0, x) != x || g.mul(x, 0) != x)
      return "identity fails at " + std::to_string(x);
    if (g.mul(x, g.inv(x)) != 0 || g.mul(g.inv(x), x) != 0)
      return "inverse fails at " + std::to_string(x);
  }
  for (Id x = 0; x < n; ++x)
    for (Id y = 0; y < n; ++y) {
      Id xy = g.mul(x, y);
      for (Id z = 0; z < n; ++z)
        if (g.mul(xy, z) != g.mul(x, g.mul(y, z)))
          return "associativity fails at (" + std::to_string(x) + "," +
                 std::to_string(y) + "," + std::to_string(z) + ")";
    }
  return {};
}

} // namespace grpcomb
