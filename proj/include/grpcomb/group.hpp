#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "grpcomb/field.hpp"
#include "grpcomb/linalg.hpp"

namespace grpcomb {

using Id = uint32_t;

enum class Backend { table, permutation, tuple, matrix, product, subgroup };
const char *backend_name(Backend b);

constexpr uint64_t kDefaultOrderCap = 200000;

// Finite group with elements 0..order-1; 0 is always the identity.
class FiniteGroup {
public:
  virtual ~FiniteGroup() = default;

  Id order() const { return n_; }
  Id mul(Id a, Id b) const
  {
    if (!table_.empty())
      return table_[size_t(a) * n_ + b];
    return mul_raw(a, b);
  }
  Id inv(Id a) const { return inv_[a]; }
  Backend backend() const { return backend_; }
  const std::string &spec() const { return spec_; }
  virtual std::string label(Id a) const { return std::to_string(a); }

  Id pow(Id a, int64_t e) const;
  Id element_order(Id a) const { return orders()[a]; }
  const std::vector<Id> &orders() const;
  Id commutator(Id a, Id b) const { return mul(mul(inv(a), inv(b)), mul(a, b)); }
  Id conj(Id h, Id a) const { return mul(mul(h, a), inv(h)); } // h a h^-1
  bool commute(Id a, Id b) const { return mul(a, b) == mul(b, a); }
  bool is_abelian() const;

protected:
  FiniteGroup(std::string spec, Backend b) : spec_(std::move(spec)), backend_(b) {}
  // must be called once the derived object can multiply
  void finalize(Id n);
  virtual Id mul_raw(Id a, Id b) const = 0;
  virtual Id inv_raw(Id a) const;

private:
  std::string spec_;
  Backend backend_;
  Id n_ = 0;
  std::vector<Id> table_;
  std::vector<Id> inv_;
  mutable std::once_flag orders_once_;
  mutable std::vector<Id> orders_;
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

// Explicit Cayley table.
class TableGroup : public FiniteGroup {
public:
  TableGroup(std::string spec, Id n, std::vector<Id> table, bool validate);

protected:
  Id mul_raw(Id a, Id b) const override { return tab_[size_t(a) * size_ + b]; }

private:
  Id size_;
  std::vector<Id> tab_;
};

// Elements are fixed-width byte strings (permutation images or matrix
// entries); ids follow lexicographic key order with the identity moved to 0.
class KeyedGroup : public FiniteGroup {
public:
  const uint8_t *key(Id a) const { return &keys_[size_t(a) * stride_]; }
  int stride() const { return stride_; }
  // id of a key, or order() when it is not an element
  Id find(const uint8_t *k) const;

protected:
  KeyedGroup(std::string spec, Backend b, int stride)
    : FiniteGroup(std::move(spec), b), stride_(stride) {}
  virtual void compose(const uint8_t *x, const uint8_t *y, uint8_t *out) const = 0;
  // closure of the generators; throws cap_exceeded past `cap`
  void populate(const std::vector<std::vector<uint8_t>> &gens,
                const std::vector<uint8_t> &identity, uint64_t cap);
  Id mul_raw(Id a, Id b) const override;

private:
  int stride_;
  std::vector<uint8_t> keys_;
  std::unordered_map<std::string, Id> index_;
};

// (x y)(i) = x(y(i)) on points 0..deg-1
class PermGroup : public KeyedGroup {
public:
  PermGroup(std::string spec, int degree, const std::vector<std::vector<uint8_t>> &gens,
            uint64_t cap);
  int degree() const { return stride(); }
  std::string label(Id a) const override;

protected:
  void compose(const uint8_t *x, const uint8_t *y, uint8_t *out) const override;
};

class MatrixGroup : public KeyedGroup {
public:
  MatrixGroup(std::string spec, FieldPtr field, int d, const std::vector<Mat> &gens,
              uint64_t cap);
  const Field &field() const { return *field_; }
  FieldPtr field_ptr() const { return field_; }
  int dim() const { return d_; }
  Mat matrix(Id a) const;
  // id of a matrix, or order() if it is not in the group
  Id id_of(const Mat &m) const;
  std::string label(Id a) const override;

protected:
  void compose(const uint8_t *x, const uint8_t *y, uint8_t *out) const override;

private:
  FieldPtr field_;
  int d_;
};

// Mixed-radix tuples, first coordinate most significant. Without a cocycle
// this is the abelian group Z/r_1 x ... x Z/r_s; a cocycle c adds c(x, y) to
// the coordinate-wise sum (used for central extensions).
class TupleGroup : public FiniteGroup {
public:
  using Cocycle = std::function<void(const uint32_t *, const uint32_t *, uint32_t *)>;

  TupleGroup(std::string spec, std::vector<uint32_t> radices, Cocycle cocycle = {});
  const std::vector<uint32_t> &radices() const { return radix_; }
  std::vector<uint32_t> coords(Id a) const;
  Id from_coords(const std::vector<uint32_t> &c) const;
  std::string label(Id a) const override;

protected:
  Id mul_raw(Id a, Id b) const override;
  Id inv_raw(Id a) const override;

private:
  std::vector<uint32_t> radix_;
  Cocycle cocycle_;
};

// Direct product, id = i1 * |G2| + i2.
class ProductGroup : public FiniteGroup {
public:
  ProductGroup(std::string spec, GroupPtr g1, GroupPtr g2);
  const GroupPtr &first() const { return g1_; }
  const GroupPtr &second() const { return g2_; }
  std::string label(Id a) const override;

protected:
  Id mul_raw(Id a, Id b) const override;

private:
  GroupPtr g1_, g2_;
  Id n2_;
};

// A subgroup re-indexed as a group in its own right: local id i is the i-th
// smallest member of the parent.
class SubgroupGroup : public FiniteGroup {
public:
  SubgroupGroup(std::string spec, GroupPtr parent, std::vector<Id> members);
  const GroupPtr &parent() const { return parent_; }
  Id to_parent(Id a) const { return members_[a]; }
  // local id or order() when not a member
  Id from_parent(Id g) const;
  const std::vector<Id> &members() const { return members_; }
  std::string label(Id a) const override { return parent_->label(members_[a]); }

protected:
  Id mul_raw(Id a, Id b) const override;

private:
  GroupPtr parent_;
  std::vector<Id> members_;
};

// Cosets of a normal subgroup; representatives are the smallest ids.
class QuotientGroup : public FiniteGroup {
public:
  QuotientGroup(std::string spec, GroupPtr parent, std::vector<Id> reps,
                std::vector<Id> projection);
  const std::vector<Id> &projection() const { return proj_; }
  const std::vector<Id> &reps() const { return reps_; }

protected:
  Id mul_raw(Id a, Id b) const override;

private:
  GroupPtr parent_;
  std::vector<Id> reps_, proj_;
};

// Catalog. Spec strings:
//   cyclic:n  dihedral:n  symmetric:n  alternating:n  dicyclic:n (n = 4m)
//   quaternion  heisenberg:p  gl:d:q  sl:d:q  borel:d:q  unipotent:d:q
//   diagonal:d:q  monomial:d:q  abelian:r1,r2,...  product:S1+S2+...
//   olshanskii:m:k:p[:seed=s]  table:<path>
GroupPtr build_group(const std::string &spec, uint64_t cap = kDefaultOrderCap);
// predicted order without building (0 if unknown, e.g. tables)
uint64_t predicted_order(const std::string &spec);

struct CatalogEntry {
  std::string pattern;
  std::string description;
};
const std::vector<CatalogEntry> &catalog_constructors();
// fixed corpus used by tests and the verify suite
std::vector<std::string> test_catalog(uint64_t max_order);

GroupPtr read_table_group(const std::string &path);
void write_table_group(const FiniteGroup &g, const std::string &path);

// exhaustive axiom check (identity, inverse, associativity); returns a
// description of the first violation or empty string
std::string check_axioms(const FiniteGroup &g);

} // namespace grpcomb
