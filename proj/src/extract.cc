#include "grpcomb/extract.hpp"

#include <algorithm>
#include <cmath>

#include "grpcomb/error.hpp"

namespace grpcomb {

namespace {

bool commutes_with_all(const FiniteGroup &G, Id x, const std::vector<Id> &ys)
{
  for (Id y : ys)
    if (!G.commute(x, y))
      return false;
  return true;
}

bool pairwise_commuting(const FiniteGroup &G, const std::vector<Id> &xs)
{
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = i + 1; j < xs.size(); ++j)
      if (!G.commute(xs[i], xs[j]))
        return false;
  return true;
}

long double log3(long double x) { return std::log(x) / std::log(3.0L); }

// (beta log_3 n)^(1/R) - log_3(3 K |S|)
long double commutable_floor(double R, double beta, size_t n, uint64_t K, size_t s)
{
  long double head = std::pow((long double)beta * log3((long double)n), 1.0L / R);
  return head - log3(3.0L * (long double)K * (long double)s);
}

Subgroup meet(const Subgroup &a, const Subgroup &b)
{
  Subgroup out{a.parent, {}, {}};
  std::set_intersection(a.members.begin(), a.members.end(), b.members.begin(),
                        b.members.end(), std::back_inserter(out.members));
  out.gens = generating_set(a.parent, out.members);
  return out;
}

// grows a membership bitmap P (listed in `list`) to P {x^-1, 1, x}
void widen(const FiniteGroup &G, std::vector<char> &bits, std::vector<Id> &list, Id x)
{
  Id xi = G.inv(x);
  size_t n = list.size();
  for (size_t k = 0; k < n; ++k) {
    Id p = list[k];
    for (Id y : {G.mul(p, x), G.mul(p, xi)})
      if (!bits[y]) {
        bits[y] = 1;
        list.push_back(y);
      }
  }
}

struct SpanBits {
  std::vector<char> bits;
  std::vector<Id> list;

  SpanBits(const FiniteGroup &G, const std::vector<Id> &seed) : bits(G.order(), 0)
  {
    for (Id s : seed)
      if (!bits[s]) {
        bits[s] = 1;
        list.push_back(s);
      }
  }
};

std::vector<Id> members_in(const GroupSubset &X, const Subgroup &H)
{
  std::vector<Id> out;
  for (Id x : X.ids())
    if (H.contains(x))
      out.push_back(x);
  return out;
}

class AbelianExtractor final : public Extractor {
public:
  CommutabilityParams params() const override { return {2, 1.0 / 3, Strategy::abelian}; }
  bool hard_bound() const override { return true; }

  ExtractResult run(const ExtractInput &in) const override
  {
    const auto &G = in.ctx.ambient;
    ExtractResult res;
    res.params = params();
    res.D.group = G;
    res.D.elems = greedy_dissociated(G, members_in(in.A4, in.ctx.G), in.S);
    auto &tr = res.trace;
    tr.K = in.K;
    tr.n = members_in(in.A2, in.ctx.G).size();
    tr.steps.push_back({0, -1, 0, tr.n, in.S.size()});
    tr.claimed = commutable_floor(res.params.R, res.params.beta, tr.n, in.K, in.S.size());
    tr.bound = check_le_real("abelian extraction floor", tr.claimed, res.D.elems.size());
    tr.hard = true;
    return res;
  }
};

class SeriesExtractor final : public Extractor {
public:
  SeriesExtractor(ExtractorPtr inner, SeriesProvider provider)
    : inner_(std::move(inner)), provider_(std::move(provider))
  {
    require(bool(inner_), ErrorCode::invalid_argument, "series extractor needs an inner step");
  }

  CommutabilityParams params() const override
  {
    auto p = inner_->params();
    return {p.R + 1, std::min(p.beta, 0.1), Strategy::series};
  }
  bool hard_bound() const override { return inner_->hard_bound(); }

  ExtractResult run(const ExtractInput &in) const override
  {
    const auto &ctx = in.ctx;
    const FiniteGroup &G = *ctx.ambient;
    auto chain = provider_ ? provider_(ctx) : relative_derived_series(ctx);
    require(!chain.empty() && chain.front() == ctx.G && chain.back() == ctx.N,
            ErrorCode::invalid_argument, "series must run from G down to N");

    std::vector<Id> a4g = members_in(in.A4, ctx.G);
    std::vector<Id> a2g = members_in(in.A2, ctx.G);
    SpanBits sj(G, in.S.ids()); // S_j = dspan(D_j) S
    std::vector<Id> D;
    ExtractResult res;
    res.params = params();
    auto &tr = res.trace;
    bool inner_held = true;

    for (int j = 0;; ++j) {
      std::vector<Id> h4;
      for (Id x : a4g)
        if (commutes_with_all(G, x, D))
          h4.push_back(x);
      size_t a2h = 0;
      for (Id x : a2g)
        a2h += commutes_with_all(G, x, D);
      bool done = std::all_of(h4.begin(), h4.end(), [&](Id x) { return sj.bits[x] != 0; });
      if (done)
        break;

      int idx = -1;
      for (int i = int(chain.size()) - 2; i >= 0 && idx < 0; --i)
        for (Id x : h4)
          if (!sj.bits[x] && chain[i].contains(x)) {
            idx = i;
            break;
          }
      require(idx >= 0, ErrorCode::internal, "series does not end inside S");
      tr.steps.push_back({j, idx, D.size(), a2h, sj.list.size()});

      Subgroup Hj = centralizer_in(ctx.G, D);
      ExtractInput sub = in;
      sub.ctx.G = meet(Hj, chain[idx]);
      sub.ctx.N = meet(Hj, chain[idx + 1]);
      std::vector<Id> sids = sj.list;
      sub.S = GroupSubset(ctx.ambient, std::move(sids));
      ExtractResult step = inner_->run(sub);
      inner_held = inner_held && step.trace.bound.holds;
      std::vector<Id> add = step.D.elems;
      if (add.empty()) {
        // a single element outside S_j is always admissible
        for (Id x : h4)
          if (!sj.bits[x] && chain[idx].contains(x)) {
            add.push_back(x);
            break;
          }
      }
      for (Id x : add) {
        D.push_back(x);
        widen(G, sj.bits, sj.list, x);
      }
    }

    res.D = {ctx.ambient, D, true};
    tr.K = in.K;
    tr.n = a2g.size();
    tr.claimed = commutable_floor(res.params.R, res.params.beta, tr.n, in.K, in.S.size());
    tr.bound = check_le_real("series extraction floor", tr.claimed, D.size());
    tr.hard = hard_bound() && inner_held;
    return res;
  }

private:
  ExtractorPtr inner_;
  SeriesProvider provider_;
};

class SubgroupExtractor final : public Extractor {
public:
  SubgroupExtractor(ExtractorPtr inner, double C, double eps, SubgroupFinder finder)
    : inner_(std::move(inner)), C_(C), eps_(eps), finder_(std::move(finder))
  {
    require(bool(inner_), ErrorCode::invalid_argument, "subgroup extractor needs an inner step");
    require(C > 0 && eps > 0, ErrorCode::invalid_argument, "C and eps must be positive");
  }

  CommutabilityParams params() const override
  {
    auto p = inner_->params();
    return {p.R, p.beta * eps_ / (3 * C_ + 12), Strategy::subgroup};
  }
  // the finder is only heuristic, so the floor is reported
  bool hard_bound() const override { return false; }

  ExtractResult run(const ExtractInput &in) const override
  {
    Subgroup H = finder_ ? finder_(in.ctx, in.A) : commuting_mod_finder(in.ctx, in.A);
    require(is_subgroup_of(in.ctx.N, H) && is_subgroup_of(H, in.ctx.G),
            ErrorCode::precondition, "finder must return N <= H <= G");
    ExtractInput sub = in;
    sub.ctx.G = H;
    ExtractResult res = inner_->run(sub);
    res.params = params();
    auto &tr = res.trace;
    tr.n = members_in(in.A2, in.ctx.G).size();
    tr.claimed = commutable_floor(res.params.R, res.params.beta, tr.n, in.K, in.S.size());
    tr.bound = check_le_real("subgroup extraction floor", tr.claimed, res.D.elems.size());
    tr.hard = false;
    return res;
  }

private:
  ExtractorPtr inner_;
  double C_, eps_;
  SubgroupFinder finder_;
};

} // namespace

const char *strategy_name(Strategy s)
{
  switch (s) {
  case Strategy::abelian: return "abelian";
  case Strategy::series: return "series";
  case Strategy::subgroup: return "subgroup";
  }
  return "?";
}

DissociationCheck check_dissociated(const GroupPtr &G, const std::vector<Id> &elems)
{
  require(elems.size() <= kMaxDissociated, ErrorCode::invalid_argument,
          "dissociation check limited to 16 elements");
  DissociationCheck out;
  out.commuting = pairwise_commuting(*G, elems);
  size_t m = elems.size();
  std::vector<Id> invs(m);
  for (size_t i = 0; i < m; ++i)
    invs[i] = G->inv(elems[i]);
  std::vector<int> eps(m, 0);
  bool found = false;
  // depth first over exponent patterns; prefix value carried along
  auto dfs = [&](auto &&self, size_t k, Id v, bool nonzero) -> void {
    if (found)
      return;
    if (k == m) {
      ++out.products;
      if (nonzero && v == 0) {
        found = true;
        out.relation = eps;
      }
      return;
    }
    eps[k] = 0;
    self(self, k + 1, v, nonzero);
    eps[k] = 1;
    self(self, k + 1, G->mul(v, elems[k]), true);
    eps[k] = -1;
    self(self, k + 1, G->mul(v, invs[k]), true);
    eps[k] = 0;
  };
  dfs(dfs, 0, 0, false);
  out.dissociated = !found;
  return out;
}

GroupSubset dissociated_span(const DissociatedSet &D)
{
  const FiniteGroup &G = *D.group;
  require(D.elems.size() <= kMaxDissociated, ErrorCode::invalid_argument,
          "span limited to 16 elements");
  require(pairwise_commuting(G, D.elems), ErrorCode::precondition,
          "dissociated span needs commuting elements");
  SpanBits sp(G, {0});
  for (Id h : D.elems)
    widen(G, sp.bits, sp.list, h);
  return GroupSubset(D.group, std::move(sp.list));
}

PivotReport pivot_split(const GroupSubset &A, Id a)
{
  require(A.contains(a), ErrorCode::invalid_argument, "pivot must lie in A");
  const auto &G = A.group();
  PivotReport out;
  std::vector<Id> cen;
  GroupSubset A2 = power(A, 2);
  for (Id x : A2.ids())
    if (G->commute(x, a))
      cen.push_back(x);
  auto cls = conjugacy_class(G, a);
  std::sort(cls.begin(), cls.end());
  GroupSubset A3 = product(A2, A);
  std::vector<Id> conj;
  for (Id x : A3.ids())
    if (std::binary_search(cls.begin(), cls.end(), x))
      conj.push_back(x);
  out.centralized = GroupSubset(G, cen);
  out.conjugates = GroupSubset(G, conj);
  out.bound = check_le("|A| <= |A^2 n C(a)| |A^3 n Conj(a)|", BigInt(A.size()),
                       BigInt(out.centralized.size()) * out.conjugates.size());
  return out;
}

std::vector<Id> greedy_dissociated(const GroupPtr &G, const std::vector<Id> &candidates,
                                   const GroupSubset &S, std::vector<Id> start)
{
  std::vector<Id> cand = candidates;
  std::sort(cand.begin(), cand.end());
  SpanBits p(*G, S.ids());
  if (!p.bits[0]) {
    p.bits[0] = 1;
    p.list.push_back(0);
  }
  for (Id h : start)
    widen(*G, p.bits, p.list, h);
  std::vector<Id> D = std::move(start);
  for (Id x : cand) {
    if (p.bits[x] || !commutes_with_all(*G, x, D))
      continue;
    D.push_back(x);
    widen(*G, p.bits, p.list, x);
  }
  return D;
}

std::vector<Subgroup> relative_derived_series(const ExtractContext &ctx)
{
  std::vector<Subgroup> out{ctx.G};
  while (!(out.back() == ctx.N)) {
    Subgroup next = closure_with(commutator_subgroup(out.back(), out.back()), ctx.N.gens);
    if (next == out.back())
      fail(ErrorCode::not_solvable, "G/N is not solvable");
    out.push_back(std::move(next));
  }
  return out;
}

std::vector<Subgroup> relative_chief_series(const ExtractContext &ctx)
{
  auto Gl = as_group(ctx.G);
  GroupPtr Gp = Gl;
  std::vector<Id> nloc;
  for (Id x : ctx.N.gens)
    nloc.push_back(Id(std::lower_bound(ctx.G.members.begin(), ctx.G.members.end(), x) -
                      ctx.G.members.begin()));
  QuotientMap q = quotient(Gp, closure(Gp, nloc));
  NormalSeries ser = series(q.quotient, SeriesKind::chief);
  std::vector<Subgroup> out;
  for (const auto &term : ser.chain)
    out.push_back(lift(preimage(q, term), *Gl));
  return out;
}

Subgroup commuting_mod_finder(const ExtractContext &ctx, const GroupSubset &A)
{
  const FiniteGroup &G = *ctx.ambient;
  GroupSubset A2 = power(A, 2);
  std::vector<Id> T;
  Subgroup H = ctx.N;
  for (Id x : A2.ids()) {
    if (!ctx.G.contains(x) || H.contains(x))
      continue;
    bool ok = true;
    for (Id t : T)
      if (!ctx.N.contains(G.commutator(x, t))) {
        ok = false;
        break;
      }
    if (!ok)
      continue;
    T.push_back(x);
    Id xs[1] = {x};
    H = closure_with(H, xs);
  }
  return H;
}

ExtractorPtr abelian_extractor() { return std::make_shared<AbelianExtractor>(); }

ExtractorPtr series_extractor(ExtractorPtr inner, SeriesProvider provider)
{
  return std::make_shared<SeriesExtractor>(std::move(inner), std::move(provider));
}

ExtractorPtr subgroup_extractor(ExtractorPtr inner, double C, double eps, SubgroupFinder finder)
{
  return std::make_shared<SubgroupExtractor>(std::move(inner), C, eps, std::move(finder));
}

ExtractorPtr default_extractor(const Subgroup &G)
{
  if (pairwise_commuting(*G.parent, G.gens))
    return abelian_extractor();
  ExtractContext ctx{G.parent, G, trivial_subgroup(G.parent)};
  try {
    relative_derived_series(ctx);
    return series_extractor(abelian_extractor());
  } catch (const Error &e) {
    if (e.code() != ErrorCode::not_solvable)
      throw;
  }
  return series_extractor(subgroup_extractor(abelian_extractor(), 1, 0.5),
                          relative_chief_series);
}

ExtractResult commutable_extract(const ExtractContext &ctx, const GroupSubset &A,
                                 const GroupSubset &S, const Extractor &strategy, uint64_t K)
{
  const auto &Gp = ctx.ambient;
  const FiniteGroup &G = *Gp;
  require(A.group() == Gp && S.group() == Gp && ctx.G.parent == Gp && ctx.N.parent == Gp,
          ErrorCode::invalid_argument, "all inputs must live in the ambient group");
  require(A.centered(), ErrorCode::precondition, "approximate group must be centered");
  require(S.centered(), ErrorCode::precondition, "S must be centered");
  require(is_subgroup_of(ctx.N, ctx.G), ErrorCode::precondition, "N must lie in G");
  for (Id g : ctx.G.gens)
    for (Id n : ctx.N.gens)
      require(ctx.N.contains(G.conj(g, n)), ErrorCode::not_normal, "N is not normal in G");
  for (Id s : S.ids())
    require(commutes_with_all(G, s, ctx.G.gens), ErrorCode::precondition,
            "S must centralize G");
  if (strategy.params().strategy == Strategy::abelian)
    for (Id x : ctx.G.gens)
      for (Id y : ctx.G.gens)
        require(ctx.N.contains(G.commutator(x, y)), ErrorCode::precondition,
                "abelian strategy needs G/N abelian");

  ExtractInput in{ctx, A, power(A, 2), {}, {}, K};
  in.A4 = power(in.A2, 2);
  for (Id x : in.A4.ids())
    require(!ctx.N.contains(x) || S.contains(x), ErrorCode::precondition,
            "A^4 n N must lie in S");
  in.S = S;
  if (in.K == 0)
    in.K = cover_witness(in.A2, A).size();
  return strategy.run(in);
}

std::string verify_extraction(const ExtractContext &ctx, const GroupSubset &A,
                              const GroupSubset &S, const std::vector<Id> &D)
{
  GroupSubset A4 = power(A, 4);
  for (Id x : D)
    if (!A4.contains(x) || !ctx.G.contains(x))
      return "element " + std::to_string(x) + " outside A^4 n G";
  auto chk = check_dissociated(ctx.ambient, D);
  if (!chk.commuting)
    return "not commuting";
  if (!chk.dissociated)
    return "not dissociated";
  GroupSubset span = dissociated_span({ctx.ambient, D, true});
  for (Id x : span.ids())
    if (x != 0 && S.contains(x))
      return "span meets S in " + std::to_string(x);
  return "";
}

std::string check_extraction_maximal(const ExtractContext &ctx, const GroupSubset &A,
                                     const GroupSubset &S, const std::vector<Id> &D,
                                     bool *checked, size_t limit)
{
  const FiniteGroup &G = *ctx.ambient;
  std::vector<Id> pool;
  for (Id x : members_in(power(A, 4), ctx.G))
    if (commutes_with_all(G, x, D))
      pool.push_back(x);
  if (checked)
    *checked = pool.size() <= limit && D.size() < kMaxDissociated;
  if (pool.size() > limit || D.size() >= kMaxDissociated)
    return "";
  for (Id x : pool) {
    if (std::find(D.begin(), D.end(), x) != D.end())
      continue;
    std::vector<Id> ext = D;
    ext.push_back(x);
    if (!check_dissociated(ctx.ambient, ext).dissociated)
      continue;
    GroupSubset span = dissociated_span({ctx.ambient, ext, true});
    bool meets = false;
    for (Id y : span.ids())
      if (y != 0 && S.contains(y))
        meets = true;
    if (!meets)
      return "element " + std::to_string(x) + " could extend D";
  }
  return "";
}

SubstructResult abelian_substruct(const GroupSubset &A, const SubstructOptions &opt)
{
  require(A.symmetric() && !A.empty(), ErrorCode::precondition, "A must be symmetric");
  require(opt.t_min >= 1 && opt.t_min <= opt.t_max, ErrorCode::invalid_argument,
          "bad t schedule");
  const auto &Gp = A.group();
  GroupSubset A4 = power(A, 4);
  Subgroup span = closure(Gp, A.ids());
  ExtractorPtr ex = opt.extractor ? opt.extractor : default_extractor(span);
  ExtractContext ctx{Gp, span, trivial_subgroup(Gp)};
  GroupSubset one(Gp, {0});

  SubstructResult best;
  bool have = false;
  for (int t = opt.t_min; t <= opt.t_max; ++t) {
    CoreSearchOptions co;
    co.mode = CoreMode::sanders_core;
    co.t = 2 * t; // S0^(2t) inside A^4
    co.budget = opt.budget;
    CoreSearchResult core = structured_core_search(A, co);
    if (core.set.empty())
      continue;
    GroupSubset B = power(core.set, 2);
    uint64_t L = cover_witness(power(B, 2), B).size();
    ExtractResult ext = commutable_extract(ctx, B, one, *ex, L);

    std::vector<Id> Dp;
    for (Id h : ext.D.elems) {
      std::vector<Id> trial = Dp;
      trial.push_back(h);
      std::vector<Id> base = trial;
      base.push_back(0);
      if (power(GroupSubset(Gp, base), int(trial.size())).subset_of(A4))
        Dp = std::move(trial);
    }
    Subgroup H = closure(Gp, Dp);
    GroupSubset a4h = intersect(A4, H);
    SubstructResult cur;
    cur.H = H;
    cur.a4_in_h = a4h;
    cur.D = ext.D.elems;
    cur.Dprime = Dp;
    cur.t = t;
    cur.L = L;
    cur.dissociated_floor = check_le("2^|D'| <= |A^4 n H|", big_pow(2, unsigned(Dp.size())),
                                     BigInt(a4h.size()));
    cur.certified = core.certified && cur.dissociated_floor.holds &&
                    pairwise_commuting(*Gp, H.gens);
    best.sweep.push_back({t, core.set.size(), cur.D.size(), Dp.size(), a4h.size()});
    if (!have || a4h.size() > best.a4_in_h.size()) {
      auto sweep = std::move(best.sweep);
      best = std::move(cur);
      best.sweep = std::move(sweep);
      have = true;
    }
  }
  if (!have) {
    best.H = trivial_subgroup(Gp);
    best.a4_in_h = one;
    best.dissociated_floor = check_le("2^|D'| <= |A^4 n H|", BigInt(1), BigInt(1));
    best.certified = false;
  }
  return best;
}

PyberResult pyber_solvable_abelian(const GroupPtr &G)
{
  NormalSeries ds = series(G, SeriesKind::derived);
  require(ds.reaches_trivial, ErrorCode::not_solvable, "group is not solvable");
  const auto &chain = ds.chain;
  PyberResult out;
  Subgroup I = trivial_subgroup(G);
  for (int j = 0;; ++j) {
    Subgroup H = centralizer(G, I.gens);
    if (H.order() == I.order())
      break;
    int idx = -1;
    std::vector<Id> Q;
    for (int i = int(chain.size()) - 1; i >= 0 && idx < 0; --i) {
      Q.clear();
      for (Id x : H.members)
        if (chain[i].contains(x))
          Q.push_back(x);
      for (Id x : Q)
        if (!I.contains(x)) {
          idx = i;
          break;
        }
    }
    require(idx >= 0, ErrorCode::internal, "no series term escapes I");
    std::vector<Id> hs;
    Subgroup next = I;
    for (Id x : Q) {
      if (next.contains(x) || !commutes_with_all(*G, x, hs))
        continue;
      hs.push_back(x);
      Id xs[1] = {x};
      next = closure_with(next, xs);
    }
    out.steps.push_back({j, idx, int(hs.size()), next.order(), H.order()});
    I = std::move(next);
  }
  out.abelian_verified = pairwise_commuting(*G, I.gens);
  long double n = G->order();
  out.bound = check_le_real("exp(1/2 ln^(1/3) |G|) <= |I|",
                            std::exp(0.5L * std::cbrt(std::log(n))), I.order());
  out.I = std::move(I);
  return out;
}

NearResult abelian_struct_near(const GroupSubset &A, NearMode mode, const SubstructOptions &opt)
{
  require(!A.empty(), ErrorCode::invalid_argument, "A must be nonempty");
  const auto &Gp = A.group();
  const FiniteGroup &G = *Gp;
  NearResult out;
  out.mode = mode;
  std::vector<uint32_t> count(G.order(), 0);
  auto argmax = [&] {
    Id g = 0;
    for (Id x = 0; x < G.order(); ++x)
      if (count[x] > count[g])
        g = x;
    return g;
  };

  if (mode == NearMode::translate) {
    GroupSubset Ainv = inverse(A);
    out.K = double(product(A, Ainv).size()) / A.size();
    CoreSearchOptions co;
    co.mode = CoreMode::nice_set;
    CoreSearchResult core = structured_core_search(A, co);
    out.substruct = abelian_substruct(core.set, opt);
    const GroupSubset &T = out.substruct.a4_in_h;
    GroupSubset TT = product(T, inverse(T));
    for (Id b : TT.ids())
      for (Id a : Ainv.ids())
        ++count[G.mul(b, a)];
    out.g = argmax();
    out.piece = set_intersect(translate_left(out.g, A), TT);
    out.certified = core.certified && out.substruct.certified;
  } else {
    out.K = double(power(A, 2).size()) / A.size();
    GroupSubset C = centered_hull(A);
    out.substruct = abelian_substruct(C, opt);
    const GroupSubset &B0 = out.substruct.a4_in_h;
    for (Id x : B0.ids()) {
      Id xi = G.inv(x);
      for (Id y : B0.ids()) {
        Id yi = G.inv(y);
        for (Id a : A.ids())
          ++count[G.mul(G.mul(xi, a), yi)];
      }
    }
    out.g = argmax();
    out.hits = count[out.g];
    out.piece = B0;
    out.certified = out.substruct.certified;
  }
  out.H = out.substruct.H;
  out.piece_doubling_num = product(out.piece, inverse(out.piece)).size();
  double lk = std::log(2 * out.K);
  out.empirical_exponent = std::log(double(out.piece_doubling_num) / out.piece.size()) / lk;
  if (mode == NearMode::two_sided && out.hits > 0) {
    double sq = double(out.piece.size()) * out.piece.size();
    out.hit_exponent = std::log(sq / out.hits) / lk;
  }
  return out;
}

} // namespace grpcomb
