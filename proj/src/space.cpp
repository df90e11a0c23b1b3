#include "metricext/space.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <unordered_map>

#include "metricext/errors.hpp"
#include "metricext/kernels.hpp"

namespace metricext {

const char* violation_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::Symmetry: return "symmetry";
    case ViolationKind::Diagonal: return "diagonal";
    case ViolationKind::Negativity: return "negativity";
    case ViolationKind::Positivity: return "positivity";
    case ViolationKind::Triangle: return "triangle";
    case ViolationKind::StrongTriangle: return "strong-triangle";
    case ViolationKind::Isosceles: return "isosceles";
    case ViolationKind::Witness: return "witness";
    case ViolationKind::Restriction: return "restriction";
    case ViolationKind::ValueSetClosure: return "value-set";
    case ViolationKind::Density: return "density";
    case ViolationKind::Lipschitz: return "lipschitz";
    case ViolationKind::Radius: return "radius";
    case ViolationKind::BallStructure: return "ball-structure";
  }
  return "?";
}

const char* flag_name(MetricFlag f) {
  switch (f) {
    case MetricFlag::Pseudo: return "pseudo-metric";
    case MetricFlag::PseudoUltra: return "pseudo-ultrametric";
    case MetricFlag::Metric: return "metric";
    case MetricFlag::Ultra: return "ultrametric";
  }
  return "?";
}

MetricFlag parse_flag(const std::string& s) {
  if (s == "pseudo-metric" || s == "pseudo") return MetricFlag::Pseudo;
  if (s == "pseudo-ultrametric") return MetricFlag::PseudoUltra;
  if (s == "metric") return MetricFlag::Metric;
  if (s == "ultrametric") return MetricFlag::Ultra;
  fail(Errc::SchemaError, "unknown metric flag '" + s + "'");
}

// ---------------------------------------------------------------------------
// Space

struct Space::Impl {
  bool finite = true;
  bool product = false;
  std::string desc;
  PointId basepoint = 0;

  BlockGen gen;

  // generated prefix (mutable through const handles; single consumer).
  // deques: point accessors hand out references that must survive the
  // generation of further blocks.
  std::deque<std::string> names;
  std::deque<Rat> values;
  std::vector<int> block_of;
  std::vector<std::pair<int, int>> blocks;
  std::unordered_map<std::string, PointId> name_to_id;

  // product bookkeeping
  std::shared_ptr<Space> left, right;
  std::deque<std::pair<PointId, PointId>> factor_of;
  std::map<std::pair<PointId, PointId>, PointId> pair_to_id;

  void push_point(const std::string& n, Rat v, int blk) {
    if (name_to_id.count(n)) fail(Errc::SchemaError, "duplicate point name '" + n + "'");
    name_to_id.emplace(n, static_cast<PointId>(names.size()));
    names.push_back(n);
    values.push_back(std::move(v));
    block_of.push_back(blk);
  }

  void generate_block(int k) {
    const int first = static_cast<int>(names.size());
    if (product) {
      // Block k of X x Z is the union of BX_i x BZ_j over i + j = k,
      // restricted to block indices each factor actually has.
      auto emit = [&](int i, int j) {
        auto [xf, xe] = left->block_span(i);
        auto [zf, ze] = right->block_span(j);
        for (PointId xi = xf; xi < xe; ++xi)
          for (PointId zi = zf; zi < ze; ++zi) {
            push_point("(" + left->name(xi) + "|" + right->name(zi) + ")", Rat(0), k);
            factor_of.emplace_back(xi, zi);
            pair_to_id[{xi, zi}] = static_cast<PointId>(names.size()) - 1;
          }
      };
      for (int i = 0; i <= k; ++i) {
        const int j = k - i;
        if (left->is_finite() && i > 0) continue;
        if (right->is_finite() && j > 0) continue;
        emit(i, j);
      }
    } else {
      std::vector<std::string> ns;
      std::vector<Rat> vs;
      gen.fill(k, ns, vs);
      if (ns.empty()) fail(Errc::SchemaError, "generator produced an empty block " + std::to_string(k));
      if (vs.size() != ns.size()) vs.resize(ns.size(), Rat(0));
      for (std::size_t t = 0; t < ns.size(); ++t) push_point(ns[t], vs[t], k);
    }
    blocks.emplace_back(first, static_cast<int>(names.size()));
  }

  void ensure(int k) {
    if (finite) return;
    while (static_cast<int>(blocks.size()) < k) generate_block(static_cast<int>(blocks.size()));
  }

  void ensure_point(PointId p) {
    while (!finite && static_cast<int>(names.size()) <= p) {
      if (static_cast<int>(blocks.size()) >= kScanBlockBudget)
        fail(Errc::ScanBudgetExceeded, "point id beyond the scan budget");
      generate_block(static_cast<int>(blocks.size()));
    }
  }
};

Space Space::finite(std::vector<std::string> names, PointId basepoint) {
  if (names.empty()) fail(Errc::SchemaError, "a space needs at least one point");
  auto impl = std::make_shared<Impl>();
  impl->finite = true;
  impl->desc = "finite(" + std::to_string(names.size()) + ")";
  for (std::size_t i = 0; i < names.size(); ++i) impl->push_point(names[i], Rat(static_cast<long>(i)), 0);
  impl->blocks.emplace_back(0, static_cast<int>(names.size()));
  if (basepoint < 0 || basepoint >= static_cast<int>(names.size()))
    fail(Errc::SchemaError, "basepoint out of range");
  impl->basepoint = basepoint;
  Space s;
  s.impl_ = std::move(impl);
  return s;
}

Space Space::naturals(int block_size) {
  if (block_size < 1) fail(Errc::BadArgument, "block size must be >= 1");
  BlockGen g;
  g.desc = "naturals/" + std::to_string(block_size);
  g.fill = [block_size](int k, std::vector<std::string>& ns, std::vector<Rat>& vs) {
    for (int t = 0; t < block_size; ++t) {
      const long v = static_cast<long>(k) * block_size + t;
      ns.push_back(std::to_string(v));
      vs.emplace_back(v);
    }
  };
  return from_generator(std::move(g), "0");
}

Space Space::dyadics() {
  BlockGen g;
  g.desc = "dyadic";
  // k = (2b+1) * 2^a  <->  the dyadic (2b+1) / 2^a; block 0 holds 0.
  g.fill = [](int k, std::vector<std::string>& ns, std::vector<Rat>& vs) {
    if (k == 0) {
      ns.push_back("0");
      vs.emplace_back(0);
      return;
    }
    int a = 0;
    long odd = k;
    while (odd % 2 == 0) {
      odd /= 2;
      ++a;
    }
    Rat v(odd);
    for (int t = 0; t < a; ++t) v /= 2;
    ns.push_back(format_rat(v));
    vs.push_back(std::move(v));
  };
  return from_generator(std::move(g), "0");
}

Space Space::from_generator(BlockGen gen, const std::string& basepoint_name) {
  auto impl = std::make_shared<Impl>();
  impl->finite = false;
  impl->desc = gen.desc.empty() ? "lazy" : gen.desc;
  impl->gen = std::move(gen);
  impl->ensure(1);
  if (!basepoint_name.empty()) {
    auto it = impl->name_to_id.find(basepoint_name);
    if (it == impl->name_to_id.end())
      fail(Errc::SchemaError, "basepoint '" + basepoint_name + "' not in block 0");
    impl->basepoint = it->second;
  }
  Space s;
  s.impl_ = std::move(impl);
  return s;
}

Space Space::product(const Space& x, const Space& z) {
  auto impl = std::make_shared<Impl>();
  impl->finite = x.is_finite() && z.is_finite();
  impl->product = true;
  impl->left = std::make_shared<Space>(x);
  impl->right = std::make_shared<Space>(z);
  impl->desc = "(" + x.describe() + ")x(" + z.describe() + ")";
  impl->generate_block(0);
  // basepoint = (basepoint, basepoint), which lives in block 0
  impl->basepoint = impl->pair_to_id.at({x.basepoint(), z.basepoint()});
  Space s;
  s.impl_ = std::move(impl);
  return s;
}

bool Space::is_finite() const { return impl_->finite; }

int Space::finite_size() const {
  if (!impl_->finite) fail(Errc::BadArgument, "finite_size() on a lazy space");
  return static_cast<int>(impl_->names.size());
}

PointId Space::basepoint() const { return impl_->basepoint; }

int Space::ensure_blocks(int k) const {
  impl_->ensure(k);
  return static_cast<int>(impl_->names.size());
}

int Space::generated_blocks() const { return static_cast<int>(impl_->blocks.size()); }
int Space::generated_points() const { return static_cast<int>(impl_->names.size()); }

int Space::block_of(PointId p) const {
  impl_->ensure_point(p);
  return impl_->block_of.at(p);
}

std::pair<int, int> Space::block_span(int k) const {
  if (impl_->finite && k > 0) fail(Errc::BadArgument, "finite spaces have a single block");
  impl_->ensure(k + 1);
  return impl_->blocks.at(k);
}

const std::string& Space::name(PointId p) const {
  impl_->ensure_point(p);
  return impl_->names.at(p);
}

const Rat& Space::value(PointId p) const {
  impl_->ensure_point(p);
  return impl_->values.at(p);
}

std::optional<PointId> Space::find_name(const std::string& n) const {
  auto it = impl_->name_to_id.find(n);
  if (it == impl_->name_to_id.end()) return std::nullopt;
  return it->second;
}

bool Space::is_product() const { return impl_->product; }

std::pair<PointId, PointId> Space::factors(PointId p) const {
  if (!impl_->product) fail(Errc::BadArgument, "factors() on a non-product space");
  impl_->ensure_point(p);
  return impl_->factor_of.at(p);
}

PointId Space::pair_id(PointId xi, PointId zi) const {
  if (!impl_->product) fail(Errc::BadArgument, "pair_id() on a non-product space");
  const int blk = impl_->left->block_of(xi) + impl_->right->block_of(zi);
  impl_->ensure(blk + 1);
  return impl_->pair_to_id.at({xi, zi});
}

const Space& Space::left_factor() const { return *impl_->left; }
const Space& Space::right_factor() const { return *impl_->right; }

std::string Space::describe() const { return impl_->desc; }

// ---------------------------------------------------------------------------
// MetricTable

MetricTable MetricTable::dense(int n, std::vector<Rat> entries, MetricFlag flag) {
  if (static_cast<long>(entries.size()) != static_cast<long>(n) * n)
    fail(Errc::RosterMismatch, "dense table size mismatch");
  MetricTable m;
  m.n_ = n;
  m.entries_ = std::move(entries);
  m.flag_ = flag;
  m.witness = ProperWitness::finite();
  return m;
}

MetricTable MetricTable::callback(std::function<Rat(PointId, PointId)> fn, MetricFlag flag) {
  MetricTable m;
  m.fn_ = std::move(fn);
  m.flag_ = flag;
  return m;
}

Rat MetricTable::at(PointId i, PointId j) const {
  if (n_ >= 0) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) fail(Errc::RosterMismatch, "point id out of table range");
    return entries_[static_cast<std::size_t>(i) * n_ + j];
  }
  if (!fn_) fail(Errc::BadArgument, "empty metric table");
  return fn_(i, j);
}

// ---------------------------------------------------------------------------
// Subset

Subset Subset::of_ids(std::vector<PointId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  Subset s;
  s.explicit_ = true;
  s.ids_ = std::move(ids);
  s.desc_ = "explicit(" + std::to_string(s.ids_.size()) + ")";
  return s;
}

Subset Subset::everything() {
  Subset s;
  s.everything_ = true;
  s.desc_ = "all";
  return s;
}

Subset Subset::empty() {
  Subset s;
  s.empty_ = true;
  s.explicit_ = true;
  s.desc_ = "empty";
  return s;
}

Subset Subset::by_rule(std::string name, std::function<bool(const Space&, PointId)> pred,
                       bool declared_infinite) {
  Subset s;
  s.pred_ = std::move(pred);
  s.infinite_ = declared_infinite;
  s.desc_ = std::move(name);
  return s;
}

namespace {
bool integer_value(const Space& x, PointId p) { return x.value(p).get_den() == 1; }
}  // namespace

Subset Subset::evens() {
  return by_rule("evens",
                 [](const Space& x, PointId p) {
                   return integer_value(x, p) && x.value(p).get_num() % 2 == 0;
                 },
                 true);
}

Subset Subset::odds() {
  return by_rule("odds",
                 [](const Space& x, PointId p) {
                   return integer_value(x, p) && x.value(p).get_num() % 2 != 0;
                 },
                 true);
}

Subset Subset::multiples(long m) {
  return by_rule("multiples:" + std::to_string(m),
                 [m](const Space& x, PointId p) {
                   return integer_value(x, p) && x.value(p).get_num() % m == 0;
                 },
                 true);
}

Subset Subset::integer_points() {
  return by_rule("integers", [](const Space& x, PointId p) { return integer_value(x, p); }, true);
}

bool Subset::contains(const Space& x, PointId p) const {
  if (empty_) return false;
  if (everything_) return true;
  if (explicit_) return std::binary_search(ids_.begin(), ids_.end(), p);
  return pred_(x, p);
}

bool Subset::declared_infinite(const Space& x) const {
  if (x.is_finite() || empty_ || explicit_) return false;
  if (everything_) return true;
  return infinite_;
}

std::vector<PointId> Subset::members_in_block(const Space& x, int k) const {
  auto [f, e] = x.block_span(k);
  std::vector<PointId> out;
  for (PointId p = f; p < e; ++p)
    if (contains(x, p)) out.push_back(p);
  return out;
}

std::vector<PointId> Subset::members_upto(const Space& x, int blocks) const {
  if (x.is_finite()) blocks = 1;
  std::vector<PointId> out;
  for (int k = 0; k < blocks; ++k) {
    auto part = members_in_block(x, k);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

PointId Subset::first_member(const Space& x) const {
  if (empty_) fail(Errc::EmptySubset, "first_member of the empty subset");
  if (explicit_) {
    if (ids_.empty()) fail(Errc::EmptySubset, "first_member of the empty subset");
    return ids_.front();
  }
  if (everything_) return 0;
  const int limit = x.is_finite() ? 1 : kScanBlockBudget;
  for (int k = 0; k < limit; ++k) {
    auto part = members_in_block(x, k);
    if (!part.empty()) return part.front();
    if (x.is_finite()) break;
  }
  fail(Errc::EmptySubset, "no member of '" + desc_ + "' found within the scan budget");
}

bool Subset::empty_on(const Space& x) const {
  if (empty_) return true;
  if (everything_) return false;
  if (explicit_) return ids_.empty();
  if (declared_infinite(x)) return false;
  // finite space: exhaustive
  if (x.is_finite()) return members_in_block(x, 0).empty();
  return false;  // rule subsets on lazy spaces are declared nonempty
}

// ---------------------------------------------------------------------------
// Operations

Report verify_axioms(const MetricTable& m, MetricFlag claim, int points) {
  Report rep;
  const int n = points;
  if (n < 0) fail(Errc::BadArgument, "negative roster size");
  if (m.is_dense() && n > m.dense_size()) fail(Errc::RosterMismatch, "prefix exceeds table size");

  // materialize a dense prefix once; the triple kernels want raw arrays
  std::vector<Rat> d;
  const Rat* raw;
  if (m.is_dense() && n == m.dense_size()) {
    raw = m.entries().data();
  } else {
    d.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[static_cast<std::size_t>(i) * n + j] = m.at(i, j);
    raw = d.data();
  }

  for (int i = 0; i < n; ++i) {
    if (raw[static_cast<std::size_t>(i) * n + i] != 0)
      rep.add({ViolationKind::Diagonal, i, -1, -1,
               "d(" + std::to_string(i) + "," + std::to_string(i) + ") = " +
                   format_rat(raw[static_cast<std::size_t>(i) * n + i])});
    for (int j = i + 1; j < n; ++j) {
      const Rat& dij = raw[static_cast<std::size_t>(i) * n + j];
      const Rat& dji = raw[static_cast<std::size_t>(j) * n + i];
      if (dij != dji) rep.add({ViolationKind::Symmetry, i, j, -1, "d(i,j) != d(j,i)"});
      if (dij < 0) rep.add({ViolationKind::Negativity, i, j, -1, format_rat(dij)});
      if (flag_is_positive(claim) && dij == 0)
        rep.add({ViolationKind::Positivity, i, j, -1, "zero off the diagonal"});
      rep.checks += 3;
    }
  }

  const bool strong = flag_is_ultra(claim);
  const bool par = kernels::parallel_worthwhile(static_cast<long>(n) * n * n);
  for (const auto& t : kernels::triangle_violations(raw, n, strong, par))
    rep.add({strong ? ViolationKind::StrongTriangle : ViolationKind::Triangle, t.i, t.j, t.k,
             strong ? "d(i,k) > max(d(i,j), d(j,k))" : "d(i,k) > d(i,j) + d(j,k)"});
  rep.checks += static_cast<long>(n) * n * n;
  rep.summary = std::string(flag_name(claim)) + " claim on " + std::to_string(n) + " points: " +
                (rep.pass ? "pass" : std::to_string(rep.violations.size()) + " violation(s)");
  return rep;
}

std::vector<PointId> ball(const Space& x, const MetricTable& m, PointId q, const Rat& r, bool open,
                          int depth_override) {
  std::vector<PointId> out;
  auto hit = [&](PointId p) {
    Rat d = m.at(q, p);
    return open ? d < r : d <= r;
  };
  if (x.is_finite()) {
    const int n = x.finite_size();
    for (PointId p = 0; p < n; ++p)
      if (hit(p)) out.push_back(p);
    return out;
  }
  if (depth_override >= 0) {
    x.ensure_blocks(depth_override);
    for (int k = 0; k < depth_override; ++k) {
      auto [f, e] = x.block_span(k);
      for (PointId p = f; p < e; ++p)
        if (hit(p)) out.push_back(p);
    }
    return out;
  }
  if (!m.witness || m.witness->finite_trivial)
    fail(Errc::MissingWitness, "ball query on a lazy space without a properness witness");
  const Rat cutoff = m.at(x.basepoint(), q) + r;
  for (int k = 0;; ++k) {
    if (k >= kScanBlockBudget) fail(Errc::ScanBudgetExceeded, "ball scan exceeded the block budget");
    if (m.witness->at(k) > cutoff) break;  // all later blocks excluded: beta nondecreasing
    auto [f, e] = x.block_span(k);
    for (PointId p = f; p < e; ++p)
      if (hit(p)) out.push_back(p);
  }
  return out;
}

std::pair<Rat, PointId> dist_to_set(const Space& x, const MetricTable& m, PointId q, const Subset& a) {
  if (a.empty_on(x)) fail(Errc::EmptySubset, "dist_to_set over an empty subset");
  std::optional<Rat> best;
  PointId arg = -1;
  auto consider = [&](PointId p) {
    Rat d = m.at(q, p);
    if (!best || d < *best) {
      best = std::move(d);
      arg = p;
    }
  };
  if (x.is_finite()) {
    if (a.is_explicit()) {
      for (PointId p : a.ids()) consider(p);
    } else {
      const int n = x.finite_size();
      for (PointId p = 0; p < n; ++p)
        if (a.contains(x, p)) consider(p);
    }
    return {*best, arg};
  }
  if (a.is_explicit()) {
    for (PointId p : a.ids()) consider(p);  // finite set of ids, no witness needed
    return {*best, arg};
  }
  if (!m.witness || m.witness->finite_trivial)
    fail(Errc::MissingWitness, "dist_to_set over a lazy subset without a properness witness");
  const Rat dq = m.at(x.basepoint(), q);
  for (int k = 0;; ++k) {
    if (k >= kScanBlockBudget) fail(Errc::ScanBudgetExceeded, "dist_to_set scan exceeded the block budget");
    if (best && m.witness->at(k) - dq > *best) break;
    for (PointId p : a.members_in_block(x, k)) consider(p);
  }
  return {*best, arg};
}

Report certify_proper(const Space& x, const MetricTable& m, const ProperWitness& w, int depth) {
  Report rep;
  if (x.is_finite() || w.finite_trivial) {
    rep.checks = 1;
    rep.summary = "trivial witness on a finite roster: pass";
    if (!x.is_finite() && w.finite_trivial) {
      rep.add({ViolationKind::Witness, -1, -1, -1, "trivial witness attached to a lazy space"});
      rep.summary = "trivial witness on a lazy space: fail";
    }
    return rep;
  }
  const PointId p = x.basepoint();
  Rat prev(0);
  for (int k = 0; k < depth; ++k) {
    const Rat bk = w.at(k);
    if (k > 0 && bk < prev)
      rep.add({ViolationKind::Witness, -1, -1, k, "beta decreases at block " + std::to_string(k)});
    auto [f, e] = x.block_span(k);
    for (PointId q = f; q < e; ++q) {
      ++rep.checks;
      if (m.at(p, q) < bk)
        rep.add({ViolationKind::Witness, q, -1, k,
                 "d(p," + x.name(q) + ") = " + format_rat(m.at(p, q)) + " < beta(" +
                     std::to_string(k) + ") = " + format_rat(bk)});
    }
    prev = bk;
  }
  rep.summary = "witness '" + w.rule + "' on " + std::to_string(depth) + " blocks: " +
                (rep.pass ? "pass" : std::to_string(rep.violations.size()) + " violation(s)");
  return rep;
}

RealFunction proper_function_into(const Space& x, const ValueSet& s) {
  if (!s.unbounded())
    fail(Errc::NotUnbounded, "proper functions need an unbounded value set, got " + s.describe());
  std::shared_ptr<SporadicSet> ladder;
  if (s.kind() == ValueSetKind::Geometric)
    ladder = std::make_shared<SporadicSet>(s.base(), s.scale());
  auto cache = std::make_shared<std::vector<Rat>>();
  auto a_k = [ladder, cache](int k) -> Rat {
    while (static_cast<int>(cache->size()) <= k) {
      const int i = static_cast<int>(cache->size());
      cache->push_back(ladder ? ladder->ladder(i) : Rat(i));
    }
    return (*cache)[k];
  };
  RealFunction f;
  Space xs = x;
  f.at = [xs, a_k](PointId p) { return a_k(xs.block_of(p)); };
  f.desc = "block ladder into " + s.describe();
  if (x.is_finite()) {
    f.witness = ProperWitness::finite();
  } else {
    f.witness = ProperWitness::from([a_k](int k) { return a_k(k); }, "beta(k) = a_k (block ladder)");
  }
  return f;
}

MetricTable enumeration_metric(const Space& x) {
  auto m = MetricTable::callback(
      [](PointId i, PointId j) { return Rat(std::abs(static_cast<long>(i) - j)); },
      MetricFlag::Metric);
  if (x.is_finite()) {
    m.witness = ProperWitness::finite();
  } else {
    Space xs = x;
    const long b = xs.basepoint();
    m.witness = ProperWitness::from(
        [xs, b](int k) {
          const long first = xs.block_span(k).first;
          return first > b ? Rat(first - b) : Rat(0);
        },
        "beta(k) = first id of block k - basepoint id");
  }
  return m;
}

}  // namespace metricext
