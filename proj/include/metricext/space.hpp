#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "metricext/rational.hpp"
#include "metricext/report.hpp"
#include "metricext/valueset.hpp"

namespace metricext {

using PointId = int;

/// Fills block k of a lazy enumeration with fresh point names and payload
/// values. Blocks must be finite, nonempty and deterministic.
struct BlockGen {
  std::function<void(int k, std::vector<std::string>& names, std::vector<Rat>& values)> fill;
  std::string desc;
};

/// A countable discrete point set: a finite roster (one block) or a lazy
/// block enumeration. Generated prefixes are cached and immutable; the
/// generator itself is a single-consumer resource.
class Space {
 public:
  static Space finite(std::vector<std::string> names, PointId basepoint = 0);
  static Space naturals(int block_size = 1);
  static Space dyadics();
  static Space from_generator(BlockGen gen, const std::string& basepoint_name = "");
  static Space product(const Space& x, const Space& z);

  bool is_finite() const;
  /// Number of points of a finite space.
  int finite_size() const;
  PointId basepoint() const;

  /// Generates blocks [0, k); returns the number of points available.
  int ensure_blocks(int k) const;
  int generated_blocks() const;
  int generated_points() const;

  int block_of(PointId p) const;
  /// Half-open id range [first, end) of block k (generates it if needed).
  std::pair<int, int> block_span(int k) const;

  const std::string& name(PointId p) const;
  const Rat& value(PointId p) const;
  std::optional<PointId> find_name(const std::string& n) const;

  bool is_product() const;
  std::pair<PointId, PointId> factors(PointId p) const;
  /// Id of (xi, zi) in a product space (generates enough blocks to reach it).
  PointId pair_id(PointId xi, PointId zi) const;
  const Space& left_factor() const;
  const Space& right_factor() const;

  std::string describe() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

/// Tail lower-bound certificate: d(basepoint, x) >= beta(k) for every x in
/// block k, with beta nondecreasing and unbounded. This is the computational
/// content of properness; ball queries on lazy spaces terminate through it.
struct ProperWitness {
  std::function<Rat(int)> beta;
  std::string rule;
  bool finite_trivial = false;

  Rat at(int k) const { return finite_trivial ? Rat(0) : beta(k); }

  static ProperWitness finite() {
    ProperWitness w;
    w.finite_trivial = true;
    w.rule = "finite roster (trivial witness)";
    return w;
  }
  static ProperWitness from(std::function<Rat(int)> beta, std::string rule) {
    ProperWitness w;
    w.beta = std::move(beta);
    w.rule = std::move(rule);
    return w;
  }
};

enum class MetricFlag { Pseudo, PseudoUltra, Metric, Ultra };

const char* flag_name(MetricFlag f);
MetricFlag parse_flag(const std::string& s);
inline bool flag_is_ultra(MetricFlag f) { return f == MetricFlag::PseudoUltra || f == MetricFlag::Ultra; }
inline bool flag_is_positive(MetricFlag f) { return f == MetricFlag::Metric || f == MetricFlag::Ultra; }

/// Symmetric exact-rational distance data over a space: a dense table for
/// finite rosters or a callback for lazy ones, together with the claimed
/// axiom flag, an optional value-set tag and an optional properness witness.
class MetricTable {
 public:
  MetricTable() = default;
  static MetricTable dense(int n, std::vector<Rat> entries, MetricFlag flag);
  static MetricTable callback(std::function<Rat(PointId, PointId)> fn, MetricFlag flag);

  Rat at(PointId i, PointId j) const;
  bool is_dense() const { return n_ >= 0; }
  int dense_size() const { return n_; }
  const std::vector<Rat>& entries() const { return entries_; }

  MetricFlag flag() const { return flag_; }
  void set_flag(MetricFlag f) { flag_ = f; }

  std::optional<ValueSet> value_set;
  std::optional<ProperWitness> witness;

 private:
  int n_ = -1;
  std::vector<Rat> entries_;
  std::function<Rat(PointId, PointId)> fn_;
  MetricFlag flag_ = MetricFlag::Pseudo;
};

/// A subset of a space's points: explicit ids, everything, or a
/// predicate-defined subset of a lazy space with a declared cardinality.
class Subset {
 public:
  static Subset of_ids(std::vector<PointId> ids);
  static Subset everything();
  static Subset empty();
  static Subset by_rule(std::string name, std::function<bool(const Space&, PointId)> pred,
                        bool declared_infinite);
  static Subset evens();
  static Subset odds();
  static Subset multiples(long m);
  static Subset integer_points();

  bool contains(const Space& x, PointId p) const;
  bool is_everything() const { return everything_; }
  bool is_empty_set() const { return empty_; }
  bool declared_infinite(const Space& x) const;
  bool is_explicit() const { return explicit_; }
  const std::vector<PointId>& ids() const { return ids_; }

  std::vector<PointId> members_in_block(const Space& x, int k) const;
  std::vector<PointId> members_upto(const Space& x, int blocks) const;
  /// Least member id; scans lazily until found (the subset must be nonempty).
  PointId first_member(const Space& x) const;
  bool empty_on(const Space& x) const;

  std::string describe() const { return desc_; }

 private:
  bool everything_ = false;
  bool empty_ = false;
  bool explicit_ = false;
  bool infinite_ = false;
  std::vector<PointId> ids_;
  std::function<bool(const Space&, PointId)> pred_;
  std::string desc_;
};

/// A total function on a space's points, with an optional witness giving
/// per-block tail lower bounds on its values (the properness certificate of
/// the function itself).
struct RealFunction {
  std::function<Rat(PointId)> at;
  std::optional<ProperWitness> witness;
  std::string desc;
};

// Scan guard for lazy enumerations: generous, but stops runaway loops with a
// diagnosable error instead of hanging.
inline constexpr int kScanBlockBudget = 1 << 20;

/// Exhaustive axiom check of the first `points` points (the whole roster for
/// finite tables) against a claimed flag. Violations are data, not errors.
Report verify_axioms(const MetricTable& m, MetricFlag claim, int points);

/// Closed ball {x : m(q,x) <= r} (or open when `open`). Lazy spaces need a
/// witness; the scan stops at the first block k with beta(k) > m(p,q) + r.
/// `depth_override`, when >= 0, scans exactly that many blocks instead —
/// used to test stability of the witness cutoff.
std::vector<PointId> ball(const Space& x, const MetricTable& m, PointId q, const Rat& r,
                          bool open = false, int depth_override = -1);

/// min over a in A of m(q, a), together with the arg min (lowest id among
/// ties). The minimum is attained: discrete properness.
std::pair<Rat, PointId> dist_to_set(const Space& x, const MetricTable& m, PointId q,
                                    const Subset& a);

/// Spot-checks the witness guarantee d(p, x) >= beta(block(x)) on the first
/// `depth` blocks and beta's monotonicity.
Report certify_proper(const Space& x, const MetricTable& m, const ProperWitness& w, int depth);

/// Proper function into an unbounded value set: value a_k on block k, where
/// a_k is the canonical strictly increasing unbounded ladder of S. The
/// witness is beta(k) = a_k.
RealFunction proper_function_into(const Space& x, const ValueSet& s);

/// |index(i) - index(j)| — the always-available reference metric used for
/// anchor assignment; carries the enumeration-order witness on lazy spaces.
MetricTable enumeration_metric(const Space& x);

}  // namespace metricext
