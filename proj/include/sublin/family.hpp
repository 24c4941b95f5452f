#ifndef SUBLIN_FAMILY_HPP
#define SUBLIN_FAMILY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "sublin/errors.hpp"
#include "sublin/measure_space.hpp"
#include "sublin/rng.hpp"

namespace sublin {

enum class FamilyStructure { general, product, homogeneous_product };

/// Finite family of measures on a shared space.  The upper expectation is the
/// member-wise maximum of classical expectations; everything downstream
/// (capacities, Choquet integrals, tail bounds) is driven by that maximum.
///
/// A family may carry a structure tag recording that each member is a product
/// of per-coordinate marginals.  Tags are verified at construction (weights
/// reproduced within 1e-12 per atom), so holders of a tagged family can rely
/// on the factorization.
class MeasureFamily {
 public:
  explicit MeasureFamily(std::vector<Measure> members)
      : members_(std::move(members)) {
    if (members_.empty()) throw structural_error("family: at least one member required");
    for (const auto& m : members_)
      if (!(m.space() == members_.front().space()))
        throw structural_error("family: members live on different spaces");
    space_ = members_.front().space();
  }

  /// Member j is the product of marginals[j][0..n-1] (first factor most
  /// significant in atom order).  Pass members explicitly to have the tag
  /// verified against them; omit to build them from the marginals.
  static MeasureFamily product(std::vector<std::vector<Measure>> marginals,
                               std::vector<Measure> members = {}) {
    return tagged(FamilyStructure::product, std::move(marginals), std::move(members));
  }

  /// All coordinates of member j share one marginal.
  static MeasureFamily homogeneous_product(std::vector<Measure> shared_marginals,
                                           std::int64_t copies,
                                           std::vector<Measure> members = {}) {
    if (copies < 1) throw structural_error("family: copies must be >= 1");
    std::vector<std::vector<Measure>> marginals;
    marginals.reserve(shared_marginals.size());
    for (const auto& m : shared_marginals)
      marginals.emplace_back(static_cast<std::size_t>(copies), m);
    return tagged(FamilyStructure::homogeneous_product, std::move(marginals),
                  std::move(members));
  }

  const SampleSpace& space() const { return space_; }
  const std::vector<Measure>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  FamilyStructure structure() const { return structure_; }

  /// Per-member per-coordinate marginals; empty unless tagged.
  const std::vector<std::vector<Measure>>& product_marginals() const { return marginals_; }

  std::int64_t coordinates() const {
    return marginals_.empty() ? 0 : static_cast<std::int64_t>(marginals_.front().size());
  }

 private:
  static MeasureFamily tagged(FamilyStructure tag,
                              std::vector<std::vector<Measure>> marginals,
                              std::vector<Measure> members) {
    if (marginals.empty()) throw structural_error("family: at least one member required");
    const std::size_t n = marginals.front().size();
    if (n == 0) throw structural_error("family: at least one coordinate required");
    for (const auto& row : marginals)
      if (row.size() != n) throw structural_error("family: ragged marginal rows");

    if (members.empty()) {
      members.reserve(marginals.size());
      for (const auto& row : marginals) members.push_back(product_measure(row));
    }
    MeasureFamily f(std::move(members));
    if (f.members_.size() != marginals.size())
      throw structural_error("family: member count does not match marginal rows");

    // Verify the tag: each member's weights must factor through its marginals.
    std::vector<std::int64_t> sizes;
    sizes.reserve(n);
    for (const auto& m : marginals.front()) sizes.push_back(m.space().atom_count);
    const ProductLayout layout(sizes);
    if (layout.total != f.space_.atom_count)
      throw structural_error("family: product shape does not match member space");
    for (std::size_t j = 0; j < marginals.size(); ++j) {
      for (std::size_t i = 0; i < n; ++i)
        if (marginals[j][i].space().atom_count != sizes[i])
          throw structural_error("family: marginal spaces differ across members");
      for (std::int64_t a = 0; a < layout.total; ++a) {
        double w = 1.0;
        for (std::size_t i = 0; i < n; ++i) w *= marginals[j][i].weight(layout.digit(a, i));
        if (std::abs(w - f.members_[j].weight(a)) > 1e-12)
          throw structural_error("family: member weights do not factor through marginals");
      }
    }
    f.structure_ = tag;
    f.marginals_ = std::move(marginals);
    return f;
  }

  SampleSpace space_;
  std::vector<Measure> members_;
  FamilyStructure structure_ = FamilyStructure::general;
  std::vector<std::vector<Measure>> marginals_;  // [member][coordinate]
};

struct AttainedValue {
  double value = 0.0;
  std::size_t member = 0;  // lowest index attaining the extremum
};

/// max over members of E_j[X]; ties resolved to the lowest member index.
inline AttainedValue upper_expectation_detail(const MeasureFamily& f, const RandomVector& x) {
  AttainedValue best{-std::numeric_limits<double>::infinity(), 0};
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double e = expectation(f.members()[j], x);
    if (e > best.value) best = {e, j};
  }
  return best;
}

inline double upper_expectation(const MeasureFamily& f, const RandomVector& x) {
  return upper_expectation_detail(f, x).value;
}

/// min over members; equals -upper(-X).
inline AttainedValue lower_expectation_detail(const MeasureFamily& f, const RandomVector& x) {
  AttainedValue best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double e = expectation(f.members()[j], x);
    if (e < best.value) best = {e, j};
  }
  return best;
}

inline double lower_expectation(const MeasureFamily& f, const RandomVector& x) {
  return lower_expectation_detail(f, x).value;
}

/// Subset of atoms.
class EventSet {
 public:
  template <class Pred>
  static EventSet of(const SampleSpace& space, Pred&& pred) {
    EventSet e;
    e.space_ = space;
    e.in_.resize(static_cast<std::size_t>(space.atom_count), 0);
    for (std::int64_t a = 0; a < space.atom_count; ++a) e.in_[a] = pred(a) ? 1 : 0;
    return e;
  }

  static EventSet from_atoms(const SampleSpace& space, const std::vector<std::int64_t>& atoms) {
    for (std::int64_t a : atoms)
      if (a < 0 || a >= space.atom_count) throw structural_error("event: atom out of range");
    return of(space, [&](std::int64_t a) {
      return std::find(atoms.begin(), atoms.end(), a) != atoms.end();
    });
  }

  static EventSet full(const SampleSpace& space) {
    return of(space, [](std::int64_t) { return true; });
  }
  static EventSet empty(const SampleSpace& space) {
    return of(space, [](std::int64_t) { return false; });
  }

  EventSet complement() const {
    return of(space_, [this](std::int64_t a) { return !in_[static_cast<std::size_t>(a)]; });
  }

  bool contains(std::int64_t atom) const { return in_[static_cast<std::size_t>(atom)] != 0; }
  const SampleSpace& space() const { return space_; }
  std::int64_t count() const { return std::count(in_.begin(), in_.end(), char{1}); }

 private:
  EventSet() = default;
  SampleSpace space_;
  std::vector<char> in_;
};

/// Upper capacity = max_j P_j(A); lower = 1 - max_j P_j(complement of A).
/// The pair identity upper(A) + lower-of-complement(A) = 1 holds by
/// construction (both sides read off the same member sums).
struct CapacityPair {
  double upper = 0.0;
  double lower = 0.0;
  std::size_t upper_member = 0;  // attains max P_j(A)
  std::size_t lower_member = 0;  // attains max P_j(complement)
};

inline CapacityPair upper_capacity(const MeasureFamily& f, const EventSet& a) {
  if (!(a.space() == f.space()))
    throw structural_error("capacity: event and family live on different spaces");
  CapacityPair out;
  double best_in = -1.0, best_out = -1.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    double in_sum = 0.0, out_sum = 0.0;
    const auto& w = f.members()[j].weights();
    for (std::int64_t at = 0; at < f.space().atom_count; ++at)
      (a.contains(at) ? in_sum : out_sum) += w[static_cast<std::size_t>(at)];
    if (in_sum > best_in) {
      best_in = in_sum;
      out.upper_member = j;
    }
    if (out_sum > best_out) {
      best_out = out_sum;
      out.lower_member = j;
    }
  }
  out.upper = best_in;
  out.lower = 1.0 - best_out;
  return out;
}

enum class CapacitySide { upper, lower };

/// Exact Choquet integral of a single-coordinate vector with respect to the
/// upper or lower capacity.  With sorted distinct values v_1 < ... < v_k and
/// level sets S_i = {X >= v_i}, the layer-cake sum collapses to
///   v_1 + sum_{i=2..k} (v_i - v_{i-1}) * V(S_i),
/// which holds for any monotone normalized set function V on a finite space.
inline double choquet_integral(const MeasureFamily& f, const RandomVector& x,
                               CapacitySide side) {
  if (!(x.space() == f.space()))
    throw structural_error("choquet: vector and family live on different spaces");
  if (x.coords() != 1) throw structural_error("choquet: vector must be single-coordinate");

  const std::int64_t atoms = f.space().atom_count;
  std::vector<std::int64_t> order(static_cast<std::size_t>(atoms));
  std::iota(order.begin(), order.end(), std::int64_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    return x.value(a, 0) < x.value(b, 0);
  });

  // Distinct values ascending, with the atom-count of each value group.
  std::vector<double> vals;
  std::vector<std::size_t> group_end;  // index into `order` one past each group
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double v = x.value(order[i], 0);
    if (vals.empty() || v != vals.back()) {
      vals.push_back(v);
      group_end.push_back(i + 1);
    } else {
      group_end.back() = i + 1;
    }
  }
  const std::size_t k = vals.size();
  if (k == 1) return vals[0];

  // Per member: tail_j(i) = P_j(X >= v_i), head_j(i) = P_j(X < v_i), both by
  // direct summation so no 1-x cancellation sneaks in.
  double total = 0.0;
  std::vector<double> caps(k, 0.0);  // V({X >= v_i}) for the chosen side
  const bool upper = side == CapacitySide::upper;
  std::vector<double> best(k, -1.0);
  for (const auto& member : f.members()) {
    const auto& w = member.weights();
    if (upper) {
      double tail = 0.0;
      std::size_t i = k;
      std::size_t pos = order.size();
      while (i-- > 0) {
        const std::size_t begin = i == 0 ? 0 : group_end[i - 1];
        while (pos > begin) tail += w[static_cast<std::size_t>(order[--pos])];
        if (tail > best[i]) best[i] = tail;
      }
    } else {
      double head = 0.0;
      std::size_t pos = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t begin = i == 0 ? 0 : group_end[i - 1];
        while (pos < begin) head += w[static_cast<std::size_t>(order[pos++])];
        if (head > best[i]) best[i] = head;
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i) caps[i] = upper ? best[i] : 1.0 - best[i];

  total = vals[0];
  for (std::size_t i = 1; i < k; ++i) total += (vals[i] - vals[i - 1]) * caps[i];
  return total;
}

struct MarkovBound {
  double lhs = 0.0;  // upper capacity of {|X| >= x}
  double rhs = 0.0;  // upper expectation of |X|^p over x^p
  bool holds = false;
};

/// Chebyshev-type tail bound for the upper capacity.
inline MarkovBound markov_tail_bound(const MeasureFamily& f, const RandomVector& x,
                                     double threshold, double p) {
  if (!(threshold > 0.0)) throw domain_error("markov: threshold must be > 0");
  if (!(p > 0.0)) throw domain_error("markov: p must be > 0");
  if (x.coords() != 1) throw structural_error("markov: vector must be single-coordinate");
  const EventSet tail = EventSet::of(
      f.space(), [&](std::int64_t a) { return std::abs(x.value(a, 0)) >= threshold; });
  MarkovBound out;
  out.lhs = upper_capacity(f, tail).upper;
  const RandomVector moment = x.map([p](double v) { return std::pow(std::abs(v), p); });
  out.rhs = upper_expectation(f, moment) / std::pow(threshold, p);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-9) + 1e-15;
  return out;
}

struct AxiomCheckResult {
  std::string name;
  int performed = 0;
  int failed = 0;
  std::vector<std::string> witnesses;  // first few failures, for diagnosis
};

struct AxiomReport {
  bool all_pass = true;
  int probes = 0;
  std::uint64_t seed = 0;
  std::vector<AxiomCheckResult> checks;
};

/// Randomized probes of the defining properties of the upper expectation:
/// monotonicity, constant preservation, sub-additivity, positive homogeneity,
/// translation invariance, the conjugate difference inequality, and the
/// conjugate ordering.  Probe values live in [-10, 10].  Equalities are
/// checked to relative 1e-9, inequalities get the same one-sided slack.
inline AxiomReport check_axioms(const MeasureFamily& f, int probes, std::uint64_t seed) {
  if (probes < 1) throw domain_error("axioms: probe count must be >= 1");
  AxiomReport report;
  report.probes = probes;
  report.seed = seed;
  report.checks.resize(7);
  report.checks[0].name = "monotonicity";
  report.checks[1].name = "constant-preserving";
  report.checks[2].name = "sub-additivity";
  report.checks[3].name = "positive-homogeneity";
  report.checks[4].name = "translation-invariance";
  report.checks[5].name = "conjugate-difference";
  report.checks[6].name = "conjugate-order";

  const std::int64_t atoms = f.space().atom_count;
  const Rng root(seed);
  const auto tol = [](double a, double b) {
    return 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  const auto record = [&](std::size_t check, bool ok, int probe, double lhs, double rhs) {
    auto& c = report.checks[check];
    ++c.performed;
    if (!ok) {
      ++c.failed;
      if (c.witnesses.size() < 3)
        c.witnesses.push_back("probe " + std::to_string(probe) + ": lhs=" +
                              std::to_string(lhs) + " rhs=" + std::to_string(rhs));
    }
  };

  for (int probe = 0; probe < probes; ++probe) {
    Rng rng = root.child(static_cast<std::uint64_t>(probe));
    std::vector<double> xv(static_cast<std::size_t>(atoms)), yv(xv.size());
    for (auto& v : xv) v = rng.uniform(-10.0, 10.0);
    for (auto& v : yv) v = rng.uniform(-10.0, 10.0);
    const RandomVector x = RandomVector::single(f.space(), xv);
    const RandomVector y = RandomVector::single(f.space(), yv);
    const double ex = upper_expectation(f, x);
    const double ey = upper_expectation(f, y);

    {  // X >= Y pointwise implies E[X] >= E[Y]
      std::vector<double> zv(xv.size());
      for (std::size_t i = 0; i < zv.size(); ++i) zv[i] = xv[i] - rng.uniform(0.0, 5.0);
      const double ez = upper_expectation(f, RandomVector::single(f.space(), zv));
      record(0, ez <= ex + tol(ez, ex), probe, ez, ex);
    }
    {
      const double c = rng.uniform(-10.0, 10.0);
      const double ec =
          upper_expectation(f, RandomVector::single(f.space(), std::vector<double>(xv.size(), c)));
      record(1, std::abs(ec - c) <= tol(ec, c), probe, ec, c);
    }
    {
      std::vector<double> sv(xv.size());
      for (std::size_t i = 0; i < sv.size(); ++i) sv[i] = xv[i] + yv[i];
      const double es = upper_expectation(f, RandomVector::single(f.space(), sv));
      record(2, es <= ex + ey + tol(es, ex + ey), probe, es, ex + ey);
    }
    {
      const double lam = rng.uniform(0.01, 10.0);
      std::vector<double> sv(xv.size());
      for (std::size_t i = 0; i < sv.size(); ++i) sv[i] = lam * xv[i];
      const double el = upper_expectation(f, RandomVector::single(f.space(), sv));
      record(3, std::abs(el - lam * ex) <= tol(el, lam * ex), probe, el, lam * ex);
    }
    {
      const double c = rng.uniform(-10.0, 10.0);
      std::vector<double> sv(xv.size());
      for (std::size_t i = 0; i < sv.size(); ++i) sv[i] = xv[i] + c;
      const double et = upper_expectation(f, RandomVector::single(f.space(), sv));
      record(4, std::abs(et - (ex + c)) <= tol(et, ex + c), probe, et, ex + c);
    }
    {
      std::vector<double> dv(xv.size());
      for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = xv[i] - yv[i];
      const double ed = upper_expectation(f, RandomVector::single(f.space(), dv));
      record(5, ex - ey <= ed + tol(ex - ey, ed), probe, ex - ey, ed);
    }
    {
      const double lo = lower_expectation(f, x);
      record(6, lo <= ex + tol(lo, ex), probe, lo, ex);
    }
  }

  for (const auto& c : report.checks)
    if (c.failed > 0) report.all_pass = false;
  return report;
}

}  // namespace sublin

#endif
