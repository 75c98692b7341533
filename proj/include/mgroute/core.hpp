#ifndef MGROUTE_CORE_HPP
#define MGROUTE_CORE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mgroute {

// Thrown on contract violations (dimension mismatches, invalid inputs).
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractError(msg);
}

// m-dimensional objective vector. Dimension checks happen at module
// boundaries; internally vectors are trusted.
using CostVector = std::vector<double>;

// Reference to one parallel edge: ordered pair (from, to) plus the index
// into that pair's slot list.
struct EdgeRef {
  int from = 0;
  int to = 0;
  int slot = 0;

  bool operator==(const EdgeRef&) const = default;
};

struct TimeWindow {
  double start = 0.0;
  double end = 0.0;
};

// Directed multigraph on n nodes with m-dimensional edge costs. Every
// ordered pair of distinct nodes carries at least one parallel edge.
// Simple graphs are the special case of exactly one slot per pair.
struct MultiGraphInstance {
  int n = 0;
  int m = 0;
  // slots_[i*n + j] = list of cost vectors for (i, j); empty on diagonal.
  std::vector<std::vector<CostVector>> slots;
  std::vector<int> demands;             // size n when present (depot = 0)
  std::vector<TimeWindow> windows;      // size n when present; depot entry unused
  bool has_windows = false;
  std::optional<int> depot;
  std::optional<int> capacity;

  const std::vector<CostVector>& pair_slots(int i, int j) const {
    return slots[static_cast<std::size_t>(i) * n + j];
  }
  std::vector<CostVector>& pair_slots(int i, int j) {
    return slots[static_cast<std::size_t>(i) * n + j];
  }
  int parallel_count(int i, int j) const {
    return static_cast<int>(pair_slots(i, j).size());
  }
  const CostVector& edge_cost(const EdgeRef& e) const {
    return pair_slots(e.from, e.to)[e.slot];
  }
  int max_parallel() const;
  // Total directed edge count over all slots.
  int total_edges() const;

  static MultiGraphInstance empty(int n, int m);
};

// Closed tour as a chained sequence of edge references.
struct Tour {
  std::vector<EdgeRef> steps;

  bool operator==(const Tour&) const = default;
};

// Depot-anchored routes; each route starts and ends at the depot.
struct RouteSet {
  std::vector<std::vector<EdgeRef>> routes;

  bool operator==(const RouteSet&) const = default;
};

using Solution = std::variant<std::monostate, Tour, RouteSet>;

// Eq. 3 style dominance: a <= b componentwise with one strict <.
bool dominates(const CostVector& a, const CostVector& b);

// Non-dominated subset, original order preserved; equal vectors all kept.
std::vector<CostVector> pareto_filter(const std::vector<CostVector>& points);

struct ArchiveEntry {
  CostVector cost;
  Solution sol;
};

// Mutable set of mutually non-dominated entries. Single-writer; parallel
// producers merge afterwards via insert.
class ParetoArchive {
 public:
  ParetoArchive() = default;
  explicit ParetoArchive(int dim) : dim_(dim) {}

  // Inserts iff no existing entry dominates cost; drops entries the new
  // cost dominates. Equal cost vectors are mutually non-dominating and
  // are all retained.
  bool insert(const CostVector& cost, Solution sol = std::monostate{});
  void merge(const ParetoArchive& other);

  const std::vector<ArchiveEntry>& entries() const { return entries_; }
  std::vector<CostVector> costs() const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  int dim_ = -1;  // fixed by first insert when constructed without dim
  std::vector<ArchiveEntry> entries_;
};

struct TourViolation {
  std::string category;  // "chaining" | "coverage" | "slot-bounds"
  std::string detail;
};

// ok == empty list. Reports the first broken invariant per category.
std::vector<TourViolation> validate_tour(const MultiGraphInstance& inst,
                                         const Tour& tour);

// RouteSet counterpart: chaining/coverage/slot bounds per route plus
// depot anchoring and capacity.
std::vector<TourViolation> validate_routes(const MultiGraphInstance& inst,
                                           const RouteSet& routes);

}  // namespace mgroute

#endif
