#include "mgroute/core.hpp"

#include <cmath>

namespace mgroute {

int MultiGraphInstance::max_parallel() const {
  int mx = 0;
  for (const auto& s : slots) mx = std::max(mx, static_cast<int>(s.size()));
  return mx;
}

int MultiGraphInstance::total_edges() const {
  int total = 0;
  for (const auto& s : slots) total += static_cast<int>(s.size());
  return total;
}

MultiGraphInstance MultiGraphInstance::empty(int n, int m) {
  MultiGraphInstance inst;
  inst.n = n;
  inst.m = m;
  inst.slots.resize(static_cast<std::size_t>(n) * n);
  return inst;
}

bool dominates(const CostVector& a, const CostVector& b) {
  require(a.size() == b.size(), "dominates: dimension mismatch");
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strict = true;
  }
  return strict;
}

std::vector<CostVector> pareto_filter(const std::vector<CostVector>& points) {
  std::vector<CostVector> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j != i && dominates(points[j], points[i])) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.push_back(points[i]);
  }
  return out;
}

bool ParetoArchive::insert(const CostVector& cost, Solution sol) {
  if (dim_ < 0) dim_ = static_cast<int>(cost.size());
  require(static_cast<int>(cost.size()) == dim_,
          "archive_insert: dimension mismatch");
  for (const auto& e : entries_) {
    if (dominates(e.cost, cost)) return false;
  }
  std::erase_if(entries_,
                [&](const ArchiveEntry& e) { return dominates(cost, e.cost); });
  entries_.push_back({cost, std::move(sol)});
  return true;
}

void ParetoArchive::merge(const ParetoArchive& other) {
  for (const auto& e : other.entries_) insert(e.cost, e.sol);
}

std::vector<CostVector> ParetoArchive::costs() const {
  std::vector<CostVector> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.cost);
  return out;
}

std::vector<TourViolation> validate_tour(const MultiGraphInstance& inst,
                                         const Tour& tour) {
  std::vector<TourViolation> out;
  const int n = inst.n;
  if (static_cast<int>(tour.steps.size()) != n) {
    out.push_back({"coverage", "tour has " + std::to_string(tour.steps.size()) +
                                   " steps, expected " + std::to_string(n)});
    return out;
  }
  bool chain_reported = false;
  for (int t = 0; t < n; ++t) {
    const EdgeRef& cur = tour.steps[t];
    const EdgeRef& nxt = tour.steps[(t + 1) % n];
    if (cur.to != nxt.from && !chain_reported) {
      out.push_back({"chaining", "step " + std::to_string(t) + " ends at " +
                                     std::to_string(cur.to) +
                                     " but next starts at " +
                                     std::to_string(nxt.from)});
      chain_reported = true;
    }
  }
  std::vector<int> visits(n, 0);
  bool range_ok = true;
  for (const EdgeRef& e : tour.steps) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n || e.from == e.to) {
      out.push_back({"slot-bounds", "edge endpoints out of range"});
      range_ok = false;
      break;
    }
    ++visits[e.from];
  }
  if (range_ok) {
    for (int v = 0; v < n; ++v) {
      if (visits[v] != 1) {
        out.push_back({"coverage", "node " + std::to_string(v) + " visited " +
                                       std::to_string(visits[v]) + " times"});
        break;
      }
    }
    for (const EdgeRef& e : tour.steps) {
      if (e.slot < 0 || e.slot >= inst.parallel_count(e.from, e.to)) {
        out.push_back({"slot-bounds",
                       "slot " + std::to_string(e.slot) + " out of range for (" +
                           std::to_string(e.from) + "," + std::to_string(e.to) +
                           ")"});
        break;
      }
    }
  }
  return out;
}

std::vector<TourViolation> validate_routes(const MultiGraphInstance& inst,
                                           const RouteSet& rs) {
  std::vector<TourViolation> out;
  if (!inst.depot || !inst.capacity) {
    out.push_back({"coverage", "instance has no depot/capacity"});
    return out;
  }
  const int depot = *inst.depot;
  const int n = inst.n;
  std::vector<int> visits(n, 0);
  for (std::size_t r = 0; r < rs.routes.size(); ++r) {
    const auto& route = rs.routes[r];
    const std::string tag = "route " + std::to_string(r);
    if (route.empty()) {
      out.push_back({"chaining", tag + " is empty"});
      continue;
    }
    if (route.front().from != depot || route.back().to != depot) {
      out.push_back({"chaining", tag + " not depot-anchored"});
    }
    for (std::size_t t = 0; t + 1 < route.size(); ++t) {
      if (route[t].to != route[t + 1].from) {
        out.push_back({"chaining", tag + " breaks at step " + std::to_string(t)});
        break;
      }
    }
    int load = 0;
    for (const EdgeRef& e : route) {
      if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n || e.from == e.to ||
          e.slot < 0 || e.slot >= inst.parallel_count(e.from, e.to)) {
        out.push_back({"slot-bounds", tag + " has an out-of-range edge"});
        break;
      }
      if (e.to != depot) {
        ++visits[e.to];
        load += inst.demands.empty() ? 0 : inst.demands[e.to];
      }
    }
    if (load > *inst.capacity) {
      out.push_back({"capacity", tag + " load " + std::to_string(load) +
                                     " exceeds capacity " +
                                     std::to_string(*inst.capacity)});
    }
  }
  for (int v = 0; v < n; ++v) {
    if (v == depot) continue;
    if (visits[v] != 1) {
      out.push_back({"coverage", "customer " + std::to_string(v) + " visited " +
                                     std::to_string(visits[v]) + " times"});
      break;
    }
  }
  return out;
}

}  // namespace mgroute
