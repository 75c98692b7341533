#ifndef MGROUTE_BENCH_HPP
#define MGROUTE_BENCH_HPP

#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "mgroute/core.hpp"
#include "mgroute/gen.hpp"
#include "mgroute/heur.hpp"
#include "mgroute/moea.hpp"

namespace mgroute {

// MGROUTE_WORKERS overrides the requested worker count.
int resolve_workers(int requested);

// Runs job(0..count-1) on `workers` threads; results ordered by index and
// identical to sequential execution. A failing job aborts the batch with an
// error naming the instance index.
template <typename R>
std::vector<R> parallel_eval(int count, int workers,
                             const std::function<R(int)>& job) {
  require(workers >= 1, "parallel_eval: workers must be >= 1");
  std::vector<R> results(static_cast<std::size_t>(count));
  if (count == 0) return results;
  workers = std::min(workers, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) {
      try {
        results[static_cast<std::size_t>(i)] = job(i);
      } catch (const std::exception& e) {
        throw std::runtime_error("instance " + std::to_string(i) + ": " +
                                 e.what());
      }
    }
    return results;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int i = w; i < count; i += workers) {
        try {
          results[static_cast<std::size_t>(i)] = job(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (int i = 0; i < count; ++i) {
    if (!errors[static_cast<std::size_t>(i)]) continue;
    try {
      std::rethrow_exception(errors[static_cast<std::size_t>(i)]);
    } catch (const std::exception& e) {
      throw std::runtime_error("instance " + std::to_string(i) + ": " + e.what());
    }
  }
  return results;
}

struct SolveOptions {
  std::string solver;  // nn | ni | fi | nn2opt | moea | gms-eb | gms-dh | gms-dh-simple
  int pref_count = 101;
  int max_moves = 0;
  bool nn_all_starts = false;
  MoeaConfig moea;
  std::string checkpoint;
  std::uint64_t seed = 0;
};

// Problem kind from payloads and slot structure unless explicitly given.
ProblemKind infer_problem(const MultiGraphInstance& inst);

ParetoArchive solve_instance(const MultiGraphInstance& inst, ProblemKind kind,
                             const SolveOptions& opts, int instance_index);

// Archive files: JSON lines, one per instance, in instance order.
std::string archive_to_json(int instance_index, const ParetoArchive& archive);
void save_archives(const std::string& path,
                   const std::vector<ParetoArchive>& archives);
std::vector<std::vector<CostVector>> load_archive_costs(const std::string& path);

// Single-line JSON manifest writer for reproducibility records.
void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& fields);

std::string markdown_table(const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows);

}  // namespace mgroute

#endif
