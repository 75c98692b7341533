#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mgroute/bench.hpp"
#include "mgroute/gen.hpp"
#include "mgroute/heur.hpp"
#include "mgroute/metrics.hpp"
#include "mgroute/moea.hpp"
#include "mgroute/neural/checkpoint.hpp"
#include "mgroute/neural/train.hpp"
#include "mgroute/problems.hpp"
#include "mgroute/prune.hpp"

namespace py = pybind11;
using namespace mgroute;

namespace {

using PyEdge = std::tuple<int, int, int>;

std::vector<PyEdge> tour_to_py(const Tour& t) {
  std::vector<PyEdge> out;
  for (const EdgeRef& e : t.steps) out.emplace_back(e.from, e.to, e.slot);
  return out;
}

Tour tour_from_py(const std::vector<PyEdge>& steps) {
  Tour t;
  for (const auto& [f, to, s] : steps) t.steps.push_back({f, to, s});
  return t;
}

py::object solution_to_py(const Solution& sol) {
  if (const Tour* t = std::get_if<Tour>(&sol)) return py::cast(tour_to_py(*t));
  if (const RouteSet* rs = std::get_if<RouteSet>(&sol)) {
    std::vector<std::vector<PyEdge>> routes;
    for (const auto& r : rs->routes) {
      std::vector<PyEdge> route;
      for (const EdgeRef& e : r) route.emplace_back(e.from, e.to, e.slot);
      routes.push_back(std::move(route));
    }
    return py::cast(routes);
  }
  return py::none();
}

py::list archive_to_py(const ParetoArchive& a) {
  py::list out;
  for (const ArchiveEntry& e : a.entries()) {
    py::dict d;
    d["cost"] = e.cost;
    d["solution"] = solution_to_py(e.sol);
    out.append(d);
  }
  return out;
}

Preference pref_from_py(const std::vector<double>& w) { return Preference(w); }

}  // namespace

PYBIND11_MODULE(_mgroute, m) {
  m.doc() = "multi-objective multigraph routing solvers";

  py::register_exception<ContractError>(m, "ContractError");

  py::class_<MultiGraphInstance>(m, "Instance")
      .def_readonly("n", &MultiGraphInstance::n)
      .def_readonly("m", &MultiGraphInstance::m)
      .def_property_readonly(
          "depot",
          [](const MultiGraphInstance& inst) -> py::object {
            return inst.depot ? py::cast(*inst.depot) : py::none();
          })
      .def_property_readonly(
          "capacity",
          [](const MultiGraphInstance& inst) -> py::object {
            return inst.capacity ? py::cast(*inst.capacity) : py::none();
          })
      .def("slots",
           [](const MultiGraphInstance& inst, int i, int j) {
             return inst.pair_slots(i, j);
           },
           py::arg("i"), py::arg("j"))
      .def("parallel_count", &MultiGraphInstance::parallel_count)
      .def("total_edges", &MultiGraphInstance::total_edges)
      .def("to_json", &instance_to_json)
      .def_static("from_json",
                  [](const std::string& s) { return instance_from_json(s); });

  m.def("generate",
        [](const std::string& dist, const std::string& problem, int n, int m,
           std::uint64_t seed, int count) {
          GenSpec spec;
          spec.dist = parse_distribution(dist, spec.x);
          spec.problem = parse_problem(problem);
          spec.n = n;
          spec.m = spec.problem == ProblemKind::MOCVRP ? 1 : m;
          spec.seed = seed;
          spec.validate();
          return generate_batch(spec, count);
        },
        py::arg("dist"), py::arg("problem"), py::arg("n"), py::arg("m") = 2,
        py::arg("seed") = 0, py::arg("count") = 1);

  m.def("save_instances", &save_instances);
  m.def("load_instances", &load_instances);

  m.def("dominates", &dominates);
  m.def("pareto_filter", &pareto_filter);

  m.def("linear_scalarize", [](const CostVector& c, const std::vector<double>& w) {
    return linear_scalarize(c, pref_from_py(w));
  });
  m.def("chebyshev_scalarize",
        [](const CostVector& c, const std::vector<double>& w,
           const std::vector<double>& z) {
          return chebyshev_scalarize(c, pref_from_py(w), IdealPoint{z});
        },
        py::arg("cost"), py::arg("weights"),
        py::arg("ideal") = std::vector<double>{0.0, 0.0});
  m.def("preference_grid", [](int m_, int count) {
    std::vector<std::vector<double>> out;
    for (const Preference& p : preference_grid(m_, count))
      out.push_back(p.weights);
    return out;
  });

  m.def("prune_linear",
        [](const MultiGraphInstance& inst, const std::vector<double>& w) {
          PrunedInstance pruned = prune_linear(inst, pref_from_py(w));
          return py::make_tuple(pruned.graph, pruned.kept_slot);
        });
  m.def("check_prop1",
        [](const MultiGraphInstance& inst, const std::vector<double>& w) {
          return check_prop1(inst, pref_from_py(w));
        });

  m.def("eval_tsp", [](const MultiGraphInstance& inst,
                       const std::vector<PyEdge>& steps) {
    return eval_tsp(inst, tour_from_py(steps));
  });
  m.def("eval_tsptw", [](const MultiGraphInstance& inst,
                         const std::vector<PyEdge>& steps) {
    return eval_tsptw(inst, tour_from_py(steps));
  });
  m.def("exhaustive_pareto",
        [](const MultiGraphInstance& inst, const std::string& problem) {
          return archive_to_py(exhaustive_pareto(inst, parse_problem(problem)));
        });

  m.def("nearest_neighbor",
        [](const MultiGraphInstance& inst, const std::vector<double>& w,
           int start) {
          return tour_to_py(nearest_neighbor(inst, pref_from_py(w), start));
        },
        py::arg("instance"), py::arg("weights"), py::arg("start") = 0);
  m.def("two_opt",
        [](const MultiGraphInstance& inst, const std::vector<PyEdge>& steps,
           const std::vector<double>& w, int max_moves) {
          return tour_to_py(
              two_opt_multigraph(inst, tour_from_py(steps), pref_from_py(w),
                                 max_moves));
        },
        py::arg("instance"), py::arg("tour"), py::arg("weights"),
        py::arg("max_moves") = 0);

  m.def("solve",
        [](const MultiGraphInstance& inst, const std::string& solver,
           const std::string& problem, int prefs, const std::string& checkpoint,
           std::uint64_t seed, int moea_pop, int moea_gens) {
          SolveOptions opts;
          opts.solver = solver;
          opts.pref_count = prefs;
          opts.checkpoint = checkpoint;
          opts.seed = seed;
          opts.moea.population = moea_pop;
          opts.moea.generations = moea_gens;
          ProblemKind kind =
              problem.empty() ? infer_problem(inst) : parse_problem(problem);
          return archive_to_py(solve_instance(inst, kind, opts, 0));
        },
        py::arg("instance"), py::arg("solver") = "nn", py::arg("problem") = "",
        py::arg("prefs") = 11, py::arg("checkpoint") = "", py::arg("seed") = 0,
        py::arg("moea_pop") = 16, py::arg("moea_gens") = 20);

  m.def("hypervolume", [](const std::vector<CostVector>& pts,
                          const CostVector& ref) {
    return hypervolume(pts, ref).value;
  });
  m.def("normalized_hv", [](const std::vector<CostVector>& pts,
                            const CostVector& ref) {
    return normalized_hv(pts, ref).value;
  });
  m.def("hv_gap", &hv_gap);
  m.def("hv_reference", &hv_reference, py::arg("problem"), py::arg("dist"),
        py::arg("n"), py::arg("m") = 2);
}
