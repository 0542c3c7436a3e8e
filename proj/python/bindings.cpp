#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "marlab/analysis.hpp"
#include "marlab/error.hpp"
#include "marlab/model_file.hpp"
#include "marlab/report.hpp"
#include "marlab/search.hpp"

namespace py = pybind11;
using namespace marlab;

namespace {

py::object fraction(const Rational& r) {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls(r.str());
}

py::object fraction_or_none(const std::optional<Rational>& r) { return r ? fraction(*r) : py::none(); }

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

const Measure& member(const Model& m, std::size_t theta) {
  if (theta >= m.family.size()) throw py::index_error("theta index out of range");
  return m.family.measures[theta];
}

Pattern pattern_from(int n, const std::vector<int>& indices) { return Pattern::from_indices(n, indices); }

std::vector<std::vector<std::string>> atoms_of(const Partition& p, const SampleSpace& space) {
  std::vector<std::vector<std::string>> out;
  for (const auto& a : atom_entries(p, space)) out.push_back(a.outcomes);
  return out;
}

}  // namespace

PYBIND11_MODULE(marlab, m) {
  m.doc() = "Exact missing-at-random and ignorability checks on finite probability spaces";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
  py::register_exception<DominationError>(m, "DominationError", PyExc_ValueError);

  m.def("is_leq", [](int n, const std::vector<int>& i, const std::vector<int>& mm) {
    return is_leq(pattern_from(n, i), pattern_from(n, mm));
  }, py::arg("n"), py::arg("i"), py::arg("m"));
  m.def("incomparable", [](int n, const std::vector<int>& i, const std::vector<int>& mm) {
    return incomparable(pattern_from(n, i), pattern_from(n, mm));
  }, py::arg("n"), py::arg("i"), py::arg("m"));
  m.def("subsets_leq", [](int n, const std::vector<int>& mm) {
    std::vector<std::vector<int>> out;
    for (const auto& p : subsets_leq(pattern_from(n, mm))) out.push_back(p.indices());
    return out;
  }, py::arg("n"), py::arg("m"));

  py::class_<Model>(m, "Model")
      .def_readonly("name", &Model::name)
      .def_property_readonly("n", [](const Model& self) { return self.space.n(); })
      .def_property_readonly("mode", [](const Model& self) { return to_string(self.space.mode()); })
      .def_property_readonly("thetas", [](const Model& self) { return self.family.thetas; })
      .def_property_readonly("patterns", [](const Model& self) {
        std::vector<std::vector<int>> out;
        for (const auto& p : self.space.patterns()) out.push_back(p.indices());
        return out;
      })
      .def_property_readonly("outcomes", [](const Model& self) {
        std::vector<std::string> out;
        for (std::size_t w = 0; w < self.space.size(); ++w) out.push_back(self.space.describe(w));
        return out;
      })
      .def("masses", [](const Model& self, std::size_t theta) {
        py::list out;
        for (const auto& r : member(self, theta).masses()) out.append(fraction(r));
        return out;
      }, py::arg("theta") = 0)
      .def("to_json", [](const Model& self) { return model_to_json(self).dump(2); })
      .def("__repr__", [](const Model& self) {
        return "<marlab.Model " + (self.name.empty() ? std::string("(unnamed)") : self.name) + " n=" +
               std::to_string(self.space.n()) + " " + to_string(self.space.mode()) + ">";
      });

  m.def("fixture", [](const std::string& name) { return builtin_fixture(name); }, py::arg("name"));
  m.def("load_model", [](const std::string& path) { return load_model(path); }, py::arg("path"));
  m.def("model_from_json", [](const std::string& text) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(e.what());
    }
    return model_from_json(doc);
  }, py::arg("text"));

  m.def("analyze", [](const Model& model) { return to_python(nlohmann::json(analyze(model))); }, py::arg("model"),
        "Full report as a dict (report schema 1).");

  m.def("observed_atoms", [](const Model& model) {
    return atoms_of(observed_data_algebra(model.space, build_filtration(model.space)), model.space);
  }, py::arg("model"));
  m.def("naive_atoms", [](const Model& model) { return atoms_of(naive_observed_algebra(model.space), model.space); },
        py::arg("model"));

  m.def("lambda_process", [](const Model& model, std::size_t theta) {
    const LambdaProcess lp = lambda_process(member(model, theta), model.space);
    py::dict out;
    for (std::size_t j = 0; j < model.space.pattern_count(); ++j) {
      py::list row;
      for (std::size_t y = 0; y < model.space.y_count(); ++y) row.append(fraction_or_none(lp.at(j, y)));
      out[py::str(model.space.patterns()[j].str())] = row;
    }
    return out;
  }, py::arg("model"), py::arg("theta") = 0, "λ_m per y-vector, keyed by pattern text.");

  m.def("check_mcar", [](const Model& model, std::size_t theta) { return check_mcar(member(model, theta), model.space); },
        py::arg("model"), py::arg("theta") = 0);
  m.def("check_everywhere_mar", [](const Model& model, std::size_t theta) {
    return check_everywhere_mar(member(model, theta), model.space, build_filtration(model.space)).holds;
  }, py::arg("model"), py::arg("theta") = 0);
  m.def("realised_set", [](const Model& model, std::size_t theta) {
    return realised_mar_set(member(model, theta), model.space, build_filtration(model.space)).atoms;
  }, py::arg("model"), py::arg("theta") = 0);
  m.def("verify_theorem", [](const Model& model, std::size_t theta) {
    return to_string(verify_theorem(member(model, theta), model.space, build_filtration(model.space), model.q_m));
  }, py::arg("model"), py::arg("theta") = 0);
  m.def("equivalence_mode", [](const Model& model) {
    return to_string(check_equivalence(model.family, model.space, model.q_m).mode);
  }, py::arg("model"));

  m.def("generate_model", [](std::uint64_t seed, std::vector<int> range_sizes, const std::string& mode,
                             const std::string& model_class, int denominator_bound, int theta_count) {
    GeneratorSpec spec;
    spec.seed = seed;
    spec.n = static_cast<int>(range_sizes.size());
    spec.range_sizes = std::move(range_sizes);
    spec.mode = parse_pattern_mode(mode);
    spec.model_class = parse_model_class(model_class);
    spec.denominator_bound = denominator_bound;
    spec.theta_count = theta_count;
    return generate_model(spec);
  }, py::arg("seed"), py::arg("range_sizes"), py::arg("mode") = "general", py::arg("model_class") = "unrestricted",
     py::arg("denominator_bound") = 12, py::arg("theta_count") = 1);

  m.def("find_example", [](const std::string& predicate, std::uint64_t budget, std::uint64_t seed,
                           std::vector<int> range_sizes, const std::string& mode,
                           std::optional<std::string> model_class) -> std::optional<Model> {
    const Predicate pred = parse_predicate(predicate);
    GeneratorSpec spec;
    spec.seed = seed;
    spec.n = static_cast<int>(range_sizes.size());
    spec.range_sizes = std::move(range_sizes);
    spec.mode = parse_pattern_mode(mode);
    spec.model_class = model_class ? parse_model_class(*model_class) : default_class_for(pred);
    auto found = find_example(pred, budget, spec);
    if (!found) return std::nullopt;
    return std::move(found->model);
  }, py::arg("predicate"), py::arg("budget"), py::arg("seed") = 0, py::arg("range_sizes") = std::vector<int>{2},
     py::arg("mode") = "general", py::arg("model_class") = py::none());
}
