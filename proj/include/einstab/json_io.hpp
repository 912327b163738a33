#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "einstab/catalog.hpp"
#include "einstab/curvature.hpp"
#include "einstab/errors.hpp"
#include "einstab/isotropy.hpp"
#include "einstab/stability.hpp"

namespace einstab::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// lie_algebra.json ingestion:
//   { "dim": int, "brackets": [[i, j, k, value], ...],
//     "k_indices": [int], "Q": "killing" | [[row], ...] }
// Indices are 0-based. k_indices defaults to [], Q defaults to "killing".
// ---------------------------------------------------------------------------

struct SpaceInput {
  StructureTensor algebra;
  std::vector<int> k_indices;
  bool q_is_killing = true;
  Eigen::MatrixXd q_matrix;  // used when !q_is_killing
};

namespace detail {

inline int require_int(const json& j, const std::string& pointer) {
  if (!j.is_number_integer()) throw SchemaError(pointer, "expected an integer");
  return j.get<int>();
}

inline double require_number(const json& j, const std::string& pointer) {
  if (!j.is_number()) throw SchemaError(pointer, "expected a number");
  return j.get<double>();
}

}  // namespace detail

inline SpaceInput parse_space_json(const json& j) {
  if (!j.is_object()) throw SchemaError("", "expected a JSON object");
  if (!j.contains("dim")) throw SchemaError("/dim", "missing required field");
  const int dim = detail::require_int(j.at("dim"), "/dim");
  if (dim <= 0) throw SchemaError("/dim", "dimension must be positive");

  SpaceInput input;
  std::vector<BracketEntry> entries;
  if (j.contains("brackets")) {
    const json& br = j.at("brackets");
    if (!br.is_array()) throw SchemaError("/brackets", "expected an array");
    for (std::size_t t = 0; t < br.size(); ++t) {
      const std::string ptr = "/brackets/" + std::to_string(t);
      const json& e = br[t];
      if (!e.is_array() || e.size() != 4)
        throw SchemaError(ptr, "expected [i, j, k, value]");
      BracketEntry entry;
      entry.i = detail::require_int(e[0], ptr + "/0");
      entry.j = detail::require_int(e[1], ptr + "/1");
      entry.k = detail::require_int(e[2], ptr + "/2");
      entry.v = detail::require_number(e[3], ptr + "/3");
      if (entry.i < 0 || entry.i >= dim) throw SchemaError(ptr + "/0", "index out of range");
      if (entry.j < 0 || entry.j >= dim) throw SchemaError(ptr + "/1", "index out of range");
      if (entry.k < 0 || entry.k >= dim) throw SchemaError(ptr + "/2", "index out of range");
      entries.push_back(entry);
    }
  }
  try {
    input.algebra = StructureTensor::from_entries(dim, entries);
  } catch (const Error& e) {
    throw SchemaError("/brackets", e.what());
  }
  const double jac = input.algebra.jacobi_residual();
  if (jac > 1e-10)
    throw SchemaError("/brackets",
                      "Jacobi identity violated (residual " + std::to_string(jac) + ")");

  if (j.contains("k_indices")) {
    const json& ks = j.at("k_indices");
    if (!ks.is_array()) throw SchemaError("/k_indices", "expected an array");
    std::vector<char> seen(dim, 0);
    for (std::size_t t = 0; t < ks.size(); ++t) {
      const std::string ptr = "/k_indices/" + std::to_string(t);
      const int a = detail::require_int(ks[t], ptr);
      if (a < 0 || a >= dim) throw SchemaError(ptr, "index out of range");
      if (seen[a]) throw SchemaError(ptr, "duplicate index");
      seen[a] = 1;
      input.k_indices.push_back(a);
    }
  }

  if (j.contains("Q")) {
    const json& q = j.at("Q");
    if (q.is_string()) {
      if (q.get<std::string>() != "killing")
        throw SchemaError("/Q", "expected \"killing\" or a matrix");
      input.q_is_killing = true;
    } else if (q.is_array()) {
      if (static_cast<int>(q.size()) != dim) throw SchemaError("/Q", "expected dim rows");
      input.q_matrix.resize(dim, dim);
      for (int r = 0; r < dim; ++r) {
        const std::string rptr = "/Q/" + std::to_string(r);
        if (!q[r].is_array() || static_cast<int>(q[r].size()) != dim)
          throw SchemaError(rptr, "expected dim columns");
        for (int c = 0; c < dim; ++c)
          input.q_matrix(r, c) = detail::require_number(q[r][c], rptr + "/" + std::to_string(c));
      }
      input.q_is_killing = false;
    } else {
      throw SchemaError("/Q", "expected \"killing\" or a matrix");
    }
  }
  return input;
}

inline SpaceInput load_space_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("", "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("JSON parse error: ") + e.what());
  }
  return parse_space_json(j);
}

inline ReductiveSpace build_space(const SpaceInput& input) {
  BilinearForm q;
  if (input.q_is_killing) {
    q = killing_form(input.algebra);
    q.matrix = -q.matrix;  // "killing" selects the metric induced by -Kil
  } else {
    q = {input.q_matrix, BilinearForm::Label::custom_q};
  }
  return reductive_split(input.algebra, input.k_indices, q);
}

// ---------------------------------------------------------------------------
// Report serialization, schema 1. Doubles are emitted shortest-round-trip, so
// parse(emit(report)) == report exactly.
// ---------------------------------------------------------------------------

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

inline json report_to_json(const StabilityReport& rep) {
  json spectrum = json::array();
  for (const auto& c : rep.spectrum_on_w) spectrum.push_back({c.value, c.multiplicity});
  json j{{"schema", 1},
         {"classification", classification_name(rep.classification)},
         {"critical_point", critical_point_name(rep.critical_point_type)},
         {"rho", rep.rho},
         {"two_rho", rep.two_rho},
         {"nullity", rep.nullity},
         {"coindex", rep.coindex},
         {"dim_W", rep.dim_w},
         {"spectrum_on_W", std::move(spectrum)}};
  if (rep.dim_w > 0) {
    j["lambda_p"] = rep.lambda_p;
    j["lambda_p_max"] = rep.lambda_p_max;
  } else {
    j["lambda_p"] = nullptr;
    j["lambda_p_max"] = nullptr;
  }
  return j;
}

inline StabilityReport report_from_json(const json& j) {
  StabilityReport rep;
  rep.rho = j.at("rho").get<double>();
  rep.two_rho = j.at("two_rho").get<double>();
  rep.nullity = j.at("nullity").get<int>();
  rep.coindex = j.at("coindex").get<int>();
  rep.dim_w = j.at("dim_W").get<int>();
  for (const auto& c : j.at("spectrum_on_W"))
    rep.spectrum_on_w.push_back({c[0].get<double>(), c[1].get<int>()});
  if (!j.at("lambda_p").is_null()) {
    rep.lambda_p = j.at("lambda_p").get<double>();
    rep.lambda_p_max = j.at("lambda_p_max").get<double>();
  }
  const std::string cls = j.at("classification").get<std::string>();
  for (Classification c : {Classification::g_stable, Classification::g_unstable,
                           Classification::g_neutrally_stable,
                           Classification::g_strongly_unstable, Classification::g_degenerate})
    if (cls == classification_name(c)) rep.classification = c;
  const std::string crit = j.at("critical_point").get<std::string>();
  for (CriticalPointType c : {CriticalPointType::local_max, CriticalPointType::local_min,
                              CriticalPointType::saddle, CriticalPointType::degenerate})
    if (crit == critical_point_name(c)) rep.critical_point_type = c;
  return rep;
}

inline json curvature_to_json(const CurvaturePack& pack) {
  return json{{"moment", matrix_to_json(pack.moment)},
              {"killing_op", matrix_to_json(pack.killing_op)},
              {"ricci", matrix_to_json(pack.ricci)},
              {"scalar", pack.scalar},
              {"rho", pack.rho},
              {"einstein_residual", pack.einstein_residual}};
}

inline json decomposition_to_json(const IsotropyDecomposition& dec) {
  return json{{"r", dec.r()},
              {"dims", dec.dims},
              {"b", dec.b_constants},
              {"multiplicity_free", dec.multiplicity_free}};
}

}  // namespace einstab::io
