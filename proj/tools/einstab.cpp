// einstab: decide the G-stability type of invariant Einstein metrics on
// compact homogeneous spaces from Lie-algebra structure constants.
//
// Exit codes: 0 success; 1 malformed input; 2 metric not Einstein (curvature
// data still printed); 3 other precondition failures; 4 catalog mismatch.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "einstab/einstab.hpp"

namespace {

using namespace einstab;
using nlohmann::json;

struct Options {
  std::string input;
  std::string method = "general";
  std::string format = "text";
  std::string output;
  double einstein_tol = 1e-8;
  double eig_tol = 1e-6;
  int jobs = 1;
};

void emit(const Options& opt, const std::string& text) {
  if (opt.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(opt.output);
    if (!out) throw SchemaError("", "cannot write " + opt.output);
    out << text;
  }
}

// input is either a lie_algebra.json path or a catalog id:
//   killing:<su|so|sp>:<n>   family:<su|so|sp>:<n>:<k>   jensen:<so6|so8|sp2>
ReductiveSpace resolve_space(const std::string& input, std::uint64_t seed) {
  if (std::filesystem::exists(input)) return io::build_space(io::load_space_file(input));
  std::vector<std::string> parts;
  std::stringstream ss(input);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto family_of = [](const std::string& s) {
    if (s == "su") return Family::su;
    if (s == "so") return Family::so;
    if (s == "sp") return Family::sp;
    throw SchemaError("", "unknown family " + s);
  };
  if (parts.size() == 3 && parts[0] == "killing") {
    StructureTensor g = build_classical(family_of(parts[1]), std::stoi(parts[2]));
    BilinearForm q = killing_form(g);
    q.matrix = -q.matrix;
    return reductive_split(g, {}, q);
  }
  if (parts.size() == 4 && parts[0] == "family") {
    FamilySpec spec = make_family_spec(family_of(parts[1]), std::stoi(parts[2]),
                                       std::stoi(parts[3]));
    return build_family_model(spec).space;
  }
  if (parts.size() == 2 && parts[0] == "jensen") {
    JensenEmbedding e;
    if (parts[1] == "so6") e = JensenEmbedding::so6_so3so3;
    else if (parts[1] == "so8") e = JensenEmbedding::so8_so4so4;
    else if (parts[1] == "sp2") e = JensenEmbedding::sp2_sp1sp1;
    else throw SchemaError("", "unknown jensen embedding " + parts[1]);
    JensenNumericResult probe = jensen_numeric(e, seed);
    return build_jensen_model(e, probe.measured.t_e);
  }
  throw SchemaError("", "no such file or catalog id: " + input);
}

struct Analysis {
  ReductiveSpace space;
  CurvaturePack pack;
  InvariantSubspace sym_k;
  IsotropyDecomposition dec;
  InvariantSubspace w;
  bool einstein = false;
  std::optional<StabilityReport> report;
};

Analysis run_pipeline(const Options& opt, std::uint64_t seed) {
  Analysis a{resolve_space(opt.input, seed)};
  a.pack = curvature_pack(a.space);
  a.sym_k = invariant_sym_space(a.space, seed);
  a.dec = isotropy_decomposition(a.space, a.sym_k, seed);
  InvariantSubspace trivial = trivial_variation_space(a.space, seed);
  a.w = tt_space(a.space, a.sym_k, trivial);
  a.einstein = a.pack.einstein_residual <= opt.einstein_tol;
  if (a.einstein) {
    LichnerowiczMatrix l = lich_general(a.space, a.sym_k);
    a.report = classify(restrict_to_w(l, a.w), a.pack.rho, opt.eig_tol);
  }
  return a;
}

json space_to_json(const Analysis& a) {
  return json{{"dim_g", a.space.algebra.dim()},
              {"dim_k", a.space.k_dim},
              {"dim_p", a.space.p_dim},
              {"naturally_reductive", a.space.naturally_reductive()},
              {"dim_W", a.w.dim()}};
}

std::string report_text(const StabilityReport& rep) {
  std::ostringstream out;
  out << "  classification   " << classification_name(rep.classification) << "\n";
  out << "  critical point   " << critical_point_name(rep.critical_point_type) << "\n";
  out << "  2*rho            " << rep.two_rho << "\n";
  if (rep.dim_w > 0) {
    out << "  lambda_p         " << rep.lambda_p << "\n";
    out << "  lambda_p_max     " << rep.lambda_p_max << "\n";
  }
  out << "  nullity          " << rep.nullity << "\n";
  out << "  coindex          " << rep.coindex << "\n";
  out << "  spectrum on W    ";
  for (const auto& c : rep.spectrum_on_w)
    out << c.value << " (x" << c.multiplicity << ")  ";
  out << "\n";
  return out.str();
}

int cmd_analyze(const Options& opt, std::uint64_t seed) {
  Analysis a = run_pipeline(opt, seed);

  json lich_section;
  const bool mult_free = a.dec.multiplicity_free;
  const bool nat_red = a.space.naturally_reductive();
  std::vector<std::pair<std::string, Eigen::MatrixXd>> mats;
  if (opt.method == "general") {
    mats.push_back({"general", lich_general(a.space, a.sym_k).matrix});
  } else if (opt.method == "nr") {
    mats.push_back({"naturally_reductive",
                    lich_naturally_reductive(a.space, a.sym_k).matrix});
  } else if (opt.method == "sc") {
    StructuralConstants sc = structural_constants(a.space, a.dec);
    mats.push_back({"structural_constants", lich_multiplicity_free(sc, a.dec).matrix});
  } else {  // all: every applicable route in a common basis
    if (mult_free && nat_red) {
      InvariantSubspace pbasis = projector_sym_space(a.dec, a.space.p_dim);
      mats.push_back({"general", lich_general(a.space, pbasis).matrix});
      mats.push_back({"naturally_reductive",
                      lich_naturally_reductive(a.space, pbasis).matrix});
      StructuralConstants sc = structural_constants(a.space, a.dec);
      mats.push_back({"structural_constants", lich_multiplicity_free(sc, a.dec).matrix});
    } else if (nat_red) {
      mats.push_back({"general", lich_general(a.space, a.sym_k).matrix});
      mats.push_back({"naturally_reductive",
                      lich_naturally_reductive(a.space, a.sym_k).matrix});
    } else {
      mats.push_back({"general", lich_general(a.space, a.sym_k).matrix});
    }
  }
  double max_diff = 0.0;
  for (std::size_t i = 0; i < mats.size(); ++i)
    for (std::size_t j = i + 1; j < mats.size(); ++j)
      max_diff = std::max(max_diff,
                          (mats[i].second - mats[j].second).cwiseAbs().maxCoeff());
  json methods = json::array();
  for (const auto& [name, m] : mats) methods.push_back(name);
  lich_section = json{{"methods", methods},
                      {"matrix", io::matrix_to_json(mats.front().second)},
                      {"basis_dim", mats.front().second.rows()}};
  if (mats.size() > 1) lich_section["max_pairwise_diff"] = max_diff;

  json doc{{"schema", 1},
           {"input", opt.input},
           {"space", space_to_json(a)},
           {"decomposition", io::decomposition_to_json(a.dec)},
           {"curvature", io::curvature_to_json(a.pack)},
           {"lichnerowicz", lich_section}};
  doc["stability"] = a.report ? io::report_to_json(*a.report) : json(nullptr);

  if (opt.format == "json") {
    emit(opt, doc.dump(2) + "\n");
  } else {
    std::ostringstream out;
    out << "space: dim g = " << a.space.algebra.dim() << ", dim k = " << a.space.k_dim
        << ", dim p = " << a.space.p_dim
        << (a.space.naturally_reductive() ? ", naturally reductive" : "") << "\n";
    out << "decomposition: r = " << a.dec.r() << ", dims = [";
    for (int i = 0; i < a.dec.r(); ++i) out << (i ? ", " : "") << a.dec.dims[i];
    out << "], multiplicity-free = " << (a.dec.multiplicity_free ? "yes" : "no") << "\n";
    out << "curvature: scal = " << a.pack.scalar << ", rho = " << a.pack.rho
        << ", einstein residual = " << a.pack.einstein_residual << "\n";
    if (mats.size() > 1) out << "lichnerowicz: max pairwise method diff = " << max_diff << "\n";
    if (a.report) {
      out << "stability:\n" << report_text(*a.report);
    } else {
      out << "stability: not computed (metric is not Einstein within tolerance "
          << opt.einstein_tol << ")\n";
    }
    emit(opt, out.str());
  }
  return a.report ? 0 : 2;
}

int cmd_curvature(const Options& opt, std::uint64_t seed) {
  ReductiveSpace space = resolve_space(opt.input, seed);
  CurvaturePack pack = curvature_pack(space);
  if (opt.format == "json") {
    json doc = io::curvature_to_json(pack);
    doc["schema"] = 1;
    emit(opt, doc.dump(2) + "\n");
  } else {
    std::ostringstream out;
    out << "scal = " << pack.scalar << "\nrho = " << pack.rho
        << "\neinstein residual = " << pack.einstein_residual << "\n";
    emit(opt, out.str());
  }
  return 0;
}

int cmd_lich(const Options& opt, std::uint64_t seed) {
  Options o = opt;
  if (o.method.empty()) o.method = "all";
  return cmd_analyze(o, seed);
}

int cmd_stability(const Options& opt, std::uint64_t seed) {
  Analysis a = run_pipeline(opt, seed);
  if (!a.report) {
    json doc{{"schema", 1},
             {"curvature", io::curvature_to_json(a.pack)},
             {"stability", nullptr}};
    emit(opt, opt.format == "json"
                  ? doc.dump(2) + "\n"
                  : "not Einstein (residual " + std::to_string(a.pack.einstein_residual) +
                        "); stability not computed\n");
    return 2;
  }
  if (opt.format == "json") {
    emit(opt, io::report_to_json(*a.report).dump(2) + "\n");
  } else {
    emit(opt, report_text(*a.report));
  }
  return 0;
}

int cmd_decompose(const Options& opt, std::uint64_t seed) {
  ReductiveSpace space = resolve_space(opt.input, seed);
  InvariantSubspace s = invariant_sym_space(space, seed);
  IsotropyDecomposition dec = isotropy_decomposition(space, s, seed);
  if (opt.format == "json") {
    json doc = io::decomposition_to_json(dec);
    doc["schema"] = 1;
    emit(opt, doc.dump(2) + "\n");
  } else {
    std::ostringstream out;
    out << "r = " << dec.r() << "\n";
    for (int k = 0; k < dec.r(); ++k)
      out << "  p_" << k + 1 << ": dim " << dec.dims[k] << ", b = " << dec.b_constants[k]
          << "\n";
    out << "multiplicity-free: " << (dec.multiplicity_free ? "yes" : "no") << "\n";
    emit(opt, out.str());
  }
  return 0;
}

struct FlowOptions {
  int steps = 100;
  double dt = 1e-2;
  std::string direction = "ascent";
  int perturb = -1;
  double eps = 1e-2;
};

int cmd_flow(const Options& opt, const FlowOptions& fopt, std::uint64_t seed) {
  ReductiveSpace space = resolve_space(opt.input, seed);
  Eigen::MatrixXd h0 = Eigen::MatrixXd::Identity(space.p_dim, space.p_dim);
  if (fopt.perturb >= 0) {
    InvariantSubspace s = invariant_sym_space(space, seed);
    InvariantSubspace w = tt_space(space, s, trivial_variation_space(space, seed));
    if (fopt.perturb >= w.dim())
      throw RangeError("--perturb index exceeds dim W = " + std::to_string(w.dim()));
    h0 += fopt.eps * w.ops[fopt.perturb];
  }
  auto traj = gradient_flow(space, h0, fopt.steps, fopt.dt,
                            fopt.direction == "descent" ? -1.0 : 1.0);
  std::ostringstream out;
  out << "step,scalar,residual\n";
  char buf[96];
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", k, traj[k].scalar,
                  traj[k].einstein_residual);
    out << buf;
  }
  emit(opt, out.str());
  return 0;
}

int cmd_catalog(const Options& opt, const std::string& which, std::uint64_t seed) {
  std::ostringstream text;
  json rows_json = json::array();
  bool all_pass = true;

  if (which == "table1") {
    auto rows = run_table1(seed);
    text << "killing metrics: first Casimir eigenvalue and stability type\n";
    for (const auto& row : rows) {
      all_pass = all_pass && row.pass();
      text << "  " << row.name() << ": lambda_tau = " << row.lambda_tau << " (ref "
           << row.lambda_tau_ref << ", " << (row.pass_lambda() ? "pass" : "FAIL") << "), "
           << classification_name(row.stab) << " (ref " << classification_name(row.stab_ref)
           << ", " << (row.pass_stab() ? "pass" : "FAIL") << ")";
      if (row.nullity_ref >= 0) text << ", nullity " << row.nullity << "/" << row.nullity_ref;
      if (row.coindex_lower_ref >= 0)
        text << ", coindex " << row.coindex << " >= " << row.coindex_lower_ref;
      text << "  [" << row.seconds << "s]\n";
      rows_json.push_back({{"name", row.name()},
                           {"lambda_tau", row.lambda_tau},
                           {"lambda_tau_ref", row.lambda_tau_ref},
                           {"stab", classification_name(row.stab)},
                           {"stab_ref", classification_name(row.stab_ref)},
                           {"nullity", row.nullity},
                           {"coindex", row.coindex},
                           {"seconds", row.seconds},
                           {"pass", row.pass()}});
    }
  } else if (which == "table2") {
    auto rows = run_table2(opt.jobs, seed);
    text << "standard block families: critical point type and coindex\n";
    for (const auto& row : rows) {
      all_pass = all_pass && row.pass();
      text << "  " << row.spec.name() << ": " << critical_point_name(row.crit) << " (ref "
           << critical_point_name(row.crit_ref) << "), coindex " << row.coindex << " (ref "
           << row.coindex_ref << "), eig err " << row.eig_err << ", "
           << (row.pass() ? "pass" : "FAIL");
      if (!row.error.empty()) text << " [" << row.error << "]";
      text << "  [" << row.seconds << "s]\n";
      rows_json.push_back({{"name", row.spec.name()},
                           {"critical_point", critical_point_name(row.crit)},
                           {"critical_point_ref", critical_point_name(row.crit_ref)},
                           {"coindex", row.coindex},
                           {"coindex_ref", row.coindex_ref},
                           {"eig_err", row.eig_err},
                           {"method_max_diff", row.method_max_diff},
                           {"johnson_residual", row.johnson_residual},
                           {"seconds", row.seconds},
                           {"error", row.error},
                           {"pass", row.pass()}});
    }
  } else if (which == "jensen") {
    auto rows = run_jensen(seed);
    text << "jensen deformations at the Einstein parameter t_E\n";
    for (const auto& row : rows) {
      all_pass = all_pass && row.pass();
      text << "  " << jensen_name(row.emb) << ": t_E = " << row.num.measured.t_e << " (ref "
           << row.ref.t_e << "), 2rho = " << row.num.measured.two_rho << " (ref "
           << row.ref.two_rho << "), coindex " << row.num.report.coindex << " (ref r = "
           << row.ref.r << "), [ijk] err " << row.num.ijk_max_err << ", "
           << (row.pass() ? "pass" : "FAIL");
      if (!row.error.empty()) text << " [" << row.error << "]";
      text << "  [" << row.seconds << "s]\n";
      rows_json.push_back({{"name", jensen_name(row.emb)},
                           {"t_e", row.num.measured.t_e},
                           {"t_e_ref", row.ref.t_e},
                           {"two_rho", row.num.measured.two_rho},
                           {"two_rho_ref", row.ref.two_rho},
                           {"spec_err", row.spec_err},
                           {"ijk_err", row.num.ijk_max_err},
                           {"coindex", row.num.report.coindex},
                           {"seconds", row.seconds},
                           {"error", row.error},
                           {"pass", row.pass()}});
    }
  } else {
    throw SchemaError("", "unknown catalog table " + which);
  }

  if (opt.format == "json") {
    json doc{{"schema", 1}, {"table", which}, {"rows", rows_json}, {"pass", all_pass}};
    emit(opt, doc.dump(2) + "\n");
  } else {
    text << (all_pass ? "all rows pass\n" : "some rows FAILED\n");
    emit(opt, text.str());
  }
  return all_pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"G-stability of invariant Einstein metrics on compact homogeneous spaces"};
  app.require_subcommand(1);

  Options opt;
  FlowOptions fopt;
  std::string catalog_table;

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    if (needs_input)
      cmd->add_option("input", opt.input, "lie_algebra.json path or catalog id")->required();
    cmd->add_option("--format", opt.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--output", opt.output, "write the report to a file");
    cmd->add_option("--einstein-tol", opt.einstein_tol, "Einstein residual tolerance");
    cmd->add_option("--eig-tol", opt.eig_tol, "eigenvalue clustering tolerance");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "full pipeline report");
  add_common(analyze, true);
  analyze->add_option("--method", opt.method, "general, nr, sc or all")
      ->check(CLI::IsMember({"general", "nr", "sc", "all"}));

  CLI::App* curvature = app.add_subcommand("curvature", "moment map, Ricci, scalar curvature");
  add_common(curvature, true);

  CLI::App* lich = app.add_subcommand("lich", "Lichnerowicz operator matrix");
  add_common(lich, true);
  opt.method = "all";
  lich->add_option("--method", opt.method, "general, nr, sc or all")
      ->check(CLI::IsMember({"general", "nr", "sc", "all"}));

  CLI::App* stability = app.add_subcommand("stability", "stability report only");
  add_common(stability, true);

  CLI::App* decompose = app.add_subcommand("decompose", "isotropy decomposition");
  add_common(decompose, true);

  CLI::App* flow = app.add_subcommand("flow", "projected-Euler scalar curvature flow (CSV)");
  add_common(flow, true);
  flow->add_option("--steps", fopt.steps, "number of Euler steps");
  flow->add_option("--dt", fopt.dt, "step size");
  flow->add_option("--direction", fopt.direction, "ascent or descent")
      ->check(CLI::IsMember({"ascent", "descent"}));
  flow->add_option("--perturb", fopt.perturb, "W-basis index to perturb the start along");
  flow->add_option("--eps", fopt.eps, "perturbation size");

  CLI::App* catalog = app.add_subcommand("catalog", "built-in reference comparisons");
  catalog->add_option("table", catalog_table, "table1, table2 or jensen")
      ->required()
      ->check(CLI::IsMember({"table1", "table2", "jensen"}));
  catalog->add_option("--jobs", opt.jobs, "worker threads for the sweep")
      ->check(CLI::PositiveNumber);
  catalog->add_option("--format", opt.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  catalog->add_option("--output", opt.output, "write the report to a file");

  CLI11_PARSE(app, argc, argv);
  const std::uint64_t seed = einstab::default_seed();

  try {
    if (analyze->parsed()) return cmd_analyze(opt, seed);
    if (curvature->parsed()) return cmd_curvature(opt, seed);
    if (lich->parsed()) return cmd_lich(opt, seed);
    if (stability->parsed()) return cmd_stability(opt, seed);
    if (decompose->parsed()) return cmd_decompose(opt, seed);
    if (flow->parsed()) return cmd_flow(opt, fopt, seed);
    if (catalog->parsed()) return cmd_catalog(opt, catalog_table, seed);
  } catch (const einstab::SchemaError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const einstab::NotEinstein& e) {
    std::cerr << "not Einstein: " << e.what() << "\n";
    return 2;
  } catch (const einstab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
