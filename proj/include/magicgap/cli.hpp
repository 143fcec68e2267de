#pragma once

#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "encodings.hpp"
#include "io.hpp"
#include "optimize.hpp"

namespace magicgap {

namespace detail {

inline Flavor parse_flavor(const std::string& s) {
  if (s == "odd") return Flavor::OddQudit;
  if (s == "even") return Flavor::EvenQudit;
  if (s == "multiqubit") return Flavor::Multiqubit;
  throw std::invalid_argument("unknown flavor (expected odd|even|multiqubit): " + s);
}

inline Flavor parity_flavor(long long dim) {
  return dim % 2 == 1 ? Flavor::OddQudit : Flavor::EvenQudit;
}

inline void flatten_json(const json& j, const std::string& prefix,
                         std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items())
      flatten_json(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      flatten_json(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
  }
}

inline void emit(const json& j, const std::string& format, std::ostream& out) {
  if (format == "csv") {
    std::vector<std::pair<std::string, std::string>> rows;
    flatten_json(j, "", rows);
    out << "key,value\n";
    for (const auto& [k, v] : rows) out << k << "," << v << "\n";
  } else {
    out << j.dump(2) << "\n";
  }
}

inline PureState named_state(const HilbertSpec& spec, const std::string& name) {
  const long long D = spec.dim();
  if (name == "zero") {
    Vec v = Vec::Zero(D);
    v(0) = 1;
    return PureState(v);
  }
  if (name == "plus") {
    Vec v = Vec::Constant(D, cx(1.0 / std::sqrt(double(D)), 0));
    return PureState(v);
  }
  if (name == "t") {
    if (spec.d != 2 || spec.n != 1)
      throw std::invalid_argument("state \"t\" is defined for d=2, n=1");
    Vec v(2);
    v << cx(1, 0), std::polar(1.0, kPi / 4.0);
    return PureState(v / std::sqrt(2.0));
  }
  throw std::invalid_argument("unknown state (expected t|zero|plus): " + name);
}

inline PureState load_state(const std::string& path) {
  json j = read_json_file(path);
  auto [d, n] = dims_from_json(j);
  HilbertSpec spec(d, n);
  if (!j.contains("amplitudes")) throw IoError("missing field \"amplitudes\"");
  const auto& a = j["amplitudes"];
  if (!a.is_array() || (long long)a.size() != spec.dim())
    throw IoError("amplitude count != d^n");
  Vec v(spec.dim());
  for (long long i = 0; i < spec.dim(); ++i) v(i) = complex_from_json(a[i]);
  return PureState(v);
}

inline BuiltinCode resolve_code(const std::string& builtin, const std::string& file) {
  if (!builtin.empty() && !file.empty())
    throw std::invalid_argument("give either --builtin or --file, not both");
  if (!builtin.empty()) {
    auto codes = builtin_codes();
    auto it = codes.find(builtin);
    if (it == codes.end()) throw std::invalid_argument("unknown builtin code: " + builtin);
    return it->second;
  }
  if (!file.empty()) return load_isotropic(file);
  throw std::invalid_argument("need --builtin or --file");
}

inline const char* gap_class_name(GapClass c) {
  switch (c) {
    case GapClass::Zero: return "zero";
    case GapClass::Negative: return "non-positive";
    case GapClass::Positive: return "non-negative";
    default: return "unknown";
  }
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stabilizer-entropy subspace analysis"};
  app.require_subcommand(1);

  std::string format = "json";
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = all physical cores; computation is per-call sequential
  app.add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", seed);
  app.add_option("--threads", threads);

  // se state
  auto* se = app.add_subcommand("se", "single-state stabilizer entropies");
  auto* se_state = se->add_subcommand("state");
  int se_d = 2, se_n = 1;
  double se_alpha = 2.0;
  std::string se_name, se_file;
  se_state->add_option("--d", se_d);
  se_state->add_option("--n", se_n);
  se_state->add_option("--state", se_name);
  se_state->add_option("--file", se_file);
  se_state->add_option("--alpha", se_alpha);

  // ase intrinsic / extrinsic / gap
  auto* ase = app.add_subcommand("ase", "averaged stabilizer entropies");
  auto* ase_in = ase->add_subcommand("intrinsic");
  long long ain_ds = 2;
  std::string ain_flavor = "even";
  ase_in->add_option("--d-small", ain_ds)->required();
  ase_in->add_option("--flavor", ain_flavor);
  auto* ase_ex = ase->add_subcommand("extrinsic");
  std::string aex_file;
  ase_ex->add_option("--file", aex_file)->required();
  auto* ase_gp = ase->add_subcommand("gap");
  std::string agp_file, agp_flavor;
  ase_gp->add_option("--file", agp_file)->required();
  ase_gp->add_option("--flavor", agp_flavor)->required();

  // gap code
  auto* gap = app.add_subcommand("gap", "ASE gap of a stabilizer codespace");
  auto* gap_code = gap->add_subcommand("code");
  std::string gc_builtin, gc_file, gc_flavor;
  gap_code->add_option("--builtin", gc_builtin);
  gap_code->add_option("--file", gc_file);
  gap_code->add_option("--small-flavor", gc_flavor)->required();

  // code analysis
  auto* code = app.add_subcommand("code", "isotropic-set analysis");
  std::string co_builtin, co_file, co_flavor;
  code->add_option("--builtin", co_builtin);
  code->add_option("--file", co_file);
  code->add_option("--small-flavor", co_flavor);

  // optimize extremize / sweep
  auto* opt = app.add_subcommand("optimize", "extremize the subspace average");
  auto* opt_ex = opt->add_subcommand("extremize");
  int oe_d = 2, oe_n = 1, oe_ds = 1, oe_restarts = 20;
  bool oe_max = false;
  opt_ex->add_option("--d", oe_d)->required();
  opt_ex->add_option("--n", oe_n);
  opt_ex->add_option("--d-small", oe_ds)->required();
  opt_ex->add_option("--restarts", oe_restarts);
  opt_ex->add_flag("--maximize", oe_max);
  auto* opt_sw = opt->add_subcommand("sweep");
  int os_d = 2, os_n = 1, os_from = 1, os_to = 1, os_restarts = 6;
  opt_sw->add_option("--d", os_d)->required();
  opt_sw->add_option("--n", os_n);
  opt_sw->add_option("--from", os_from)->required();
  opt_sw->add_option("--to", os_to)->required();
  opt_sw->add_option("--restarts", os_restarts);

  // mc estimate / curve / ensemble
  auto* mc = app.add_subcommand("mc", "Monte Carlo estimation");
  auto* mc_est = mc->add_subcommand("estimate");
  std::string me_file, me_embedding;
  long long me_samples = 4000;
  bool me_preset = false;
  mc_est->add_option("--file", me_file);
  mc_est->add_option("--embedding", me_embedding);
  mc_est->add_option("--samples", me_samples);
  mc_est->add_flag("--preset", me_preset, "20 runs of 1000 samples");
  auto* mc_cv = mc->add_subcommand("curve");
  std::string mcv_file, mcv_grid = "100,400,1600";
  int mcv_reps = 15;
  mc_cv->add_option("--file", mcv_file)->required();
  mc_cv->add_option("--grid", mcv_grid);
  mc_cv->add_option("--reps", mcv_reps);
  auto* mc_en = mc->add_subcommand("ensemble");
  int men_d = 2, men_n = 1, men_ds = 1, men_subspaces = 100;
  long long men_samples = 400;
  mc_en->add_option("--d", men_d)->required();
  mc_en->add_option("--n", men_n);
  mc_en->add_option("--d-small", men_ds)->required();
  mc_en->add_option("--subspaces", men_subspaces);
  mc_en->add_option("--samples", men_samples);

  // complement per-state / fixed
  auto* comp = app.add_subcommand("complement", "support on the complement");
  auto* comp_ps = comp->add_subcommand("per-state");
  std::string cps_embedding;
  int cps_restarts = 4;
  comp_ps->add_option("--embedding", cps_embedding)->required();
  comp_ps->add_option("--restarts", cps_restarts);
  auto* comp_fx = comp->add_subcommand("fixed");
  std::string cfx_embedding;
  int cfx_restarts = 4;
  long long cfx_samples = 400;
  comp_fx->add_option("--embedding", cfx_embedding)->required();
  comp_fx->add_option("--restarts", cfx_restarts);
  comp_fx->add_option("--samples", cfx_samples);

  // examples
  auto* ex = app.add_subcommand("examples", "worked examples");
  auto* ex_gss = ex->add_subcommand("gss");
  int gss_host = 2;
  ex_gss->add_option("--host-dim", gss_host, "2 = three qubits, 8 = one qudit");
  auto* ex_sym = ex->add_subcommand("sym-qubits");
  int sym_two_j = 2;
  ex_sym->add_option("--two-j", sym_two_j);
  auto* ex_maj = ex->add_subcommand("majorana");
  std::string maj_amps;
  ex_maj->add_option("--amps", maj_amps, "JSON array of [re,im] pairs, m = j..-j")->required();
  auto* ex_poly = ex->add_subcommand("polyhedron");
  int poly_faces = 4;
  double poly_spin = 0.5;
  bool poly_exact = false, poly_mc = false;
  ex_poly->add_option("--faces", poly_faces)->required();
  ex_poly->add_option("--spin", poly_spin)->required();
  ex_poly->add_flag("--exact", poly_exact);
  ex_poly->add_flag("--mc", poly_mc);
  auto* ex_gauge = ex->add_subcommand("gauge");
  int gauge_d = 2, gauge_n = 2;
  ex_gauge->add_option("--d", gauge_d)->required();
  ex_gauge->add_option("--n", gauge_n)->required();
  auto* ex_422 = ex->add_subcommand("422");

  std::vector<const char*> argv;
  argv.push_back("magicgap");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "argument error: " << e.what() << "\n";
    return 1;
  }

  try {
    json result;
    result["seed"] = seed;

    if (se_state->parsed()) {
      HilbertSpec spec(se_d, se_n);
      PureState psi = se_file.empty() ? detail::named_state(spec, se_name)
                                      : detail::load_state(se_file);
      if (!se_file.empty() && psi.amplitudes.size() != spec.dim())
        throw std::invalid_argument("state dimension does not match --d/--n");
      result["command"] = "se state";
      result["params"] = {{"d", se_d}, {"n", se_n}, {"alpha", se_alpha}};
      double M = linear_se(spec, psi);
      result["M"] = annotated(M);
      result["renyi"] = annotated(renyi_se(spec, psi, se_alpha));
      result["st_norm"] = annotated(st_norm(spec, psi));
    } else if (ase_in->parsed()) {
      Flavor f = detail::parse_flavor(ain_flavor);
      result["command"] = "ase intrinsic";
      result["params"] = {{"d_small", ain_ds}, {"flavor", ain_flavor}};
      result["intrinsic"] = annotated(intrinsic_ase(ain_ds, f));
    } else if (ase_ex->parsed()) {
      auto p = load_projector(aex_file);
      result["command"] = "ase extrinsic";
      result["params"] = {{"file", aex_file}, {"d", p.big.d}, {"n", p.big.n}, {"rank", p.rank}};
      result["extrinsic"] = annotated(extrinsic_ase(p));
    } else if (ase_gp->parsed()) {
      auto p = load_projector(agp_file);
      Flavor f = detail::parse_flavor(agp_flavor);
      result["command"] = "ase gap";
      result["params"] = {{"file", agp_file}, {"flavor", agp_flavor}, {"rank", p.rank}};
      result["extrinsic"] = annotated(extrinsic_ase(p));
      result["intrinsic"] = annotated(intrinsic_ase(p.rank, f));
      result["gap"] = annotated(ase_gap(p, f));
    } else if (gap_code->parsed()) {
      auto code_obj = detail::resolve_code(gc_builtin, gc_file);
      Flavor f = detail::parse_flavor(gc_flavor);
      result["command"] = "gap code";
      result["params"] = {{"builtin", gc_builtin}, {"file", gc_file}, {"small_flavor", gc_flavor}};
      double g;
      std::string method;
      if (code_obj.f.trivial()) {
        g = code_gap_closed_form(code_obj.set, f);
        method = "closed-form";
      } else {
        g = ase_gap(codespace_projector(code_obj.set, code_obj.f), f);
        method = "exact (nontrivial phase assignment)";
      }
      auto cls = classify_gap(code_obj.set, f);
      result["gap"] = annotated(g);
      result["method"] = method;
      result["classification"] = detail::gap_class_name(cls.cls);
      result["reason"] = cls.reason;
    } else if (code->parsed() && !gap_code->parsed()) {
      auto code_obj = detail::resolve_code(co_builtin, co_file);
      const auto& S = code_obj.set;
      result["command"] = "code";
      result["params"] = {{"builtin", co_builtin}, {"file", co_file}, {"d", S.spec.d},
                          {"n", S.spec.n}};
      result["set_size"] = (long long)S.elements.size();
      result["code_dim"] = S.code_dim();
      auto proj = codespace_projector(S, code_obj.f);
      result["rank"] = proj.rank;
      result["extrinsic"] = annotated(extrinsic_ase(proj));
      if (index_count(S.spec) <= 1000000LL) result["a_set_size"] = (long long)a_set(S).size();
      Flavor f = co_flavor.empty() ? detail::parity_flavor(S.code_dim())
                                   : detail::parse_flavor(co_flavor);
      auto cls = classify_gap(S, f);
      result["classification"] = detail::gap_class_name(cls.cls);
      result["reason"] = cls.reason;
      if (code_obj.f.trivial()) result["gap"] = annotated(code_gap_closed_form(S, f));
    } else if (opt_ex->parsed()) {
      HilbertSpec big(oe_d, oe_n);
      OptimizerConfig cfg;
      cfg.restarts = oe_restarts;
      cfg.seed = seed;
      cfg.maximize = oe_max;
      auto res = extremize_ase(big, oe_ds, cfg);
      result["command"] = "optimize extremize";
      result["params"] = {{"d", oe_d}, {"n", oe_n}, {"d_small", oe_ds},
                          {"restarts", oe_restarts}, {"maximize", oe_max}};
      result["value"] = annotated(res.value);
      result["intrinsic_small"] = annotated(intrinsic_ase(oe_ds, detail::parity_flavor(oe_ds)));
      result["intrinsic_big"] = annotated(intrinsic_ase(big));
      result["restart_values"] = res.restart_values;
    } else if (opt_sw->parsed()) {
      HilbertSpec big(os_d, os_n);
      OptimizerConfig cfg;
      cfg.restarts = os_restarts;
      cfg.seed = seed;
      auto rows = extremal_sweep(big, os_from, os_to, cfg);
      if (format == "csv") {
        write_sweep_csv(out, rows);
        return 0;
      }
      result["command"] = "optimize sweep";
      result["params"] = {{"d", os_d}, {"n", os_n}, {"from", os_from}, {"to", os_to},
                          {"restarts", os_restarts}};
      json table = json::array();
      for (const auto& r : rows)
        table.push_back({{"d_S", r.d_S}, {"min_ase", r.min_ase}, {"max_ase", r.max_ase},
                         {"intrinsic_small", r.intrinsic_small},
                         {"intrinsic_big", r.intrinsic_big}});
      result["table"] = table;
    } else if (mc_est->parsed()) {
      Embedding e = me_embedding.empty() ? load_projector(me_file).basis()
                                         : load_embedding(me_embedding);
      McResult r = me_preset ? mc_ase_preset(e, seed) : mc_ase(e, me_samples, seed);
      result["command"] = "mc estimate";
      result["params"] = {{"file", me_file}, {"embedding", me_embedding},
                          {"preset", me_preset}};
      result["estimate"] = mc_result_to_json(r);
    } else if (mc_cv->parsed()) {
      auto p = load_projector(mcv_file);
      std::vector<long long> grid;
      std::stringstream ss(mcv_grid);
      std::string tok;
      while (std::getline(ss, tok, ',')) grid.push_back(std::stoll(tok));
      auto curve = mc_convergence_curve(p, grid, mcv_reps, seed);
      result["command"] = "mc curve";
      result["params"] = {{"file", mcv_file}, {"grid", mcv_grid}, {"reps", mcv_reps}};
      json table = json::array();
      for (auto [s, e2] : curve) table.push_back({{"samples", s}, {"squared_error", e2}});
      result["curve"] = table;
    } else if (mc_en->parsed()) {
      HilbertSpec big(men_d, men_n);
      auto st = subspace_ensemble_stats(big, men_ds, men_subspaces, men_samples, seed);
      result["command"] = "mc ensemble";
      result["params"] = {{"d", men_d}, {"n", men_n}, {"d_small", men_ds},
                          {"subspaces", men_subspaces}, {"samples", men_samples}};
      result["mean_ase"] = st.mean_ase;
      result["std_ase"] = st.std_ase;
      result["intrinsic_big"] = annotated(intrinsic_ase(big));
    } else if (comp_ps->parsed()) {
      Embedding e = load_embedding(cps_embedding);
      CounterRng rng(seed, 0x517A7EULL);
      PureState psi = haar_state(e.small_dim, rng);
      double plain = linear_se(e.big, PureState(e.columns * psi.amplitudes));
      auto best = optimal_complement_per_state(e, psi, cps_restarts, seed);
      result["command"] = "complement per-state";
      result["params"] = {{"embedding", cps_embedding}, {"restarts", cps_restarts}};
      result["no_complement_se"] = annotated(plain);
      result["optimal_se"] = annotated(best.value);
    } else if (comp_fx->parsed()) {
      Embedding e = load_embedding(cfx_embedding);
      auto res = optimal_fixed_complement(e, cfx_samples, cfx_restarts, seed);
      result["command"] = "complement fixed";
      result["params"] = {{"embedding", cfx_embedding}, {"restarts", cfx_restarts},
                          {"samples", cfx_samples}};
      result["average_with_complement"] = mc_result_to_json(res.average);
      result["extrinsic_no_complement"] =
          annotated(extrinsic_ase(projector_from_embedding(e)));
    } else if (ex_gss->parsed()) {
      SubspaceProjector base = gss_projector();
      SubspaceProjector p = gss_host == 8
                                ? SubspaceProjector(HilbertSpec(8, 1), base.matrix)
                                : base;
      if (gss_host != 2 && gss_host != 8)
        throw std::invalid_argument("--host-dim must be 2 (three qubits) or 8 (one qudit)");
      result["command"] = "examples gss";
      result["params"] = {{"host_dim", gss_host}};
      result["extrinsic"] = annotated(extrinsic_ase(p));
      result["intrinsic"] = annotated(intrinsic_ase(2, Flavor::Multiqubit));
      result["gap"] = annotated(ase_gap(p, Flavor::Multiqubit));
    } else if (ex_sym->parsed()) {
      auto e = symmetric_qubit_embedding(sym_two_j);
      auto p = projector_from_embedding(e);
      Flavor f = detail::parity_flavor(sym_two_j + 1);
      result["command"] = "examples sym-qubits";
      result["params"] = {{"two_j", sym_two_j}};
      result["extrinsic"] = annotated(extrinsic_ase(p));
      result["intrinsic"] = annotated(intrinsic_ase(sym_two_j + 1, f));
      result["gap"] = annotated(ase_gap(p, f));
    } else if (ex_maj->parsed()) {
      json amps;
      try {
        amps = json::parse(maj_amps);
      } catch (const json::exception& e2) {
        throw std::invalid_argument(std::string("bad --amps JSON: ") + e2.what());
      }
      if (!amps.is_array() || amps.empty())
        throw std::invalid_argument("--amps must be a nonempty JSON array");
      Vec v(amps.size());
      for (std::size_t i = 0; i < amps.size(); ++i) v(i) = complex_from_json(amps[i]);
      v /= v.norm();
      SpinState psi(int(amps.size()) - 1, v);
      auto stars = majorana_roots(psi);
      result["command"] = "examples majorana";
      result["params"] = {{"two_j", psi.two_j}};
      json finite = json::array(), bloch = json::array();
      for (const cx& r : stars.finite) {
        finite.push_back(complex_to_json(r));
        auto b = root_to_bloch(r);
        bloch.push_back({b(0), b(1), b(2)});
      }
      for (int i = 0; i < stars.inf_count; ++i) bloch.push_back({0.0, 0.0, -1.0});
      result["finite_roots"] = finite;
      result["roots_at_infinity"] = stars.inf_count;
      result["bloch_vectors"] = bloch;
    } else if (ex_poly->parsed()) {
      if (poly_exact == poly_mc)
        throw std::invalid_argument("choose exactly one of --exact / --mc");
      int two_j = int(std::lround(2 * poly_spin));
      if (std::abs(2 * poly_spin - two_j) > 1e-9 || two_j < 1)
        throw std::invalid_argument("--spin must be a positive half-integer");
      auto p = spin_zero_projector(std::vector<int>(poly_faces, two_j));
      Flavor f = detail::parity_flavor(p.rank);
      result["command"] = "examples polyhedron";
      result["params"] = {{"faces", poly_faces}, {"spin", poly_spin}, {"d_small", p.rank}};
      result["intrinsic"] = annotated(intrinsic_ase(p.rank, f));
      if (poly_exact) {
        result["extrinsic"] = annotated(extrinsic_ase(p));
        result["gap"] = annotated(ase_gap(p, f));
      } else {
        result["estimate"] = mc_result_to_json(mc_ase_preset(p, seed));
      }
    } else if (ex_gauge->parsed()) {
      auto S = zd_gauge_set(gauge_d, gauge_n);
      result["command"] = "examples gauge";
      result["params"] = {{"d", gauge_d}, {"n", gauge_n}};
      result["set_size"] = (long long)S.elements.size();
      result["a_set_size"] = (long long)a_set(S).size();
      Flavor f = detail::parity_flavor(S.code_dim());
      result["gap"] = annotated(code_gap_closed_form(S, f));
      result["classification"] = detail::gap_class_name(classify_gap(S, f).cls);
    } else if (ex_422->parsed()) {
      auto codes = builtin_codes();
      auto p = codespace_projector(codes.at("422").set);
      result["command"] = "examples 422";
      result["extrinsic"] = annotated(extrinsic_ase(p));
      result["gap_multiqubit"] = annotated(ase_gap(p, Flavor::Multiqubit));
      result["gap_even_qudit"] = annotated(ase_gap(p, Flavor::EvenQudit));
    } else {
      err << "no operation selected; see --help\n";
      return 1;
    }

    detail::emit(result, format, out);
    return 0;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace magicgap
